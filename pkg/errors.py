"""
Exception hierarchy for the contention resolution toolkit
Services raise these; the command layer maps them to exit codes
"""


class CrsError(Exception):
    """Base class for every toolkit error"""


class StructuralError(CrsError):
    """Instance is malformed (bad endpoint, self-loop, duplicate edge, bad order)"""


class InfeasibleInstanceError(CrsError):
    """Fractional values leave the matching polytope"""


class NotBipartiteError(CrsError):
    """Operation needs a bipartite instance"""


class ShortOddCycleError(CrsError):
    """Operation needs an instance without 3- or 5-cycles"""


class NotOneRegularError(CrsError):
    """Operation needs every vertex load to equal 1"""


class VertexLimitError(CrsError):
    """Exact subset DP would exceed the configured vertex limit"""


class PlanMismatchError(CrsError):
    """OCRS plan was computed for another instance or arrival order"""


class InvalidPlanError(CrsError):
    """Plan has clamped attenuation where valid ones are required"""


class ParameterRangeError(CrsError, ValueError):
    """Numeric parameter outside its admissible range"""


class InvariantViolation(CrsError):
    """A property that always holds for the scheme was observed to fail"""


class ArtifactError(CrsError):
    """Artifact file is missing, unreadable or malformed"""
