"""
Pydantic models for the contention resolution toolkit
Graphs with fractional matchings, scheme plans, run records and reports
"""

import hashlib
import json
from pydantic import BaseModel, Field, field_validator, ConfigDict
from typing import List, Optional, Dict, Any, Tuple
from enum import Enum


SCHEMA_VERSION = 1


class AttenuationKind(str, Enum):
    """Attenuation function families"""
    A1 = "a1"
    A2 = "a2"
    CONSTANT = "constant"
    TABLE = "table"


class PlanMode(str, Enum):
    """How OCRS attenuation probabilities were computed"""
    EXACT = "exact"
    MONTE_CARLO = "monte-carlo"


class SchemeKind(str, Enum):
    """Contention resolution scheme families"""
    OCRS = "ocrs"
    RCRS = "rcrs"


class ReductionMethod(str, Enum):
    """1-regularization gadgets"""
    SEVEN_CYCLE = "seven-cycle"
    BICLIQUE = "biclique"


# Graph Models
class GraphInstance(BaseModel):
    """Graph with a fractional matching; edges are identified by list index"""
    vertex_count: int = Field(..., ge=0, alias="vertices", description="Number of vertices")
    edges: List[Tuple[int, int, float]] = Field(default_factory=list, description="(u, v, x) triples")
    arrival_order: Optional[List[int]] = Field(None, alias="order", description="Permutation of edge indices")
    bipartition: Optional[List[int]] = Field(None, description="0/1 color per vertex")
    symmetry_classes: Optional[List[List[int]]] = Field(None, alias="symmetry", description="Exchangeable edge groups")
    name: Optional[str] = Field(None, description="Generator name, if generated")

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def to_json_dict(self) -> Dict[str, Any]:
        """Instance JSON format with optional keys omitted when absent"""
        payload: Dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "vertices": self.vertex_count,
            "edges": [[u, v, x] for u, v, x in self.edges],
        }
        if self.arrival_order is not None:
            payload["order"] = list(self.arrival_order)
        if self.bipartition is not None:
            payload["bipartition"] = list(self.bipartition)
        if self.symmetry_classes is not None:
            payload["symmetry"] = [list(c) for c in self.symmetry_classes]
        if self.name is not None:
            payload["name"] = self.name
        return payload


class ValidationReport(BaseModel):
    """Matching polytope check"""
    feasible: bool
    per_vertex_load: List[float] = Field(..., description="Sum of x over incident edges")
    violations: List[Tuple[int, float]] = Field(default_factory=list, description="(vertex, load) over 1 + tol")
    tolerance: float


class MatchingResult(BaseModel):
    """One execution of a contention resolution scheme"""
    selected: List[int] = Field(..., description="Selected edge indices, ascending")
    active_states: List[bool] = Field(..., description="X_e per edge")
    survival_states: List[bool] = Field(..., description="S_e = X_e * A_e per edge")


class Reduction(BaseModel):
    """1-regular instance built around an original instance"""
    method: ReductionMethod
    reduced: GraphInstance
    edge_map: List[int] = Field(..., description="Original edge index -> reduced edge index")
    added_vertices: int = Field(..., ge=0)


# OCRS Models
class OcrsPlan(BaseModel):
    """Calibrated attenuation for the adversarial-order scheme"""
    c: float = Field(..., ge=0, le=1, description="Target selectability")
    order: List[int] = Field(..., description="Arrival order the plan was computed for")
    alphas: List[float] = Field(..., description="Attenuation probability per edge, clamped to [0, 1]")
    blockfree_probs: List[float] = Field(..., description="P[edge not blocked] per edge")
    valid: List[bool] = Field(..., description="Unclamped alpha <= 1 per edge")
    mode: PlanMode
    samples: Optional[int] = None
    seed: Optional[int] = None
    ci_halfwidth: Optional[List[float]] = None

    @property
    def all_valid(self) -> bool:
        return all(self.valid)


class SubsetDistribution(BaseModel):
    """Exact law of the matched-vertex set, keyed by vertex bitmask"""
    vertex_count: int
    probabilities: Dict[int, float]

    def total_mass(self) -> float:
        return float(sum(self.probabilities.values()))

    def prob_matched(self, vertex: int) -> float:
        bit = 1 << vertex
        return float(sum(p for mask, p in self.probabilities.items() if mask & bit))

    def prob_all_matched(self, *vertices: int) -> float:
        bits = 0
        for vertex in vertices:
            bits |= 1 << vertex
        return float(sum(p for mask, p in self.probabilities.items() if mask & bits == bits))

    def prob_none_matched(self, *vertices: int) -> float:
        bits = 0
        for vertex in vertices:
            bits |= 1 << vertex
        return float(sum(p for mask, p in self.probabilities.items() if mask & bits == 0))


class JointMatchedProbs(BaseModel):
    """Matched probabilities of two vertices just before an arrival"""
    prob_u: float
    prob_v: float
    prob_both: float

    @property
    def covariance(self) -> float:
        return self.prob_both - self.prob_u * self.prob_v


# RCRS Models
class AttenuationFn(BaseModel):
    """Attenuation function a: [0, 1] -> [0, 1]"""
    kind: AttenuationKind
    value: Optional[float] = Field(None, ge=0, le=1, description="Constant value for kind=constant")
    table: Optional[List[float]] = Field(None, description="Values on a uniform grid over [0, 1] for kind=table")

    model_config = ConfigDict(frozen=True)

    @field_validator("table")
    @classmethod
    def table_in_range(cls, v):
        if v is not None:
            if len(v) < 2:
                raise ValueError("attenuation table needs at least two points")
            if any(t < 0 or t > 1 for t in v):
                raise ValueError("attenuation table values must lie in [0, 1]")
        return v

    @property
    def label(self) -> str:
        if self.kind == AttenuationKind.CONSTANT:
            return f"const={self.value}"
        if self.kind == AttenuationKind.TABLE:
            return f"table[{len(self.table or [])}]"
        return self.kind.value


class BlockerDiagnostic(BaseModel):
    """Relevant edge f of e and its simple-blocker, if any"""
    relevant_edge: int
    simple_blocker: Optional[int] = None


class RcrsRunRecord(BaseModel):
    """One execution of the random-order scheme"""
    arrival_times: List[float]
    active_states: List[bool]
    survival_states: List[bool]
    matching: List[int]
    relevant_counts: Optional[List[int]] = Field(None, description="|R_e| per edge (diagnostics)")
    blockers: Optional[Dict[int, List[BlockerDiagnostic]]] = Field(
        None, description="Surviving edge -> relevant edges with simple-blockers (diagnostics)"
    )


class ProbabilityEstimate(BaseModel):
    """Binomial frequency with a Wilson interval"""
    successes: int
    trials: int
    value: float
    ci_lo: float
    ci_hi: float


# Estimator Models
class SchemeSpec(BaseModel):
    """Which scheme an estimate runs"""
    kind: SchemeKind
    plan: Optional[OcrsPlan] = None
    attenuation: Optional[AttenuationFn] = None

    @property
    def descriptor(self) -> str:
        if self.kind == SchemeKind.OCRS and self.plan is not None:
            return f"ocrs(c={self.plan.c}, mode={self.plan.mode.value})"
        if self.attenuation is not None:
            return f"rcrs({self.attenuation.label})"
        return self.kind.value


class EdgeEstimate(BaseModel):
    """Selection frequency of one edge"""
    edge: int
    x: float
    trials: int
    selected: int
    ratio: float
    ci_lo: float
    ci_hi: float


class ClassEstimate(BaseModel):
    """Selection frequency pooled over one symmetry class"""
    class_index: int
    edges: List[int]
    x: float = Field(..., description="Mean x over the class")
    trials: int = Field(..., description="Trials times class size")
    selected: int
    ratio: float
    ci_lo: float
    ci_hi: float


class EstimateReport(BaseModel):
    """Empirical selectability of a scheme on one instance"""
    scheme: str
    trials: int
    seed: int
    z: float
    edges: List[EdgeEstimate]
    pooled: Optional[List[ClassEstimate]] = None
    min_ratio: Optional[float] = None
    min_ratio_ci: Optional[Tuple[float, float]] = None
    bonferroni_z: Optional[float] = None


class ExactSelectionCheck(BaseModel):
    """Exact selection probabilities of a plan against c x_e"""
    selection_probs: List[float]
    max_gap: float
    tolerance: float
    passed: bool


class NoRelevantEstimate(ProbabilityEstimate):
    """No-relevant-edge frequency next to its exact value"""
    edge: int
    exact_value: float
    exact_inside_ci: bool


# Analysis Models
class CurvePoint(BaseModel):
    """Sample of an analytic curve"""
    x: float
    value: float
    components: Optional[Dict[str, float]] = None


class PropertyCheckReport(BaseModel):
    """Outcome of a grid verification of an analytic property"""
    property_id: str
    grid: Dict[str, Any]
    worst_location: Dict[str, float] = Field(default_factory=dict)
    worst_violation: float
    tolerance: float
    passed: bool = Field(..., alias="pass")
    details: Dict[str, Any] = Field(default_factory=dict)

    model_config = ConfigDict(populate_by_name=True)


class AdvMinPoint(BaseModel):
    """Point of the adversary minimization problem"""
    b: float = Field(..., ge=0)
    k: int = Field(..., ge=1)
    y: List[float]
    z: List[float]
    objective: float
    residuals: Dict[str, float] = Field(default_factory=dict)
    form: str = Field("advmin", description="advmin or advminaux")
    restarts: Optional[int] = None
    hybrid_objective: Optional[float] = Field(None, description="Objective at y1 = z1 = 1/2 with uniform tails")
    hybrid_reproduced: Optional[bool] = Field(None, description="Local search from the hybrid point stays there")
    note: str = "heuristic search value: an upper bound on the infimum, not a certificate"


# Hardness Models
class Trajectory(BaseModel):
    """Greedy matching size over time on K_{n,n} (or K_n)"""
    n: int
    edge_count: int = Field(..., description="Edges arriving in total (n^2 for K_{n,n})")
    complete_graph: bool = False
    checkpoints: List[int] = Field(..., description="Edge-arrival counts t")
    samples: List[List[float]] = Field(..., description="Matched-vertex fraction (|M_t| / n on K_{n,n}) per trial and checkpoint")
    mean: List[float]
    lower: List[float]
    upper: List[float]

    @property
    def final_fractions(self) -> List[float]:
        return [row[-1] for row in self.samples] if self.checkpoints else []


# CLI Models
class RunConfig(BaseModel):
    """Resolved configuration of one command invocation"""
    subcommand: str
    instance: Optional[str] = None
    generator: Optional[str] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    trials: Optional[int] = None
    seed: int
    outputs: Dict[str, str] = Field(default_factory=dict)
    tolerances: Dict[str, float] = Field(default_factory=dict)

    def config_hash(self) -> str:
        """Stable hash of everything that affects results (outputs excluded)"""
        payload = self.model_dump(mode="json", exclude={"outputs"})
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


class TableRow(BaseModel):
    """One reproduction-table row contributed by a command"""
    row: str
    measured: float
    ci_lo: Optional[float] = None
    ci_hi: Optional[float] = None
    note: Optional[str] = None
