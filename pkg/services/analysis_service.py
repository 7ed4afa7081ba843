"""
Analysis service - numerical checks of the attenuation functions, selectability
integrals, obj functionals, impossibility constants and survival/alone bounds
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, optimize

from config import settings
from errors import InvalidPlanError, NotOneRegularError, ParameterRangeError
from models import AttenuationFn, AttenuationKind, CurvePoint, GraphInstance, PropertyCheckReport
from services.attenuation_service import attenuation_service
from services.graph_service import graph_service
from services.ocrs_service import ocrs_service

logger = logging.getLogger(__name__)

E = math.e
A1 = attenuation_service.A1
A2 = attenuation_service.A2
# Below this xy the T kernel uses its series
KERNEL_SERIES_CUTOFF = 1e-4

# Grid values per block of the vertex-split sweep
SPLIT_BLOCK_ELEMENTS = 1 << 18


def _quad(func, lo: float = 0.0, hi: float = 1.0) -> float:
    value, _ = integrate.quad(func, lo, hi, epsabs=settings.QUAD_TOL, epsrel=settings.QUAD_TOL, limit=200)
    return float(value)


def _kernel(u: np.ndarray) -> np.ndarray:
    """(u - 1 + e^{-u}) / u^2, equal to 1/2 at u = 0"""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < KERNEL_SERIES_CUTOFF
    safe = np.where(small, 1.0, u)
    direct = (safe + np.expm1(-safe)) / (safe * safe)
    series = 0.5 - u / 6.0 + u * u / 24.0 - u ** 3 / 120.0
    return np.where(small, series, direct)


class AnalysisService:
    """Analytic functions and grid verifications"""

    # Building blocks
    def func_ell(self, fn: AttenuationFn, x, y):
        """l(x, y) = 1 - y s(x)"""
        return 1.0 - np.asarray(y, dtype=float) * attenuation_service.survival(fn, x)

    def func_T(self, fn: AttenuationFn, x, y):
        """
        T(x, y) = s(1 - x)/x * (1 - (1 - e^{-xy})/(xy)), written as s(1 - x) y K(xy)

        The kernel K has the finite limit 1/2 at 0, so x -> 0 gives a(1) y / 2
        and y -> 0 gives 0.
        """
        x_arr, y_arr = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        shape = x_arr.shape
        xf = np.atleast_1d(x_arr).ravel()
        yf = np.atleast_1d(y_arr).ravel()
        s = attenuation_service.survival(fn, np.clip(1.0 - xf, 0.0, 1.0))
        value = (s * yf * _kernel(xf * yf)).reshape(shape)
        if value.ndim == 0:
            return float(value)
        return value

    # Selectability curves
    def poisson_limit_general(self, x_e: float, y):
        """Integrand of the general selectability curve in the vertex-split limit"""
        w = 1.0 - x_e
        y = np.asarray(y, dtype=float)
        return np.exp(-2.0 * w * y) * (1.0 + attenuation_service.evaluate(A1, 1.0) * w * y ** 2)

    def poisson_limit_bipartite(self, x_e: float, y):
        """Integrand of the bipartite selectability curve in the vertex-split limit"""
        w = 1.0 - x_e
        y = np.asarray(y, dtype=float)
        return (np.exp(-w * y) * (1.0 + attenuation_service.evaluate(A2, 1.0) * w * y ** 2 / 2.0)) ** 2

    def _check_unit(self, name: str, value: float) -> None:
        if not 0.0 <= value <= 1.0:
            raise ParameterRangeError(f"{name} must lie in [0, 1], got {value}")

    def selectability_curve_general(self, x_e: float) -> float:
        """a1(x_e) times the integral of the general limit integrand"""
        self._check_unit("x_e", x_e)
        return attenuation_service.evaluate(A1, x_e) * _quad(lambda y: float(self.poisson_limit_general(x_e, y)))

    def selectability_curve_bipartite(self, x_e: float) -> float:
        """a2(x_e) times the integral of the bipartite limit integrand"""
        self._check_unit("x_e", x_e)
        return attenuation_service.evaluate(A2, x_e) * _quad(lambda y: float(self.poisson_limit_bipartite(x_e, y)))

    def closed_form_general(self) -> float:
        return (E ** 2 - 4 * E ** 3 + E ** 4 + 20 * E - 22) / (4 * E ** 2)

    def closed_form_bipartite(self) -> float:
        return (E ** 6 + E ** 4 - 42 - 4 * E ** 2) / (2 * E ** 6)

    def selectability_curves(self, points: int = 1001) -> List[Dict[str, float]]:
        """Both curves sampled on a uniform x_e grid"""
        rows = []
        for x_e in np.linspace(0.0, 1.0, points):
            rows.append({
                "x_e": float(x_e),
                "general": self.selectability_curve_general(float(x_e)),
                "bipartite": self.selectability_curve_bipartite(float(x_e)),
            })
        return rows

    def curve_points(self, fn: AttenuationFn, y: float, points: int = 101) -> List[CurvePoint]:
        """l(x, y), s(x) and T(x, y) over x at a fixed y"""
        out = []
        for x in np.linspace(0.0, 1.0, points):
            s = attenuation_service.survival(fn, float(x))
            out.append(CurvePoint(
                x=float(x),
                value=float(self.func_ell(fn, float(x), y)),
                components={"s": float(s), "T": float(self.func_T(fn, float(x), y)),
                            "a": float(attenuation_service.evaluate(fn, float(x)))},
            ))
        return out

    # Attenuation property checks
    def check_first_order(self, fn: AttenuationFn, grid_step: float = 1e-3,
                          tol: float = 1e-6) -> PropertyCheckReport:
        """
        Convexity of x -> ln(1 - y x a(x)) on [0,1]^2, a(0) = 1 and a non-increasing

        Convexity is read from second central differences at grid spacing.
        """
        xs = np.arange(0.0, 1.0 + grid_step / 2, grid_step)
        xs[-1] = min(xs[-1], 1.0)
        ys = xs.copy()
        h = grid_step

        a_vals = attenuation_service.evaluate(fn, xs)
        s_vals = xs * a_vals
        inner = 1.0 - ys[:, None] * s_vals[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            f = np.log(inner)
        second = (f[:, 2:] - 2.0 * f[:, 1:-1] + f[:, :-2]) / h ** 2
        second = np.where(np.isfinite(second), second, -np.inf)
        convexity_violation = float(max(0.0, -second.min())) if second.size else 0.0
        iy, ix = np.unravel_index(int(np.argmin(second)), second.shape) if second.size else (0, 0)

        a0_error = abs(float(a_vals[0]) - 1.0)
        increases = np.diff(a_vals)
        monotone_violation = float(max(0.0, increases.max())) if increases.size else 0.0

        worst = max(convexity_violation, a0_error, monotone_violation)
        passed = worst <= tol
        logger.info(f"{'✅' if passed else '❌'} first-order check ({fn.label}): worst violation {worst:.3e}")
        return PropertyCheckReport(
            property_id="first-order",
            grid={"step": grid_step, "x": [0.0, 1.0], "y": [0.0, 1.0]},
            worst_location={"x": float(xs[ix + 1]), "y": float(ys[iy])},
            worst_violation=worst,
            tolerance=tol,
            passed=passed,
            details={
                "attenuation": fn.label,
                "convexity_violation": convexity_violation,
                "a0_error": a0_error,
                "monotonicity_violation": monotone_violation,
            },
        )

    def second_order_expression(self, fn: AttenuationFn, xs: np.ndarray,
                                step: Optional[float] = None) -> np.ndarray:
        """(ln a)'(x) + 4/(1-x) - 2(1 - e^{x-1})/(e^{x-1} - x), derivative by finite differences"""
        h = settings.FD_STEP if step is None else step
        xs = np.asarray(xs, dtype=float)

        def log_a(points):
            return np.log(attenuation_service.evaluate(fn, points))

        central = xs - h >= 0.0
        deriv = np.empty_like(xs)
        xc = xs[central]
        deriv[central] = (log_a(xc + h) - log_a(xc - h)) / (2.0 * h)
        xf = xs[~central]
        deriv[~central] = (-3.0 * log_a(xf) + 4.0 * log_a(xf + h) - log_a(xf + 2.0 * h)) / (2.0 * h)

        t = xs - 1.0
        em = np.expm1(t)
        return deriv + 4.0 / (1.0 - xs) - 2.0 * (-em) / (em - t)

    def check_second_order(self, fn: AttenuationFn, grid_step: float = 1e-3, x_max: float = 1.0 - 1e-3,
                           tol: float = 1e-6) -> PropertyCheckReport:
        """
        The second-order expression stays <= tol on [0, x_max]

        x_max < 1 since both singular terms diverge at x = 1.
        """
        if not 0.0 < x_max < 1.0:
            raise ParameterRangeError(f"x_max must lie in (0, 1), got {x_max}")
        xs = np.arange(0.0, x_max + grid_step / 2, grid_step)
        xs = xs[xs <= x_max + 1e-15]
        values = self.second_order_expression(fn, xs)
        idx = int(np.argmax(values))
        worst = float(max(0.0, values[idx]))
        passed = worst <= tol
        residual = float(np.max(np.abs(values)))
        logger.info(f"{'✅' if passed else '❌'} second-order check ({fn.label}): max {values[idx]:.3e}, |max| {residual:.3e}")
        return PropertyCheckReport(
            property_id="second-order",
            grid={"step": grid_step, "x": [0.0, x_max], "fd_step": settings.FD_STEP},
            worst_location={"x": float(xs[idx])},
            worst_violation=worst,
            tolerance=tol,
            passed=passed,
            details={"attenuation": fn.label, "max_expression": float(values[idx]), "ode_residual": residual},
        )

    def _split_terms(self, fn: AttenuationFn, x1, x2, y) -> Tuple[np.ndarray, np.ndarray]:
        """(l1 l2 - e^{-(x1+x2)y}, F) with x1, x2 broadcast against y"""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        y = np.asarray(y, dtype=float)
        total = x1 + x2
        s1 = attenuation_service.survival(fn, x1)
        s2 = attenuation_service.survival(fn, x2)
        s_rest = attenuation_service.survival(fn, np.clip(1.0 - total, 0.0, 1.0))
        a_one = attenuation_service.evaluate(fn, 1.0)

        u = total * y
        ys1 = y * s1
        ys2 = y * s2
        l1 = 1.0 - ys1
        l2 = 1.0 - ys2
        both = l1 * l2
        decay = np.exp(-u)
        t_val = s_rest * y * _kernel(u)
        late = both - decay
        values = both + t_val * (ys1 * l2 + ys2 * l1) - decay * (1.0 + total * a_one * y ** 2 / 2.0)
        return late, values

    def vertex_split_function(self, fn: AttenuationFn, x1, x2, y) -> np.ndarray:
        """
        F(y) = l1 l2 + T(x1+x2, y)(y s1 l2 + y s2 l1) - e^{-(x1+x2)y}(1 + (x1+x2) a(1) y^2 / 2)

        x1 and x2 may be arrays broadcasting against y.
        """
        return self._split_terms(fn, x1, x2, y)[1]

    def _sign_changes(self, values: np.ndarray, deadband: float) -> np.ndarray:
        """Sign changes along the last axis, ignoring entries within the dead-band"""
        values = np.atleast_2d(values)
        signs = np.sign(values)
        signs[np.abs(values) <= deadband] = 0.0
        positions = np.arange(values.shape[-1])
        last = np.maximum.accumulate(np.where(signs != 0, positions, 0), axis=-1)
        filled = np.take_along_axis(signs, last, axis=-1)
        flips = (filled[:, 1:] != filled[:, :-1]) & (filled[:, :-1] != 0)
        return np.count_nonzero(flips, axis=-1)

    def check_vertex_split_props(self, fn: AttenuationFn, grid_step: float = 1e-3, tol: float = 1e-6,
                                 two_variable: Optional[bool] = None,
                                 y_points: Optional[int] = None) -> PropertyCheckReport:
        """
        Vertex-splitting properties over pairs (x1, x2) with x1 + x2 <= 1

        (i) l(x1,y) l(x2,y) - e^{-(x1+x2)y} >= 0 on the y grid;
        (ii) F is non-negative near y = 0, changes sign at most once and has a
        non-negative integral. The single-variable form fixes x2 = 0; it is the
        default for a2.

        Pairs are evaluated in blocks of SPLIT_BLOCK_ELEMENTS grid values.

        Args:
            fn: Attenuation function
            grid_step: Spacing of the x grid
            tol: Tolerance
            two_variable: Sweep pairs, defaults to True unless fn is a2
            y_points: Size of the y grid, defaults to settings.Y_POINTS

        Returns:
            PropertyCheckReport
        """
        if grid_step <= 0:
            raise ParameterRangeError(f"grid_step must be positive, got {grid_step}")
        if two_variable is None:
            two_variable = fn.kind != AttenuationKind.A2
        y_points = settings.Y_POINTS if y_points is None else y_points
        ys = np.linspace(0.0, 1.0, y_points)
        small_y = ys <= 0.05
        h = ys[1] - ys[0]
        grid = np.clip(np.arange(0.0, 1.0 + grid_step / 2, grid_step), 0.0, 1.0)
        deadband = settings.SIGN_DEADBAND

        if two_variable:
            first, second = np.meshgrid(grid, grid, indexing="ij")
            keep = (second >= first) & (first + second <= 1.0 + 1e-12)
            x1s = first[keep]
            x2s = np.minimum(second[keep], 1.0 - x1s)
        else:
            x1s = grid
            x2s = np.zeros_like(grid)
        pair_count = len(x1s)

        worst = 0.0
        worst_at: Dict[str, float] = {"x1": 0.0, "x2": 0.0}
        min_integral = math.inf
        min_integral_at = (0.0, 0.0)
        max_changes = 0
        max_concavity = -math.inf
        rows = max(1, SPLIT_BLOCK_ELEMENTS // y_points)
        for start in range(0, pair_count, rows):
            a = x1s[start:start + rows, None]
            b = x2s[start:start + rows, None]
            late, values = self._split_terms(fn, a, b, ys)
            integrals = integrate.simpson(values, x=ys, axis=-1)
            changes = self._sign_changes(values, deadband)

            violation = np.maximum.reduce([
                np.zeros(len(integrals)),
                -late.min(axis=-1),
                -values[:, small_y].min(axis=-1),
                -integrals,
                np.maximum(0, changes - 1).astype(float),
            ])
            i = int(np.argmax(violation))
            if violation[i] > worst:
                worst = float(violation[i])
                worst_at = {"x1": float(a[i, 0]), "x2": float(b[i, 0])}
            j = int(np.argmin(integrals))
            if integrals[j] < min_integral:
                min_integral = float(integrals[j])
                min_integral_at = (float(a[j, 0]), float(b[j, 0]))
            max_changes = max(max_changes, int(changes.max()))
            curvature = np.diff(values, 2, axis=-1) / h ** 2
            max_concavity = max(max_concavity, float(curvature.max()))

        # adaptive quadrature at the smallest grid integral
        qx1, qx2 = min_integral_at
        refined = _quad(lambda y: float(self.vertex_split_function(fn, qx1, qx2, np.array([y]))[0]))
        worst = max(worst, -refined)

        passed = worst <= tol
        logger.info(f"{'✅' if passed else '❌'} vertex-split check ({fn.label}, "
                    f"{'two' if two_variable else 'single'}-variable, {pair_count} pairs): "
                    f"worst violation {worst:.3e}")
        return PropertyCheckReport(
            property_id="vertex-split" if two_variable else "vertex-split-single",
            grid={"step": grid_step, "pairs": pair_count, "y_points": y_points, "deadband": deadband},
            worst_location=worst_at,
            worst_violation=worst,
            tolerance=tol,
            passed=passed,
            details={
                "attenuation": fn.label,
                "min_integral": min_integral,
                "min_integral_at": {"x1": qx1, "x2": qx2},
                "min_integral_quad": refined,
                "max_sign_changes": max_changes,
                "max_second_difference": max_concavity,
            },
        )

    # obj functionals
    def _endpoint_loads_one(self, g: GraphInstance, e: int, tol: Optional[float]) -> None:
        tol = settings.FEASIBILITY_TOL if tol is None else tol
        loads = graph_service.vertex_loads(g)
        u, v, _ = g.edges[e]
        for vertex in (u, v):
            if abs(loads[vertex] - 1.0) > tol:
                raise NotOneRegularError(f"Endpoint {vertex} of edge {e} has load {loads[vertex]:.12g}, expected 1")

    def obj_general_at(self, g: GraphInstance, e: int, y: float, fn: AttenuationFn = A1) -> float:
        """obj_G(e, y) with triangle partners f^c resolved from the instance"""
        u, v, _ = g.edges[e]
        incident = graph_service.incident_edges(g)
        pairs = graph_service.edge_index(g)
        around = [f for f in set(incident[u]) | set(incident[v]) if f != e]
        ells = {f: 1.0 - y * attenuation_service.survival(fn, g.edges[f][2]) for f in around}

        product = float(np.prod([ells[f] for f in around])) if around else 1.0
        total = product
        for f in around:
            fu, fv, x_f = g.edges[f]
            shared = u if u in (fu, fv) else v
            outer = fv if fu == shared else fu
            other_end = v if shared == u else u
            partner = pairs.get((min(outer, other_end), max(outer, other_end)))
            x_partner = g.edges[partner][2] if partner is not None else 0.0
            rest = float(np.prod([ells[h] for h in around if h != f])) if len(around) > 1 else 1.0
            total += (self.func_T(fn, min(1.0, x_f + x_partner), y)
                      * attenuation_service.survival(fn, x_f) * y * rest)
        return float(total)

    def obj_general(self, g: GraphInstance, e: int, fn: AttenuationFn = A1,
                    tol: Optional[float] = None) -> float:
        """
        Integral over y of obj_G(e, y)

        Only the loads at e's endpoints are required to be 1; the functional reads
        nothing beyond the edges adjacent to e.
        """
        graph_service.check_edge(g, e)
        self._endpoint_loads_one(g, e, tol)
        return _quad(lambda y: self.obj_general_at(g, e, y, fn))

    def obj_minus_edge(self, g: GraphInstance, e: int, vertex: int, y, fn: AttenuationFn = A2):
        """obj_{G minus e}(vertex, y) for an endpoint of e"""
        u, v, _ = g.edges[e]
        if vertex not in (u, v):
            raise ParameterRangeError(f"Vertex {vertex} is not an endpoint of edge {e}")
        incident = graph_service.incident_edges(g)
        xs = np.array([g.edges[f][2] for f in incident[vertex] if f != e])
        y_arr = np.atleast_1d(np.asarray(y, dtype=float))
        if xs.size == 0:
            out = np.ones_like(y_arr)
        else:
            s = np.asarray(attenuation_service.survival(fn, xs))
            ells = 1.0 - y_arr[:, None] * s[None, :]
            product = np.prod(ells, axis=1)
            t_vals = np.stack([self.func_T(fn, np.full_like(y_arr, x), y_arr) for x in xs], axis=1)
            out = product.copy()
            for j in range(xs.size):
                rest = np.prod(np.delete(ells, j, axis=1), axis=1)
                out += t_vals[:, j] * s[j] * y_arr * rest
        return float(out[0]) if np.ndim(y) == 0 else out

    def obj_bipartite(self, g: GraphInstance, e: int, fn: AttenuationFn = A2,
                      tol: Optional[float] = None) -> float:
        """Integral over y of obj_{G-e}(u, y) * obj_{G-e}(v, y); needs no 3- or 5-cycles"""
        graph_service.check_edge(g, e)
        graph_service.require_no_short_odd_cycles(g)
        self._endpoint_loads_one(g, e, tol)
        u, v, _ = g.edges[e]
        return _quad(lambda y: self.obj_minus_edge(g, e, u, y, fn) * self.obj_minus_edge(g, e, v, y, fn))

    # Impossibility constants
    def ocrs_bipartite_constraint(self, c: float) -> float:
        """1 - 3c + (1 - exp(-c(1-2c)/(1-c)^2))^2"""
        if not 0.0 <= c <= 0.5:
            raise ParameterRangeError(f"c must lie in [0, 1/2], got {c}")
        return 1.0 - 3.0 * c + (-math.expm1(-c * (1.0 - 2.0 * c) / (1.0 - c) ** 2)) ** 2

    def ocrs_bipartite_root(self, lo: float = 0.349, hi: float = 0.36, tol: float = 1e-10) -> float:
        """Root of the bipartite OCRS constraint inside [lo, hi]"""
        f_lo = self.ocrs_bipartite_constraint(lo)
        f_hi = self.ocrs_bipartite_constraint(hi)
        if f_lo * f_hi > 0:
            raise ParameterRangeError(f"No sign change in [{lo}, {hi}]")
        return float(optimize.bisect(self.ocrs_bipartite_constraint, lo, hi, xtol=tol))

    def any_ocrs_upper_bound(self, eps: float) -> float:
        """1 / (1 + (3 + eps)(1 - eps)/2): no OCRS beats it on the 4-cycle example"""
        self._check_unit("eps", eps)
        return 1.0 / (1.0 + (3.0 + eps) * (1.0 - eps) / 2.0)

    def four_cycle_bound(self, c: float, eps: float) -> float:
        """P[diagonal (1,3) not blocked] - c on the 4-cycle example under calibrated attenuation"""
        p = c * (1.0 - eps) / 2.0
        return (1.0 - p) ** 2 * (1.0 - p / (1.0 - p) ** 2) ** 2 - c

    def four_cycle_root(self, eps: float, tol: float = 1e-10) -> float:
        return float(optimize.bisect(lambda c: self.four_cycle_bound(c, eps), 0.2, 0.45, xtol=tol))

    def three_path_root(self, eps: float, tol: float = 1e-10) -> float:
        """Root of (1 - c(1-eps))^2 = c"""
        return float(optimize.bisect(lambda c: (1.0 - c * (1.0 - eps)) ** 2 - c, 0.0, 1.0, xtol=tol))

    # Survival and alone bounds
    def verify_survival_alone_bounds(self, g: GraphInstance, order: Optional[Sequence[int]], c: float,
                                     tol: float = 1e-12) -> PropertyCheckReport:
        """
        Survival probability x_e alpha_e between c x_e/(1 - c max(x_u, x_v)) and
        c x_e/(1 - c x_u - c x_v), and P[endpoint alone] >= (1 - c - c x_u)/(1 - c),
        where x_u sums the values of u's edges arriving before e

        Args:
            g: Instance
            order: Arrival order
            c: Selectability in [0, 1)
            tol: Slack

        Returns:
            PropertyCheckReport
        """
        if not 0.0 <= c < 1.0:
            raise ParameterRangeError(f"c must lie in [0, 1), got {c}")
        plan = ocrs_service.compute_alphas_exact(g, order, c)
        if not plan.all_valid:
            raise InvalidPlanError(f"Plan at c={c} clamps {len(plan.valid) - sum(plan.valid)} alpha(s)")

        prefix_load = np.zeros(g.vertex_count)
        alone = np.ones(g.vertex_count)
        worst = 0.0
        worst_at: Dict[str, float] = {}
        survival_slack = math.inf
        alone_slack = math.inf
        for e in plan.order:
            u, v, x = g.edges[e]
            survive = x * plan.alphas[e]
            xu, xv = prefix_load[u], prefix_load[v]
            lower = c * x / (1.0 - c * max(xu, xv))
            denom = 1.0 - c * xu - c * xv
            upper = c * x / denom if denom > 0 else math.inf
            checks = [lower - survive, survive - upper]
            for vertex, xw in ((u, xu), (v, xv)):
                bound = (1.0 - c - c * xw) / (1.0 - c)
                checks.append(bound - alone[vertex])
                alone_slack = min(alone_slack, alone[vertex] - bound)
            survival_slack = min(survival_slack, survive - lower, upper - survive)
            violation = max(checks)
            if violation > worst:
                worst = violation
                worst_at = {"edge": float(e)}

            prefix_load[u] += x
            prefix_load[v] += x
            alone[u] *= 1.0 - survive
            alone[v] *= 1.0 - survive

        passed = worst <= tol
        logger.info(f"{'✅' if passed else '❌'} survival/alone bounds at c={c}: worst violation {worst:.3e}")
        return PropertyCheckReport(
            property_id="survival-alone-bounds",
            grid={"c": c, "edges": len(g.edges)},
            worst_location=worst_at,
            worst_violation=worst,
            tolerance=tol,
            passed=passed,
            details={"min_survival_slack": survival_slack if survival_slack < math.inf else None,
                     "min_alone_slack": alone_slack if alone_slack < math.inf else None},
        )


# Global analysis service instance
analysis_service = AnalysisService()
