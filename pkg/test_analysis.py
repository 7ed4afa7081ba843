"""
Tests for the analytic checks: attenuation properties, selectability constants,
obj functionals, impossibility constants and survival/alone bounds
"""

import math

import numpy as np
import pytest
from scipy import integrate

from errors import InvalidPlanError, NotOneRegularError, ShortOddCycleError, ParameterRangeError
from models import GraphInstance
from services.analysis_service import analysis_service
from services.attenuation_service import attenuation_service
from services.instance_service import instance_service
from services.ocrs_service import ocrs_service

A1 = attenuation_service.A1
A2 = attenuation_service.A2


# Selectability constants

def test_closed_form_values():
    """Test the two guarantee constants"""
    assert analysis_service.closed_form_general() == pytest.approx(0.474035, abs=1e-6)
    assert analysis_service.closed_form_bipartite() == pytest.approx(0.478983, abs=1e-6)


def test_curves_agree_with_closed_forms():
    """Test quadrature at x_e = 0 against the closed forms"""
    general = analysis_service.selectability_curve_general(0.0)
    bipartite = analysis_service.selectability_curve_bipartite(0.0)
    assert abs(general - analysis_service.closed_form_general()) <= 1e-9
    assert abs(bipartite - analysis_service.closed_form_bipartite()) <= 1e-9


def test_curve_minima_at_zero():
    """Test that both curves are smallest at x_e = 0"""
    rows = analysis_service.selectability_curves(51)
    assert rows[0]["x_e"] == 0.0 and rows[-1]["x_e"] == 1.0
    general = [r["general"] for r in rows]
    bipartite = [r["bipartite"] for r in rows]
    assert int(np.argmin(general)) == 0
    assert int(np.argmin(bipartite)) == 0


def test_curve_range_check():
    with pytest.raises(ParameterRangeError):
        analysis_service.selectability_curve_general(1.5)


def test_kernel_limits():
    """Test T(x, y) at x -> 0 and y = 0"""
    assert analysis_service.func_T(A1, 0.3, 0.0) == 0.0
    a_one = attenuation_service.evaluate(A1, 1.0)
    assert analysis_service.func_T(A1, 1e-9, 0.8) == pytest.approx(a_one * 0.8 / 2.0, rel=1e-6)
    # series and direct forms meet at the cutoff
    below = analysis_service.func_T(A1, 0.5, 1.99e-4) / 1.99e-4
    above = analysis_service.func_T(A1, 0.5, 2.01e-4) / 2.01e-4
    assert abs(below - above) < 1e-6


# Attenuation property suite

@pytest.mark.parametrize("fn", [A1, A2])
def test_first_order_passes(fn):
    """Test convexity, a(0) = 1 and monotonicity"""
    report = analysis_service.check_first_order(fn, grid_step=1e-2)
    assert report.passed, report.details


def test_first_order_fails_for_increasing_attenuation():
    """Test that an increasing table is rejected"""
    report = analysis_service.check_first_order(attenuation_service.table([0.5, 1.0]), grid_step=5e-2)
    assert not report.passed
    assert report.details["monotonicity_violation"] > 0
    assert report.details["a0_error"] == pytest.approx(0.5)


@pytest.mark.parametrize("fn", [A1, A2])
def test_second_order_passes(fn):
    """Test the second-order inequality up to x = 1 - 1e-3"""
    report = analysis_service.check_second_order(fn, grid_step=1e-2)
    assert report.passed, report.details


def test_second_order_a2_is_the_ode_solution():
    """Test that a2 meets the second-order expression with equality"""
    report = analysis_service.check_second_order(A2, grid_step=1e-2)
    assert report.details["ode_residual"] <= 1e-6


def test_second_order_fails_for_constant_one():
    """Test that a = 1 violates the inequality near x = 0"""
    report = analysis_service.check_second_order(attenuation_service.constant(1.0), grid_step=1e-2)
    assert not report.passed
    assert report.details["max_expression"] > 0.5


def test_second_order_x_max_range():
    with pytest.raises(ParameterRangeError):
        analysis_service.check_second_order(A1, x_max=1.0)


def test_vertex_split_a1():
    """Test the two-variable vertex-splitting properties for a1 on the 1e-3 grid"""
    report = analysis_service.check_vertex_split_props(A1, grid_step=1e-3, y_points=401)
    assert report.grid["pairs"] > 250000
    assert report.property_id == "vertex-split"
    assert report.passed, report.details
    assert report.details["max_sign_changes"] <= 1


def test_vertex_split_a2_single_variable():
    """Test the single-variable specialization for a2 on the 1e-3 grid"""
    report = analysis_service.check_vertex_split_props(A2, grid_step=1e-3)
    assert report.grid["y_points"] == 2001
    assert report.property_id == "vertex-split-single"
    assert report.passed, report.details


def test_vertex_split_function_vanishes_at_origin():
    """Test F_{0,0} = 0"""
    ys = np.linspace(0.0, 1.0, 11)
    values = analysis_service.vertex_split_function(A1, 0.0, 0.0, ys)
    assert np.allclose(values, 0.0, atol=1e-12)


def test_sign_changes_ignore_the_deadband():
    """Test sign-change counting per row with values inside the dead-band skipped"""
    values = np.array([
        [0.0, 1.0, 1e-12, -1.0, -2.0, 3.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [-1.0, 1e-12, -1.0, 2.0, 2.0, 2.0],
    ])
    assert list(analysis_service._sign_changes(values, 1e-10)) == [2, 0, 1]


def test_vertex_split_function_broadcasts_over_pairs():
    """Test that a column of pairs matches pointwise evaluation"""
    ys = np.linspace(0.0, 1.0, 51)
    x1 = np.array([[0.1], [0.3], [0.45]])
    x2 = np.array([[0.2], [0.3], [0.55]])
    grid = analysis_service.vertex_split_function(A1, x1, x2, ys)
    for row in range(3):
        single = analysis_service.vertex_split_function(A1, float(x1[row, 0]), float(x2[row, 0]), ys)
        assert np.allclose(grid[row], single, atol=1e-14)


# obj functionals

def direct_T(x, y, a_one_minus):
    """T(x, y) written out without the kernel"""
    s = (1.0 - x) * a_one_minus
    return s / x * (1.0 - (1.0 - math.exp(-x * y)) / (x * y))


def test_obj_general_k22_matches_direct_formula():
    """Test obj on K_{2,2} against the product form written out by hand"""
    g = instance_service.complete_bipartite(2)
    value = analysis_service.obj_general(g, 0, A1)

    s = 0.5 * attenuation_service.evaluate(A1, 0.5)
    a_half = attenuation_service.evaluate(A1, 0.5)

    def integrand(y):
        if y == 0.0:
            return 1.0
        ell = 1.0 - y * s
        return ell ** 2 + 2.0 * direct_T(0.5, y, a_half) * s * y * ell

    expected, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)
    assert value == pytest.approx(expected, abs=1e-8)


def test_obj_general_decreases_under_splitting():
    """Test that splitting a neighbor vertex does not raise obj"""
    g = instance_service.complete_bipartite(2)
    previous = analysis_service.obj_general(g, 0, A1)
    for k in (2, 4, 8):
        split = instance_service.split_vertex(g, 3, k)
        value = analysis_service.obj_general(split, 0, A1)
        assert value <= previous + 1e-8
        previous = value


def test_obj_bipartite_product_form():
    """Test the product form against the general form on a triangle-free instance"""
    g = instance_service.complete_bipartite(2)
    product = analysis_service.obj_bipartite(g, 0, A2)
    general = analysis_service.obj_general(g, 0, A2)
    ys = np.linspace(0.0, 1.0, 2001)
    s = attenuation_service.survival(A2, 0.5)
    cross = analysis_service.func_T(A2, np.full_like(ys, 0.5), ys) * s * ys
    gap = float(integrate.simpson(cross ** 2, x=ys))
    assert product == pytest.approx(general + gap, abs=1e-6)


def test_obj_minus_edge_is_non_increasing():
    """Test that obj_{G-e}(v, y) is non-negative and non-increasing in y"""
    g = instance_service.complete_bipartite(3)
    ys = np.linspace(0.0, 1.0, 201)
    values = analysis_service.obj_minus_edge(g, 0, 0, ys, A2)
    assert np.all(values >= 0.0)
    assert np.all(np.diff(values) <= 1e-12)
    with pytest.raises(ParameterRangeError):
        analysis_service.obj_minus_edge(g, 0, 1, 0.5, A2)


def test_obj_preconditions():
    """Test endpoint-load and short-odd-cycle checks"""
    path = instance_service.three_path(0.1)
    with pytest.raises(NotOneRegularError):
        analysis_service.obj_general(path, 0)
    triangle = GraphInstance(vertex_count=3, edges=[(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)])
    assert analysis_service.obj_general(triangle, 0) > 0
    with pytest.raises(ShortOddCycleError):
        analysis_service.obj_bipartite(triangle, 0)


# Impossibility constants

def test_bipartite_ocrs_constraint():
    """Test the constraint sign at 0.349 and its root below 0.36"""
    assert analysis_service.ocrs_bipartite_constraint(0.349) >= 0
    root = analysis_service.ocrs_bipartite_root()
    assert 0.349 <= root <= 0.36
    assert abs(analysis_service.ocrs_bipartite_constraint(root)) < 1e-8
    with pytest.raises(ParameterRangeError):
        analysis_service.ocrs_bipartite_constraint(0.7)


def test_any_ocrs_upper_bound():
    """Test the 0.4 bound on the 4-cycle example"""
    assert abs(analysis_service.any_ocrs_upper_bound(1e-4) - 0.4) <= 1e-3
    assert analysis_service.any_ocrs_upper_bound(0.0) == pytest.approx(0.4)


def test_calibrated_attenuation_roots():
    """Test the 4-cycle and 3-path roots against the exact DP thresholds"""
    four_cycle = analysis_service.four_cycle_root(1e-4)
    assert four_cycle == pytest.approx(0.3602, abs=5e-4)
    assert four_cycle == pytest.approx(ocrs_service.max_valid_c(instance_service.example_4cycle(1e-4), None),
                                       abs=1e-3)
    assert analysis_service.three_path_root(0.0) == pytest.approx((3.0 - math.sqrt(5.0)) / 2.0, abs=1e-8)


# Survival and alone bounds

@pytest.mark.parametrize("g", [
    instance_service.example_4cycle(0.01),
    instance_service.neg_correlation(),
    instance_service.random_feasible(8, 12, 0.9, seed=1),
])
def test_survival_alone_bounds(g):
    """Test the survival and alone bounds for valid plans"""
    report = analysis_service.verify_survival_alone_bounds(g, None, 0.3)
    assert report.passed, report.details
    assert report.details["min_survival_slack"] >= -1e-12


def test_survival_alone_bounds_need_a_valid_plan():
    with pytest.raises(InvalidPlanError):
        analysis_service.verify_survival_alone_bounds(instance_service.three_path(1e-4), None, 0.45)
