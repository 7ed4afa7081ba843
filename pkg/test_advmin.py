"""
Tests for the adversary minimization objective and its search
"""

import numpy as np
import pytest

from errors import ParameterRangeError
from services.advmin_service import advmin_service

C = 0.3445
B = C / (1.0 - C)


def objective_by_hand(b, y, z):
    """Double sum over i != j written out with explicit prefix products"""
    def terms(w):
        out = []
        prefix = 1.0
        for wi in w:
            out.append(wi * (1.0 - b + b * wi) / (1.0 + b * wi) * prefix)
            prefix /= 1.0 + b * wi
        return out

    ty, tz = terms(y), terms(z)
    total = 0.0
    for i in range(len(y)):
        for j in range(len(z)):
            if i != j:
                total += ty[i] * tz[j]
    return b * b * total


def feasible_point(k, seed):
    rng = np.random.default_rng(seed)
    return advmin_service.decode(rng.normal(size=2 * k), k)


def test_objective_k2():
    """Test the two-coordinate objective against the explicit double sum"""
    y, z = [0.6, 0.4], [0.5, 0.5]
    assert advmin_service.advmin_objective(B, y, z) == pytest.approx(objective_by_hand(B, y, z), abs=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_objective_random_points(seed):
    """Test the vectorized objective on random feasible points"""
    y, z = feasible_point(6, seed)
    assert advmin_service.advmin_objective(B, y, z) == pytest.approx(objective_by_hand(B, y, z), abs=1e-12)


def test_objective_errors():
    with pytest.raises(ParameterRangeError):
        advmin_service.advmin_objective(-0.1, [1.0], [1.0])
    with pytest.raises(ParameterRangeError):
        advmin_service.advmin_objective(B, [0.5, 0.5], [1.0])


@pytest.mark.parametrize("seed", range(10))
def test_decode_is_feasible(seed):
    """Test that decoded points are sorted, sum to one and respect y_i + z_i <= 1"""
    y, z = feasible_point(8, seed)
    residuals = advmin_service.residuals(y, z)
    assert all(value <= 1e-9 for value in residuals.values()), residuals


def test_encode_decode_hybrid():
    """Test that the hybrid point survives encoding"""
    hybrid = advmin_service.hybrid_point(5)
    assert hybrid.sum() == pytest.approx(1.0)
    y, z = advmin_service.decode(advmin_service.encode(hybrid, hybrid, 5), 5)
    assert np.allclose(y, hybrid)
    assert np.allclose(z, hybrid)


def test_hybrid_limit():
    """Test the hybrid objective against many spread coordinates"""
    k = 4000
    hybrid = advmin_service.hybrid_point(k)
    value = advmin_service.advmin_objective(B, hybrid, hybrid)
    assert value == pytest.approx(advmin_service.advmin_hybrid_limit(B), abs=1e-3)
    assert advmin_service.advmin_hybrid_limit(0.0) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_aux_bounds_advmin_from_below(seed):
    """Test AdvMinAux <= AdvMin at the same feasible point"""
    y, z = feasible_point(12, seed)
    for K in (3, 5, 8):
        aux = advmin_service.advminaux_objective(B, K, y, z)
        assert aux <= advmin_service.advmin_objective(B, y, z) + 1e-12


def test_aux_errors():
    with pytest.raises(ParameterRangeError):
        advmin_service.advminaux_objective(B, 2, [0.5, 0.5], [0.5, 0.5])
    with pytest.raises(ParameterRangeError):
        advmin_service.advminaux_objective(B, 5, [0.5, 0.5], [0.5, 0.5])


def test_search_improves_on_hybrid():
    """Test a small search: feasible, no worse than its hybrid start, reproducible"""
    first = advmin_service.advmin_search(B, 4, restarts=3, seed=0, maxiter=1500)
    assert first.objective <= first.hybrid_objective + 1e-12
    assert first.restarts == 3
    assert all(value <= 1e-9 for value in first.residuals.values())
    assert first.objective == pytest.approx(advmin_service.advmin_objective(B, first.y, first.z), abs=1e-12)

    second = advmin_service.advmin_search(B, 4, restarts=3, seed=0, maxiter=1500)
    assert second.objective == first.objective


def test_search_warm_start():
    """Test that a shorter warm start is padded"""
    point = advmin_service.advmin_search(B, 3, restarts=3, seed=1, maxiter=500,
                                         warm_starts=[([0.7, 0.3], [0.3, 0.7])])
    assert len(point.y) == 3
    assert point.form == "advmin"


def test_search_errors():
    with pytest.raises(ParameterRangeError):
        advmin_service.advmin_search(B, 1)
    with pytest.raises(ParameterRangeError):
        advmin_service.advmin_search(B, 3, restarts=0)
