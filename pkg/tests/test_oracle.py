import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mccert import InputError, neg_entropy_lower_bound
from mccert.oracle import best_candidate, candidate, candidates, exact_d2, grid_oracle_min, sampled_oracle_min


def p_grid(d, n=25):
    return np.linspace(1 / d, 1, n + 1)[1:]


@pytest.mark.parametrize("d", range(3, 13))
def test_candidate_feasibility(d):
    for P in p_grid(d):
        for c in candidates(d, P):
            r = d - c.s_a
            assert abs(c.s_a * c.phi_a + r * c.phi_x - 1) < 1e-10
            assert abs(c.s_a * c.phi_a**2 + r * c.phi_x**2 - P) < 1e-10
            gap = c.phi_x - c.phi_a
            assert (-1 < gap < 0) if P < 1 else (-1 - 1e-12 <= gap < 0)


@pytest.mark.parametrize("d", range(3, 13))
def test_objective_increases_with_sa(d):
    for P in p_grid(d):
        objs = [c.objective for c in candidates(d, P)]
        phys = [c.physical for c in candidates(d, P)]
        n = sum(phys)
        assert n >= 1 and all(phys[:n]) and not any(phys[n:])
        assert all(a < b for a, b in zip(objs[: n], objs[1: n]))
        assert best_candidate(d, P).s_a == 1
        assert best_candidate(d, P).objective == pytest.approx(neg_entropy_lower_bound(d, P), abs=1e-12)


def test_pure_limit():
    c = candidate(3, 1.0, 1)
    assert (c.phi_a, c.phi_x, c.objective, c.physical) == (1.0, 0.0, 0.0, True)
    assert not candidate(3, 1.0, 2).physical


def test_candidate_errors():
    with pytest.raises(InputError):
        candidate(2, 0.8, 1)
    with pytest.raises(InputError):
        candidate(4, 0.25, 1)
    with pytest.raises(InputError):
        candidate(4, 0.5, 4)


class TestGrid:
    def test_frozen_value(self):
        assert grid_oracle_min(4, 0.5, 1e-3) == pytest.approx(-1.4034880984237583, abs=1e-3)

    def test_single_point_and_vertex(self):
        assert grid_oracle_min(3, 1 / 3) == pytest.approx(-math.log2(3), abs=1e-12)
        assert grid_oracle_min(3, 1.0) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("d", [3, 4])
    def test_never_below_closed_form(self, d):
        for P in np.linspace(1 / d, 1, 7)[1:]:
            assert grid_oracle_min(d, P) >= neg_entropy_lower_bound(d, P) - 1e-12

    def test_errors(self):
        with pytest.raises(InputError):
            grid_oracle_min(5, 0.5)
        with pytest.raises(InputError):
            grid_oracle_min(3, 0.5, 0.01)


def test_exact_d2():
    assert exact_d2(0.68) == pytest.approx((0.8, 0.2))
    with pytest.raises(InputError):
        exact_d2(0.4)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 12), st.floats(0.01, 1.0), st.integers(0, 1000))
def test_sampled_is_upper_estimate(d, t, seed):
    P = 1 / d + t * (1 - 1 / d)
    found = sampled_oracle_min(d, P, 2000, np.random.default_rng(seed))
    assert found >= neg_entropy_lower_bound(d, P) - 1e-9
