import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from mnqc.bench.gap import (
    analytic_boundary,
    axis_intercepts,
    gap_scan,
    is_down_closed,
    score_is_monotone,
)


def down_closure(mask):
    out = np.zeros_like(mask)
    for i, j in zip(*np.nonzero(mask)):
        out[: i + 1, : j + 1] = True
    return out


@given(arrays(bool, (4, 5)))
def test_down_closed_matches_brute_force(mask):
    assert is_down_closed(mask) == np.array_equal(down_closure(mask), mask)


@given(arrays(float, (3, 4), elements=st.floats(0, 1)))
def test_monotone_scores_give_down_closed_success(raw):
    # cumulative minima make any array monotone non-increasing on both axes
    s = np.minimum.accumulate(np.minimum.accumulate(raw, axis=0), axis=1)
    assert score_is_monotone(s)
    assert is_down_closed(s > 0.5)


@pytest.fixture(scope="module")
def small_grid():
    return gap_scan("ghz", [1e-8, 1e-6, 1e-4], [1e-3, 0.05, 0.3])


def test_small_ghz_scan(small_grid):
    g = small_grid
    assert g.scores.shape == (3, 3)
    assert score_is_monotone(g.scores)
    assert is_down_closed(g.success)
    assert g.success[0, 0] and not g.success[-1, -1]
    i_max, t_max = axis_intercepts(g)
    assert i_max == 0.05 and t_max == 1e-6


def test_grid_serialisation(small_grid):
    rec = small_grid.record()
    assert rec["benchmark"] == "ghz" and rec["threshold"] == 0.9
    lines = small_grid.to_csv().strip().split("\n")
    assert len(lines) == 4 and lines[0].startswith("t_ll_seconds,")


def test_frontier_overlay():
    g = gap_scan("ghz", [1e-8], [1e-3], frontier=[(1e-6, 0.1)])
    assert g.frontier == ((1e-6, 0.1),)


@given(st.floats(0.5, 0.99), st.floats(0.5, 10), st.floats(1e-5, 1e-2), st.floats(0.2, 2))
def test_analytic_boundary_asymptotes(f, n, t_star, w):
    b = analytic_boundary(f, n, t_star, link_weight=w)
    assert b.budget == pytest.approx(1 - f)
    assert b.xi_i_asymptote == pytest.approx(math.log((1 - f) / w))
    assert b.xi_t_asymptote == pytest.approx(math.log((1 - f) * t_star / n))
    assert np.all(b.xi_i <= b.xi_i_asymptote + 1e-12)
    assert np.all(np.diff(b.xi_i) < 0)
    # points on the curve meet the budget
    err = w * np.exp(b.xi_i) + n * np.exp(b.xi_t) / t_star
    assert np.allclose(err, b.budget, rtol=1e-9)
    assert b.infidelity_at(2 * math.exp(b.xi_t_asymptote)) == 0.0


def test_analytic_boundary_validation():
    with pytest.raises(ValueError):
        analytic_boundary(1.0, 2, 1e-3)
    with pytest.raises(ValueError):
        analytic_boundary(0.9, 0, 1e-3)
    with pytest.raises(ValueError):
        analytic_boundary(0.9, 2, 1e-3, floor=0.2)


def test_axis_validation():
    with pytest.raises(ValueError):
        gap_scan("ghz", [1e-6, 1e-7], [0.1])
    with pytest.raises(ValueError):
        gap_scan("ghz", [1e-6], [0.0])
    with pytest.raises(ValueError):
        gap_scan("ghz", [1e-6], [0.5, 2.0])
