"""Wasserstein shaping cost against closed forms and scipy."""
import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from capricep.design import DesignParams
from capricep.errors import DesignError, SignalError
from capricep.shaping import (
    coarse_search,
    ensemble_variance,
    optimize_terd,
    raised_cosine_target,
    rectangular_target,
    w1_grid,
    wasserstein_distance,
)

FS = 1000.0


def test_w1_of_identical_masses_is_zero():
    m = np.array([0.0, 1.0, 2.0, 0.5])
    assert w1_grid(m, m, FS) == 0.0


def test_w1_of_point_masses_is_their_separation():
    a = np.zeros(100)
    b = np.zeros(100)
    a[10] = 3.0  # mass scale must not matter
    b[73] = 0.5
    assert w1_grid(a, b, FS) == pytest.approx(63.0 / FS)


def test_w1_of_shifted_rectangles_is_the_shift():
    a = np.zeros(200)
    b = np.zeros(200)
    a[40:80] = 1.0
    b[55:95] = 2.0
    assert w1_grid(a, b, FS) == pytest.approx(15.0 / FS)


mass = hnp.arrays(
    np.float64, st.integers(4, 40),
    elements=st.floats(0.0, 10.0),
).filter(lambda m: m.sum() > 1e-6)


@settings(max_examples=50, deadline=None)
@given(a=mass, b=mass)
def test_w1_matches_scipy_and_is_symmetric(a, b):
    n = min(len(a), len(b))
    a, b = a[:n], b[:n]
    if a.sum() <= 1e-6 or b.sum() <= 1e-6:
        return
    d = w1_grid(a, b, FS)
    assert d == pytest.approx(w1_grid(b, a, FS))
    pos = np.arange(n) / FS
    ref = scipy.stats.wasserstein_distance(pos, pos, a, b)
    assert d == pytest.approx(ref, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(a=mass, b=mass, c=mass)
def test_w1_triangle_inequality(a, b, c):
    n = min(len(a), len(b), len(c))
    a, b, c = a[:n], b[:n], c[:n]
    if min(a.sum(), b.sum(), c.sum()) <= 1e-6:
        return
    assert w1_grid(a, c, FS) <= w1_grid(a, b, FS) + w1_grid(b, c, FS) + 1e-12


def test_rectangular_target_geometry():
    t = rectangular_target(0.04, FS, 100, 50)
    assert t.profile.sum() == pytest.approx(1.0)
    width = int(round(0.04 * FS))
    support = np.flatnonzero(t.profile)
    assert len(support) == width
    assert support[0] == 50 - width // 2


def test_raised_cosine_target_peaks_at_center():
    t = raised_cosine_target(0.05, FS, 200, 100)
    assert t.profile.sum() == pytest.approx(1.0)
    peak = int(np.argmax(t.profile))
    assert abs(peak - 100) <= 1
    assert t.profile[0] == 0.0 and t.profile[-1] == 0.0


def test_target_must_fit_grid():
    with pytest.raises(SignalError):
        rectangular_target(1.0, FS, 100, 50)
    with pytest.raises(SignalError):
        raised_cosine_target(1.0, FS, 100, 50)


def test_zero_mass_rejected():
    with pytest.raises(SignalError):
        w1_grid(np.zeros(8), np.ones(8), FS)
    with pytest.raises(SignalError):
        w1_grid(np.ones(8), np.ones(9), FS)


def test_ensemble_variance_shape_and_determinism():
    p = DesignParams(fs=8000.0, fd=200.0, seed=6)
    v = ensemble_variance(p, p.nominal_t_erd(), 8)
    assert v.ensemble_size == 8
    assert len(v.variance) == round(4.0 * p.nominal_t_erd() * 8000.0)
    assert np.all(v.variance >= 0.0)
    again = ensemble_variance(p, p.nominal_t_erd(), 8)
    assert np.array_equal(v.variance, again.variance)
    with pytest.raises(DesignError):
        ensemble_variance(p, p.nominal_t_erd(), 1)


def test_variance_mass_concentrates_near_target_duration():
    p = DesignParams(fs=8000.0, fd=200.0, seed=6)
    t_erd = p.nominal_t_erd()
    v = ensemble_variance(p, t_erd, 32)
    target = rectangular_target(t_erd, 8000.0, len(v.variance), v.center_index)
    # the matched rectangle should beat one twice as long
    wide = rectangular_target(2.0 * t_erd, 8000.0, len(v.variance), v.center_index)
    assert wasserstein_distance(v, target) < wasserstein_distance(v, wide)


def test_optimize_terd_single_element_grid():
    p = DesignParams(fs=8000.0, fd=200.0, seed=6)
    best, dist = optimize_terd(p, [p.nominal_t_erd()], 4)
    assert best == p.nominal_t_erd()
    assert dist.shape == (1,)
    with pytest.raises(DesignError):
        optimize_terd(p, [], 4)


def test_coarse_search_rows_sorted_by_cost():
    p = DesignParams(fs=8000.0, fd=200.0, seed=6)
    grid = [1.5 / 200.0, 2.0 / 200.0]
    rows = coarse_search([1.1, 2.0 ** 0.25], [8.0], p, 4, terd_grid=grid)
    assert len(rows) == 2
    assert rows[0]["cost"] <= rows[1]["cost"]
    assert all(r["best_t_erd"] in grid for r in rows)
