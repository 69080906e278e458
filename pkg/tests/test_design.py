"""Randomized unit design: section draws, rendering, serialization."""
import json

import numpy as np
import pytest

from capricep.design import (
    DesignParams,
    composite_unit,
    derive_seed,
    design_to_json,
    draw_sections,
    first_order_count,
    generate_ensemble,
    generate_unit,
    raised_cosine_short_params,
)
from capricep.errors import DesignError


def test_nominal_duration_scales_inversely_with_density():
    p = DesignParams(fs=44100.0, fd=40.0, seed=0)
    assert p.nominal_t_erd() == pytest.approx(1.736 / 40.0)


def test_generation_is_deterministic():
    p = DesignParams(fs=16000.0, fd=100.0, seed=123)
    a = generate_unit(p)
    b = generate_unit(p)
    assert np.array_equal(a.samples, b.samples)
    assert a.sections == b.sections


def test_different_seeds_differ():
    p1 = DesignParams(fs=16000.0, fd=100.0, seed=1)
    p2 = DesignParams(fs=16000.0, fd=100.0, seed=2)
    assert not np.array_equal(generate_unit(p1).samples, generate_unit(p2).samples)


def test_mean_center_spacing_equals_density_interval():
    p = DesignParams(fs=44100.0, fd=10.0, seed=7)
    centers = np.array([s.center_freq_hz for s in draw_sections(p)])
    spacing = np.diff(np.concatenate([[0.0], centers]))
    assert np.mean(spacing) == pytest.approx(10.0, rel=0.03)
    assert centers[-1] < 44100.0 / 2


def test_bandwidths_all_equal_cmag_times_density():
    p = DesignParams(fs=16000.0, fd=50.0, seed=3)
    for s in draw_sections(p):
        assert s.bandwidth_hz == pytest.approx(p.cmag * 50.0)


def test_signs_are_mixed():
    p = DesignParams(fs=44100.0, fd=40.0, seed=5)
    signs = [s.time_sign for s in draw_sections(p)]
    assert set(signs) == {1, -1}


def test_first_order_count_is_twice_the_pair_count():
    p = DesignParams(fs=16000.0, fd=100.0, seed=9)
    sections = draw_sections(p)
    assert first_order_count(sections) == 2 * len(sections)
    assert generate_unit(p).first_order_count == 2 * len(sections)


def test_truncated_unit_keeps_almost_all_energy():
    p = DesignParams(fs=16000.0, fd=50.0, seed=11)
    u = generate_unit(p)
    assert len(u.samples) == round(p.truncation_factor * u.t_erd_s * 16000.0)
    assert abs(u.energy - 1.0) < 0.01
    assert u.center_index == len(u.samples) // 2


def test_duration_override():
    p = DesignParams(fs=16000.0, fd=100.0, seed=2)
    u = generate_unit(p, t_erd_s=0.03)
    assert u.t_erd_s == 0.03
    assert len(u.samples) == round(4.0 * 0.03 * 16000.0)


def test_composite_concatenates_both_cascades():
    fs = 16000.0
    long_p = DesignParams(fs=fs, fd=100.0, seed=4)
    short_p = raised_cosine_short_params(fs, seed=99)
    u = composite_unit(short_p, long_p, 1.736 / 100.0)
    n_long = len(draw_sections(long_p))
    n_short = len(draw_sections(short_p))
    assert len(u.sections) == n_long + n_short
    assert abs(u.energy - 1.0) < 0.01


def test_ensemble_units_are_independent_and_reproducible():
    p = DesignParams(fs=16000.0, fd=100.0, seed=21)
    ens = generate_ensemble(p, p.nominal_t_erd(), 4)
    assert len(ens) == 4
    for i in range(4):
        for j in range(i + 1, 4):
            assert not np.array_equal(ens[i].samples, ens[j].samples)
    again = generate_ensemble(p, p.nominal_t_erd(), 4)
    assert all(np.array_equal(a.samples, b.samples) for a, b in zip(ens, again))


def test_derive_seed_is_stable_and_distinct():
    a = derive_seed(5, 0).generate_state(1)[0]
    b = derive_seed(5, 1).generate_state(1)[0]
    assert a == derive_seed(5, 0).generate_state(1)[0]
    assert a != b


def test_params_roundtrip_and_json():
    p = DesignParams(fs=48000.0, fd=25.0, alpha=4.0, beta=6.0,
                     cmag=1.3, seed=77, truncation_factor=5.0)
    assert DesignParams.from_dict(p.to_dict()) == p
    u = generate_unit(DesignParams(fs=8000.0, fd=200.0, seed=1))
    doc = json.loads(design_to_json(u, include_sections=True))
    assert doc["first_order_count"] == u.first_order_count
    assert len(doc["sections"]) == len(u.sections)


def test_density_above_nyquist_rejected():
    with pytest.raises(DesignError):
        draw_sections(DesignParams(fs=8000.0, fd=4000.0, seed=0))


@pytest.mark.parametrize("kw", [
    dict(fs=-1.0, fd=40.0),
    dict(fs=8000.0, fd=0.0),
    dict(fs=8000.0, fd=40.0, alpha=0.0),
    dict(fs=8000.0, fd=40.0, cmag=-0.1),
    dict(fs=8000.0, fd=40.0, truncation_factor=0.0),
])
def test_invalid_params_rejected(kw):
    with pytest.raises(DesignError):
        DesignParams(seed=0, **kw).validate()
