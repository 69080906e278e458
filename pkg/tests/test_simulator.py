"""Virtual measurement chain: convolution, polynomial distortion, noise."""
import json

import numpy as np
import pytest

from capricep.errors import SignalError
from capricep.simulator import VirtualSystem, run

FS = 8000.0


def test_identity_passthrough():
    x = np.sin(2 * np.pi * 440.0 * np.arange(800) / FS)
    out, pre = run(VirtualSystem(lti_ir=(1.0,)), x, FS, pre_silence_s=0.1)
    assert np.allclose(out, x, atol=1e-15)
    assert np.all(pre == 0.0)
    assert len(pre) == int(0.1 * FS)


def test_latency_prepends_zeros():
    x = np.ones(10)
    out, _ = run(VirtualSystem(lti_ir=(1.0,), latency_samples=25), x, FS)
    assert np.all(out[:25] == 0.0)
    assert np.allclose(out[25:35], x)


def test_fir_convolution():
    ir = np.array([0.5, 0.0, -0.25])
    x = np.zeros(16)
    x[3] = 1.0
    out, _ = run(VirtualSystem(lti_ir=tuple(ir)), x, FS)
    assert np.allclose(out[3:6], ir)


def test_cubic_third_harmonic_closed_form():
    # y = x + c3 x^3 puts amplitude c3 A^3 / 4 at the third harmonic
    a, c3 = 0.8, 0.05
    n = 8000
    k = 40  # exact bin, integer periods
    x = a * np.sin(2 * np.pi * k * np.arange(n) / n)
    out, _ = run(VirtualSystem(lti_ir=(1.0,), nl_coeffs=(1.0, 0.0, c3)), x, FS)
    spec = np.abs(np.fft.rfft(out)) / (n / 2)
    assert spec[3 * k] == pytest.approx(c3 * a ** 3 / 4.0, rel=0.01)
    assert spec[k] == pytest.approx(a + 0.75 * c3 * a ** 3, rel=0.01)


def test_noise_level_and_determinism():
    x = np.zeros(int(FS))
    system = VirtualSystem(lti_ir=(1.0,), noise_level_db=-40.0, noise_seed=3)
    out, pre = run(system, x, FS, pre_silence_s=1.0)
    assert 20 * np.log10(np.std(pre)) == pytest.approx(-40.0, abs=0.5)
    assert 20 * np.log10(np.std(out)) == pytest.approx(-40.0, abs=0.5)
    out2, pre2 = run(system, x, FS, pre_silence_s=1.0)
    assert np.array_equal(out, out2)
    assert np.array_equal(pre, pre2)


def test_drift_modulates_amplitude():
    x = np.ones(int(FS))
    out, _ = run(VirtualSystem(lti_ir=(1.0,), drift=(0.5, 0.2)), x, FS)
    assert np.max(out) <= 1.2 + 1e-9
    assert np.min(out) >= 0.8 - 1e-9
    assert np.ptp(out) == pytest.approx(0.4, rel=0.01)


def test_overflow_guard():
    with pytest.raises(SignalError):
        run(VirtualSystem(lti_ir=(100.0,)), np.ones(16), FS)


def test_json_roundtrip():
    system = VirtualSystem(
        lti_ir=(1.0, -0.5), nl_coeffs=(1.0, 0.0, 0.1),
        noise_level_db=-60.0, drift=(2.0, 0.1),
        latency_samples=7, noise_seed=11)
    back = VirtualSystem.from_json(json.dumps(system.to_dict()))
    assert np.array_equal(np.asarray(back.lti_ir), np.asarray(system.lti_ir))
    assert back.nl_coeffs == system.nl_coeffs
    assert back.noise_level_db == system.noise_level_db
    assert back.drift == system.drift
    assert back.latency_samples == system.latency_samples
    assert back.noise_seed == system.noise_seed


def test_invalid_system_rejected():
    with pytest.raises(SignalError):
        VirtualSystem(lti_ir=()).validate()
    with pytest.raises(SignalError):
        VirtualSystem(lti_ir=(1.0,), drift=(1.0, 0.7)).validate()
    with pytest.raises(SignalError):
        VirtualSystem(lti_ir=(1.0,), latency_samples=-1).validate()
