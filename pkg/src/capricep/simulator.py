"""Virtual measurement chain for validating the analyzer without hardware."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import SignalError


@dataclass(frozen=True)
class VirtualSystem:
    """LTI filter + memoryless polynomial nonlinearity + noise + drift.

    nl_coeffs[p] multiplies x**(p+1); the default [1.0] is a clean wire.
    drift, when set, is (period_s, depth) sinusoidal gain modulation.
    """

    lti_ir: np.ndarray
    nl_coeffs: tuple = (1.0,)
    noise_level_db: float | None = None
    drift: tuple | None = None
    latency_samples: int = 0
    noise_seed: int = 0

    def validate(self) -> None:
        ir = np.asarray(self.lti_ir, dtype=float)
        if ir.size == 0 or not np.all(np.isfinite(ir)):
            raise SignalError("lti_ir must be a finite, nonempty array")
        if self.drift is not None:
            period, depth = self.drift
            if period <= 0 or not 0.0 <= depth < 0.5:
                raise SignalError("drift depth must be in [0, 0.5) with period > 0")
        if self.latency_samples < 0:
            raise SignalError("latency_samples must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "lti_ir": np.asarray(self.lti_ir, dtype=float).tolist(),
            "nl_coeffs": list(self.nl_coeffs),
            "noise_level_db": self.noise_level_db,
            "drift": list(self.drift) if self.drift else None,
            "latency_samples": self.latency_samples,
            "noise_seed": self.noise_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VirtualSystem":
        return cls(
            lti_ir=np.asarray(d["lti_ir"], dtype=float),
            nl_coeffs=tuple(d.get("nl_coeffs", [1.0])),
            noise_level_db=d.get("noise_level_db"),
            drift=tuple(d["drift"]) if d.get("drift") else None,
            latency_samples=int(d.get("latency_samples", 0)),
            noise_seed=int(d.get("noise_seed", 0)),
        )

    @classmethod
    def from_json(cls, text: str) -> "VirtualSystem":
        return cls.from_dict(json.loads(text))


def run(
    system: VirtualSystem,
    signal: np.ndarray,
    fs: float,
    pre_silence_s: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Drive the virtual system; returns (output, pre_silence).

    output = drift( nl( lti_ir * signal ) ) + noise, delayed by
    latency_samples; pre_silence is a noise-only segment captured with
    the same noise statistics.
    """
    system.validate()
    signal = np.asarray(signal, dtype=float)
    ir = np.asarray(system.lti_ir, dtype=float)
    y = fftconvolve(signal, ir, mode="full")

    nl = np.zeros_like(y)
    xp = np.ones_like(y)
    for c in system.nl_coeffs:
        xp = xp * y
        if c != 0.0:
            nl += c * xp
    y = nl
    if np.max(np.abs(y)) > 10.0:
        raise SignalError("nonlinearity overflow: |y| exceeded 10")

    if system.drift is not None:
        period_s, depth = system.drift
        t = np.arange(len(y)) / fs
        y = y * (1.0 + depth * np.sin(2.0 * np.pi * t / period_s))

    y = np.concatenate([np.zeros(system.latency_samples), y])

    rng = np.random.default_rng(system.noise_seed)
    n_pre = int(round(pre_silence_s * fs))
    if system.noise_level_db is not None:
        sigma = 10.0 ** (system.noise_level_db / 20.0)
        pre = rng.normal(0.0, sigma, n_pre)
        y = y + rng.normal(0.0, sigma, len(y))
    else:
        pre = np.zeros(n_pre)
    return y, pre
