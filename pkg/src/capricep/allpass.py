"""All-pass building blocks: single sections and signed cascades.

A section is a real second-order all-pass realized from the conjugate
pole pair {z, z*} with

    z = exp(-pi * bandwidth / fs + 1j * 2 * pi * center / fs).

Its phase is computed analytically from the pole geometry, so it is
continuous in frequency (no numerical unwrapping) and exact for
cascades of thousands of sections.  ``time_sign = -1`` realizes the
anti-causal (time-reversed) section purely as a negated phase.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DesignError, SignalError

# Sections processed per block when accumulating cascade phase; bounds
# peak memory at ~n_fft/2 * block * 8 bytes.
_PHASE_BLOCK = 128


@dataclass(frozen=True)
class AllPassSection:
    """One all-pass stage: conjugate pole pair plus a time direction."""

    center_freq_hz: float
    bandwidth_hz: float
    time_sign: int = 1

    def validate(self, fs: float) -> None:
        if not 0.0 < self.center_freq_hz < fs / 2.0:
            raise DesignError(
                f"center_freq_hz={self.center_freq_hz} outside (0, fs/2) for fs={fs}"
            )
        if self.bandwidth_hz <= 0.0:
            raise DesignError(f"bandwidth_hz={self.bandwidth_hz} must be > 0")
        if self.time_sign not in (1, -1):
            raise DesignError(f"time_sign={self.time_sign} must be +1 or -1")


@dataclass(frozen=True)
class CascadeResponse:
    """Phase of an all-pass cascade on a dense FFT grid.

    Only the phase is stored; the magnitude is identically 1.  The
    phase is kept on the non-negative-frequency half grid (bins 0 to
    n_fft/2 inclusive), which pins conjugate symmetry exactly.
    """

    phase_half: np.ndarray
    fft_length: int
    sample_rate_hz: float

    @property
    def phase_samples(self) -> np.ndarray:
        """Full-length odd-symmetric phase array (length fft_length)."""
        full = np.empty(self.fft_length)
        half = self.phase_half
        full[: len(half)] = half
        full[len(half):] = -half[-2:0:-1]
        return full


def _pole_angle_terms(omega: np.ndarray, radius: float, theta: float) -> np.ndarray:
    """angle(1 - z e^{-j w}) + angle(1 - z* e^{-j w}) for a pole z = r e^{j t}.

    Continuous in omega because Re(1 - z e^{-jw}) = 1 - r cos(.) > 0
    for r < 1.
    """
    a_pos = np.arctan2(radius * np.sin(omega - theta), 1.0 - radius * np.cos(omega - theta))
    a_neg = np.arctan2(radius * np.sin(omega + theta), 1.0 - radius * np.cos(omega + theta))
    return a_pos + a_neg


def section_phase(section: AllPassSection, fs: float, n_fft: int) -> np.ndarray:
    """Unwrapped phase of one section on the full n_fft grid (radians)."""
    _check_n_fft(n_fft)
    section.validate(fs)
    half = _sections_phase_half(
        np.array([section.center_freq_hz]),
        np.array([section.bandwidth_hz]),
        np.array([section.time_sign]),
        fs,
        n_fft,
    )
    return CascadeResponse(half, n_fft, fs).phase_samples


def _sections_phase_half(
    centers: np.ndarray,
    bandwidths: np.ndarray,
    signs: np.ndarray,
    fs: float,
    n_fft: int,
) -> np.ndarray:
    """Sum of per-section phases on the half grid, blocked over sections."""
    omega = 2.0 * np.pi * np.arange(n_fft // 2 + 1) / n_fft
    radii = np.exp(-np.pi * bandwidths / fs)
    thetas = 2.0 * np.pi * centers / fs
    phase = np.zeros_like(omega)
    # -2w per causal section; signs make it -2w * sum(signs).
    phase += -2.0 * omega * float(np.sum(signs))
    for start in range(0, len(centers), _PHASE_BLOCK):
        sl = slice(start, start + _PHASE_BLOCK)
        terms = _pole_angle_terms(omega[None, :], radii[sl, None], thetas[sl, None])
        phase -= 2.0 * np.sum(signs[sl, None] * terms, axis=0)
    return phase


def cascade_phase(sections: list[AllPassSection], fs: float, n_fft: int) -> CascadeResponse:
    """Phase response of a signed cascade (sum of section phases)."""
    _check_n_fft(n_fft)
    for s in sections:
        s.validate(fs)
    if not sections:
        return CascadeResponse(np.zeros(n_fft // 2 + 1), n_fft, fs)
    centers = np.array([s.center_freq_hz for s in sections], dtype=float)
    bandwidths = np.array([s.bandwidth_hz for s in sections], dtype=float)
    signs = np.array([s.time_sign for s in sections], dtype=float)
    half = _sections_phase_half(centers, bandwidths, signs, fs, n_fft)
    return CascadeResponse(half, n_fft, fs)


def impulse_response(resp: CascadeResponse) -> tuple[np.ndarray, int]:
    """Real impulse response of a cascade, rotated to the grid center.

    Returns (samples, center_index) where center_index = fft_length // 2.
    The rotation puts the circular energy centroid at the center so the
    two-sided exponential tails do not wrap through the array edges.
    """
    n = resp.fft_length
    spectrum = np.exp(1j * resp.phase_half)
    # Nyquist and DC bins of a real response must be real.
    for idx in (0, len(spectrum) - 1):
        if abs(spectrum[idx].imag) > 1e-8:
            raise SignalError("phase symmetry violated: complex DC/Nyquist bin")
    h = np.fft.irfft(spectrum, n)
    # Circular energy centroid via the angular mean of |h|^2.
    energy = h * h
    centroid = np.sum(energy * np.exp(2j * np.pi * np.arange(n) / n))
    shift_from = int(np.round(np.angle(centroid) / (2.0 * np.pi) * n)) % n
    center_index = n // 2
    h = np.roll(h, center_index - shift_from)
    return h, center_index


def _check_n_fft(n_fft: int) -> None:
    if n_fft < 2 or (n_fft & (n_fft - 1)) != 0:
        raise SignalError(f"n_fft={n_fft} is not a power of two")


def next_pow2(n: int) -> int:
    return 1 << max(1, int(np.ceil(np.log2(max(2, n)))))
