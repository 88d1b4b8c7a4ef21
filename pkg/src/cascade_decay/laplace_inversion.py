"""Fourier-series (trapezoidal Bromwich) inversion of Laplace transforms.

The transform is sampled on the upper half of the line ``Re s = sigma``
only; for real time functions ``F(conj s) = conj F(s)`` supplies the lower
half, giving

    f(t) = (exp(sigma t) / pi) * Int_0^omega_max Re[F(sigma + i nu) exp(i nu t)] d nu.

The truncation at ``omega_max`` is the dominant error for transforms that
decay like ``1/s`` (any function with ``f(0+) != 0``).  Before summing, the
leading ``c_1/s + ... + c_m/s^m`` behaviour is fitted on the high-frequency
end of the samples, removed, and added back exactly as
``c_1 + c_2 t + ... + c_m t^(m-1)/(m-1)!``.  One sample set serves every
requested time.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from math import factorial

import numpy as np

from ._validation import check_int, check_positive, check_times
from .exceptions import ConfigError

DEFAULT_SIGMA = 0.2
DEFAULT_OMEGA_MAX = 200.0
DEFAULT_SAMPLES = 2**14
DEFAULT_TAIL_TERMS = 3
TAIL_FIT_FRACTION = 0.25
# Largest allowed t * d_nu; the trapezoid sum is periodic in t with period 2 pi / d_nu.
ALIASING_GUARD = np.pi
REFLECTION_RTOL = 1e-8


@dataclass(frozen=True)
class BromwichContour:
    sigma: float
    omega_max: float = DEFAULT_OMEGA_MAX
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self):
        check_positive(self.sigma, "contour.sigma")
        check_positive(self.omega_max, "contour.omega_max")
        samples = check_int(self.samples, "contour.samples", minimum=8)
        if samples % 2:
            raise ConfigError("must be even", "contour.samples")

    @classmethod
    def for_horizon(cls, t_max, omega_max=DEFAULT_OMEGA_MAX, samples=DEFAULT_SAMPLES):
        """Default contour for times up to ``t_max``: ``sigma = max(0.2, 2/t_max)``."""
        t_max = check_positive(t_max, "time.t_max")
        return cls(max(DEFAULT_SIGMA, 2.0 / t_max), omega_max, samples)

    @property
    def spacing(self):
        return self.omega_max / (self.samples // 2)

    @property
    def frequencies(self):
        return np.linspace(0.0, self.omega_max, self.samples // 2 + 1)

    @property
    def points(self):
        return self.sigma + 1j * self.frequencies

    @property
    def max_time(self):
        """Largest time allowed by the aliasing guard."""
        return ALIASING_GUARD / self.spacing


def fit_tail(samples, contour, terms=DEFAULT_TAIL_TERMS, fraction=TAIL_FIT_FRACTION):
    """Real coefficients ``c_k`` of ``F ~ sum_k c_k / s^k`` from the top of the samples."""
    if terms == 0:
        return np.zeros(0)
    s = contour.points
    start = int(len(s) * (1 - fraction))
    s_fit, f_fit = s[start:], np.asarray(samples)[start:]
    k = np.arange(1, terms + 1)
    # Columns scaled by omega_max^k so they are O(1) over the fit window.
    basis = (contour.omega_max / s_fit[:, None]) ** k
    a = np.vstack([basis.real, basis.imag])
    b = np.concatenate([f_fit.real, f_fit.imag])
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    return coef * contour.omega_max**k


def _check_times(times, contour, allow_aliasing):
    times = check_times(times)
    if times.size and times.max() > contour.max_time:
        msg = (
            f"t = {times.max():g} exceeds the aliasing limit {contour.max_time:g} "
            "for this contour (increase samples or lower omega_max)"
        )
        if not allow_aliasing:
            raise ConfigError(msg, "times")
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
    return times


def invert_samples(samples, contour, times, tail_terms=DEFAULT_TAIL_TERMS,
                   allow_aliasing=False, block=64):
    """Invert pre-computed samples ``F(contour.points)`` at ``times``."""
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != contour.points.shape:
        raise ValueError("samples must match contour.points")
    times = _check_times(times, contour, allow_aliasing)
    return _trapezoid_inverse(samples, contour, times, tail_terms, block)


def _trapezoid_inverse(samples, contour, times, tail_terms, block=64):
    coef = fit_tail(samples, contour, tail_terms)
    s = contour.points
    remainder = samples - sum(c / s ** (k + 1) for k, c in enumerate(coef))

    weights = np.full(s.size, contour.spacing)
    weights[[0, -1]] *= 0.5
    weighted = remainder * weights
    nu = contour.frequencies

    out = np.empty(times.size)
    for lo in range(0, times.size, block):
        t = times[lo:lo + block]
        phase = np.exp(1j * np.outer(t, nu))
        out[lo:lo + block] = np.exp(contour.sigma * t) / np.pi * (phase @ weighted).real
    for k, c in enumerate(coef):
        out += c * times**k / factorial(k)
    return out


def _defect(val, val_at_conj):
    return float(np.max(np.abs(val_at_conj - np.conj(val)) / np.maximum(np.abs(val), 1e-300)))


def reflection_defect(F, points):
    """Largest relative violation of ``F(conj s) = conj F(s)`` over ``points``."""
    points = np.asarray(points, dtype=complex)
    return _defect(np.asarray(F(points)), np.asarray(F(np.conj(points))))


def invert(F, contour, times, tail_terms=DEFAULT_TAIL_TERMS, allow_aliasing=False,
           symmetry_probes=2):
    """Numerical inverse Laplace transform of a vectorised ``F`` at ``times``.

    ``F`` must accept an array of complex ``s``.  ``symmetry_probes`` extra
    evaluations at conjugate points confirm the target is real before the
    imaginary part is dropped.
    """
    if contour.sigma <= 0:
        raise ConfigError("must be > 0", "contour.sigma")
    times = _check_times(times, contour, allow_aliasing)
    samples = np.asarray(F(contour.points), dtype=complex)
    if symmetry_probes:
        idx = np.linspace(1, samples.size - 1, symmetry_probes + 2)[1:-1].astype(int)
        defect = _defect(samples[idx], np.asarray(F(np.conj(contour.points[idx]))))
        if defect > REFLECTION_RTOL:
            raise ValueError(
                f"F(conj s) != conj F(s) (relative defect {defect:.2e}); "
                "the time function is not real"
            )
    return _trapezoid_inverse(samples, contour, times, tail_terms)
