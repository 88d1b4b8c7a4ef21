"""Reservoir structure functions and the kernel ingredients built from them.

Frequencies are detunings from the mean transition frequency
``(omega_1 + omega_2) / 2``.  The reservoir is a finite signed sum of
Lorentzians,

    R(dw) = sum_a Z_a * (G_a / 2 pi) / ((dw - d_a)**2 + (G_a / 2)**2),

which is the structure function of the lower (0-1) transition; the upper
(1-2) transition sees ``R / eta``.  All evaluators broadcast over their
array arguments.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._validation import check_finite, check_positive
from .exceptions import ConstraintError, DomainError

DENOMINATOR_FLOOR = 1e-12

HIGH_Q = "high_q"
PBG = "pbg"
GENERAL = "general"
KINDS = (HIGH_Q, PBG, GENERAL)

# Relative tolerance for the PBG zero condition Omega_1^2/Gamma_1 = Omega_2^2/Gamma_2.
_PBG_RTOL = 1e-10


@dataclass(frozen=True)
class LorentzianTerm:
    """One Lorentzian: weight ``Z`` (may be negative), width, offset."""

    weight: float
    width: float
    offset: float = 0.0

    def __post_init__(self):
        check_finite(self.weight, "weight")
        check_positive(self.width, "width")
        check_finite(self.offset, "offset")


@dataclass(frozen=True)
class AtomOffsets:
    """Transition offset ``delta_bar = (omega_1 - omega_2) / 2``."""

    delta_bar: float = 0.0

    def __post_init__(self):
        check_finite(self.delta_bar, "delta_bar")


@dataclass(frozen=True, eq=False)
class ReservoirSpec:
    """Lorentzian-sum reservoir with coupling ratio ``eta = g_1**2 / g_2**2``.

    Use :meth:`high_q` and :meth:`pbg` for the two named families; they
    enforce the constraints of each kind.  ``kind="general"`` accepts any
    term list whose structure function is non-negative.
    """

    terms: tuple
    eta: float = 1.0
    kind: str = GENERAL

    # Within the eta-scaled family g_l1 g_m2 / (g_l2 g_m1) is identically 1.
    alpha = 1.0

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not all(isinstance(t, LorentzianTerm) for t in self.terms):
            raise ConstraintError("terms must be LorentzianTerm instances", "terms")
        check_positive(self.eta, "eta")
        if self.kind not in KINDS:
            raise ConstraintError(f"unknown kind {self.kind!r}", "kind")
        if self.kind == HIGH_Q:
            self._check_high_q()
        elif self.kind == PBG:
            self._check_pbg()
        elif np.any(self.weights < 0) and self.min_sampled_R() < 0:
            raise ConstraintError("structure function becomes negative", "terms")

    @classmethod
    def high_q(cls, omega, gamma, delta=0.0):
        """Single cavity Lorentzian with weight ``omega**2``."""
        omega = check_finite(omega, "omega")
        return cls((LorentzianTerm(omega**2, gamma, delta),), eta=1.0, kind=HIGH_Q)

    @classmethod
    def pbg(cls, omega1, gamma1, gamma2, delta=0.0):
        """Band-gap model: difference of two Lorentzians with a zero at ``delta``.

        ``omega2`` is fixed by ``omega1**2 / gamma1 = omega2**2 / gamma2``.
        """
        omega1 = check_positive(omega1, "omega1")
        gamma1 = check_positive(gamma1, "gamma1")
        gamma2 = check_positive(gamma2, "gamma2")
        if not gamma2 < gamma1:
            raise ConstraintError(
                f"band gap requires gamma2 < gamma1 (got gamma2={gamma2}, gamma1={gamma1})",
                "gamma2",
            )
        omega2_sq = omega1**2 * gamma2 / gamma1
        terms = (
            LorentzianTerm(omega1**2, gamma1, delta),
            LorentzianTerm(-omega2_sq, gamma2, delta),
        )
        return cls(terms, eta=1.0, kind=PBG)

    def _check_high_q(self):
        if len(self.terms) != 1:
            raise ConstraintError("high_q reservoir has exactly one term", "terms")
        if self.terms[0].weight < 0:
            raise ConstraintError("high_q weight omega**2 must be >= 0", "terms")

    def _check_pbg(self):
        if len(self.terms) != 2:
            raise ConstraintError("pbg reservoir has exactly two terms", "terms")
        t1, t2 = self.terms
        if not (t1.weight > 0 and t2.weight < 0):
            raise ConstraintError("pbg needs Z1 > 0 and Z2 < 0", "terms")
        if t1.offset != t2.offset:
            raise ConstraintError("pbg Lorentzians must share one centre", "terms")
        if not t2.width < t1.width:
            raise ConstraintError("pbg requires gamma2 < gamma1", "gamma2")
        lhs, rhs = t1.weight / t1.width, -t2.weight / t2.width
        if abs(lhs - rhs) > _PBG_RTOL * max(lhs, rhs):
            raise ConstraintError("pbg requires omega1^2/gamma1 == omega2^2/gamma2", "terms")

    @cached_property
    def weights(self):
        return np.array([t.weight for t in self.terms], dtype=float)

    @cached_property
    def widths(self):
        return np.array([t.width for t in self.terms], dtype=float)

    @cached_property
    def offsets(self):
        return np.array([t.offset for t in self.terms], dtype=float)

    @property
    def total_weight(self):
        """Integral of R over the real line."""
        return float(self.weights.sum())

    # Named parameters of the two special families.
    @property
    def omega(self):
        self._require(HIGH_Q)
        return float(np.sqrt(self.weights[0]))

    @property
    def gamma(self):
        self._require(HIGH_Q)
        return float(self.widths[0])

    @property
    def omega1(self):
        self._require(PBG)
        return float(np.sqrt(self.weights[0]))

    @property
    def omega2(self):
        self._require(PBG)
        return float(np.sqrt(-self.weights[1]))

    @property
    def gamma1(self):
        self._require(PBG)
        return float(self.widths[0])

    @property
    def gamma2(self):
        self._require(PBG)
        return float(self.widths[1])

    @property
    def delta(self):
        if self.kind == GENERAL:
            raise AttributeError("general reservoirs have no single detuning")
        return float(self.offsets[0])

    def _require(self, kind):
        if self.kind != kind:
            raise AttributeError(f"only defined for kind={kind!r}, this is {self.kind!r}")

    def min_sampled_R(self, n=4001):
        """Smallest value of R over a dense sample around every resonance."""
        span = 50 * self.widths.max() + np.abs(self.offsets).max()
        pts = [np.linspace(-span, span, n)]
        for d, g in zip(self.offsets, self.widths):
            pts.append(d + g * np.linspace(-5, 5, 201))
        return float(eval_R(self, np.concatenate(pts)).min())


def _lorentzians(spec, dw):
    dw = np.asarray(dw, dtype=float)[..., None]
    g = spec.widths
    return spec.weights * (g / (2 * np.pi)) / ((dw - spec.offsets) ** 2 + (g / 2) ** 2)


def eval_R(spec, dw):
    """Structure function R at detuning(s) ``dw``."""
    return _lorentzians(spec, dw).sum(axis=-1)


def _check_floor(denominator, what, floor):
    if np.any(np.abs(denominator) < floor):
        raise DomainError(f"{what} denominator below magnitude floor {floor:g}")


def eval_A(spec, atom, s, dw, floor=DENOMINATOR_FLOOR):
    """``A = s + i(dw + delta_bar) + sum_a Z_a / (s + G_a/2 + i(dw + d_a))``."""
    s = np.asarray(s, dtype=complex)
    dw = np.asarray(dw, dtype=float)
    den = (s + 1j * dw)[..., None] + spec.widths / 2 + 1j * spec.offsets
    _check_floor(den, "A", floor)
    return s + 1j * (dw + atom.delta_bar) + (spec.weights / den).sum(axis=-1)


def eval_B(spec, s, dw, dwp, floor=DENOMINATOR_FLOOR):
    """``B = [1/(eta s) + 1/(s + i(dw + dwp))] * R(dwp)``."""
    s = np.asarray(s, dtype=complex)
    pair = s + 1j * (np.asarray(dw, dtype=float) + np.asarray(dwp, dtype=float))
    _check_floor(s, "1/s", floor)
    _check_floor(pair, "two-photon", floor)
    return (1.0 / (spec.eta * s) + 1.0 / pair) * eval_R(spec, dwp)


def eval_K(spec, atom, s, dw, dwp, floor=DENOMINATOR_FLOOR):
    """Integral-equation kernel ``K(dw, dwp) = B(dw, dwp) / A(dw)``."""
    a = eval_A(spec, atom, s, dw, floor)
    _check_floor(a, "K (A itself)", floor)
    return eval_B(spec, s, dw, dwp, floor) / a


def eval_d(spec, atom, s, dw, floor=DENOMINATOR_FLOOR):
    """Inhomogeneous term ``d(dw) = (-i/s) / A(dw)``."""
    s = np.asarray(s, dtype=complex)
    _check_floor(s, "1/s", floor)
    a = eval_A(spec, atom, s, dw, floor)
    _check_floor(a, "d (A itself)", floor)
    return (-1j / s) / a


def schwarz_split(f, s):
    """Analytic continuations of Re f and Im f off the real ``s`` axis.

    With ``f_dag(s) = conj(f(conj(s)))`` the pair is
    ``((f + f_dag) / 2, (f - f_dag) / 2i)``; on the real axis these are
    exactly the real and imaginary parts of ``f``.
    """
    s = np.asarray(s, dtype=complex)
    val = np.asarray(f(s))
    dag = np.conj(f(np.conj(s)))
    return (val + dag) / 2, (val - dag) / 2j


# Specialised closed forms (equal-coupling, eta = 1).  These are written
# independently of A and B above and serve as a cross-check of that path.

def high_q_kernel(omega, gamma, delta, delta_bar, s, dw, dwp):
    s = np.asarray(s, dtype=complex)
    pair = s + 1j * (dw + dwp)
    cav = s + 1j * (dw + delta) + gamma / 2
    q = (s + 1j * (dw + delta_bar)) * cav + omega**2
    num = gamma * omega**2 / (2 * np.pi) * cav * (2 * s + 1j * (dw + dwp))
    return num / (s * ((dwp - delta) ** 2 + (gamma / 2) ** 2) * pair * q)


def pbg_cubic(x, omega1, omega2, gamma1, gamma2, delta, delta_bar):
    return (x + 1j * (delta_bar - delta)) * (x + gamma1 / 2) * (x + gamma2 / 2) + x * (
        omega1**2 - omega2**2
    )


def pbg_kernel(omega1, omega2, gamma1, gamma2, delta, delta_bar, s, dw, dwp):
    s = np.asarray(s, dtype=complex)
    y2 = (dwp - delta) ** 2
    shape = (omega1**2 * gamma1 - omega2**2 * gamma2) * y2 / (
        2 * np.pi * (y2 + (gamma1 / 2) ** 2) * (y2 + (gamma2 / 2) ** 2)
    )
    pair = s + 1j * (dw + dwp)
    x = s + 1j * (dw + delta)
    ratio = (x + gamma1 / 2) * (x + gamma2 / 2) / pbg_cubic(
        x, omega1, omega2, gamma1, gamma2, delta, delta_bar
    )
    return shape * (2 * s + 1j * (dw + dwp)) / (s * pair) * ratio


def pbg_inhomogeneity(omega1, omega2, gamma1, gamma2, delta, delta_bar, s, dw):
    s = np.asarray(s, dtype=complex)
    x = s + 1j * (dw + delta)
    return (-1j / s) * (x + gamma1 / 2) * (x + gamma2 / 2) / pbg_cubic(
        x, omega1, omega2, gamma1, gamma2, delta, delta_bar
    )


def kernel_closed_form(spec, atom, s, dw, dwp):
    """Kernel from the kind-specific closed form (high_q or pbg only)."""
    if spec.kind == HIGH_Q:
        return high_q_kernel(spec.omega, spec.gamma, spec.delta, atom.delta_bar, s, dw, dwp)
    if spec.kind == PBG:
        return pbg_kernel(
            spec.omega1, spec.omega2, spec.gamma1, spec.gamma2, spec.delta,
            atom.delta_bar, s, dw, dwp,
        )
    raise ValueError("closed-form kernel exists only for high_q and pbg reservoirs")
