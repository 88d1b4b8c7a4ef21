"""Discrete quasimodes damped by a flat continuum.

A network of ``n`` discrete modes with frequencies ``nu_i``, mutual
couplings ``V_ij``, continuum couplings ``W_i`` (continuum density
``rho_c``) and atom couplings ``lambda_ki`` (``k = 1`` lower, ``k = 2`` upper
transition) obeys a Markovian master equation, and the reservoir seen by
transition ``k`` is

    R_k(w) = rho_c |Q_k(w)|^2 / |P(w)|^2,
    Q_k(w) = sum_ij lambda_ki adj(wE - Omega)_ij conj(W_j),
    P(w)   = det(wE - Omega) - i pi rho_c sum_ij W_i adj(wE - Omega)_ij conj(W_j),

with ``Omega_ij = nu_i delta_ij + (1 - delta_ij) V_ji``.  Frequencies are
detunings, as elsewhere in the package.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_positive
from .exceptions import ConfigError, ConstraintError
from .master_equation import (
    LindbladModel,
    annihilation,
    atom_lowering,
    build_basis,
    pbg_pseudomode_parameters,
)
from .reservoir import HIGH_Q, PBG

DEFAULT_DENSITY = 1.0 / (2 * np.pi)
HERMITIAN_ATOL = 1e-12
MAX_ADJUGATE_ORDER = 3


@dataclass(frozen=True, eq=False)
class QuasimodeNetwork:
    """Discrete quasimodes coupled to each other, a flat continuum and the atom.

    Parameters
    ----------
    frequencies : array_like, shape (n,)
        Mode detunings ``nu_i``.
    couplings : array_like, shape (n, n)
        Mode-mode couplings ``V_ij`` (coefficient of ``a_i^+ a_j``); the
        diagonal is ignored and the matrix must be Hermitian.
    continuum : array_like, shape (n,)
        Discrete-continuum couplings ``W_i``.
    atom : array_like, shape (2, n)
        ``lambda_ki``; row 0 is the lower transition, row 1 the upper.
    density : float
        Continuum mode density ``rho_c``.
    """

    frequencies: np.ndarray
    couplings: np.ndarray
    continuum: np.ndarray
    atom: np.ndarray
    density: float = DEFAULT_DENSITY

    def __post_init__(self):
        nu = np.atleast_1d(np.asarray(self.frequencies, dtype=float))
        n = nu.size
        v = np.array(self.couplings, dtype=complex).reshape(n, n)
        np.fill_diagonal(v, 0.0)
        if np.max(np.abs(v - v.conj().T)) > HERMITIAN_ATOL:
            raise ConstraintError("mode couplings must form a Hermitian matrix", "couplings")
        w = np.asarray(self.continuum, dtype=complex).reshape(n)
        lam = np.asarray(self.atom, dtype=complex).reshape(2, n)
        check_positive(self.density, "density")
        if not (np.all(np.isfinite(nu)) and np.all(np.isfinite(v))
                and np.all(np.isfinite(w)) and np.all(np.isfinite(lam))):
            raise ConfigError("network parameters must be finite", "network")
        for name, val in (("frequencies", nu), ("couplings", v), ("continuum", w), ("atom", lam)):
            val.setflags(write=False)
            object.__setattr__(self, name, val)
        object.__setattr__(self, "density", float(self.density))

    @property
    def n(self):
        return self.frequencies.size

    @property
    def omega_matrix(self):
        """``Omega_ij = nu_i delta_ij + (1 - delta_ij) V_ji``."""
        return np.diag(self.frequencies).astype(complex) + self.couplings.T

    @property
    def mode_hamiltonian(self):
        """Coefficients of ``a_i^+ a_j`` in the system Hamiltonian."""
        return np.diag(self.frequencies).astype(complex) + self.couplings

    @property
    def decay_rates(self):
        """``Gamma_i = 2 pi rho_c |W_i|^2``."""
        return 2 * np.pi * self.density * np.abs(self.continuum) ** 2

    @property
    def frequency_shift_matrix(self):
        # Identically zero for a flat continuum.
        return np.zeros((self.n, self.n), dtype=complex)


def _det_small(m):
    n = m.shape[-1]
    if n == 1:
        return m[..., 0, 0]
    if n == 2:
        return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    return sum((-1) ** j * m[..., 0, j] * _det_small(np.delete(np.delete(m, 0, -2), j, -1))
               for j in range(n))


def adjugate(m):
    """Adjugate (transposed cofactor matrix) of stacked ``n x n`` matrices, ``n <= 3``."""
    m = np.asarray(m)
    n = m.shape[-1]
    if m.shape[-2] != n or not 1 <= n <= MAX_ADJUGATE_ORDER:
        raise ValueError(f"adjugate supports square matrices up to 3x3, got {m.shape[-2:]}")
    if n == 1:
        return np.ones_like(m)
    cof = np.empty_like(m)
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(m, i, -2), j, -1)
            cof[..., i, j] = (-1) ** (i + j) * _det_small(minor)
    return np.swapaxes(cof, -1, -2)


def determinant(m):
    """Determinant by cofactor expansion, ``n <= 3``."""
    m = np.asarray(m)
    if m.shape[-1] > MAX_ADJUGATE_ORDER:
        raise ValueError("determinant supports matrices up to 3x3")
    return _det_small(m)


def reservoir_from_network(net, omega, k):
    """Structure function ``R_k(omega)`` of transition ``k`` (1 lower, 2 upper)."""
    if k not in (1, 2):
        raise ValueError(f"transition index must be 1 or 2, got {k!r}")
    omega = np.asarray(omega, dtype=float)
    m = omega[..., None, None] * np.eye(net.n) - net.omega_matrix
    adj = adjugate(m)
    w_conj = np.conj(net.continuum)
    q = np.einsum("i,...ij,j->...", net.atom[k - 1], adj, w_conj)
    p = determinant(m) - 1j * np.pi * net.density * np.einsum(
        "i,...ij,j->...", net.continuum, adj, w_conj
    )
    return net.density * np.abs(q) ** 2 / np.abs(p) ** 2


def new_mode_transform(w1, w2, density=DEFAULT_DENSITY):
    """Unitary ``U`` with ``b = U a``: ``b1 ~ (-W2, W1)``, ``b2 ~ (W1*, W2*)``.

    The row scale ``sqrt(pi rho_c / kappa)`` with ``kappa = (Gamma1 + Gamma2)/2``
    equals ``1 / |W|`` for every positive density.
    """
    density = check_positive(density, "density")
    w1, w2 = complex(w1), complex(w2)
    kappa = np.pi * density * (abs(w1) ** 2 + abs(w2) ** 2)
    if kappa == 0.0:
        raise ConfigError("continuum couplings (W1, W2) must not both vanish", "continuum")
    scale = np.sqrt(np.pi * density / kappa)
    return scale * np.array([[-w2, w1], [np.conj(w1), np.conj(w2)]])


class TransformedCouplings(NamedTuple):
    """Two-mode network rewritten in the ``b = U a`` modes."""

    transform: np.ndarray
    mode_hamiltonian: np.ndarray  # coefficient of b_m^+ b_n
    atom: np.ndarray  # coefficient of b_m sigma_k^+, shape (2, 2)
    damping: np.ndarray  # rate of each b mode


def transform_network(net):
    if net.n != 2:
        raise ConfigError("the new-mode transform applies to two-mode networks", "network")
    u = new_mode_transform(*net.continuum, density=net.density)
    jump = np.conj(u @ net.continuum)  # coefficient of b_m in sum_j W_j^* a_j
    return TransformedCouplings(
        transform=u,
        mode_hamiltonian=u @ net.mode_hamiltonian @ u.conj().T,
        atom=np.conj(net.atom @ u.T),
        damping=2 * np.pi * net.density * np.abs(jump) ** 2,
    )


def high_q_network(omega, gamma, delta=0.0, density=DEFAULT_DENSITY):
    """Single quasimode at ``delta`` with ``lambda_11 = lambda_21 = omega``."""
    gamma = check_positive(gamma, "gamma")
    density = check_positive(density, "density")
    w = np.sqrt(gamma / (2 * np.pi * density))
    return QuasimodeNetwork([delta], [[0.0]], [w], [[omega], [omega]], density)


def pbg_parameter_map(omega1, gamma1, gamma2, delta=0.0, density=DEFAULT_DENSITY,
                      nu=0, mu=0, xi=0, phi1=0.0):
    """Two equal-frequency quasimodes reproducing the band-gap structure function.

    ``nu``, ``mu`` and ``xi`` are the free integers of the phase conditions
    and ``phi1`` the free phase of ``W_1``; no observable depends on them.
    """
    p = pbg_pseudomode_parameters(omega1, gamma1, gamma2)
    density = check_positive(density, "density")
    half_turns = (2 * nu + 1) * np.pi / 2
    phi2 = half_turns - 2 * np.pi * mu - phi1
    xi12 = phi1 - phi2 + half_turns
    w = np.array([np.sqrt(gamma1 / (2 * np.pi * density)) * np.exp(1j * phi1),
                  np.sqrt(gamma2 / (2 * np.pi * density)) * np.exp(1j * phi2)])
    shrink = np.sqrt((omega1**2 - p.omega2**2) / (omega1**2 + p.omega2**2))
    lam = np.array([omega1 * shrink * np.exp(1j * (phi1 + 2 * np.pi * xi)),
                    p.omega2 * shrink * np.exp(1j * (phi2 + 2 * np.pi * xi))])
    v12 = p.mode_coupling * np.exp(1j * xi12)
    v = np.array([[0.0, v12], [np.conj(v12), 0.0]])
    return QuasimodeNetwork([delta, delta], v, w, np.vstack([lam, lam]), density)


def network_for(spec, density=DEFAULT_DENSITY):
    """Quasimode network reproducing a ``high_q`` or ``pbg`` reservoir spec."""
    if spec.kind == HIGH_Q:
        return high_q_network(spec.omega, spec.gamma, spec.delta, density)
    if spec.kind == PBG:
        return pbg_parameter_map(spec.omega1, spec.gamma1, spec.gamma2, spec.delta, density)
    raise ConfigError("quasimode networks exist for high_q and pbg reservoirs", "model.kind")


def network_model(net, delta_bar=0.0):
    """Markovian master equation of atom plus network, in the original ``a`` modes.

    The dissipator ``sum_ij pi rho_c W_i W_j^* (...)`` has rank one and is
    written as a single jump ``L ~ sum_j W_j^* a_j``.
    """
    if net.n not in (1, 2):
        raise ConfigError("master equations support one or two quasimodes", "network")
    basis = build_basis(net.n)
    modes = [annihilation(basis, i) for i in range(net.n)]
    levels = basis.levels
    h = np.diag(np.where(levels == 1, delta_bar, 0.0)).astype(complex)
    for i, ai in enumerate(modes):
        for j, aj in enumerate(modes):
            h += net.mode_hamiltonian[i, j] * (ai.T @ aj)
    for k in (1, 2):
        raising = atom_lowering(basis, k).T
        for i, ai in enumerate(modes):
            # Lower the photon first; |2; n+1> is outside the truncated basis.
            term = np.conj(net.atom[k - 1, i]) * (raising @ ai)
            h += term + term.conj().T
    norm = np.linalg.norm(net.continuum)
    jumps = ()
    if norm > 0:
        op = sum(np.conj(wj) * aj for wj, aj in zip(net.continuum, modes)) / norm
        jumps = ((op, 2 * np.pi * net.density * norm**2),)
    return LindbladModel(basis, h, jumps, params=dict(kind="network", delta_bar=delta_bar))
