"""Pseudomode Lindblad master equations for the cascade atom.

The atom exchanges quanta with one damped mode (high-Q cavity) or with the
second of two coupled modes of which only that one is damped (band gap).
Everything is written in the frame rotating at ``(omega_1 + omega_2)/2``
per excitation quantum, where the diagonal energies are

    atom level 2 -> 0,  level 1 -> delta_bar,  level 0 -> 0,  each photon -> delta.

The Hamiltonian conserves the excitation number ``N = level + photons`` and
the jumps only lower it, so starting from ``|2; vac>`` the states with
``N <= 2`` are an exact basis, not a truncation.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from ._validation import check_finite, check_positive, check_times
from .exceptions import ConfigError, ConstraintError, SolverError, StepSizeError
from .reservoir import HIGH_Q, PBG

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """States ``(atom_level, photons)`` reachable from ``|2; vac>``."""

    n_modes: int
    states: tuple

    @property
    def dimension(self):
        return len(self.states)

    def index(self, level, photons):
        return self.states.index((level, tuple(photons)))

    @property
    def coherent_sector(self):
        """The two-excitation states the Hamiltonian mixes with ``|2; vac>``."""
        return tuple(st for st in self.states if st[0] + sum(st[1]) == 2)

    @property
    def levels(self):
        return np.array([lvl for lvl, _ in self.states])

    @property
    def photon_numbers(self):
        return np.array([sum(ph) for _, ph in self.states])


def _neighbours(state, n_modes):
    level, ph = state
    for m in range(n_modes):
        up = list(ph)
        up[m] += 1
        if level > 0:
            yield level - 1, tuple(up)  # emission into mode m
        if ph[m] > 0:
            down = list(ph)
            down[m] -= 1
            if level < 2:
                yield level + 1, tuple(down)  # absorption from mode m
            yield level, tuple(down)  # photon loss (jump)
            for n in range(n_modes):
                if n != m:
                    hop = list(down)
                    hop[n] += 1
                    yield level, tuple(hop)  # mode-mode exchange


def build_basis(n_modes):
    """Enumerate the reachable states, ordered by descending atom level then photons."""
    if n_modes not in (1, 2):
        raise ConfigError(f"only 1 or 2 modes are supported, got {n_modes!r}", "n_modes")
    start = (2, (0,) * n_modes)
    seen = {start}
    queue = deque([start])
    while queue:
        for nxt in _neighbours(queue.popleft(), n_modes):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    states = tuple(sorted(seen, key=lambda st: (-st[0], st[1])))
    return ModeBasis(n_modes, states)


def annihilation(basis, mode):
    """Matrix of ``a_mode`` on the basis."""
    a = np.zeros((basis.dimension,) * 2)
    for col, (level, ph) in enumerate(basis.states):
        if ph[mode]:
            lower = list(ph)
            lower[mode] -= 1
            a[basis.index(level, lower), col] = np.sqrt(ph[mode])
    return a


def atom_lowering(basis, transition=None):
    """Atomic lowering operator, identity on the modes.

    ``transition=1`` gives ``|0><1|``, ``transition=2`` gives ``|1><2|``
    and ``None`` their sum.
    """
    if transition not in (None, 1, 2):
        raise ValueError(f"transition must be 1, 2 or None, got {transition!r}")
    sm = np.zeros((basis.dimension,) * 2)
    lookup = {st: i for i, st in enumerate(basis.states)}
    for col, (level, ph) in enumerate(basis.states):
        row = lookup.get((level - 1, ph))
        if level > 0 and row is not None and transition in (None, level):
            sm[row, col] = 1.0
    return sm


def excitation_number(basis):
    return np.diag(basis.levels + basis.photon_numbers).astype(float)


def frame_energies(basis, delta, delta_bar):
    atom = np.where(basis.levels == 1, delta_bar, 0.0)
    return atom + delta * basis.photon_numbers


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Hamiltonian and ``(operator, rate)`` jumps on a :class:`ModeBasis`."""

    basis: ModeBasis
    hamiltonian: np.ndarray
    jumps: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.basis.dimension
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.shape != (d, d):
            raise ValueError(f"hamiltonian must be {d}x{d}, got {h.shape}")
        if np.max(np.abs(h - h.conj().T)) > HERMITIAN_ATOL:
            raise ValueError("hamiltonian is not Hermitian")
        object.__setattr__(self, "hamiltonian", h)
        jumps = []
        for op, rate in self.jumps:
            op = np.asarray(op, dtype=complex)
            if op.shape != (d, d):
                raise ValueError(f"jump operator must be {d}x{d}, got {op.shape}")
            jumps.append((op, check_positive(rate, "rate", allow_zero=True)))
        object.__setattr__(self, "jumps", tuple(jumps))

    @property
    def dimension(self):
        return self.basis.dimension

    def initial_state(self):
        """``|2; vac><2; vac|``."""
        rho = np.zeros((self.dimension,) * 2, dtype=complex)
        i = self.basis.index(2, (0,) * self.basis.n_modes)
        rho[i, i] = 1.0
        return rho

    def with_energy_offset(self, offset):
        """Same model with ``offset * I`` added to the Hamiltonian."""
        h = self.hamiltonian + offset * np.eye(self.dimension)
        return LindbladModel(self.basis, h, self.jumps, dict(self.params))


def build_high_q_model(omega, gamma, delta=0.0, delta_bar=0.0):
    """Atom plus one cavity pseudomode of width ``gamma`` coupled with ``omega``."""
    omega = check_finite(omega, "omega")
    gamma = check_positive(gamma, "gamma", allow_zero=True)
    basis = build_basis(1)
    a = annihilation(basis, 0)
    sm = atom_lowering(basis)
    h = np.diag(frame_energies(basis, delta, delta_bar)) + omega * (a.T @ sm + sm.T @ a)
    return LindbladModel(
        basis, h, ((a, gamma),),
        params=dict(kind=HIGH_Q, omega=omega, gamma=gamma, delta=delta, delta_bar=delta_bar),
    )


class PseudomodeParameters(NamedTuple):
    omega2: float
    omega_pbg: float
    mode_coupling: float
    damping: float


def pbg_pseudomode_parameters(omega1, gamma1, gamma2):
    omega1 = check_positive(omega1, "omega1")
    gamma1 = check_positive(gamma1, "gamma1")
    gamma2 = check_positive(gamma2, "gamma2")
    if not gamma2 < gamma1:
        raise ConstraintError("band gap requires gamma2 < gamma1", "gamma2")
    omega2 = omega1 * np.sqrt(gamma2 / gamma1)
    return PseudomodeParameters(
        omega2=float(omega2),
        omega_pbg=float(np.sqrt(omega1**2 - omega2**2)),
        mode_coupling=float(np.sqrt(gamma1 * gamma2) / 2),
        damping=gamma1 + gamma2,
    )


def build_pbg_model(omega1, gamma1, gamma2, delta=0.0, delta_bar=0.0):
    """Two coupled pseudomodes; the atom talks to mode 2, only mode 2 decays.

    The undamped mode 1 carries the zero of the structure function; its
    jump is kept with rate 0 so the pair of rates is explicit.
    """
    p = pbg_pseudomode_parameters(omega1, gamma1, gamma2)
    basis = build_basis(2)
    a1, a2 = annihilation(basis, 0), annihilation(basis, 1)
    sm = atom_lowering(basis)
    h = (
        np.diag(frame_energies(basis, delta, delta_bar))
        + p.mode_coupling * (a1.T @ a2 + a2.T @ a1)
        + p.omega_pbg * (a2.T @ sm + sm.T @ a2)
    )
    return LindbladModel(
        basis, h, ((a1, 0.0), (a2, p.damping)),
        params=dict(kind=PBG, omega1=omega1, gamma1=gamma1, gamma2=gamma2, delta=delta,
                    delta_bar=delta_bar, **p._asdict()),
    )


def model_for(spec, atom):
    """Pseudomode model matching a ``high_q`` or ``pbg`` reservoir spec."""
    if spec.kind == HIGH_Q:
        return build_high_q_model(spec.omega, spec.gamma, spec.delta, atom.delta_bar)
    if spec.kind == PBG:
        return build_pbg_model(spec.omega1, spec.gamma1, spec.gamma2, spec.delta,
                               atom.delta_bar)
    raise ConfigError("master equation needs a high_q or pbg reservoir", "model.kind")


def lindblad_rhs(model, rho):
    """``-i[H, rho] + sum_j g_j/2 (2 L rho L^+ - L^+L rho - rho L^+L)``."""
    rho = np.asarray(rho)
    if rho.shape != model.hamiltonian.shape:
        raise ValueError(f"rho has shape {rho.shape}, model needs {model.hamiltonian.shape}")
    h = model.hamiltonian
    out = -1j * (h @ rho - rho @ h)
    for op, rate in model.jumps:
        if rate:
            ldl = op.conj().T @ op
            out += rate / 2 * (2 * op @ rho @ op.conj().T - ldl @ rho - rho @ ldl)
    return out


def liouvillian(model):
    """Superoperator acting on row-major ``rho.ravel()``."""
    d = model.dimension
    eye = np.eye(d)
    h = model.hamiltonian
    sup = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op, rate in model.jumps:
        if rate:
            ldl = op.conj().T @ op
            sup += rate / 2 * (
                2 * np.kron(op, op.conj()) - np.kron(ldl, eye) - np.kron(eye, ldl.T)
            )
    return sup


def atomic_populations(basis, rho):
    """``(P2, P1, P0)`` from the partial trace over the modes; ``rho`` may be stacked."""
    diag = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    levels = basis.levels
    return np.stack([diag[..., levels == lvl].sum(axis=-1) for lvl in (2, 1, 0)], axis=-1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    populations: np.ndarray  # columns P2, P1, P0
    trace_error: float
    min_eigenvalue: float
    hermiticity_error: float
    states: np.ndarray | None = None

    @property
    def p2(self):
        return self.populations[:, 0]

    @property
    def p1(self):
        return self.populations[:, 1]

    @property
    def p0(self):
        return self.populations[:, 2]


def integrate(model, times, rho0=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL,
              method="DOP853", keep_states=False):
    """Integrate the master equation and report atomic populations at ``times``.

    Uses an adaptive explicit Runge-Kutta method with dense output at the
    requested times; ``rho0`` defaults to ``|2; vac><2; vac|``.
    """
    times = check_times(times)
    rho0 = model.initial_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    d = model.dimension
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 must be {d}x{d}")
    order = np.argsort(times, kind="stable")
    t_sorted = times[order]
    t_end = t_sorted[-1] if t_sorted.size else 0.0

    if t_end == 0.0:
        rhos = np.repeat(rho0[None], times.size, axis=0)
    else:
        sup = liouvillian(model)
        sol = solve_ivp(
            lambda t, y: sup @ y, (0.0, t_end), rho0.ravel(), method=method,
            t_eval=t_sorted, rtol=rtol, atol=atol,
        )
        if sol.status != 0:
            t_fail = float(sol.t[-1]) if sol.t.size else 0.0
            raise StepSizeError(f"integration stopped at t={t_fail:g}: {sol.message}", t=t_fail)
        rhos = np.empty((times.size, d, d), dtype=complex)
        rhos[order] = sol.y.T.reshape(-1, d, d)

    herm = (rhos + np.conj(np.swapaxes(rhos, -1, -2))) / 2
    traces = np.real(np.trace(rhos, axis1=-2, axis2=-1))
    return Trajectory(
        times=times,
        populations=atomic_populations(model.basis, rhos),
        trace_error=float(np.max(np.abs(traces - 1), initial=0.0)),
        min_eigenvalue=float(np.min(np.linalg.eigvalsh(herm), initial=np.inf)),
        hermiticity_error=float(np.max(np.abs(rhos - herm), initial=0.0)),
        states=rhos if keep_states else None,
    )


def asymptotic_populations(model, times, rho0=None, tol=1e-8):
    """Populations carried by the non-decaying part of the Liouvillian spectrum.

    ``rho0`` is expanded in right eigenvectors of the Liouvillian; the
    components whose eigenvalues have ``|Re| <= tol`` are kept and evolved
    exactly.  Returns an array of ``(P2, P1, P0)`` rows, one per time.
    """
    times = check_times(times)
    rho0 = model.initial_state() if rho0 is None else np.asarray(rho0, dtype=complex)
    evals, evecs = np.linalg.eig(liouvillian(model))
    if np.linalg.cond(evecs) > 1e10:
        raise SolverError("Liouvillian is numerically defective; eigenbasis unusable")
    coef = np.linalg.solve(evecs, rho0.ravel())
    keep = np.abs(evals.real) <= tol
    d = model.dimension
    vecs = (evecs[:, keep] * coef[keep]) @ np.exp(np.outer(evals[keep], times))
    return atomic_populations(model.basis, vecs.T.reshape(-1, d, d))
