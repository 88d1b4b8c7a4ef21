"""Discretised Fredholm equation for the one-photon amplitudes.

At each Laplace point ``s`` the integral equation ``f + K f = d`` is put on
a midpoint frequency grid and split into the real/imaginary block system

    [[K_r + I, -K_i], [K_i, K_r + I]] [f_r; f_i] = [d_r; d_i]

where the ``_r``/``_i`` parts are the Schwarz-reflection continuations of
Re and Im off the real axis.  The Laplace-domain upper-state amplitude
then follows from scalar products with the upper-transition structure
function.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._validation import check_int, check_positive
from .exceptions import BudgetExceeded, DomainError, SingularSystemError
from .reservoir import DENOMINATOR_FLOOR, eval_d, eval_K, eval_R

RESIDUAL_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class FrequencyGrid:
    n: int
    half_width: float
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def spacing(self):
        return 2 * self.half_width / self.n


def build_grid(n, half_width):
    """Uniform midpoint rule on ``[-half_width, half_width]`` with ``n`` cells."""
    n = check_int(n, "grid.n", minimum=1)
    half_width = check_positive(half_width, "grid.half_width")
    h = 2 * half_width / n
    nodes = -half_width + (np.arange(n) + 0.5) * h
    return FrequencyGrid(n, half_width, nodes, np.full(n, h))


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """Real/imaginary block system at one Laplace point."""

    matrix: np.ndarray
    rhs: np.ndarray
    s: complex


@dataclass(frozen=True, eq=False)
class AmplitudePair:
    f_r: np.ndarray
    f_i: np.ndarray
    b2_r: complex
    b2_i: complex


def _assemble_batch(spec, atom, grid, s, floor=DENOMINATOR_FLOOR):
    """Block matrices and right-hand sides for a 1-D array of ``s`` values."""
    s = np.asarray(s, dtype=complex)[:, None, None]
    x = grid.nodes
    dw, dwp = x[:, None], x[None, :]

    k = eval_K(spec, atom, s, dw, dwp, floor)
    k_dag = np.conj(eval_K(spec, atom, np.conj(s), dw, dwp, floor))
    # Row-times-weight: the weight belongs to the integration variable dwp.
    k_r = (k + k_dag) / 2 * grid.weights
    k_i = (k - k_dag) / 2j * grid.weights

    s1 = s[:, :, 0]
    d = eval_d(spec, atom, s1, x, floor)
    d_dag = np.conj(eval_d(spec, atom, np.conj(s1), x, floor))
    d_r, d_i = (d + d_dag) / 2, (d - d_dag) / 2j

    eye = np.eye(grid.n)
    top = np.concatenate([k_r + eye, -k_i], axis=-1)
    bottom = np.concatenate([k_i, k_r + eye], axis=-1)
    return np.concatenate([top, bottom], axis=-2), np.concatenate([d_r, d_i], axis=-1)


def assemble(spec, atom, grid, s):
    """Build the ``2n x 2n`` block system at the Laplace point ``s``."""
    matrix, rhs = _assemble_batch(spec, atom, grid, [s])
    return BlockSystem(matrix[0], rhs[0], complex(s))


def _solve_batch(matrices, rhs):
    try:
        sol = np.linalg.solve(matrices, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"integral-equation system is singular: {exc}") from exc
    # Infinity norms; an SVD per contour point would dominate the run time.
    resid = np.abs(np.einsum("...ij,...j->...i", matrices, sol) - rhs).max(axis=-1)
    scale = np.abs(matrices).sum(axis=-1).max(axis=-1) * np.abs(sol).max(axis=-1)
    bad = resid > RESIDUAL_RTOL * np.maximum(scale, np.finfo(float).tiny)
    if np.any(bad) or not np.all(np.isfinite(sol)):
        raise SingularSystemError("residual check failed; system is numerically singular")
    return sol


def solve_amplitudes(system):
    """Solve a :class:`BlockSystem` by LU with partial pivoting.

    Returns ``(f_r, f_i)``.
    """
    sol = _solve_batch(system.matrix[None], system.rhs[None])[0]
    n = sol.shape[0] // 2
    return sol[:n], sol[n:]


def structure_weights(spec, grid):
    """Upper-transition weights ``w_k R(x_k) / eta`` used in the scalar products."""
    return grid.weights * eval_R(spec, grid.nodes) / spec.eta


def b2_laplace(spec, grid, f_r, f_i, s):
    """``b2_r = (1 + r.f_i)/s``, ``b2_i = -(r.f_r)/s``."""
    s = np.asarray(s, dtype=complex)
    if np.any(np.abs(s) < DENOMINATOR_FLOOR):
        raise DomainError("|s| below magnitude floor")
    r = structure_weights(spec, grid)
    return (1 + f_i @ r) / s, -(f_r @ r) / s


def solve_point(spec, atom, grid, s):
    """Assemble and solve at one ``s``; returns an :class:`AmplitudePair`."""
    f_r, f_i = solve_amplitudes(assemble(spec, atom, grid, s))
    b2_r, b2_i = b2_laplace(spec, grid, f_r, f_i, s)
    return AmplitudePair(f_r, f_i, complex(b2_r), complex(b2_i))


def _b2_chunk(spec, atom, grid, s):
    matrices, rhs = _assemble_batch(spec, atom, grid, s)
    sol = _solve_batch(matrices, rhs)
    n = grid.n
    return b2_laplace(spec, grid, sol[:, :n], sol[:, n:], s)


def b2_on_contour(spec, atom, grid, s_values, chunk_size=32, n_jobs=1, time_budget=None):
    """Laplace amplitudes ``(b2_r(s), b2_i(s))`` at every point of ``s_values``.

    Points are independent, so chunks run on a thread pool when
    ``n_jobs > 1`` (LAPACK releases the GIL).  ``time_budget`` in seconds
    aborts with :class:`BudgetExceeded` once exceeded.
    """
    s_values = np.asarray(s_values, dtype=complex).ravel()
    chunk_size = check_int(chunk_size, "chunk_size", minimum=1)
    starts = range(0, s_values.size, chunk_size)
    deadline = None if time_budget is None else time.monotonic() + time_budget
    out_r = np.empty(s_values.size, dtype=complex)
    out_i = np.empty(s_values.size, dtype=complex)

    def work(start):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded(f"contour solve exceeded {time_budget:g} s budget")
        sl = slice(start, start + chunk_size)
        out_r[sl], out_i[sl] = _b2_chunk(spec, atom, grid, s_values[sl])

    if n_jobs == 1:
        for start in starts:
            work(start)
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            for fut in [pool.submit(work, st) for st in starts]:
                fut.result()
    return out_r, out_i
