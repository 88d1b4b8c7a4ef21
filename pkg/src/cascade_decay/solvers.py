"""Estimator-style front-ends for the two solution routes.

Both follow the scikit-learn convention: constructor arguments are plain
hyper-parameters, ``fit`` does the expensive set-up and stores fitted
attributes with a trailing underscore, and ``predict(times)`` returns the
upper-level population ``P2`` at the requested times.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_times
from .integral_solver import b2_on_contour, build_grid, solve_point
from .laplace_inversion import (
    DEFAULT_OMEGA_MAX,
    DEFAULT_SAMPLES,
    DEFAULT_TAIL_TERMS,
    BromwichContour,
    invert_samples,
)
from .master_equation import DEFAULT_ATOL, DEFAULT_RTOL, integrate, model_for
from .reservoir import AtomOffsets


def _atom(atom):
    return AtomOffsets() if atom is None else atom


def _horizon(times):
    times = check_times(times)
    if times.size == 0:
        raise ValueError("times must not be empty")
    # Short horizons would push sigma = 2/t_max far from the singularities.
    return times, max(float(times.max()), 1.0)


class IntegralEquationSolver(BaseEstimator):
    """Integral-equation route: Fredholm solve on a Bromwich contour plus inversion.

    Parameters
    ----------
    reservoir : ReservoirSpec
    atom : AtomOffsets, optional
    n, half_width : int, float
        Midpoint frequency grid on ``[-half_width, half_width]``.
    sigma : float, optional
        Contour abscissa; chosen from the time horizon when omitted.
    omega_max, samples : float, int
        Contour extent and sample count.
    tail_terms : int
        Asymptotic ``1/s^k`` terms removed before the trapezoid sum.
    n_jobs : int
        Worker threads for the contour solves.
    time_budget : float, optional
        Wall-clock limit in seconds for :meth:`fit`.

    Attributes
    ----------
    grid_, contour_ : FrequencyGrid, BromwichContour
    b2_r_, b2_i_ : ndarray
        Laplace-domain amplitudes on ``contour_.points``.
    reflection_defect_ : float
        Largest relative violation of ``F(conj s) = conj F(s)`` at two probe points.
    """

    def __init__(self, reservoir=None, atom=None, n=150, half_width=30.0, sigma=None,
                 omega_max=DEFAULT_OMEGA_MAX, samples=DEFAULT_SAMPLES,
                 tail_terms=DEFAULT_TAIL_TERMS, n_jobs=1, time_budget=None):
        self.reservoir = reservoir
        self.atom = atom
        self.n = n
        self.half_width = half_width
        self.sigma = sigma
        self.omega_max = omega_max
        self.samples = samples
        self.tail_terms = tail_terms
        self.n_jobs = n_jobs
        self.time_budget = time_budget

    def fit(self, times, y=None):
        """Solve the integral equation on every contour point needed for ``times``."""
        if self.reservoir is None:
            raise ValueError("reservoir must be set before fit")
        _, t_max = _horizon(times)
        atom = _atom(self.atom)
        self.grid_ = build_grid(self.n, self.half_width)
        if self.sigma is None:
            self.contour_ = BromwichContour.for_horizon(t_max, self.omega_max, self.samples)
        else:
            self.contour_ = BromwichContour(self.sigma, self.omega_max, self.samples)
        self.b2_r_, self.b2_i_ = b2_on_contour(
            self.reservoir, atom, self.grid_, self.contour_.points,
            n_jobs=self.n_jobs, time_budget=self.time_budget,
        )
        self.reflection_defect_ = self._reflection_defect(atom)
        return self

    def _reflection_defect(self, atom):
        pts = self.contour_.points
        worst = 0.0
        for s in pts[[pts.size // 3, 2 * pts.size // 3]]:
            a, b = solve_point(self.reservoir, atom, self.grid_, s), solve_point(
                self.reservoir, atom, self.grid_, np.conj(s))
            for x, y in ((a.b2_r, b.b2_r), (a.b2_i, b.b2_i)):
                worst = max(worst, abs(y - np.conj(x)) / max(abs(x), 1e-300))
        return float(worst)

    def predict_amplitudes(self, times):
        """Real-time amplitudes ``(b2_r(t), b2_i(t))``."""
        check_is_fitted(self, "b2_r_")
        times = check_times(times)
        return (invert_samples(self.b2_r_, self.contour_, times, self.tail_terms),
                invert_samples(self.b2_i_, self.contour_, times, self.tail_terms))

    def predict(self, times):
        """Upper-level population ``P2(t) = b2_r(t)^2 + b2_i(t)^2``."""
        b_r, b_i = self.predict_amplitudes(times)
        return b_r**2 + b_i**2


class MasterEquationSolver(BaseEstimator):
    """Pseudomode master-equation route.

    Parameters
    ----------
    reservoir : ReservoirSpec
        Must be of kind ``high_q`` or ``pbg``.
    atom : AtomOffsets, optional
    rtol, atol : float
        Integrator tolerances.

    Attributes
    ----------
    model_ : LindbladModel
    trajectory_ : Trajectory
        Result of the latest :meth:`predict` call, with conservation diagnostics.
    """

    def __init__(self, reservoir=None, atom=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
        self.reservoir = reservoir
        self.atom = atom
        self.rtol = rtol
        self.atol = atol

    def fit(self, times=None, y=None):
        if self.reservoir is None:
            raise ValueError("reservoir must be set before fit")
        self.model_ = model_for(self.reservoir, _atom(self.atom))
        return self

    def predict_populations(self, times):
        """Columns ``P2, P1, P0`` at ``times``."""
        check_is_fitted(self, "model_")
        self.trajectory_ = integrate(self.model_, times, rtol=self.rtol, atol=self.atol)
        return self.trajectory_.populations

    def predict(self, times):
        return self.predict_populations(times)[:, 0]
