"""Command-line entry point: ``simulate``, ``compare`` and ``reconstruct-reservoir``.

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 compare
deviation above threshold.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import config as config_io
from .exceptions import BudgetExceeded, ConfigError, SolverError
from .quasimode import network_for, reservoir_from_network
from .reservoir import eval_R
from .solvers import IntegralEquationSolver, MasterEquationSolver

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_THRESHOLD = 4

# Absolute level below which R counts as zero when forming relative gaps.
ZERO_LEVEL = 1e-12


def format_csv(header, columns):
    """CSV text with 12 significant digits and LF line endings."""
    lines = [",".join(header)]
    for row in np.column_stack(columns):
        lines.append(",".join(f"{x:.12g}" for x in row))
    return "\n".join(lines) + "\n"


def integral_solver(cfg):
    c = cfg.contour
    return IntegralEquationSolver(
        reservoir=cfg.model.reservoir(), atom=cfg.atom, n=cfg.grid.n,
        half_width=cfg.grid.half_width, sigma=c.sigma, omega_max=c.omega_max,
        samples=c.samples, tail_terms=c.tail_terms, n_jobs=cfg.n_jobs,
        time_budget=cfg.compare.time_budget,
    )


def master_solver(cfg):
    return MasterEquationSolver(reservoir=cfg.model.reservoir(), atom=cfg.atom)


def run_simulation(cfg):
    """Return ``(header, columns)`` for the configured method."""
    times = cfg.time.times()
    if cfg.method == "integral":
        p2 = integral_solver(cfg).fit(times).predict(times)
        return ("t", "P2"), (times, p2)
    pops = master_solver(cfg).fit(times).predict_populations(times)
    return ("t", "P2", "P1", "P0"), (times, *pops.T)


@dataclass(frozen=True)
class CompareReport:
    times: np.ndarray
    p2_master: np.ndarray
    p2_integral: np.ndarray | None
    max_deviation: float | None

    @property
    def fell_back(self):
        return self.p2_integral is None

    def csv(self):
        if self.fell_back:
            return format_csv(("t", "P2_master"), (self.times, self.p2_master))
        dev = np.abs(self.p2_integral - self.p2_master)
        return format_csv(("t", "P2_integral", "P2_master", "abs_diff"),
                          (self.times, self.p2_integral, self.p2_master, dev))


def compare(cfg):
    """Run both routes on identical times; fall back to master-only on budget overrun."""
    times = cfg.time.times()
    p2_master = master_solver(cfg).fit(times).predict(times)
    try:
        p2_int = integral_solver(cfg).fit(times).predict(times)
    except BudgetExceeded as exc:
        warnings.warn(f"integral route skipped: {exc}", RuntimeWarning, stacklevel=2)
        return CompareReport(times, p2_master, None, None)
    return CompareReport(times, p2_master, p2_int, float(np.max(np.abs(p2_int - p2_master))))


@dataclass(frozen=True)
class ReconstructReport:
    omegas: np.ndarray
    target: np.ndarray
    quasimode: np.ndarray

    @property
    def max_abs_gap(self):
        return float(np.max(np.abs(self.quasimode - self.target)))

    @property
    def max_rel_gap(self):
        mask = np.abs(self.target) > ZERO_LEVEL
        if not mask.any():
            return 0.0
        gap = np.abs(self.quasimode - self.target)[mask] / np.abs(self.target[mask])
        return float(gap.max())

    def csv(self):
        return format_csv(("omega", "R_target", "R_quasimode"),
                          (self.omegas, self.target, self.quasimode))


def reconstruct_reservoir(cfg):
    """Closed-form and network-reconstructed R (lower transition) on the configured grid."""
    spec = cfg.model.reservoir()
    omegas = cfg.reconstruct.omegas()
    net = network_for(spec)
    return ReconstructReport(omegas, eval_R(spec, omegas), reservoir_from_network(net, omegas, 1))


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cascade-decay",
        description="Cascade-atom decay in structured reservoirs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("simulate", "integrate one scenario and write t,P2[,P1,P0] as CSV"),
        ("compare", "run both methods and report the largest P2 deviation"),
        ("reconstruct-reservoir", "compare closed-form and quasimode R(omega)"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="scenario JSON file")
        p.add_argument("--output", help="CSV destination (default: config output or stdout)")
        p.add_argument("--seed-free", action="store_true",
                       help="reserved; nothing here is random, so it is rejected")
        if name == "simulate":
            p.add_argument("--method", choices=config_io.METHODS)
        if name == "compare":
            p.add_argument("--threshold", type=float, help="maximum allowed P2 deviation")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.seed_free:
        print("error: --seed-free is reserved; the solvers are deterministic", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = config_io.load(args.config)
        if getattr(args, "method", None):
            cfg = config_io.ScenarioConfig.from_dict({**cfg.to_dict(), "method": args.method})
        threshold = getattr(args, "threshold", None)
        if threshold is not None:
            if not np.isfinite(threshold) or threshold < 0:
                raise ConfigError("must be a finite number >= 0", "--threshold")
            cfg = replace(cfg, compare=replace(cfg.compare, threshold=threshold))
        output = args.output or cfg.output

        if args.command == "simulate":
            _write(format_csv(*run_simulation(cfg)), output)
            return EXIT_OK
        if args.command == "reconstruct-reservoir":
            report = reconstruct_reservoir(cfg)
            _write(report.csv(), output)
            print(f"max_rel_gap={report.max_rel_gap:.3e} max_abs_gap={report.max_abs_gap:.3e}",
                  file=sys.stderr)
            return EXIT_OK

        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RuntimeWarning)
            report = compare(cfg)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        _write(report.csv(), output)
        if report.fell_back:
            print("max_deviation=unavailable (master-only)", file=sys.stderr)
            return EXIT_OK
        print(f"max_deviation={report.max_deviation:.6e} "
              f"threshold={cfg.compare.threshold:g}", file=sys.stderr)
        return EXIT_THRESHOLD if report.max_deviation > cfg.compare.threshold else EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
