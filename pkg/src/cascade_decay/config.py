"""JSON scenario configuration.

A scenario is one JSON object; every section is optional except ``model``.
Parsing validates eagerly (the reservoir is built) so errors name the
offending field, and :func:`dumps` of a parsed config parses back to an
identical document.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

import numpy as np

from ._validation import check_finite, check_int, check_positive
from .exceptions import ConfigError
from .laplace_inversion import (
    DEFAULT_OMEGA_MAX,
    DEFAULT_SAMPLES,
    DEFAULT_TAIL_TERMS,
    BromwichContour,
)
from .reservoir import AtomOffsets, LorentzianTerm, ReservoirSpec

METHODS = ("integral", "master")
MODEL_KINDS = ("high_q", "pbg", "lorentzian_sum")

_MODEL_KEYS = {
    "high_q": ("omega", "gamma", "delta"),
    "pbg": ("omega1", "gamma1", "gamma2", "delta"),
    "lorentzian_sum": ("terms", "eta"),
}


def _scoped(exc, prefix):
    sub = f"{prefix}.{exc.field}" if exc.field else prefix
    return type(exc)(exc.detail, sub)


def _reject_unknown(data, allowed, section):
    if not isinstance(data, dict):
        raise ConfigError("must be a JSON object", section)
    extra = sorted(set(data) - set(allowed))
    if extra:
        raise ConfigError(f"unknown key(s) {', '.join(extra)}", section)


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict) or "kind" not in data:
            raise ConfigError("must be an object with a 'kind'", "model")
        kind = data["kind"]
        if kind not in MODEL_KINDS:
            raise ConfigError(f"must be one of {', '.join(MODEL_KINDS)}, got {kind!r}",
                              "model.kind")
        _reject_unknown(data, ("kind",) + _MODEL_KEYS[kind], "model")
        if kind == "lorentzian_sum":
            terms = data.get("terms")
            if not isinstance(terms, list) or not terms:
                raise ConfigError("must be a non-empty list", "model.terms")
            params = {"terms": [], "eta": check_positive(data.get("eta", 1.0), "model.eta")}
            for i, t in enumerate(terms):
                where = f"model.terms[{i}]"
                _reject_unknown(t, ("weight", "width", "offset"), where)
                for key in ("weight", "width"):
                    if key not in t:
                        raise ConfigError("missing", f"{where}.{key}")
                params["terms"].append({
                    "weight": check_finite(t["weight"], f"{where}.weight"),
                    "width": check_finite(t["width"], f"{where}.width"),
                    "offset": check_finite(t.get("offset", 0.0), f"{where}.offset"),
                })
        else:
            params = {}
            for key in _MODEL_KEYS[kind]:
                if key == "delta":
                    params[key] = check_finite(data.get(key, 0.0), "model.delta")
                elif key not in data:
                    raise ConfigError("missing", f"model.{key}")
                else:
                    params[key] = check_finite(data[key], f"model.{key}")
        config = cls(kind, params)
        config.reservoir()
        return config

    def to_dict(self):
        return {"kind": self.kind, **self.params}

    def reservoir(self):
        p = self.params
        try:
            if self.kind == "high_q":
                return ReservoirSpec.high_q(p["omega"], p["gamma"], p["delta"])
            if self.kind == "pbg":
                return ReservoirSpec.pbg(p["omega1"], p["gamma1"], p["gamma2"], p["delta"])
            terms = [LorentzianTerm(t["weight"], t["width"], t["offset"]) for t in p["terms"]]
            return ReservoirSpec(terms, eta=p["eta"])
        except ConfigError as exc:
            raise _scoped(exc, "model") from exc


@dataclass(frozen=True)
class GridConfig:
    n: int = 150
    half_width: float = 30.0


@dataclass(frozen=True)
class ContourConfig:
    sigma: float | None = None
    omega_max: float = DEFAULT_OMEGA_MAX
    samples: int = DEFAULT_SAMPLES
    tail_terms: int = DEFAULT_TAIL_TERMS


@dataclass(frozen=True)
class TimeConfig:
    t_max: float = 10.0
    n_points: int = 500

    def times(self):
        return np.linspace(0.0, self.t_max, self.n_points)


@dataclass(frozen=True)
class CompareConfig:
    threshold: float = 0.02
    time_budget: float | None = None


@dataclass(frozen=True)
class ReconstructConfig:
    omega_min: float = -30.0
    omega_max: float = 30.0
    n_points: int = 1001

    def omegas(self):
        return np.linspace(self.omega_min, self.omega_max, self.n_points)


def _section(cls, data, name, checks):
    data = {} if data is None else data
    _reject_unknown(data, [f.name for f in fields(cls)], name)
    values = {}
    for f in fields(cls):
        if f.name in data:
            raw, where = data[f.name], f"{name}.{f.name}"
            if raw is None and f.default is not None:
                raise ConfigError("must not be null", where)
            values[f.name] = None if raw is None else checks[f.name](raw, where)
    return cls(**values)


@dataclass(frozen=True)
class ScenarioConfig:
    model: ModelConfig
    atom: AtomOffsets = field(default_factory=AtomOffsets)
    method: str = "master"
    grid: GridConfig = field(default_factory=GridConfig)
    contour: ContourConfig = field(default_factory=ContourConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    output: str | None = None
    compare: CompareConfig = field(default_factory=CompareConfig)
    reconstruct: ReconstructConfig = field(default_factory=ReconstructConfig)
    n_jobs: int = 1

    @classmethod
    def from_dict(cls, data):
        _reject_unknown(data, [f.name for f in fields(cls)], "config")
        if "model" not in data:
            raise ConfigError("missing", "model")
        atom = data.get("atom") or {}
        _reject_unknown(atom, ("delta_bar",), "atom")
        method = data.get("method", "master")
        if method not in METHODS:
            raise ConfigError(f"must be one of {', '.join(METHODS)}, got {method!r}", "method")
        output = data.get("output")
        if output is not None and not isinstance(output, str):
            raise ConfigError("must be a path string or null", "output")
        config = cls(
            model=ModelConfig.from_dict(data["model"]),
            atom=AtomOffsets(check_finite(atom.get("delta_bar", 0.0), "atom.delta_bar")),
            method=method,
            grid=_section(GridConfig, data.get("grid"), "grid", {
                "n": lambda v, f: check_int(v, f, minimum=1),
                "half_width": check_positive,
            }),
            contour=_section(ContourConfig, data.get("contour"), "contour", {
                "sigma": check_positive,
                "omega_max": check_positive,
                "samples": lambda v, f: check_int(v, f, minimum=8),
                "tail_terms": lambda v, f: check_int(v, f, minimum=0),
            }),
            time=_section(TimeConfig, data.get("time"), "time", {
                "t_max": check_positive,
                "n_points": lambda v, f: check_int(v, f, minimum=1),
            }),
            output=output,
            compare=_section(CompareConfig, data.get("compare"), "compare", {
                "threshold": lambda v, f: check_positive(v, f, allow_zero=True),
                "time_budget": check_positive,
            }),
            reconstruct=_section(ReconstructConfig, data.get("reconstruct"), "reconstruct", {
                "omega_min": check_finite,
                "omega_max": check_finite,
                "n_points": lambda v, f: check_int(v, f, minimum=2),
            }),
            n_jobs=check_int(data.get("n_jobs", 1), "n_jobs", minimum=1),
        )
        config._check_cross_fields()
        return config

    def _check_cross_fields(self):
        if self.reconstruct.omega_max <= self.reconstruct.omega_min:
            raise ConfigError("must exceed reconstruct.omega_min", "reconstruct.omega_max")
        contour = self.bromwich_contour()
        if self.method == "integral" and self.time.t_max > contour.max_time:
            raise ConfigError(
                f"exceeds the aliasing limit {contour.max_time:g} of the contour",
                "time.t_max",
            )

    def bromwich_contour(self):
        c = self.contour
        if c.sigma is None:
            return BromwichContour.for_horizon(max(self.time.t_max, 1.0), c.omega_max,
                                               c.samples)
        return BromwichContour(c.sigma, c.omega_max, c.samples)

    def to_dict(self):
        def plain(obj):
            return {f.name: getattr(obj, f.name) for f in fields(obj)}

        return {
            "model": self.model.to_dict(),
            "atom": {"delta_bar": self.atom.delta_bar},
            "method": self.method,
            "grid": plain(self.grid),
            "contour": plain(self.contour),
            "time": plain(self.time),
            "output": self.output,
            "compare": plain(self.compare),
            "reconstruct": plain(self.reconstruct),
            "n_jobs": self.n_jobs,
        }


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON ({exc.msg} at line {exc.lineno})", "config") from exc
    return ScenarioConfig.from_dict(data)


def load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", "config") from exc
    return loads(text)


def dumps(config):
    return json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n"
