"""Small input-validation helpers used across the package."""
import math

import numpy as np

from .exceptions import ConfigError


def check_finite(value, name):
    if isinstance(value, bool):
        raise ConfigError(f"must be a number, got {value!r}", name)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"must be a number, got {value!r}", name) from None
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {value!r}", name)
    return value


def check_positive(value, name, allow_zero=False):
    value = check_finite(value, name)
    if value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ConfigError(f"must be {bound}, got {value!r}", name)
    return value


def check_int(value, name, minimum=None):
    try:
        ok = not isinstance(value, bool) and int(value) == value
    except (TypeError, ValueError, OverflowError):
        ok = False
    if not ok:
        raise ConfigError(f"must be an integer, got {value!r}", name)
    value = int(value)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}, got {value}", name)
    return value


def check_times(times, name="times"):
    """Return ``times`` as a 1-D float array of finite, non-negative values."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.ndim != 1:
        raise ConfigError("must be one-dimensional", name)
    if not np.all(np.isfinite(times)):
        raise ConfigError("must be finite", name)
    if np.any(times < 0):
        raise ConfigError("must be non-negative", name)
    return times
