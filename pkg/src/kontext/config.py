"""Process-wide numeric tolerance.

Geometric predicates accept an explicit ``tol``; when it is ``None`` they
fall back to the value configured here.
"""
from __future__ import annotations

import os

DEFAULT_TOLERANCE = 1e-9
ENV_TOLERANCE = "KONTEXT_TOLERANCE"

_tolerance = DEFAULT_TOLERANCE


def get_tolerance() -> float:
    return _tolerance


def set_tolerance(tol: float) -> None:
    global _tolerance
    tol = float(tol)
    if not tol > 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    _tolerance = tol


def tolerance_from_env(default: float | None = None) -> float:
    """Read ``KONTEXT_TOLERANCE``, falling back to ``default`` or the configured value."""
    raw = os.environ.get(ENV_TOLERANCE)
    if raw is None or raw.strip() == "":
        return get_tolerance() if default is None else default
    try:
        tol = float(raw)
    except ValueError:
        raise ValueError(f"{ENV_TOLERANCE}={raw!r} is not a number") from None
    if not tol > 0:
        raise ValueError(f"{ENV_TOLERANCE} must be positive, got {raw!r}")
    return tol


def resolve(tol: float | None) -> float:
    return _tolerance if tol is None else tol
