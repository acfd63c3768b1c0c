"""Exception hierarchy shared by the library and the CLI (exit codes live here)."""

from __future__ import annotations

import os
import warnings

DEFAULT_ENUM_LIMIT = 12
DEFAULT_PARTITION_LIMIT = 10
ENUM_LIMIT_ENV = "SKALC_ENUM_LIMIT"


class SkalcError(Exception):
    exit_code = 1


class ValidationError(SkalcError, ValueError):
    """Malformed input: bad source document, out-of-range parameter."""

    exit_code = 2


class SizeLimitError(SkalcError):
    """Instance too large for exhaustive subset or partition enumeration."""

    exit_code = 3


class InfeasibleRateError(SkalcError):
    """Requested key rate or rate vector cannot be met."""

    exit_code = 4


class SolverError(SkalcError):
    """Internal consistency failure (broken separator, bad certificate)."""

    exit_code = 5


def enumeration_limit() -> int:
    raw = os.environ.get(ENUM_LIMIT_ENV)
    if not raw:
        return DEFAULT_ENUM_LIMIT
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{ENUM_LIMIT_ENV}={raw!r} is not an integer") from exc
    if value != DEFAULT_ENUM_LIMIT:
        warnings.warn(
            f"{ENUM_LIMIT_ENV} overrides the vertex limit: {DEFAULT_ENUM_LIMIT} -> {value}; "
            "exhaustive enumeration is exponential in this number",
            RuntimeWarning,
            stacklevel=2,
        )
    return value


def check_vertex_count(n: int, limit: int | None = None) -> None:
    limit = enumeration_limit() if limit is None else limit
    if n > limit:
        raise SizeLimitError(f"{n} vertices exceeds the enumeration limit of {limit}")
