"""Working precision for the floating path.

All multiprecision arithmetic in the package goes through one private
mpmath context, so callers' global ``mpmath.mp`` settings are never touched.
The default precision comes from ``ZEROSCOPE_PREC_BITS`` (256 bits if unset).
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import mpmath

ENV_VAR = "ZEROSCOPE_PREC_BITS"
DEFAULT_PREC_BITS = 256
MIN_PREC_BITS = 64

ctx = mpmath.MPContext()


def prec_from_env() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_PREC_BITS
    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if bits <= 0:
        raise ValueError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return bits


def set_precision(bits: int) -> None:
    if bits < MIN_PREC_BITS:
        raise ValueError(f"precision must be at least {MIN_PREC_BITS} bits, got {bits}")
    ctx.prec = bits


def get_precision() -> int:
    return ctx.prec


@contextmanager
def working_precision(bits: int):
    """Temporarily run the package context at ``bits`` of precision."""
    if bits < MIN_PREC_BITS:
        raise ValueError(f"precision must be at least {MIN_PREC_BITS} bits, got {bits}")
    old = ctx.prec
    ctx.prec = bits
    try:
        yield ctx
    finally:
        ctx.prec = old


def unit_roundoff():
    return ctx.ldexp(ctx.one, -ctx.prec)


set_precision(max(prec_from_env(), MIN_PREC_BITS))
