"""Thin wrappers over mpmath's interval context.

Each computation builds its own context so precision changes never leak
between callers (or threads).
"""

from __future__ import annotations

from fractions import Fraction

from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext


def context(prec: int) -> MPIntervalContext:
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


def from_fraction(ctx, q: Fraction):
    return ctx.mpf(q.numerator) / ctx.mpf(q.denominator)


def from_float(ctx, x: float):
    return ctx.mpf(x)


def hull(ctx, lo, hi):
    """Interval spanned by the lower end of ``lo`` and the upper end of ``hi``."""
    return ctx.make_mpf((lo._mpi_[0], hi._mpi_[1]))


def intersect(ctx, x, lo_bound, hi_bound):
    """Clamp ``x`` into ``[lo_bound, hi_bound]`` (both plain floats)."""
    a, b = x._mpi_
    lo = libmp.from_float(lo_bound)
    hi = libmp.from_float(hi_bound)
    if libmp.mpf_lt(a, lo):
        a = lo
    if libmp.mpf_gt(b, hi):
        b = hi
    return ctx.make_mpf((a, b))


def abs_max(ctx, x, y):
    """Interval enclosing ``max(|x|, |y|)``."""
    ax, ay = abs(x)._mpi_, abs(y)._mpi_
    lo = ax[0] if libmp.mpf_ge(ax[0], ay[0]) else ay[0]
    hi = ax[1] if libmp.mpf_ge(ax[1], ay[1]) else ay[1]
    return ctx.make_mpf((lo, hi))


def upper_mpf(x):
    """The upper endpoint as a degenerate interval."""
    return x.ctx.make_mpf((x._mpi_[1], x._mpi_[1]))


def lower(x) -> float:
    return libmp.to_float(x._mpi_[0], rnd=libmp.round_floor)


def upper(x) -> float:
    return libmp.to_float(x._mpi_[1], rnd=libmp.round_ceiling)


def midpoint(x) -> float:
    a, b = x._mpi_
    return libmp.to_float(libmp.mpf_shift(libmp.mpf_add(a, b, 200), -1))


def log_nearest(n: int) -> float:
    """Natural log of a positive integer, correctly rounded to a double."""
    return libmp.to_float(libmp.mpf_log(libmp.from_int(n), 53, libmp.round_nearest))


def log_upper(n: int) -> float:
    """A double that is >= log(n)."""
    return libmp.to_float(libmp.mpf_log(libmp.from_int(n), 53, libmp.round_ceiling),
                          rnd=libmp.round_ceiling)
