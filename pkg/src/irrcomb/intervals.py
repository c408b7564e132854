"""Thin certified-interval layer over mpmath's interval context.

All numeric claims in the toolkit go through enclosures produced here.  An
enclosure computed at any working precision stays valid when the precision
later changes (interval results are never tightened in place), so mixing
precisions is sound; only widths vary.

The mpmath interval context keeps its precision in global state, so the
numeric core is meant to be driven from a single thread.  Worker processes
each get their own context.
"""

from contextlib import contextmanager
from fractions import Fraction

import mpmath
from mpmath import iv, libmp

DEFAULT_BITS = 64
MAX_BITS = 16384


@contextmanager
def working_precision(bits):
    old = iv.prec
    iv.prec = bits
    try:
        yield iv
    finally:
        iv.prec = old


def precision_schedule(start=DEFAULT_BITS, cap=MAX_BITS):
    """Yield the doubling precision ladder used for refinement loops."""
    bits = start
    while bits <= cap:
        yield bits
        bits *= 2


def iv_from_fraction(fr):
    """Exact rational as an interval (outward-rounded division)."""
    if fr.denominator == 1:
        return iv.mpf(fr.numerator)
    return iv.mpf(fr.numerator) / iv.mpf(fr.denominator)


def mpf_tuple_to_fraction(t):
    sign, man, exp, _ = t
    v = Fraction(int(man))
    if exp >= 0:
        v *= Fraction(2) ** exp
    else:
        v /= Fraction(2) ** (-exp)
    return -v if sign else v


def lower_fraction(x):
    return mpf_tuple_to_fraction(x._mpi_[0])


def upper_fraction(x):
    return mpf_tuple_to_fraction(x._mpi_[1])


def width_fraction(x):
    return upper_fraction(x) - lower_fraction(x)


def certainly_positive(x):
    return libmp.mpf_gt(x._mpi_[0], libmp.fzero)


def certainly_negative(x):
    return libmp.mpf_lt(x._mpi_[1], libmp.fzero)


def certainly_below(x, y):
    """True when every point of x is strictly below every point of y."""
    return libmp.mpf_lt(x._mpi_[1], y._mpi_[0])


def contains_zero(x):
    return not certainly_positive(x) and not certainly_negative(x)


def hull(x, y):
    lo = x._mpi_[0] if libmp.mpf_lt(x._mpi_[0], y._mpi_[0]) else y._mpi_[0]
    hi = x._mpi_[1] if libmp.mpf_gt(x._mpi_[1], y._mpi_[1]) else y._mpi_[1]
    return iv.make_mpf((lo, hi))


def iv_pow(base, exponent):
    """base**exponent for interval base > 0 and a real interval exponent."""
    return iv.exp(exponent * iv.log(base))


def floor_certain(x):
    """Certified floor of every point in the enclosure, or None if the
    enclosure straddles an integer."""
    lo = lower_fraction(x)
    hi = upper_fraction(x)
    fl = lo.numerator // lo.denominator
    fh = hi.numerator // hi.denominator
    if fl == fh:
        return fl
    return None


def midpoint_fraction(x):
    return (lower_fraction(x) + upper_fraction(x)) / 2


def fmt_endpoint(t, digits=17):
    """Deterministic decimal rendering of a raw mpf endpoint."""
    return libmp.to_str(t, digits)


def fmt_interval(x, digits=17):
    lo, hi = x._mpi_
    return fmt_endpoint(lo, digits), fmt_endpoint(hi, digits)


def iv_to_float(x):
    return float(mpmath.mpf(midpoint_fraction(x)))


def contained_in(x, lo, hi):
    """True when the enclosure x lies inside [lo, hi] (exact rationals)."""
    return lower_fraction(x) >= Fraction(lo) and upper_fraction(x) <= Fraction(hi)


def contains_value(x, v):
    v = Fraction(v)
    return lower_fraction(x) <= v <= upper_fraction(x)
