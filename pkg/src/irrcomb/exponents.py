"""Exact real exponents over a finitely generated rational module.

An :class:`Exponent` is an exact rational plus a rational combination of
canonical constants (sqrt of a squarefree integer, log of a prime, pi, or a
decimal literal).  Under the user-asserted Q-linear independence of
``{1} + constants``, two exponents are equal iff their representations are
identical; ordering of distinct exponents is decided by certified interval
refinement with a doubling precision schedule.
"""

from fractions import Fraction
from math import gcd

from mpmath import iv

from .constants import Constant, parse_real
from .errors import EmptySet, TieUnresolved
from .intervals import (
    DEFAULT_BITS,
    MAX_BITS,
    certainly_below,
    iv_from_fraction,
    lower_fraction,
    precision_schedule,
    upper_fraction,
    working_precision,
)

LT, EQ, GT = -1, 0, 1


class Exponent:
    """Immutable exact real: rational + sum of coeff*constant."""

    __slots__ = ("rational", "parts", "_hash", "_enc")

    def __init__(self, rational=0, parts=()):
        self.rational = Fraction(rational)
        if isinstance(parts, dict):
            parts = tuple(sorted(((c, Fraction(q)) for c, q in parts.items() if q),
                                 key=lambda cq: cq[0]._key))
        self.parts = parts
        self._hash = hash((self.rational, self.parts))
        self._enc = {}

    @staticmethod
    def parse(text):
        rational, parts = parse_real(text)
        return Exponent(rational, parts)

    @staticmethod
    def rat(v):
        return Exponent(Fraction(v))

    # -- structure ---------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Exponent)
                and self.rational == other.rational and self.parts == other.parts)

    def __hash__(self):
        return self._hash

    @property
    def is_zero(self):
        return not self.parts and self.rational == 0

    @property
    def is_rational(self):
        return not self.parts

    def constants(self):
        return [c for c, _ in self.parts]

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Exponent(other)
        parts = dict(self.parts)
        for c, q in other.parts:
            s = parts.get(c, Fraction(0)) + q
            if s:
                parts[c] = s
            else:
                parts.pop(c, None)
        return Exponent(self.rational + other.rational, parts)

    __radd__ = __add__

    def __neg__(self):
        return Exponent(-self.rational, {c: -q for c, q in self.parts})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Exponent(other)
        return self + (-other)

    def scale(self, k):
        k = Fraction(k)
        if k == 0:
            return Exponent(0)
        return Exponent(self.rational * k, {c: q * k for c, q in self.parts})

    __mul__ = scale
    __rmul__ = scale

    def __repr__(self):
        return "Exponent(%s)" % self.text()

    def text(self):
        """Deterministic rendering in the constant grammar."""
        bits = []
        if self.rational or not self.parts:
            bits.append(str(self.rational))
        for c, q in self.parts:
            if q == 1:
                bits.append(c.descriptor())
            else:
                bits.append("%s*%s" % (q, c.descriptor()))
        out = "+".join(bits)
        return out.replace("+-", "-")

    # -- numerics ----------------------------------------------------------

    def enclosure(self, bits=DEFAULT_BITS):
        got = self._enc.get(bits)
        if got is not None:
            return got
        with working_precision(bits):
            acc = iv_from_fraction(self.rational)
            for c, q in self.parts:
                acc += iv_from_fraction(q) * c.enclosure(bits)
        self._enc[bits] = acc
        return acc

    def float_approx(self):
        x = self.enclosure(DEFAULT_BITS)
        return float((lower_fraction(x) + upper_fraction(x)) / 2)

    def sign(self, cap_bits=MAX_BITS):
        """Certified sign: -1, 0, +1.  Exact zero is symbolic."""
        if self.is_zero:
            return 0
        if self.is_rational:
            return -1 if self.rational < 0 else 1
        for bits in precision_schedule(cap=cap_bits):
            enc = self.enclosure(bits)
            if lower_fraction(enc) > 0:
                return 1
            if upper_fraction(enc) < 0:
                return -1
        raise TieUnresolved(
            "sign of %s undecided at %d bits" % (self.text(), cap_bits))

    def is_nonnegative(self, cap_bits=MAX_BITS):
        return self.sign(cap_bits) >= 0


ZERO = Exponent(0)


def compare(a, b, cap_bits=MAX_BITS):
    """Total order on exponents: EQ iff symbolically equal, else certified
    by interval refinement.  Raises TieUnresolved at the precision cap."""
    if a == b:
        return EQ
    if a.is_rational and b.is_rational:
        return LT if a.rational < b.rational else GT
    for bits in precision_schedule(cap=cap_bits):
        ea, eb = a.enclosure(bits), b.enclosure(bits)
        if certainly_below(ea, eb):
            return LT
        if certainly_below(eb, ea):
            return GT
    raise TieUnresolved(
        "cannot separate %s and %s at %d bits (independence violated, or a "
        "literal ran out of digits)" % (a.text(), b.text(), cap_bits))


def value(e, precision_bits=DEFAULT_BITS):
    """Interval enclosure of an exponent at the requested precision."""
    if precision_bits < 16:
        raise ValueError("precision_bits must be >= 16")
    return e.enclosure(precision_bits)


def sort_exponents(exps, cap_bits=MAX_BITS):
    import functools
    return sorted(exps, key=functools.cmp_to_key(lambda x, y: compare(x, y, cap_bits)))


class Basis:
    """Ordered list of canonical constants with an independence assertion.

    The leading implicit coordinate is the rational unit; remaining
    coordinates follow ``constants``.
    """

    def __init__(self, constants, independence_asserted=True):
        constants = tuple(sorted(set(constants)))
        self.constants = constants
        self.independence_asserted = independence_asserted
        self._index = {c: i for i, c in enumerate(constants)}

    @staticmethod
    def spanning(exps, independence_asserted=True):
        seen = set()
        for e in exps:
            seen.update(e.constants())
        return Basis(seen, independence_asserted)

    def coords(self, e):
        """Coordinate vector (unit first) of an exponent over this basis."""
        vec = [Fraction(0)] * (1 + len(self.constants))
        vec[0] = e.rational
        for c, q in e.parts:
            vec[1 + self._index[c]] = q
        return tuple(vec)

    def from_coords(self, vec):
        return Exponent(vec[0], {c: q for c, q in zip(self.constants, vec[1:]) if q})

    def descriptors(self):
        return ("1",) + tuple(c.descriptor() for c in self.constants)

    def __eq__(self, other):
        return isinstance(other, Basis) and self.constants == other.constants

    def __repr__(self):
        return "Basis(%s)" % ", ".join(self.descriptors())


class Irrational:
    kind = "irrational"

    def __repr__(self):
        return "Irrational()"


class Rational:
    kind = "rational"

    def __init__(self, omega, multipliers):
        self.omega = omega
        self.multipliers = multipliers

    def __repr__(self):
        return "Rational(omega=%s, multipliers=%s)" % (self.omega.text(), self.multipliers)


class ShiftedRational:
    kind = "shifted-rational"

    def __init__(self, omega, delta):
        self.omega = omega
        self.delta = delta

    def __repr__(self):
        return "ShiftedRational(omega=%s, delta=%s)" % (self.omega.text(), self.delta.text())


def _proportionality(base_vec, vec):
    """Fraction t with vec == t*base_vec, or None."""
    t = None
    for u, v in zip(base_vec, vec):
        if u == 0:
            if v != 0:
                return None
            continue
        cand = Fraction(v, 1) / u
        if t is None:
            t = cand
        elif t != cand:
            return None
    if t is None:
        return Fraction(0)
    # zero components of base must match zero components of vec
    for u, v in zip(base_vec, vec):
        if u == 0 and v != 0:
            return None
    return t


def _fraction_gcd(fracs):
    nums = [f.numerator for f in fracs if f]
    dens = [f.denominator for f in fracs if f]
    if not nums:
        return Fraction(0)
    g = 0
    for n in nums:
        g = gcd(g, abs(n))
    l = 1
    for d in dens:
        l = l * d // gcd(l, d)
    return Fraction(g, l)


def rationality(exps, cap_bits=MAX_BITS):
    """Classify a set of exponents as Irrational, Rational(omega, m_i) or
    ShiftedRational(omega, delta).

    Rational: all values lie on one rational ray; omega is the largest
    period (gcd along the ray) and each value equals m_i * omega exactly
    with gcd(m_i) = 1.  ShiftedRational: values lie on delta + omega*N with
    0 <= delta < omega and delta/omega irrational.
    """
    exps = list(exps)
    if not exps:
        raise EmptySet("rationality of an empty set")
    basis = Basis.spanning(exps)
    vecs = [basis.coords(e) for e in exps]

    nonzero = [v for v in vecs if any(v)]
    if not nonzero:
        raise EmptySet("size set {0} has no period")

    # all on a common ray through the origin?
    base = nonzero[0]
    ts = []
    on_ray = True
    for v in vecs:
        t = _proportionality(base, v)
        if t is None:
            on_ray = False
            break
        ts.append(t)
    if on_ray:
        g = _fraction_gcd(ts)
        omega = basis.from_coords(tuple(q * g for q in base))
        if omega.sign(cap_bits) < 0:
            g = -g
            omega = basis.from_coords(tuple(q * g for q in base))
        multipliers = tuple(int(t / g) for t in ts)
        return Rational(omega, multipliers)

    # Shifted ray: all differences from the least element on a common ray.
    # Two elements always fit some shifted lattice, so demand at least three
    # before asserting one.
    order = sort_exponents(exps, cap_bits)
    e0 = order[0]
    diffs = [basis.coords(e - e0) for e in order[1:]]
    dbase = next((d for d in diffs if any(d)), None)
    if dbase is not None and len(diffs) >= 2:
        ts = []
        shifted = True
        for d in diffs:
            t = _proportionality(dbase, d)
            if t is None or t < 0:
                shifted = False
                break
            ts.append(t)
        if shifted:
            g = _fraction_gcd(ts)
            omega = basis.from_coords(tuple(q * g for q in dbase))
            if omega.sign(cap_bits) < 0:
                omega = -omega
            delta = e0
            while compare(delta, omega, cap_bits) in (EQ, GT):
                delta = delta - omega
            if not delta.is_zero and \
                    _proportionality(basis.coords(omega), basis.coords(delta)) is None:
                return ShiftedRational(omega, delta)
            # A commensurate offset would have been caught by the common-ray
            # branch; fall through conservatively.

    return Irrational()


def min_gap_hint(exps, upper, cap_bits=MAX_BITS):
    """Certified positive lower bound (exact Fraction) on the minimum gap
    between distinct values in the set.  Values must not exceed ``upper``."""
    exps = list(dict.fromkeys(exps))
    if not exps:
        raise EmptySet("min_gap_hint of an empty set")
    upper = upper if isinstance(upper, Exponent) else Exponent.rat(upper)
    for e in exps:
        if compare(e, upper, cap_bits) == GT:
            raise ValueError("exponent %s exceeds the stated upper bound" % e.text())
    if len(exps) == 1:
        return Fraction(1)
    order = sort_exponents(exps, cap_bits)
    best = None
    for a, b in zip(order, order[1:]):
        d = b - a
        for bits in precision_schedule(cap=cap_bits):
            enc = d.enclosure(bits)
            lo = lower_fraction(enc)
            if lo > 0:
                break
        else:
            raise TieUnresolved("gap between %s and %s undecided" % (a.text(), b.text()))
        best = lo if best is None else min(best, lo)
    return best
