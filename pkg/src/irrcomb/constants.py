"""Basis constants and the textual grammar for exact real values.

A value is written as a sum of terms, each term an optional rational
multiplier times one named constant:

    "1"            "3/2"          "sqrt(2)"       "2*sqrt(3)"
    "log(10)"      "pi/4"         "4*pi"          "lit:1.4142135623:10"
    "1+sqrt(2)"    "log(12)-log(3)"

Constants are normalised to a canonical generating set so that symbolically
equal values compare equal:

    sqrt(p/q)  ->  rational multiple of sqrt(d) with d squarefree (or pure
                   rational when p*q is a perfect square)
    log(p/q)   ->  integer combination of logs of primes
    pi         ->  rational multiples of pi
    lit:...    ->  an opaque decimal literal with stated precision

Every canonical constant is strictly positive and evaluates to an
arbitrary-precision enclosure.  Decimal literals carry a fixed-width
enclosure (+/- half an ulp at the stated decimal precision): comparisons
that need more digits than the literal provides fail loudly rather than
invent digits.
"""

import re
from fractions import Fraction

from mpmath import iv

from .errors import BadParameter, ParseError
from .intervals import iv_from_fraction, working_precision

_KIND_ORDER = {"sqrt": 0, "logp": 1, "pi": 2, "lit": 3}


class Constant:
    """A canonical irrational generator: sqrt(n), log(p), pi, or a literal."""

    __slots__ = ("kind", "param", "_key", "_hash", "_cache")

    def __init__(self, kind, param):
        self.kind = kind
        self.param = param
        self._key = (_KIND_ORDER[kind], param if param is not None else 0)
        self._hash = hash((kind, param))
        self._cache = {}

    def __eq__(self, other):
        return isinstance(other, Constant) and self.kind == other.kind and self.param == other.param

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        return "Constant(%s)" % self.descriptor()

    def descriptor(self):
        if self.kind == "sqrt":
            return "sqrt(%d)" % self.param
        if self.kind == "logp":
            return "log(%d)" % self.param
        if self.kind == "pi":
            return "pi"
        digits, prec = self.param
        return "lit:%s:%d" % (digits, prec)

    def enclosure(self, bits):
        """Certified enclosure; width scales like 2**(1-bits) except for
        literals, whose width is fixed by their stated precision."""
        got = self._cache.get(bits)
        if got is not None:
            return got
        with working_precision(bits):
            if self.kind == "sqrt":
                enc = iv.sqrt(iv.mpf(self.param))
            elif self.kind == "logp":
                enc = iv.log(iv.mpf(self.param))
            elif self.kind == "pi":
                enc = +iv.pi
            else:
                digits, prec = self.param
                val = Fraction(digits.replace(".", "")) / 10 ** _frac_digits(digits)
                half = Fraction(1, 2 * 10 ** prec)
                lo = iv_from_fraction(val - half)
                hi = iv_from_fraction(val + half)
                enc = iv.make_mpf((lo._mpi_[0], hi._mpi_[1]))
        self._cache[bits] = enc
        return enc

    @property
    def exact_width_floor(self):
        """Literals cannot be refined below their stated enclosure width."""
        if self.kind == "lit":
            return Fraction(1, 10 ** self.param[1])
        return None


def _frac_digits(digits):
    return len(digits.split(".")[1]) if "." in digits else 0


PI = Constant("pi", None)


def _squarefree_split(n):
    """n = m*m*d with d squarefree; returns (m, d)."""
    m, d = 1, 1
    k = 2
    while k * k <= n:
        e = 0
        while n % k == 0:
            n //= k
            e += 1
        m *= k ** (e // 2)
        if e % 2:
            d *= k
        k += 1
    return m, d * n


def _prime_factors(n):
    out = {}
    k = 2
    while k * k <= n:
        while n % k == 0:
            out[k] = out.get(k, 0) + 1
            n //= k
        k += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def sqrt_of(fr):
    """sqrt(p/q) as {constant: coefficient} plus a rational part."""
    fr = Fraction(fr)
    if fr <= 0:
        raise BadParameter("sqrt argument must be positive: %s" % fr)
    # sqrt(p/q) = sqrt(p*q)/q
    n = fr.numerator * fr.denominator
    m, d = _squarefree_split(n)
    coeff = Fraction(m, fr.denominator)
    if d == 1:
        return coeff, {}
    return Fraction(0), {Constant("sqrt", d): coeff}


def log_of(fr):
    """log(p/q) for p/q > 1 as an integer combination of prime logs."""
    fr = Fraction(fr)
    if fr <= 1:
        raise BadParameter("log argument must exceed 1: %s" % fr)
    parts = {}
    for p, e in _prime_factors(fr.numerator).items():
        parts[Constant("logp", p)] = Fraction(e)
    for p, e in _prime_factors(fr.denominator).items():
        c = Constant("logp", p)
        parts[c] = parts.get(c, Fraction(0)) - e
    return Fraction(0), parts


def pi_times(fr):
    fr = Fraction(fr)
    return Fraction(0), {PI: fr}


def literal(digits, prec):
    if not re.fullmatch(r"\d+(\.\d+)?", digits):
        raise BadParameter("bad literal digits: %r" % digits)
    if prec < 1:
        raise BadParameter("literal precision must be >= 1")
    return Fraction(0), {Constant("lit", (digits, prec)): Fraction(1)}


_RAT = r"\d+(?:/\d+)?"
_TERM_RE = re.compile(
    r"""(?P<sign>[+-]?)\s*
        (?:(?P<mul>%(rat)s)\s*\*\s*)?
        (?P<body>
            (?P<rat>%(rat)s)
          | sqrt\((?P<sqrtarg>%(rat)s)\)
          | log\((?P<logarg>%(rat)s)\)
          | pi
          | lit:(?P<litdig>\d+(?:\.\d+)?):(?P<litprec>\d+)
        )
        (?:\s*/\s*(?P<den>\d+))?\s*
    """ % {"rat": _RAT},
    re.VERBOSE,
)


def parse_real(text):
    """Parse a sum-of-terms real expression.

    Returns (rational_part, {Constant: Fraction}).  Raises ParseError with a
    character position on malformed input.
    """
    s = text.strip()
    if not s:
        raise ParseError("empty value", 1, 1)
    rational = Fraction(0)
    parts = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or (not first and m.group("sign") == "" and s[pos] not in "+-"):
            raise ParseError("cannot parse value %r" % s, 1, pos + 1)
        if m.group("body") is None:
            raise ParseError("cannot parse value %r" % s, 1, pos + 1)
        sign = -1 if m.group("sign") == "-" else 1
        mul = Fraction(m.group("mul")) if m.group("mul") else Fraction(1)
        if m.group("den"):
            mul /= int(m.group("den"))
        mul *= sign
        if m.group("rat") is not None:
            r, p = Fraction(m.group("rat")), {}
        elif m.group("sqrtarg") is not None:
            r, p = sqrt_of(Fraction(m.group("sqrtarg")))
        elif m.group("logarg") is not None:
            r, p = log_of(Fraction(m.group("logarg")))
        elif m.group("litdig") is not None:
            r, p = literal(m.group("litdig"), int(m.group("litprec")))
        else:
            r, p = pi_times(1)
        rational += mul * r
        for c, q in p.items():
            parts[c] = parts.get(c, Fraction(0)) + mul * q
        pos = m.end()
        first = False
    parts = {c: q for c, q in parts.items() if q}
    return rational, parts
