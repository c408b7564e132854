"""Evaluable singular forms with certified enclosures.

The asymptotics layer works with two shapes:

* ``PoleForm``: f(z) = N(z) / (1 - E(z))**m with E a positive combination
  of powers of z (finite terms plus optional infinite families evaluated
  with certified tail bounds).
* ``SqrtForm``: f(z) = (P(z) + R(z) * sqrt(D(z))) / Q(z) with the dominant
  singularity at the least positive root of D.

Numerators and co-factors are small expression trees evaluated in interval
arithmetic.  Infinite families raise their truncation point until the tail
bound is below a quarter of the requested tolerance.
"""

from fractions import Fraction

from mpmath import iv

from .errors import NoSignChange, TailBoundFailure
from .exponents import Exponent, compare, GT
from .intervals import (
    certainly_below,
    certainly_negative,
    certainly_positive,
    iv_from_fraction,
    lower_fraction,
    upper_fraction,
    working_precision,
)
from .series import as_exponent


def _zpow(z, e, bits):
    """z**e for an Exponent e, z an interval inside (0, 1)."""
    if e.is_zero:
        return iv.mpf(1)
    if e.is_rational and e.rational.denominator == 1 and 0 < e.rational < 64:
        return z ** int(e.rational)
    return iv.exp(e.enclosure(bits) * iv.log(z))


# -- geometric helper sums ---------------------------------------------------

def _geo_totals(w, j):
    # sum_{k>=0} k^j w^k for j = 0..3
    one = iv.mpf(1)
    if j == 0:
        return one / (one - w)
    if j == 1:
        return w / (one - w) ** 2
    if j == 2:
        return w * (one + w) / (one - w) ** 3
    return w * (one + 4 * w + w * w) / (one - w) ** 4


def geo_tail(w, m, j):
    """Enclosure of sum_{k>=m} k^j w^k via total minus finite prefix."""
    total = _geo_totals(w, j)
    prefix = iv.mpf(0)
    wk = iv.mpf(1)
    for k in range(m):
        prefix += (k ** j) * wk  # 0**0 == 1
        wk *= w
    t = total - prefix
    # the true tail is nonnegative
    lo, hi = t._mpi_
    zero = iv.mpf(0)._mpi_[0]
    from mpmath import libmp
    if libmp.mpf_lt(lo, zero):
        lo = zero
    return iv.make_mpf((lo, hi))


# -- infinite families --------------------------------------------------------


class ZetaLogTail:
    """sum_{k>=2} z^{log k} = zeta(s) - 1 with s = log(1/z)."""

    name = "log-integers"
    irrational = True
    min_terms = 16

    def partial(self, z, K, bits):
        s = -iv.log(z)
        total = iv.mpf(0)
        for k in range(2, K + 1):
            total += iv.exp(-s * iv.log(iv.mpf(k)))
        return total

    def partial_weighted(self, z, K, bits):
        s = -iv.log(z)
        total = iv.mpf(0)
        for k in range(2, K + 1):
            lk = iv.log(iv.mpf(k))
            total += lk * iv.exp(-s * lk)
        return total

    def tail(self, z, K, bits):
        # integral test: sum_{k>K} k^{-s} in [I(K+1), I(K+1) + (K+1)^{-s}]
        s = -iv.log(z)
        if not certainly_positive(s - 1):
            raise TailBoundFailure("abscissa at or below 1; tail diverges")
        m = iv.mpf(K + 1)
        integral = iv.exp((1 - s) * iv.log(m)) / (s - 1)
        first = iv.exp(-s * iv.log(m))
        lo = integral._mpi_[0]
        hi = (integral + first)._mpi_[1]
        return iv.make_mpf((lo, hi))

    def tail_weighted(self, z, K, bits):
        # sum_{k>K} log(k) k^{-s}; integrand decreasing for k >= 8 when s>1
        s = -iv.log(z)
        if not certainly_positive(s - 1):
            raise TailBoundFailure("abscissa at or below 1; tail diverges")
        if K < 8:
            raise TailBoundFailure("need K >= 8 for the log-weighted tail")
        m = iv.mpf(K + 1)
        logm = iv.log(m)
        integral = iv.exp((1 - s) * logm) * (logm / (s - 1) + 1 / (s - 1) ** 2)
        first = logm * iv.exp(-s * logm)
        lo = integral._mpi_[0]
        hi = (integral + first)._mpi_[1]
        return iv.make_mpf((lo, hi))

    def sample_exponents(self, n=4):
        return [Exponent.parse("log(%d)" % k) for k in range(2, 2 + n)]


class HalfPowerTail:
    """sum_{k>=0} z^{k + 2^-k}."""

    name = "k-plus-half-powers"
    irrational = True
    min_terms = 8

    def _exp(self, k):
        return Exponent.rat(k + Fraction(1, 2 ** k))

    def partial(self, z, K, bits):
        total = iv.mpf(0)
        for k in range(0, K + 1):
            total += _zpow(z, self._exp(k), bits)
        return total

    def partial_weighted(self, z, K, bits):
        total = iv.mpf(0)
        for k in range(0, K + 1):
            e = self._exp(k)
            total += iv_from_fraction(e.rational) * _zpow(z, e, bits)
        return total

    def tail(self, z, K, bits):
        # z^{k+2^-k} <= z^k
        return iv.make_mpf((iv.mpf(0)._mpi_[0], geo_tail(z, K + 1, 0)._mpi_[1]))

    def tail_weighted(self, z, K, bits):
        # (k + 2^-k) z^{k+2^-k} <= (k+1) z^k
        b = geo_tail(z, K + 1, 1) + geo_tail(z, K + 1, 0)
        return iv.make_mpf((iv.mpf(0)._mpi_[0], b._mpi_[1]))

    def sample_exponents(self, n=4):
        return [self._exp(k) for k in range(n)]


class TallPairTail:
    """sum_{k>=1} z^{2 sqrt(1+k^2)}."""

    name = "tall-step-pairs"
    irrational = True
    min_terms = 8

    def _exp(self, k):
        return Exponent.parse("2*sqrt(%d)" % (1 + k * k))

    def partial(self, z, K, bits):
        total = iv.mpf(0)
        for k in range(1, K + 1):
            total += _zpow(z, self._exp(k), bits)
        return total

    def partial_weighted(self, z, K, bits):
        total = iv.mpf(0)
        for k in range(1, K + 1):
            e = self._exp(k)
            total += e.enclosure(bits) * _zpow(z, e, bits)
        return total

    def tail(self, z, K, bits):
        # 2 sqrt(1+k^2) >= 2k, so z^{2 sqrt(1+k^2)} <= (z^2)^k
        w = z * z
        return iv.make_mpf((iv.mpf(0)._mpi_[0], geo_tail(w, K + 1, 0)._mpi_[1]))

    def tail_weighted(self, z, K, bits):
        # 2 sqrt(1+k^2) <= 2(1+k)
        w = z * z
        b = 2 * (geo_tail(w, K + 1, 1) + geo_tail(w, K + 1, 0))
        return iv.make_mpf((iv.mpf(0)._mpi_[0], b._mpi_[1]))

    def sample_exponents(self, n=4):
        return [self._exp(k) for k in range(1, n + 1)]


class GridPairTail:
    """sum_{k>=1} t_k(z)^2 with t_k = sum_{h>=1} z^{sqrt(h^2+k^2)}.

    Inner sums are truncated with geometric tails (sqrt(h^2+k^2) >= max(h,k));
    the outer tail uses t_k <= k z^k + z^{k+1}/(1-z) expanded into polynomial
    coefficients against (z^2)^k.
    """

    name = "grid-step-pairs"
    irrational = True
    min_terms = 8

    def _t_k(self, z, k, K, bits, weighted):
        total = iv.mpf(0)
        for h in range(1, K + 1):
            e = Exponent.parse("sqrt(%d)" % (h * h + k * k))
            term = _zpow(z, e, bits)
            if weighted:
                term = e.enclosure(bits) * term
            total += term
        # tail over h > K: z^{sqrt(h^2+k^2)} <= z^h; weight sqrt(h^2+k^2) <= h+k
        if weighted:
            tail_hi = (geo_tail(z, K + 1, 1) + k * geo_tail(z, K + 1, 0))._mpi_[1]
        else:
            tail_hi = geo_tail(z, K + 1, 0)._mpi_[1]
        tail = iv.make_mpf((iv.mpf(0)._mpi_[0], tail_hi))
        return total + tail

    def partial(self, z, K, bits):
        total = iv.mpf(0)
        for k in range(1, K + 1):
            total += self._t_k(z, k, K, bits, weighted=False) ** 2
        return total

    def partial_weighted(self, z, K, bits):
        # weight of a pair term z^{a+b} is (a+b): sum = 2 * t_k * u_k
        total = iv.mpf(0)
        for k in range(1, K + 1):
            t = self._t_k(z, k, K, bits, weighted=False)
            u = self._t_k(z, k, K, bits, weighted=True)
            total += 2 * t * u
        return total

    def _poly_tail(self, z, K, coeffs):
        # sum_{k>K} poly(k) * (z^2)^k for poly given by interval coefficients
        w = z * z
        total = iv.mpf(0)
        for j, c in enumerate(coeffs):
            total += c * geo_tail(w, K + 1, j)
        return iv.make_mpf((iv.mpf(0)._mpi_[0], total._mpi_[1]))

    def tail(self, z, K, bits):
        # t_k <= (k + r) z^k with r = z/(1-z); t_k^2 <= (k^2 + 2rk + r^2)(z^2)^k
        r = z / (1 - z)
        return self._poly_tail(z, K, [r * r, 2 * r, iv.mpf(1)])

    def tail_weighted(self, z, K, bits):
        # u_k <= z^k * B(k), B of degree 2; 2 u_k t_k <= 2 A(k) B(k) (z^2)^k
        one = iv.mpf(1)
        r = z / (1 - z)
        # A(k) = k + r
        # B(k): sum_{h<=k}(h+k) z^{k} part gives (3k^2+k)/2; h>k gives
        #        z*( (k+1) - k z )/(1-z)^2 + k z/(1-z), all times z^k
        b0 = z / (1 - z) ** 2
        b1 = z / (1 - z) ** 2 + z / (1 - z) + iv_from_fraction(Fraction(1, 2))
        b2 = iv_from_fraction(Fraction(3, 2))
        # product A*B -> degree 3
        a0, a1 = r, one
        c0 = a0 * b0
        c1 = a0 * b1 + a1 * b0
        c2 = a0 * b2 + a1 * b1
        c3 = a1 * b2
        return self._poly_tail(z, K, [2 * c0, 2 * c1, 2 * c2, 2 * c3])

    def sample_exponents(self, n=4):
        return [Exponent.parse("sqrt(%d)" % (1 + k * k)) for k in range(1, n + 1)]


class GeometricRayTail:
    """sum_{k>=0} z^{start + k*step}: exact closed form z^start/(1-z^step)."""

    min_terms = 1

    def __init__(self, start, step):
        self.start = as_exponent(start)
        self.step = as_exponent(step)
        self.name = "ray(%s;%s)" % (self.start.text(), self.step.text())
        self.irrational = None

    def partial(self, z, K, bits):
        return _zpow(z, self.start, bits) / (1 - _zpow(z, self.step, bits))

    def partial_weighted(self, z, K, bits):
        zs = _zpow(z, self.start, bits)
        zt = _zpow(z, self.step, bits)
        s = self.start.enclosure(bits)
        t = self.step.enclosure(bits)
        # sum (start + k step) z^{start+k step}
        return zs * (s / (1 - zt) + t * zt / (1 - zt) ** 2)

    def tail(self, z, K, bits):
        return iv.mpf(0)

    def tail_weighted(self, z, K, bits):
        return iv.mpf(0)

    def sample_exponents(self, n=4):
        return [self.start + self.step.scale(k) for k in range(n)]


class TermSum:
    """c_0 + sum c_i z^{gamma_i} (+ families), exponents nonnegative."""

    def __init__(self, terms=(), families=()):
        self.terms = [(as_exponent(e), Fraction(c)) for e, c in terms]
        self.families = list(families)

    @staticmethod
    def from_series(f):
        return TermSum([(e, Fraction(c)) for e, c in f.terms.items()])

    def exponents(self):
        out = [e for e, _ in self.terms]
        for fam in self.families:
            out.extend(fam.sample_exponents())
        return out

    def positive_coefficients(self):
        return all(c > 0 for _, c in self.terms)

    def eval(self, z, K, bits):
        total = iv.mpf(0)
        for e, c in self.terms:
            total += iv_from_fraction(c) * _zpow(z, e, bits)
        for fam in self.families:
            kk = max(K, fam.min_terms)
            total += fam.partial(z, kk, bits) + fam.tail(z, kk, bits)
        return total

    def eval_weighted(self, z, K, bits):
        """sum c * gamma * z^gamma (the H-sum of the asymptotic constant)."""
        total = iv.mpf(0)
        for e, c in self.terms:
            total += iv_from_fraction(c) * e.enclosure(bits) * _zpow(z, e, bits)
        for fam in self.families:
            kk = max(K, fam.min_terms)
            total += fam.partial_weighted(z, kk, bits) + fam.tail_weighted(z, kk, bits)
        return total

    def eval_derivative(self, z, K, bits):
        """d/dz of the sum: eval_weighted / z."""
        return self.eval_weighted(z, K, bits) / z

    def partial_lower(self, z, K, bits):
        """Certified lower bound ignoring tails (useful where a divergent
        tail prevents a full enclosure)."""
        total = iv.mpf(0)
        for e, c in self.terms:
            total += iv_from_fraction(c) * _zpow(z, e, bits)
        for fam in self.families:
            kk = max(K, fam.min_terms)
            total += fam.partial(z, kk, bits)
        return iv.make_mpf((total._mpi_[0], total._mpi_[0]))

    def __repr__(self):
        bits = ["%s*z^{%s}" % (c, e.text()) for e, c in self.terms[:6]]
        bits += [f.name for f in self.families]
        return "TermSum(%s)" % " + ".join(bits)


# -- expression trees for numerators ------------------------------------------


class Expr:
    def eval(self, z, K, bits):
        raise NotImplementedError


class Const(Expr):
    def __init__(self, v):
        self.v = Fraction(v)

    def eval(self, z, K, bits):
        return iv_from_fraction(self.v)


class Terms(Expr):
    def __init__(self, termsum):
        self.t = termsum if isinstance(termsum, TermSum) else TermSum(termsum)

    def eval(self, z, K, bits):
        return self.t.eval(z, K, bits)


class Sum(Expr):
    def __init__(self, *parts):
        self.parts = parts

    def eval(self, z, K, bits):
        total = iv.mpf(0)
        for p in self.parts:
            total += p.eval(z, K, bits)
        return total


class Prod(Expr):
    def __init__(self, *parts):
        self.parts = parts

    def eval(self, z, K, bits):
        total = iv.mpf(1)
        for p in self.parts:
            total *= p.eval(z, K, bits)
        return total


class Neg(Expr):
    def __init__(self, part):
        self.part = part

    def eval(self, z, K, bits):
        return -self.part.eval(z, K, bits)


class Recip(Expr):
    def __init__(self, part):
        self.part = part

    def eval(self, z, K, bits):
        return 1 / self.part.eval(z, K, bits)


class Sqrt(Expr):
    """sqrt of a quantity known to be nonnegative on the evaluation domain;
    the enclosure is clamped at zero before the root."""

    def __init__(self, part):
        self.part = part

    def eval(self, z, K, bits):
        v = self.part.eval(z, K, bits)
        lo, hi = v._mpi_
        from mpmath import libmp
        if libmp.mpf_lt(hi, libmp.fzero):
            raise ValueError("sqrt of a certainly negative quantity")
        if libmp.mpf_lt(lo, libmp.fzero):
            v = iv.make_mpf((libmp.fzero, hi))
        return iv.sqrt(v)


ONE = Const(1)


# -- the two analyzable shapes -------------------------------------------------


class PoleForm:
    """f = N(z) / (1 - E(z))**multiplicity."""

    def __init__(self, equation, multiplicity=1, numerator=ONE):
        self.equation = equation
        self.multiplicity = multiplicity
        self.numerator = numerator

    def root_function(self, z, K, bits):
        return 1 - self.equation.eval(z, K, bits)

    def certainly_past_root(self, z, K, bits):
        """True when E(z) > 1 certainly, using partial sums only (sound even
        where the family tail diverges)."""
        try:
            return certainly_negative(self.root_function(z, K, bits))
        except TailBoundFailure:
            lower = self.equation.partial_lower(z, K, bits)
            return certainly_positive(lower - 1)


class SqrtForm:
    """f = (P + R*sqrt(D)) / Q, singular at the least positive root of D."""

    def __init__(self, discriminant, P=ONE, R=Const(-1), Q=ONE):
        self.discriminant = discriminant
        self.P = P
        self.R = R
        self.Q = Q

    def root_function(self, z, K, bits):
        return self.discriminant.eval(z, K, bits)

    def certainly_past_root(self, z, K, bits):
        return certainly_negative(self.root_function(z, K, bits))
