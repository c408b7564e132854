"""Window-truncated series with nonnegative real exponents.

A series keeps every term whose exponent is at most the window bound
(inclusive), with exact coefficients: Python ints, Fractions, or first-order
:class:`Jet` values for moment extraction.  All operations are pure; a
series is immutable after construction.
"""

from fractions import Fraction

from .errors import NonzeroConstantTerm, NotContracting, WindowExceeded
from .exponents import GT, LT, ZERO, Exponent, compare, sort_exponents


def as_exponent(x):
    if isinstance(x, Exponent):
        return x
    if isinstance(x, (int, Fraction)):
        return Exponent.rat(x)
    if isinstance(x, str):
        return Exponent.parse(x)
    raise TypeError("cannot interpret %r as an exponent" % (x,))


class Jet:
    """First-order jet a + b*eps with eps**2 = 0.

    The eps part is an :class:`Exponent`-style exact real combination, so a
    marked expansion can carry weights like sqrt(2) exactly.
    """

    __slots__ = ("a", "b")

    def __init__(self, a, b=ZERO):
        self.a = a
        self.b = b if isinstance(b, Exponent) else Exponent.rat(b)

    def __add__(self, other):
        other = _as_jet(other)
        return Jet(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-_as_jet(other))

    def __rsub__(self, other):
        return _as_jet(other) + (-self)

    def __mul__(self, other):
        other = _as_jet(other)
        return Jet(self.a * other.a, self.b.scale(other.a) + other.b.scale(self.a))

    __rmul__ = __mul__

    def __eq__(self, other):
        other = _as_jet(other)
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a) or not self.b.is_zero

    def __repr__(self):
        return "Jet(%s, %s)" % (self.a, self.b.text())


def _as_jet(x):
    if isinstance(x, Jet):
        return x
    if isinstance(x, (int, Fraction)):
        return Jet(x)
    raise TypeError("cannot mix %r into a jet" % (x,))


class RibenboimSeries:
    """Truncated series: exponent -> nonzero coefficient, window inclusive."""

    __slots__ = ("window", "terms", "_val")

    def __init__(self, window, terms=None, _trusted=False):
        self.window = as_exponent(window)
        if terms is None:
            terms = {}
        if not _trusted:
            clean = {}
            for e, c in terms.items():
                e = as_exponent(e)
                if not c:
                    continue
                if compare(e, self.window) == GT:
                    continue
                clean[e] = c
            terms = clean
        self.terms = terms
        self._val = None

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(window):
        return RibenboimSeries(window, {}, _trusted=True)

    @staticmethod
    def one(window):
        return monomial(ZERO, 1, window)

    # -- inspection ------------------------------------------------------

    def __iter__(self):
        return iter(self.terms.items())

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return (isinstance(other, RibenboimSeries)
                and self.window == other.window and self.terms == other.terms)

    def coefficient(self, e):
        return self.terms.get(as_exponent(e), 0)

    def constant_term(self):
        return self.terms.get(ZERO, 0)

    def sorted_terms(self):
        return [(e, self.terms[e]) for e in sort_exponents(self.terms)]

    def support(self):
        return list(self.terms.keys())

    def valuation(self):
        """Least exponent with a nonzero coefficient (None for the zero
        series)."""
        if self._val is None:
            best = None
            for e in self.terms:
                if best is None or compare(e, best) == LT:
                    best = e
            self._val = best
        return self._val

    def __repr__(self):
        bits = ["%s*z^{%s}" % (c, e.text()) for e, c in self.sorted_terms()[:8]]
        if len(self.terms) > 8:
            bits.append("...")
        return "Series(window=%s: %s)" % (self.window.text(), " + ".join(bits) or "0")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for e, c in b.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return RibenboimSeries(self.window, out, _trusted=True)

    def __neg__(self):
        return RibenboimSeries(self.window, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        window = self.window
        out = {}
        admitted = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = e1 + e2
                ok = admitted.get(e)
                if ok is None:
                    ok = compare(e, window) != GT
                    admitted[e] = ok
                if not ok:
                    continue
                s = out.get(e, 0) + c1 * c2
                out[e] = s
        return RibenboimSeries(window, {e: c for e, c in out.items() if c}, _trusted=True)

    def _coerce(self, other):
        if isinstance(other, RibenboimSeries):
            if other.window != self.window:
                raise ValueError("window mismatch: %s vs %s"
                                 % (self.window.text(), other.window.text()))
            return other
        if isinstance(other, (int, Fraction, Jet)):
            return monomial(ZERO, other, self.window)
        raise TypeError("cannot combine series with %r" % (other,))

    __rmul__ = __mul__
    __radd__ = __add__

    def scale(self, k):
        if not k:
            return RibenboimSeries.zero(self.window)
        return RibenboimSeries(self.window,
                               {e: k * c for e, c in self.terms.items()}, _trusted=True)

    def shift(self, e0):
        """Multiply by z**e0 (single monomial), truncating at the window."""
        e0 = as_exponent(e0)
        out = {}
        for e, c in self.terms.items():
            e2 = e + e0
            if compare(e2, self.window) != GT:
                out[e2] = c
        return RibenboimSeries(self.window, out, _trusted=True)

    def truncate(self, window):
        window = as_exponent(window)
        out = {e: c for e, c in self.terms.items() if compare(e, window) != GT}
        return RibenboimSeries(window, out, _trusted=True)

    def map_coefficients(self, fn):
        out = {}
        for e, c in self.terms.items():
            c2 = fn(c)
            if c2:
                out[e] = c2
        return RibenboimSeries(self.window, out, _trusted=True)

    # -- coefficient extraction -------------------------------------------

    def cumulative(self, x):
        """Sum of coefficients with exponent <= x."""
        x = as_exponent(x)
        if compare(x, self.window) == GT:
            raise WindowExceeded("cut %s exceeds window %s" % (x.text(), self.window.text()))
        total = 0
        for e, c in self.terms.items():
            if compare(e, x) != GT:
                total = total + c
        return total

    def cumulative_strict(self, x):
        """Sum of coefficients with exponent < x."""
        x = as_exponent(x)
        if compare(x, self.window) == GT:
            raise WindowExceeded("cut %s exceeds window %s" % (x.text(), self.window.text()))
        total = 0
        for e, c in self.terms.items():
            if compare(e, x) == LT:
                total = total + c
        return total


def monomial(e, c, window):
    """Single-term series c*z**e, or the zero series past the window."""
    e = as_exponent(e)
    window = as_exponent(window)
    if not c or compare(e, window) == GT:
        return RibenboimSeries.zero(window)
    return RibenboimSeries(window, {e: c}, _trusted=True)


def quasi_inverse(g):
    """f with f*(1-g) = 1 within the window; g must have positive valuation.

    Iterates f <- 1 + g*f; each round fixes all terms up to one more
    multiple of the valuation, and the defining identity is re-checked
    exactly before returning.
    """
    if g.constant_term():
        raise NonzeroConstantTerm("sequence argument has a size-0 object")
    window = g.window
    f = RibenboimSeries.one(window)
    if not g.terms:
        return f
    max_rounds = _iteration_budget(g.valuation(), window)
    prev = None
    rounds = 0
    while f != prev:
        if rounds > max_rounds:
            raise NotContracting("quasi-inverse failed to stabilise")
        prev = f
        f = RibenboimSeries.one(window) + g * f
        rounds += 1
    check = f * (RibenboimSeries.one(window) - g) - RibenboimSeries.one(window)
    if check.terms:
        raise AssertionError("quasi-inverse identity failed inside the window")
    return f


def _iteration_budget(valuation, window):
    from .intervals import lower_fraction, upper_fraction
    lo = lower_fraction(valuation.enclosure(64))
    hi = upper_fraction(window.enclosure(64))
    if lo <= 0:
        raise NonzeroConstantTerm("valuation not strictly positive")
    return int(hi / lo) + 3


class FixpointEquation:
    """f = sum_k coeff_k(z) * f**k with series-valued coefficients."""

    def __init__(self, parts):
        # parts: {fpow: RibenboimSeries}
        self.parts = {k: s for k, s in parts.items() if s.terms}

    def window(self):
        for s in self.parts.values():
            return s.window
        raise ValueError("empty equation")

    def apply(self, f):
        window = f.window
        acc = RibenboimSeries.zero(window)
        fk = RibenboimSeries.one(window)
        for k in range(0, max(self.parts) + 1 if self.parts else 0):
            if k:
                fk = fk * f
            coeff = self.parts.get(k)
            if coeff is not None:
                acc = acc + coeff * fk
        return acc

    def contraction_valuation(self):
        """Structural check that substitution is a contraction.

        Every f-linear coefficient needs positive valuation; higher powers
        may have valuation zero only if the constant part itself has
        positive valuation (the solution then supplies the contraction).
        """
        const = self.parts.get(0)
        v0 = const.valuation() if const is not None else None
        v0_positive = v0 is not None and not v0.is_zero
        for k, coeff in self.parts.items():
            if k == 0:
                continue
            val = coeff.valuation()
            has_z = not val.is_zero
            if k == 1 and not has_z:
                raise NotContracting("an f-linear term has no z prefactor")
            if k >= 2 and not has_z and const is not None and not v0_positive:
                raise NotContracting(
                    "an f**%d term has no z prefactor and the constant part "
                    "has a size-0 object" % k)
        return True


def fixpoint_solve(equation, window=None):
    """Unique solution of f = Phi(z, f) within the window.

    Iterates from f0 = Phi(z, 0) until two successive iterates agree
    exactly, then re-checks the defining identity term by term.
    """
    if window is None:
        window = equation.window()
    window = as_exponent(window)
    eq = FixpointEquation({k: s.truncate(window) if s.window != window else s
                           for k, s in equation.parts.items()})
    eq.contraction_valuation()
    const = eq.parts.get(0)
    f = const if const is not None else RibenboimSeries.zero(window)
    f = f.truncate(window) if f.window != window else f
    prev = None
    rounds = 0
    # crude budget: the contraction gains at least the least positive step
    budget = None
    while f != prev:
        prev = f
        f = eq.apply(f)
        rounds += 1
        if budget is None:
            step = _least_positive_step(eq, f)
            budget = _iteration_budget(step, window) if step is not None else 64
        if rounds > budget + 2:
            raise NotContracting("fixpoint iteration failed to stabilise")
    if (eq.apply(f) - f).terms:
        raise AssertionError("fixpoint identity failed inside the window")
    return f


def _least_positive_step(eq, f0):
    """Lower bound witness for the contraction gain per iteration."""
    candidates = []
    v0 = f0.valuation() if f0.terms else None
    for k, coeff in eq.parts.items():
        if k == 0:
            continue
        val = coeff.valuation()
        step = val
        if k >= 2 and v0 is not None:
            step = val + v0.scale(k - 1)
        candidates.append(step)
    if not candidates:
        return None
    best = candidates[0]
    for c in candidates[1:]:
        if compare(c, best) == LT:
            best = c
    if best.is_zero:
        return None
    return best


def derivative_weighted(f):
    """Map sum c*z^e to sum (e*c)*z^e; coefficients become exact real
    combinations carrying the exponent weights."""
    out = {}
    for e, c in f.terms.items():
        w = e.scale(c) if isinstance(c, (int, Fraction)) else None
        if w is None:
            raise TypeError("weighted derivative needs scalar coefficients")
        if not w.is_zero:
            out[e] = w
    return RibenboimSeries(f.window, out, _trusted=True)


def evaluate_at(f, z_iv, bits=64):
    """Certified interval evaluation of a finite series at 0 < z < 1.

    Coefficients may be ints, Fractions, or Exponent combinations (as
    produced by :func:`derivative_weighted`).
    """
    from mpmath import iv

    from .intervals import iv_from_fraction, iv_pow, working_precision
    with working_precision(bits):
        total = iv.mpf(0)
        logz = iv.log(z_iv)
        for e, c in f.terms.items():
            ze = iv.exp(e.enclosure(bits) * logz)
            if isinstance(c, Exponent):
                cv = c.enclosure(bits)
            elif isinstance(c, Fraction):
                cv = iv_from_fraction(c)
            else:
                cv = iv.mpf(c)
            total += cv * ze
        return total


# -- serialization ----------------------------------------------------------

FORMAT_HEADER = "ribenboim-series 1"


def _coord_text(basis, e):
    return ",".join(str(q) for q in basis.coords(e))


def _coord_parse(basis, s):
    return basis.from_coords([Fraction(q) for q in s.split(",")])


def dump_series(f):
    """Line-oriented text serialization with a bit-exact round trip."""
    from .exponents import Basis
    exps = list(f.terms.keys()) + [f.window]
    for c in f.terms.values():
        if isinstance(c, Jet):
            exps.append(c.b)
    basis = Basis.spanning(exps)
    lines = [FORMAT_HEADER,
             "basis\t" + "\t".join(basis.descriptors()),
             "window\t" + _coord_text(basis, f.window)]
    for e, c in f.sorted_terms():
        coeff = c
        if isinstance(c, Jet):
            coeff = "jet:%s;%s" % (c.a, _coord_text(basis, c.b))
        lines.append("%s\t%s" % (_coord_text(basis, e), coeff))
    return "\n".join(lines) + "\n"


def load_series(text):
    from .exponents import Basis
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != FORMAT_HEADER:
        raise ValueError("not a serialized series")
    basis_fields = lines[1].split("\t")
    if basis_fields[0] != "basis" or basis_fields[1] != "1":
        raise ValueError("malformed basis header")
    consts = []
    for d in basis_fields[2:]:
        e = Exponent.parse(d)
        if len(e.parts) != 1 or e.rational or e.parts[0][1] != 1:
            raise ValueError("bad basis descriptor %r" % d)
        consts.append(e.parts[0][0])
    basis = Basis(consts)
    wtag, wcoords = lines[2].split("\t")
    if wtag != "window":
        raise ValueError("missing window line")
    window = _coord_parse(basis, wcoords)
    terms = {}
    for ln in lines[3:]:
        coord, coeff = ln.split("\t")
        if coeff.startswith("jet:"):
            a, b = coeff[4:].split(";")
            val = Jet(Fraction(a), _coord_parse(basis, b))
        else:
            val = Fraction(coeff) if "/" in coeff else int(coeff)
        terms[_coord_parse(basis, coord)] = val
    return RibenboimSeries(window, terms, _trusted=True)
