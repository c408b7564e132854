"""Combinatorial class expressions and their exact expansion.

A :class:`ClassExpr` is a small AST (atoms, unions, products, sequences,
marked subclasses, algebraic fixpoints, infinite tile families) that
expands to a window-truncated counting series.  Infinite families
materialise lazily: a generator yields tile sizes in increasing order until
the first one beyond the window.
"""

from fractions import Fraction

from .errors import BadParameter, UnknownMarker, ValuationZero, XTooSmall
from .exponents import GT, LT, ZERO, Exponent, compare, sort_exponents
from .series import (
    FixpointEquation,
    Jet,
    RibenboimSeries,
    as_exponent,
    fixpoint_solve,
    monomial,
    quasi_inverse,
)


class ClassExpr:
    def expand(self, window):
        """Exact counting series of the class up to the window."""
        window = as_exponent(window)
        return self._expand(window, marker=None)

    def marked_expand(self, marker, window):
        """Pair (f, f_u): counts and first-moment series for a marker.

        f_u carries the eps parts of a jet expansion: the coefficient at
        each exponent is the total marker weight over objects of that size,
        stored exactly as a real combination.
        """
        if not self._has_marker(marker):
            raise UnknownMarker("marker %r does not occur in the class" % marker)
        window = as_exponent(window)
        jf = self._expand(window, marker=marker)
        f = jf.map_coefficients(lambda c: c.a if isinstance(c, Jet) else c)
        fu = jf.map_coefficients(
            lambda c: None if not isinstance(c, Jet) or c.b.is_zero else c.b)
        return f, fu

    def _has_marker(self, marker):
        return any(ch._has_marker(marker) for ch in self._children())

    def _children(self):
        return ()

    def _expand(self, window, marker):
        raise NotImplementedError


class Epsilon(ClassExpr):
    def _expand(self, window, marker):
        return RibenboimSeries.one(window)

    def __repr__(self):
        return "epsilon"


class Atom(ClassExpr):
    def __init__(self, size):
        size = as_exponent(size)
        if not size.is_nonnegative():
            raise BadParameter("atom size must be nonnegative: %s" % size.text())
        self.size = size

    def _expand(self, window, marker):
        return monomial(self.size, 1, window)

    def __repr__(self):
        return "atom(%s)" % self.size.text()


class Union(ClassExpr):
    def __init__(self, *parts):
        self.parts = [p for q in parts for p in (q.parts if isinstance(q, Union) else [q])]

    def _children(self):
        return self.parts

    def _expand(self, window, marker):
        acc = RibenboimSeries.zero(window)
        for p in self.parts:
            acc = acc + p._expand(window, marker)
        return acc

    def __repr__(self):
        return "union(%s)" % ", ".join(map(repr, self.parts))


class Product(ClassExpr):
    def __init__(self, *parts):
        self.parts = [p for q in parts for p in (q.parts if isinstance(q, Product) else [q])]

    def _children(self):
        return self.parts

    def _expand(self, window, marker):
        acc = RibenboimSeries.one(window)
        for p in self.parts:
            acc = acc * p._expand(window, marker)
        return acc

    def __repr__(self):
        return "product(%s)" % ", ".join(map(repr, self.parts))


class Seq(ClassExpr):
    """Sequences (possibly empty) of objects from a class with no size-0
    object."""

    def __init__(self, part):
        self.part = part

    def _children(self):
        return (self.part,)

    def _expand(self, window, marker):
        g = self.part._expand(window, marker)
        if g.constant_term():
            raise ValuationZero("sequence of a class containing a size-0 object")
        return quasi_inverse(g)

    def __repr__(self):
        return "seq(%s)" % repr(self.part)


class Marked(ClassExpr):
    """Mark every object of the subclass with an additive weight.

    Weights multiply counts, they do not exponentiate: each object
    contributes weight * count to the eps part, i.e. the u-derivative at
    u = 1 of u**weight marking.
    """

    def __init__(self, part, marker, weight):
        self.part = part
        self.marker = marker
        self.weight = as_exponent(weight)

    def _children(self):
        return (self.part,)

    def _has_marker(self, marker):
        return marker == self.marker or self.part._has_marker(marker)

    def _expand(self, window, marker):
        f = self.part._expand(window, marker)
        if marker != self.marker:
            return f
        w = self.weight

        def lift(c):
            if isinstance(c, Jet):
                return Jet(c.a, c.b + w.scale(c.a))
            return Jet(c, w.scale(c))

        return f.map_coefficients(lift)

    def __repr__(self):
        return "mark(%s, %s, %s)" % (self.marker, self.weight.text(), repr(self.part))


class Fixpoint(ClassExpr):
    """f = sum of coeff(z-class) * f**power, solved per window.

    Rational operands like f/(1-f) must be cleared to this polynomial form
    by the caller; coefficients are themselves class expressions so that
    infinite families can appear (e.g. matched-step generators).
    """

    def __init__(self, terms):
        # terms: list of (scalar, ClassExpr coefficient, f-power)
        self.terms = [(Fraction(c) if not isinstance(c, int) else c, expr, k)
                      for c, expr, k in terms]

    def _children(self):
        return tuple(expr for _, expr, _ in self.terms)

    def _expand(self, window, marker):
        parts = {}
        for c, expr, k in self.terms:
            s = expr._expand(window, marker).scale(c)
            parts[k] = parts[k] + s if k in parts else s
        return fixpoint_solve(FixpointEquation(parts), window)

    def __repr__(self):
        return "fixpoint(%s)" % ", ".join(
            "%s*(%r)*f^%d" % (c, e, k) for c, e, k in self.terms)


class Family(ClassExpr):
    """A built-in infinite tile family, materialised up to the window."""

    def __init__(self, generator):
        self.generator = generator

    def _expand(self, window, marker):
        terms = {}
        for e in self.generator.sizes_upto(window):
            terms[e] = terms.get(e, 0) + 1
        return RibenboimSeries(window, terms, _trusted=True)

    def __repr__(self):
        return "family(%s)" % self.generator.name


class PairFamily(ClassExpr):
    """Matched ascent/descent pairs: for each height k the product of the
    up-step sizes and down-step sizes at that height."""

    def __init__(self, generator):
        self.generator = generator

    def _expand(self, window, marker):
        acc = RibenboimSeries.zero(window)
        for up_sizes, down_sizes in self.generator.pairs_upto(window):
            up = RibenboimSeries(window, {e: 1 for e in up_sizes}, _trusted=False)
            down = RibenboimSeries(window, {e: 1 for e in down_sizes}, _trusted=False)
            acc = acc + up * down
        return acc

    def __repr__(self):
        return "pair-family(%s)" % self.generator.name


# -- infinite tile generators ------------------------------------------------


class LogIntegers:
    """Tile lengths log k for k >= 2 (sizes of ordered-factorization parts)."""

    name = "log-integers"
    irrational = True  # log 2 / log 3 is irrational

    def sizes_upto(self, window):
        k = 2
        while True:
            e = Exponent.parse("log(%d)" % k)
            if compare(e, window) == GT:
                return
            yield e
            k += 1


class KPlusHalfPowers:
    """Rational tile lengths k + 2**-k, k >= 0: unbounded denominators make
    the set irrational even though every length is rational."""

    name = "k-plus-half-powers"
    irrational = True

    def sizes_upto(self, window):
        k = 0
        while True:
            e = Exponent.rat(k + Fraction(1, 2 ** k))
            if compare(e, window) == GT:
                return
            yield e
            k += 1


class TallStepPairs:
    """Matched pairs (1, k)/(1, -k): each pair contributes 2*sqrt(1+k*k)."""

    name = "tall-step-pairs"
    irrational = True

    def sizes_upto(self, window):
        k = 1
        while True:
            e = Exponent.parse("2*sqrt(%d)" % (1 + k * k))
            if compare(e, window) == GT:
                return
            yield e
            k += 1

    def pairs_upto(self, window):
        k = 1
        while True:
            e = Exponent.parse("sqrt(%d)" % (1 + k * k))
            if compare(e.scale(2), window) == GT:
                return
            yield [e], [e]
            k += 1


class GridStepPairs:
    """Matched pairs over the full integer step set: up-steps (h, k) and
    down-steps (j, -k) for h, j, k >= 1."""

    name = "grid-step-pairs"
    irrational = True

    def pairs_upto(self, window):
        k = 1
        while True:
            least = Exponent.parse("sqrt(%d)" % (1 + k * k))
            if compare(least.scale(2), window) == GT:
                return
            sizes = []
            h = 1
            while True:
                e = Exponent.parse("sqrt(%d)" % (h * h + k * k))
                if compare(e + least, window) == GT:
                    break
                sizes.append(e)
                h += 1
            yield sizes, sizes
            k += 1


class ExplicitTiles:
    name = "explicit"

    def __init__(self, sizes):
        self.tiles = [as_exponent(s) for s in sizes]
        self.irrational = None  # decided by rationality()

    def sizes_upto(self, window):
        for e in self.tiles:
            if compare(e, window) != GT:
                yield e


FAMILIES = {
    LogIntegers.name: LogIntegers,
    KPlusHalfPowers.name: KPlusHalfPowers,
    TallStepPairs.name: TallStepPairs,
}


# -- counting helpers ---------------------------------------------------------


def count_upto(expr, x):
    """Number of objects of size at most x."""
    x = as_exponent(x)
    if not x.is_nonnegative():
        raise BadParameter("cut must be nonnegative")
    return expr.expand(x).cumulative(x)


def count_below(expr, x):
    x = as_exponent(x)
    if not x.is_nonnegative():
        raise BadParameter("cut must be nonnegative")
    return expr.expand(x).cumulative_strict(x)


def count_at(expr, x):
    """Number of objects of size exactly x."""
    x = as_exponent(x)
    f = expr.expand(x)
    return f.cumulative(x) - f.cumulative_strict(x)


def partial_tile_counts(tiles, x):
    """Exact counts for the three partial-tile variants over a finite tile
    set: final-partial-tile tilings (indistinguishable tiles), their
    coloured variant, and maximal packings.

    The coloured count uses strict cumulatives so that the exact identity
    |V_x| = (k-1)|T_{<x}| + 1 holds for every x, including exact object
    sizes (the non-strict difference formula double-counts complete
    tilings).
    """
    tiles = sort_exponents([as_exponent(t) for t in tiles])
    if not tiles:
        raise BadParameter("empty tile set")
    x = as_exponent(x)
    if compare(x, tiles[-1]) == LT:
        raise XTooSmall("cut %s is below the largest tile %s"
                        % (x.text(), tiles[-1].text()))
    expr = Seq(Union(*[Atom(t) for t in tiles]))
    f = expr.expand(x)
    k = len(tiles)

    def upto(cut):
        if not cut.is_nonnegative():
            return 0
        return f.cumulative(cut)

    def below(cut):
        if not cut.is_nonnegative():
            return 0
        return f.cumulative_strict(cut)

    u = upto(x) - upto(x - tiles[-1])
    v = k * below(x) - sum(below(x - t) for t in tiles)
    p = upto(x) - upto(x - tiles[0])
    return {"U": u, "V": v, "P": p}
