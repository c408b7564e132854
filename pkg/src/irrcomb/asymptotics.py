"""Singularity analysis: dominant root location, the first-order counting
law, primitivity verdicts, lattice-class laws, expectations, oscillation
profiles, and zeta-equation machinery.

Everything numeric is certified interval arithmetic; results are returned
as enclosures, never rounded floats.
"""

from fractions import Fraction

from mpmath import iv

from .errors import (
    DegeneratePhase,
    DegenerateSingularity,
    NoSignChange,
    TailTooFat,
    TieUnresolved,
    UnsupportedAlpha,
)
from .exponents import EQ, GT, LT, Exponent, compare, rationality
from .exponents import Irrational as IrrationalSet
from .exponents import Rational as RationalSet
from .exponents import ShiftedRational as ShiftedSet
from .forms import PoleForm, SqrtForm, TermSum
from .intervals import (
    certainly_below,
    certainly_negative,
    certainly_positive,
    floor_certain,
    iv_from_fraction,
    lower_fraction,
    upper_fraction,
    width_fraction,
    working_precision,
)
from .series import as_exponent

# -- gamma at integers and half-integers --------------------------------------


def gamma_eval(alpha, bits=128):
    """Gamma at an integer or half-integer (not a nonpositive integer),
    via the recurrence from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi)."""
    alpha = Fraction(alpha)
    if alpha.denominator == 1:
        n = alpha.numerator
        if n <= 0:
            raise UnsupportedAlpha("gamma pole at %s" % alpha)
        with working_precision(bits):
            acc = iv.mpf(1)
            for k in range(1, n):
                acc *= k
            return acc
    if alpha.denominator != 2:
        raise UnsupportedAlpha("alpha %s is not an integer or half-integer" % alpha)
    with working_precision(bits):
        acc = iv.sqrt(+iv.pi)
        a = Fraction(1, 2)
        while a < alpha:
            acc *= iv_from_fraction(a)
            a += 1
        while a > alpha:
            a -= 1
            acc /= iv_from_fraction(a)
        return acc


# -- root finding --------------------------------------------------------------


class _Eval:
    """Escalating evaluation context: precision and family truncation grow
    together until signs resolve."""

    def __init__(self, bits=64, K=24, max_bits=4096, max_K=4096):
        self.bits = bits
        self.K = K
        self.max_bits = max_bits
        self.max_K = max_K

    def escalate(self):
        if self.bits >= self.max_bits and self.K >= self.max_K:
            return False
        self.bits = min(self.bits * 2, self.max_bits)
        self.K = min(self.K * 2, self.max_K)
        return True


def _sign_at(form, z_fr, ctx):
    """Certified sign of the root function at an exact rational point, or
    None when it cannot be resolved at the current settings."""
    from .errors import TailBoundFailure
    with working_precision(ctx.bits):
        z = iv_from_fraction(z_fr)
        try:
            val = form.root_function(z, ctx.K, ctx.bits)
        except TailBoundFailure:
            if form.certainly_past_root(z, ctx.K, ctx.bits):
                return -1
            return None
        if certainly_positive(val):
            return 1
        if certainly_negative(val):
            return -1
    return None


def find_rho(form, tolerance=Fraction(1, 10 ** 8), probes=64):
    """Interval of width <= tolerance around the least positive root of the
    form's root function, by bisection with certified signs.

    The function is probed left to right on a uniform grid to find the
    first sign change; NoSignChange if every probe stays positive.
    """
    tolerance = Fraction(tolerance)
    ctx = _Eval()
    lo = hi = None
    for j in range(1, probes):
        z = Fraction(j, probes)
        s = _sign_at(form, z, ctx)
        while s is None:
            if not ctx.escalate():
                raise TieUnresolved("sign at z=%s undecided" % z)
            s = _sign_at(form, z, ctx)
        if s < 0:
            lo, hi = Fraction(j - 1, probes), z
            break
    if lo is None:
        raise NoSignChange("no sign change on (0, 1): no dominant root below 1")
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        s = _sign_at(form, mid, ctx)
        while s is None:
            if not ctx.escalate():
                # settle for the bracketing interval we have
                if hi - lo <= tolerance:
                    break
                raise TieUnresolved("midpoint sign undecided at %s" % mid)
            s = _sign_at(form, mid, ctx)
        if s is None:
            break
        if s > 0:
            lo = mid
        else:
            hi = mid
    with working_precision(max(ctx.bits, 128)):
        return iv.make_mpf((iv_from_fraction(lo)._mpi_[0],
                            iv_from_fraction(hi)._mpi_[1]))


class SingularityModel:
    """rho, alpha, h(rho) and the first-order constant
    C = h(rho) / (log(1/rho) * Gamma(alpha)) of the counting law
    C * rho**-x * x**(alpha-1)."""

    def __init__(self, rho, alpha, h_rho, C, growth):
        self.rho = rho
        self.alpha = Fraction(alpha)
        self.h_rho = h_rho
        self.C = C
        self.growth = growth

    def __repr__(self):
        return ("SingularityModel(rho=%s, alpha=%s, C=%s)"
                % (self.rho, self.alpha, self.C))


def _model_from(form, rho, ctx):
    bits, K = ctx.bits, ctx.K
    with working_precision(bits):
        log1r = -iv.log(rho)
        if isinstance(form, PoleForm):
            m = form.multiplicity
            alpha = Fraction(m)
            wsum = form.equation.eval_weighted(rho, K, bits)
            n = form.numerator.eval(rho, K, bits)
            h = n / wsum ** m
            C = h / (log1r * gamma_eval(alpha, bits))
        else:
            alpha = Fraction(-1, 2)
            dD = form.discriminant.eval_derivative(rho, K, bits)
            if not certainly_negative(dD):
                raise DegenerateSingularity(
                    "discriminant derivative does not certify negative at rho")
            r = form.R.eval(rho, K, bits)
            q = form.Q.eval(rho, K, bits)
            h = r * iv.sqrt(-rho * dD) / q
            C = h / (log1r * gamma_eval(alpha, bits))
        growth = 1 / rho
        return SingularityModel(rho, alpha, h, C, growth)


def analyze(form, tolerance=Fraction(1, 10 ** 6)):
    """Fully populated :class:`SingularityModel` with C and the growth rate
    certified to the requested width."""
    tolerance = Fraction(tolerance)
    rho_tol = tolerance / 16
    ctx = _Eval(bits=128, K=48)
    for _ in range(12):
        rho = find_rho(form, rho_tol)
        model = _model_from(form, rho, ctx)
        if (width_fraction(model.C) <= tolerance
                and width_fraction(model.growth) <= tolerance):
            return model
        rho_tol /= 16
        ctx.escalate()
    raise TieUnresolved("constant did not reach the requested width")


def predict(model, x, bits=128):
    """Interval value of the law C * rho**-x * x**(alpha-1)."""
    x = as_exponent(x) if not hasattr(x, "_mpi_") else x
    with working_precision(bits):
        xv = x.enclosure(bits) if isinstance(x, Exponent) else x
        log1r = -iv.log(model.rho)
        val = model.C * iv.exp(xv * log1r)
        if model.alpha != 1:
            val *= iv.exp((iv_from_fraction(model.alpha) - 1) * iv.log(xv))
        return val


# -- primitivity ---------------------------------------------------------------


class Primitive:
    kind = "primitive"

    def __init__(self, rule):
        self.rule = rule  # positive-linear-root | supercritical-sequence | positive-power-root

    def __repr__(self):
        return "Primitive(%s)" % self.rule


class NotPrimitive:
    kind = "not-primitive"

    def __init__(self, witness):
        self.witness = witness

    def __repr__(self):
        return "NotPrimitive(witness=%s)" % self.witness


class RationalPeriodic:
    kind = "rational-periodic"

    def __init__(self, omega, delta):
        self.omega = omega
        self.delta = delta

    def __repr__(self):
        return "RationalPeriodic(omega=%s, delta=%s)" % (self.omega.text(), self.delta.text())


class UnknownPrimitivity:
    kind = "unknown"

    def __init__(self, reason=""):
        self.reason = reason

    def __repr__(self):
        return "UnknownPrimitivity(%s)" % self.reason


def _set_irrational(termsum):
    """Is the exponent support certainly an irrational set?"""
    for fam in termsum.families:
        if fam.irrational:
            return True
    try:
        verdict = rationality(termsum.exponents())
    except Exception:
        return False
    return isinstance(verdict, (IrrationalSet, ShiftedSet))


def primitivity(spec, size_sample=None):
    """Primitivity verdict for a class.

    ``spec`` is the class's symbolic singular structure:
      ("linear", TermSum)                      positive root of sum c z^g = 1
      ("power", k, TermSum delta, TermSum gamma)   (1-H)**k = G pattern
      ("factors", [(name, TermSum), ...])      product of linear factors
      ("supseq", g_form, g_sing_form or None)  supercritical sequence
    ``size_sample`` is the class's size set inside a probe window; a
    rational or shifted-rational sample short-circuits to RationalPeriodic.
    The verdict is a lattice: Unknown is an honest output.
    """
    if size_sample:
        verdict = rationality(size_sample)
        if isinstance(verdict, RationalSet):
            return RationalPeriodic(verdict.omega, Exponent.rat(0))
        if isinstance(verdict, ShiftedSet):
            return RationalPeriodic(verdict.omega, verdict.delta)

    kind = spec[0]
    if kind == "linear":
        ts = spec[1]
        if ts.positive_coefficients() and _set_irrational(ts):
            return Primitive("positive-linear-root")
        return UnknownPrimitivity("linear root without verified irrational support")

    if kind == "power":
        _, k, delta_ts, gamma_ts = spec
        if k < 2:
            return UnknownPrimitivity("power form needs k >= 2")
        if not (delta_ts.positive_coefficients() and gamma_ts.positive_coefficients()):
            return UnknownPrimitivity("power form with nonpositive coefficients")
        merged = TermSum(delta_ts.terms + gamma_ts.terms,
                         delta_ts.families + gamma_ts.families)
        if _set_irrational(merged):
            return Primitive("positive-power-root")
        return UnknownPrimitivity("power form without verified irrational support")

    if kind == "factors":
        return _factors_verdict(spec[1])

    if kind == "supseq":
        _, g_eval, g_sing, g_sizes = spec
        verdict = rationality(g_sizes)
        if not isinstance(verdict, (IrrationalSet, ShiftedSet)):
            return UnknownPrimitivity("inner class not verified irrational")
        if _supercritical(g_eval, g_sing):
            return Primitive("supercritical-sequence")
        return UnknownPrimitivity("sequence not verified supercritical")

    return UnknownPrimitivity("no rule for %r" % (kind,))


def _supercritical(g_eval, g_sing):
    """Certify that g(z) = 1 happens strictly inside g's disk of
    convergence: evaluate g just below its own singularity and check that
    it certainly exceeds 1 (g is increasing with nonnegative counts)."""
    rho_g = find_rho(g_sing, Fraction(1, 10 ** 6))
    bits, K = 256, 64
    z_star = lower_fraction(rho_g) - Fraction(1, 10 ** 4)
    with working_precision(bits):
        z = iv_from_fraction(z_star)
        val = g_eval.eval(z, K, bits)
        return certainly_positive(val - 1)


def _factors_verdict(factors):
    """Product of linear factors 1 - E_i(z): primitive when every factor
    carrying the dominant root has irrational support; a rational-ray
    factor at the dominant root is a witness against primitivity."""
    infos = []
    for name, ts in factors:
        root = find_rho(PoleForm(ts), Fraction(1, 10 ** 10))
        irr = _set_irrational(ts)
        infos.append((name, ts, root, irr))
    # factors whose root interval is not certainly above the least one
    order = sorted(range(len(infos)), key=lambda i: lower_fraction(infos[i][2]))
    a = infos[order[0]][2]
    lead = [order[0]]
    for i in order[1:]:
        if not certainly_below(a, infos[i][2]):
            lead.append(i)
    bad = [infos[i][0] for i in lead if not infos[i][3]]
    if bad:
        return NotPrimitive(witness="factor %s with rational-ray support at the dominant root" % bad[0])
    if all(infos[i][3] for i in lead):
        return Primitive("positive-linear-root")
    return UnknownPrimitivity("dominant factors unresolved")


# -- lattice (rational / shifted-rational) law ---------------------------------


def rational_predict(omega, delta, model, x, variant="corrected", bits=192):
    """Step-function law for classes whose sizes lie on delta + omega*N.

    corrected: (omega h / ((1-rho^omega) Gamma(alpha))) rho^{-(N omega + delta)} x^{alpha-1}
    printed:   the same with one extra rho^{-delta} prefactor.
    N = floor((x - delta)/omega).  The corrected variant is the shipped
    default; the printed one is kept behind this flag for comparison.
    """
    omega = as_exponent(omega)
    delta = as_exponent(delta)
    x = as_exponent(x)
    n = _lattice_floor(x, delta, omega, bits)
    with working_precision(bits):
        log1r = -iv.log(model.rho)
        om = omega.enclosure(bits)
        de = delta.enclosure(bits)
        xv = x.enclosure(bits)
        gam = gamma_eval(model.alpha, bits)
        pref = om * model.h_rho / ((1 - iv.exp(-om * log1r)) * gam)
        val = pref * iv.exp((n * om + de) * log1r)
        if model.alpha != 1:
            val *= iv.exp((iv_from_fraction(model.alpha) - 1) * iv.log(xv))
        if variant == "printed":
            val *= iv.exp(de * log1r)
        elif variant != "corrected":
            raise ValueError("variant must be 'corrected' or 'printed'")
        return val


def _lattice_floor(x, delta, omega, bits):
    """floor((x - delta)/omega), certified (exact when commensurate)."""
    num = x - delta
    from .exponents import Basis
    basis = Basis.spanning([num, omega])
    from .exponents import _proportionality
    t = _proportionality(basis.coords(omega), basis.coords(num))
    if t is not None:
        return t.numerator // t.denominator
    for b in (bits, 2 * bits, 4 * bits):
        q = num.enclosure(b) / omega.enclosure(b)
        n = floor_certain(q)
        if n is not None:
            return n
    raise TieUnresolved("lattice index floor((x-delta)/omega) undecided")


# -- expectations ---------------------------------------------------------------


def expectation_ratio(f, fu, x, bits=128):
    """Mean marker weight over objects of size <= x: exact cumulative ratio
    as an interval (the numerator may carry irrational weights)."""
    num = fu.cumulative(x)
    den = f.cumulative(x)
    num = num if isinstance(num, Exponent) else Exponent.rat(num)
    with working_precision(bits):
        return num.enclosure(bits) / iv.mpf(den)


# -- oscillation profile for the two-geometric non-primitive pattern ------------


def _floor_exponent(e, start_bits=64):
    for bits in (start_bits, 128, 256, 512, 1024, 2048):
        n = floor_certain(e.enclosure(bits))
        if n is not None:
            return n
    raise TieUnresolved("floor of %s undecided" % e.text())


def _floor_quotient(x, y):
    for bits in (64, 128, 256, 512, 1024, 2048):
        n = floor_certain(x.enclosure(bits) / y.enclosure(bits))
        if n is not None:
            return n
    raise TieUnresolved("floor of %s / %s undecided" % (x.text(), y.text()))


def two_geometric_count(beta, x):
    """Exact |W_{<=x}| for the left-squares/right-beta-tiles class with two
    colours each: sum over l of 2^l * (2^{floor(x - l beta)+1} - 1)."""
    beta = as_exponent(beta)
    x = as_exponent(x)
    lmax = _floor_quotient(x, beta)
    total = 0
    for l in range(lmax + 1):
        rem = x - beta.scale(l)
        k = _floor_exponent(rem)
        total += (2 ** l) * (2 ** (k + 1) - 1)
    return total


def oscillation_profile(beta, x0, n_samples, l_max, bits=192):
    """Sample the bounded period-one factor of the non-primitive
    two-geometric class: both the empirical c(x) = |W_{<=x}| * 2^-x and the
    truncated closed form sum 2^{1-(beta-1) l - frac(x - l beta)}.

    Returns rows (x, empirical interval, closed-form interval, tail bound).
    """
    beta = as_exponent(beta)
    if compare(beta, Exponent.rat(1)) != GT:
        raise TailTooFat("oscillation tail needs beta > 1")
    x0 = Fraction(x0)
    rows = []
    with working_precision(bits):
        log2 = iv.log(iv.mpf(2))
        bv = beta.enclosure(bits)
        ratio = iv.exp(-(bv - 1) * log2)       # 2^{-(beta-1)}
        tail = 2 * iv.exp(-(bv - 1) * (l_max + 1) * log2) / (1 - ratio)
        tail_hi = upper_fraction(tail)
        for j in range(n_samples):
            x = x0 + Fraction(j, n_samples)
            xe = Exponent.rat(x)
            count = two_geometric_count(beta, xe)
            emp = iv.mpf(count) * iv.exp(-iv_from_fraction(x) * log2)
            closed = iv.mpf(0)
            for l in range(l_max + 1):
                rem = xe - beta.scale(l)
                fl = _floor_exponent(rem)
                delta_l = rem.enclosure(bits) - fl
                closed += iv.exp((1 - (bv - 1) * l - delta_l) * log2)
            rows.append((x, emp, closed, tail_hi))
    return rows


# -- zeta machinery --------------------------------------------------------------


def zeta_iv(s, K=1024, bits=128):
    """Certified zeta(s) for real s > 1 by partial sums plus the standard
    integral-test tail enclosure."""
    with working_precision(bits):
        s = s if hasattr(s, "_mpi_") else iv_from_fraction(Fraction(s))
        if not certainly_positive(s - 1):
            raise TailTooFat("zeta tail requires s > 1")
        total = iv.mpf(1)
        for k in range(2, K + 1):
            total += iv.exp(-s * iv.log(iv.mpf(k)))
        m = iv.mpf(K + 1)
        integral = iv.exp((1 - s) * iv.log(m)) / (s - 1)
        first = iv.exp(-s * iv.log(m))
        return total + iv.make_mpf((integral._mpi_[0], (integral + first)._mpi_[1]))


def zeta_deriv_iv(s, K=1024, bits=128):
    """Certified zeta'(s) = -sum log(k) k^-s for real s > 1."""
    with working_precision(bits):
        s = s if hasattr(s, "_mpi_") else iv_from_fraction(Fraction(s))
        if not certainly_positive(s - 1):
            raise TailTooFat("zeta' tail requires s > 1")
        total = iv.mpf(0)
        for k in range(2, K + 1):
            lk = iv.log(iv.mpf(k))
            total += lk * iv.exp(-s * lk)
        m = iv.mpf(K + 1)
        logm = iv.log(m)
        integral = iv.exp((1 - s) * logm) * (logm / (s - 1) + 1 / (s - 1) ** 2)
        first = logm * iv.exp(-s * logm)
        tail = iv.make_mpf((integral._mpi_[0], (integral + first)._mpi_[1]))
        return -(total + tail)


def zeta_solve(target=2, tolerance=Fraction(1, 10 ** 6)):
    """Positive real root of zeta(s) = target, by bisection on (1, 2]."""
    tolerance = Fraction(tolerance)
    lo, hi = Fraction(3, 2), Fraction(2)
    K, bits = 256, 96
    # widen the bracket if needed
    while True:
        if certainly_positive(zeta_iv(lo, K, bits) - target):
            break
        lo = 1 + (lo - 1) / 2
        if lo - 1 < Fraction(1, 1024):
            raise NoSignChange("zeta never certified above the target")
    if not certainly_negative(zeta_iv(hi, K, bits) - target):
        raise NoSignChange("zeta(2) not certified below the target")
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        v = zeta_iv(mid, K, bits) - target
        while not (certainly_positive(v) or certainly_negative(v)):
            K *= 2
            bits *= 2
            if K > 10 ** 6:
                raise TieUnresolved("zeta bisection stalled")
            v = zeta_iv(mid, K, bits) - target
        if certainly_positive(v):
            lo = mid
        else:
            hi = mid
    with working_precision(256):
        return iv.make_mpf((iv_from_fraction(lo)._mpi_[0],
                            iv_from_fraction(hi)._mpi_[1]))


# -- misc -----------------------------------------------------------------------


def delta_rho(rho, bits=128):
    """(log(1/(1-rho)) + log log(1/rho)) / log(1/rho) for 0 < rho < 1."""
    with working_precision(bits):
        r = rho if hasattr(rho, "_mpi_") else iv_from_fraction(Fraction(rho))
        log1r = -iv.log(r)
        return (iv.log(1 / (1 - r)) + iv.log(log1r)) / log1r


def dgf_scan(f, mu, t_max, n_points):
    """Float samples of |sum c exp(-lambda (mu + i t))| over the truncated
    expansion: a diagnostic for extra singularities on the line of
    convergence.  The truncation error is stated, not certified."""
    import cmath

    from .intervals import iv_to_float
    mu_f = iv_to_float(mu) if hasattr(mu, "_mpi_") else float(mu)
    lam = [(e.float_approx(), c) for e, c in f.terms.items()]
    rows = []
    for j in range(n_points):
        t = t_max * j / (n_points - 1) if n_points > 1 else 0.0
        s = complex(mu_f, t)
        total = 0j
        for lv, c in lam:
            coeff = c.a if hasattr(c, "a") else c
            total += int(coeff) * cmath.exp(-lv * s)
        rows.append((t, abs(total)))
    return rows
