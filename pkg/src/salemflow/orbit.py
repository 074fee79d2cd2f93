"""Trace orbits of Salem numbers and their equidistribution.

The central identity: for eta = (l_0 + ... + l_{d-1} alpha^{d-1})/L in
reduced form, the integer trace T_n = Tr(L eta alpha^n) splits as

    T_n = (L eta) alpha^n + sigma0(L eta) alpha^{-n} + 2 R_n,

where R_n is a finite cosine sum over the unit-circle conjugates.  Orbits
{eta alpha^n} are therefore computed from the integer recurrence plus a
decaying correction instead of powering alpha, which keeps 10^5-point
orbits cheap at fixed precision.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import acos, ceil, cos, floor, gcd, pi

import mpmath as mp
import numpy as np

from .numberfield import FieldElement, NumberField, ReducedForm
from .substitution import (DEFAULT_PRECISION, Substitution, build_matrix,
                           classify_perron, perron_data)


class PeriodNotFoundError(RuntimeError):
    """The residue state never returned to its start within L^d steps.
    This contradicts pure periodicity and signals an implementation fault."""


class QuadratureNotConvergedError(RuntimeError):
    """Refinement of a torus integral stalled above tolerance."""


class SalemNumber:
    """A Salem number alpha of degree d = 2m + 2 together with its field,
    the angles of its unit-circle conjugates, and its length."""

    def __init__(self, field: NumberField):
        verdict = classify_perron(field.min_poly, field.precision)
        if not verdict.is_salem:
            raise ValueError(
                f"{list(field.min_poly)} does not define a Salem number "
                f"(classified {verdict.classification})")
        self.field = field
        self.alpha = field.alpha
        self.precision = field.precision
        d = field.degree
        self.m = (d - 2) // 2
        with mp.workprec(field.precision + 32):
            self.thetas = tuple(
                mp.arg(field.numeric_roots[2 + 2 * j]) / (2 * mp.pi)
                for j in range(self.m))
        self.length = sum(abs(c) for c in field.min_poly)
        self.inv_length = Fraction(1, self.length)

    @classmethod
    def from_min_poly(cls, min_poly, precision: int = DEFAULT_PRECISION):
        return cls(NumberField(min_poly, precision))

    @classmethod
    def from_substitution(cls, sub: Substitution,
                          precision: int = DEFAULT_PRECISION):
        pd = perron_data(build_matrix(sub), precision)
        return cls(NumberField(pd.min_poly, precision))

    @property
    def degree(self):
        return self.field.degree

    def __repr__(self):
        return f"SalemNumber({list(self.field.min_poly)})"


def _field_of(field_like) -> NumberField:
    return field_like.field if isinstance(field_like, SalemNumber) else field_like


class TraceOrbit:
    """The purely periodic sequence Tr(L eta alpha^n) mod L."""

    def __init__(self, field: NumberField, eta: ReducedForm, horizon: int):
        d = field.degree
        if horizon < d:
            raise ValueError(f"horizon must be >= degree {d}")
        self.field = field
        self.eta = eta
        self.horizon = horizon
        L = eta.denominator
        p = field.power_trace(2 * d - 1)
        self.seed_traces = tuple(
            sum(eta.coeffs[i] * p[n + i] for i in range(d)) for n in range(d))
        f = field.min_poly
        self._rec = tuple(-f[i] for i in range(d))
        state0 = tuple(t % L for t in self.seed_traces)
        residues = list(state0)
        state = state0
        cap = L ** d
        period = None
        for n in range(1, cap + 1):
            nxt = sum(c * r for c, r in zip(self._rec, state)) % L
            state = state[1:] + (nxt,)
            if state == state0:
                period = n
                break
            residues.append(nxt)
        if period is None:
            raise PeriodNotFoundError(
                f"no return to the initial residue state within L^d = {cap} "
                "steps; the sequence should be purely periodic")
        self.period = period
        self.residues = tuple(residues[:period])

    def residue(self, n: int) -> int:
        return self.residues[n % self.period]

    def integer_traces(self, count: int):
        """Exact integers Tr(L eta alpha^n) for n = 0..count-1."""
        d = self.field.degree
        window = list(self.seed_traces)
        for n in range(count):
            if n < d:
                yield window[n]
            else:
                nxt = sum(c * t for c, t in zip(self._rec, window))
                window = window[1:] + [nxt]
                yield nxt


def trace_orbit(field_like, eta: ReducedForm, horizon: int) -> TraceOrbit:
    return TraceOrbit(_field_of(field_like), eta, horizon)


class AmplitudeData:
    """Per-conjugate amplitude of the oscillating part of the trace identity.

    For each unit-circle conjugate angle theta_j, the complex embedding of
    L*eta there is re_part + i*im_part; its magnitude and phase determine
    the cosine term magnitude*cos(2 pi n theta_j - phase) entering R_n.
    """

    def __init__(self, eta: ReducedForm, salem: SalemNumber):
        self.eta = eta
        self.salem = salem
        l = eta.coeffs
        with mp.workprec(salem.precision + 32):
            res, ims, mags, phases = [], [], [], []
            for th in salem.thetas:
                z = mp.mpc(0)
                for i in range(len(l) - 1, -1, -1):
                    z = z * mp.expjpi(2 * th) + l[i]
                res.append(mp.re(z))
                ims.append(mp.im(z))
                mags.append(abs(z))
                phases.append(-mp.atan2(mp.im(z), mp.re(z)))
            self.re_parts = tuple(res)
            self.im_parts = tuple(ims)
            self.magnitudes = tuple(mags)
            self.phases = tuple(phases)
            self.total = sum(mags) if mags else mp.mpf(0)
        self._validate()

    def cosine_sum(self, n: int):
        """R_n at the construction precision."""
        with mp.workprec(self.salem.precision + 32):
            acc = mp.mpf(0)
            for th, H, ph in zip(self.salem.thetas, self.magnitudes,
                                 self.phases):
                acc += H * mp.cos(2 * mp.pi * mp.frac(n * th) - ph)
        return acc

    def cosine_sum_array(self, ns: np.ndarray) -> np.ndarray:
        """Float64 R_n for an array of indices (angle drift ~ N*eps)."""
        acc = np.zeros(len(ns), dtype=float)
        for th, H, ph in zip(self.salem.thetas, self.magnitudes, self.phases):
            acc += float(H) * np.cos(
                2 * np.pi * np.mod(ns * float(th), 1.0) - float(ph))
        return acc

    def _validate(self):
        """The phase convention is pinned by requiring the trace identity to
        hold numerically for small n; a failure here is a construction bug."""
        field = self.salem.field
        orbit = TraceOrbit(field, self.eta, field.degree)
        num = self.eta.numerator_element(field)
        with mp.workprec(self.salem.precision + 32):
            val = mp.re(field.embed(num, 0))
            s0 = mp.re(field.embed(num, 1))
            a = self.salem.alpha
            traces = list(orbit.integer_traces(min(2 * field.degree, 12)))
            for n, t in enumerate(traces):
                rhs = val * a ** n + s0 * a ** (-n) + 2 * self.cosine_sum(n)
                if abs(t - rhs) > mp.mpf(2) ** (-self.salem.precision // 4):
                    raise AssertionError(
                        "trace identity violated at construction "
                        f"(n={n}, gap={mp.nstr(abs(t - rhs), 8)})")


def amplitude_data(eta: ReducedForm, salem: SalemNumber) -> AmplitudeData:
    return AmplitudeData(eta, salem)


# -- fractional orbits ---------------------------------------------------------


def fractional_orbit(eta: ReducedForm, salem: SalemNumber, n: int):
    """{eta alpha^n} at the salem's working precision (mpf in [0,1)).

    Uses residues mod L in place of the huge integer trace: subtracting a
    multiple of L does not change the fractional part of the quotient.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    field = salem.field
    orbit = TraceOrbit(field, eta, field.degree)
    amp = AmplitudeData(eta, salem)
    num = eta.numerator_element(field)
    L = eta.denominator
    with mp.workprec(salem.precision + 32):
        s0 = mp.re(field.embed(num, 1))
        r = orbit.residue(n)
        corr = s0 * salem.alpha ** (-n) + 2 * amp.cosine_sum(n)
        return mp.frac((r - corr) / L)


def fractional_orbit_sequence(eta: ReducedForm, salem: SalemNumber,
                              n_max: int):
    """List of mpf orbit values {eta alpha^n}, n = 0..n_max, sharing one
    orbit/amplitude construction."""
    field = salem.field
    orbit = TraceOrbit(field, eta, field.degree)
    amp = AmplitudeData(eta, salem)
    num = eta.numerator_element(field)
    L = eta.denominator
    out = []
    with mp.workprec(salem.precision + 32):
        s0 = mp.re(field.embed(num, 1))
        inv_a = 1 / salem.alpha
        decay = s0
        for n in range(n_max + 1):
            corr = decay + 2 * amp.cosine_sum(n)
            out.append(mp.frac((orbit.residue(n) - corr) / L))
            decay *= inv_a
    return out


def fractional_orbit_array(eta: ReducedForm, salem: SalemNumber,
                           n_max: int) -> np.ndarray:
    """Float64 orbit {eta alpha^n} for n = 0..n_max (absolute error around
    1e-10 for n_max up to ~10^6, dominated by float angle reduction)."""
    field = salem.field
    orbit = TraceOrbit(field, eta, field.degree)
    amp = AmplitudeData(eta, salem)
    num = eta.numerator_element(field)
    L = eta.denominator
    s0 = float(mp.re(field.embed(num, 1)))
    alpha = float(salem.alpha)
    ns = np.arange(n_max + 1)
    residues = np.asarray(orbit.residues, dtype=float)
    r = residues[np.mod(ns, orbit.period)]
    with np.errstate(under="ignore"):
        decay = s0 * np.power(alpha, -ns.astype(float))
    vals = (r - decay - 2.0 * amp.cosine_sum_array(ns)) / L
    return np.mod(vals, 1.0)


def empirical_frequency(eta: ReducedForm, salem: SalemNumber, interval,
                        n_points: int) -> Fraction:
    """Exact count/N of n in 1..N with {eta alpha^n} in [a,b]."""
    a, b = _check_interval(interval)
    if n_points < 1:
        raise ValueError("need at least one orbit point")
    vals = fractional_orbit_array(eta, salem, n_points)[1:]
    count = int(np.count_nonzero((vals >= a) & (vals <= b)))
    return Fraction(count, n_points)


def sup_orbit_distance(eta: ReducedForm, salem: SalemNumber, n_max: int,
                       exact: bool = None) -> float:
    """max_{0 <= n <= N} distance of {eta alpha^n} to the nearest integer."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if exact is None:
        exact = n_max <= 2000
    if not exact:
        vals = fractional_orbit_array(eta, salem, n_max)
        return float(np.min(np.stack([vals, 1.0 - vals]), axis=0).max())
    field = salem.field
    orbit = TraceOrbit(field, eta, field.degree)
    amp = AmplitudeData(eta, salem)
    num = eta.numerator_element(field)
    L = eta.denominator
    with mp.workprec(salem.precision + 32):
        s0 = mp.re(field.embed(num, 1))
        best = mp.mpf(0)
        inv_a = 1 / salem.alpha
        decay = s0
        for n in range(n_max + 1):
            v = mp.frac((orbit.residue(n) - decay
                         - 2 * amp.cosine_sum(n)) / L)
            best = max(best, min(v, 1 - v))
            decay *= inv_a
        return float(best)


# -- torus integrals -----------------------------------------------------------


def _check_interval(interval):
    a, b = float(interval[0]), float(interval[1])
    if not (0 <= a <= b <= 1):
        raise ValueError("interval must satisfy 0 <= a <= b <= 1")
    return a, b


def cosine_indicator_measure(scale: float, shift: float, interval) -> float:
    """Lebesgue measure of {x in [0,1) : frac(shift - scale*cos(2 pi x))
    in [a,b]}, by explicit arccos interval lengths."""
    a, b = _check_interval(interval)
    if b - a >= 1:
        return 1.0
    scale = float(scale)
    shift = float(shift)
    if scale <= 0:
        return 1.0 if a <= shift % 1.0 <= b else 0.0
    total = 0.0
    k_lo = ceil(shift - scale - b)
    k_hi = floor(shift + scale - a)
    for k in range(k_lo, k_hi + 1):
        u = max((shift - k - b) / scale, -1.0)
        v = min((shift - k - a) / scale, 1.0)
        if v > u:
            total += (acos(u) - acos(v)) / pi
    return min(total, 1.0)


def adaptive_indicator_measure(scale: float, shift: float, interval,
                               tol: float = 1e-9, max_cells: int = 400000):
    """Certified bisection bounds (lower, upper) for the same measure.

    Cell value ranges are certified with a midpoint Taylor bound
    |v(x) - v(xm) - v'(xm)(x - xm)| <= sup|v''| (w/2)^2 / 2; the quadratic
    term is what keeps tangential boundary touches (cosine extrema hitting
    an interval endpoint) classifiable.  Straddling cells are split until
    the uncertain mass drops below tol.
    """
    a, b = _check_interval(interval)
    if b - a >= 1:
        return 1.0, 1.0
    curv = (2 * pi) ** 2 * scale / 2
    ulp = 2.220446049250313e-16
    guard = 2e-15  # absorbs the rounding of the base subtraction

    def value(x):
        return shift - scale * cos(2 * pi * x)

    def slope(x):
        from math import sin
        return 2 * pi * scale * sin(2 * pi * x)

    sure = 0.0
    uncertain = 0.0
    cells = [(0.0, 1.0)]
    processed = 0
    while cells:
        processed += 1
        if processed > max_cells:
            raise QuadratureNotConvergedError(
                "indicator bisection exceeded the cell budget")
        x0, x1 = cells.pop()
        w = x1 - x0
        mid = 0.5 * (x0 + x1)
        vm = value(mid)
        # outward-rounded Taylor range; the quadratic term keeps tangential
        # boundary touches classifiable, the ulp term keeps it rigorous
        half = abs(slope(mid)) * w / 2 + curv * (w / 2) ** 2 \
            + 4 * ulp * (1 + abs(vm))
        vlo, vhi = vm - half, vm + half
        if vhi - vlo < 1:
            base = floor(vlo)
            lo, hi = vlo - base, vhi - base  # inside [0, 2)
            inside = ((a + guard <= lo and hi <= b - guard)
                      or (a + 1 + guard <= lo and hi <= b + 1 - guard))
            if inside:
                sure += w
                continue
            outside = (hi < a - guard
                       or (b + guard < lo and hi < a + 1 - guard)
                       or b + 1 + guard < lo)
            if outside:
                continue
        if w < tol / 64 or w < 4e-12:
            uncertain += w
            continue
        cells.append((x0, mid))
        cells.append((mid, x1))
    # when an interval endpoint coincides with a cosine extremum mod 1, the
    # float widening leaves an irreducible uncertain strip ~ sqrt(ulp/curv)
    floor_spread = 3e-8
    if uncertain > max(tol, floor_spread):
        raise QuadratureNotConvergedError(
            f"uncertain mass {uncertain:.3e} above tolerance {tol:.1e}")
    return sure, sure + uncertain


def torus_frequency(eta: ReducedForm, salem: SalemNumber, interval,
                    tol: float = None, cross_check: bool = True) -> float:
    """Limit frequency (1/P) sum_j measure{x : frac((a_j - 2R(x))/L) in J}.

    m = 1 uses the arccos closed form, cross-checked against the certified
    bisection; m >= 2 integrates the closed form of the last coordinate
    over a refining midpoint grid in the remaining ones.
    """
    a, b = _check_interval(interval)
    field = salem.field
    orbit = TraceOrbit(field, eta, field.degree)
    amp = AmplitudeData(eta, salem)
    L = eta.denominator
    m = salem.m
    if tol is None:
        tol = 1e-9 if m == 1 else 1e-6
    scales = [2 * float(H) / L for H in amp.magnitudes]
    total = 0.0
    for aj in orbit.residues:
        shift = aj / L
        if m == 1:
            val = cosine_indicator_measure(scales[0], shift, (a, b))
            if cross_check:
                lo, hi = adaptive_indicator_measure(scales[0], shift, (a, b),
                                                    tol=max(tol, 1e-9))
                if not (lo - 10 * tol <= val <= hi + 10 * tol):
                    raise QuadratureNotConvergedError(
                        f"closed form {val} outside certified [{lo}, {hi}]")
        else:
            val = _nested_cosine_measure(scales, shift, (a, b), tol)
        total += val
    return total / orbit.period


def _nested_cosine_measure(scales, shift, interval, tol, max_points=2 ** 15):
    """Midpoint-grid refinement over the outer coordinates with the inner
    coordinate in closed form."""
    outer, inner = scales[:-1], scales[-1]
    n = 64
    prev = None
    while n <= max_points:
        grids = [(np.arange(n) + 0.5) / n for _ in outer]
        val = 0.0
        for xs in itertools.product(*grids):
            s = shift - sum(sc * cos(2 * pi * x)
                            for sc, x in zip(outer, xs))
            val += cosine_indicator_measure(inner, s, interval)
        val /= n ** len(outer)
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
        n *= 2
    raise QuadratureNotConvergedError(
        f"midpoint refinement stalled above {tol:.1e}")


# -- searches and probes -------------------------------------------------------


@dataclass(frozen=True)
class SmallEtaSearch:
    best: ReducedForm
    best_sup: float
    qualifies: bool
    epsilon: float
    scanned: int
    pruned: int


def search_small_eta(salem: SalemNumber, epsilon: float, coeff_bound: int,
                     L_bound: int, n_max: int) -> SmallEtaSearch:
    """Exhaustive scan of reduced forms minimizing the sup orbit distance.

    A candidate whose residue cycle keeps the orbit provably further from
    the integers than the current best is pruned without generating the
    orbit (rearranging the trace identity gives the lower bound
    dist(a_j/L) - (2H + |sigma0|)/L at any index of the cycle).
    """
    if min(coeff_bound, L_bound, n_max) < 1:
        raise ValueError("bounds must be >= 1")
    field = salem.field
    d = field.degree
    best = None
    best_sup = float("inf")
    scanned = pruned = 0
    for L in range(1, L_bound + 1):
        for l in itertools.product(range(-coeff_bound, coeff_bound + 1),
                                   repeat=d):
            if all(c == 0 for c in l):
                continue
            g = L
            for c in l:
                g = gcd(g, abs(c))
            if g != 1:
                continue
            eta = ReducedForm(L, l)
            scanned += 1
            orbit = TraceOrbit(field, eta, d)
            amp = AmplitudeData(eta, salem)
            s0 = abs(mp.re(field.embed(eta.numerator_element(field), 1)))
            slack = (2 * float(amp.total) + float(s0)) / L
            lower = max(min(aj, L - aj) / L for aj in orbit.residues) - slack
            if lower > best_sup:
                pruned += 1
                continue
            sup = sup_orbit_distance(eta, salem, n_max, exact=False)
            if sup < best_sup:
                best, best_sup = eta, sup
    return SmallEtaSearch(best=best, best_sup=best_sup,
                          qualifies=best_sup < epsilon, epsilon=epsilon,
                          scanned=scanned, pruned=pruned)


def continued_fraction_convergents(theta, q_max: int, precision: int = None):
    """Convergents (p, q) with q <= q_max of a real number in (0, 1).

    Returns (convergents, terminated); terminated means the expansion hit
    an exact rational at the working precision.
    """
    if precision is None:
        precision = mp.mp.prec
    with mp.workprec(precision):
        x = mp.mpf(theta)
        a0 = int(mp.floor(x))
        x -= a0
        h0, h1 = 1, a0
        k0, k1 = 0, 1
        out = []
        cutoff = mp.mpf(2) ** (-(precision - 16))
        for _ in range(10 ** 6):
            if x < cutoff:
                return out, True
            x = 1 / x
            a = int(mp.floor(x))
            x -= a
            h0, h1 = h1, a * h1 + h0
            k0, k1 = k1, a * k1 + k0
            if k1 > q_max:
                break
            out.append((h1, k1))
        return out, False


@dataclass(frozen=True)
class IndependenceReport:
    min_residual: float
    best_coeffs: tuple
    cf_suspects: tuple
    relation_found: bool
    coeff_bound: int
    q_max: int
    precision: int


def independence_probe(thetas, coeff_bound: int, q_max: int,
                       precision: int = DEFAULT_PRECISION):
    """Scan integer combinations k . theta for near-integer values and
    continued fractions for sharp rational approximations, at the given
    precision and at twice the precision; only hits surviving both passes
    are reported."""

    def n_dist(x):
        f = mp.frac(x)
        return min(f, 1 - f)

    def one_pass(prec):
        with mp.workprec(prec):
            ths = [mp.mpf(t) for t in thetas]
            best, combo = mp.inf, None
            for ks in itertools.product(
                    range(-coeff_bound, coeff_bound + 1), repeat=len(ths)):
                if all(k == 0 for k in ks):
                    continue
                if next(k for k in ks if k != 0) < 0:
                    continue  # sign symmetry
                r = n_dist(mp.fsum(k * t for k, t in zip(ks, ths)))
                if r < best:
                    best, combo = r, ks
            suspects = []
            for j, t in enumerate(ths):
                convs, exact = continued_fraction_convergents(t, q_max, prec)
                for p, q in convs:
                    err = abs(t - mp.mpf(p) / q)
                    if err < mp.mpf("1e-3") / (2 * q * q):
                        suspects.append((j, p, q, float(err)))
                if exact and convs:
                    p, q = convs[-1]
                    suspects.append((j, p, q, 0.0))
            return float(best), combo, suspects

    b1, c1, s1 = one_pass(precision)
    b2, c2, s2 = one_pass(2 * precision)
    keep = tuple(s for s in s1 if any(t[:3] == s[:3] for t in s2))
    thresh = 2.0 ** (-precision // 3)
    found = b1 < thresh and b2 < thresh
    return IndependenceReport(
        min_residual=max(b1, b2), best_coeffs=c1, cf_suspects=keep,
        relation_found=found, coeff_bound=coeff_bound, q_max=q_max,
        precision=precision)


def rational_independence_probe(salem: SalemNumber, coeff_bound: int,
                                q_max: int) -> IndependenceReport:
    """Probe rational independence of 1, theta_1, ..., theta_m."""
    return independence_probe(salem.thetas, coeff_bound, q_max,
                              salem.precision)
