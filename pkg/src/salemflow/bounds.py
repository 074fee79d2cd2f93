"""The explicit-constant pipeline: algebraic lower bounds, case analysis
for the torus-integral margin delta, the decay exponent, Diophantine type,
discrepancy/Koksma verification and the terminal N0/r0 bounds.

Case analysis: with residues all zero the threshold 2H/L against half of
1/L(beta) separates the Garsia-driven case from the uniform one; with a
nonzero residue the threshold is 2H against 1.  Each solved case takes
delta as HALF the supremum of its feasible interval, which keeps a 50%
slack when the inequality is re-evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .intpoly import trim
from .orbit import continued_fraction_convergents
from .substitution import DEFAULT_PRECISION, _poly_roots


class InvalidCaseError(ValueError):
    """CaseParams flags contradict the case thresholds."""


class RationalInputError(ValueError):
    """Continued fraction terminated: the input is rational at the working
    precision."""


# -- Garsia-type lower bound -----------------------------------------------------


def garsia_bound(min_poly_of_xi, q_poly, precision: int = DEFAULT_PRECISION,
                 unit_tol: float = 1e-9) -> float:
    """Lower bound for |Q(xi)| over integer Q with Q(xi) != 0:

        prod_{|xi_i| != 1} ||xi_i| - 1|
        -------------------------------------------------------------
        (n+1)^m (prod_{|xi_i| > 1} |xi_i|)^{n+1} Height(Q)^d

    with n = deg Q, d = deg xi, m = #conjugates on the unit circle.  The
    products run over all conjugates of xi; circle membership is decided
    within unit_tol.
    """
    q = trim(tuple(int(c) for c in q_poly))
    n = len(q) - 1
    if n < 1:
        raise ValueError("Q must have degree >= 1")
    f = trim(tuple(int(c) for c in min_poly_of_xi))
    d = len(f) - 1
    height = max(abs(c) for c in q)
    roots = _poly_roots(f, precision)
    with mp.workprec(precision):
        num = mp.mpf(1)
        expansion = mp.mpf(1)
        m_circle = 0
        for r in roots:
            mod = abs(r)
            if abs(mod - 1) <= unit_tol:
                m_circle += 1
                continue
            num *= abs(mod - 1)
            if mod > 1:
                expansion *= mod
        denom = mp.mpf(n + 1) ** m_circle * expansion ** (n + 1) \
            * mp.mpf(height) ** d
        return float(num / denom)


# -- case analysis for delta ------------------------------------------------------


@dataclass(frozen=True)
class CaseParams:
    """Inputs of the four-way case analysis.

    delta1_beta is 1/L(beta) for beta = alpha^P; M_lower is the Garsia-chain
    lower bound needed only by the all-zero small-amplitude case (compute it
    with :func:`lemma33_m_lower`).
    """

    L: int
    abs_eta: float
    abs_sigma0_eta: float
    H: float
    m: int
    delta1_beta: float
    residues_all_zero: bool
    some_residue_l: int = 0
    M_lower: float = None

    def validate(self):
        if self.L < 1 or self.m < 1:
            raise InvalidCaseError("L and m must be positive")
        if not 0 < self.delta1_beta <= 1:
            raise InvalidCaseError("delta1_beta must lie in (0, 1]")
        if self.abs_eta <= 0 or self.abs_sigma0_eta <= 0:
            raise InvalidCaseError("absolute values must be positive")
        if self.H < 0:
            raise InvalidCaseError("H must be nonnegative")
        if self.residues_all_zero and self.some_residue_l != 0:
            raise InvalidCaseError(
                "residues_all_zero contradicts a nonzero residue")
        if not self.residues_all_zero:
            if not 0 < self.some_residue_l < self.L:
                raise InvalidCaseError(
                    "a nonzero residue in [1, L) is required")


@dataclass(frozen=True)
class DeltaResult:
    case_id: str           # "L33" | "L34" | "L35" | "L36"
    delta: float
    provenance: str
    slack: float = None    # fraction of the 0.1 budget left, None for L35


def select_case_and_delta(params: CaseParams) -> DeltaResult:
    """Pick the case fired by the flags/thresholds and solve for delta.

    Solved cases take half the supremum of the feasible interval for the
    inequality 1/2 < 1 - 2 delta - 0.4 - delta * X, i.e. delta = 0.05/(2+X).
    """
    params.validate()
    L, m = params.L, params.m
    budget = 0.1  # (1 - 0.4) - 1/2

    def solved(case_id, x_coef, origin):
        delta = 0.05 / (2 + x_coef)
        used = delta * (2 + x_coef)
        return DeltaResult(case_id=case_id, delta=delta,
                           provenance=f"half-sup of 1/2 < 1 - 2d - 0.4 - "
                                      f"d*({x_coef:.6g}) [{origin}]",
                           slack=(budget - used) / budget)

    if params.residues_all_zero:
        if 2 * params.H / L < params.delta1_beta / 2:
            if params.M_lower is None or params.M_lower <= 0:
                raise InvalidCaseError(
                    "the all-zero small-amplitude case needs M_lower > 0 "
                    "(see lemma33_m_lower)")
            return solved("L33", 4.0 / params.M_lower,
                          "Garsia chain, amplitude below half-gap")
        return solved("L34", 16.0 * m / params.delta1_beta,
                      "amplitude at least half-gap")
    if 2 * params.H < 1:
        if L < 2:
            raise InvalidCaseError("nonzero residue forces L >= 2")
        return DeltaResult(case_id="L35", delta=1.0 / (2 * L),
                           provenance="interval margin 1/(2L), no inequality "
                                      "solved", slack=None)
    return solved("L36", 8.0 * m * L, "nonzero residue, large amplitude")


@dataclass(frozen=True)
class GarsiaChain:
    M_lower: float
    garsia_floor: float
    eigen_norms: tuple
    height_bound: int
    c_beta: float


def lemma33_indices(abs_eta_tilde: float, abs_sigma0_eta_tilde: float,
                    delta1_beta: float, beta: float):
    """(n0, n1, n2): n0 the first index with |eta~| beta^n >= 1, n1 the
    first past which the decaying correction drops below the length gap,
    n2 their max."""
    if beta <= 1:
        raise ValueError("beta must exceed 1")
    lb = math.log(beta)
    n0 = max(0, math.ceil(-math.log(abs_eta_tilde) / lb))
    n1 = max(0, math.ceil(
        math.log(2 * abs_sigma0_eta_tilde / delta1_beta) / lb))
    return n0, n1, max(n0, n1)


def lemma33_m_lower(beta_min_poly, abs_eta_tilde: float, n2: int,
                    precision: int = DEFAULT_PRECISION) -> GarsiaChain:
    """Garsia-chain lower bound M >= c(beta) |eta~|^{-d} beta^{-n2 d}.

    The eigencoordinate b_j is an integer polynomial of degree <= d-1 in
    the j-th circle conjugate divided by the eigenvector pairing; the
    polynomial's evaluation is bounded below via :func:`garsia_bound` and
    the pairing is computed numerically (it only depends on beta).
    """
    f = trim(tuple(int(c) for c in beta_min_poly))
    d = len(f) - 1
    if d < 4 or d % 2:
        raise ValueError("need a Salem-degree polynomial")
    m = (d - 2) // 2
    roots = _poly_roots(f, precision)
    with mp.workprec(precision):
        beta = max(mp.re(r) for r in roots if abs(mp.im(r)) < 1e-20)
        circle = [r for r in roots
                  if abs(abs(r) - 1) <= 1e-9 and mp.im(r) > 0]
        # K_n <= |eta~| beta^n + 1/2 over the d-window starting at n2, and
        # each dual-eigenvector entry mixes at most d minimal-poly coefficients
        max_k = abs_eta_tilde * float(beta) ** (n2 + d - 1) + 0.5
        coef_sum = sum(abs(c) for c in f)
        height = max(1, math.ceil(d * coef_sum * max_k))
        # Garsia floor for an integer polynomial of degree <= d-1 and that
        # height, evaluated at a circle conjugate
        num = mp.mpf(1)
        for r in roots:
            mod = abs(r)
            if abs(mod - 1) > 1e-9:
                num *= abs(mod - 1)
        floor = num / (mp.mpf(d) ** (2 * m) * beta ** d
                       * mp.mpf(height) ** d)
        norms = []
        for bj in circle:
            e_j = [bj ** t for t in range(d)]
            e_dual = []
            c = [-f[i] for i in range(d)]  # x^d = c_{d-1} x^{d-1} + ... + c_0
            for i in range(1, d):
                e_dual.append(sum(c[s] * bj ** (d - 1 - i + s)
                                  for s in range(i)))
            e_dual.append(bj ** (d - 1))
            norms.append(abs(sum(a * b for a, b in zip(e_j, e_dual))))
        m_lower = mp.mpf(1)
        for nv in norms:
            m_lower *= floor / nv
        m_lower = m_lower ** (mp.mpf(1) / m)
        c_beta = m_lower * (mp.mpf(abs_eta_tilde)
                            * beta ** n2) ** d
        return GarsiaChain(M_lower=float(m_lower), garsia_floor=float(floor),
                           eigen_norms=tuple(float(nv) for nv in norms),
                           height_bound=height, c_beta=float(c_beta))


# -- decay exponent ---------------------------------------------------------------


def gamma_exponent(delta: float, lam: float, alpha: float,
                   frequency: float) -> float:
    """Measure exponent gamma = -2 * frequency * log_alpha(1 - lam delta^2),
    i.e. 2(1 - gamma~) for gamma~ = 1 + frequency*log_alpha(1 - lam delta^2).
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if not 0 < lam < 1:
        raise ValueError("lambda must lie in (0, 1)")
    if not 0 < frequency <= 1:
        raise ValueError("frequency must lie in (0, 1]")
    if alpha <= 1:
        raise ValueError("alpha must exceed 1")
    return -2.0 * frequency * math.log1p(-lam * delta * delta) \
        / math.log(alpha)


# -- discrepancy ------------------------------------------------------------------


def star_discrepancy(points):
    """(D*_N, D_N) by the exact sorted-points formulas, O(N log N)."""
    u = np.sort(np.asarray(points, dtype=float))
    n = len(u)
    if n == 0:
        raise ValueError("need at least one point")
    if u[0] < 0 or u[-1] > 1:
        raise ValueError("points must lie in [0, 1]")
    i = np.arange(1, n + 1)
    d_star = float(np.max(np.maximum(i / n - u, u - (i - 1) / n)))
    gaps = i / n - u
    d_n = float(1.0 / n + np.max(gaps) - np.min(gaps))
    return d_star, d_n


def erdos_turan_bound(points, K: int, constant: float = 3.0) -> float:
    """D_N <= C (1/K + sum_{k<=K} |S_k|/(k N)) with the documented C = 3."""
    if K < 1:
        raise ValueError("K must be >= 1")
    u = np.asarray(points, dtype=float)
    n = len(u)
    ks = np.arange(1, K + 1)
    sums = np.abs(np.exp(2j * np.pi * np.outer(ks, u)).sum(axis=1)) / n
    return float(constant * (1.0 / K + np.sum(sums / ks)))


# -- Diophantine type -------------------------------------------------------------


@dataclass(frozen=True)
class TypeEstimate:
    tau_hat: float
    c_hat: float
    q_scanned: tuple
    precision: int

    def check(self, theta) -> bool:
        """||q theta|| >= c_hat / q^tau_hat for every scanned q."""
        with mp.workprec(self.precision):
            t = mp.mpf(theta)
            for q in self.q_scanned:
                dist = abs(q * t - mp.nint(q * t))
                if dist < self.c_hat / mp.mpf(q) ** self.tau_hat * (1 - 1e-12):
                    return False
        return True


def type_estimate(theta, q_max: int,
                  precision: int = DEFAULT_PRECISION) -> TypeEstimate:
    """Estimate the Diophantine type from continued-fraction convergents.

    tau_hat = max over convergent denominators q >= 2 of
    log(1/(q ||q theta||)) / log q, clamped to >= 1; c_hat is the smallest
    q^tau_hat ||q theta|| over the scan (q = 1 included).
    """
    with mp.workprec(precision):
        t = mp.mpf(theta)
        convs, terminated = continued_fraction_convergents(t, q_max, precision)
        if terminated:
            raise RationalInputError(
                "continued fraction terminated; theta is rational at this "
                "precision")
        qs = [1] + [q for _, q in convs]
        tau = 1.0
        for q in qs:
            if q < 2:
                continue
            dist = abs(q * t - mp.nint(q * t))
            if dist <= 0:
                raise RationalInputError("exact rational multiple found")
            val = float(mp.log(1 / (q * dist)) / mp.log(q))
            tau = max(tau, val)
        c_hat = mp.inf
        for q in qs:
            dist = abs(q * t - mp.nint(q * t))
            c_hat = min(c_hat, mp.mpf(q) ** tau * dist)
        return TypeEstimate(tau_hat=tau, c_hat=float(c_hat),
                            q_scanned=tuple(qs), precision=precision)


# -- Koksma -----------------------------------------------------------------------


@dataclass(frozen=True)
class KoksmaReport:
    sample_mean: float
    integral: float
    error: float
    rhs: float
    holds: bool
    d_star: float
    variation_bound: float


def koksma_check(f, variation_bound: float, points,
                 integral: float = None) -> KoksmaReport:
    """Verify |mean F(u_n) - int F| <= V(F) * D*_N.

    The integral may be supplied (closed forms exist for the indicator
    profiles of the equidistribution corollary); otherwise adaptive
    quadrature is used.  A violation is reported, not raised: it means the
    variation bound was wrong.
    """
    if integral is None:
        from scipy.integrate import quad
        integral = quad(f, 0.0, 1.0, limit=200)[0]
    u = np.asarray(points, dtype=float)
    try:
        vals = np.asarray(f(u), dtype=float)
        if vals.shape != u.shape:
            raise TypeError
    except Exception:
        vals = np.array([float(f(x)) for x in u])
    mean = float(vals.mean())
    d_star, _ = star_discrepancy(u)
    err = abs(mean - integral)
    rhs = variation_bound * d_star
    return KoksmaReport(sample_mean=mean, integral=float(integral),
                        error=err, rhs=rhs, holds=err <= rhs + 1e-12,
                        d_star=d_star, variation_bound=variation_bound)


# -- terminal bounds --------------------------------------------------------------


@dataclass(frozen=True)
class R0Bound:
    N0: int                  # None when too large to materialize
    log10_N0: float
    r0_lower: float          # 0.0 when it underflows; the log survives
    log10_r0_lower: float
    inputs: dict = field(repr=False, default=None)


def n0_N0_r0(P: int, n0: int, D: float, H: float, tau: float, delta: float,
             c_alpha: float, alpha: float, A: float) -> R0Bound:
    """N0 = ceil(P max(45 n0, (360 D H)^tau, 45)) and the terminal lower
    bound r0 > c_alpha / alpha^(A^4 max(n0, H^tau)).

    Everything is also carried in base-10 logs so that overflowing powers
    degrade to the symbolic-log form instead of failing.
    """
    if min(P, D, H, tau, c_alpha, alpha, A) <= 0 or alpha <= 1 or tau < 1:
        raise ValueError("inputs must be positive, alpha > 1, tau >= 1")
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    alpha = float(alpha)
    log10_pow = tau * math.log10(360.0 * D * H)
    log10_m = max(math.log10(45.0 * n0) if n0 > 0 else -math.inf,
                  log10_pow, math.log10(45.0))
    log10_N0 = math.log10(P) + log10_m
    N0 = None
    if log10_N0 < 15:
        pow_term = (360.0 * D * H) ** tau
        N0 = math.ceil(P * max(45.0 * n0, pow_term, 45.0))
    try:
        h_tau = H ** tau
    except OverflowError:
        h_tau = math.inf
    exponent = (A ** 4) * max(float(n0), h_tau)
    log10_r0 = math.log10(c_alpha) - exponent * math.log10(alpha)
    r0 = 10 ** log10_r0 if log10_r0 > -300 else 0.0
    return R0Bound(N0=N0, log10_N0=log10_N0, r0_lower=r0,
                   log10_r0_lower=log10_r0,
                   inputs={"P": P, "n0": n0, "D": D, "H": H, "tau": tau,
                           "delta": delta, "c_alpha": c_alpha,
                           "alpha": alpha, "A": A})
