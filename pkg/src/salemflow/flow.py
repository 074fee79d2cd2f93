"""Self-similar suspension tilings and twisted Birkhoff integrals.

A tiling is one long orbit segment of the suspension flow: the word
zeta^n(seed) laid out on the line with tile lengths given by the Perron
left-eigenvector.  Twisted integrals of letter indicators have an exact
per-tile closed form, and the L^2 average G_R is estimated by sampling
flow offsets along the segment (unique ergodicity makes one long orbit
representative; the seeded sampling keeps runs reproducible).
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .substitution import (DEFAULT_PRECISION, LengthCapError, PerronData,
                           Substitution, build_matrix)


class WindowOutOfRangeError(ValueError):
    """The integration window leaves the generated tiling."""


class DegenerateFitError(RuntimeError):
    """No usable (log R, log G) points to fit."""


_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15


def splitmix64(seed: int, index: int) -> int:
    """Counter-based 64-bit generator: output i depends only on (seed, i)."""
    z = (seed + (index + 1) * _GOLDEN64) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def unit_uniform(seed: int, index: int) -> float:
    """The index-th generator output mapped into [0, 1)."""
    return splitmix64(seed, index) / 2.0 ** 64


class TileSequence:
    """Letters and cumulative boundary times of one tiling segment.

    Boundary times are kept at the construction precision so that phases
    omega * t stay accurate after reduction mod 1; a float64 copy is used
    for window searching only.
    """

    def __init__(self, letters, lengths, seed_letter, iterations, precision):
        self.letters = np.asarray(letters, dtype=np.int64)
        self.seed_letter = seed_letter
        self.iterations = iterations
        self.precision = precision
        with mp.workprec(precision):
            bounds = [mp.mpf(0)]
            acc = mp.mpf(0)
            for a in self.letters:
                acc += lengths[a - 1]
                bounds.append(acc)
        self.boundaries = bounds
        self.total_time = bounds[-1]
        self.boundaries_f = np.array([float(t) for t in bounds])

    @property
    def tile_count(self):
        return len(self.letters)

    def occupation_fraction(self, a: int) -> float:
        mask = self.letters == a
        lengths = np.diff(self.boundaries_f)
        return float(lengths[mask].sum() / float(self.total_time))


def generate_tiling(sub: Substitution, perron: PerronData, seed_letter: int,
                    min_total_length, word_cap: int = 2_000_000) -> TileSequence:
    """Expand zeta^n(seed) for the least n whose tiling is long enough."""
    if not 1 <= seed_letter <= sub.alphabet_size:
        raise ValueError("invalid seed letter")
    M = build_matrix(sub)
    p = perron.left_eigenvector
    n = 0
    power = M.power(0)
    while True:
        d = sub.alphabet_size
        col = [power.entries[i][seed_letter - 1] for i in range(d)]
        total = sum(c * p[i] for i, c in enumerate(col))
        count = sum(col)
        if total >= min_total_length:
            break
        if count > word_cap:
            raise LengthCapError(
                f"tiling would need more than {word_cap} tiles")
        n += 1
        power = power.mul(M)
    word = (seed_letter,)
    for _ in range(n):
        word = tuple(x for a in word for x in sub.image(a))
    return TileSequence(word, p, seed_letter, n, perron.precision)


def _phase(tiles: TileSequence, omega, t) -> complex:
    """exp(-2 pi i omega t) with the angle reduced at full precision."""
    with mp.workprec(tiles.precision):
        ang = mp.frac(mp.mpf(omega) * t)
    return cmath.exp(-2j * math.pi * float(ang))


def twisted_integral(tiles: TileSequence, a: int, omega: float, length,
                     offset) -> complex:
    """Integral over [0, R] of e^{-2 pi i omega t} times the indicator that
    the flow started at `offset` sits in a letter-a tile at time t.

    Exact per-tile closed form; the omega = 0 branch returns the letter-a
    occupation time.  Negative omega is returned as the conjugate of the
    positive-omega value, which is an identity of the closed form.
    """
    R = float(length)
    off = float(offset)
    if R <= 0:
        raise ValueError("window length must be positive")
    if off < 0 or off + R > float(tiles.total_time) * (1 + 1e-12):
        raise WindowOutOfRangeError(
            f"window [{off}, {off + R}] outside tiling of length "
            f"{float(tiles.total_time)}")
    if omega < 0:
        return twisted_integral(tiles, a, -omega, length, offset).conjugate()

    bf = tiles.boundaries_f
    i0 = int(np.searchsorted(bf, off, side="right")) - 1
    i1 = int(np.searchsorted(bf, off + R, side="left")) - 1
    i0 = max(i0, 0)
    i1 = min(i1, tiles.tile_count - 1)

    if omega == 0:
        with mp.workprec(tiles.precision):
            total = mp.mpf(0)
            for k in range(i0, i1 + 1):
                if tiles.letters[k] != a:
                    continue
                t0 = max(tiles.boundaries[k], mp.mpf(off))
                t1 = min(tiles.boundaries[k + 1], mp.mpf(off) + mp.mpf(R))
                if t1 > t0:
                    total += t1 - t0
            return complex(float(total), 0.0)

    with mp.workprec(tiles.precision):
        off_mp = mp.mpf(off)
        end_mp = off_mp + mp.mpf(R)
        re_parts, im_parts = [], []
        for k in range(i0, i1 + 1):
            if tiles.letters[k] != a:
                continue
            t0 = tiles.boundaries[k] if k > i0 else max(tiles.boundaries[k],
                                                        off_mp)
            t1 = tiles.boundaries[k + 1] if k < i1 else min(
                tiles.boundaries[k + 1], end_mp)
            if not t1 > t0:
                continue
            e1 = cmath.exp(-2j * math.pi * float(mp.frac(omega * (t1 - off_mp))))
            e0 = cmath.exp(-2j * math.pi * float(mp.frac(omega * (t0 - off_mp))))
            re_parts.append(e1.real - e0.real)
            im_parts.append(e1.imag - e0.imag)
    s = complex(math.fsum(re_parts), math.fsum(im_parts))
    return s / (-2j * math.pi * omega)


@dataclass
class TwistedIntegralSeries:
    """G_R curve for one frequency, with the per-sample integrals kept."""

    omega: float
    R_values: tuple
    S_values: list            # S_values[i][j]: window R_values[i], sample j
    G_values: tuple
    num_samples: int
    seed: int
    letter: int
    occupation: float


def estimate_GR(sub: Substitution, perron: PerronData, a: int, omega: float,
                R_list, num_samples: int, seed: int,
                min_total_length=None, workers: int = 1) -> TwistedIntegralSeries:
    """Sample-averaged G_R = mean |S_R|^2 / R over seeded flow offsets.

    Offsets are (total - max R) * u_i with u_i the i-th output of the
    counter-based generator, so results are independent of worker count;
    the reduction over samples runs in index order.
    """
    R_list = [float(R) for R in R_list]
    if any(r2 <= r1 for r1, r2 in zip(R_list, R_list[1:])):
        raise ValueError("R_list must be strictly increasing")
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    max_R = R_list[-1]
    if min_total_length is None:
        min_total_length = 3.0 * max_R
    if omega == 0:
        workers = 1  # the occupation branch works at extended precision
    tiles = generate_tiling(sub, perron, a, min_total_length)
    total_f = float(tiles.total_time)
    span = total_f - max_R
    if span <= 0:
        raise WindowOutOfRangeError("tiling shorter than the largest window")
    offsets = [span * unit_uniform(seed, i) for i in range(num_samples)]

    # precompute everything that needs extended precision in the main thread;
    # worker tasks then touch only float/numpy state
    bf = tiles.boundaries_f
    letters = tiles.letters
    if omega != 0:
        with mp.workprec(tiles.precision):
            om = mp.mpf(abs(omega))
            phases = np.empty(len(tiles.boundaries), dtype=complex)
            for k, t in enumerate(tiles.boundaries):
                phases[k] = cmath.exp(-2j * math.pi * float(mp.frac(om * t)))
            start_phase = []
            end_phase = []
            for off in offsets:
                start_phase.append(
                    cmath.exp(-2j * math.pi * float(mp.frac(om * mp.mpf(off)))))
                end_phase.append([
                    cmath.exp(-2j * math.pi
                              * float(mp.frac(om * (mp.mpf(off) + mp.mpf(R)))))
                    for R in R_list])

    def window_integral(iR, js):
        R = R_list[iR]
        off = offsets[js]
        if omega == 0:
            return twisted_integral(tiles, a, 0.0, R, off)
        i0 = int(np.searchsorted(bf, off, side="right")) - 1
        i1 = int(np.searchsorted(bf, off + R, side="left")) - 1
        i0 = max(i0, 0)
        i1 = min(i1, len(letters) - 1)
        e_lo = start_phase[js]
        e_hi = end_phase[js][iR]
        seg_let = letters[i0:i1 + 1]
        lo = phases[i0:i1 + 1].copy()
        hi = phases[i0 + 1:i1 + 2].copy()
        # the first tile starts at or before the window, the last ends at or
        # after it; clip both to the window edges
        lo[0] = e_lo
        hi[-1] = e_hi
        diffs = np.where(seg_let == a, hi - lo, 0.0)
        s = diffs.sum()
        s = s / e_lo  # rebase phases to the window start
        val = s / (-2j * math.pi * abs(omega))
        return val.conjugate() if omega < 0 else val

    tasks = [(iR, js) for iR in range(len(R_list))
             for js in range(num_samples)]
    S = [[None] * num_samples for _ in R_list]
    if workers <= 1:
        for iR, js in tasks:
            S[iR][js] = window_integral(iR, js)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(lambda t: window_integral(*t), tasks)
            for (iR, js), val in zip(tasks, results):
                S[iR][js] = val
    G = []
    for iR, R in enumerate(R_list):
        acc = 0.0
        for js in range(num_samples):
            acc += abs(S[iR][js]) ** 2
        G.append(acc / (num_samples * R))
    return TwistedIntegralSeries(
        omega=omega, R_values=tuple(R_list), S_values=S, G_values=tuple(G),
        num_samples=num_samples, seed=seed, letter=a,
        occupation=tiles.occupation_fraction(a))


@dataclass(frozen=True)
class HolderFit:
    slope: float
    intercept: float
    gamma_tilde: float
    measure_exponent: float
    constant: float
    residual: float
    n_points: int


def holder_fit(series: TwistedIntegralSeries) -> HolderFit:
    """Least squares on (log R, log G_R); gamma_tilde = (slope+1)/2 and the
    local measure exponent is 2(1 - gamma_tilde)."""
    R = np.asarray(series.R_values, dtype=float)
    G = np.asarray(series.G_values, dtype=float)
    if len(R) < 5:
        raise ValueError("need at least 5 R points")
    if np.log10(R[-1] / R[0]) < 2:
        raise ValueError("R values must span at least two decades")
    if np.any(G <= 0):
        raise DegenerateFitError("nonpositive G values cannot be fit in logs")
    x = np.log(R)
    y = np.log(G)
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    gamma_tilde = (slope + 1) / 2
    return HolderFit(slope=float(slope), intercept=float(intercept),
                     gamma_tilde=float(gamma_tilde),
                     measure_exponent=float(2 * (1 - gamma_tilde)),
                     constant=float(np.exp(intercept)), residual=resid,
                     n_points=len(R))


@dataclass(frozen=True)
class ProductBoundRow:
    R: float
    max_abs_S: float
    bound: float
    holds: bool
    ratio: float


@dataclass(frozen=True)
class ProductBoundReport:
    kappa: float
    lam: float
    C1: float
    C2: float
    fitted: bool
    rows: tuple

    @property
    def all_hold(self):
        return all(r.holds for r in self.rows)


def _distance_to_integers(x) -> float:
    f = mp.frac(x)
    return float(min(f, 1 - f))


def product_bound_check(series: TwistedIntegralSeries, kappa: float,
                        lam: float, C1, C2: float, salem,
                        fit: bool = False) -> ProductBoundReport:
    """Check max |S_R| <= C1 R prod_{n <= log_alpha R - C2} (1 - lam d_n^2)
    with d_n the circle distance of omega kappa alpha^n.

    With fit=True (or C1 omitted) a grid over lam picks the best log-log
    fit and C1 is raised until the bound holds everywhere, so the fitted
    envelope is tight at the binding R.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    alpha = salem.alpha
    prec = salem.precision

    def product_term(R, lam_val):
        n_top = math.floor(math.log(R) / math.log(float(alpha)) - C2)
        prod = 1.0
        with mp.workprec(prec):
            x = mp.mpf(series.omega) * mp.mpf(kappa)
            for n in range(0, n_top + 1):
                dist = _distance_to_integers(x)
                prod *= max(1.0 - lam_val * dist * dist, 0.0)
                x *= alpha
        return prod

    max_S = [max(abs(s) for s in row) for row in series.S_values]
    fitted = fit or C1 is None
    if fitted:
        best = None
        for lam_try in [i / 20 for i in range(1, 20)]:
            logs = []
            for R, ms in zip(series.R_values, max_S):
                if ms <= 0:
                    continue
                prod = product_term(R, lam_try)
                if prod <= 0:
                    break
                logs.append(math.log(ms) - math.log(R) - math.log(prod))
            else:
                if not logs:
                    continue
                c1_needed = math.exp(max(logs))
                sse = sum((v - max(logs)) ** 2 for v in logs)
                if best is None or sse < best[0]:
                    best = (sse, lam_try, c1_needed)
        if best is None:
            raise DegenerateFitError("no feasible (C1, lambda) found")
        _, lam, C1 = best
        C1 *= 1 + 1e-12  # strictness guard at the binding R
    rows = []
    for R, ms in zip(series.R_values, max_S):
        bound = C1 * R * product_term(R, lam)
        ms = float(ms)
        rows.append(ProductBoundRow(R=R, max_abs_S=ms, bound=bound,
                                    holds=bool(ms <= bound * (1 + 1e-12)),
                                    ratio=ms / bound if bound > 0 else
                                    float("inf")))
    return ProductBoundReport(kappa=kappa, lam=lam, C1=C1, C2=C2,
                              fitted=fitted, rows=tuple(rows))
