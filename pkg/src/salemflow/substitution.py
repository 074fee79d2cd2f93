"""Substitutions on a finite alphabet, their matrices and Perron data.

Letters are the integers 1..d.  The text alphabet used by configs maps
letter i to the character '1'..'9' then 'a', 'b', ... so a substitution is
written e.g. ``{"alphabet": 4, "images": ["12", "14", "2", "3"]}``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .intpoly import charpoly, divides_exactly, is_palindromic, poly_eval, trim

LETTER_CHARS = "123456789" + string.ascii_lowercase

DEFAULT_PRECISION = 256


class NotPrimitiveError(ValueError):
    """Raised when an operation requires a primitive substitution matrix."""


class LengthCapError(RuntimeError):
    """Raised when an iterate would exceed the configured word-length cap."""


class InconclusiveClassification(ValueError):
    """A root sits numerically on the unit circle but the polynomial is not
    reciprocal, so the circle membership cannot be pinned down."""


def letter_to_char(a: int) -> str:
    return LETTER_CHARS[a - 1]


def char_to_letter(ch: str) -> int:
    idx = LETTER_CHARS.find(ch)
    if idx < 0:
        raise ValueError(f"invalid letter character {ch!r}")
    return idx + 1


@dataclass(frozen=True)
class Substitution:
    """A word morphism letter -> nonempty word over {1..d}."""

    alphabet_size: int
    images: tuple  # tuple of tuples of int letters

    def __post_init__(self):
        d = self.alphabet_size
        if d < 1:
            raise ValueError("alphabet size must be >= 1")
        if len(self.images) != d:
            raise ValueError("need exactly one image per letter")
        for word in self.images:
            if len(word) == 0:
                raise ValueError("images must be nonempty")
            for a in word:
                if not 1 <= a <= d:
                    raise ValueError(f"letter {a} outside 1..{d}")

    @classmethod
    def from_strings(cls, images):
        words = tuple(tuple(char_to_letter(ch) for ch in w) for w in images)
        return cls(alphabet_size=len(images), images=words)

    @classmethod
    def from_config(cls, cfg):
        """Parse the JSON object form {"alphabet": d, "images": [...]}."""
        d = cfg["alphabet"]
        images = cfg["images"]
        if not isinstance(d, int) or len(images) != d:
            raise ValueError("alphabet size must match the number of images")
        return cls.from_strings(images)

    def image(self, letter: int):
        return self.images[letter - 1]


@dataclass(frozen=True)
class SubstitutionMatrix:
    """d x d nonnegative integer matrix; entry (a,b) counts letter a in the
    image of b, so column sums are the image lengths."""

    entries: tuple  # tuple of row tuples

    @property
    def size(self):
        return len(self.entries)

    def column_sums(self):
        d = self.size
        return tuple(sum(self.entries[i][j] for i in range(d)) for j in range(d))

    def mul(self, other: "SubstitutionMatrix") -> "SubstitutionMatrix":
        d = self.size
        a, b = self.entries, other.entries
        return SubstitutionMatrix(tuple(
            tuple(sum(a[i][k] * b[k][j] for k in range(d)) for j in range(d))
            for i in range(d)))

    def power(self, n: int) -> "SubstitutionMatrix":
        d = self.size
        result = SubstitutionMatrix(tuple(
            tuple(int(i == j) for j in range(d)) for i in range(d)))
        base = self
        while n > 0:
            if n & 1:
                result = result.mul(base)
            base = base.mul(base)
            n >>= 1
        return result


def build_matrix(sub: Substitution) -> SubstitutionMatrix:
    d = sub.alphabet_size
    rows = tuple(
        tuple(sum(1 for x in sub.images[b] if x == a + 1) for b in range(d))
        for a in range(d))
    return SubstitutionMatrix(rows)


def is_primitive(matrix: SubstitutionMatrix) -> bool:
    """Some power M^k is strictly positive; k is capped at the Wielandt
    bound (d-1)^2 + 1, which is sharp."""
    d = matrix.size
    cap = (d - 1) ** 2 + 1
    # work on the support only, saturating entries at 1
    cur = tuple(tuple(min(1, x) for x in row) for row in matrix.entries)
    base = cur
    for _ in range(cap):
        if all(all(x > 0 for x in row) for row in cur):
            return True
        cur = tuple(
            tuple(min(1, sum(cur[i][k] * base[k][j] for k in range(d)))
                  for j in range(d))
            for i in range(d))
    return all(all(x > 0 for x in row) for row in cur)


def characteristic_polynomial(matrix: SubstitutionMatrix):
    """Monic integer coefficients of det(xI - M), ascending order."""
    return charpoly(matrix.entries)


def iterate(sub: Substitution, letter: int, n: int, cap: int = 10 ** 7) -> str:
    """The n-th iterate of the substitution on a letter, as a string.

    The length is predicted from the matrix power before expanding, so the
    cap is enforced without building a huge word first.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not 1 <= letter <= sub.alphabet_size:
        raise ValueError("invalid letter")
    if n > 0:
        M = build_matrix(sub).power(n)
        length = sum(M.entries[i][letter - 1] for i in range(sub.alphabet_size))
        if length > cap:
            raise LengthCapError(
                f"iterate has length {length} > cap {cap}")
    word = (letter,)
    for _ in range(n):
        word = tuple(x for a in word for x in sub.image(a))
    return "".join(letter_to_char(a) for a in word)


def iterate_letters(sub: Substitution, letter: int, n: int,
                    cap: int = 10 ** 7):
    """Same as :func:`iterate` but returns the tuple of integer letters."""
    return tuple(char_to_letter(c) for c in iterate(sub, letter, n, cap))


@dataclass(frozen=True)
class PerronData:
    """Perron root and normalized left eigenvector of a primitive matrix."""

    alpha: object                 # mpf
    left_eigenvector: tuple       # mpf entries, positive, sums to 1
    char_poly: tuple              # ascending ints
    min_poly: tuple               # ascending ints, irreducible factor at alpha
    precision: int


def _poly_roots(coeffs_ascending, precision):
    """All complex roots at the requested binary precision (mpmath)."""
    desc = list(reversed(trim(coeffs_ascending)))
    with mp.workprec(precision + 64):
        roots = mp.polyroots([mp.mpf(c) for c in desc], maxsteps=200,
                             extraprec=precision)
    return list(roots)


def _real_roots(coeffs_ascending, precision):
    eps = mp.mpf(2) ** (-precision // 2)
    out = []
    for r in _poly_roots(coeffs_ascending, precision):
        if abs(mp.im(r)) < eps:
            out.append(mp.re(r))
    return out


def minimal_polynomial_at(char_poly, alpha, precision):
    """Irreducible integer factor of char_poly vanishing at alpha.

    Bounded search over products of root subsets: the monic integer divisor
    of minimal degree containing alpha among its roots is the minimal
    polynomial.  Subset products are rounded to integers and certified by
    exact division over Z, so numerical roots only steer the search.
    """
    from itertools import combinations

    roots = _poly_roots(char_poly, precision)
    # locate alpha among the numeric roots
    i_alpha = min(range(len(roots)), key=lambda i: abs(roots[i] - alpha))
    rest = [roots[i] for i in range(len(roots)) if i != i_alpha]
    d = len(roots)
    with mp.workprec(precision + 64):
        for k in range(0, d):
            for combo in combinations(range(len(rest)), k):
                prod = [mp.mpc(1)]
                for idx in (None,) + combo:
                    r = alpha if idx is None else rest[idx]
                    nxt = [mp.mpc(0)] * (len(prod) + 1)
                    for i, c in enumerate(prod):
                        nxt[i] -= c * r
                        nxt[i + 1] += c
                    prod = nxt
                cand = []
                ok = True
                for c in prod:
                    ci = mp.nint(mp.re(c))
                    if abs(c - ci) > mp.mpf("1e-12"):
                        ok = False
                        break
                    cand.append(int(ci))
                if not ok:
                    continue
                divides, _ = divides_exactly(char_poly, tuple(cand))
                if divides:
                    return tuple(cand)
    raise RuntimeError("minimal polynomial search failed")  # pragma: no cover


def perron_data(matrix: SubstitutionMatrix,
                precision: int = DEFAULT_PRECISION) -> PerronData:
    """Perron eigenvalue, normalized left eigenvector and polynomials.

    The eigenvector is normalized to sum 1 and solved by exact-pivot
    Gaussian elimination on (M^T - alpha I) at the working precision.
    """
    if not is_primitive(matrix):
        raise NotPrimitiveError("matrix is not primitive")
    d = matrix.size
    cp = characteristic_polynomial(matrix)
    with mp.workprec(precision + 64):
        reals = _real_roots(cp, precision)
        alpha = max(reals)
        minp = minimal_polynomial_at(cp, alpha, precision)
        # refine alpha on the minimal polynomial by Newton iteration
        dminp = trim(tuple(i * minp[i] for i in range(1, len(minp))))
        x = alpha
        for _ in range(8):
            fx = poly_eval(minp, x)
            fpx = poly_eval(dminp, x)
            x = x - fx / fpx
        alpha = x
        # left eigenvector: null vector of (M^T - alpha I)
        A = [[mp.mpf(matrix.entries[j][i]) for j in range(d)] for i in range(d)]
        for i in range(d):
            A[i][i] -= alpha
        vec = _null_vector(A, d)
        total = sum(vec)
        vec = tuple(v / total for v in vec)
        if any(v <= 0 for v in vec):
            raise RuntimeError("Perron eigenvector not positive")
    return PerronData(alpha=alpha, left_eigenvector=vec, char_poly=cp,
                      min_poly=minp, precision=precision)


def _null_vector(A, d):
    """One nonzero kernel vector of a numerically rank d-1 matrix."""
    rows = [row[:] for row in A]
    piv_cols = []
    r = 0
    for c in range(d):
        piv, best = None, mp.mpf(0)
        for i in range(r, d):
            if abs(rows[i][c]) > best:
                best, piv = abs(rows[i][c]), i
        if piv is None or best < mp.mpf(2) ** (-mp.mp.prec // 2):
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, d):
            f = rows[i][c] / rows[r][c]
            for j in range(c, d):
                rows[i][j] -= f * rows[r][j]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(d) if c not in piv_cols]
    x = [mp.mpf(0)] * d
    x[free[-1]] = mp.mpf(1)
    for i in range(len(piv_cols) - 1, -1, -1):
        c = piv_cols[i]
        s = sum(rows[i][j] * x[j] for j in range(c + 1, d))
        x[c] = -s / rows[i][c]
    return x


@dataclass(frozen=True)
class SalemVerdict:
    classification: str      # "Salem" | "Pisot" | "other"
    unit_circle_count: int

    @property
    def is_salem(self):
        return self.classification == "Salem"


UNIT_CIRCLE_TOL = 1e-9


def classify_perron(min_poly, precision: int = DEFAULT_PRECISION) -> SalemVerdict:
    """Classify the dominant root of a monic irreducible integer polynomial.

    Salem: reciprocal, even degree >= 4, exactly two roots off the unit
    circle (then reciprocity pins the remaining ones to the circle).
    Pisot: a real root > 1 with every other root strictly inside the disk.
    Anything else, including degree-1 polynomials, reports "other".
    """
    minp = trim(min_poly)
    deg = len(minp) - 1
    roots = _poly_roots(minp, precision)
    on_circle = sum(1 for r in roots if abs(abs(r) - 1) <= UNIT_CIRCLE_TOL)
    palindromic = is_palindromic(minp)
    if on_circle > 0 and not palindromic:
        raise InconclusiveClassification(
            "root numerically on |z|=1 but polynomial is not reciprocal")
    if (palindromic and deg >= 4 and deg % 2 == 0
            and len(roots) - on_circle == 2):
        off = [r for r in roots if abs(abs(r) - 1) > UNIT_CIRCLE_TOL]
        a, b = sorted(off, key=lambda z: abs(z))
        if mp.im(a) == 0 or abs(mp.im(a)) < UNIT_CIRCLE_TOL:
            if abs(b) > 1 > abs(a):
                return SalemVerdict("Salem", on_circle)
    if deg >= 2:
        outside = [r for r in roots if abs(r) > 1 + UNIT_CIRCLE_TOL]
        inside = [r for r in roots if abs(r) < 1 - UNIT_CIRCLE_TOL]
        if (len(outside) == 1 and abs(mp.im(outside[0])) < UNIT_CIRCLE_TOL
                and mp.re(outside[0]) > 1 and len(inside) == deg - 1):
            return SalemVerdict("Pisot", on_circle)
    return SalemVerdict("other", on_circle)
