"""Exact arithmetic in Q(alpha) in the power basis.

Elements carry Fraction coefficients against 1, alpha, ..., alpha^{d-1} and
are always reduced modulo the defining polynomial.  Traces are computed from
the multiplication matrix, never through floating-point embeddings; the
numeric roots stored on the field are only used for embedding *estimates*.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import mpmath as mp

from .intpoly import (degree, divides_exactly, is_palindromic, poly_add,
                      poly_divmod, poly_mul, poly_neg, power_traces,
                      sylvester_resultant, trim)
from .substitution import DEFAULT_PRECISION, _poly_roots


class NotReciprocalError(ValueError):
    """The defining polynomial is not palindromic, so alpha -> 1/alpha does
    not permute the roots and is not a field automorphism."""


class NumberField:
    """Q(alpha) for the largest real root alpha > 1 of a monic irreducible
    integer polynomial."""

    def __init__(self, min_poly, precision: int = DEFAULT_PRECISION,
                 check_irreducible: bool = True):
        f = trim(tuple(int(c) for c in min_poly))
        if f[-1] != 1:
            raise ValueError("defining polynomial must be monic")
        self.min_poly = f
        self.degree = len(f) - 1
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        self.precision = precision
        if check_irreducible and self.degree > 1:
            self._check_irreducible()
        self.is_palindromic = is_palindromic(f)
        self.numeric_roots = self._ordered_roots()
        self.alpha = mp.re(self.numeric_roots[0])
        # alpha^d expressed on the power basis (monic reduction row)
        self._reduction = tuple(Fraction(-c) for c in f[:-1])
        self._inv_alpha = None
        self._dual_basis = None

    # -- construction helpers -------------------------------------------------

    def _check_irreducible(self):
        """Reject polynomials with a proper integer factor.

        Root-subset search: any factor over Z is a product of a subset of the
        numeric roots with integer coefficients, certified by exact division.
        """
        from itertools import combinations

        roots = _poly_roots(self.min_poly, self.precision)
        with mp.workprec(self.precision + 64):
            for k in range(1, self.degree):
                for combo in combinations(range(len(roots)), k):
                    prod = [mp.mpc(1)]
                    for idx in combo:
                        nxt = [mp.mpc(0)] * (len(prod) + 1)
                        for i, c in enumerate(prod):
                            nxt[i] -= c * roots[idx]
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
                    if ok and divides_exactly(self.min_poly, tuple(cand))[0]:
                        raise ValueError(
                            "defining polynomial is reducible over Z")

    def _ordered_roots(self):
        """alpha first, then (for reciprocal f) 1/alpha, then the complex
        pairs e^{+2 pi i theta}, e^{-2 pi i theta} by increasing angle."""
        roots = _poly_roots(self.min_poly, self.precision)
        with mp.workprec(self.precision + 64):
            eps = mp.mpf(2) ** (-self.precision // 2)
            reals = [mp.re(r) for r in roots if abs(mp.im(r)) < eps]
            if not reals or max(reals) <= 1:
                raise ValueError("field requires a real root > 1")
            alpha = max(reals)
            others_real = sorted((r for r in reals if r != alpha),
                                 reverse=True)
            complexes = [r for r in roots if abs(mp.im(r)) >= eps]
            upper = sorted((r for r in complexes if mp.im(r) > 0),
                           key=lambda z: mp.arg(z))
            ordered = [mp.mpc(alpha)]
            ordered += [mp.mpc(r) for r in others_real]
            for z in upper:
                ordered += [z, mp.conj(z)]
        return tuple(ordered)

    # -- element constructors --------------------------------------------------

    def element(self, coeffs) -> "FieldElement":
        return FieldElement(self, coeffs)

    def zero(self):
        return self.element([0] * self.degree)

    def one(self):
        return self.element([1] + [0] * (self.degree - 1))

    def gen(self):
        """The element alpha."""
        c = [0] * self.degree
        if self.degree == 1:
            # Q(alpha) is Q itself; alpha is the rational root
            return self.element([Fraction(-self.min_poly[0])])
        c[1] = 1
        return self.element(c)

    def from_rational(self, q):
        return self.element([Fraction(q)] + [0] * (self.degree - 1))

    def parse_element(self, text: str) -> "FieldElement":
        """Parse the flag form "l0,l1,...,l{d-1}/L"."""
        rf = ReducedForm.from_text(text, self.degree)
        return rf.to_element(self)

    # -- exact arithmetic ------------------------------------------------------

    def reduce(self, coeffs):
        """Reduce arbitrary-degree Fraction coefficients mod the defining
        polynomial (monic, so the reduction is exact)."""
        c = [Fraction(x) for x in coeffs]
        d = self.degree
        while len(c) > d:
            top = c.pop()
            if top:
                k = len(c) - d
                for i, r in enumerate(self._reduction):
                    c[k + i] += top * r
        c += [Fraction(0)] * (d - len(c))
        return tuple(c)

    def inv_alpha(self) -> "FieldElement":
        if self._inv_alpha is None:
            self._inv_alpha = self.gen().inverse()
        return self._inv_alpha

    def sigma0(self, x: "FieldElement") -> "FieldElement":
        """The embedding alpha -> 1/alpha, exact.  Requires reciprocal f, in
        which case it is an involutive field automorphism."""
        if not self.is_palindromic:
            raise NotReciprocalError("defining polynomial is not reciprocal")
        inv = self.inv_alpha()
        acc = self.zero()
        for c in reversed(x.coeffs):
            acc = acc * inv + self.from_rational(c)
        return acc

    # -- traces ----------------------------------------------------------------

    def multiplication_matrix(self, x: "FieldElement"):
        """Columns are the power-basis coordinates of x * alpha^j."""
        d = self.degree
        cols = []
        cur = x
        for _ in range(d):
            cols.append(cur.coeffs)
            cur = cur.shift_up()
        return [[cols[j][i] for j in range(d)] for i in range(d)]

    def trace(self, x: "FieldElement") -> Fraction:
        """Exact trace = trace of the multiplication-by-x matrix."""
        d = self.degree
        cur = x
        total = Fraction(0)
        for j in range(d):
            total += cur.coeffs[j]
            if j < d - 1:
                cur = cur.shift_up()
        return total

    def power_trace(self, count: int):
        """Integer power sums Tr(alpha^k) for k = 0..count-1."""
        return _power_traces_cached(self.min_poly, count)

    def trace_residues(self, eta: "ReducedForm"):
        """(Tr(L eta alpha^n) mod L) for n = 0..d-1.

        Vanishing of these d residues is equivalent to vanishing for all
        n >= 0: the integer trace sequence obeys the linear recurrence of the
        defining polynomial, whose leading and trailing coefficients are
        units, so the window of d residues propagates both ways mod L.
        """
        d = self.degree
        p = self.power_trace(2 * d - 1)
        L = eta.denominator
        out = []
        for n in range(d):
            t = sum(eta.coeffs[i] * p[n + i] for i in range(d))
            out.append(t % L)
        return tuple(out)

    # -- dual basis ------------------------------------------------------------

    def fprime_alpha(self) -> "FieldElement":
        f = self.min_poly
        c = [Fraction(i * f[i]) for i in range(1, len(f))]
        return self.element(self.reduce(c))

    def dual_basis(self):
        """Elements w_j with Tr(alpha^i w_j) = delta_ij, from the quotient
        coefficients of f(X)/(X - alpha) divided by f'(alpha)."""
        if self._dual_basis is not None:
            return self._dual_basis
        d = self.degree
        f = self.min_poly
        # q(X) = f(X)/(X-alpha) = sum b_j X^j with b_j in Z[alpha]:
        # b_{d-1} = 1 and b_{j-1} = f_j + alpha * b_j.
        b = [None] * d
        b[d - 1] = self.one()
        for j in range(d - 1, 0, -1):
            b[j - 1] = self.from_rational(f[j]) + self.gen() * b[j]
        inv_fp = self.fprime_alpha().inverse()
        self._dual_basis = tuple(bj * inv_fp for bj in b)
        return self._dual_basis

    def dual_denominator(self) -> int:
        """lcm of the reduced-form denominators of the dual basis; divides
        |Res(f, f')|."""
        e = 1
        for w in self.dual_basis():
            e = lcm(e, ReducedForm.from_element(w).denominator)
        return e

    # -- numerics ---------------------------------------------------------------

    def embed(self, x: "FieldElement", root_index: int = 0):
        """Numeric image of x under the embedding sending alpha to the
        root_index-th numeric root."""
        with mp.workprec(self.precision + 32):
            r = self.numeric_roots[root_index]
            acc = mp.mpc(0)
            for c in reversed(x.coeffs):
                acc = acc * r + mp.mpf(c.numerator) / c.denominator
        return acc

    def embeddings(self, x: "FieldElement"):
        return tuple(self.embed(x, i) for i in range(self.degree))

    def resultant_f_fprime(self) -> int:
        f = self.min_poly
        fp = trim(tuple(i * f[i] for i in range(1, len(f))))
        return sylvester_resultant(f, fp)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.min_poly == other.min_poly

    def __hash__(self):
        return hash(self.min_poly)

    def __repr__(self):
        return f"NumberField({list(self.min_poly)})"


@lru_cache(maxsize=None)
def _power_traces_cached(min_poly, count):
    return tuple(power_traces(min_poly, count))


class FieldElement:
    """Immutable element of a NumberField with canonical coefficients."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "coeffs", field.reduce(coeffs))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("FieldElement is immutable")

    # arithmetic ---------------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.field,
                            [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coeffs])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        prod = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        return FieldElement(self.field, prod)

    __rmul__ = __mul__

    def shift_up(self):
        """Multiplication by alpha (one-step basis shift + reduction)."""
        return FieldElement(self.field, (Fraction(0),) + self.coeffs)

    def inverse(self):
        """Extended Euclid of the coefficient polynomial against f."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        f = tuple(Fraction(c) for c in self.field.min_poly)
        a = trim(self.coeffs)
        # invariants: s * a == r (mod f)
        r0, r1 = f, a
        s0, s1 = (Fraction(0),), (Fraction(1),)
        while degree(r1) > 0:
            q, rem = poly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, poly_add(s0, poly_neg(poly_mul(q, s1)))
        if r1 == (0,):  # pragma: no cover - f irreducible prevents this
            raise ZeroDivisionError("element shares a factor with f")
        c = r1[0]
        inv_coeffs = tuple(x / c for x in s1)
        return FieldElement(self.field, inv_coeffs)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.field.from_rational(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one()
        base = self
        while n > 0:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # predicates / views --------------------------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.field.from_rational(other)
        return (isinstance(other, FieldElement)
                and self.field == other.field
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field.min_poly, self.coeffs))

    def trace(self) -> Fraction:
        return self.field.trace(self)

    def reduced_form(self) -> "ReducedForm":
        return ReducedForm.from_element(self)

    def numeric(self, root_index: int = 0):
        return self.field.embed(self, root_index)

    def __repr__(self):
        return f"FieldElement({[str(c) for c in self.coeffs]})"


@dataclass(frozen=True)
class ReducedForm:
    """(l_0 + l_1 alpha + ... + l_{d-1} alpha^{d-1}) / L with
    gcd(l_0, ..., l_{d-1}, L) = 1 and L >= 1."""

    denominator: int
    coeffs: tuple

    def __post_init__(self):
        if self.denominator < 1:
            raise ValueError("denominator must be a positive integer")
        g = self.denominator
        for c in self.coeffs:
            g = gcd(g, abs(c))
        if g != 1:
            raise ValueError("coefficients and denominator not coprime")

    @classmethod
    def from_element(cls, x: FieldElement) -> "ReducedForm":
        L = 1
        for c in x.coeffs:
            L = lcm(L, c.denominator)
        nums = [int(c * L) for c in x.coeffs]
        g = L
        for n in nums:
            g = gcd(g, abs(n))
        return cls(L // g, tuple(n // g for n in nums))

    @classmethod
    def from_text(cls, text: str, d: int) -> "ReducedForm":
        """Parse "l0,l1,...,l{d-1}/L" (integers, positive denominator)."""
        try:
            nums_part, den_part = text.strip().split("/")
            coeffs = [int(t) for t in nums_part.split(",")]
            L = int(den_part)
        except Exception as exc:
            raise ValueError(f"cannot parse field element {text!r}") from exc
        if len(coeffs) != d:
            raise ValueError(
                f"expected {d} coefficients in {text!r}, got {len(coeffs)}")
        if L < 1:
            raise ValueError("denominator must be positive")
        g = L
        for c in coeffs:
            g = gcd(g, abs(c))
        return cls(L // g, tuple(c // g for c in coeffs))

    def to_element(self, field: NumberField) -> FieldElement:
        return field.element(
            [Fraction(c, self.denominator) for c in self.coeffs])

    def numerator_element(self, field: NumberField) -> FieldElement:
        """The integer element L*eta."""
        return field.element([Fraction(c) for c in self.coeffs])

    def text(self) -> str:
        return ",".join(str(c) for c in self.coeffs) + f"/{self.denominator}"
