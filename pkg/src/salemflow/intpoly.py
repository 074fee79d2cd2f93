"""Exact polynomial arithmetic over Z and Q.

Polynomials are tuples of coefficients in *ascending* order, so
``(1, -1, -1, -1, 1)`` is ``x^4 - x^3 - x^2 - x + 1``.  Everything here is
integer/Fraction exact; no floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def trim(coeffs):
    """Drop trailing zero coefficients (keeps at least the constant term)."""
    c = list(coeffs)
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c)


def degree(p):
    return len(trim(p)) - 1


def is_zero(p):
    return all(c == 0 for c in p)


def poly_add(p, q):
    n = max(len(p), len(q))
    return trim(tuple((p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0)
                      for i in range(n)))


def poly_neg(p):
    return tuple(-c for c in p)


def poly_scale(c, p):
    return trim(tuple(c * a for a in p))


def poly_mul(p, q):
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(tuple(out))


def poly_eval(p, x):
    """Horner evaluation; the result type follows the argument type."""
    acc = 0 * x if not isinstance(x, (int, Fraction)) else 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def poly_derivative(p):
    if len(p) <= 1:
        return (0,)
    return trim(tuple(i * p[i] for i in range(1, len(p))))


def poly_divmod(p, q):
    """Division with remainder over Q.  Returns (quotient, remainder)."""
    q = trim(q)
    if is_zero(q):
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(c) for c in p]
    dq = len(q) - 1
    lead = Fraction(q[-1])
    quot = [Fraction(0)] * max(1, len(rem) - dq)
    while len(trim(rem)) - 1 >= dq and not is_zero(rem):
        rem = list(trim(rem))
        k = len(rem) - 1 - dq
        c = rem[-1] / lead
        quot[k] = c
        for i in range(dq + 1):
            rem[k + i] -= c * q[i]
        rem[-1] = 0
    return trim(tuple(quot)), trim(tuple(rem))


def divides_exactly(p, q):
    """True (with integer quotient) when q divides p over Z, else (False, None)."""
    quot, rem = poly_divmod(p, q)
    if not is_zero(rem):
        return False, None
    if any(c.denominator != 1 for c in quot):
        return False, None
    return True, tuple(int(c) for c in quot)


def is_palindromic(p):
    p = trim(p)
    return p == tuple(reversed(p))


def content(p):
    g = 0
    for c in p:
        g = gcd(g, abs(c))
    return g


def charpoly(rows):
    """Characteristic polynomial of a square integer matrix, exactly.

    Faddeev-LeVerrier over Fraction; returns monic ascending integer tuple
    for det(xI - M).
    """
    n = len(rows)
    A = [[Fraction(x) for x in row] for row in rows]

    def matmul(X, Y):
        return [[sum(X[i][k] * Y[k][j] for k in range(n)) for j in range(n)]
                for i in range(n)]

    desc = [Fraction(1)]
    Ak = [row[:] for row in A]
    for k in range(1, n + 1):
        ck = -sum(Ak[i][i] for i in range(n)) / k
        desc.append(ck)
        if k < n:
            for i in range(n):
                Ak[i][i] += ck
            Ak = matmul(A, Ak)
    asc = list(reversed(desc))
    assert all(c.denominator == 1 for c in asc)
    return tuple(int(c) for c in asc)


def power_traces(monic, count):
    """Power sums p_k = sum of k-th powers of the roots of a monic integer
    polynomial, for k = 0..count-1, via Newton's identities plus the linear
    recurrence of the polynomial.  Exact integers.
    """
    f = trim(monic)
    d = len(f) - 1
    if f[-1] != 1:
        raise ValueError("polynomial must be monic")
    p = [d]
    for k in range(1, count):
        if k <= d:
            s = -k * f[d - k]
            for i in range(1, k):
                s -= f[d - i] * p[k - i]
        else:
            s = 0
            for i in range(1, d + 1):
                s -= f[d - i] * p[k - i]
        p.append(s)
    return p[:count]


def sylvester_resultant(p, q):
    """Resultant of two integer polynomials (exact integer).

    Fraction Gaussian elimination on the Sylvester matrix; fine for the
    small degrees used here.
    """
    p, q = trim(p), trim(q)
    dp, dq = len(p) - 1, len(q) - 1
    if dp == 0:
        return p[0] ** dq
    if dq == 0:
        return q[0] ** dp
    n = dp + dq
    rows = []
    pd = list(reversed(p))
    qd = list(reversed(q))
    for i in range(dq):
        rows.append([Fraction(0)] * i + [Fraction(c) for c in pd]
                    + [Fraction(0)] * (n - dp - 1 - i))
    for i in range(dp):
        rows.append([Fraction(0)] * i + [Fraction(c) for c in qd]
                    + [Fraction(0)] * (n - dq - 1 - i))
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if rows[r][col] != 0:
                piv = r
                break
        if piv is None:
            return 0
        if piv != col:
            rows[col], rows[piv] = rows[piv], rows[col]
            det = -det
        det *= rows[col][col]
        inv = 1 / rows[col][col]
        for r in range(col + 1, n):
            if rows[r][col] == 0:
                continue
            factor = rows[r][col] * inv
            for c in range(col, n):
                rows[r][c] -= factor * rows[col][c]
    assert det.denominator == 1
    return int(det)


def pretty(p, var="x"):
    """Human-readable form, highest power first."""
    p = trim(p)
    terms = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if c == 0:
            continue
        mag = abs(c)
        if k == 0:
            body = str(mag)
        elif k == 1:
            body = f"{var}" if mag == 1 else f"{mag}*{var}"
        else:
            body = f"{var}^{k}" if mag == 1 else f"{mag}*{var}^{k}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first_body = terms[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
