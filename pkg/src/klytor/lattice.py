"""Integer lattice helpers: gcds, primitive vectors, Hermite-style reductions."""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

IntVec = tuple  # tuple of int


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def as_int_vector(v: Sequence) -> IntVec:
    out = []
    for x in v:
        q = Fraction(x)
        if q.denominator != 1:
            raise ValueError(f"{v!r} is not an integer vector")
        out.append(int(q))
    return tuple(out)


def primitive(v: Sequence) -> IntVec:
    """Primitive integer vector on the ray through a nonzero rational vector."""
    den = 1
    qs = [Fraction(x) for x in v]
    for q in qs:
        den = den * q.denominator // gcd(den, q.denominator)
    ints = [int(q * den) for q in qs]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        raise ValueError("the zero vector has no primitive generator")
    return tuple(a // g for a in ints)


def is_primitive(v: Sequence[int]) -> bool:
    g = 0
    for a in v:
        g = gcd(g, int(a))
    return g == 1


def column_hnf(rows: Sequence[Sequence[int]], n: int):
    """Column-style echelon reduction A*U = H with U unimodular.

    Returns (H, U, pivots) where ``pivots[j]`` is the pivot row of column j
    for j < len(pivots) and columns len(pivots).. of H are zero.
    """
    a = [[int(x) for x in r] for r in rows]
    m = len(a)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def colop(k, c, p, q, s, t):
        # col_k <- p*col_k + q*col_c ; col_c <- s*col_k + t*col_c
        for mat in (a, u):
            for row in mat:
                x, y = row[k], row[c]
                row[k] = p * x + q * y
                row[c] = s * x + t * y

    k = 0
    pivots = []
    for i in range(m):
        if k == n:
            break
        for c in range(k + 1, n):
            if a[i][c] != 0:
                x, y = a[i][k], a[i][c]
                g, p, q = ext_gcd(x, y)
                colop(k, c, p, q, -y // g, x // g)
        if a[i][k] != 0:
            if a[i][k] < 0:
                for mat in (a, u):
                    for row in mat:
                        row[k] = -row[k]
            pivots.append(i)
            k += 1
    return a, u, pivots


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> list[IntVec]:
    """A basis of the (saturated) lattice {x in Z^n : rows . x = 0}."""
    rows = [as_int_vector(r) for r in rows]
    if not rows:
        return [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    _, u, pivots = column_hnf(rows, n)
    k = len(pivots)
    return [tuple(u[i][j] for i in range(n)) for j in range(k, n)]


def integer_solve(rows: Sequence[Sequence[int]], rhs: Sequence[int], n: int):
    """Some x in Z^n with rows . x = rhs, or None when no integer solution exists."""
    rows = [as_int_vector(r) for r in rows]
    rhs = as_int_vector(rhs)
    if not rows:
        return tuple([0] * n)
    h, u, pivots = column_hnf(rows, n)
    y = [0] * n
    for j, p in enumerate(pivots):
        acc = rhs[p] - sum(h[p][jj] * y[jj] for jj in range(j))
        if acc % h[p][j]:
            return None
        y[j] = acc // h[p][j]
    for i in range(len(rows)):
        if sum(h[i][j] * y[j] for j in range(n)) != rhs[i]:
            return None
    return tuple(sum(u[i][j] * y[j] for j in range(n)) for i in range(n))


def row_hnf(rows: Sequence[Sequence[int]], n: int) -> tuple[list[list[int]], list[int]]:
    """Row Hermite normal form: nonzero rows and their pivot columns.

    Pivots are positive and entries above a pivot lie in [0, pivot).
    """
    a = [list(as_int_vector(r)) for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        if r == len(a):
            break
        nz = [i for i in range(r, len(a)) if a[i][c] != 0]
        if not nz:
            continue
        a[r], a[nz[0]] = a[nz[0]], a[r]
        for i in range(r + 1, len(a)):
            if a[i][c] != 0:
                x, y = a[r][c], a[i][c]
                g, p, q = ext_gcd(x, y)
                s, t = -y // g, x // g
                ra, ri = a[r], a[i]
                a[r] = [p * v + q * w for v, w in zip(ra, ri)]
                a[i] = [s * v + t * w for v, w in zip(ra, ri)]
        if a[r][c] < 0:
            a[r] = [-v for v in a[r]]
        d = a[r][c]
        for i in range(r):
            f = a[i][c] // d
            if f:
                a[i] = [v - f * w for v, w in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def reduce_modulo(u: Sequence[int], lattice_rows: Sequence[Sequence[int]], n: int) -> IntVec:
    """Canonical representative of u + (integer span of lattice_rows)."""
    red, pivots = row_hnf(lattice_rows, n)
    w = list(as_int_vector(u))
    for row, p in zip(red, pivots):
        f = w[p] // row[p]
        if f:
            w = [a - f * b for a, b in zip(w, row)]
    return tuple(w)
