"""Exact rational linear algebra.

Everything here works over ``fractions.Fraction``.  Subspaces are stored by
the reduced row echelon form of a spanning set, so two subspaces are equal
exactly when their stored matrices are equal.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple  # tuple of Fraction


class DimensionError(ValueError):
    pass


def rat(x) -> Fraction:
    """Parse an int, Fraction or a string ``"p/q"`` into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def rat_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def vec(xs: Iterable) -> Vec:
    return tuple(rat(x) for x in xs)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def is_zero(v: Sequence) -> bool:
    return all(x == 0 for x in v)


def rref(rows: Iterable[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    m = []
    for r in rows:
        if len(r) != ncols:
            raise DimensionError(f"row of length {len(r)} in a space of dimension {ncols}")
        m.append([rat(x) for x in r])
    pivots = []
    row = 0
    for col in range(ncols):
        if row == len(m):
            break
        piv = next((i for i in range(row, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        p = m[row][col]
        if p != 1:
            m[row] = [x / p for x in m[row]]
        for i in range(len(m)):
            if i != row and m[i][col] != 0:
                f = m[i][col]
                ri = m[i]
                rr = m[row]
                m[i] = [a - f * b for a, b in zip(ri, rr)]
        pivots.append(col)
        row += 1
    return m[:row], pivots


def rank(rows: Iterable[Sequence], ncols: int) -> int:
    return len(rref(rows, ncols)[1])


def kernel(rows: Sequence[Sequence], ncols: int) -> list[Vec]:
    """Basis of {x : <row, x> = 0 for every row}."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in zip(red, pivots):
            x[p] = -r[f]
        basis.append(tuple(x))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence, ncols: int):
    """One solution x of ``rows . x = rhs`` (free variables set to 0), or None."""
    aug = [list(r) + [rat(b)] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, p in zip(red, pivots):
        x[p] = r[ncols]
    return tuple(x)


def integral_scale(v: Sequence) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to a primitive integer vector."""
    from math import gcd

    den = 1
    for x in v:
        x = rat(x)
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(rat(x) * den) for x in v]
    g = 0
    for a in ints:
        g = gcd(g, a)
    if g == 0:
        return tuple(ints)
    return tuple(a // g for a in ints)


class Subspace:
    """A subspace of Q^n held as the RREF of a spanning set."""

    __slots__ = ("ambient_dim", "basis", "_pivots", "_hash")

    def __init__(self, ambient_dim: int, rows: Iterable[Sequence] = ()):
        red, piv = rref(rows, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis = tuple(tuple(r) for r in red)
        self._pivots = tuple(piv)
        self._hash = None

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, [])

    @classmethod
    def span(cls, *vectors: Sequence) -> "Subspace":
        if not vectors:
            raise ValueError("span() of nothing needs an ambient dimension; use Subspace.zero")
        return cls(len(vectors[0]), vectors)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_zero(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    def _check(self, other: "Subspace"):
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError(
                f"subspaces of Q^{self.ambient_dim} and Q^{other.ambient_dim}")

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ambient_dim, self.basis))
        return self._hash

    def __repr__(self):
        rows = ", ".join("(" + ", ".join(rat_str(x) for x in r) + ")" for r in self.basis)
        return f"Subspace({self.ambient_dim}, [{rows}])"

    def sort_key(self):
        return (self.dim, tuple(tuple((x.numerator, x.denominator) for x in r) for r in self.basis))

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if other.is_zero() or self.is_full():
            return self
        if self.is_zero() or other.is_full():
            return other
        return Subspace(self.ambient_dim, self.basis + other.basis)

    def annihilator(self) -> list[Vec]:
        return kernel(self.basis, self.ambient_dim)

    def __and__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.is_full() or other.is_zero():
            return other
        if other.is_full() or self.is_zero():
            return self
        eqs = self.annihilator() + other.annihilator()
        return Subspace(self.ambient_dim, kernel(eqs, self.ambient_dim))

    intersect = __and__

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(v)} in Q^{self.ambient_dim}")
        w = [rat(x) for x in v]
        for r, p in zip(self.basis, self._pivots):
            c = w[p]
            if c != 0:
                w = [a - c * b for a, b in zip(w, r)]
        return all(x == 0 for x in w)

    __contains__ = contains

    def __le__(self, other: "Subspace") -> bool:
        self._check(other)
        if self.dim > other.dim:
            return False
        return all(other.contains(r) for r in self.basis)

    def __lt__(self, other: "Subspace") -> bool:
        return self.dim < other.dim and self <= other

    def complement_in(self, bigger: "Subspace") -> list[Vec]:
        """Vectors of ``bigger``'s basis extending a basis of self to one of ``bigger``."""
        self._check(bigger)
        out = []
        cur = self
        for r in bigger.basis:
            if not cur.contains(r):
                out.append(r)
                cur = Subspace(self.ambient_dim, cur.basis + (r,))
        return out


def canonicalize(rows: Sequence[Sequence], ambient_dim: int | None = None) -> Subspace:
    if ambient_dim is None:
        if not rows:
            raise DimensionError("cannot infer the ambient dimension of an empty row list")
        ambient_dim = len(rows[0])
    return Subspace(ambient_dim, rows)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    return a & b


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return a + b


def contains(a: Subspace, e: Sequence) -> bool:
    return a.contains(e)


def coords_in_frame(frame: Sequence, e: Sequence) -> list[Vec]:
    """Split ``e`` into its components along the lines of a frame.

    ``frame`` holds one spanning vector (or a 1-dim Subspace) per line.  The
    components sum to ``e`` exactly.
    """
    gens = [line.basis[0] if isinstance(line, Subspace) else vec(line) for line in frame]
    r = len(e)
    if len(gens) != r or any(len(g) != r for g in gens):
        raise DimensionError("a frame of Q^r needs r lines in Q^r")
    if isinstance(frame[0], Subspace) and any(line.dim != 1 for line in frame):
        raise DimensionError("frame lines must be one-dimensional")
    # columns are the generators: sum_j c_j g_j = e
    cols = [[gens[j][i] for j in range(r)] for i in range(r)]
    if rank(cols, r) != r:
        raise DimensionError("lines do not form a direct sum decomposition")
    c = solve(cols, vec(e), r)
    return [tuple(c[j] * x for x in gens[j]) for j in range(r)]


def frame_coefficients(gens: Sequence[Sequence], e: Sequence) -> Vec:
    """Coefficients of ``e`` in the basis ``gens``."""
    r = len(e)
    cols = [[gens[j][i] for j in range(r)] for i in range(r)]
    c = solve(cols, vec(e), r)
    if c is None:
        raise DimensionError("vector not in the span of the frame")
    return c


class Flag:
    """Strictly increasing chain of subspaces ending in the whole space."""

    __slots__ = ("subspaces",)

    def __init__(self, subspaces: Sequence[Subspace]):
        subs = tuple(subspaces)
        if not subs:
            raise ValueError("a flag has at least one member (the whole space)")
        if not subs[-1].is_full():
            raise ValueError("the last member of a flag is the ambient space")
        for a, b in zip(subs, subs[1:]):
            if not a < b:
                raise ValueError("flag members must be strictly increasing")
        if subs[0].is_zero():
            raise ValueError("the zero subspace is implicit in a flag")
        self.subspaces = subs

    def __eq__(self, other):
        return isinstance(other, Flag) and self.subspaces == other.subspaces

    def __hash__(self):
        return hash(self.subspaces)

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __repr__(self):
        return f"Flag(dims={[s.dim for s in self.subspaces]})"
