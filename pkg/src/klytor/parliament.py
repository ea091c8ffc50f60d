"""Klyachko arrangement, its matroid, the parliament of polytopes, and h0 weights.

The global sections of weight u form E_u = intersection over rays of
E^rho_{<u, v_rho>}.  The parliament gives the same numbers as the matroid
rank of the ground vectors e whose polytope P_{v(e)} contains u.
"""

from __future__ import annotations

import math
import random
from itertools import combinations, product
from typing import Iterable, Sequence

from .klyachko import KlyachkoBundle, pl_valuation
from .linalg import Subspace, rank
from .plfunc import PLFunction, Polytope, polytope_of


class GenericityError(RuntimeError):
    """No generic ground set was found within the retry budget."""


class Arrangement:
    """Subspaces of Q^r closed under intersection, always containing {0} and E."""

    def __init__(self, ambient_dim: int, subspaces: Iterable[Subspace]):
        self.ambient_dim = ambient_dim
        members = intersection_closure(ambient_dim, subspaces)
        self.subspaces = tuple(sorted(members, key=Subspace.sort_key))
        self._index = {s: i for i, s in enumerate(self.subspaces)}

    def __len__(self):
        return len(self.subspaces)

    def __iter__(self):
        return iter(self.subspaces)

    def __contains__(self, s):
        return s in self._index

    def __getitem__(self, i):
        return self.subspaces[i]

    def index(self, s: Subspace) -> int:
        return self._index[s]

    def __eq__(self, other):
        return isinstance(other, Arrangement) and self.subspaces == other.subspaces

    def __hash__(self):
        return hash(self.subspaces)

    def __repr__(self):
        return f"Arrangement(dims={[s.dim for s in self.subspaces]})"

    def irreducible_members(self) -> list[int]:
        """Indices of the nonzero members that are not the sum of the members strictly inside them."""
        out = []
        for i, s in enumerate(self.subspaces):
            if s.is_zero():
                continue
            inner = Subspace.zero(self.ambient_dim)
            for t in self.subspaces:
                if t < s:
                    inner = inner + t
            if inner != s:
                out.append(i)
        return out


def intersection_closure(r: int, subspaces: Iterable[Subspace]) -> set:
    members = {Subspace.zero(r), Subspace.full(r)}
    members.update(subspaces)
    frontier = list(members)
    while frontier:
        new = []
        current = list(members)
        for a in frontier:
            for b in current:
                c = a & b
                if c not in members:
                    members.add(c)
                    new.append(c)
        frontier = new
    return members


def klyachko_arrangement(b: KlyachkoBundle) -> Arrangement:
    subs = [s for f in b.filtrations for s in f.subspaces]
    return Arrangement(b.rank, subs)


def character_arrangement(b: KlyachkoBundle, weight_box=None) -> Arrangement:
    """Closure of the weight spaces E_u for u in the box (default: the parliament box)."""
    points = _box_points(weight_box if weight_box is not None else parliament_box(b))
    return Arrangement(b.rank, (b.weight_space(u) for u in points))


def _box_points(box):
    if box is None:
        return []
    lo, hi = box
    return [tuple(p) for p in product(*[range(a, c + 1) for a, c in zip(lo, hi)])]


class MatroidRealization:
    """Ground vectors, each drawn from an irreducible member of an arrangement."""

    def __init__(self, arrangement: Arrangement, ground: Sequence[tuple[tuple, int]], seed: int):
        self.arrangement = arrangement
        self.ground = tuple((tuple(v), i) for v, i in ground)
        self.seed = seed

    @property
    def vectors(self) -> list:
        return [v for v, _ in self.ground]

    def __len__(self):
        return len(self.ground)

    def rank(self, indices: Iterable[int]) -> int:
        rows = [self.ground[i][0] for i in indices]
        return rank(rows, self.arrangement.ambient_dim) if rows else 0

    def bases(self) -> list[tuple]:
        r = self.rank(range(len(self.ground)))
        return [c for c in combinations(range(len(self.ground)), r) if self.rank(c) == r]

    def __repr__(self):
        return f"MatroidRealization(size={len(self.ground)}, seed={self.seed})"


def _random_basis(sub: Subspace, rng: random.Random, bound: int) -> list:
    basis = sub.basis
    while True:
        coeffs = [[rng.randint(-bound, bound) for _ in basis] for _ in basis]
        vecs = [tuple(sum(c * b[j] for c, b in zip(row, basis)) for j in range(sub.ambient_dim))
                for row in coeffs]
        if rank(vecs, sub.ambient_dim) == len(basis):
            return vecs


def is_generic(arr: Arrangement, ground: Sequence[tuple[tuple, int]]) -> bool:
    """For independent B0 and e_i outside B0: e_i in span(B0) iff its source U_i is.

    Any span of ground vectors is the span of an independent subset, so it is
    enough to run over independent subsets.
    """
    r = arr.ambient_dim
    n = len(ground)
    for size in range(0, r + 1):
        for subset in combinations(range(n), size):
            rows = [ground[j][0] for j in subset]
            if size and rank(rows, r) < size:
                continue
            span = Subspace(r, rows)
            for i in range(n):
                if i in subset:
                    continue
                if span.contains(ground[i][0]) != (arr[ground[i][1]] <= span):
                    return False
    return True


def generic_ground_set(arr: Arrangement, seed: int = 0, retries: int = 25) -> MatroidRealization:
    """Random bases of the irreducible members, verified generic; retries widen the coefficients."""
    rng = random.Random(seed)
    sources = arr.irreducible_members()
    bound = 3
    for _ in range(retries):
        ground = []
        for i in sources:
            ground.extend((v, i) for v in _random_basis(arr[i], rng, bound))
        if is_generic(arr, ground):
            return MatroidRealization(arr, ground, seed)
        bound = min(bound * 4, 2 ** 16)
    raise GenericityError(f"no generic ground set after {retries} draws (seed {seed}); try another seed")


class ParliamentEntry:
    __slots__ = ("index", "vector", "source", "pl", "polytope")

    def __init__(self, index: int, vector, source: int, pl: PLFunction, polytope: Polytope):
        self.index = index
        self.vector = tuple(vector)
        self.source = source
        self.pl = pl
        self.polytope = polytope

    def __repr__(self):
        return f"ParliamentEntry({self.index}, vertices={list(self.polytope.vertices)})"


def parliament(b: KlyachkoBundle, arr: Arrangement | None = None, seed: int = 0,
               realization: MatroidRealization | None = None) -> list[ParliamentEntry]:
    if not b.is_integral:
        raise ValueError("the parliament needs integral filtration levels")
    if realization is None:
        realization = generic_ground_set(arr if arr is not None else klyachko_arrangement(b), seed)
    out = []
    for j, (e, src) in enumerate(realization.ground):
        pl = pl_valuation(b, e)
        out.append(ParliamentEntry(j, e, src, pl, polytope_of(pl)))
    return out


def parliament_box(b: KlyachkoBundle, entries: Sequence[ParliamentEntry] | None = None):
    """Bounding box of all parliament polytope vertices, padded by 1; None if all are empty."""
    if entries is None:
        entries = parliament(b)
    verts = [v for en in entries for v in en.polytope.vertices]
    if not verts:
        return None
    n = b.fan.rank
    lo = [math.floor(min(v[i] for v in verts)) - 1 for i in range(n)]
    hi = [math.ceil(max(v[i] for v in verts)) + 1 for i in range(n)]
    return lo, hi


def h0_weight_dim_direct(b: KlyachkoBundle, u: Sequence) -> int:
    return b.weight_space(u).dim


def h0_weight_dim_matroid(b: KlyachkoBundle, u: Sequence, realization: MatroidRealization,
                          entries: Sequence[ParliamentEntry] | None = None) -> int:
    """Matroid rank of the ground vectors whose parliament polytope contains u."""
    if entries is None:
        entries = parliament(b, realization=realization)
    chosen = [en.index for en in entries if en.polytope.contains(u)]
    return realization.rank(chosen)


def h0_all(b: KlyachkoBundle, seed: int = 0, cross_check: bool = True) -> dict:
    """Character -> dim H^0_u, over the parliament box, nonzero entries only."""
    if not b.fan.is_complete():
        raise ValueError("h0 needs a complete fan")
    realization = generic_ground_set(klyachko_arrangement(b), seed)
    entries = parliament(b, realization=realization)
    out = {}
    for u in _box_points(parliament_box(b, entries)):
        d = h0_weight_dim_direct(b, u)
        if cross_check:
            m = h0_weight_dim_matroid(b, u, realization, entries)
            if m != d:
                raise AssertionError(f"weight {u}: direct {d} but matroid {m}")
        if d:
            out[u] = d
    return out
