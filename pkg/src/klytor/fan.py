"""Rational polyhedral cones and fans in N = Z^n.

Cones keep both descriptions: extreme ray generators and inner facet normals
(plus equations cutting out their linear span).  Fans are stored face closed,
with cones keyed by the frozenset of their ray indices.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import (IntVec, as_int_vector, integer_kernel, integer_solve, is_primitive,
                      primitive, reduce_modulo)
from .linalg import dot, kernel, rank


class FanError(ValueError):
    """Malformed cone or fan input."""


def _sign_normalized_kernel_ray(rows, n):
    ker = kernel(rows, n)
    if len(ker) != 1:
        return None
    return ker[0]


def _extreme_rays(ineqs: Sequence[Sequence], eqs: Sequence[Sequence], n: int) -> list[IntVec]:
    """Extreme rays of {x : <a,x> >= 0 for a in ineqs, <e,x> = 0 for e in eqs}.

    The cone must be pointed.  Each extreme ray is the kernel line of a set of
    tight constraints of rank n-1.
    """
    r_eq = rank(eqs, n) if eqs else 0
    if r_eq == n:
        return []
    need = n - 1 - r_eq
    ineqs = [tuple(a) for a in ineqs]
    found = set()
    for subset in combinations(range(len(ineqs)), need):
        rows = list(eqs) + [ineqs[i] for i in subset]
        d = _sign_normalized_kernel_ray(rows, n)
        if d is None:
            continue
        vals = [dot(a, d) for a in ineqs]
        if all(v >= 0 for v in vals):
            if all(v == 0 for v in vals):
                raise FanError("cone is not pointed (contains a line)")
            found.add(primitive(d))
        elif all(v <= 0 for v in vals):
            found.add(primitive(tuple(-x for x in d)))
    return sorted(found)


class Cone:
    """Strictly convex rational polyhedral cone given by generators."""

    __slots__ = ("ambient_dim", "generators", "facets", "equations", "dim", "__dict__")

    def __init__(self, generators: Iterable[Sequence], ambient_dim: int | None = None):
        gens = [primitive(g) for g in generators if any(x != 0 for x in g)]
        if ambient_dim is None:
            if not gens:
                raise FanError("ambient dimension needed for the zero cone")
            ambient_dim = len(gens[0])
        n = ambient_dim
        if any(len(g) != n for g in gens):
            raise FanError("generators of mixed dimension")
        gens = sorted(set(gens))
        eqs = integer_kernel(gens, n) if gens else integer_kernel([], n)
        d = n - len(eqs)
        facets = set()
        if d > 0:
            for subset in combinations(gens, d - 1):
                rows = list(subset) + list(eqs)
                f = _sign_normalized_kernel_ray(rows, n)
                if f is None:
                    continue
                vals = [dot(f, g) for g in gens]
                if all(v >= 0 for v in vals):
                    facets.add(primitive(f))
                elif all(v <= 0 for v in vals):
                    facets.add(primitive(tuple(-x for x in f)))
        facets = sorted(facets)
        # pointedness: facets and equations must cut out {0}
        if d > 0 and rank(list(facets) + list(eqs), n) < n:
            raise FanError(f"cone generated by {gens} is not strictly convex")
        extreme = []
        for g in gens:
            tight = [f for f in facets if dot(f, g) == 0]
            if rank(tight + list(eqs), n) == n - 1:
                extreme.append(g)
        self.ambient_dim = n
        self.generators = tuple(extreme)
        self.facets = tuple(facets)
        self.equations = tuple(eqs)
        self.dim = d

    @classmethod
    def from_inequalities(cls, ineqs, eqs, n: int) -> "Cone":
        return cls(_extreme_rays(ineqs, eqs, n), n)

    def __eq__(self, other):
        return isinstance(other, Cone) and self.generators == other.generators \
            and self.ambient_dim == other.ambient_dim

    def __hash__(self):
        return hash((self.ambient_dim, self.generators))

    def __repr__(self):
        return f"Cone({list(self.generators)})"

    def contains(self, x: Sequence) -> bool:
        return all(dot(f, x) >= 0 for f in self.facets) and all(dot(e, x) == 0 for e in self.equations)

    def contains_in_relative_interior(self, x: Sequence) -> bool:
        return all(dot(f, x) > 0 for f in self.facets) and all(dot(e, x) == 0 for e in self.equations)

    @cached_property
    def interior_point(self) -> tuple:
        """Sum of the generators: a lattice point in the relative interior."""
        n = self.ambient_dim
        return tuple(sum(g[i] for g in self.generators) for i in range(n))

    def intersect(self, other: "Cone") -> "Cone":
        return Cone.from_inequalities(self.facets + other.facets,
                                      self.equations + other.equations, self.ambient_dim)

    def split(self, form: Sequence) -> list["Cone"]:
        """Pieces of the cone on each side of the hyperplane <form, x> = 0 (full dim only)."""
        if all(dot(form, g) >= 0 for g in self.generators) or \
                all(dot(form, g) <= 0 for g in self.generators):
            return [self]
        out = []
        for sign in (1, -1):
            f = tuple(sign * Fraction(x) for x in form)
            piece = Cone.from_inequalities(self.facets + (f,), self.equations, self.ambient_dim)
            if piece.dim == self.dim:
                out.append(piece)
        return out

    def split_by_min(self, forms: Sequence[Sequence]) -> list[tuple["Cone", int]]:
        """Regions of the cone where a given linear form attains min over ``forms``.

        Returns (region, index) pairs for the full-dimensional regions only.
        Duplicate forms are merged onto their first index.
        """
        distinct: dict = {}
        for i, f in enumerate(forms):
            distinct.setdefault(tuple(Fraction(x) for x in f), i)
        if len(distinct) == 1:
            return [(self, next(iter(distinct.values())))]
        out = []
        items = list(distinct.items())
        for f, i in items:
            extra = tuple(tuple(g - a for g, a in zip(h, f)) for h, _ in items if h != f)
            region = Cone.from_inequalities(self.facets + extra, self.equations, self.ambient_dim)
            if region.dim == self.dim:
                out.append((region, i))
        return out

    def faces(self) -> list[tuple]:
        """All faces as sorted generator tuples (including the zero face and the cone)."""
        incid = [frozenset(g for g in self.generators if dot(f, g) == 0) for f in self.facets]
        faces = {frozenset(self.generators)}
        frontier = [frozenset(self.generators)]
        while frontier:
            nxt = []
            for face in frontier:
                for s in incid:
                    g = face & s
                    if g not in faces:
                        faces.add(g)
                        nxt.append(g)
            frontier = nxt
        faces.add(frozenset())
        return [tuple(sorted(f)) for f in faces]


def cone_contains(c: Cone, x: Sequence) -> bool:
    return c.contains(x)


class Fan:
    """A rational polyhedral fan given by rays and maximal cones (ray index tuples)."""

    def __init__(self, rays: Sequence[Sequence[int]], maximal_cones: Sequence[Sequence[int]],
                 check: bool = True):
        rays = [as_int_vector(r) for r in rays]
        if not rays and not maximal_cones:
            raise FanError("empty fan")
        n = len(rays[0]) if rays else None
        for r in rays:
            if len(r) != n:
                raise FanError("rays of mixed dimension")
            if not is_primitive(r):
                raise FanError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise FanError("duplicate rays")
        self.rays: tuple[IntVec, ...] = tuple(rays)
        self.rank = n
        cones = []
        for mc in maximal_cones:
            idx = tuple(sorted({int(i) for i in mc}))
            if not idx:
                raise FanError("a maximal cone needs at least one ray")
            if any(i < 0 or i >= len(rays) for i in idx):
                raise FanError(f"maximal cone {list(mc)} refers to a missing ray")
            if idx in cones:
                raise FanError(f"maximal cone {list(mc)} listed twice")
            cones.append(idx)
        self.maximal_cones: tuple[tuple[int, ...], ...] = tuple(cones)
        self._cone_cache: dict = {}
        for mc in self.maximal_cones:
            c = self.cone(mc)
            if set(c.generators) != {self.rays[i] for i in mc}:
                raise FanError(f"maximal cone {list(mc)} lists a ray that is not extreme")
        if check:
            self._check_fan()

    # ---- basic access -------------------------------------------------
    def cone(self, key: Iterable[int]) -> Cone:
        key = frozenset(key)
        c = self._cone_cache.get(key)
        if c is None:
            c = Cone([self.rays[i] for i in key], self.rank)
            self._cone_cache[key] = c
        return c

    def maximal_cone(self, k: int) -> Cone:
        return self.cone(self.maximal_cones[k])

    def ray_index(self, v: Sequence[int]) -> int:
        return self._ray_lookup[tuple(v)]

    @cached_property
    def _ray_lookup(self):
        return {r: i for i, r in enumerate(self.rays)}

    @cached_property
    def _canonical(self):
        return frozenset(tuple(sorted(self.rays[i] for i in mc)) for mc in self.maximal_cones)

    def __eq__(self, other):
        """Equal as sets of cones (ray order does not matter)."""
        return isinstance(other, Fan) and self.rank == other.rank and \
            self._canonical == other._canonical

    def __hash__(self):
        return hash(self._canonical)

    def __repr__(self):
        return f"Fan(rank={self.rank}, rays={list(self.rays)}, maximal_cones={list(self.maximal_cones)})"

    @cached_property
    def cones(self) -> dict:
        """Face closure: frozenset of ray indices -> Cone."""
        out = {}
        for mc in self.maximal_cones:
            c = self.cone(mc)
            for face in c.faces():
                key = frozenset(self.ray_index(g) for g in face)
                if key not in out:
                    out[key] = self.cone(key) if key else Cone([], self.rank)
        return out

    def cones_of_dim(self, d: int) -> list[frozenset]:
        return sorted((k for k, c in self.cones.items() if c.dim == d), key=sorted)

    def rays_of(self, k: int) -> tuple[int, ...]:
        return self.maximal_cones[k]

    def cones_containing_ray(self, i: int) -> list[int]:
        return [k for k, mc in enumerate(self.maximal_cones) if i in mc]

    def find_maximal_cone(self, x: Sequence) -> int:
        """Index of the first maximal cone containing x."""
        for k in range(len(self.maximal_cones)):
            if self.maximal_cone(k).contains(x):
                return k
        raise FanError(f"point {tuple(x)} is outside the support of the fan")

    def maximal_cones_containing(self, x: Sequence) -> list[int]:
        return [k for k in range(len(self.maximal_cones)) if self.maximal_cone(k).contains(x)]

    # ---- structure ----------------------------------------------------
    def _check_fan(self):
        for k in range(len(self.maximal_cones)):
            for l in range(k + 1, len(self.maximal_cones)):
                a, b = self.maximal_cones[k], self.maximal_cones[l]
                ca, cb = self.maximal_cone(k), self.maximal_cone(l)
                inter = ca.intersect(cb)
                common = sorted(set(a) & set(b))
                expect = tuple(sorted(self.rays[i] for i in common))
                if inter.generators != expect:
                    raise FanError(f"cones {list(a)} and {list(b)} do not meet in a common face")
                gens = tuple(self.rays[i] for i in common)
                fa = {tuple(f) for f in ca.faces()}
                fb = {tuple(f) for f in cb.faces()}
                key = tuple(sorted(gens))
                if key not in fa or key not in fb:
                    raise FanError(f"cones {list(a)} and {list(b)} do not meet in a common face")

    def walls(self) -> list[tuple[frozenset, list[int]]]:
        """Codimension-one faces of maximal cones with the maximal cones containing them."""
        n = self.rank
        found: dict = {}
        for k, mc in enumerate(self.maximal_cones):
            c = self.maximal_cone(k)
            if c.dim != n:
                continue
            for face in c.faces():
                key = frozenset(self.ray_index(g) for g in face)
                fc = self.cones[key]
                if fc.dim == n - 1:
                    found.setdefault(key, []).append(k)
        return sorted(found.items(), key=lambda kv: (sorted(kv[0]), kv[1]))

    def is_complete(self) -> bool:
        n = self.rank
        if any(self.maximal_cone(k).dim != n for k in range(len(self.maximal_cones))):
            return False
        walls = self.walls()
        if any(len(ks) != 2 for _, ks in walls):
            return False
        adj = {k: set() for k in range(len(self.maximal_cones))}
        for _, (a, b) in walls:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            k = stack.pop()
            for j in adj[k]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(self.maximal_cones)

    def is_simplicial(self) -> bool:
        return all(len(mc) == self.maximal_cone(k).dim for k, mc in enumerate(self.maximal_cones))

    def refines(self, coarse: "Fan") -> bool:
        """Every maximal cone of self lies in some maximal cone of ``coarse``."""
        for k in range(len(self.maximal_cones)):
            c = self.maximal_cone(k)
            p = c.interior_point
            hits = [j for j in coarse.maximal_cones_containing(p)]
            if not any(all(coarse.maximal_cone(j).contains(g) for g in c.generators) for j in hits):
                return False
        return True

    def coarse_cone_of(self, coarse: "Fan") -> list[int]:
        """For each maximal cone of self, a maximal cone of ``coarse`` containing it."""
        out = []
        for k in range(len(self.maximal_cones)):
            c = self.maximal_cone(k)
            for j in coarse.maximal_cones_containing(c.interior_point):
                if all(coarse.maximal_cone(j).contains(g) for g in c.generators):
                    out.append(j)
                    break
            else:
                raise FanError("fan is not a refinement")
        return out


def fan_from_cones(cones: Iterable[Cone], n: int) -> Fan:
    """Assemble a fan from a collection of cones assumed to form one."""
    cones = list(dict.fromkeys(cones))
    rays = sorted({g for c in cones for g in c.generators})
    look = {r: i for i, r in enumerate(rays)}
    mcs = [tuple(look[g] for g in c.generators) for c in cones]
    return Fan(rays, mcs, check=False)


def common_refinement(f1: Fan, f2: Fan) -> Fan:
    if f1 == f2:
        return f1
    if f1.rank != f2.rank:
        raise FanError("fans live in lattices of different rank")
    pieces = []
    for a in range(len(f1.maximal_cones)):
        ca = f1.maximal_cone(a)
        for b in range(len(f2.maximal_cones)):
            cb = f2.maximal_cone(b)
            inter = ca.intersect(cb)
            if inter.dim == max(ca.dim, cb.dim) and inter.dim > 0:
                pieces.append(inter)
    if not pieces:
        raise FanError("fans have disjoint supports")
    out = fan_from_cones(pieces, f1.rank)
    return out


def subdivide_by_hyperplanes(f: Fan, cuts: Sequence[Sequence]) -> Fan:
    """Cut every maximal cone by the hyperplanes <c, x> = 0."""
    if not cuts:
        return f
    pieces = []
    for k in range(len(f.maximal_cones)):
        cur = [f.maximal_cone(k)]
        for c in cuts:
            cur = [p for q in cur for p in q.split(c)]
        pieces.extend(cur)
    return fan_from_cones(pieces, f.rank)


def subdivide_per_cone(f: Fan, forms_per_cone: Sequence[Sequence[Sequence]]) -> Fan:
    """Cut each maximal cone k by its own hyperplanes ``forms_per_cone[k]``.

    The result is a fan provided each cut comes from a continuous piecewise
    linear function (difference of two PL functions), which is how callers use it.
    """
    pieces = []
    for k in range(len(f.maximal_cones)):
        cur = [f.maximal_cone(k)]
        for c in forms_per_cone[k]:
            if all(x == 0 for x in c):
                continue
            cur = [p for q in cur for p in q.split(c)]
        pieces.extend(cur)
    return fan_from_cones(pieces, f.rank)


def subdivide_by_min(f: Fan, forms_per_cone: Sequence[Sequence[Sequence]]):
    """Split each maximal cone into the regions where one of its forms is minimal.

    Returns (fan, assignment) with assignment[k'] = (old cone index, form index)
    for each maximal cone k' of the new fan.
    """
    pieces = []
    for k in range(len(f.maximal_cones)):
        for region, i in f.maximal_cone(k).split_by_min(forms_per_cone[k]):
            pieces.append((region, k, i))
    fan = fan_from_cones([p[0] for p in pieces], f.rank)
    index = {fan.maximal_cone(j).generators: j for j in range(len(fan.maximal_cones))}
    assign = [None] * len(fan.maximal_cones)
    for region, k, i in pieces:
        assign[index[region.generators]] = (k, i)
    return fan, assign


class WallData:
    __slots__ = ("tau", "sigma", "sigma_prime", "w_tau", "v_tau")

    def __init__(self, tau, sigma, sigma_prime, w_tau, v_tau):
        self.tau = tau
        self.sigma = sigma
        self.sigma_prime = sigma_prime
        self.w_tau = w_tau
        self.v_tau = v_tau

    def __iter__(self):
        return iter((self.sigma, self.sigma_prime, self.w_tau, self.v_tau))

    def __repr__(self):
        return (f"WallData(tau={sorted(self.tau)}, sigma={self.sigma}, sigma_prime={self.sigma_prime}, "
                f"w_tau={self.w_tau}, v_tau={self.v_tau})")


def wall_data(f: Fan, tau: Iterable[int], sigma: int | None = None) -> WallData:
    """Neighbouring maximal cones of a wall, the normal w_tau and a dual vector v_tau."""
    key = frozenset(tau)
    neighbours = [ks for k, ks in f.walls() if k == key]
    if not neighbours or len(neighbours[0]) != 2:
        raise FanError(f"{sorted(key)} is not a wall of the fan")
    a, b = neighbours[0]
    if sigma is not None:
        if sigma not in (a, b):
            raise FanError(f"maximal cone {sigma} does not contain the wall")
        a, b = (sigma, b if sigma == a else a)
    n = f.rank
    tau_gens = [f.rays[i] for i in key]
    ker = integer_kernel(tau_gens, n)
    if len(ker) != 1:
        raise FanError("wall is not of codimension one")
    w = primitive(ker[0])
    sig = f.maximal_cone(a)
    if any(dot(w, g) < 0 for g in sig.generators):
        w = tuple(-x for x in w)
    v0 = integer_solve([w], [1], n)
    s = tuple(sum(g[i] for g in tau_gens) for i in range(n))
    v = v0
    while not sig.contains(v):
        v = tuple(x + y for x, y in zip(v, s))
    return WallData(key, a, b, w, v)


def class_in_M_sigma(u: Sequence[int], sigma: Cone) -> IntVec:
    """Canonical representative of u modulo the sublattice sigma^perp ∩ M."""
    n = sigma.ambient_dim
    perp = integer_kernel(sigma.generators, n)
    if not perp:
        return as_int_vector(u)
    return reduce_modulo(u, perp, n)


# ---- standard fans ------------------------------------------------------

def projective_space_fan(n: int) -> Fan:
    rays = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
    rays.append(tuple([-1] * n))
    cones = [tuple(j for j in range(n + 1) if j != i) for i in range(n + 1)]
    return Fan(rays, cones)


def product_of_lines_fan(n: int = 2) -> Fan:
    """Fan of (P^1)^n: the coordinate orthants."""
    rays = []
    for i in range(n):
        for s in (1, -1):
            rays.append(tuple(s if j == i else 0 for j in range(n)))
    cones = []
    for signs in range(2 ** n):
        cones.append(tuple(2 * i + ((signs >> i) & 1) for i in range(n)))
    return Fan(rays, cones, check=n <= 3)


def hirzebruch_fan(a: int) -> Fan:
    rays = [(1, 0), (0, 1), (-1, a), (0, -1)]
    cones = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return Fan(rays, cones)


def line_fan() -> Fan:
    return Fan([(1,), (-1,)], [(0,), (1,)])
