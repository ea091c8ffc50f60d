"""Piecewise linear functions on complete fans, and polytopes.

A :class:`PLFunction` stores one linear functional per maximal cone of its
fan.  Binary operations move both arguments to a common refinement first.

Two polytopes are attached to a PL function, with opposite inequalities:

* ``polytope_of(phi)``   P_phi   = {y : <v, y> <= phi(v) for every ray v}
* ``delta_of(phi)``      Delta_phi = {y : <v, y> >= phi(v) for every ray v}
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Sequence

from .fan import (Cone, Fan, FanError, common_refinement, fan_from_cones, product_of_lines_fan,
                  subdivide_by_min)
from .linalg import dot, rank, rat, solve, vec


class PLError(ValueError):
    pass


class PLFunction:
    """Continuous function, linear on each maximal cone of a complete fan."""

    __slots__ = ("fan", "linear_parts", "__dict__")

    def __init__(self, fan: Fan, linear_parts: Sequence[Sequence], check: bool = True):
        if len(linear_parts) != len(fan.maximal_cones):
            raise PLError("one linear part per maximal cone is required")
        self.fan = fan
        self.linear_parts = tuple(vec(u) for u in linear_parts)
        if any(len(u) != fan.rank for u in self.linear_parts):
            raise PLError("linear part of the wrong dimension")
        if check:
            for i, r in enumerate(fan.rays):
                vals = {dot(self.linear_parts[k], r) for k in fan.cones_containing_ray(i)}
                if len(vals) > 1:
                    raise PLError(f"linear parts disagree on ray {r}")

    # ---- constructors -------------------------------------------------
    @classmethod
    def from_ray_values(cls, fan: Fan, values: Sequence) -> "PLFunction":
        values = [rat(v) for v in values]
        if len(values) != len(fan.rays):
            raise PLError("one value per ray is required")
        parts = []
        for k, mc in enumerate(fan.maximal_cones):
            rows = [fan.rays[i] for i in mc]
            u = solve(rows, [values[i] for i in mc], fan.rank)
            if u is None:
                raise PLError(f"ray values are not linear on maximal cone {list(mc)}")
            parts.append(u)
        return cls(fan, parts, check=False)

    @classmethod
    def linear(cls, u: Sequence, fan: Fan | None = None) -> "PLFunction":
        u = vec(u)
        if fan is None:
            fan = product_of_lines_fan(len(u))
        return cls(fan, [u] * len(fan.maximal_cones), check=False)

    @classmethod
    def constant_zero(cls, n: int, fan: Fan | None = None) -> "PLFunction":
        return cls.linear([0] * n, fan)

    @classmethod
    def min_of_linear(cls, forms: Sequence[Sequence], fan: Fan | None = None) -> "PLFunction":
        """x -> min_j <forms[j], x> as a PL function (on a refinement of ``fan``)."""
        forms = [vec(f) for f in forms]
        if not forms:
            raise PLError("min of no linear forms")
        n = len(forms[0])
        if fan is None:
            fan = product_of_lines_fan(n)
        new_fan, assign = subdivide_by_min(fan, [forms] * len(fan.maximal_cones))
        return cls(new_fan, [forms[i] for _, i in assign], check=False)

    # ---- evaluation ---------------------------------------------------
    @property
    def rank(self) -> int:
        return self.fan.rank

    def __call__(self, x: Sequence) -> Fraction:
        return self.eval(x)

    def eval(self, x: Sequence) -> Fraction:
        k = self.fan.find_maximal_cone(x)
        return dot(self.linear_parts[k], x)

    @cached_property
    def values_on_rays(self) -> tuple:
        out = []
        for i, r in enumerate(self.fan.rays):
            k = self.fan.cones_containing_ray(i)[0]
            out.append(dot(self.linear_parts[k], r))
        return tuple(out)

    @property
    def is_integral(self) -> bool:
        """Integer values on N; for full dimensional cones this means integral linear parts."""
        return all(x.denominator == 1 for u in self.linear_parts for x in u)

    def __repr__(self):
        return f"PLFunction(rays={list(self.fan.rays)}, values={[str(v) for v in self.values_on_rays]})"

    # ---- refinement ---------------------------------------------------
    def restrict_to(self, finer: Fan) -> "PLFunction":
        """Same function expressed on a refinement of its fan."""
        if finer is self.fan or (finer.rays == self.fan.rays
                                 and finer.maximal_cones == self.fan.maximal_cones):
            return self
        owner = finer.coarse_cone_of(self.fan)
        return PLFunction(finer, [self.linear_parts[j] for j in owner], check=False)

    # ---- arithmetic ---------------------------------------------------
    def __add__(self, other: "PLFunction") -> "PLFunction":
        return add_pl(self, other)

    def __neg__(self) -> "PLFunction":
        return PLFunction(self.fan, [tuple(-x for x in u) for u in self.linear_parts], check=False)

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        return add_pl(self, -other)

    def scale(self, c) -> "PLFunction":
        c = rat(c)
        return PLFunction(self.fan, [tuple(c * x for x in u) for u in self.linear_parts], check=False)

    def shift_linear(self, u: Sequence) -> "PLFunction":
        u = vec(u)
        return PLFunction(self.fan, [tuple(a + b for a, b in zip(p, u)) for p in self.linear_parts],
                          check=False)

    def __eq__(self, other):
        if not isinstance(other, PLFunction):
            return NotImplemented
        return pl_equal(self, other)

    __hash__ = None


def _common(fs: Sequence[PLFunction]):
    fan = fs[0].fan
    for f in fs[1:]:
        fan = common_refinement(fan, f.fan)
    return fan, [f.restrict_to(fan) for f in fs]


def add_pl(f: PLFunction, g: PLFunction) -> PLFunction:
    fan, (a, b) = _common([f, g])
    return PLFunction(fan, [tuple(x + y for x, y in zip(p, q))
                            for p, q in zip(a.linear_parts, b.linear_parts)], check=False)


def min_pl(*fs: PLFunction) -> PLFunction:
    """Pointwise minimum; the fan is cut where the arguments cross."""
    if len(fs) == 1:
        return fs[0]
    fan, parts = _common(list(fs))
    forms = [[p.linear_parts[k] for p in parts] for k in range(len(fan.maximal_cones))]
    new_fan, assign = subdivide_by_min(fan, forms)
    return PLFunction(new_fan, [forms[k][i] for k, i in assign], check=False)


def max_pl(*fs: PLFunction) -> PLFunction:
    return -min_pl(*[-f for f in fs])


def leq_pl(f: PLFunction, g: PLFunction) -> bool:
    """f(x) <= g(x) everywhere, decided at the generators of common refinement cones."""
    return _pl_witness(f, g) is None


def _pl_witness(f: PLFunction, g: PLFunction):
    """A point where f > g, or None."""
    if f.fan == g.fan and f.fan.rays == g.fan.rays and f.fan.maximal_cones == g.fan.maximal_cones:
        pairs = [(f.fan.maximal_cone(k), f.linear_parts[k], g.linear_parts[k])
                 for k in range(len(f.fan.maximal_cones))]
    else:
        pairs = []
        for a in range(len(f.fan.maximal_cones)):
            ca = f.fan.maximal_cone(a)
            for b in range(len(g.fan.maximal_cones)):
                cb = g.fan.maximal_cone(b)
                inter = ca.intersect(cb)
                if inter.dim == f.rank:
                    pairs.append((inter, f.linear_parts[a], g.linear_parts[b]))
    for cone, p, q in pairs:
        for gen in cone.generators:
            if dot(p, gen) > dot(q, gen):
                return gen
    return None


def pl_equal(f: PLFunction, g: PLFunction) -> bool:
    return leq_pl(f, g) and leq_pl(g, f)


# ---- polytopes -----------------------------------------------------------

class Polytope:
    """{y : <a, y> <= b for every (a, b)}; vertices are derived on demand."""

    __slots__ = ("ambient_dim", "inequalities", "__dict__")

    def __init__(self, inequalities: Iterable[tuple[Sequence, object]], ambient_dim: int):
        ineqs = []
        for a, b in inequalities:
            a = vec(a)
            if len(a) != ambient_dim:
                raise PLError("inequality of the wrong dimension")
            ineqs.append((a, rat(b)))
        self.ambient_dim = ambient_dim
        self.inequalities = tuple(dict.fromkeys(ineqs))

    def contains(self, y: Sequence) -> bool:
        return all(dot(a, y) <= b for a, b in self.inequalities)

    __contains__ = contains

    @cached_property
    def is_bounded(self) -> bool:
        n = self.ambient_dim
        normals = [a for a, _ in self.inequalities]
        if rank(normals, n) < n:
            return False
        from .fan import _extreme_rays
        # recession cone {y : <a,y> <= 0} is pointed here; bounded iff it has no rays
        return not _extreme_rays([tuple(-x for x in a) for a in normals], [], n)

    @cached_property
    def vertices(self) -> tuple:
        """Sorted vertex list (empty for the empty polytope)."""
        if not self.is_bounded:
            raise PLError("unbounded polytope has no vertex description")
        n = self.ambient_dim
        found = set()
        for subset in combinations(self.inequalities, n):
            rows = [a for a, _ in subset]
            if rank(rows, n) < n:
                continue
            y = solve(rows, [b for _, b in subset], n)
            if self.contains(y):
                found.add(y)
        return tuple(sorted(found))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def __eq__(self, other):
        if not isinstance(other, Polytope):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.vertices == other.vertices

    def __hash__(self):
        return hash(self.vertices)

    def __repr__(self):
        return "Polytope(vertices=[" + ", ".join(
            "(" + ", ".join(str(x) for x in v) + ")" for v in self.vertices) + "])"

    def bounding_box(self):
        vs = self.vertices
        if not vs:
            return None
        n = self.ambient_dim
        lo = [math.floor(min(v[i] for v in vs)) for i in range(n)]
        hi = [math.ceil(max(v[i] for v in vs)) for i in range(n)]
        return lo, hi


def lattice_points(p: Polytope) -> list[tuple[int, ...]]:
    if not p.is_bounded:
        raise PLError("lattice points of an unbounded polytope")
    box = p.bounding_box()
    if box is None:
        return []
    lo, hi = box
    pts = []
    for y in product(*[range(a, b + 1) for a, b in zip(lo, hi)]):
        if p.contains(y):
            pts.append(tuple(y))
    return pts


def polytope_of(phi: PLFunction) -> Polytope:
    """P_phi = {y : <v_rho, y> <= phi(v_rho)} over the rays of phi's fan."""
    return Polytope([(r, v) for r, v in zip(phi.fan.rays, phi.values_on_rays)], phi.rank)


def delta_of(phi: PLFunction) -> Polytope:
    """Delta_phi = {y : <v_rho, y> >= phi(v_rho)} over the rays of phi's fan."""
    return Polytope([(tuple(-x for x in r), -v) for r, v in zip(phi.fan.rays, phi.values_on_rays)],
                    phi.rank)


polytope_of_concave = delta_of


def support_function(delta: Polytope) -> PLFunction:
    """phi_Delta(x) = min over y in Delta of <x, y>."""
    vs = delta.vertices
    if not vs:
        raise PLError("support function of the empty polytope")
    return PLFunction.min_of_linear(vs)


def is_concave(phi: PLFunction) -> bool:
    """phi equals the support function of Delta_phi (equivalently: min of linear functions).

    Checked as: every linear part of phi lies in Delta_phi.
    """
    delta = delta_of(phi)
    return all(delta.contains(u) for u in phi.linear_parts)


def is_convex(phi: PLFunction) -> bool:
    """phi is a max of linear functions: every linear part lies in P_phi."""
    p = polytope_of(phi)
    return all(p.contains(u) for u in phi.linear_parts)


def concavity_witness(phi: PLFunction):
    """A cone whose linear extension dips below phi at some ray, or None if concave."""
    for k, u in enumerate(phi.linear_parts):
        for r, v in zip(phi.fan.rays, phi.values_on_rays):
            if dot(u, r) < v:
                return {"cone": k, "ray": r, "extension": dot(u, r), "value": v}
    return None
