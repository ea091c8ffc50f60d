"""Tropical points of linear ideals over the PL semifield.

A spanning set b_1..b_s of E gives the linear ideal of relations among the
b_i.  A tuple of PL functions (phi_1, ..., phi_s) is a tropical point when it
is the image of b_1..b_s under a PL valuation, and the valuation is then
unique.  Circuits of the column matroid give a fast necessary test; the
authoritative test is reconstructing the valuation.
"""

from __future__ import annotations

from functools import cached_property
from itertools import combinations
from typing import Sequence

from .fan import Fan, common_refinement, subdivide_per_cone
from .klyachko import (Filtration, KlyachkoBundle, VSValuation, build_bundle, pl_valuation,
                       valuation_to_filtration)
from .linalg import dot, kernel, rank, rat, vec
from .plfunc import PLFunction, _pl_witness, min_pl, pl_equal
from .semiring import PL, RATIONAL


class NotATropicalPoint(ValueError):
    """Refutation: at ``witness`` the minimum over ``circuit`` is attained only once."""

    def __init__(self, message: str, witness=None, circuit=None):
        self.witness = None if witness is None else tuple(witness)
        self.circuit = circuit
        super().__init__(message)


class Circuit:
    """Minimal linear relation sum_i c_i b_i = 0, first coefficient scaled to 1."""

    __slots__ = ("support", "coefficients")

    def __init__(self, support: Sequence[int], coefficients: Sequence):
        self.support = tuple(support)
        self.coefficients = tuple(rat(c) for c in coefficients)

    def __iter__(self):
        return iter(zip(self.support, self.coefficients))

    def __eq__(self, other):
        return isinstance(other, Circuit) and (self.support, self.coefficients) == (other.support, other.coefficients)

    def __hash__(self):
        return hash((self.support, self.coefficients))

    def __repr__(self):
        terms = " + ".join(f"{c}*x{i + 1}" for i, c in self)
        return f"Circuit({terms})"


class LinearConfiguration:
    """Spanning set b_1..b_s of E = Q^r, stored as a list of vectors."""

    def __init__(self, vectors: Sequence[Sequence]):
        self.vectors = tuple(vec(b) for b in vectors)
        if not self.vectors:
            raise ValueError("empty configuration")
        self.rank_dim = len(self.vectors[0])
        if any(len(b) != self.rank_dim for b in self.vectors):
            raise ValueError("vectors of different lengths")
        if any(all(x == 0 for x in b) for b in self.vectors):
            raise ValueError("zero vector in the configuration (its valuation would be infinite)")
        if rank(self.vectors, self.rank_dim) != self.rank_dim:
            raise ValueError("the vectors do not span E")

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence]) -> "LinearConfiguration":
        """From an r x s matrix whose columns are the b_i."""
        return cls([tuple(col) for col in zip(*rows)])

    @property
    def size(self) -> int:
        return len(self.vectors)

    def matrix(self) -> list:
        return [list(row) for row in zip(*self.vectors)]

    @cached_property
    def circuits(self) -> tuple:
        return tuple(circuits(self))

    def is_independent(self, indices: Sequence[int]) -> bool:
        return rank([self.vectors[i] for i in indices], self.rank_dim) == len(indices)

    def bases(self) -> list[tuple]:
        return [c for c in combinations(range(self.size), self.rank_dim) if self.is_independent(c)]


def circuits(cfg: LinearConfiguration) -> list[Circuit]:
    """All circuits, by support size then lexicographically."""
    out = []
    for size in range(2, cfg.rank_dim + 2):
        for support in combinations(range(cfg.size), size):
            # relations among the chosen columns
            rows = [[cfg.vectors[i][j] for i in support] for j in range(cfg.rank_dim)]
            ker = kernel(rows, size)
            if len(ker) != 1 or any(c == 0 for c in ker[0]):
                continue
            lead = ker[0][0]
            out.append(Circuit(support, [c / lead for c in ker[0]]))
    return out


# ---- real points ---------------------------------------------------------

def real_circuit_witness(a: Sequence, cfg: LinearConfiguration):
    """A circuit whose minimum is attained once at the real point a, or None."""
    for c in cfg.circuits:
        if not RATIONAL.is_tropically_singular([a[i] for i in c.support]):
            return c
    return None


def is_real_tropical(a: Sequence, cfg: LinearConfiguration) -> bool:
    return real_circuit_witness([rat(x) for x in a], cfg) is None


def _valuation_on_basis(a, cfg: LinearConfiguration, basis: Sequence[int]) -> VSValuation | None:
    v = VSValuation.adapted([cfg.vectors[i] for i in basis], [a[i] for i in basis])
    if all(v(b) == a[j] for j, b in enumerate(cfg.vectors)):
        return v
    return None


def consistent_bases(a: Sequence, cfg: LinearConfiguration) -> list[tuple]:
    """All bases B whose adapted valuation with values a|B gives a_j on every b_j."""
    a = [rat(x) for x in a]
    return [B for B in cfg.bases() if _valuation_on_basis(a, cfg, B) is not None]


def real_point_basis(a: Sequence, cfg: LinearConfiguration) -> tuple[tuple, VSValuation]:
    """Basis and valuation for a real tropical point.

    The greedy maximum-weight basis is tried first; other bases follow in
    order of decreasing weight until one is consistent.
    """
    a = [rat(x) for x in a]
    if len(a) != cfg.size:
        raise ValueError("point has the wrong length")
    bad = real_circuit_witness(a, cfg)
    if bad is not None:
        raise NotATropicalPoint("minimum over a circuit attained only once", circuit=bad)
    greedy = []
    for i in sorted(range(cfg.size), key=lambda i: (-a[i], i)):
        if cfg.is_independent(greedy + [i]):
            greedy.append(i)
    candidates = [tuple(sorted(greedy))]
    candidates += sorted((B for B in cfg.bases() if B != candidates[0]),
                         key=lambda B: (-sum(a[i] for i in B), B))
    for B in candidates:
        v = _valuation_on_basis(a, cfg, B)
        if v is not None:
            return B, v
    raise AssertionError("tropical real point without a consistent basis")


def real_point_to_valuation(a: Sequence, cfg: LinearConfiguration) -> VSValuation:
    return real_point_basis(a, cfg)[1]


def is_boundary_point(a: Sequence, cfg: LinearConfiguration) -> bool:
    """More than one basis is consistent with a (a lies on a wall of the matroid fan)."""
    return len(consistent_bases(a, cfg)) > 1


# ---- PL points -----------------------------------------------------------

class TropPoint:
    """Tuple (phi_1, ..., phi_s) of integral PL functions."""

    def __init__(self, functions: Sequence[PLFunction]):
        self.functions = tuple(functions)
        if not self.functions:
            raise ValueError("empty tropical point")
        for i, f in enumerate(self.functions):
            if not f.is_integral:
                raise ValueError(f"function {i} is not integral (a linear part is fractional)")

    def __len__(self):
        return len(self.functions)

    def __iter__(self):
        return iter(self.functions)

    def __getitem__(self, i):
        return self.functions[i]

    @cached_property
    def common_fan(self) -> Fan:
        fan = self.functions[0].fan
        for f in self.functions[1:]:
            fan = common_refinement(fan, f.fan)
        return fan

    def __call__(self, x: Sequence) -> tuple:
        return tuple(f(x) for f in self.functions)

    @classmethod
    def of_bundle(cls, b: KlyachkoBundle, cfg: LinearConfiguration) -> "TropPoint":
        return cls([pl_valuation(b, e) for e in cfg.vectors])


def circuit_witness(pt: TropPoint, cfg: LinearConfiguration):
    """(x, circuit) where the min over the circuit is attained by one term only, or None."""
    if len(pt) != cfg.size:
        raise ValueError("point and configuration have different lengths")
    for c in cfg.circuits:
        terms = [pt[i] for i in c.support]
        if PL.is_tropically_singular(terms):
            continue
        for j in range(len(terms)):
            rest = min_pl(*[t for k, t in enumerate(terms) if k != j])
            x = _pl_witness(rest, terms[j])
            if x is not None:
                return x, c
        raise AssertionError("singularity test and witness search disagree")
    return None


def _linear_parts_on(fan: Fan, pt: TropPoint) -> list:
    parts = [f.restrict_to(fan) for f in pt]
    return [[p.linear_parts[k] for p in parts] for k in range(len(fan.maximal_cones))]


def order_fan(pt: TropPoint, base: Fan | None = None) -> Fan:
    """Refinement on whose cones all phi_i are linear and totally ordered."""
    fan = pt.common_fan if base is None else common_refinement(pt.common_fan, base)
    forms = _linear_parts_on(fan, pt)
    cuts = []
    for parts in forms:
        here = set()
        for p, q in combinations(parts, 2):
            d = tuple(x - y for x, y in zip(p, q))
            if any(d):
                here.add(d)
        cuts.append(sorted(here))
    return subdivide_per_cone(fan, cuts)


def _bundle_matches(b: KlyachkoBundle, pt: TropPoint, cfg: LinearConfiguration) -> bool:
    return all(pl_equal(pl_valuation(b, e), f) for e, f in zip(cfg.vectors, pt))


def _filtrations_at_rays(fan: Fan, pt: TropPoint, cfg: LinearConfiguration) -> list[Filtration]:
    out = []
    for v in fan.rays:
        try:
            out.append(valuation_to_filtration(real_point_to_valuation(pt(v), cfg)))
        except NotATropicalPoint as exc:
            raise NotATropicalPoint(str(exc), witness=v, circuit=exc.circuit) from None
    return out


def reconstruct_valuation(pt: TropPoint, cfg: LinearConfiguration, fan: Fan | None = None) -> KlyachkoBundle:
    """The bundle whose PL valuation sends b_i to phi_i.

    Tries ``fan`` itself first when given, then the common refinement of the
    phi_i (and ``fan``); if the
    valuation is not linear on its cones, falls back to the refinement where
    the phi_i are totally ordered.  The result is always checked against the
    input tuple.
    """
    if len(pt) != cfg.size:
        raise ValueError("point and configuration have different lengths")
    coarse = pt.common_fan if fan is None else common_refinement(pt.common_fan, fan)
    fine = order_fan(pt, coarse)
    # per-cone check on the ordered refinement: the orders must come from one valuation
    for k in range(len(fine.maximal_cones)):
        x = fine.maximal_cone(k).interior_point
        a = pt(x)
        bad = real_circuit_witness(a, cfg)
        if bad is not None:
            raise NotATropicalPoint("minimum over a circuit attained only once", witness=x, circuit=bad)
    tries = ([fan] if fan is not None else []) + [coarse, fine]
    for candidate in tries:
        filts = _filtrations_at_rays(candidate, pt, cfg)
        try:
            b = build_bundle(candidate, filts)
        except ValueError:
            continue
        if _bundle_matches(b, pt, cfg):
            return b
    found = circuit_witness(pt, cfg)
    if found is not None:
        raise NotATropicalPoint("minimum over a circuit attained only once", *found)
    raise NotATropicalPoint("no PL valuation takes these values on the configuration")


def trop_membership(pt: TropPoint, cfg: LinearConfiguration) -> bool:
    """Circuit test and reconstruction test; they must agree."""
    fast = circuit_witness(pt, cfg) is None
    try:
        reconstruct_valuation(pt, cfg)
        slow = True
    except NotATropicalPoint:
        slow = False
    if fast != slow:
        raise AssertionError(f"circuit test says {fast}, reconstruction says {slow}")
    return slow


# ---- diagrams --------------------------------------------------------------

def diagram(source, cfg: LinearConfiguration, fan: Fan | None = None) -> list[list[int]]:
    """Rows = rays of the fan, column i = value of the i-th valuation at the ray."""
    if isinstance(source, KlyachkoBundle):
        fan = fan or source.fan
        if fan != source.fan:
            raise ValueError("diagram of a bundle is read on its own fan")
        vals = [source.ray_valuation(i) for i in range(len(fan.rays))]
        rows = [[v(b) for b in cfg.vectors] for v in vals]
    else:
        if fan is None:
            fan = source.common_fan
        rows = [list(source(v)) for v in fan.rays]
    return [[_as_int(x) for x in row] for row in rows]


def _as_int(x):
    x = rat(x)
    if x.denominator != 1:
        raise ValueError(f"non-integral diagram entry {x}")
    return int(x)


def bundle_from_diagram(cfg: LinearConfiguration, fan: Fan, matrix: Sequence[Sequence]) -> KlyachkoBundle:
    """Valuation at each ray from its row, then the Klyachko compatibility check."""
    if len(matrix) != len(fan.rays):
        raise ValueError("one diagram row per ray is required")
    filts = []
    for i, row in enumerate(matrix):
        if len(row) != cfg.size:
            raise ValueError("one diagram column per configuration vector is required")
        try:
            filts.append(valuation_to_filtration(real_point_to_valuation(row, cfg)))
        except NotATropicalPoint as exc:
            raise NotATropicalPoint(f"row {i}: {exc}", witness=fan.rays[i], circuit=exc.circuit) from None
    b = build_bundle(fan, filts)
    if diagram(b, cfg) != [[_as_int(x) for x in row] for row in matrix]:
        raise AssertionError("diagram round trip failed")
    return b
