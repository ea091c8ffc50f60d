"""Builders for standard bundles and fixtures."""

from __future__ import annotations

import random
from typing import Sequence

from .fan import Fan, hirzebruch_fan, line_fan, product_of_lines_fan, projective_space_fan
from .klyachko import Filtration, KlyachkoBundle, build_bundle
from .linalg import Subspace


def example_tangent_pn(n: int) -> KlyachkoBundle:
    """Tangent bundle of P^n: on ray i the filtration is E up to 0 and span(v_i) at 1."""
    fan = projective_space_fan(n)
    filts = []
    for v in fan.rays:
        filts.append(Filtration(n, [(0, Subspace.full(n)), (1, Subspace(n, [v]))]))
    return build_bundle(fan, filts)


def line_bundle(fan: Fan, levels: Sequence) -> KlyachkoBundle:
    """Rank one bundle whose filtration on ray i jumps from E to 0 after ``levels[i]``."""
    return build_bundle(fan, [Filtration.trivial(1, l) for l in levels])


def direct_sum_of_line_bundles(fan: Fan, level_rows: Sequence[Sequence]) -> KlyachkoBundle:
    """Split bundle: ``level_rows[j][i]`` is the level of the j-th standard line on ray i."""
    r = len(level_rows)
    basis = [tuple(1 if a == b else 0 for b in range(r)) for a in range(r)]
    filts = [Filtration.from_lines(basis, [row[i] for row in level_rows]) for i in range(len(fan.rays))]
    return build_bundle(fan, filts)


def trivial_bundle(fan: Fan, r: int) -> KlyachkoBundle:
    return build_bundle(fan, [Filtration.trivial(r) for _ in fan.rays])


def random_filtration(r: int, rng: random.Random, depth: int = 3, lo: int = -2, hi: int = 2,
                      coeff: int = 3) -> Filtration:
    """Filtration split by a random integer basis, with random integer levels."""
    while True:
        basis = [tuple(rng.randint(-coeff, coeff) for _ in range(r)) for _ in range(r)]
        if Subspace(r, basis).is_full():
            break
    levels = [rng.randint(lo, hi) for _ in range(r)]
    if depth < r:
        pool = sorted(set(levels))[:depth]
        levels = [min(pool, key=lambda p: abs(p - l)) for l in levels]
    return Filtration.from_lines(basis, levels)


def random_bundle(fan: Fan, r: int, rng: random.Random, **kw) -> KlyachkoBundle:
    """Random data on a fan where any filtrations are compatible (smooth, two rays per cone)."""
    return build_bundle(fan, [random_filtration(r, rng, **kw) for _ in fan.rays])


def p1_fan() -> Fan:
    return line_fan()


def p1xp1_fan() -> Fan:
    return product_of_lines_fan(2)


def p2_fan() -> Fan:
    return projective_space_fan(2)


def f1_fan() -> Fan:
    return hirzebruch_fan(1)


def square_pyramid_fan() -> Fan:
    """Complete fan in N = Z^3: the cone over the unit square at height 1, and four cones
    joining its edges to the ray (-1,-1,-2).  The top cone has four rays, so it is not simplicial."""
    rays = [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1), (-1, -1, -2)]
    cones = [(0, 1, 2, 3), (0, 1, 4), (1, 2, 4), (2, 3, 4), (0, 3, 4)]
    return Fan(rays, cones)


def three_lines_on_square(fan: Fan | None = None) -> tuple[Fan, list[Filtration]]:
    """Rank 2 data with three different lines at level 1 on three rays of the square cone.

    No frame of two lines is adapted to all three, so the top cone is incompatible.
    Cutting the square along x = y leaves two lines per cone and the data becomes a bundle.
    """
    fan = fan or square_pyramid_fan()
    lines = {(1, 0, 1): (1, 0), (1, 1, 1): (1, 1), (0, 1, 1): (0, 1)}
    filts = []
    for v in fan.rays:
        if v in lines:
            filts.append(Filtration(2, [(0, Subspace.full(2)), (1, Subspace(2, [lines[v]]))]))
        else:
            filts.append(Filtration.trivial(2))
    return fan, filts


SQUARE_DIAGONAL_CUT = (1, -1, 0)
