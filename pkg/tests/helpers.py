"""Random generators shared by the property tests."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from klytor.examples import random_filtration
from klytor.fan import hirzebruch_fan, product_of_lines_fan, projective_space_fan
from klytor.klyachko import build_bundle
from klytor.plfunc import PLFunction

SMOOTH_SURFACES = [projective_space_fan(2), product_of_lines_fan(2), hirzebruch_fan(1), hirzebruch_fan(2)]


def random_pl(rng: random.Random, fan=None, lo=-3, hi=3) -> PLFunction:
    fan = fan or rng.choice(SMOOTH_SURFACES)
    return PLFunction.from_ray_values(fan, [rng.randint(lo, hi) for _ in fan.rays])


def random_surface_bundle(rng: random.Random, fan=None, max_rank=3):
    fan = fan or rng.choice(SMOOTH_SURFACES)
    r = rng.randint(1, max_rank)
    return build_bundle(fan, [random_filtration(r, rng, depth=r, lo=-2, hi=2, coeff=2) for _ in fan.rays])


def random_rational_point(rng: random.Random, n: int):
    return tuple(Fraction(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(n))


seeds = st.integers(0, 10 ** 6)
