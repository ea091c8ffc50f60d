import random

import pytest
from hypothesis import given

from helpers import SMOOTH_SURFACES, random_pl, random_surface_bundle, seeds
from klytor.examples import direct_sum_of_line_bundles, line_bundle, p1_fan, trivial_bundle
from klytor.fan import Fan, hirzebruch_fan
from klytor.klyachko import Filtration, build_bundle, pl_valuation
from klytor.linalg import dot
from klytor.plfunc import PLFunction, is_convex, polytope_of
from klytor.positivity import (PositivityError, generation_certificate, is_ample, is_buildingwise_convex,
                               is_fanwise_convex, is_globally_generated, is_nef, positivity_report,
                               verify_certificate, wall_degrees)


class TestTangentPlane:
    def test_wall_degrees(self, tp2):
        assert all(d == [1, 2] for d in wall_degrees(tp2).values())
        assert len(wall_degrees(tp2)) == 3

    def test_predicates(self, tp2):
        assert is_nef(tp2) and is_ample(tp2) and is_globally_generated(tp2)
        assert is_buildingwise_convex(tp2) and is_buildingwise_convex(tp2, strict=True)
        assert is_fanwise_convex(tp2)

    def test_certificate_at_last_cone(self, tp2):
        k = tp2.fan.maximal_cones.index((0, 1))
        cert = generation_certificate(tp2, k)
        assert sorted(u for u, _ in cert) == [(0, 1), (1, 0)]
        for u, e in cert:
            # u is a vertex of the triangle P_{v(e)}
            poly = polytope_of(pl_valuation(tp2, e))
            assert poly.contains(u) and u in poly.vertices
        assert verify_certificate(tp2, k, cert)

    def test_tampered_certificate_is_rejected(self, tp2):
        cert = generation_certificate(tp2, 0)
        (u0, e0), (u1, e1) = cert
        assert not verify_certificate(tp2, 0, [(u0, e1), (u1, e0)])
        assert not verify_certificate(tp2, 0, [(u0, e0), (u1, e0)])


class TestSmallExamples:
    def test_trivial_bundle(self, fan_p2):
        b = trivial_bundle(fan_p2, 2)
        assert set(d for ds in wall_degrees(b).values() for d in ds) == {0}
        assert is_nef(b) and not is_ample(b)
        assert is_globally_generated(b) and is_fanwise_convex(b) and is_buildingwise_convex(b)

    def test_minus_one_on_line(self):
        b = line_bundle(p1_fan(), [0, -1])
        assert polytope_of(pl_valuation(b, (1,))).is_empty
        assert not is_nef(b) and not is_globally_generated(b)

    def test_flat_direction_is_nef_not_ample(self, fan_p1p1):
        # pulled back from one factor: degree zero on the other ruling
        b = line_bundle(fan_p1p1, [1, 0, 0, 0])
        assert is_nef(b) and not is_ample(b) and is_globally_generated(b)

    def test_report(self, tp2):
        d = positivity_report(tp2).as_dict()
        assert d["nef"] and d["ample"] and d["globally_generated"]
        assert all(w["degrees"] == [1, 2] for w in d["wall_degrees"])
        assert all(c["generators"] is not None for c in d["certificates"])

    def test_rejects_incomplete_and_fractional(self, fan_p2):
        cone = Fan([(1, 0), (0, 1)], [(0, 1)])
        with pytest.raises(PositivityError):
            is_nef(line_bundle(cone, [0, 0]))
        from fractions import Fraction
        with pytest.raises(PositivityError):
            is_nef(line_bundle(fan_p2, [Fraction(1, 2), 0, 0]))


class TestRankOne:
    @given(seeds)
    def test_nef_gg_and_convexity_agree(self, seed):
        rng = random.Random(seed)
        phi = random_pl(rng)
        b = line_bundle(phi.fan, phi.values_on_rays)
        assert is_nef(b) == is_globally_generated(b) == is_convex(phi)
        assert pl_valuation(b, (1,)) == phi

    def test_shifting_by_a_character_changes_nothing(self, fan_p2):
        b = line_bundle(fan_p2, [2, -1, 0])
        phi = PLFunction.from_ray_values(fan_p2, [2, -1, 0]).shift_linear((3, -2))
        c = line_bundle(fan_p2, phi.values_on_rays)
        assert wall_degrees(b) == wall_degrees(c)


class TestRandomBundles:
    @given(seeds)
    def test_ample_implies_nef_and_crosschecks(self, seed):
        rng = random.Random(seed)
        b = random_surface_bundle(rng)
        nef, ample = is_nef(b), is_ample(b)
        assert not ample or nef
        assert is_buildingwise_convex(b) == nef
        assert is_buildingwise_convex(b, strict=True) == ample
        gg = is_fanwise_convex(b)
        assert gg == is_globally_generated(b)
        for k in range(len(b.fan.maximal_cones)):
            cert = generation_certificate(b, k)
            if cert is not None:
                assert verify_certificate(b, k, cert)

    @given(seeds)
    def test_split_bundles_follow_their_summands(self, seed):
        rng = random.Random(seed)
        fan = rng.choice(SMOOTH_SURFACES)
        rows = [[rng.randint(-2, 2) for _ in fan.rays] for _ in range(rng.randint(1, 3))]
        b = direct_sum_of_line_bundles(fan, rows)
        parts = [line_bundle(fan, row) for row in rows]
        assert is_nef(b) == all(is_nef(p) for p in parts)
        assert is_ample(b) == all(is_ample(p) for p in parts)
        assert is_globally_generated(b) == all(is_globally_generated(p) for p in parts)

    @given(seeds)
    def test_twisting_shifts_degrees_by_the_line_bundle(self, seed):
        rng = random.Random(seed)
        b = random_surface_bundle(rng, fan=hirzebruch_fan(1))
        degrees = wall_degrees(b)
        t = max(0, 1 - min(d for ds in degrees.values() for d in ds))
        twist = wall_degrees(line_bundle(b.fan, [t] * len(b.fan.rays)))
        filts = [Filtration(f.ambient_dim, [(l + t, s) for l, s in f.steps]) for f in b.filtrations]
        twisted = build_bundle(b.fan, filts)
        assert wall_degrees(twisted) == {w: [d + twist[w][0] for d in ds] for w, ds in degrees.items()}
        # the anticanonical class meets every curve of F1 positively
        assert is_ample(twisted)


@pytest.fixture(scope="module")
def bundle():
    from conftest import FIXTURES
    from klytor.io import bundle_from_json, load_json
    return bundle_from_json(load_json(f"{FIXTURES}/nef_not_gg.json"))


class TestNefWithoutGlobalGeneration:
    """Rank 3 on the plane, found by brute-force search over small filtration data."""

    def test_nef_but_not_generated(self, bundle):
        assert is_nef(bundle) and not is_ample(bundle)
        assert is_buildingwise_convex(bundle) and not is_fanwise_convex(bundle)
        assert not is_globally_generated(bundle)

    def test_degree_sums_match_the_determinant(self, bundle):
        det_levels = []
        for f in bundle.filtrations:
            dims = [s.dim for s in f.subspaces] + [0]
            det_levels.append(sum(l * (dims[j] - dims[j + 1]) for j, l in enumerate(f.levels)))
        det = wall_degrees(line_bundle(bundle.fan, det_levels))
        assert all(sum(ds) == det[w][0] and min(ds) >= 0 for w, ds in wall_degrees(bundle).items())

    def test_a_fixed_point_line_has_no_sections(self, bundle):
        from klytor.linalg import Subspace
        k = bundle.fan.maximal_cones.index((0, 1))
        assert generation_certificate(bundle, k) is None
        for g, u in bundle.compat[k]:
            space = Subspace.full(3)
            for i, v in enumerate(bundle.fan.rays):
                space = space & bundle.filtrations[i].at(dot(u, v))
            if tuple(u) == (-2, 3):
                # the only sections of this weight would have to reach the line through g
                assert space.is_zero()
