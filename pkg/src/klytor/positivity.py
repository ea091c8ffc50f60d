"""Nef, ample and globally generated toric vector bundles.

Nef / ample are decided wall by wall from the splitting degrees on the
invariant curves.  Global generation is decided per maximal cone: at the
fixed point of sigma the fibre is generated by global sections exactly when,
for every character u of u(sigma) with multiplicity m, the weight-u global
sections span m dimensions modulo the part of E^sigma(u) coming from
characters strictly above u.
"""

from __future__ import annotations

from typing import Sequence

from .klyachko import KlyachkoBundle, VSValuation, curve_splitting, leq_valuation
from .linalg import Subspace, dot


class PositivityError(ValueError):
    pass


def _require(b: KlyachkoBundle):
    if not b.fan.is_complete():
        raise PositivityError("positivity is only defined here for complete fans")
    if not b.is_integral:
        raise PositivityError("positivity needs integral filtration levels")


def wall_degrees(b: KlyachkoBundle) -> dict:
    """Wall (frozenset of ray indices) -> sorted list of splitting degrees."""
    _require(b)
    return {tau: sorted(p.degree for p in curve_splitting(b, tau)) for tau, _ in b.fan.walls()}


def is_nef(b: KlyachkoBundle) -> bool:
    return all(d >= 0 for ds in wall_degrees(b).values() for d in ds)


def is_ample(b: KlyachkoBundle) -> bool:
    return all(d > 0 for ds in wall_degrees(b).values() for d in ds)


def _strictly_above(cs, u, sigma_rays, r) -> Subspace:
    """Span of the lines of the cone whose character is u plus a nonzero element of sigma dual."""
    gens = []
    for g, w in cs:
        if w != u and all(dot(tuple(a - b for a, b in zip(w, u)), x) >= 0 for x in sigma_rays):
            gens.append(g)
    return Subspace(r, gens)


def generation_certificate(b: KlyachkoBundle, k: int):
    """Generators e_i of a frame compatible on cone k with u_i in P_{v(e_i)}, or None."""
    cs = b.compat[k]
    r = b.rank
    rays = [b.fan.rays[i] for i in cs.rays]
    out = []
    for u in sorted(set(cs.characters)):
        m = cs.characters.count(u)
        above = _strictly_above(cs, u, rays, r)
        sections = b.weight_space(u)
        chosen = []
        acc = above
        for s in sections.basis:
            if len(chosen) == m:
                break
            if not acc.contains(s):
                chosen.append(s)
                acc = acc + Subspace(r, [s])
        if len(chosen) < m:
            return None
        out.extend((tuple(u), e) for e in chosen)
    return out


def is_globally_generated(b: KlyachkoBundle) -> bool:
    _require(b)
    return all(generation_certificate(b, k) is not None for k in range(len(b.fan.maximal_cones)))


def verify_certificate(b: KlyachkoBundle, k: int, cert) -> bool:
    """Check a generation certificate: a compatible frame with u_i in P_{v(e_i)}."""
    from .klyachko import Frame
    cs = b.compat[k]
    r = b.rank
    if sorted(u for u, _ in cert) != sorted(cs.characters):
        return False
    try:
        Frame([e for _, e in cert])
    except ValueError:
        return False
    for i in cs.rays:
        v = b.fan.rays[i]
        for level, sub in b.filtrations[i].steps:
            expect = Subspace(r, [e for u, e in cert if dot(u, v) >= level])
            if expect != sub:
                return False
    vals = [b.ray_valuation(i) for i in range(len(b.fan.rays))]
    for u, e in cert:
        if any(dot(u, v) > val(e) for v, val in zip(b.fan.rays, vals)):
            return False
    return True


def is_buildingwise_convex(b: KlyachkoBundle, strict: bool = False) -> bool:
    """Wall criterion, cross-checked by T'(v) <= Phi(v) at the rays of each cone."""
    _require(b)
    verdict = is_ample(b) if strict else is_nef(b)
    direct = _extension_inequalities(b, strict)
    if direct != verdict:
        raise AssertionError("valuation-level convexity check disagrees with wall degrees")
    return verdict


def _extension_inequalities(b: KlyachkoBundle, strict: bool) -> bool:
    fan = b.fan
    for tau, ks in fan.walls():
        for sigma in ks:
            pairs = curve_splitting(b, tau, sigma=sigma)
            partner: dict = {}
            for p in pairs:
                partner.setdefault(p.u, []).append(p.u_prime)
            cs = b.compat[sigma]
            gens, primes = [], []
            for g, u in cs:
                gens.append(g)
                primes.append(partner[tuple(u)].pop())
            for i in cs.rays:
                v = fan.rays[i]
                phi = VSValuation.adapted(gens, [dot(u, v) for u in cs.characters])
                t_prime = VSValuation.adapted(gens, [dot(u, v) for u in primes])
                if not leq_valuation(t_prime, phi):
                    return False
                if strict and i not in tau:
                    if any(dot(up, v) >= dot(u, v) for up, u in zip(primes, cs.characters)):
                        return False
    return True


def is_fanwise_convex(b: KlyachkoBundle) -> bool:
    """Global generation, cross-checked by S_sigma(v) <= Phi(v) at every ray."""
    _require(b)
    ok = True
    for k in range(len(b.fan.maximal_cones)):
        cert = generation_certificate(b, k)
        if cert is None:
            ok = False
            continue
        if not verify_certificate(b, k, cert):
            raise AssertionError("generation certificate failed verification")
        gens = [e for _, e in cert]
        for i, v in enumerate(b.fan.rays):
            s = VSValuation.adapted(gens, [dot(u, v) for u, _ in cert])
            if not leq_valuation(s, b.ray_valuation(i)):
                raise AssertionError("S_sigma is not below Phi at a ray")
    return ok


class PositivityReport:
    def __init__(self, nef, ample, globally_generated, degrees, certificates):
        self.nef = nef
        self.ample = ample
        self.globally_generated = globally_generated
        self.degrees = degrees
        self.certificates = certificates

    def as_dict(self) -> dict:
        from .linalg import rat_str
        return {
            "nef": self.nef,
            "ample": self.ample,
            "globally_generated": self.globally_generated,
            "wall_degrees": [{"wall": sorted(t), "degrees": d} for t, d in
                             sorted(self.degrees.items(), key=lambda kv: sorted(kv[0]))],
            "certificates": [
                {"cone": k, "generators": None if c is None else
                 [{"character": list(u), "vector": [rat_str(x) for x in e]} for u, e in c]}
                for k, c in enumerate(self.certificates)],
        }


def positivity_report(b: KlyachkoBundle) -> PositivityReport:
    degrees = wall_degrees(b)
    nef = all(d >= 0 for ds in degrees.values() for d in ds)
    ample = all(d > 0 for ds in degrees.values() for d in ds)
    certs = [generation_certificate(b, k) for k in range(len(b.fan.maximal_cones))]
    return PositivityReport(nef, ample, all(c is not None for c in certs), degrees, certs)
