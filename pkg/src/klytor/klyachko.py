"""Toric vector bundles as Klyachko data.

A bundle of rank r on a fan is one decreasing filtration of E = Q^r per ray.
On each maximal cone the filtrations of its rays must be simultaneously split
by a frame whose lines carry characters u with E^rho_i = sum of lines having
<u, v_rho> >= i.  From that data we get the piecewise linear map Phi into
valuations on E and the piecewise linear valuation e -> (x -> Phi(x)(e)).
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .fan import Fan, FanError, class_in_M_sigma, subdivide_by_min, wall_data
from .lattice import integer_solve
from .linalg import Flag, Subspace, dot, frame_coefficients, rank, rat, solve, vec
from .plfunc import PLFunction
from .semiring import INF


class IncompatibleFiltrations(ValueError):
    """The filtrations admit no compatible frame with characters on some maximal cone."""

    def __init__(self, cone_index: int, cone_rays: Sequence[int], reason: str):
        self.cone_index = cone_index
        self.cone_rays = tuple(cone_rays)
        self.reason = reason
        super().__init__(
            f"maximal cone {cone_index} (rays {list(cone_rays)}): {reason}; the data is not a "
            f"toric vector bundle on this fan, a subdivision (subdivide_by_hyperplanes) may fix it")


# ---- filtrations and valuations -----------------------------------------------

class Filtration:
    """Decreasing filtration E_i of E = Q^r, stored at the levels where it changes.

    ``steps`` are (level, subspace) with increasing levels and strictly
    decreasing nonzero subspaces; the first subspace is E.  E_i is the subspace
    of the first step whose level is >= i, and {0} past the last level.
    """

    __slots__ = ("ambient_dim", "steps")

    def __init__(self, ambient_dim: int, steps: Iterable[tuple[object, Subspace]]):
        steps = sorted(((rat(l), s) for l, s in steps), key=lambda t: t[0])
        clean = []
        for level, sub in steps:
            if sub.ambient_dim != ambient_dim:
                raise ValueError("filtration step in the wrong ambient space")
            if sub.is_zero():
                continue
            if clean and clean[-1][0] == level:
                raise ValueError(f"level {level} given twice")
            clean.append((level, sub))
        # drop levels that do not change the subspace (keep the highest)
        out = []
        for j, (level, sub) in enumerate(clean):
            if j + 1 < len(clean) and clean[j + 1][1] == sub:
                continue
            out.append((level, sub))
        for (_, a), (_, b) in zip(out, out[1:]):
            if not b < a:
                raise ValueError("filtration is not decreasing")
        if not out or not out[0][1].is_full():
            raise ValueError("filtration must exhaust E")
        self.ambient_dim = ambient_dim
        self.steps = tuple(out)

    @classmethod
    def from_entries(cls, ambient_dim: int, entries: Iterable[tuple[object, Sequence]]) -> "Filtration":
        """Entries (level, basis): E_i is the sum of the entries with level >= i."""
        entries = [(rat(l), Subspace(ambient_dim, basis)) for l, basis in entries]
        levels = sorted({l for l, _ in entries})
        steps = []
        for l in levels:
            acc = Subspace.zero(ambient_dim)
            for m, s in entries:
                if m >= l:
                    acc = acc + s
            steps.append((l, acc))
        return cls(ambient_dim, steps)

    @classmethod
    def trivial(cls, r: int, level=0) -> "Filtration":
        return cls(r, [(level, Subspace.full(r))])

    @classmethod
    def from_lines(cls, generators: Sequence[Sequence], levels: Sequence) -> "Filtration":
        """Filtration split by the given basis, with line i at level ``levels[i]``."""
        r = len(generators)
        vals = [rat(l) for l in levels]
        steps = []
        for l in sorted(set(vals)):
            steps.append((l, Subspace(r, [g for g, m in zip(generators, vals) if m >= l])))
        return cls(r, steps)

    @property
    def levels(self) -> tuple:
        return tuple(l for l, _ in self.steps)

    @property
    def subspaces(self) -> tuple:
        return tuple(s for _, s in self.steps)

    def at(self, i) -> Subspace:
        i = rat(i)
        for level, sub in self.steps:
            if level >= i:
                return sub
        return Subspace.zero(self.ambient_dim)

    __getitem__ = at

    @property
    def is_integral(self) -> bool:
        return all(l.denominator == 1 for l in self.levels)

    def shifted(self, c) -> "Filtration":
        c = rat(c)
        return Filtration(self.ambient_dim, [(l + c, s) for l, s in self.steps])

    def entries(self) -> list[tuple[Fraction, tuple]]:
        return [(l, s.basis) for l, s in self.steps]

    def __eq__(self, other):
        return isinstance(other, Filtration) and self.steps == other.steps

    def __hash__(self):
        return hash(self.steps)

    def __repr__(self):
        return "Filtration(" + ", ".join(f"{l}: dim {s.dim}" for l, s in self.steps) + ")"


class VSValuation:
    """Valuation on E given by a flag F_1 < ... < F_k = E and values a_1 > ... > a_k.

    v(e) is the value of the smallest flag member containing e, and INF at 0.
    """

    __slots__ = ("flag", "values")

    def __init__(self, flag: Flag, values: Sequence):
        values = tuple(rat(a) for a in values)
        if len(values) != len(flag):
            raise ValueError("one value per flag member")
        if any(a <= b for a, b in zip(values, values[1:])):
            raise ValueError("values must be strictly decreasing")
        self.flag = flag
        self.values = values

    @classmethod
    def adapted(cls, generators: Sequence[Sequence], values: Sequence) -> "VSValuation":
        """Valuation adapted to the frame of ``generators`` with the given line values."""
        r = len(generators)
        vals = [rat(v) for v in values]
        subs, out_vals = [], []
        for a in sorted(set(vals), reverse=True):
            subs.append(Subspace(r, [g for g, v in zip(generators, vals) if v >= a]))
            out_vals.append(a)
        return cls(Flag(subs), out_vals)

    @property
    def ambient_dim(self) -> int:
        return self.flag.subspaces[-1].ambient_dim

    def __call__(self, e: Sequence):
        for sub, a in zip(self.flag, self.values):
            if sub.contains(e):
                return a if any(x != 0 for x in e) else INF
        raise AssertionError("flag does not end in E")

    def at_least(self, a) -> Subspace:
        """E_{v >= a}."""
        a = rat(a)
        best = None
        for sub, val in zip(self.flag, self.values):
            if val >= a:
                best = sub
        return best if best is not None else Subspace.zero(self.ambient_dim)

    def shifted(self, c) -> "VSValuation":
        return VSValuation(self.flag, [a + rat(c) for a in self.values])

    def __eq__(self, other):
        return isinstance(other, VSValuation) and self.flag == other.flag and self.values == other.values

    def __hash__(self):
        return hash((self.flag, self.values))

    def __repr__(self):
        return "VSValuation(" + ", ".join(f"dim {s.dim}: {a}" for s, a in zip(self.flag, self.values)) + ")"


def filtration_to_valuation(f: Filtration) -> VSValuation:
    steps = list(reversed(f.steps))
    return VSValuation(Flag([s for _, s in steps]), [l for l, _ in steps])


def valuation_to_filtration(v: VSValuation) -> Filtration:
    return Filtration(v.ambient_dim, list(zip(v.values, v.flag.subspaces)))


def valuation_apply(v: VSValuation, e: Sequence):
    return v(e)


def leq_valuation(v: VSValuation, w: VSValuation) -> bool:
    """v(e) <= w(e) for all e, checked as E_{v>=a} inside E_{w>=a} at every breakpoint a."""
    for a in set(v.values) | set(w.values):
        if not v.at_least(a) <= w.at_least(a):
            return False
    return True


# ---- frames -------------------------------------------------------------------

class Frame:
    """r lines spanning E as a direct sum, each held by a generator."""

    __slots__ = ("generators", "lines")

    def __init__(self, generators: Sequence[Sequence]):
        gens = [vec(g) for g in generators]
        r = len(gens)
        if r == 0 or any(len(g) != r for g in gens) or rank(gens, r) != r:
            raise ValueError("a frame needs r independent vectors in Q^r")
        lines = [Subspace(r, [g]) for g in gens]
        # normalize generators to the RREF row of their line
        self.lines = tuple(lines)
        self.generators = tuple(l.basis[0] for l in lines)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def coefficients(self, e: Sequence) -> tuple:
        return frame_coefficients(self.generators, e)

    def adapts(self, f: Filtration) -> bool:
        return all(_spanned_by_lines(self.generators, s) for s in f.subspaces)

    def __eq__(self, other):
        return isinstance(other, Frame) and set(self.lines) == set(other.lines)

    def __hash__(self):
        return hash(frozenset(self.lines))

    def __repr__(self):
        return "Frame(" + ", ".join("(" + ", ".join(str(x) for x in g) + ")" for g in self.generators) + ")"


def _spanned_by_lines(gens, sub: Subspace) -> bool:
    inside = [g for g in gens if sub.contains(g)]
    return len(inside) == sub.dim


def common_frame(filtrations: Sequence[Filtration], r: int | None = None):
    """A frame adapted to every filtration, or None if there is none.

    For each multi-index a of breakpoint positions, I_a is the intersection of
    the filtration members at a, and J_a the sum of I_b over the immediate
    successors b of a.  Complements of J_a in I_a, taken over all a, form a
    frame exactly when an adapted frame exists; the result is verified.
    """
    filtrations = list(filtrations)
    if r is None:
        if not filtrations:
            raise ValueError("ambient dimension needed for an empty filtration list")
        r = filtrations[0].ambient_dim
    if any(f.ambient_dim != r for f in filtrations):
        raise ValueError("filtrations live in spaces of different dimension")
    if not filtrations:
        return Frame([[1 if i == j else 0 for j in range(r)] for i in range(r)])
    subs = [f.subspaces for f in filtrations]
    zero = Subspace.zero(r)
    memo: dict = {}

    def inter(a):
        got = memo.get(a)
        if got is None:
            got = Subspace.full(r)
            for s, i in zip(subs, a):
                if i >= len(s):
                    got = zero
                    break
                got = got & s[i]
                if got.is_zero():
                    break
            memo[a] = got
        return got

    chosen = []
    m = len(subs)

    def walk(prefix, acc):
        t = len(prefix)
        if t == m:
            a = tuple(prefix)
            ia = acc
            memo[a] = ia
            j = zero
            for k in range(m):
                b = a[:k] + (a[k] + 1,) + a[k + 1:]
                j = j + inter(b)
            chosen.extend(j.complement_in(ia))
            return
        for i in range(len(subs[t])):
            nxt = acc & subs[t][i]
            if nxt.is_zero():
                break
            walk(prefix + [i], nxt)

    walk([], Subspace.full(r))
    if len(chosen) != r or rank(chosen, r) != r:
        return None
    frame = Frame(chosen)
    if not all(frame.adapts(f) for f in filtrations):
        return None
    return frame


# ---- bundles --------------------------------------------------------------------

class CompatibleStructure:
    """Frame L_sigma and characters u(sigma) of one maximal cone."""

    __slots__ = ("cone", "rays", "frame", "characters")

    def __init__(self, cone: int, rays: Sequence[int], frame: Frame, characters: Sequence[Sequence]):
        self.cone = cone
        self.rays = tuple(rays)
        self.frame = frame
        self.characters = tuple(tuple(u) for u in characters)

    def __iter__(self):
        return iter(zip(self.frame.generators, self.characters))

    def character_multiset(self) -> list:
        return sorted(self.characters)

    def __repr__(self):
        return f"CompatibleStructure(cone={self.cone}, characters={list(self.characters)})"


class KlyachkoBundle:
    """Filtrations on the rays of a fan together with the per-cone compatible structures."""

    def __init__(self, fan: Fan, filtrations: Sequence[Filtration], compat: Sequence[CompatibleStructure]):
        self.fan = fan
        self.filtrations = tuple(filtrations)
        self.compat = tuple(compat)
        self.rank = self.filtrations[0].ambient_dim if self.filtrations else compat[0].frame.rank

    @property
    def is_integral(self) -> bool:
        return all(f.is_integral for f in self.filtrations)

    def ray_valuation(self, i: int) -> VSValuation:
        return filtration_to_valuation(self.filtrations[i])

    def characters(self, k: int) -> list:
        return self.compat[k].character_multiset()

    def weight_space(self, u: Sequence) -> Subspace:
        """Intersection over all rays of E^rho_{<u, v_rho>}."""
        acc = Subspace.full(self.rank)
        for f, v in zip(self.filtrations, self.fan.rays):
            acc = acc & f.at(dot(u, v))
            if acc.is_zero():
                break
        return acc

    def __repr__(self):
        return f"KlyachkoBundle(rank={self.rank}, rays={len(self.fan.rays)}, cones={len(self.fan.maximal_cones)})"


def _solve_character(rays, values, n, integral: bool):
    if integral:
        u = integer_solve(rays, [int(v) for v in values], n)
        return u
    u = solve(rays, values, n)
    return u


def build_bundle(fan: Fan, filtrations) -> KlyachkoBundle:
    """Check compatibility on every maximal cone and assemble the bundle."""
    if isinstance(filtrations, Mapping):
        missing = [i for i in range(len(fan.rays)) if i not in filtrations]
        if missing:
            raise ValueError(f"no filtration given for rays {missing}")
        filtrations = [filtrations[i] for i in range(len(fan.rays))]
    filtrations = list(filtrations)
    if len(filtrations) != len(fan.rays):
        raise ValueError("one filtration per ray is required")
    r = filtrations[0].ambient_dim
    if any(f.ambient_dim != r for f in filtrations):
        raise ValueError("filtrations of different rank")
    integral = all(f.is_integral for f in filtrations)
    vals = [filtration_to_valuation(f) for f in filtrations]
    compat = []
    for k, mc in enumerate(fan.maximal_cones):
        frame = common_frame([filtrations[i] for i in mc], r)
        if frame is None:
            raise IncompatibleFiltrations(k, mc, "no frame is adapted to all ray filtrations")
        cone = fan.maximal_cone(k)
        rays = [fan.rays[i] for i in mc]
        chars = []
        for g in frame.generators:
            levels = [vals[i](g) for i in mc]
            u = _solve_character(rays, levels, fan.rank, integral)
            if u is None:
                kind = "integral " if integral else ""
                raise IncompatibleFiltrations(
                    k, mc, f"line {tuple(str(x) for x in g)} has ray levels {[str(x) for x in levels]} "
                    f"not given by an {kind}character")
            if integral:
                u = class_in_M_sigma(u, cone)
            chars.append(tuple(u))
        order = sorted(range(r), key=lambda j: (chars[j], frame.generators[j]))
        frame = Frame([frame.generators[j] for j in order])
        chars = [chars[j] for j in order]
        _verify_compatibility(fan, mc, [filtrations[i] for i in mc], frame, chars)
        compat.append(CompatibleStructure(k, mc, frame, chars))
    return KlyachkoBundle(fan, filtrations, compat)


def _verify_compatibility(fan, mc, filts, frame, chars):
    r = frame.rank
    for i, f in zip(mc, filts):
        v = fan.rays[i]
        for level, sub in f.steps:
            expect = Subspace(r, [g for g, u in zip(frame.generators, chars) if dot(u, v) >= level])
            if expect != sub:
                raise IncompatibleFiltrations(0, mc, "compatibility verification failed")


def phi_eval(b: KlyachkoBundle, x: Sequence) -> VSValuation:
    """Phi(x): adapted to the frame of a cone containing x, line values <u_j, x>."""
    k = b.fan.find_maximal_cone(x)
    cs = b.compat[k]
    return VSValuation.adapted(cs.frame.generators, [dot(u, x) for u in cs.characters])


def pl_valuation(b: KlyachkoBundle, e: Sequence) -> PLFunction:
    """The PL function x -> Phi(x)(e) for a nonzero e."""
    e = vec(e)
    if all(x == 0 for x in e):
        raise ValueError("the valuation of 0 is the infinity element")
    forms = []
    for cs in b.compat:
        c = cs.frame.coefficients(e)
        forms.append([vec(u) for u, cj in zip(cs.characters, c) if cj != 0])
    fan, assign = subdivide_by_min(b.fan, forms)
    return PLFunction(fan, [forms[k][i] for k, i in assign], check=False)


def is_equivariantly_split(b: KlyachkoBundle):
    """A frame adapted to all ray filtrations at once, or None."""
    return common_frame(b.filtrations, b.rank)


def refine_bundle(b: KlyachkoBundle, finer: Fan) -> KlyachkoBundle:
    """Pull the bundle back to a refinement: new rays take the filtration of Phi there."""
    if not finer.refines(b.fan):
        raise FanError("not a refinement of the bundle's fan")
    old = {r: i for i, r in enumerate(b.fan.rays)}
    filts = []
    for r in finer.rays:
        if r in old:
            filts.append(b.filtrations[old[r]])
        else:
            filts.append(valuation_to_filtration(phi_eval(b, r)))
    return build_bundle(finer, filts)


# ---- splitting along invariant curves -----------------------------------------

class CurvePair:
    __slots__ = ("u", "u_prime", "degree")

    def __init__(self, u, u_prime, degree):
        self.u = tuple(u)
        self.u_prime = tuple(u_prime)
        degree = Fraction(degree)
        self.degree = int(degree) if degree.denominator == 1 else degree

    def as_tuple(self):
        return (self.u, self.u_prime, self.degree)

    def __eq__(self, other):
        return isinstance(other, CurvePair) and self.as_tuple() == other.as_tuple()

    def __lt__(self, other):
        return self.as_tuple() < other.as_tuple()

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return f"({self.u}, {self.u_prime}, {self.degree})"


def curve_splitting(b: KlyachkoBundle, tau: Iterable[int], sigma: int | None = None,
                    v_tau: Sequence[int] | None = None) -> list[CurvePair]:
    """Pairs (u_i, u'_i, a_i) of the splitting of E restricted to the curve of a wall.

    Lines of sigma and sigma' are grouped by their class c in M_tau.  Modulo the
    part Q of E^tau strictly above c, the class-c lines of sigma and sigma'
    induce two filtrations on one graded piece (by <u, v_tau> and <u', -v_tau>);
    counting dimensions of their intersections recovers the pairs.
    """
    tau = frozenset(tau)
    wd = wall_data(b.fan, tau, sigma)
    if v_tau is None:
        v = wd.v_tau
    else:
        v = tuple(v_tau)
        if dot(wd.w_tau, v) != 1 or not b.fan.maximal_cone(wd.sigma).contains(v):
            raise ValueError("v_tau must lie in sigma and pair to 1 with w_tau")
    tau_cone = b.fan.cones[tau]
    tau_rays = [b.fan.rays[i] for i in tau]
    r = b.rank

    def cls(u):
        return class_in_M_sigma(u, tau_cone)

    def in_tau_dual(u):
        return all(dot(u, x) >= 0 for x in tau_rays)

    side = list(b.compat[wd.sigma])
    other = list(b.compat[wd.sigma_prime])
    classes = sorted({cls(u) for _, u in side} | {cls(u) for _, u in other})
    out = []
    for c in classes:
        def above(lines):
            return Subspace(r, [g for g, u in lines if cls(u) != c
                                and in_tau_dual(tuple(a - x for a, x in zip(u, c)))])
        q = above(side)
        if q != above(other):
            raise AssertionError("the part of E^tau above a class differs between the two cones")
        mine = [(g, u, dot(u, v)) for g, u in side if cls(u) == c]
        theirs = [(g, u, -dot(u, v)) for g, u in other if cls(u) == c]
        if len(mine) != len(theirs):
            raise AssertionError("class multiplicities differ across the wall")
        ks = sorted({k for _, _, k in mine})
        kps = sorted({k for _, _, k in theirs})

        def count(ki, kpi):
            if ki >= len(ks) or kpi >= len(kps):
                return 0
            f = Subspace(r, [g for g, _, k in mine if k >= ks[ki]]) + q
            g_ = Subspace(r, [g for g, _, k in theirs if k >= kps[kpi]]) + q
            return (f & g_).dim - q.dim

        char_at = {k: u for _, u, k in mine}
        char_at_p = {k: u for _, u, k in theirs}
        for i in range(len(ks)):
            for j in range(len(kps)):
                mult = count(i, j) - count(i + 1, j) - count(i, j + 1) + count(i + 1, j + 1)
                if mult < 0:
                    raise AssertionError("negative multiplicity in curve splitting")
                for _ in range(mult):
                    out.append(CurvePair(char_at[ks[i]], char_at_p[kps[j]], ks[i] + kps[j]))
    if len(out) != r:
        raise AssertionError("curve splitting did not produce r pairs")
    return sorted(out)


def curve_degrees(b: KlyachkoBundle, tau: Iterable[int], **kw) -> list:
    return sorted(p.degree for p in curve_splitting(b, tau, **kw))
