"""Boundary maps, cocycle families, and the orbit-equivalence verifiers.

A boundary map sends eventually periodic boundary paths of one graph to
eventually periodic boundary paths of another.  A cocycle family supplies
the lag functions f_m, g_m (and i_n, j_n for the inverse map).  Values of
f and g live in N^k2, the rank of the target graph.
"""
import random

from . import degree as dg
from .boundary import (
    BoundaryPath, OmegaGraph, OmegaPath, Verdict, find_witness, ip_group,
    lex_min_agreement, random_boundary_path,
)
from .core import KGraph
from .errors import (
    CoverGap, InfiniteDegreeUnsupportedHere, NotAnArrow, NotBijective,
    PartitionNotStabilized, RankMismatch, RankUnsupported, SkeletonMismatch,
    WitnessDisagreement,
)
from .groupoid import GElem, unit
from .lattice import PeriodGroup
from .report import Tally


# -- bijections of N^k ----------------------------------------------------------
class NBijection:
    """A bijection N^k1 -> N^k2 with an explicit inverse."""

    def __init__(self, k1, k2, forward, backward, name):
        self.k1, self.k2 = k1, k2
        self.forward, self.backward = forward, backward
        self.name = name

    def __call__(self, p):
        return tuple(self.forward(tuple(p)))

    def inverse(self, q):
        return tuple(self.backward(tuple(q)))

    def check(self, bound):
        """Roundtrip both ways on boxes of side ``bound``."""
        for p in dg.box((bound,) * self.k1):
            q = self(p)
            if len(q) != self.k2 or min(q, default=0) < 0 or self.inverse(q) != p:
                raise NotBijective(f"{self.name} fails to invert at {p}")
        for q in dg.box((bound,) * self.k2):
            if self(self.inverse(q)) != q:
                raise NotBijective(f"{self.name} fails to invert at {q}")
        return True

    @classmethod
    def identity(cls, k):
        return cls(k, k, lambda p: p, lambda q: q, "identity")

    @classmethod
    def graded_lex(cls, k1, k2):
        """Enumerate N^k1 and N^k2 in graded-lex order and match positions."""
        return cls(k1, k2, lambda p: dg.glex_unrank(dg.glex_rank(p), k2),
                   lambda q: dg.glex_unrank(dg.glex_rank(q), k1), "graded-lex")

    @classmethod
    def swap(cls):
        return cls(2, 2, lambda p: (p[1], p[0]), lambda q: (q[1], q[0]), "swap")

    @classmethod
    def from_name(cls, name, k1, k2):
        if name == "identity":
            if k1 != k2:
                raise RankMismatch("identity needs equal ranks")
            return cls.identity(k1)
        if name in ("graded-lex", "diagonal", "glex"):
            return cls.graded_lex(k1, k2)
        if name == "swap":
            return cls.swap()
        raise ValueError(f"unknown bijection {name!r}")


# -- boundary maps ---------------------------------------------------------------
class BoundaryMap:
    source = None
    target = None

    def __call__(self, x):
        raise NotImplementedError

    def inverse(self):
        raise NotImplementedError


class IdentityMap(BoundaryMap):
    def __init__(self, graph):
        self.source = self.target = graph

    def __call__(self, x):
        return x

    def inverse(self):
        return self


class OmegaBijection(BoundaryMap):
    """h(x) is the point of Omega_{k2,inf} with range phi(r(x))."""

    def __init__(self, phi):
        self.phi = phi
        self.source, self.target = OmegaGraph(phi.k1), OmegaGraph(phi.k2)

    def __call__(self, x):
        return OmegaPath(self.target, self.phi(x.point))

    def inverse(self):
        p = self.phi
        return OmegaBijection(NBijection(p.k2, p.k1, p.backward, p.forward, p.name + "^-1"))


def _block_image(x, step, image, g2):
    """Map an infinite eventually periodic x block by block and close the period."""
    seen = {}
    blocks = []
    t = 0
    while True:
        y = x.shift(dg.scale(t, step))
        if y in seen:
            t0 = seen[y]
            break
        seen[y] = t
        blocks.append(image(y.initial(step)))
        t += 1
    cyc = blocks[t0]
    for b in blocks[t0 + 1:]:
        cyc = g2.compose(cyc, b)
    pre = g2.vertex(cyc.range)
    for b in reversed(blocks[:t0]):
        pre = g2.compose(b, pre)
    return BoundaryPath(pre, cyc)


class SameSkeletonRefactor(BoundaryMap):
    """Re-read a path of one 2-graph in another 2-graph with the same skeleton.

    The path is written as a word whose colours alternate blue, red, blue,
    red, ... from the range; that word is then a path in the other graph.
    """

    def __init__(self, g1, g2):
        if g1.rank != 2 or g2.rank != 2:
            raise RankUnsupported("same-skeleton maps are defined for 2-graphs")
        if g1.vertices != g2.vertices or g1.edges != g2.edges:
            raise SkeletonMismatch("the graphs have different skeletons")
        self.source, self.target = g1, g2

    def path_image(self, lam):
        a, b = lam.degree
        colors = [1, 2] * min(a, b) + [1 if a > b else 2] * abs(a - b)
        word = self.source._reorder(lam.edges, colors)
        return self.target.path(word) if word else self.target.vertex(lam.range)

    def cylinder_images(self, lam):
        """Initial segments of degree d(lam) of the images of Z(lam).

        Only square degrees satisfy h(lam x) = path_image(lam) h(x); for other
        degrees the image is read off every square extension of lam.  A single
        result means Z(lam) lands inside one cylinder.
        """
        a, b = lam.degree
        top = max(a, b)
        zero = dg.zero(2)
        out = set()
        for nu in self.source.paths(lam.source, (top - a, top - b)):
            square = self.path_image(self.source.compose(lam, nu))
            out.add(self.target.segment(square, zero, lam.degree))
        return sorted(out, key=str)

    def __call__(self, x):
        if not x.finite:
            return _block_image(x, (1, 1), self.path_image, self.target)
        if len(x.finite) == 2:
            return BoundaryPath(self.path_image(x.prefix))
        raise InfiniteDegreeUnsupportedHere("mixed finite/infinite degrees are not handled")

    def inverse(self):
        return SameSkeletonRefactor(self.target, self.source)


def same_skeleton_homeo(g1, g2):
    return SameSkeletonRefactor(g1, g2)


class PrefixTable(BoundaryMap):
    """Apply a table Λ1^n -> Λ2^n to consecutive degree-n blocks."""

    def __init__(self, g1, g2, block, table):
        self.source, self.target = g1, g2
        self.block = tuple(block)
        self.table = dict(table)
        for lam in g1.all_paths(self.block):
            if lam.degree == self.block and lam not in self.table:
                raise NotBijective(f"table has no row for {lam}")

    @classmethod
    def relabeling(cls, g1, g2, edge_map):
        k = g1.rank
        table = {}
        for lam in g1.all_paths(dg.ones(k)):
            if lam.degree == dg.ones(k):
                table[lam] = g2.path([edge_map[e] for e in lam.edges])
        return cls(g1, g2, dg.ones(k), table)

    def __call__(self, x):
        if x.finite:
            raise InfiniteDegreeUnsupportedHere("block maps act on infinite paths")
        return _block_image(x, self.block, self.table.__getitem__, self.target)

    def inverse(self):
        back = {}
        for lam, mu in self.table.items():
            if mu in back:
                raise NotBijective(f"{back[mu]} and {lam} both map to {mu}")
            back[mu] = lam
        return PrefixTable(self.target, self.source, self.block, back)


def alternating_flip(g):
    """On a 1-graph with two loops, swap the letter at every second position."""
    a, b = sorted(g.edges)
    flip = {a: b, b: a}
    table = {}
    for lam in g.paths(g.vertices[0], (2,)):
        first, second = lam.edges
        table[lam] = g.path([first, flip[second]])
    return PrefixTable(g, g, (2,), table)


class InducedFromIso(BoundaryMap):
    """h(x) = r(phi(x, 0, x)) for an arrow map phi."""

    def __init__(self, phi, source, target=None):
        self.phi = phi
        self.source, self.target = source, target

    def __call__(self, x):
        return self.phi(unit(x)).x


# -- cocycle families ---------------------------------------------------------------
class CylinderTable:
    """A locally constant function given by rows (lam, G, value) for each degree m."""

    def __init__(self, rows):
        self.rows = {tuple(m): list(r) for m, r in rows.items()}

    def __call__(self, m, x):
        for lam, G, value in self.rows.get(tuple(m), ()):
            if x.matches(lam) and not any(x.matches(lam.graph.compose(lam, nu)) for nu in G):
                return tuple(value)
        raise CoverGap(f"no cylinder for degree {m} contains {x}")

    def check_cover(self, g, depth):
        """Every cell at the given level lies in exactly one row."""
        for m, rows in self.rows.items():
            level = dg.scale(depth, dg.ones(g.rank))
            for lam, G, _ in rows:
                level = dg.join(level, lam.degree)
                for nu in G:
                    level = dg.join(level, dg.add(lam.degree, nu.degree))
            for v in g.vertices:
                for c in g.cells(v, level):
                    hits = sum(1 for lam, G, _ in rows
                               if g.extends(c, lam)
                               and not any(g.extends(c, g.compose(lam, nu)) for nu in G))
                    if hits != 1:
                        raise CoverGap(f"cell {c} lies in {hits} rows for degree {m}")
        return True

    @classmethod
    def from_json(cls, graph, data):
        rows = {}
        for key, items in data.items():
            m = tuple(int(t) for t in key.split(","))
            rows[m] = [(graph.path(r["cylinder"]),
                        [graph.path(n) for n in r.get("exclude", [])],
                        tuple(r["value"])) for r in items]
        return cls(rows)

    def to_json(self):
        return {",".join(map(str, m)): [{"cylinder": str(lam), "exclude": [str(n) for n in G],
                                          "value": list(v)} for lam, G, v in rows]
                for m, rows in sorted(self.rows.items())}


class CocycleFamily:
    """Lag functions f_m, g_m for h and optionally i_n, j_n for its inverse."""

    def __init__(self, f, g, i=None, j=None):
        self.f, self.g, self.i, self.j = f, g, i, j

    def c(self, m, x):
        return dg.sub(self.g(m, x), self.f(m, x))

    @classmethod
    def zero(cls, k1, k2=None):
        k2 = k1 if k2 is None else k2
        z = lambda m, x: dg.zero(k2)
        back = lambda n, y: dg.zero(k1)
        return cls(z, z, back, back)

    @classmethod
    def conjugacy(cls, k):
        """f_m = 0 and g_m = m, for a map commuting with the shifts."""
        z = lambda m, x: dg.zero(k)
        ident = lambda m, x: tuple(m)
        return cls(z, ident, z, ident)


def omega_coe(phi, k1=None, k2=None, check_bound=4):
    """The orbit equivalence of Omega graphs induced by a bijection phi of N^k1 onto N^k2."""
    phi.check(check_bound)
    h = OmegaBijection(phi)
    fam = CocycleFamily(
        f=lambda m, x: phi(x.point),
        g=lambda m, x: phi(dg.add(x.point, m)),
        i=lambda n, y: phi.inverse(y.point),
        j=lambda n, y: phi.inverse(dg.add(y.point, n)),
    )
    return h, fam


# -- verifiers ---------------------------------------------------------------------
def _fits(m, x):
    return dg.leq(m, x.degree)


def _orbit_checks(tally, name, h, f, g, samples, degrees):
    for x in samples:
        hx = h(x)
        for m in degrees:
            if not _fits(m, x):
                continue
            fm, gm = f(m, x), g(m, x)
            ok = h(x.shift(m)).shift(fm) == hx.shift(gm)
            tally.check(name, ok, lambda: {"x": str(x), "m": list(m),
                                            "f": list(fm), "g": list(gm)})


def _coherence_checks(tally, name, f, g, samples, degrees):
    ds = set(map(tuple, degrees))
    for x in samples:
        for m in degrees:
            for n in degrees:
                mn = dg.add(m, n)
                if mn not in ds or not _fits(mn, x):
                    continue
                lhs = dg.sub(g(mn, x), f(mn, x))
                y = x.shift(m)
                rhs = dg.add(dg.sub(g(m, x), f(m, x)), dg.sub(g(n, y), f(n, y)))
                tally.check(name, lhs == rhs, lambda: {"x": str(x), "m": list(m), "n": list(n)})


def _degrees_for(k, bound):
    return [m for m in dg.box((bound,) * k)]


def check_coe(h, fam, samples, degrees, inverse_degrees=None, depth=None):
    """Verify the orbit relations and cocycle coherence, both directions when possible."""
    degrees = [tuple(m) for m in degrees]
    tally = Tally(samples=len(samples), degrees=[list(m) for m in degrees], depth=depth)
    _orbit_checks(tally, "orbit", h, fam.f, fam.g, samples, degrees)
    _coherence_checks(tally, "cocycle", fam.f, fam.g, samples, degrees)
    if fam.i is not None and fam.j is not None:
        hinv = h.inverse()
        images = [h(x) for x in samples]
        if inverse_degrees is None:
            top = max((max(m) for m in degrees), default=0)
            inverse_degrees = _degrees_for(images[0].rank, top) if images else []
        inverse_degrees = [tuple(n) for n in inverse_degrees]
        _orbit_checks(tally, "orbit_inverse", hinv, fam.i, fam.j, images, inverse_degrees)
        _coherence_checks(tally, "cocycle_inverse", fam.i, fam.j, images, inverse_degrees)
        for x, y in zip(samples, images):
            tally.check("bijective", hinv(y) == x, lambda: {"x": str(x)})
    return tally.as_dict()


def per_image(fam, x, group):
    """Image of a subgroup of lags at x under p -> c_m(x) - c_n(x), sigma^m x = sigma^n x."""
    k2 = None
    images = []
    for p in group.basis:
        w = find_witness(x, x, p)
        if w is None:
            raise WitnessDisagreement(f"{p} is not a period of {x}")
        m, n = w
        v = dg.sub(fam.c(m, x), fam.c(n, x))
        k2 = len(v)
        images.append(v)
    if k2 is None:
        k2 = len(fam.g(dg.zero(x.rank), x))
    return PeriodGroup(k2, images)


def check_period_preserving(h, fam, samples, depth):
    tally = Tally(samples=len(samples), depth=depth)
    for x in samples:
        hx = h(x)
        got = per_image(fam, x, x.per_group())
        tally.check("per", got == hx.per_group(),
                    lambda: {"x": str(x), "image": got.to_json(), "per": hx.per_group().to_json()})
        ip_x, _ = ip_group(x, depth)
        ip_h, _ = ip_group(hx, depth)
        got = per_image(fam, x, ip_x)
        tally.check("ip", got == ip_h,
                    lambda: {"x": str(x), "image": got.to_json(), "ip": ip_h.to_json()})
    return tally.as_dict()


def check_graded(h, fam, eta1, eta2, samples, degrees, inverse_degrees=None):
    """eta1(x(0,m)) = eta2(h(x)(0, g_m(x))) eta2(h(sigma^m x)(0, f_m(x)))^-1, both ways."""
    grp = eta2.group
    degrees = [tuple(m) for m in degrees]
    tally = Tally(samples=len(samples), degrees=[list(m) for m in degrees])

    def run(name, h, f, g, e1, e2, points, degs):
        for x in points:
            hx = h(x)
            for m in degs:
                if not _fits(m, x):
                    continue
                lhs = e1(x.initial(m))
                rhs = grp.mul(e2(hx.initial(g(m, x))), grp.inv(e2(h(x.shift(m)).initial(f(m, x)))))
                tally.check(name, lhs == rhs, lambda: {"x": str(x), "m": list(m),
                                                       "lhs": list(lhs), "rhs": list(rhs)})

    run("graded", h, fam.f, fam.g, eta1, eta2, samples, degrees)
    if fam.i is not None and fam.j is not None:
        images = [h(x) for x in samples]
        if inverse_degrees is None:
            top = max((max(m) for m in degrees), default=0)
            inverse_degrees = _degrees_for(images[0].rank, top) if images else []
        run("graded_inverse", h.inverse(), fam.i, fam.j, eta2, eta1, images,
            [tuple(n) for n in inverse_degrees])
    return tally.as_dict()


def check_eventual_conjugacy(h, fam, samples, degrees):
    """sigma^{f_m(x)}(h(sigma^m x)) = sigma^{f_m(x)+m}(h(x)); fam=None means f = 0."""
    if samples and h(samples[0]).rank != samples[0].rank:
        raise RankMismatch("eventual conjugacy needs equal ranks")
    k = samples[0].rank if samples else 0
    f = fam.f if fam is not None else (lambda m, x: dg.zero(k))
    degrees = [tuple(m) for m in degrees]
    tally = Tally(samples=len(samples), degrees=[list(m) for m in degrees])

    def run(name, h, f, points):
        for x in points:
            hx = h(x)
            for m in degrees:
                if not _fits(m, x):
                    continue
                fm = f(m, x)
                ok = h(x.shift(m)).shift(fm) == hx.shift(dg.add(fm, m))
                tally.check(name, ok, lambda: {"x": str(x), "m": list(m), "f": list(fm)})

    run("eventual", h, f, samples)
    back = (fam.i if fam is not None else None) or (lambda m, x: dg.zero(k))
    try:
        hinv = h.inverse()
    except NotImplementedError:
        hinv = None
    if hinv is not None:
        run("eventual_inverse", hinv, back, [h(x) for x in samples])
    return tally.as_dict()


# -- the induced groupoid homomorphism ---------------------------------------------
class InducedHom:
    """phi(x, p - q, y) = (h(x), c_p(x) - c_q(y), h(y)) where c = g - f."""

    def __init__(self, h, fam):
        self.h, self.fam = h, fam

    def _middle(self, x, y, p, q):
        fam = self.fam
        hx, hy = self.h(x), self.h(y)
        fp, fq = fam.f(p, x), fam.f(q, y)
        t = dg.join(fp, fq)
        a = dg.add(fam.g(p, x), dg.sub(t, fp))
        b = dg.add(fam.g(q, y), dg.sub(t, fq))
        return hx, hy, a, b

    def __call__(self, arrow):
        x, y = arrow.x, arrow.y
        p, q = arrow.witness
        hx, hy, a, b = self._middle(x, y, p, q)
        mid = dg.sub(a, b)
        step = tuple(0 if x.degree[i] != dg.INF else 1 for i in range(x.rank))
        if any(step):
            _, _, a2, b2 = self._middle(x, y, dg.add(p, step), dg.add(q, step))
            if dg.sub(a2, b2) != mid:
                raise WitnessDisagreement(
                    f"witnesses {p},{q} and {dg.add(p, step)},{dg.add(q, step)} "
                    f"give {mid} and {dg.sub(a2, b2)}")
        if hx.shift(a) != hy.shift(b):
            raise WitnessDisagreement(f"the family does not relate h({x}) and h({y})")
        return GElem(hx, mid, hy, (a, b))

    def per_hom(self, x):
        return lambda p: self(GElem(x, p, x)).m

    def per_image(self, x):
        return per_image(self.fam, x, x.per_group())


def induced_groupoid_hom(h, fam):
    return InducedHom(h, fam)


# -- from an isomorphism back to cocycles ---------------------------------------------
def cocycles_from_iso(phi, g1, degrees, depth, seed=0, per_cell=4):
    """Tabulate g_m(x) = l(phi(x, m, sigma^m x)) and f_m = g_m - c(phi(...)) on cylinders.

    Each cylinder is refined until every sampled point in it gives the same
    values, for at most ``depth`` refinements.
    """
    rng = random.Random(seed)
    frows, grows = {}, {}

    def values(x, m):
        a = phi(GElem(x, m, x.shift(m), (tuple(m), dg.zero(g1.rank))))
        gm = lex_min_agreement(a.x, a.y, a.m)
        return dg.sub(gm, a.m), gm

    for m in degrees:
        m = tuple(m)
        fr, gr = [], []
        todo = [(lam, 0) for v in g1.vertices for lam in g1.cells(v, m)]
        while todo:
            lam, extra = todo.pop(0)
            pts = [random_boundary_path(g1, rng, vertex=lam.source).extend(lam)
                   for _ in range(per_cell)]
            vals = {values(x, m) for x in pts if _fits(m, x)}
            if len(vals) <= 1:
                if vals:
                    fv, gv = vals.pop()
                    fr.append((lam, [], fv))
                    gr.append((lam, [], gv))
                continue
            if extra >= depth:
                raise PartitionNotStabilized(f"values on Z({lam}) still vary after {depth} refinements")
            todo.extend((g1.compose(lam, nu), extra + 1)
                        for nu in g1.cells(lam.source, dg.ones(g1.rank)))
        frows[m], grows[m] = fr, gr
    return CocycleFamily(CylinderTable(frows), CylinderTable(grows))


# -- aperiodicity ------------------------------------------------------------------
def _periodic_candidates(g, v, depth):
    k = g.rank
    for a in dg.box((depth,) * k):
        for pre in g.paths(v, a):
            for c in dg.box((depth,) * k):
                if 0 in c:
                    continue
                for cyc in g.paths(pre.source, c):
                    if cyc.source == pre.source:
                        yield BoundaryPath(pre, cyc)


def is_aperiodic(g, depth):
    """Depth-qualified aperiodicity verdict.

    A nontrivial interior isotropy group at an eventually periodic path is a
    periodicity obstruction.  Otherwise, for every vertex and every pair
    m != n up to depth, a path is sought whose m- and n-translates disagree.
    """
    if isinstance(g, OmegaGraph):
        return Verdict("Aperiodic", depth, "paths are determined by their range")
    props = g.properties()
    if not props["has_sources"]:
        for v in g.vertices:
            for x in _periodic_candidates(g, v, depth):
                ip, _ = ip_group(x, depth)
                if not ip.is_trivial:
                    return Verdict("Periodic", depth, {"x": str(x), "ip": ip.to_json()})
        witnesses = {}
        k = g.rank
        for v in g.vertices:
            for m in dg.box((depth,) * k):
                for n in dg.box((depth,) * k):
                    if m >= n:
                        continue
                    top = dg.join(m, n)
                    found = None
                    for extra in dg.box((depth,) * k):
                        for lam in g.paths(v, dg.add(top, extra)):
                            span = dg.sub(lam.degree, top)
                            if (g.segment(lam, m, dg.add(m, span))
                                    != g.segment(lam, n, dg.add(n, span))):
                                found = lam
                                break
                        if found:
                            break
                    if found is None:
                        return Verdict("Unknown", depth, {"vertex": v, "m": list(m), "n": list(n)})
                    witnesses[f"{v}:{list(m)}~{list(n)}"] = str(found)
        return Verdict("Aperiodic", depth, witnesses)
    if props["acyclic"]:
        return Verdict("Aperiodic", depth, "every boundary path has finite degree")
    return Verdict("Unknown", depth)
