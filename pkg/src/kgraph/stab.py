"""Stabilisation and two-sided shift spaces.

The stabilised graph attaches a copy of Omega_{k,inf} at every vertex.  It
has infinitely many vertices, so it is never built: its boundary paths are
pairs (x, n) standing for mu_n x, where mu_n runs from (n, n) down to the
base vertex r(x).
"""
import itertools
import random

from . import degree as dg
from .boundary import BoundaryPath, find_witness, random_boundary_path
from .errors import (
    EquivalenceClassMismatch, HypothesesViolated, NotAnArrow, WindowInconsistency,
)
from .groupoid import (
    AbelianGroup, GElem, functor_cocycle, g_compose, random_arrow, random_composable,
)
from .report import Tally


class StabKGraph:
    def __init__(self, base):
        self.base = base
        self.rank = base.rank
        self.name = f"S({base.name})"

    def __eq__(self, other):
        return isinstance(other, StabKGraph) and other.base == self.base

    def __hash__(self):
        return hash(("stab", self.base))

    def vertex(self, v, n):
        """The virtual vertex (n, n) in the copy of Omega attached at v."""
        if v not in self.base.vertices:
            raise KeyError(v)
        return (v, tuple(n))

    def point(self, x, n):
        return StabPath(self, x, n)

    def random_boundary_path(self, rng, vertex=None, max_prefix=2):
        x = random_boundary_path(self.base, rng)
        return StabPath(self, x, tuple(rng.randint(0, max_prefix) for _ in range(self.rank)))

    def random_arrow(self, rng, depth=2):
        a = random_arrow(self.base, rng, depth)
        p = tuple(rng.randint(0, depth) for _ in range(self.rank))
        q = tuple(rng.randint(0, depth) for _ in range(self.rank))
        return stab_iso(a, (p, q), self)


def stabilize(g):
    return StabKGraph(g)


class StabSegment:
    """A finite path of the stabilised graph: an Omega piece followed by a base path."""

    __slots__ = ("omega_degree", "base")

    def __init__(self, omega_degree, base):
        self.omega_degree = tuple(omega_degree)
        self.base = base

    @property
    def degree(self):
        return dg.add(self.omega_degree, self.base.degree)

    def __eq__(self, other):
        return (isinstance(other, StabSegment) and self.omega_degree == other.omega_degree
                and self.base == other.base)

    def __hash__(self):
        return hash((self.omega_degree, self.base))


class StabPath:
    """The boundary path mu_n x of the stabilised graph."""

    __slots__ = ("graph", "base", "tail", "rank", "degree")

    def __init__(self, graph, x, n):
        self.graph = graph
        self.base = x
        self.tail = tuple(n)
        self.rank = x.rank
        self.degree = dg.add(self.tail, x.degree)

    @property
    def range(self):
        return (self.base.range, self.tail)

    def shift(self, l):
        l = tuple(l)
        return StabPath(self.graph, self.base.shift(dg.pos(dg.sub(l, self.tail))),
                        dg.pos(dg.sub(self.tail, l)))

    def initial(self, m):
        m = tuple(m)
        om = dg.meet(m, self.tail)
        return StabSegment(om, self.base.initial(dg.pos(dg.sub(m, self.tail))))

    def witness_to(self, other, m):
        w = find_witness(self.base, other.base, dg.add(dg.sub(m, self.tail), other.tail))
        if w is None:
            return None
        return dg.add(w[0], self.tail), dg.add(w[1], other.tail)

    def __eq__(self, other):
        return (isinstance(other, StabPath) and self.tail == other.tail
                and self.base == other.base)

    def __hash__(self):
        return hash((self.tail, self.base))

    def __str__(self):
        return f"mu({','.join(map(str, self.tail))}){self.base}"

    __repr__ = __str__

    def sort_key(self):
        return (self.tail, self.base.sort_key())


def stab_boundary(x, n, graph=None):
    return StabPath(graph or StabKGraph(x.graph), x, n)


class EtaFunctor:
    """eta(lam) = degree of the base part of lam; Omega pieces count for nothing."""

    def __init__(self, k):
        self.group = AbelianGroup(k)

    def __call__(self, seg):
        return tuple(seg.base.degree)


def stab_iso(a, pq, graph=None):
    """((x, m, y), (p, q)) -> (mu_p x, m + p - q, mu_q y)."""
    p, q = map(tuple, pq)
    graph = graph or StabKGraph(a.x.graph)
    wp, wq = a.witness
    return GElem(StabPath(graph, a.x, p), dg.add(a.m, dg.sub(p, q)), StabPath(graph, a.y, q),
                 (dg.add(wp, p), dg.add(wq, q)))


def stab_iso_inverse(b):
    x, y = b.x, b.y
    m = dg.sub(b.m, dg.sub(x.tail, y.tail))
    wp, wq = b.witness
    if dg.leq(x.tail, wp) and dg.leq(y.tail, wq):
        a = GElem(x.base, m, y.base, (dg.sub(wp, x.tail), dg.sub(wq, y.tail)))
    else:
        a = GElem(x.base, m, y.base)
    return a, (x.tail, y.tail)


def rk_to_r(pq):
    """The pair groupoid on N^k to the pair groupoid on N, by graded-lex position."""
    p, q = pq
    return dg.glex_rank(p), dg.glex_rank(q)


def r_to_rk(ab, k):
    a, b = ab
    return dg.glex_unrank(a, k), dg.glex_unrank(b, k)


def bar_cocycle(a, pq):
    return a.m


def stab_iso_suite(g, n, depth=2, seed=0):
    """Bijectivity, the cocycle identity and composition for stab_iso on n sampled arrows."""
    rng = random.Random(seed)
    graph = StabKGraph(g)
    eta = EtaFunctor(g.rank)
    tally = Tally(arrows=n, depth=depth, seed=seed)
    pair = lambda: tuple(rng.randint(0, depth) for _ in range(g.rank))
    for _ in range(n):
        a = random_arrow(g, rng, depth)
        b = random_composable(g, rng, a, depth)
        p, q, r = pair(), pair(), pair()
        sa = stab_iso(a, (p, q), graph)
        w = lambda: {"arrow": str(a), "p": list(p), "q": list(q)}
        back, pq = stab_iso_inverse(sa)
        tally.check("inverse", back == a and pq == (p, q), w)
        tally.check("cocycle", functor_cocycle(eta, sa) == bar_cocycle(a, (p, q)), w)
        lhs = stab_iso(g_compose(a, b), (p, r), graph)
        rhs = g_compose(sa, stab_iso(b, (q, r), graph))
        tally.check("composition", lhs == rhs, w)
        tally.check("pair_rank", r_to_rk(rk_to_r((p, q)), g.rank) == (p, q), w)
    return tally.as_dict()


# -- two-sided paths -----------------------------------------------------------
def _check_hypotheses(g):
    props = g.properties()
    if props["has_sources"] or props["has_sinks"]:
        raise HypothesesViolated(f"{g.name} must have no sinks or sources")


class BiInfinitePath:
    """A two-sided path, periodic to the left.

    ``tail`` is the one-sided path from ``offset`` onward; further left the
    loop ``left`` repeats, so the tail at ``offset - t d(left)`` is
    ``left^t tail``.
    """

    __slots__ = ("graph", "left", "tail", "offset", "rank")

    def __init__(self, left, tail, offset):
        g = tail.graph
        _check_hypotheses(g)
        if left.range != left.source or left.source != tail.range:
            raise HypothesesViolated("the left loop must sit at the range of the tail")
        if min(left.degree) < 1:
            raise HypothesesViolated("the left loop must have positive degree in every colour")
        if tail.finite:
            raise HypothesesViolated("the right tail must be infinite")
        self.graph, self.left, self.tail, self.offset = g, left, tail, tuple(offset)
        self.rank = g.rank

    def tail_at(self, p):
        """The one-sided path x(p, inf)."""
        d = self.left.degree
        gap = dg.sub(self.offset, p)
        t = max(0, max(-(-gap[i] // d[i]) for i in range(self.rank)))
        y = self.tail
        for _ in range(t):
            y = y.extend(self.left)
        start = dg.sub(self.offset, dg.scale(t, d))
        return y.shift(dg.sub(p, start))

    def segment(self, p, q):
        return self.tail_at(p).initial(dg.sub(q, p))

    def _horizon(self, other):
        a = dg.meet(dg.sub(self.offset, self.left.degree), dg.sub(other.offset, other.left.degree))
        span = 2 * (dg.total(self.left.degree) + dg.total(other.left.degree)) + 2
        return a, span

    def __eq__(self, other):
        if not isinstance(other, BiInfinitePath) or other.graph != self.graph:
            return False
        a, span = self._horizon(other)
        for t in range(span):
            for d in (self.left.degree, other.left.degree):
                p = dg.sub(a, dg.scale(t, d))
                if self.tail_at(p) != other.tail_at(p):
                    return False
        return True

    def __hash__(self):
        return hash(self.graph)

    def __str__(self):
        return f"bi(left={self.left};tail={self.tail};offset={list(self.offset)})"

    __repr__ = __str__


def two_shift(x, m):
    """sigma^m(x)(p, q) = x(p + m, q + m), for any m in Z^k."""
    return BiInfinitePath(x.left, x.tail, dg.sub(x.offset, m))


def random_biinfinite(g, rng, spread=3):
    z = random_boundary_path(g, rng)
    left = z.cycle
    tail = random_boundary_path(g, rng, vertex=left.range)
    off = tuple(rng.randint(-spread, spread) for _ in range(g.rank))
    return BiInfinitePath(left, tail, off)


# -- block codes -------------------------------------------------------------------
class BlockCode:
    """h(x)(p, p + 1) = table[x(p - memory, p - memory + window)], a unit cube of the target."""

    def __init__(self, g1, g2, window, memory, table):
        _check_hypotheses(g1)
        _check_hypotheses(g2)
        self.source, self.target = g1, g2
        self.window = tuple(window)
        self.memory = tuple(memory)
        self.table = dict(table)
        k = g1.rank
        one = dg.ones(k)
        for v in g1.vertices:
            for lam in g1.paths(v, self.window):
                if lam not in self.table:
                    raise WindowInconsistency(f"no image for the window {lam}")
                if self.table[lam].degree != one:
                    raise WindowInconsistency(f"the image of {lam} is not a unit cube")
        self._check_sliding()

    def _check_sliding(self):
        g1, g2 = self.source, self.target
        k = g1.rank
        one = dg.ones(k)
        big = dg.add(self.window, one)
        for v in g1.vertices:
            for nu in g1.paths(v, big):
                c0 = self.table[g1.segment(nu, dg.zero(k), self.window)]
                c1 = self.table[g1.segment(nu, one, big)]
                if c0.source != c1.range:
                    raise WindowInconsistency(f"cubes from {nu} do not meet")
                block = g2.compose(c0, c1)
                for i in range(k):
                    e = dg.unit(k, i)
                    ci = self.table[g1.segment(nu, e, dg.add(e, self.window))]
                    if g2.segment(block, e, dg.add(e, one)) != ci:
                        raise WindowInconsistency(f"overlapping windows of {nu} disagree in colour {i + 1}")

    @classmethod
    def relabeling(cls, g1, g2, edge_map):
        k = g1.rank
        table = {}
        for v in g1.vertices:
            for lam in g1.paths(v, dg.ones(k)):
                table[lam] = g2.path([edge_map[e] for e in lam.edges])
        return cls(g1, g2, dg.ones(k), dg.zero(k), table)

    @classmethod
    def identity(cls, g):
        return cls.relabeling(g, g, {e: e for e in g.edges})

    def _one_sided(self, z):
        """Image of a one-sided path whose windows start at its range."""
        g2 = self.target
        one = dg.ones(self.source.rank)
        seen, cubes, t = {}, [], 0
        while True:
            y = z.shift(dg.scale(t, one))
            if y in seen:
                t0 = seen[y]
                break
            seen[y] = t
            cubes.append(self.table[y.initial(self.window)])
            t += 1
        cyc = cubes[t0]
        for c in cubes[t0 + 1:]:
            cyc = g2.compose(cyc, c)
        pre = g2.vertex(cyc.range)
        for c in reversed(cubes[:t0]):
            pre = g2.compose(c, pre)
        return BoundaryPath(pre, cyc)

    def pi(self, x):
        """The induced one-sided map; needs zero memory."""
        if any(self.memory):
            raise HypothesesViolated("the one-sided map needs a block code without memory")
        return self._one_sided(x)

    def __call__(self, x):
        d = x.left.degree
        k = x.rank
        reach = max(self.window[i] + d[i] for i in range(k))
        s = reach
        anchor = dg.sub(dg.add(x.offset, self.memory), dg.scale(s, d))
        anchor = dg.sub(anchor, dg.scale(1, dg.ones(k)))
        tail = self._one_sided(x.tail_at(dg.sub(anchor, self.memory)))
        before = self._one_sided(x.tail_at(dg.sub(dg.sub(anchor, d), self.memory)))
        left = before.initial(d)
        return BiInfinitePath(left, tail, anchor)

    def inverse_table(self):
        """For a code with unit window and no memory, invert the table directly."""
        back = {}
        for lam, mu in self.table.items():
            if mu in back:
                raise WindowInconsistency(f"{back[mu]} and {lam} both map to {mu}")
            back[mu] = lam
        return BlockCode(self.target, self.source, self.window, self.memory, back)


def check_two_sided_conjugacy(h, samples, degrees, inverse=None):
    degrees = [tuple(m) for m in degrees]
    tally = Tally(samples=len(samples), degrees=[list(m) for m in degrees])
    for x in samples:
        hx = h(x)
        for m in degrees:
            ok = two_shift(hx, m) == h(two_shift(x, m))
            tally.check("intertwining", ok, lambda: {"x": str(x), "m": list(m)})
        if inverse is not None:
            tally.check("bijective", inverse(hx) == x, lambda: {"x": str(x)})
    return tally.as_dict()


# -- from a conjugacy to an isomorphism of stabilised groupoids ----------------------
def equivalence_classes(h, samples_per_pair=3, seed=0):
    """Classes of x(0, L) under pi(x) = pi(x'), found on sampled tails, closed transitively."""
    g = h.source
    rng = random.Random(seed)
    wins = [lam for v in g.vertices for lam in g.paths(v, h.window)]
    parent = {lam: lam for lam in wins}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    tails = {v: [random_boundary_path(g, rng, vertex=v) for _ in range(samples_per_pair)]
             for v in g.vertices}
    images = {}
    for lam in wins:
        for z in tails[lam.source]:
            images.setdefault(h.pi(z.extend(lam)), []).append(lam)
    for group in images.values():
        for other in group[1:]:
            a, b = find(group[0]), find(other)
            if a != b:
                parent[b] = a
    classes = {}
    for lam in wins:
        classes.setdefault(find(lam), []).append(lam)
    return [sorted(c) for c in sorted(classes.values(), key=lambda c: sorted(c)[0].sort_key())]


class Partition:
    """Rows (lam, residue, modulus): A_lam = {n : rank(n) = residue mod modulus}."""

    def __init__(self, classes, rows):
        self.rows = {lam: (int(r), int(m)) for lam, r, m in rows}
        seen = set()
        for cls in classes:
            size = len(cls)
            res = []
            for lam in cls:
                if lam not in self.rows:
                    raise EquivalenceClassMismatch(f"no row for {lam}")
                r, m = self.rows[lam]
                if m != size:
                    raise EquivalenceClassMismatch(f"modulus {m} for {lam} but its class has {size} members")
                res.append(r)
                seen.add(lam)
            if sorted(res) != list(range(size)):
                raise EquivalenceClassMismatch(f"residues {sorted(res)} do not partition N^k")
        extra = set(self.rows) - seen
        if extra:
            raise EquivalenceClassMismatch(f"rows for unknown windows {sorted(map(str, extra))}")

    @classmethod
    def default(cls, classes):
        rows = [(lam, i, len(c)) for c in classes for i, lam in enumerate(c)]
        return cls(classes, rows)

    def f_inv(self, lam, n):
        """f_lam^-1: N^k -> A_lam."""
        r, m = self.rows[lam]
        return dg.glex_unrank(dg.glex_rank(n) * m + r, len(n))


class ConjugacyStabIso:
    """Phi((x,n), p, (x',n')) = (psi(x,n), p + n' + f^-1(n) - n - f^-1(n'), psi(x',n'))."""

    def __init__(self, h, partition, target):
        self.h, self.partition, self.target = h, partition, target

    def psi(self, z):
        lam = z.base.initial(self.h.window)
        return StabPath(self.target, self.h.pi(z.base), self.partition.f_inv(lam, z.tail))

    def __call__(self, a):
        x, y = a.x, a.y
        fx = self.partition.f_inv(x.base.initial(self.h.window), x.tail)
        fy = self.partition.f_inv(y.base.initial(self.h.window), y.tail)
        mid = dg.add(dg.sub(dg.add(a.m, y.tail), x.tail), dg.sub(fx, fy))
        return GElem(self.psi(x), mid, self.psi(y))


def conjugacy_to_stab_iso(h, partition=None, classes=None):
    classes = classes if classes is not None else equivalence_classes(h)
    partition = partition or Partition.default(classes)
    return ConjugacyStabIso(h, partition, StabKGraph(h.target))


def check_stab_hom(phi, arrows, pairs):
    """Cocycle preservation and the homomorphism law on sampled arrows."""
    from .groupoid import g_compose
    eta = EtaFunctor(arrows[0].x.rank) if arrows else None
    tally = Tally(arrows=len(arrows), pairs=len(pairs))
    for a in arrows:
        b = phi(a)
        tally.check("cocycle", functor_cocycle(eta, b) == functor_cocycle(eta, a),
                    lambda: {"arrow": str(a)})
    for a, b in pairs:
        tally.check("homomorphism", phi(g_compose(a, b)) == g_compose(phi(a), phi(b)),
                    lambda: {"a": str(a), "b": str(b)})
    return tally.as_dict()


def derive_block_code(phi, g1, g2, max_window, per_window=4, seed=0):
    """Search for a block code inducing the base map of a cocycle-preserving iso.

    Returns ("Found", window, code) or ("Unknown", max_window, None).
    """
    rng = random.Random(seed)
    stab1 = StabKGraph(g1)
    k = g1.rank
    zero = dg.zero(k)

    def psi(x):
        u = StabPath(stab1, x, zero)
        return phi(GElem(u, zero, u, (zero, zero))).x.base

    for size in range(1, max_window + 1):
        window = dg.scale(size, dg.ones(k))
        table, ok = {}, True
        for v in g1.vertices:
            for lam in g1.paths(v, window):
                cubes = {psi(random_boundary_path(g1, rng, vertex=lam.source).extend(lam)).initial(dg.ones(k))
                         for _ in range(per_window)}
                if len(cubes) != 1:
                    ok = False
                    break
                table[lam] = cubes.pop()
            if not ok:
                break
        if ok:
            try:
                return "Found", size, BlockCode(g1, g2, window, zero, table)
            except WindowInconsistency:
                continue
    return "Unknown", max_window, None


def conjugacy_suite(h, n, depth=2, seed=0, partition=None, two_sided=4):
    """Check h as a two-sided conjugacy, then the arrow map it induces on SΛ.

    ``n`` stabilised arrows (and as many composable pairs) go through the
    homomorphism and cocycle checks; ``two_sided`` bi-infinite samples go
    through the intertwining check for every shift in the unit box.
    """
    rng = random.Random(seed)
    g = h.source
    samples = [random_biinfinite(g, rng) for _ in range(two_sided)]
    degrees = [m for m in dg.box(dg.ones(g.rank))]
    shifts = check_two_sided_conjugacy(h, samples, degrees)
    phi = conjugacy_to_stab_iso(h, partition=partition)
    stab = StabKGraph(g)
    pair = lambda: tuple(rng.randint(0, depth) for _ in range(g.rank))
    arrows, pairs = [], []
    for _ in range(n):
        a = random_arrow(g, rng, depth)
        b = random_composable(g, rng, a, depth)
        p, q, r = pair(), pair(), pair()
        sa = stab_iso(a, (p, q), stab)
        arrows.append(sa)
        pairs.append((sa, stab_iso(b, (q, r), stab)))
    hom = check_stab_hom(phi, arrows, pairs)
    return {"pass": shifts["pass"] and hom["pass"], "two_sided": shifts, "stab_iso": hom}
