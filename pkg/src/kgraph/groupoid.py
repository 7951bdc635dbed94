"""The boundary path groupoid: arrows, cocycles and basis bisections."""
import random
import re

from . import degree as dg
from .boundary import (
    Verdict, find_witness, ip_group, lex_min_agreement, parse_boundary,
    random_boundary_path,
)
from .errors import (
    ExhaustiveG, ImageMismatch, InjectivityUnverifiable, NotAnArrow,
    NotComposable, ParseError, ValidationError,
)
from .report import Tally


class GElem:
    """An arrow (x, m, y).  The witness (p, q) satisfies p - q = m and
    sigma^p x = sigma^q y; it is not part of the arrow's identity."""

    __slots__ = ("x", "m", "y", "witness")

    def __init__(self, x, m, y, witness=None):
        m = tuple(m)
        if witness is None:
            witness = find_witness(x, y, m)
            if witness is None:
                raise NotAnArrow(f"({x}; {m}; {y}) is not in the groupoid")
        self.x, self.m, self.y, self.witness = x, m, y, witness

    @property
    def range(self):
        return self.x

    @property
    def source(self):
        return self.y

    def __eq__(self, other):
        return (isinstance(other, GElem) and self.m == other.m
                and self.x == other.x and self.y == other.y)

    def __hash__(self):
        return hash((self.x, self.m, self.y))

    def __str__(self):
        return f"({self.x}; ({','.join(map(str, self.m))}); {self.y})"

    __repr__ = __str__

    def is_unit(self):
        return not any(self.m) and self.x == self.y


def arrow(x, m, y):
    return GElem(x, m, y)


def unit(x):
    z = dg.zero(x.rank)
    return GElem(x, z, x, (z, z))


def g_compose(a, b):
    if a.y != b.x:
        raise NotComposable(f"s({a}) != r({b})")
    p1, q1 = a.witness
    p2, q2 = b.witness
    t = dg.join(q1, p2)
    w = (dg.add(p1, dg.sub(t, q1)), dg.add(q2, dg.sub(t, p2)))
    return GElem(a.x, dg.add(a.m, b.m), b.y, w)


def g_inverse(a):
    p, q = a.witness
    return GElem(a.y, dg.neg(a.m), a.x, (q, p))


def l_cocycle(a):
    """The lexicographically least l >= m with sigma^l x = sigma^(l-m) y."""
    return lex_min_agreement(a.x, a.y, a.m)


def c_lambda(a):
    return a.m


def parse_arrow(graph, text):
    """Parse ``(x; m; y)`` where x and y are boundary path literals."""
    lit = r"(prefix=[^;]*;\s*cycle=[^;]*;\s*finite=\[[^\]]*\]|omega\([^)]*\))"
    m = re.match(r"^\s*\(\s*" + lit + r"\s*;\s*\(?([-\d,\s]+?)\)?\s*;\s*" + lit + r"\s*\)\s*$", text)
    if not m:
        raise ParseError(f"bad arrow literal {text!r}")
    x = parse_boundary(graph, m.group(1))
    y = parse_boundary(graph, m.group(3))
    lag = tuple(int(t) for t in m.group(2).split(",") if t.strip())
    return GElem(x, lag, y)


# -- groups and functors ---------------------------------------------------
class AbelianGroup:
    """Z^r written additively as integer tuples."""

    def __init__(self, r):
        self.r = r

    def identity(self):
        return (0,) * self.r

    def mul(self, a, b):
        return dg.add(a, b)

    def inv(self, a):
        return dg.neg(a)

    def __eq__(self, other):
        return isinstance(other, AbelianGroup) and other.r == self.r

    def __hash__(self):
        return hash(("ab", self.r))


class FreeGroup:
    """Free group on named generators; elements are reduced tuples of (name, +-1)."""

    def __init__(self, generators):
        self.generators = tuple(generators)

    def identity(self):
        return ()

    def gen(self, name):
        return ((name, 1),)

    def mul(self, a, b):
        out = list(a)
        for t in b:
            if out and out[-1][0] == t[0] and out[-1][1] == -t[1]:
                out.pop()
            else:
                out.append(t)
        return tuple(out)

    def inv(self, a):
        return tuple((g, -e) for g, e in reversed(a))

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.generators == self.generators

    def __hash__(self):
        return hash(("free", self.generators))


class Functor:
    """A functor from a k-graph into a group, fixed by its values on edges."""

    def __init__(self, graph, group, values):
        self.graph = graph
        self.group = group
        self.values = dict(values)
        for e in graph.edges:
            if e not in self.values:
                raise ValidationError(f"no value for edge {e}")
        for (a, b), (c, d) in graph._swap.items():
            lhs = group.mul(self.values[a], self.values[b])
            rhs = group.mul(self.values[c], self.values[d])
            if lhs != rhs:
                raise ValidationError(f"functor breaks the square {a}{b} = {c}{d}")

    def __call__(self, lam):
        out = self.group.identity()
        for e in lam.edges:
            out = self.group.mul(out, self.values[e])
        return out


class DegreeFunctor:
    """The degree functor d, valued in Z^k."""

    def __init__(self, k):
        self.group = AbelianGroup(k)

    def __call__(self, lam):
        return tuple(lam.degree)


def functor_cocycle(eta, a):
    """c_eta(mu x, d(mu) - d(nu), nu x) = eta(mu) eta(nu)^-1."""
    p, q = a.witness
    grp = eta.group
    val = grp.mul(eta(a.x.initial(p)), grp.inv(eta(a.y.initial(q))))
    step = tuple(0 if a.x.degree[i] != dg.INF else 1 for i in range(a.x.rank))
    if any(step):
        p2, q2 = dg.add(p, step), dg.add(q, step)
        other = grp.mul(eta(a.x.initial(p2)), grp.inv(eta(a.y.initial(q2))))
        assert other == val, "functor cocycle depends on the witness"
    return val


# -- basis bisections ---------------------------------------------------------
class BasisBisection:
    """The compact open bisection Z(lam *_s mu minus G)."""

    __slots__ = ("lam", "mu", "G")

    def __init__(self, lam, mu, G=(), check=True):
        if lam.source != mu.source:
            raise ValidationError(f"s({lam}) != s({mu})")
        G = frozenset(G)
        if check:
            for nu in G:
                if nu.range != lam.source:
                    raise ValidationError(f"{nu} does not start at s({lam})")
            if G and lam.graph.is_exhaustive(lam.source, G):
                raise ExhaustiveG("excluded set is exhaustive")
        self.lam, self.mu, self.G = lam, mu, G

    @property
    def cocycle(self):
        return dg.sub(self.lam.degree, self.mu.degree)

    def __eq__(self, other):
        return (isinstance(other, BasisBisection) and self.lam == other.lam
                and self.mu == other.mu and self.G == other.G)

    def __hash__(self):
        return hash((self.lam, self.mu, self.G))

    def sort_key(self):
        return (self.lam.sort_key(), self.mu.sort_key(), sorted(n.sort_key() for n in self.G))

    def __str__(self):
        ex = ",".join(str(n) for n in sorted(self.G, key=lambda n: n.sort_key()))
        return f"Z({self.lam} | {self.mu} \\ {{{ex}}})"

    __repr__ = __str__

    def star(self):
        return BasisBisection(self.mu, self.lam, self.G, check=False)


def parse_bisection(graph, text):
    m = re.match(r"^\s*Z\(\s*([^|]+?)\s*\|\s*([^\\)]+?)\s*(?:\\\s*\{([^}]*)\})?\s*\)\s*$", text)
    if not m:
        raise ParseError(f"bad bisection literal {text!r}")
    lam, mu = graph.path(m.group(1)), graph.path(m.group(2))
    G = [graph.path(t.strip()) for t in (m.group(3) or "").split(",") if t.strip()]
    return BasisBisection(lam, mu, G)


def _outside(x, lam, G):
    g = lam.graph
    return not any(x.matches(g.compose(lam, nu)) for nu in G)


def bisection_member(a, A):
    lam, mu = A.lam, A.mu
    if a.m != A.cocycle or not a.x.matches(lam) or not a.y.matches(mu):
        return False
    if not (_outside(a.x, lam, A.G) and _outside(a.y, mu, A.G)):
        return False
    return a.x.shift(lam.degree) == a.y.shift(mu.degree)


def bisection_product(A, B):
    """A.B as a list of pairwise disjoint basis bisections."""
    g = A.lam.graph
    if A.mu.range != B.lam.range:
        return []
    out = []
    for rho, tau in g.lambda_min(A.mu, B.lam):
        excl = set()
        for nu in A.G:
            excl.update(r2 for r2, _ in g.lambda_min(rho, nu))
        for h in B.G:
            excl.update(t2 for t2, _ in g.lambda_min(tau, h))
        if excl and g.is_exhaustive(rho.source, excl):
            continue
        out.append(BasisBisection(g.compose(A.lam, rho), g.compose(B.mu, tau), excl, check=False))
    return sorted(out, key=BasisBisection.sort_key)


def product_member_oracle(a, A, B):
    """Decide a in A.B by factorising a directly (A is a bisection, so the factor is forced)."""
    if not (a.x.matches(A.lam) and _outside(a.x, A.lam, A.G)):
        return False
    tail = a.x.shift(A.lam.degree)
    z = tail.extend(A.mu)
    try:
        first = GElem(a.x, A.cocycle, z)
    except NotAnArrow:
        return False
    if not bisection_member(first, A):
        return False
    try:
        second = GElem(z, dg.sub(a.m, A.cocycle), a.y)
    except NotAnArrow:
        return False
    return bisection_member(second, B)


# -- Z(U, m, n, V) ---------------------------------------------------------
def _refine(g, cylinders, level):
    out = []
    for lam in cylinders:
        for nu in g.cells(lam.source, dg.sub(level, lam.degree)):
            out.append(g.compose(lam, nu))
    return sorted(set(out))


def zumn_refine(U, m, n, V):
    """Cover Z(U, m, n, V) by basis bisections of the form Z(mu lam *_s nu lam)."""
    g = U[0].graph
    m, n = tuple(m), tuple(n)
    top_u = m
    for lam in U:
        top_u = dg.join(top_u, lam.degree)
    top_v = n
    for lam in V:
        top_v = dg.join(top_v, lam.degree)
    cu, cv = _refine(g, U, top_u), _refine(g, V, top_v)
    tails_u = [g.segment(c, m, c.degree) if dg.leq(m, c.degree) else None for c in cu]
    tails_v = [g.segment(c, n, c.degree) if dg.leq(n, c.degree) else None for c in cv]
    for tails, name in ((tails_u, "U"), (tails_v, "V")):
        clean = [t for t in tails if t is not None]
        if len(tails) != len(clean) or len(set(clean)) != len(clean):
            raise InjectivityUnverifiable(f"the shift is not injective on {name}")
    img_u = _refine(g, tails_u, dg.join(dg.sub(top_u, m), dg.sub(top_v, n)))
    img_v = _refine(g, tails_v, dg.join(dg.sub(top_u, m), dg.sub(top_v, n)))
    if img_u != img_v:
        raise ImageMismatch("sigma^m(U) != sigma^n(V)")
    out = set()
    for c, t in zip(cu, tails_u):
        for d, s in zip(cv, tails_v):
            if t.range != s.range:
                continue
            head_u = g.segment(c, dg.zero(g.rank), m)
            head_v = g.segment(d, dg.zero(g.rank), n)
            for rho, _ in g.lambda_min(t, s):
                kappa = g.compose(t, rho)
                out.add(BasisBisection(g.compose(head_u, kappa), g.compose(head_v, kappa), check=False))
    return sorted(out, key=BasisBisection.sort_key)


# -- isotropy and fullness ----------------------------------------------------
def iso_interior_member(a, depth):
    if a.x != a.y:
        return Verdict("NotInIso", depth)
    group, d = ip_group(a.x, depth)
    if a.m in group:
        return Verdict("InInterior", d)
    return Verdict("InIso", d)


def is_full(g, X, depth):
    """Depth-qualified check that r(s^-1(X)) is the whole unit space, X a union of Z(lam)."""
    X = list(X)
    reach = set()
    frontier = [lam.source for lam in X]
    while frontier:
        w = frontier.pop()
        if w in reach:
            continue
        reach.add(w)
        for e in g.edges.values():
            if e.tgt == w:
                frontier.append(e.src)
    level = dg.scale(depth, dg.ones(g.rank))
    for v in g.vertices:
        for mu in g.cells(v, level):
            if not any(g.segment(mu, t, t).range in reach for t in dg.box(mu.degree)):
                return Verdict("NotFull", depth, str(mu))
    return Verdict("Full", depth)


# -- sampling --------------------------------------------------------------------
def random_arrow(g, rng, depth=2):
    """A random arrow (lam z, d(lam) - d(mu), mu z)."""
    if hasattr(g, "random_arrow"):
        return g.random_arrow(rng, depth)
    z = random_boundary_path(g, rng)
    legs = []
    for _ in range(2):
        while True:
            n = tuple(rng.randint(0, depth) for _ in range(g.rank))
            opts = g.paths_into(z.range, n)
            if opts:
                legs.append(opts[rng.randrange(len(opts))])
                break
    lam, mu = legs
    return GElem(z.extend(lam), dg.sub(lam.degree, mu.degree), z.extend(mu),
                 (lam.degree, mu.degree))


def random_composable(g, rng, a, depth=2):
    """A random arrow whose range is s(a)."""
    y = a.y
    k = y.rank
    while True:
        p = tuple(rng.randint(0, depth) if y.degree[i] == dg.INF else y.degree[i] for i in range(k))
        z = y.shift(p)
        n = tuple(rng.randint(0, depth) for _ in range(k))
        opts = g.paths_into(z.range, n) if hasattr(g, "paths_into") else []
        if opts:
            mu = opts[rng.randrange(len(opts))]
            return GElem(y, dg.sub(p, mu.degree), z.extend(mu), (p, mu.degree))


# -- sampled verification ------------------------------------------------------
def _random_bisection(g, rng, depth):
    while True:
        v = g.vertices[rng.randrange(len(g.vertices))]
        w = g.vertices[rng.randrange(len(g.vertices))]
        lam = _pick(g, rng, v, depth)
        opts = [mu for n in dg.box((depth,) * g.rank) for mu in g.paths(w, n)
                if mu.source == lam.source]
        if not opts:
            continue
        mu = opts[rng.randrange(len(opts))]
        G = []
        if rng.random() < 0.3:
            nu = _pick(g, rng, lam.source, 1)
            if not nu.is_vertex and not g.is_exhaustive(lam.source, [nu]):
                G = [nu]
        return BasisBisection(lam, mu, G, check=False)


def _pick(g, rng, v, depth):
    opts = [lam for n in dg.box((depth,) * g.rank) for lam in g.paths(v, n)]
    return opts[rng.randrange(len(opts))]


def _arrow_in_product(g, rng, A, B):
    """An arrow of A.B built from a minimal common extension, or None."""
    if A.mu.range != B.lam.range:
        return None
    pairs = g.lambda_min(A.mu, B.lam)
    if not pairs:
        return None
    rho, tau = pairs[rng.randrange(len(pairs))]
    z = random_boundary_path(g, rng, vertex=rho.source)
    left, right = g.compose(A.lam, rho), g.compose(B.mu, tau)
    return GElem(z.extend(left), dg.sub(left.degree, right.degree), z.extend(right),
                 (left.degree, right.degree))


def groupoid_suite(g, n, depth=3, seed=0):
    """Groupoid laws, cocycle identities and the product oracle on n sampled arrows."""
    rng = random.Random(seed)
    tally = Tally(arrows=n, depth=depth, seed=seed)
    deg = DegreeFunctor(g.rank)
    for _ in range(n):
        a = random_arrow(g, rng, depth)
        b = random_composable(g, rng, a, depth)
        c = random_composable(g, rng, b, depth)
        w = lambda: str(a)
        tally.check("unit", g_compose(unit(a.x), a) == a == g_compose(a, unit(a.y)), w)
        tally.check("inverse", g_compose(a, g_inverse(a)) == unit(a.x)
                    and g_compose(g_inverse(a), a) == unit(a.y), w)
        tally.check("associativity", g_compose(g_compose(a, b), c) == g_compose(a, g_compose(b, c)), w)
        ab = g_compose(a, b)
        tally.check("cocycle", functor_cocycle(deg, ab) == dg.add(functor_cocycle(deg, a),
                                                                  functor_cocycle(deg, b))
                    and c_lambda(ab) == dg.add(a.m, b.m), w)
        l = l_cocycle(a)
        tally.check("l_cocycle", dg.leq(dg.pos(a.m), l) and a.x.shift(l) == a.y.shift(dg.sub(l, a.m)), w)
        A = _random_bisection(g, rng, 1)
        B = _random_bisection(g, rng, 1)
        prod = bisection_product(A, B)
        cands = [a, _arrow_in_product(g, rng, A, B)]
        for t in cands:
            if t is None:
                continue
            got = any(bisection_member(t, P) for P in prod)
            tally.check("product", got == product_member_oracle(t, A, B),
                        lambda: {"arrow": str(t), "A": str(A), "B": str(B)})
    return tally.as_dict()
