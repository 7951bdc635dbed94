"""Kumjian-Pask algebras realised as Steinberg algebras of the boundary path groupoid.

An element is a finitely supported function on the groupoid that is
constant on basis bisections.  It is stored at a *level* A: each term is a
pair ``(alpha, beta)`` with ``alpha`` a cell of ``r(alpha) Λ^{<=A}``, standing
for the indicator of ``Z(alpha *_s beta)``.  At a fixed level these sets
are pairwise disjoint, so the dictionary of coefficients is a normal form.

Examples
========

>>> from kgraph import fixture
>>> from kgraph.steinberg import INTEGERS, s, s_star
>>> t2 = fixture("t2")
>>> b, r = t2.path("b"), t2.path("r")
>>> s(b, INTEGERS) * s(r, INTEGERS) == s(t2.path("b.r"), INTEGERS)
True
>>> s_star(b, INTEGERS) * s(b, INTEGERS) == s(t2.vertex("v"), INTEGERS)
True
"""
import itertools
from fractions import Fraction

from . import degree as dg
from .errors import GraphMismatch, RelationFailure, RingMismatch, ValidationError
from .groupoid import BasisBisection


class Ring:
    """A commutative ring with unit, with coefficients held as Python numbers."""

    def __init__(self, name, coerce, reduced_indecomposable):
        self.name = name
        self._coerce = coerce
        self.reduced_indecomposable = reduced_indecomposable

    def __call__(self, value):
        return self._coerce(value)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def add(self, a, b):
        return self(a + b)

    def mul(self, a, b):
        return self(a * b)

    def neg(self, a):
        return self(-a)

    def __eq__(self, other):
        return isinstance(other, Ring) and other.name == self.name

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Ring({self.name})"


INTEGERS = Ring("z", int, True)
RATIONALS = Ring("q", Fraction, True)


def integers_mod(n):
    n = int(n)
    if n < 2:
        raise ValueError("modulus must be at least 2")
    prime = all(n % p for p in range(2, int(n ** 0.5) + 1))
    return Ring(f"z/{n}", lambda a: int(a) % n, prime)


def ring_from_name(name):
    name = name.strip().lower()
    if name in ("z", "int", "integers"):
        return INTEGERS
    if name in ("q", "rationals"):
        return RATIONALS
    if name.startswith("z/"):
        return integers_mod(name[2:])
    raise ValueError(f"unknown ring {name!r}")


def _require_convex(g):
    if not g.properties()["locally_convex"]:
        raise ValidationError("the algebra engine needs a locally convex graph")


def _refine(g, terms, level):
    """Rewrite every term at the given level."""
    out = {}
    for (alpha, beta), c in terms.items():
        for nu in g.cells(alpha.source, dg.sub(level, alpha.degree)):
            key = (g.compose(alpha, nu), g.compose(beta, nu))
            out[key] = out.get(key, 0) + c
    return out


class AlgebraElement:
    __slots__ = ("graph", "ring", "level", "terms")

    def __init__(self, graph, ring, terms=None):
        terms = dict(terms or {})
        level = dg.zero(graph.rank)
        for alpha, _ in terms:
            level = dg.join(level, alpha.degree)
        refined = _refine(graph, terms, level)
        self.graph = graph
        self.ring = ring
        self.level = level
        self.terms = {k: ring(v) for k, v in refined.items() if ring(v) != ring.zero}

    # -- arithmetic -------------------------------------------------------
    def _check(self, other):
        if other.graph != self.graph:
            raise GraphMismatch("elements live over different graphs")
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring.name} vs {other.ring.name}")

    def _aligned(self, other):
        level = dg.join(self.level, other.level)
        return (_refine(self.graph, self.terms, level),
                _refine(self.graph, other.terms, level))

    def __add__(self, other):
        self._check(other)
        a, b = self._aligned(other)
        for k, v in b.items():
            a[k] = a.get(k, 0) + v
        return AlgebraElement(self.graph, self.ring, a)

    def __neg__(self):
        return AlgebraElement(self.graph, self.ring,
                              {k: self.ring.neg(v) for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return AlgebraElement(self.graph, self.ring,
                              {k: self.ring.mul(c, v) for k, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._check(other)
        return alg_mul(self, other)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.graph != self.graph or other.ring != self.ring:
            return False
        a, b = self._aligned(other)
        return all(self.ring(a.get(k, 0)) == self.ring(b.get(k, 0)) for k in set(a) | set(b))

    __hash__ = None

    def is_zero(self):
        return not self.terms

    def star(self):
        return alg_star(self)

    def support(self):
        return [BasisBisection(a, b, check=False)
                for a, b in sorted(self.terms, key=lambda t: (t[0].sort_key(), t[1].sort_key()))]

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for a, b in sorted(self.terms, key=lambda t: (t[0].sort_key(), t[1].sort_key())):
            parts.append(f"{self.terms[(a, b)]}*Z({a} | {b})")
        return " + ".join(parts)

    __repr__ = __str__


def alg_mul(x, y):
    """Convolution.  Each pair of atoms is refined to a common middle degree."""
    x._check(y)
    g = x.graph
    ring = x.ring
    out = {}
    for (alpha, beta), c in x.terms.items():
        for (gamma, delta), e in y.terms.items():
            if beta.range != gamma.range:
                continue
            mid = dg.join(beta.degree, gamma.degree)
            ext = {}
            for nu in g.cells(gamma.source, dg.sub(mid, gamma.degree)):
                ext[g.compose(gamma, nu)] = nu
            for nu in g.cells(beta.source, dg.sub(mid, beta.degree)):
                hit = ext.get(g.compose(beta, nu))
                if hit is not None:
                    key = (g.compose(alpha, nu), g.compose(delta, hit))
                    out[key] = ring.add(out.get(key, 0), ring.mul(c, e))
    return AlgebraElement(g, ring, out)


def alg_add(x, y):
    return x + y


def alg_star(x):
    return AlgebraElement(x.graph, x.ring, {(b, a): c for (a, b), c in x.terms.items()})


def s(lam, ring):
    """The generator s_lam, the indicator of Z(lam *_s s(lam))."""
    _require_convex(lam.graph)
    return AlgebraElement(lam.graph, ring, {(lam, lam.graph.vertex(lam.source)): 1})


def s_star(lam, ring):
    return alg_star(s(lam, ring))


def indicator(A, ring):
    """The indicator function of a basis bisection Z(lam *_s mu minus G)."""
    g = A.lam.graph
    _require_convex(g)
    top = dg.zero(g.rank)
    for nu in A.G:
        top = dg.join(top, nu.degree)
    terms = {}
    for nu in g.cells(A.lam.source, top):
        if not any(g.extends(nu, h) for h in A.G):
            terms[(g.compose(A.lam, nu), g.compose(A.mu, nu))] = 1
    return AlgebraElement(g, ring, terms)


def zero(graph, ring):
    return AlgebraElement(graph, ring)


def grade_component(x, n):
    n = tuple(n)
    return AlgebraElement(x.graph, x.ring,
                          {(a, b): c for (a, b), c in x.terms.items()
                           if dg.sub(a.degree, b.degree) == n})


def is_diagonal(x):
    return all(a == b for a, b in x.terms)


# -- relation checking ------------------------------------------------------------
def _universe(g, depth):
    return [lam for lam in g.all_paths(dg.scale(depth, dg.ones(g.rank)))
            if dg.total(lam.degree) <= depth]


def _covers(g, v, E):
    """Z(v) minus the union of Z(lam), lam in E, is empty."""
    top = dg.zero(g.rank)
    for lam in E:
        top = dg.join(top, lam.degree)
    return all(any(g.extends(c, lam) for lam in E) for c in g.cells(v, top))


def minimal_exhaustive_sets(g, v, candidates, size):
    found = []
    for r in range(1, size + 1):
        for E in itertools.combinations(candidates, r):
            if any(set(f) <= set(E) for f in found):
                continue
            if g.is_exhaustive(v, E):
                found.append(E)
    return found


def verify_kp(g, ring, depth, table=None, raise_on_failure=True, max_set=3):
    """Check the Kumjian-Pask relations over all paths of total degree <= depth.

    ``table(lam, mu)`` supplies the pairs used on the right of (KP3); it
    defaults to the graph's own minimal common extensions.  The left side is
    computed by the convolution product, which never consults the table, so
    a wrong table is caught.  Returns a report dict, relation -> result.
    """
    _require_convex(g)
    table = table or g.lambda_min
    paths = _universe(g, depth)
    gen = {lam: s(lam, ring) for lam in paths}
    gstar = {lam: alg_star(gen[lam]) for lam in paths}
    report = {}

    def record(name, checked, failure):
        report[name] = {"status": "fail" if failure else "pass", "checked": checked,
                        "witness": failure}
        if failure and raise_on_failure:
            raise RelationFailure(name, failure)

    verts = [g.vertex(v) for v in g.vertices]
    fail, n = None, 0
    for p, q in itertools.product(verts, repeat=2):
        n += 1
        want = gen[p] if p == q else zero(g, ring)
        if gen[p] * gen[q] != want or gstar[p] != gen[p]:
            fail = fail or f"{p},{q}"
    record("KP1", n, fail)

    fail, n = None, 0
    for lam in paths:
        for mu in paths:
            if lam.source != mu.range or dg.total(lam.degree) + dg.total(mu.degree) > depth:
                continue
            n += 1
            lm = g.compose(lam, mu)
            if gen[lam] * gen[mu] != gen[lm] or gstar[mu] * gstar[lam] != gstar[lm]:
                fail = fail or f"{lam},{mu}"
    record("KP2", n, fail)

    fail, n = None, 0
    for lam in paths:
        for mu in paths:
            if lam.range != mu.range:
                continue
            n += 1
            rhs = zero(g, ring)
            for alpha, beta in table(lam, mu):
                rhs = rhs + s(alpha, ring) * s_star(beta, ring)
            if gstar[lam] * gen[mu] != rhs:
                fail = fail or f"{lam},{mu}"
    record("KP3", n, fail)

    fail, n = None, 0
    for v in g.vertices:
        cands = [lam for lam in paths if lam.range == v and not lam.is_vertex]
        sets = minimal_exhaustive_sets(g, v, cands, max_set)
        for m in dg.box(dg.scale(depth, dg.ones(g.rank))):
            level = [lam for lam in cands if lam.degree == m]
            if level and dg.total(m) <= depth and g.is_exhaustive(v, level):
                sets.append(tuple(level))
        for E in sets:
            n += 1
            prod = gen[g.vertex(v)]
            for lam in E:
                prod = prod * (gen[g.vertex(v)] - gen[lam] * gstar[lam])
            if not prod.is_zero() or not _covers(g, v, E):
                fail = fail or f"{v}:{{{','.join(map(str, E))}}}"
    record("KP4", n, fail)
    return report
