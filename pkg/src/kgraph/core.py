"""Finite k-graphs presented by a coloured skeleton plus factorisation squares.

Paths are stored range-to-source: the word ``(a, b)`` is the composite
``a b`` with ``s(a) = r(b)``.  An edge runs from ``src`` to ``tgt``, so
``r(e) = tgt`` and ``s(e) = src``.  Every path is kept in its normal form,
the unique word listing colour-1 edges first, then colour-2 and so on.
"""
import itertools
import json
from collections import namedtuple

from . import degree as dg
from .errors import (
    CubeConditionFailure, DegreeOutOfRange, EndpointMismatch,
    InfiniteDegreeUnsupportedHere, MissingRule, NonBijectiveRule, ParseError,
    RangeMismatch, ValidationError,
)

Edge = namedtuple("Edge", "id color src tgt")


class Path:
    """A morphism of a k-graph in colour-sorted normal form."""

    __slots__ = ("graph", "range", "source", "edges", "degree")

    def __init__(self, graph, range_, source, edges, degree):
        self.graph = graph
        self.range = range_
        self.source = source
        self.edges = edges
        self.degree = degree

    @property
    def is_vertex(self):
        return not self.edges

    def __eq__(self, other):
        if not isinstance(other, Path):
            return NotImplemented
        return (self.range == other.range and self.edges == other.edges
                and self.graph == other.graph)

    def __hash__(self):
        return hash((self.range, self.edges))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def sort_key(self):
        return (dg.total(self.degree), self.degree, self.edges, self.range)

    def __str__(self):
        return ".".join(self.edges) if self.edges else str(self.range)

    def __repr__(self):
        return f"Path({self})"

    def __len__(self):
        return len(self.edges)


class KGraph:
    """A validated k-graph.  Build instances with :func:`validate`."""

    def __init__(self, rank, vertices, edges, swap, name=None):
        self.rank = rank
        self.vertices = tuple(vertices)
        self.edges = edges
        self.name = name
        self._swap = swap
        self._into = {}
        self._out = {}
        for e in edges.values():
            self._into.setdefault((e.tgt, e.color), []).append(e.id)
            self._out.setdefault((e.src, e.color), []).append(e.id)
        self._key = (rank, self.vertices,
                     tuple(sorted(edges.values())),
                     tuple(sorted(swap.items())))
        self._cache = {}
        self._props = None

    # -- identity -----------------------------------------------------
    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, KGraph):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"KGraph({self.name or '?'}, rank={self.rank})"

    def color(self, e):
        return self.edges[e].color

    # -- construction of paths ----------------------------------------
    def vertex(self, v):
        if v not in self.vertices:
            raise ValidationError(f"unknown vertex {v!r}")
        return Path(self, v, v, (), dg.zero(self.rank))

    def path(self, word):
        """Path from a vertex name, an ``a.b.c`` string or an edge sequence.

        The word need not be in normal form but must be composable.
        """
        if isinstance(word, Path):
            return word
        if isinstance(word, str):
            if word in self.vertices:
                return self.vertex(word)
            word = word.split(".")
        word = tuple(word)
        if not word:
            raise ValidationError("empty word needs a vertex name")
        for e in word:
            if e not in self.edges:
                raise ParseError(f"unknown edge {e!r}")
        for a, b in zip(word, word[1:]):
            if self.edges[a].src != self.edges[b].tgt:
                raise EndpointMismatch(f"{a} and {b} are not composable")
        return self._from_word(self._normalize(word))

    def _from_word(self, word):
        deg = [0] * self.rank
        for e in word:
            deg[self.edges[e].color - 1] += 1
        return Path(self, self.edges[word[0]].tgt, self.edges[word[-1]].src,
                    tuple(word), tuple(deg))

    def _normalize(self, word):
        w = list(word)
        col = self.edges
        for i in range(1, len(w)):
            j = i
            while j > 0 and col[w[j - 1]].color > col[w[j]].color:
                w[j - 1], w[j] = self._swap[(w[j - 1], w[j])]
                j -= 1
        return tuple(w)

    def _reorder(self, word, colors):
        """Rewrite ``word`` so that its colour sequence is ``colors``."""
        w = list(word)
        col = self.edges
        for p, c in enumerate(colors):
            q = p
            while col[w[q]].color != c:
                q += 1
            while q > p:
                w[q - 1], w[q] = self._swap[(w[q - 1], w[q])]
                q -= 1
        return w

    # -- operations ---------------------------------------------------
    def compose(self, lam, mu):
        """The composite ``lam mu``; requires ``s(lam) = r(mu)``."""
        if lam.source != mu.range:
            raise EndpointMismatch(f"s({lam}) = {lam.source} != r({mu}) = {mu.range}")
        if not lam.edges:
            return mu
        if not mu.edges:
            return lam
        return self._from_word(self._normalize(lam.edges + mu.edges))

    def _split(self, lam, m):
        rest = dg.sub(lam.degree, m)
        colors = [c + 1 for c in range(self.rank) for _ in range(m[c])]
        colors += [c + 1 for c in range(self.rank) for _ in range(rest[c])]
        w = self._reorder(lam.edges, colors)
        cut = dg.total(m)
        return w[:cut], w[cut:]

    def segment(self, lam, m, n):
        """The unique path ``lam(m, n)``."""
        m, n = tuple(m), tuple(n)
        if not (dg.leq(dg.zero(self.rank), m) and dg.leq(m, n)
                and dg.leq(n, lam.degree)):
            raise DegreeOutOfRange(f"need 0 <= {m} <= {n} <= {lam.degree}")
        if m == n:
            if not any(m):
                return self.vertex(lam.range)
            head, _ = self._split(lam, m)
            return self.vertex(self.edges[head[-1]].src)
        if any(m):
            _, tail = self._split(lam, m)
            lam = self._from_word(tail)
        rest = dg.sub(n, m)
        if rest == lam.degree:
            return lam
        head, _ = self._split(lam, rest)
        return self._from_word(head)

    def paths(self, v, n):
        """All of ``v Λ^n`` in normal form, in a fixed deterministic order."""
        key = ("paths", v, tuple(n))
        if key not in self._cache:
            colors = [c + 1 for c in range(self.rank) for _ in range(n[c])]
            out = []

            def walk(at, i, word):
                if i == len(colors):
                    out.append(Path(self, v, at, tuple(word), tuple(n)) if word
                               else self.vertex(v))
                    return
                for e in self._into.get((at, colors[i]), ()):
                    word.append(e)
                    walk(self.edges[e].src, i + 1, word)
                    word.pop()

            walk(v, 0, [])
            self._cache[key] = tuple(out)
        return self._cache[key]

    def paths_into(self, v, n):
        """All of ``Λ^n v`` (paths whose source is ``v``)."""
        key = ("paths_into", v, tuple(n))
        if key not in self._cache:
            colors = [c + 1 for c in range(self.rank) for _ in range(n[c])]
            out = []

            def walk(at, i, word):
                if i < 0:
                    out.append(self._from_word(tuple(word)) if word else self.vertex(v))
                    return
                for e in self._out.get((at, colors[i]), ()):
                    word.insert(0, e)
                    walk(self.edges[e].tgt, i - 1, word)
                    word.pop(0)

            walk(v, len(colors) - 1, [])
            self._cache[key] = tuple(sorted(out))
        return self._cache[key]

    def all_paths(self, bound):
        """Every path whose degree is at most ``bound``."""
        out = []
        for n in dg.box(tuple(bound)):
            for v in self.vertices:
                out.extend(self.paths(v, n))
        return out

    def mce(self, lam, mu):
        return [self.compose(lam, rho) for rho, _ in self.lambda_min(lam, mu)]

    def lambda_min(self, lam, mu):
        """Pairs ``(rho, tau)`` with ``lam rho = mu tau`` a minimal common extension."""
        if lam.range != mu.range:
            raise RangeMismatch(f"r({lam}) != r({mu})")
        key = ("min", lam.range, lam.edges, mu.edges)
        if key not in self._cache:
            big = dg.join(lam.degree, mu.degree)
            out = []
            for rho in self.paths(lam.source, dg.sub(big, lam.degree)):
                tau = self.compose(lam, rho)
                if self.segment(tau, dg.zero(self.rank), mu.degree) == mu:
                    out.append((rho, self.segment(tau, mu.degree, big)))
            self._cache[key] = tuple(out)
        return list(self._cache[key])

    def extends(self, lam, mu):
        """True iff ``lam = mu nu`` for some path ``nu``."""
        return (lam.range == mu.range and dg.leq(mu.degree, lam.degree)
                and self.segment(lam, dg.zero(self.rank), mu.degree) == mu)

    def is_exhaustive(self, v, E):
        """Whether every path in ``v Λ`` has a common extension with a member of E."""
        E = list(E)
        for mu in E:
            if mu.range != v:
                raise RangeMismatch(f"{mu} is not in {v}Λ")
        if not E:
            return False
        if any(mu.is_vertex for mu in E):
            return True
        big = E[0].degree
        for mu in E[1:]:
            big = dg.join(big, mu.degree)
        props = self.properties()
        if not props["has_sources"]:
            return all(any(self.extends(lam, mu) for mu in E)
                       for lam in self.paths(v, big))
        bound = dg.add(big, dg.scale(len(self.vertices), dg.ones(self.rank)))
        for n in dg.box(bound):
            for lam in self.paths(v, n):
                if not any(self.lambda_min(lam, mu) for mu in E):
                    return False
        return True

    def cells(self, v, n):
        """``v Λ^{<=n}``: paths of degree <= n that cannot grow where they fall short.

        For locally convex graphs these cylinders partition ``Z(v)``.
        """
        key = ("cells", v, tuple(n))
        if key not in self._cache:
            out = []
            for m in dg.box(tuple(n)):
                for lam in self.paths(v, m):
                    if all(m[i] == n[i] or not self._into.get((lam.source, i + 1))
                           for i in range(self.rank)):
                        out.append(lam)
            self._cache[key] = tuple(out)
        return self._cache[key]

    def has_edge_into(self, v, i):
        """Whether ``v Λ^{e_i}`` is nonempty (``i`` counted from 0)."""
        return bool(self._into.get((v, i + 1)))

    def properties(self):
        if self._props is None:
            k = self.rank
            sources = sorted(v for v in self.vertices
                             if any(not self._into.get((v, c)) for c in range(1, k + 1)))
            sinks = sorted(v for v in self.vertices
                           if any(not self._out.get((v, c)) for c in range(1, k + 1)))
            convex = True
            for v in self.vertices:
                for i, j in itertools.permutations(range(1, k + 1), 2):
                    if self._into.get((v, j)):
                        for e in self._into.get((v, i), ()):
                            if not self._into.get((self.edges[e].src, j)):
                                convex = False
            self._props = {
                "row_finite": True,
                "finitely_many_vertices": True,
                "finitely_aligned": True,
                "has_sources": bool(sources),
                "has_sinks": bool(sinks),
                "sources": sources,
                "sinks": sinks,
                "locally_convex": convex,
                "acyclic": self._acyclic(),
            }
        return self._props

    def _acyclic(self):
        state = {}

        def visit(v):
            state[v] = 1
            for e in self.edges.values():
                if e.tgt == v:
                    if state.get(e.src) == 1:
                        return False
                    if e.src not in state and not visit(e.src):
                        return False
            state[v] = 2
            return True

        return all(visit(v) for v in self.vertices if v not in state)

    # -- serialisation ------------------------------------------------
    def to_dict(self):
        squares = []
        seen = set()
        for (a, b), (c, d) in sorted(self._swap.items()):
            if self.color(a) > self.color(b) and (a, b) not in seen:
                seen.add((a, b))
                squares.append({"first": [b, a], "second": [d, c]})
        return {
            "rank": self.rank,
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "color": e.color, "src": e.src, "tgt": e.tgt}
                      for e in self.edges.values()],
            "squares": squares,
        }


def validate(spec, name=None):
    """Check a raw graph description and return a :class:`KGraph`.

    Examples
    ========

    >>> g = validate({"rank": 2, "vertices": ["v"],
    ...               "edges": [{"id": "b", "color": 1, "src": "v", "tgt": "v"},
    ...                         {"id": "r", "color": 2, "src": "v", "tgt": "v"}],
    ...               "squares": [{"first": ["b", "r"], "second": ["r", "b"]}]})
    >>> str(g.compose(g.path("r"), g.path("b")))
    'b.r'
    """
    try:
        k = int(spec["rank"])
        vertices = [str(v) for v in spec["vertices"]]
        raw_edges = spec["edges"]
        raw_squares = spec.get("squares", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed graph description: {exc}") from None
    if k < 1:
        raise ValidationError("rank must be positive")
    if len(set(vertices)) != len(vertices):
        raise ValidationError("duplicate vertex names")
    edges = {}
    for i, e in enumerate(raw_edges):
        try:
            edge = Edge(str(e["id"]), int(e["color"]), str(e["src"]), str(e["tgt"]))
        except (KeyError, TypeError, ValueError):
            raise ParseError("malformed edge", location=f"edges[{i}]") from None
        if edge.id in edges or edge.id in vertices:
            raise ValidationError(f"duplicate id {edge.id!r}")
        if not 1 <= edge.color <= k:
            raise ValidationError(f"edge {edge.id} has colour {edge.color} outside 1..{k}")
        if edge.src not in vertices or edge.tgt not in vertices:
            raise EndpointMismatch(f"edge {edge.id} uses an unknown vertex")
        edges[edge.id] = edge

    # a square {"first": [x, y], "second": [u, w]} equates the words (y, x) and (w, u)
    swap = {}
    for i, sq in enumerate(raw_squares):
        try:
            x, y = (str(t) for t in sq["first"])
            u, w = (str(t) for t in sq["second"])
        except (KeyError, TypeError, ValueError):
            raise ParseError("malformed square", location=f"squares[{i}]") from None
        for t in (x, y, u, w):
            if t not in edges:
                raise ParseError(f"unknown edge {t!r}", location=f"squares[{i}]")
        X, Y, U, W = edges[x], edges[y], edges[u], edges[w]
        if (X.tgt != Y.src or U.tgt != W.src or X.src != U.src or Y.tgt != W.tgt
                or X.color == Y.color or X.color != W.color or Y.color != U.color):
            raise EndpointMismatch(f"square {x}{y} = {u}{w} is not a valid commuting square")
        one, two = (y, x), (w, u)
        for p, q in ((one, two), (two, one)):
            if swap.get(p, q) != q:
                raise NonBijectiveRule(f"{p[0]}{p[1]} is assigned two different factorisations")
            swap[p] = q
    seen = {}
    for p, q in swap.items():
        if q in seen and seen[q] != p:
            raise NonBijectiveRule(f"{q[0]}{q[1]} is hit by both {p[0]}{p[1]} and "
                                   f"{seen[q][0]}{seen[q][1]}")
        seen[q] = p
    for a in edges.values():
        for b in edges.values():
            if a.color != b.color and a.src == b.tgt and (a.id, b.id) not in swap:
                raise MissingRule(f"no factorisation rule for {a.id}{b.id}")
    g = KGraph(k, vertices, edges, swap, name=name)
    if k >= 3:
        _check_cubes(g)
    return g


def _check_cubes(g):
    k = g.rank
    for i, j, l in itertools.combinations(range(1, k + 1), 3):
        for a in g.edges.values():
            if a.color != l:
                continue
            for b in g._into.get((a.src, j), ()):
                for c in g._into.get((g.edges[b].src, i), ()):
                    word = (a.id, b, c)
                    first = _apply(g, word, (0, 1, 0))
                    second = _apply(g, word, (1, 0, 1))
                    if first != second:
                        raise CubeConditionFailure(
                            f"tri-coloured path {'.'.join(word)} normalises two ways: "
                            f"{'.'.join(first)} vs {'.'.join(second)}", path=word)


def _apply(g, word, positions):
    w = list(word)
    for p in positions:
        w[p], w[p + 1] = g._swap[(w[p], w[p + 1])]
    return tuple(w)


def load(text, name=None):
    """Parse JSON text into a validated graph."""
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, location=f"line {exc.lineno} column {exc.colno}") from None
    return validate(spec, name=name)


def omega_vertex(p):
    return "_".join(str(a) for a in p)


def build_omega(k, m):
    """The finite k-graph Ω_{k,m}: morphisms are pairs p <= q <= m."""
    m = tuple(m)
    if len(m) != k:
        raise ValueError("degree has the wrong length")
    if any(a == dg.INF for a in m):
        raise InfiniteDegreeUnsupportedHere("infinite Ω is handled by OmegaGraph")
    verts = list(dg.box(m))
    edges = []
    for p in verts:
        for i in range(k):
            q = dg.add(p, dg.unit(k, i))
            if dg.leq(q, m):
                edges.append({"id": f"{omega_vertex(p)}c{i + 1}", "color": i + 1,
                              "src": omega_vertex(q), "tgt": omega_vertex(p)})
    squares = []
    for p in verts:
        for i, j in itertools.combinations(range(k), 2):
            ei, ej = dg.unit(k, i), dg.unit(k, j)
            top = dg.add(dg.add(p, ei), ej)
            if dg.leq(top, m):
                # traversal from top down to p, via p+e_j (colour i last) or via p+e_i
                squares.append({
                    "first": [f"{omega_vertex(dg.add(p, ej))}c{i + 1}", f"{omega_vertex(p)}c{j + 1}"],
                    "second": [f"{omega_vertex(dg.add(p, ei))}c{j + 1}", f"{omega_vertex(p)}c{i + 1}"],
                })
    return validate({"rank": k, "vertices": [omega_vertex(p) for p in verts],
                     "edges": edges, "squares": squares},
                    name=f"omega{k}_{'_'.join(map(str, m))}")


def omega_path(g, p, q):
    """The unique morphism (p, q) of a finite Ω graph."""
    k = g.rank
    word = []
    at = tuple(p)
    for i in range(k):
        for _ in range(q[i] - p[i]):
            word.append(f"{omega_vertex(at)}c{i + 1}")
            at = dg.add(at, dg.unit(k, i))
    return g.path(word) if word else g.vertex(omega_vertex(p))


# module-level conveniences mirroring the methods
def compose(lam, mu):
    return lam.graph.compose(lam, mu)


def segment(lam, m, n):
    return lam.graph.segment(lam, m, n)


def enumerate_paths(graph, v, n):
    return graph.paths(v, n)


def lambda_min(lam, mu):
    return lam.graph.lambda_min(lam, mu)


def is_exhaustive(graph, v, E):
    return graph.is_exhaustive(v, E)


def graph_properties(graph):
    return graph.properties()
