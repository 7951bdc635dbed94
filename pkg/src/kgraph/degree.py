"""Arithmetic on degree vectors.

Degrees are plain tuples of ints.  Boundary-path degrees may contain
``INF`` in coordinates where the path is infinite.
"""
import math

INF = math.inf


def zero(k):
    return (0,) * k


def unit(k, i):
    """The generator e_i, with ``i`` counted from 0."""
    return tuple(1 if j == i else 0 for j in range(k))


def ones(k):
    return (1,) * k


def add(m, n):
    return tuple(a + b for a, b in zip(m, n))


def sub(m, n):
    return tuple(a - b for a, b in zip(m, n))


def neg(m):
    return tuple(-a for a in m)


def scale(t, m):
    return tuple(t * a for a in m)


def join(m, n):
    return tuple(max(a, b) for a, b in zip(m, n))


def meet(m, n):
    return tuple(min(a, b) for a, b in zip(m, n))


def leq(m, n):
    return all(a <= b for a, b in zip(m, n))


def pos(m):
    return tuple(max(a, 0) for a in m)


def negpart(m):
    return tuple(max(-a, 0) for a in m)


def total(m):
    return sum(m)


def is_zero(m):
    return not any(m)


def box(n):
    """All m with 0 <= m <= n, in lexicographic order."""
    if not n:
        yield ()
        return
    for head in range(n[0] + 1):
        for rest in box(n[1:]):
            yield (head,) + rest


def graded_lex_key(m):
    return (sum(m), tuple(m))


def fmt(m):
    """JSON-friendly rendering (``"inf"`` for infinite entries)."""
    return [("inf" if a == INF else int(a)) for a in m]


def _count(total_, k):
    """Number of vectors in N^k with entry sum ``total_``."""
    return math.comb(total_ + k - 1, k - 1) if k else int(total_ == 0)


def glex_rank(m):
    """Position of m in the graded-lex enumeration of N^k (total degree, then lex).

    Examples
    ========

    >>> [glex_unrank(i, 2) for i in range(6)]
    [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    >>> glex_rank((1, 1))
    4
    """
    k = len(m)
    t = sum(m)
    r = sum(_count(s, k) for s in range(t))
    left = t
    for i, a in enumerate(m):
        for b in range(a):
            r += _count(left - b, k - i - 1)
        left -= a
    return r


def glex_unrank(r, k):
    t = 0
    while r >= _count(t, k):
        r -= _count(t, k)
        t += 1
    out = []
    left = t
    for i in range(k - 1):
        a = 0
        while r >= _count(left - a, k - i - 1):
            r -= _count(left - a, k - i - 1)
            a += 1
        out.append(a)
        left -= a
    out.append(left)
    return tuple(out)
