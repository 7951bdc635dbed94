"""Brute-force oracles that work on the raw JSON, never on the graph engine."""
import itertools


def sorted_words(spec, v, n):
    """Edge words ending at v (range first), colour 1 block first, then colour 2, ...

    Unique factorisation makes these one-to-one with v Λ^n.
    """
    by_color = {}
    for e in spec["edges"]:
        by_color.setdefault(e["color"], []).append(e)
    colours = []
    for i, c in enumerate(n):
        colours += [i + 1] * c
    words = [((), v)]
    for c in colours:
        words = [(w + (e["id"],), e["src"]) for w, at in words
                 for e in by_color.get(c, []) if e["tgt"] == at]
    return words


def count_paths(spec, v, n):
    return len(sorted_words(spec, v, n))


def square_closure(spec):
    """The two-edge words equal as morphisms, as a dict word -> set of words."""
    eq = {}
    for sq in spec["squares"]:
        a, b = tuple(sq["first"]), tuple(sq["second"])
        eq.setdefault(a, {a}).add(b)
        eq.setdefault(b, {b}).add(a)
    return eq


def box(n):
    return itertools.product(*(range(t + 1) for t in n))
