import itertools

import pytest
from hypothesis import given, settings, strategies as st

from kgraph import build_omega, omega_path, validate
from kgraph import degree as dg
from kgraph.errors import (
    CubeConditionFailure, DegreeOutOfRange, EndpointMismatch, MissingRule, NonBijectiveRule,
    ParseError,
)

from conftest import raw
from oracles import box, count_paths


TT2_BAD = {
    "rank": 2, "vertices": ["v"],
    "edges": [{"id": "e1", "color": 1, "src": "v", "tgt": "v"},
              {"id": "e2", "color": 1, "src": "v", "tgt": "v"},
              {"id": "f", "color": 2, "src": "v", "tgt": "v"}],
    "squares": [{"first": ["f", "e1"], "second": ["e2", "f"]},
                {"first": ["f", "e2"], "second": ["e2", "f"]}],
}


def test_t2_is_valid(t2):
    props = t2.properties()
    assert t2.rank == 2 and t2.vertices == ("v",)
    assert props["row_finite"] and not props["has_sources"] and not props["has_sinks"]


def test_tt2_swap_rules_accepted(tt2):
    assert sorted(tt2.edges) == ["e1", "e2", "f"]
    assert not tt2.properties()["has_sources"]


def test_non_bijective_rules_rejected():
    with pytest.raises(NonBijectiveRule):
        validate(TT2_BAD)


def test_missing_square_rejected():
    spec = dict(raw("t2"), squares=[])
    with pytest.raises(MissingRule):
        validate(spec)


def test_malformed_description():
    with pytest.raises(ParseError):
        validate({"vertices": []})


def test_compose_normal_form(t2, tt2):
    b, r = t2.path("b"), t2.path("r")
    assert str(t2.compose(b, r)) == "b.r"
    assert t2.compose(b, r).degree == (1, 1)
    assert t2.compose(r, b) == t2.compose(b, r)
    assert str(tt2.compose(tt2.path("f"), tt2.path("e1"))) == "e2.f"


def test_compose_endpoint_mismatch(omega22):
    lam = omega_path(omega22, (0, 0), (1, 0))
    with pytest.raises(EndpointMismatch):
        omega22.compose(lam, lam)


def test_segments(t2, tt2):
    br = t2.path("b.r")
    assert str(t2.segment(br, (0, 0), (1, 0))) == "b"
    assert t2.segment(br, (0, 0), (0, 0)) == t2.vertex("v")
    e1f = tt2.compose(tt2.path("e1"), tt2.path("f"))
    assert str(tt2.segment(e1f, (0, 1), (1, 1))) == "e2"
    with pytest.raises(DegreeOutOfRange):
        t2.segment(br, (0, 0), (2, 0))


def test_path_counts(t2, tt2, omega22):
    assert len(t2.paths("v", (2, 1))) == 1
    assert len(tt2.paths("v", (1, 1))) == 2
    assert [str(p) for p in omega22.paths("0_0", (1, 1))] == [str(omega_path(omega22, (0, 0), (1, 1)))]


@pytest.mark.parametrize("name", ["t2", "tt2", "tt2_flip", "omega22", "tt3", "two_loop"])
def test_path_counts_match_word_oracle(name):
    from kgraph import fixture
    g, spec = fixture(name), raw(name)
    for v in g.vertices:
        for n in box((2,) * g.rank):
            assert len(g.paths(v, n)) == count_paths(spec, v, n)


def test_mce(t2, tt2, omega22):
    b, r = t2.path("b"), t2.path("r")
    assert [str(p) for p in t2.mce(b, r)] == ["b.r"]
    assert [(str(a), str(c)) for a, c in t2.lambda_min(b, r)] == [("r", "b")]
    e1, f = tt2.path("e1"), tt2.path("f")
    assert tt2.mce(e1, f) == [tt2.compose(e1, f)]
    assert [(str(a), str(c)) for a, c in tt2.lambda_min(e1, f)] == [("f", "e2")]
    lam, mu = omega_path(omega22, (0, 0), (1, 0)), omega_path(omega22, (0, 0), (0, 1))
    assert omega22.mce(lam, mu) == [omega_path(omega22, (0, 0), (1, 1))]
    assert len(omega22.lambda_min(lam, mu)) == 1


def test_mce_by_enumeration(tt2):
    # every pair of paths of degree <= (1,1): brute-force common extensions at the join
    paths = tt2.all_paths((1, 1))
    for lam, mu in itertools.product(paths, repeat=2):
        top = dg.join(lam.degree, mu.degree)
        want = sorted(nu for nu in tt2.paths("v", top)
                      if tt2.extends(nu, lam) and tt2.extends(nu, mu))
        assert sorted(tt2.mce(lam, mu)) == want


def test_exhaustive(t2, tt2):
    assert t2.is_exhaustive("v", [t2.path("b")])
    # e2 has no common extension with e1: both would be the blue segment at 0
    e1, e2 = tt2.path("e1"), tt2.path("e2")
    assert tt2.mce(e1, e2) == []
    assert not tt2.is_exhaustive("v", [e1])
    assert tt2.is_exhaustive("v", [e1, e2])
    assert tt2.is_exhaustive("v", [tt2.path("f")])


def test_exhaustive_fails_with_missing_branch():
    g = validate({"rank": 1, "vertices": ["u", "v", "w"],
                  "edges": [{"id": "a", "color": 1, "src": "u", "tgt": "v"},
                            {"id": "c", "color": 1, "src": "w", "tgt": "v"}]})
    assert not g.is_exhaustive("v", [g.path("a")])
    assert g.is_exhaustive("v", [g.path("a"), g.path("c")])


def test_omega_properties(omega22):
    props = omega22.properties()
    assert props["row_finite"] and props["has_sources"] and props["has_sinks"]
    assert "2_2" in props["sources"] and "0_0" in props["sinks"]


def test_build_omega_counts():
    g = build_omega(2, (1, 1))
    assert len(g.vertices) == 4 and len(g.all_paths((1, 1))) == 9
    line = build_omega(1, (3,))
    assert len(line.vertices) == 4 and len(line.edges) == 3
    g = build_omega(2, (2, 2))
    assert len(g.vertices) == 9
    assert sum(1 for lam in g.all_paths((2, 2)) if lam.degree == (1, 1)) == 4


def test_build_omega_pair_count_oracle():
    # morphisms of Omega_{k,m} are pairs p <= q <= m
    for m in [(2,), (1, 2), (2, 2), (1, 1, 1)]:
        pairs = sum(1 for p in box(m) for q in box(m) if all(a <= b for a, b in zip(p, q)))
        assert len(build_omega(len(m), m).all_paths(m)) == pairs


def test_squares_hold(tt2):
    for sq in raw("tt2")["squares"]:
        a, b = sq["first"], sq["second"]
        assert tt2.path(a[::-1]) == tt2.path(b[::-1])


def test_cube_condition_failure():
    # each face is a bijection, but the e/f face twists only above e2 and g swaps e1, e2
    edges = [{"id": i, "color": c, "src": "v", "tgt": "v"}
             for i, c in [("e1", 1), ("e2", 1), ("f1", 2), ("f2", 2), ("g", 3)]]
    squares = [
        {"first": ["f1", "e1"], "second": ["e1", "f1"]},
        {"first": ["f2", "e1"], "second": ["e1", "f2"]},
        {"first": ["f1", "e2"], "second": ["e2", "f2"]},
        {"first": ["f2", "e2"], "second": ["e2", "f1"]},
        {"first": ["g", "e1"], "second": ["e2", "g"]},
        {"first": ["g", "e2"], "second": ["e1", "g"]},
        {"first": ["g", "f1"], "second": ["f1", "g"]},
        {"first": ["g", "f2"], "second": ["f2", "g"]},
    ]
    with pytest.raises(CubeConditionFailure):
        validate({"rank": 3, "vertices": ["v"], "edges": edges, "squares": squares})
    # untwisting the e/f face makes the cube commute
    squares[2:4] = [{"first": ["f1", "e2"], "second": ["e2", "f1"]},
                    {"first": ["f2", "e2"], "second": ["e2", "f2"]}]
    validate({"rank": 3, "vertices": ["v"], "edges": edges, "squares": squares})


def _roundtrip(g, lam):
    d = lam.degree
    for m in box(d):
        for n in box(d):
            if not dg.leq(m, n):
                continue
            parts = [g.segment(lam, (0,) * g.rank, m), g.segment(lam, m, n), g.segment(lam, n, d)]
            assert g.compose(g.compose(parts[0], parts[1]), parts[2]) == lam


@pytest.mark.parametrize("name", ["t2", "tt2", "omega22", "tt3"])
def test_factorisation_roundtrips(name):
    from kgraph import fixture
    g = fixture(name)
    for lam in g.all_paths((2,) * g.rank):
        _roundtrip(g, lam)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["e1", "e2", "f"]), min_size=1, max_size=6))
def test_any_word_has_one_normal_form(word):
    from kgraph import fixture
    g = fixture("tt2")
    lam = g.path(word)
    # reparsing the printed normal form is the identity, and degree counts letters
    assert g.path(str(lam)) == lam
    assert lam.degree == (word.count("e1") + word.count("e2"), word.count("f"))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["e1", "e2", "f"]), min_size=0, max_size=4),
       st.lists(st.sampled_from(["e1", "e2", "f"]), min_size=0, max_size=4),
       st.lists(st.sampled_from(["e1", "e2", "f"]), min_size=0, max_size=4))
def test_composition_associative(a, b, c):
    from kgraph import fixture
    g = fixture("tt2")
    p = lambda w: g.path(w) if w else g.vertex("v")
    x, y, z = p(a), p(b), p(c)
    assert g.compose(g.compose(x, y), z) == g.compose(x, g.compose(y, z))
