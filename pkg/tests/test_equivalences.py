import random

import pytest
from hypothesis import given, settings, strategies as st

from kgraph import fixture, parse_boundary
from kgraph import degree as dg
from kgraph.boundary import OmegaGraph, random_boundary_path
from kgraph.errors import (
    CoverGap, NotBijective, RankMismatch, RankUnsupported, SkeletonMismatch,
    WitnessDisagreement,
)
from kgraph.groupoid import AbelianGroup, DegreeFunctor, Functor, GElem, random_arrow, unit
from kgraph.equivalences import (
    CocycleFamily, CylinderTable, IdentityMap, InducedFromIso, NBijection, PrefixTable,
    alternating_flip, check_coe, check_eventual_conjugacy, check_graded,
    check_period_preserving, cocycles_from_iso, induced_groupoid_hom, is_aperiodic, omega_coe,
    same_skeleton_homeo,
)

GLEX = NBijection.graded_lex(1, 2)


def samples(g, n, seed=0):
    rng = random.Random(seed)
    if isinstance(g, OmegaGraph):
        return [g.random_boundary_path(rng) for _ in range(n)]
    return [random_boundary_path(g, rng) for _ in range(n)]


def failing(report):
    return {k: v["witness"] for k, v in report["relations"].items() if v["status"] == "fail"}


# -- bijections of N^k -------------------------------------------------------------
def test_graded_lex_order():
    assert [GLEX((r,)) for r in range(6)] == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=3, max_size=3))
def test_graded_lex_roundtrip(p):
    phi = NBijection.graded_lex(3, 3)
    assert phi.inverse(phi(tuple(p))) == tuple(p)


def test_bijection_check():
    NBijection.swap().check(4)
    bad = NBijection(1, 1, lambda p: (p[0] // 2,), lambda q: q, "half")
    with pytest.raises(NotBijective):
        bad.check(4)


# -- continuous orbit equivalence ------------------------------------------------------
def test_identity_with_zero_lags_on_t2(t2):
    report = check_coe(IdentityMap(t2), CocycleFamily.zero(2), samples(t2, 5), dg.box((2, 2)))
    assert report["pass"]


def test_identity_needs_real_lags_off_t2(tt2):
    S = samples(tt2, 10)
    assert check_coe(IdentityMap(tt2), CocycleFamily.conjugacy(2), S, dg.box((2, 2)))["pass"]
    assert not check_coe(IdentityMap(tt2), CocycleFamily.zero(2), S, dg.box((2, 2)))["pass"]


def test_omega_example():
    h, fam = omega_coe(GLEX)
    S = samples(OmegaGraph(1), 30)
    report = check_coe(h, fam, S, [(m,) for m in range(4)])
    assert report["pass"], failing(report)
    assert set(report["relations"]) == {"orbit", "cocycle", "orbit_inverse", "cocycle_inverse",
                                        "bijective"}
    assert check_period_preserving(h, fam, S, 3)["pass"]


def test_omega_wrong_lag_is_caught():
    h, fam = omega_coe(GLEX)
    bad = CocycleFamily(fam.f, lambda m, x: fam.f(m, x))
    report = check_coe(h, bad, samples(OmegaGraph(1), 10), [(m,) for m in range(3)])
    assert not report["pass"]
    w = report["relations"]["orbit"]["witness"]
    assert w["m"] != [0] and w["f"] == w["g"]


def test_swap_is_orbit_equivalence_but_not_graded():
    h, fam = omega_coe(NBijection.swap())
    om = OmegaGraph(2)
    S = samples(om, 15)
    assert check_coe(h, fam, S, dg.box((2, 2)))["pass"]
    graded = check_graded(h, fam, DegreeFunctor(2), DegreeFunctor(2), S, dg.box((2, 2)))
    assert not graded["pass"]


def test_graded_trivial_group_always_passes(tt2):
    trivial = Functor(tt2, AbelianGroup(0), {e: () for e in tt2.edges})
    S = samples(tt2, 8)
    fam = CocycleFamily.zero(2)
    assert check_graded(IdentityMap(tt2), fam, trivial, trivial, S, dg.box((2, 2)))["pass"]


def test_graded_identity_and_conjugacy(t2):
    S = samples(t2, 5)
    d = DegreeFunctor(2)
    # with eta = d the lags must satisfy g_m - f_m = m, so f = g = 0 fails even on T2
    assert check_graded(IdentityMap(t2), CocycleFamily.conjugacy(2), d, d, S, dg.box((2, 2)))["pass"]
    zero = check_graded(IdentityMap(t2), CocycleFamily.zero(2), d, d, S, dg.box((2, 2)))
    assert zero["relations"]["graded"]["witness"]["lhs"] != [0, 0]
    t2p = fixture("t2_primed")
    h = PrefixTable.relabeling(t2, t2p, {"b": "b1", "r": "r1"})
    fam = CocycleFamily.conjugacy(2)
    assert check_graded(h, fam, d, d, S, dg.box((2, 2)))["pass"]
    perturbed = CocycleFamily(lambda m, x: (1, 0), fam.g, fam.i, fam.j)
    assert not check_graded(h, perturbed, d, d, S, dg.box((2, 2)))["pass"]


def test_period_preservation_on_fixtures(tt2, two_loop):
    for g in (tt2, two_loop):
        report = check_period_preserving(IdentityMap(g), CocycleFamily.conjugacy(g.rank),
                                         samples(g, 10), 2)
        assert report["pass"], failing(report)


# -- induced groupoid homomorphisms -----------------------------------------------------
def test_identity_data_gives_identity(tt2):
    phi = induced_groupoid_hom(IdentityMap(tt2), CocycleFamily.conjugacy(2))
    rng = random.Random(3)
    for _ in range(30):
        a = random_arrow(tt2, rng, 2)
        assert phi(a) == a
        assert phi(unit(a.x)) == unit(a.x)


def test_omega_induced_cocycle():
    h, fam = omega_coe(GLEX)
    phi = induced_groupoid_hom(h, fam)
    om = OmegaGraph(1)
    rng = random.Random(5)
    for _ in range(40):
        a = om.random_arrow(rng, 4)
        (p,), (q,) = a.witness
        (rx,), (ry,) = a.x.point, a.y.point
        want = dg.sub(dg.sub(GLEX((rx + p,)), GLEX((rx,))), dg.sub(GLEX((ry + q,)), GLEX((ry,))))
        assert phi(a).m == want


def test_corrupted_family_is_rejected():
    h, fam = omega_coe(GLEX)
    bump = lambda m, x: dg.add(fam.g(m, x), (1, 0)) if any(m) else fam.g(m, x)
    phi = induced_groupoid_hom(h, CocycleFamily(fam.f, bump))
    om = OmegaGraph(1)
    with pytest.raises(WitnessDisagreement):
        phi(GElem(om.point((0,)), (1,), om.point((1,)), ((1,), (0,))))


# -- cocycles recovered from an isomorphism -----------------------------------------------
def test_cocycles_from_identity(tt2):
    fam = cocycles_from_iso(lambda a: a, tt2, dg.box((2, 2)), depth=2)
    for x in samples(tt2, 10):
        for m in dg.box((2, 2)):
            assert fam.c(m, x) == m


def test_cocycles_from_relabeling(t2):
    t2p = fixture("t2_primed")
    h = PrefixTable.relabeling(t2, t2p, {"b": "b1", "r": "r1"})
    phi = lambda a: GElem(h(a.x), a.m, h(a.y))
    fam = cocycles_from_iso(phi, t2, dg.box((3, 3)), depth=2)
    induced = InducedFromIso(phi, t2, t2p)
    S = samples(t2, 5)
    assert check_coe(induced, fam, S, dg.box((2, 2)))["pass"]
    back = induced_groupoid_hom(induced, fam)
    rng = random.Random(2)
    for _ in range(20):
        a = random_arrow(t2, rng, 2)
        assert back(a) == phi(a)


def test_cylinder_table_json(t2):
    table = CylinderTable({(1, 0): [(t2.path("b"), [], (0, 0))]})
    again = CylinderTable.from_json(t2, table.to_json())
    assert again.to_json() == table.to_json()
    assert table.check_cover(t2, 1)
    x = samples(t2, 1)[0]
    with pytest.raises(CoverGap):
        table((0, 1), x)


# -- eventual conjugacy ------------------------------------------------------------------
def test_eventual_identity_and_relabeling(t2):
    S = samples(t2, 10)
    assert check_eventual_conjugacy(IdentityMap(t2), None, S, dg.box((2, 2)))["pass"]
    h = PrefixTable.relabeling(t2, fixture("t2_primed"), {"b": "b1", "r": "r1"})
    assert check_eventual_conjugacy(h, None, S, dg.box((2, 2)))["pass"]


def test_alternating_flip_is_not_eventually_conjugate(two_loop):
    h = alternating_flip(two_loop)
    S = samples(two_loop, 10)
    for lag in range(4):
        fam = CocycleFamily(lambda m, x, t=lag: (t,), None, lambda n, y, t=lag: (t,), None)
        report = check_eventual_conjugacy(h, fam, S, [(m,) for m in range(4)])
        assert not report["pass"]
        assert report["relations"]["eventual"]["witness"]["f"] == [lag]


def test_eventual_needs_equal_ranks():
    h, _ = omega_coe(GLEX)
    with pytest.raises(RankMismatch):
        check_eventual_conjugacy(h, None, samples(OmegaGraph(1), 2), [(1,)])


# -- same-skeleton maps --------------------------------------------------------------
def test_same_skeleton(tt2):
    flip = fixture("tt2_flip")
    assert all(same_skeleton_homeo(tt2, tt2)(x) == x for x in samples(tt2, 5))
    h = same_skeleton_homeo(flip, tt2)
    for x in samples(flip, 20):
        y = h(x)
        assert y.degree == x.degree
        assert h.inverse()(y) == x
        for n in range(7):
            assert y.initial((n, n)) == h.path_image(x.initial((n, n)))
    with pytest.raises(SkeletonMismatch):
        same_skeleton_homeo(tt2, fixture("t2"))
    with pytest.raises(RankUnsupported):
        same_skeleton_homeo(fixture("tt3"), fixture("tt3"))


def test_same_skeleton_is_not_a_conjugacy(tt2):
    h = same_skeleton_homeo(fixture("tt2_flip"), tt2)
    report = check_eventual_conjugacy(h, None, samples(fixture("tt2_flip"), 20), dg.box((2, 2)))
    assert not report["pass"]
    assert report["relations"]["eventual"]["witness"]["x"]


# -- aperiodicity ------------------------------------------------------------------
@pytest.mark.parametrize("name, verdict", [
    ("t2", "Periodic"), ("tt2", "Periodic"), ("two_loop", "Aperiodic"), ("omega22", "Aperiodic"),
])
def test_aperiodicity(name, verdict):
    assert is_aperiodic(fixture(name), 3).status == verdict


def test_omega_is_aperiodic():
    assert is_aperiodic(OmegaGraph(2), 3).status == "Aperiodic"


def test_two_loop_witnesses(two_loop):
    v = is_aperiodic(two_loop, 3)
    # each witness is a path whose segments after m and after n differ
    for key, word in v.witness.items():
        lam = two_loop.path(word)
        m, n = (int(t.strip("[]")) for t in key.split(":")[1].split("~"))
        span = lam.degree[0] - max(m, n)
        assert span > 0
        assert two_loop.segment(lam, (m,), (m + span,)) != two_loop.segment(lam, (n,), (n + span,))


def test_cylinder_images_off_the_diagonal(tt2):
    h = same_skeleton_homeo(fixture("tt2_flip"), tt2)
    flip = h.source
    # reading e1.e1 as a word gives e1.e1, but every point of Z(e1.e1) starts with e1.e2
    assert h.path_image(flip.path("e1.e1")) == tt2.path("e1.e1")
    assert h.cylinder_images(flip.path("e1.e1")) == [tt2.path("e1.e2")]
    lam = flip.path("e1.f")
    assert h.cylinder_images(lam) == [h.path_image(lam)]
