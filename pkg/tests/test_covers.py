import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from scdim.complexes import SimplicialComplex, build_simplicial, delta_point, l1_dist
from scdim.concepts import F5, ConceptClass, Partial, cube, generate, thresholds, vc_dim
from scdim.covers import (INF, Cover, Everything, IncomparableError, ZeroLoss, certify, closed_shrinkage,
                          closed_subcomplex_cover, cover_order, cover_report, dumps_report, facet_cover,
                          is_refinement, is_shrinkage, lower_bound_certificate, metric_refinement_radius,
                          random_delta_point, random_open_cover, rounding_audit, rounding_radius,
                          union_audit, witness_points, zero_loss_cover, zero_loss_set)

P = Partial.parse


def grid_square(m):
    """m x m unit grid on [0, m]^2, each unit square split along its diagonal."""
    verts = [(x, y) for x in range(m + 1) for y in range(m + 1)]
    idx = {v: i for i, v in enumerate(verts)}
    tris = {}
    for x in range(m):
        for y in range(m):
            a, b, c, d = idx[(x, y)], idx[(x + 1, y)], idx[(x, y + 1)], idx[(x + 1, y + 1)]
            tris[(x, y)] = [(a, b, d), (a, c, d)]
    K = SimplicialComplex(verts, [(Fr(x), Fr(y)) for x, y in verts], [t for ts in tris.values() for t in ts])
    return K, tris


def block(tris, x0, x1, y0, y1):
    return [t for (x, y), ts in tris.items() if x0 <= x < x1 and y0 <= y < y1 for t in ts]


@pytest.fixture(scope="module")
def lebesgue_square():
    K, tris = grid_square(4)
    A = closed_subcomplex_cover(K, "abcd", [block(tris, 0, 3, 0, 3), block(tris, 1, 4, 0, 3),
                                            block(tris, 0, 3, 1, 4), block(tris, 1, 4, 1, 4)])
    B = closed_subcomplex_cover(K, "abcd", [block(tris, 0, 3, 0, 2), block(tris, 3, 4, 0, 2),
                                            block(tris, 0, 1, 2, 4), block(tris, 1, 4, 2, 4)])
    return K, A, B


def test_lebesgue_square_orders(lebesgue_square):
    K, A, B = lebesgue_square
    assert cover_order(A).order == 3 and cover_order(A).exact
    assert cover_order(B).order == 2
    assert is_shrinkage(A, B) and is_refinement(A, B)
    assert not is_refinement(B, A)
    assert set(A.members((Fr(2), Fr(2)))) == set("abcd")
    assert not union_audit(B, witness_points(K, n_random=500))


def test_lebesgue_square_rounding(lebesgue_square):
    _, _, B = lebesgue_square
    beta = rounding_radius(B)
    assert beta > 0
    audit = rounding_audit(B, beta, probes=3000)
    assert audit["violations"] == 0 and audit["max_met"] <= 3


def test_facet_cover_order():
    F = facet_cover(F5())
    assert cover_order(F).order == 3
    assert len(F.members((0, 0, 1))) == 4
    assert len(F.members((Fr(1, 3),) * 3)) == 1


def test_single_element():
    C = F5()
    U = Cover(("all",), (Everything("all"),), C)
    assert cover_order(U).order == 0
    F = closed_shrinkage(U)
    assert cover_order(F).order == 0 and rounding_radius(F) == INF


def test_zero_loss_sets():
    B = zero_loss_set(0b111, 3)
    assert B.contains((Fr(1, 3),) * 3) and B.contains((1, 0, 0))
    assert not B.contains((Fr(1, 2), Fr(-1, 2), 0))
    opposite = zero_loss_set(0, 3)
    assert not any(opposite.contains(delta_point(P(w))) for w in ("+**", "*+*", "++*", "+++"))
    C = F5()
    rng = random.Random(0)
    cov = zero_loss_cover(C, 0)
    for _ in range(1000):
        assert cov.members(random_delta_point(C, rng))


def test_refinement_examples():
    C = F5()
    whole = zero_loss_cover(C, 0, over="cube")
    assert is_refinement(whole, facet_cover(C))
    assert is_refinement(whole, zero_loss_cover(C, 0))
    # two disjoint facets cannot refine each other
    a = Cover((1,), (zero_loss_set(0b111, 3),), C)
    b = Cover((1,), (zero_loss_set(0b000, 3),), C)
    assert not is_refinement(a, b)


def test_metric_refinement_radius():
    C = F5()
    A, B = zero_loss_cover(C, Fr(1, 4)), zero_loss_cover(C, 0)
    assert metric_refinement_radius(A, B) == Fr(1, 8)
    whole = Cover(("all",), (Everything("all"),), C)
    assert metric_refinement_radius(whole, B) == INF
    with pytest.raises(ValueError):
        metric_refinement_radius(Cover((0,), (zero_loss_set(0, 3, Fr(1, 4)),), C), B)


def test_closed_shrinkage_of_dilations():
    C = F5()
    U = zero_loss_cover(C, Fr(1, 4))
    F = closed_shrinkage(U)
    assert is_shrinkage(U, F)
    assert cover_order(F).order <= cover_order(U, witness_points(C, 2, 500)).order
    assert F.meta["level"] == 1


def test_segment_rounding():
    K = SimplicialComplex(["a", "b", "c", "d"], [(Fr(0),), (Fr(1, 3),), (Fr(2, 3),), (Fr(1),)],
                          [(0, 1), (1, 2), (2, 3)])
    F = closed_subcomplex_cover(K, [0, 1, 2], [[(0, 1)], [(1, 2)], [(2, 3)]])
    assert cover_order(F).order == 1
    assert rounding_radius(F) == Fr(1, 6)
    assert rounding_audit(F, Fr(1, 6), probes=2000)["violations"] == 0


@pytest.mark.parametrize("desc", ["f5", "thresholds:4"])
def test_random_open_covers(desc):
    C = generate(desc)
    wit = witness_points(C, 3, 2000)
    for seed in range(10):
        U = random_open_cover(C, seed)
        assert not union_audit(U, wit[:: 7])
        F = closed_shrinkage(U)
        assert is_shrinkage(U, F)
        assert cover_order(F).order <= cover_order(U, wit).order
        beta = rounding_radius(F)
        assert beta > 0
        assert rounding_audit(F, beta, probes=800, seed=seed)["violations"] == 0


def test_certificates():
    for desc, k in (("f5", 2), ("thresholds:4", 1), ("cube:3", 2)):
        cert = lower_bound_certificate(generate(desc))
        assert cert.ok and cert.dim == k and cert.alpha == Fr(1, generate(desc).n + 1)
        assert cert.min_gap >= Fr(1, generate(desc).n)


def test_certify_sandwich():
    for desc in ("f5", "thresholds:4"):
        E = generate(desc)
        r = certify(E, audit_points=60)
        assert r["lower"] == r["upper"] == vc_dim(E)
    r = certify(cube(3), audit_points=30)
    assert r["is_cube"] and r["lower"] == 2


def test_report_json():
    import json
    F = facet_cover(F5())
    doc = json.loads(dumps_report(cover_report(F, cover_order(F))))
    assert doc["order"] == 3 and doc["order_kind"] == "exact"
    assert len(doc["elements"]) == 5 and doc["elements"][0]["radius"] == "0/1"


@pytest.mark.parametrize("desc,order", [("f5", 2), ("thresholds:4", 1)])
def test_vertex_star_cover(desc, order):
    from scdim.covers import vertex_star_cover
    U = vertex_star_cover(generate(desc), Fr(1, 4))
    assert len(U) == len(generate(desc)) and cover_order(U).order == order
    with pytest.raises(ValueError):
        vertex_star_cover(cube(3), Fr(1, 4))


@pytest.mark.parametrize("desc,order", [("f5", 2), ("thresholds:5", 1)])
def test_pullback_cover(desc, order):
    from scdim.covers import build_retraction, pullback_cover, vertex_star_cover
    E = generate(desc)
    eps0 = Fr(1, 4)
    f, _ = build_retraction(E, eps0)
    U = vertex_star_cover(E, f.eps)
    Pc = pullback_cover(f, U, E, eps0)
    rng = random.Random(4)
    from scdim.covers import star_witnesses
    pts = [random_delta_point(E, rng) for _ in range(400)] + witness_points(E, 1, 0) + star_witnesses(U.sc)
    assert not union_audit(Pc, pts)
    assert cover_order(Pc, pts).order == order == Pc.order_bound()
    from scdim.starcover import loss_of
    assert all(2 * loss_of(mu, g) < eps0 for mu in pts for g in Pc.members(mu))
    D = closed_shrinkage(Pc)
    assert all(set(D.members(mu)) <= set(Pc.members(mu)) and D.members(mu) for mu in pts[:100])
    assert D.meta["certified_radius"] is False


@settings(max_examples=6)
@given(st.integers(0, 10 ** 6))
def test_shrinkage_never_raises_order(seed):
    C = thresholds(4)
    U = random_open_cover(C, seed)
    F = closed_shrinkage(U)
    assert is_shrinkage(U, F)
    assert cover_order(F).order <= cover_order(U, witness_points(C, 3, 300, seed)).order
