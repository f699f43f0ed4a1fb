import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, settings, strategies as st

from scdim.complexes import OutsideComplexError, cubes_of, gamma_point, normalize
from scdim.concepts import F5, Partial, cube, generate, thresholds
from scdim.covers import random_delta_point
from scdim.retraction import build_retraction, claim_separation, delta_chain, h_of
from scdim.starcover import loss_of

P = Partial.parse


@pytest.fixture(scope="module")
def f5_retraction():
    return build_retraction(F5(), Fr(1, 4))


def test_parameters(f5_retraction):
    f, sc = f5_retraction
    assert f.gamma == claim_separation(F5()) == Fr(2, 3)
    assert f.eps == Fr(1, 16) and f.eps < min(f.gamma, f.eps0 / 2)
    with pytest.raises(ValueError):
        build_retraction(F5(), Fr(1, 4), eps=Fr(1, 8))


def test_delta_chain():
    chain = delta_chain((Fr(5, 12), Fr(5, 12), Fr(1, 6)))
    assert [(str(h), a) for h, a in chain] == [("++*", Fr(1, 2)), ("+++", Fr(1, 2))]
    assert str(h_of((0, 0, 1))) == "**+"


def test_identity_on_gamma_vertices(f5_retraction):
    f, _ = f5_retraction
    verts = [normalize(gamma_point(h)) for h in cubes_of(F5()) if h.size]
    assert len(verts) == 11
    for v in verts:
        assert f(v) == v


def test_non_cube_region(f5_retraction):
    f, _ = f5_retraction
    mu = (Fr(5, 12), Fr(-5, 12), Fr(1, 6))
    assert str(h_of(mu)) == "+-*"
    assert f(mu) == (Fr(1, 3), Fr(-1, 3), Fr(1, 3))
    assert f.property1(mu)


def test_idempotent_and_property1(f5_retraction):
    f, _ = f5_retraction
    rng = random.Random(1)
    for _ in range(1000):
        mu = random_delta_point(F5(), rng)
        out = f(mu)
        assert f.in_image(out)
        assert f(out) == out
        assert f.property1(mu)


@pytest.mark.parametrize("desc", ["thresholds:4", "thresholds:5", "downward:4:2", "downward:5:6"])
def test_other_classes(desc):
    E = generate(desc)
    if E.is_cube():
        pytest.skip("cube")
    f, sc = build_retraction(E, Fr(1, 4))
    rng = random.Random(2)
    for _ in range(200):
        mu = random_delta_point(E, rng)
        out = f(mu)
        assert f(out) == out and f.property1(mu)
        # the star labels at f(mu) stay eps0-close to mu
        for g in sc.labels_at(tuple(x / max(abs(v) for v in out) for x in out)):
            assert 2 * loss_of(mu, g) < f.eps0


def test_errors():
    f, _ = build_retraction(F5(), Fr(1, 4))
    with pytest.raises(OutsideComplexError):
        f((Fr(1, 2), 0, 0))
    with pytest.raises(OutsideComplexError):
        f((Fr(-1, 3), Fr(-1, 3), Fr(-1, 3)))
    with pytest.raises(ValueError):
        build_retraction(cube(3), Fr(1, 4))
    g, _ = build_retraction(cube(2), Fr(1, 4), boundary_for_cube=True)
    assert g((Fr(1, 2), Fr(-1, 2))) == (Fr(1, 2), Fr(-1, 2))


def test_trace(f5_retraction):
    f, _ = f5_retraction
    steps = f.trace((Fr(5, 12), Fr(-5, 12), Fr(1, 6)))
    assert steps[0]["w"] == "+-*" and steps[-1].get("cube")


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6))
def test_property1_hypothesis(seed):
    f, _ = build_retraction(thresholds(4), Fr(1, 4))
    mu = random_delta_point(thresholds(4), random.Random(seed))
    assert f.property1(mu)
