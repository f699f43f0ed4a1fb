import random
from fractions import Fraction as Fr

import pytest

from scdim.collapse import build_contraction, collapse_search
from scdim.complexes import build_cubical, carrier_cube, cubes_of
from scdim.concepts import ConceptClass, F5, Partial, downward_closed, generate, thresholds

P = Partial.parse


def random_cube_point(cubes, rng):
    h = rng.choice(sorted(cubes, key=str))
    return tuple(Fr(h.value(i)) if (h.support >> i) & 1 else Fr(rng.randint(-8, 8), 8) for i in range(h.n))


def test_f5_collapses_in_five_steps():
    seq = collapse_search(build_cubical(F5()))
    assert seq.ok and len(seq) == 5 and seq.base.is_total
    assert any(c == P("**+") for c, _ in seq.steps)


def test_trivial_and_paths():
    one = collapse_search([P("+-")])
    assert one.ok and len(one) == 0 and one.base == P("+-")
    seq = collapse_search(build_cubical(thresholds(5)))
    assert seq.ok and len(seq) == 4


def test_failure_is_a_value():
    # the boundary of a square is a circle and cannot collapse
    ring = [P("++"), P("+-"), P("-+"), P("--"), P("+*"), P("-*"), P("*+"), P("*-")]
    seq = collapse_search(ring)
    assert not seq.ok and seq.base is None and seq.remaining == frozenset(ring)


@pytest.mark.parametrize("desc", ["f5", "thresholds:5", "downward:4:2", "downward:5:3", "cube:3"])
def test_contraction_endpoints(desc):
    E = generate(desc)
    cubes = frozenset(cubes_of(E))
    eps = Fr(1, 8)
    H = build_contraction(collapse_search(cubes), eps)
    rng = random.Random(5)
    for _ in range(100):
        y = random_cube_point(cubes, rng)
        assert H(y, 0) == y
        assert H(y, 1 - eps) == y
        assert H(y, 1) == H.base_point
        t = Fr(rng.randint(0, 64), 64)
        assert carrier_cube(H(y, t)) in cubes


def test_invalid_sequence():
    bad = collapse_search([P("++"), P("+-"), P("-+"), P("--"), P("+*"), P("-*"), P("*+"), P("*-")])
    with pytest.raises(ValueError):
        build_contraction(bad, Fr(1, 4))
