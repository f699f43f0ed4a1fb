import random
from fractions import Fraction as Fr

import pytest

from scdim.complexes import cubes_of, normalize
from scdim.concepts import F5, boxes, generate, is_extremal, vc_dim
from scdim.starcover import build_star_cover, loss_of

from test_collapse import random_cube_point


def test_loss_of():
    mu = (Fr(1, 2), Fr(-1, 4), Fr(1, 4))
    assert loss_of(mu, 0b111) == Fr(1, 4)
    assert loss_of(mu, 0b101) == 0


def test_f5_star_cover():
    E = F5()
    sc = build_star_cover(E, Fr(1, 4), cubes_of(E))
    assert sc.exact_order() == 2
    ok, worst = sc.verify()
    assert ok and worst < Fr(1, 4)
    assert set(sc.cells.values()) == set(E.concepts)


FAMILIES = ["f5", "thresholds:3", "thresholds:5", "downward:3:1", "downward:4:2", "downward:5:4",
            "cube:2", "cube:3", "boxes"]


@pytest.mark.parametrize("desc", FAMILIES)
def test_order_at_most_vc(desc):
    E = generate(desc) if desc != "boxes" else boxes([[1, 3], [2, 1], [3, 2], [4, 4]], 2)
    assert is_extremal(E)
    sc = build_star_cover(E, Fr(1, 4), [h for h in cubes_of(E) if h.size])
    assert sc.exact_order() <= vc_dim(E)
    assert sc.verify()[0]


def test_point_labels_stay_close():
    E = F5()
    eps = Fr(1, 4)
    cubes = frozenset(cubes_of(E))
    sc = build_star_cover(E, eps, cubes)
    rng = random.Random(0)
    for _ in range(500):
        y = random_cube_point(cubes, rng)
        labels = sc.labels_at(y)
        assert 1 <= len(labels) <= 3
        for g in labels:
            assert 2 * loss_of(normalize(y), g) < eps
