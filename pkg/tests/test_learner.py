import math
import random
from fractions import Fraction as Fr

import pytest
from hypothesis import given, strategies as st

from scdim.concepts import F5, ConceptClass, cube, thresholds
from scdim.covers import facet_cover
from scdim.learner import (CoverAuditError, NotRealizableError, PipelineError, RealizableDistribution, Sample,
                           build_pipeline, cover_learner, draw_sample, empirical_estimate,
                           learner_cover_estimate, loss, loss_l1, random_realizable, required_sample_size,
                           run_experiment)

from conftest import golden


def test_loss_examples():
    assert loss((Fr(1, 2), Fr(-1, 2), 0), 0b111) == Fr(1, 2)
    mu = random_realizable(F5(), 3)
    assert loss(mu, mu.witness) == 0


def test_loss_identity_random_pairs():
    rng = random.Random(0)
    C = F5()
    for k in range(1000):
        mu = random_realizable(C, k)
        h = rng.randrange(8)
        assert loss(mu, h) == loss_l1(mu, h)
        assert 0 <= loss(mu, h) <= 1


def test_distribution_validation():
    with pytest.raises(NotRealizableError):
        RealizableDistribution((Fr(1, 2), Fr(1, 4), 0), 0b11)
    with pytest.raises(NotRealizableError):
        RealizableDistribution((Fr(1, 2), Fr(-1, 2), 0), 0b11)
    with pytest.raises(NotRealizableError):
        RealizableDistribution.from_weights((Fr(-1, 2), Fr(1, 2)), thresholds(3))


def test_random_realizable_pinned():
    g = golden("random_realizable.json")
    for name, C in (("f5", F5()), ("thresholds5", thresholds(5))):
        assert [random_realizable(C, s).as_dict() for s in range(6)] == g[name]


def test_sample_consistency_pinned():
    g = golden("random_realizable.json")["sample_thresholds5_seed7_n10000_seed11"]
    mu = random_realizable(thresholds(5), 7)
    mu_hat = empirical_estimate(draw_sample(mu, 10000, 11))
    assert mu_hat.as_dict() == g["mu_hat"]
    assert sum(abs(a - b) for a, b in zip(mu.weights, mu_hat.weights)) < Fr(1, 20)


def test_point_mass_and_denominators():
    mu = RealizableDistribution((0, Fr(-1), 0), 0b001)
    for n in (1, 7, 1000):
        assert empirical_estimate(draw_sample(mu, n, n)) == mu
    S = draw_sample(random_realizable(F5(), 2), 37, 5)
    est = empirical_estimate(S)
    assert sum(abs(w) for w in est.weights) == 1 and all(37 % w.denominator == 0 for w in est.weights)
    assert sum(k for _, k in S.counts) == 37 and len(list(S.pairs())) == 37
    with pytest.raises(ValueError):
        draw_sample(mu, 0, 1)


def test_required_sample_size():
    assert required_sample_size(1, Fr(1, 2), Fr(1, 4), 3) == 45
    assert required_sample_size(1, Fr(1, 2), Fr(1, 4), 3) == math.ceil(8 * (6 * math.log(2) + math.log(4)))
    a = required_sample_size(Fr(1, 2), math.inf, Fr(1, 10), 4)
    b = required_sample_size(Fr(1, 4), math.inf, Fr(1, 10), 4)
    assert 4 * a - 3 <= b <= 4 * a
    assert required_sample_size(1, Fr(1, 2), Fr(1, 8), 3) >= required_sample_size(1, Fr(1, 2), Fr(1, 4), 3)


def test_cover_learner_ties_and_vertices():
    F = facet_cover(F5())
    apex = Sample(5, 0, (((2, 1), 5),), 0b100, 3)
    # (0, 0, 1) lies in four facets; the first label holding it wins
    assert cover_learner(F, apex) == next(g for g in F.labels if (g >> 2) & 1) == 0b111
    far = Sample(3, 0, (((0, -1), 3),), 0b100, 3)
    assert cover_learner(F, far) in F.labels and not (cover_learner(F, far) & 1)
    empty = facet_cover(ConceptClass.from_strings(["++-"]))
    with pytest.raises(CoverAuditError):
        cover_learner(empty, Sample(1, 0, (((2, 1), 1),), 0b100, 3))


@pytest.fixture(scope="module")
def t4_pipeline():
    return build_pipeline(thresholds(4), Fr(1, 10), Fr(1, 10))


def test_pipeline(t4_pipeline):
    p = t4_pipeline
    assert p.order == 1 and p.list_size == 2 and p.eps0 == Fr(1, 20)
    assert p.n == required_sample_size(p.eps, p.beta, p.delta, 3)
    with pytest.raises(PipelineError):
        build_pipeline(ConceptClass.from_strings(["++", "--"]), Fr(1, 10), Fr(1, 10))


def test_learner_accuracy(t4_pipeline):
    p = t4_pipeline
    for seed in range(30):
        mu = random_realizable(p.klass, seed)
        S = draw_sample(mu, p.n, seed + 100)
        mu_hat = empirical_estimate(S)
        h = cover_learner(p.cover, S)
        assert loss(mu_hat, h) <= p.eps / 2
        assert loss(mu, h) <= loss(mu_hat, h) + sum(abs(a - b) for a, b in zip(mu.weights, mu_hat.weights))


def test_reverse_direction(t4_pipeline):
    p = t4_pipeline
    C = p.klass
    grid = [random_realizable(C, s) for s in range(25)] + [RealizableDistribution((0, 0, Fr(1)), 0b111)]
    est = learner_cover_estimate(lambda S: cover_learner(p.cover, S), C, p.eps, p.delta, 2, p.n, grid, 40, 3)
    assert est.approximate and est.witness_order() <= 1
    assert all(len(m) <= 2 for m in est.members)
    point = est.members[-1]
    assert point == [cover_learner(p.cover, draw_sample(grid[-1], 5, 0))]


def test_experiment_determinism_and_bounds(t4_pipeline):
    a = run_experiment(thresholds(4), Fr(1, 10), Fr(1, 10), 8, 10, seed=9, pipeline=t4_pipeline)
    b = run_experiment(thresholds(4), Fr(1, 10), Fr(1, 10), 8, 10, seed=9, pipeline=t4_pipeline)
    assert a.to_json() == b.to_json()
    assert a.ok and a.aggregate["max_list_size"] <= 2
    for t in a.trials:
        assert abs(sum(t["outputs"].values()) - 10) == 0


@pytest.mark.parametrize("C,bound", [(thresholds(5), 2), (F5(), 3), (cube(3), 3)])
def test_small_experiments(C, bound):
    r = run_experiment(C, Fr(1, 20), Fr(1, 20), 10, 10, seed=1)
    assert r.ok and r.aggregate["max_list_size"] <= bound == r.aggregate["list_bound"]


@given(st.integers(0, 10 ** 9), st.integers(0, 7))
def test_loss_identity_hypothesis(seed, h):
    mu = random_realizable(F5(), seed)
    assert loss(mu, h) == loss_l1(mu, h)
    est = empirical_estimate(draw_sample(mu, 50, seed))
    assert loss(est, est.witness) == 0
