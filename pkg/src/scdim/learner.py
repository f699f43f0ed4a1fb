"""Realizable distributions, sampling, and the cover-driven list learner.

A realizable distribution over X x {+1, -1} is stored as a signed vector mu
with |mu|_1 = 1: |mu(x)| is the mass of x and the sign is its label.  The
learner estimates mu from a sample, reads off the closed cover element that
holds the estimate, and outputs its label.
"""
from __future__ import annotations

import decimal
import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .complexes import OutsideComplexError, fmt_rational
from .concepts import ConceptClass, concept_str, is_extremal

ZERO = Fraction(0)
ONE = Fraction(1)


class NotRealizableError(ValueError):
    pass


class CoverAuditError(RuntimeError):
    """The empirical estimate fell outside every cover element."""


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class RealizableDistribution:
    weights: tuple[Fraction, ...]
    witness: int

    def __post_init__(self):
        ws = tuple(Fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", ws)
        if sum(abs(w) for w in ws) != 1:
            raise NotRealizableError("weights must have l1 norm 1")
        for i, w in enumerate(ws):
            if w and (w > 0) != bool((self.witness >> i) & 1):
                raise NotRealizableError(f"witness disagrees with the sign at x{i + 1}")

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, w in enumerate(self.weights) if w)

    @classmethod
    def from_weights(cls, weights: Sequence, C: ConceptClass) -> "RealizableDistribution":
        ws = tuple(Fraction(w) for w in weights)
        for c in C.concepts:
            if all(not w or (w > 0) == bool((c >> i) & 1) for i, w in enumerate(ws)):
                return cls(ws, c)
        raise NotRealizableError("no concept of the class agrees with the signs")

    def as_dict(self) -> dict:
        return {"weights": [fmt_rational(w) for w in self.weights], "witness": concept_str(self.witness, self.n)}


def _weights(mu) -> tuple[Fraction, ...]:
    return mu.weights if isinstance(mu, RealizableDistribution) else tuple(Fraction(w) for w in mu)


def loss(mu, h: int) -> Fraction:
    """Probability that h disagrees with the label: mass on x with h(x) != sign mu(x)."""
    out = ZERO
    for i, w in enumerate(_weights(mu)):
        if w and (w > 0) != bool((h >> i) & 1):
            out += abs(w)
    return out


def loss_l1(mu, h: int) -> Fraction:
    """The same loss as half the l1 distance between mu and |mu| h."""
    ws = _weights(mu)
    return sum((abs(w - abs(w) * (1 if (h >> i) & 1 else -1)) for i, w in enumerate(ws)), ZERO) / 2


def _generator(seed) -> np.random.Generator:
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def random_realizable(C: ConceptClass, seed, scale: int = 1000) -> RealizableDistribution:
    """Uniform witness, uniform support size, integer weights normalized to mass 1."""
    rng = _generator(seed)
    c = C.concepts[int(rng.integers(len(C.concepts)))]
    k = int(rng.integers(1, C.n + 1))
    support = sorted(int(i) for i in rng.choice(C.n, size=k, replace=False))
    raw = [int(a) for a in rng.integers(1, scale + 1, size=k)]
    total = sum(raw)
    ws = [ZERO] * C.n
    for i, a in zip(support, raw):
        ws[i] = Fraction(a, total) * (1 if (c >> i) & 1 else -1)
    return RealizableDistribution(tuple(ws), c)


@dataclass(frozen=True)
class Sample:
    """n labelled draws, stored as counts per (point, label)."""

    n: int
    seed: object
    counts: tuple[tuple[tuple[int, int], int], ...]
    witness: int
    domain_size: int

    def pairs(self):
        for (x, b), k in self.counts:
            for _ in range(k):
                yield x, b


def draw_sample(mu: RealizableDistribution, n: int, seed) -> Sample:
    if n < 1:
        raise ValueError("sample size must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else _generator(seed)
    supp = mu.support
    probs = np.array([float(abs(mu.weights[i])) for i in supp])
    probs = probs / probs.sum()
    ks = rng.multinomial(n, probs)
    counts = tuple(((i, 1 if mu.weights[i] > 0 else -1), int(k)) for i, k in zip(supp, ks) if k)
    return Sample(n, None if isinstance(seed, np.random.Generator) else seed, counts, mu.witness, mu.n)


def empirical_estimate(S: Sample) -> RealizableDistribution:
    ws = [ZERO] * S.domain_size
    for (x, b), k in S.counts:
        ws[x] += Fraction(b * k, S.n)
    return RealizableDistribution(tuple(ws), S.witness)


def required_sample_size(eps, beta, delta, domain_size: int) -> int:
    """ceil(2 (2|X| ln 2 + ln(1/delta)) / tau^2) with tau = min(eps/2, beta)."""
    eps, delta = Fraction(eps), Fraction(delta)
    if eps <= 0 or delta <= 0 or domain_size < 1:
        raise ValueError("parameters must be positive")
    tau = eps / 2 if beta == math.inf else min(eps / 2, Fraction(beta))
    if tau <= 0:
        raise ValueError("beta must be positive")
    with decimal.localcontext() as ctx:
        ctx.prec = 60
        D = decimal.Decimal
        num = 2 * (2 * domain_size * D(2).ln() + (D(delta.denominator) / D(delta.numerator)).ln())
        val = num * D(tau.denominator) ** 2 / D(tau.numerator) ** 2
        return int(val.to_integral_value(rounding=decimal.ROUND_CEILING))


def cover_learner(F, S: Sample) -> int:
    """Label of the first element of the closed cover F holding the empirical estimate."""
    mu_hat = empirical_estimate(S)
    try:
        h = F.first_member(mu_hat.weights)
    except OutsideComplexError as e:
        raise CoverAuditError(f"empirical estimate lies outside the complex: {e}") from e
    if h is None:
        raise CoverAuditError("empirical estimate lies in no cover element")
    return h


# ---------------------------------------------------------------------------
# the reverse direction, statistically


@dataclass
class EstimatedCover:
    labels: tuple
    members: list  # per grid point: labels assigned
    frequencies: list  # per grid point: {label: frequency}
    threshold: float
    margin: float
    approximate: bool = True

    def witness_order(self) -> int:
        return max((len(m) for m in self.members), default=0) - 1


def learner_cover_estimate(A: Callable[[Sample], int], C: ConceptClass, eps, delta, L: int, n: int,
                           grid: Sequence[RealizableDistribution], reps: int, seed,
                           confidence: float = 0.05) -> EstimatedCover:
    """Monte-Carlo {V_h}: mu joins V_h when h is frequent and accurate at mu.

    Frequent means the observed rate clears (1 - 2 delta)/L by the Hoeffding
    margin sqrt(ln(2/confidence) / (2 reps)); accurate means loss < 2 eps, exactly.
    """
    eps, delta = Fraction(eps), Fraction(delta)
    thr = float((1 - 2 * delta) / L)
    margin = math.sqrt(math.log(2 / confidence) / (2 * reps))
    ss = np.random.SeedSequence(seed)
    members, freqs = [], []
    for mu, child in zip(grid, ss.spawn(len(grid))):
        rng = _generator(child)
        outs = Counter(A(draw_sample(mu, n, rng)) for _ in range(reps))
        fr = {h: k / reps for h, k in outs.items()}
        freqs.append(fr)
        members.append(sorted(h for h, q in fr.items() if q > thr + margin and loss(mu, h) < 2 * eps))
    return EstimatedCover(C.concepts, members, freqs, thr, margin)


# ---------------------------------------------------------------------------
# experiment harness


@dataclass
class LearnerPipeline:
    klass: ConceptClass
    eps: Fraction
    delta: Fraction
    eps0: Fraction
    retraction: object
    cover: object  # closed cover used by the learner
    order: int
    beta: Fraction
    n: int
    calibrated: bool = False

    @property
    def list_size(self) -> int:
        return self.order + 1


def build_pipeline(E: ConceptClass, eps, delta, calibrate: bool = False) -> LearnerPipeline:
    """retraction -> pullback -> closed shrinkage -> rounding radius -> sample size."""
    from .covers import StarCoverCover, build_retraction, closed_shrinkage, pullback_cover, rounding_radius
    eps, delta = Fraction(eps), Fraction(delta)
    eps0 = eps / 2
    if not is_extremal(E):
        raise PipelineError("input", ValueError("class is not extremal"))
    try:
        f, sc = build_retraction(E, eps0, boundary_for_cube=True)
    except Exception as e:  # stage label for the caller
        raise PipelineError("build_retraction", e) from e
    try:
        U = StarCoverCover(sc)
        P = pullback_cover(f, U, E, eps0)
    except Exception as e:
        raise PipelineError("pullback_cover", e) from e
    try:
        D = closed_shrinkage(P)
    except Exception as e:
        raise PipelineError("closed_shrinkage", e) from e
    try:
        beta = rounding_radius(D)
    except Exception as e:
        raise PipelineError("rounding_radius", e) from e
    n = required_sample_size(eps, beta, delta, E.n)
    if calibrate:
        n = max(1, n // 2)
    return LearnerPipeline(E, eps, delta, eps0, f, D, D.order_bound(), beta, n, calibrate)


@dataclass
class TrialRecord:
    mu: dict
    outputs: dict  # concept string -> count
    distinct: int
    listed: list
    list_losses: dict
    max_list_loss: str
    out_of_list: float
    triangle_ok: bool


@dataclass
class TrialReport:
    config: dict
    trials: list = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return bool(self.aggregate.get("ok"))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def run_experiment(E: ConceptClass, eps, delta, trials: int, runs: int, seed: int,
                   calibrate: bool = False, pipeline: LearnerPipeline | None = None) -> TrialReport:
    """Repeat the learner on random realizable distributions and audit its lists."""
    eps, delta = Fraction(eps), Fraction(delta)
    pipe = pipeline or build_pipeline(E, eps, delta, calibrate)
    L = pipe.list_size
    slack = float(delta) + 3 * math.sqrt(float(delta) / runs)
    report = TrialReport({
        "class_size": len(E), "domain_size": E.n, "eps": fmt_rational(eps), "delta": fmt_rational(delta),
        "eps0": fmt_rational(pipe.eps0), "trials": trials, "runs": runs, "seed": seed, "sample_size": pipe.n,
        "beta": fmt_rational(pipe.beta) if pipe.beta != math.inf else "inf", "list_size": L,
        "cover_order": pipe.order, "calibrated": pipe.calibrated, "beta_certified": False,
    })
    max_list = 0
    loss_viol = delta_viol = tri_viol = 0
    root = np.random.SeedSequence(seed)
    for child in root.spawn(trials):
        mu_seed, run_seed = child.spawn(2)
        mu = random_realizable(E, mu_seed)
        counts: Counter = Counter()
        tri = True
        for rs in run_seed.spawn(runs):
            S = draw_sample(mu, pipe.n, _generator(rs))
            mu_hat = empirical_estimate(S)
            try:
                h = cover_learner(pipe.cover, S)
            except Exception as e:
                raise PipelineError("cover_learner", e) from e
            gap = sum((abs(a - b) for a, b in zip(mu.weights, mu_hat.weights)), ZERO)
            if loss(mu, h) > loss(mu_hat, h) + gap:
                tri = False
            counts[h] += 1
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        listed = [h for h, _ in ranked[:L]]
        out = sum(k for h, k in ranked[L:]) / runs
        losses = {concept_str(h, E.n): loss(mu, h) for h in listed}
        worst = max(losses.values())
        max_list = max(max_list, len(counts))
        loss_viol += sum(1 for v in losses.values() if v > eps)
        delta_viol += out > slack
        tri_viol += not tri
        report.trials.append(asdict(TrialRecord(
            mu.as_dict(), {concept_str(h, E.n): k for h, k in sorted(counts.items())}, len(counts),
            [concept_str(h, E.n) for h in listed], {k: fmt_rational(v) for k, v in losses.items()},
            fmt_rational(worst), out, tri)))
    report.aggregate = {
        "max_list_size": max_list, "list_bound": L, "loss_violations": loss_viol,
        "delta_violations": delta_viol, "out_of_list_slack": slack, "triangle_violations": tri_viol,
        "ok": max_list <= L and loss_viol == 0 and delta_viol == 0 and tri_viol == 0,
    }
    return report
