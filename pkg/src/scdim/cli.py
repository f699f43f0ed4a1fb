"""Command line front end: ``scdim <command> --gen thresholds:5 ...``.

Exit codes: 0 success, 1 a check or audit failed, 2 bad input, 3 a pipeline
stage failed.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import complexes as cx
from . import concepts as cc
from . import covers as cv
from . import learner as ln
from .retraction import RetractionError

COMMANDS = ("analyze", "complex", "cover", "retract", "certify", "learn", "verify")
EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PIPELINE = 0, 1, 2, 3


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    source: str  # generator descriptor or class file
    is_file: bool = False
    eps: Fraction = Fraction(1, 20)
    delta: Fraction = Fraction(1, 20)
    eps0: Fraction = Fraction(1, 4)
    depth: int = 1
    trials: int = 100
    runs: int = 50
    reps: int = 100
    seed: int = 0
    out: str | None = None
    kind: str = "delta"
    fmt: str = "json"
    samples: int = 1000
    calibrate: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        for name in ("eps", "delta", "eps0"):
            if getattr(self, name) <= 0:
                raise InputError(f"{name} must be positive")
        for name in ("trials", "runs", "reps", "samples"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be at least 1")
        if self.depth < 0:
            raise InputError("depth must be nonnegative")

    def load(self) -> cc.ConceptClass:
        try:
            if self.is_file:
                return cc.load_class(self.source)
            return cc.generate(self.source)
        except (OSError, ValueError) as exc:
            raise InputError(str(exc)) from exc


def _rational(text: str) -> Fraction:
    try:
        return cc.parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scdim", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--gen", help="generator descriptor, e.g. thresholds:5, cube:3, f5")
    src.add_argument("--class", dest="klass", help="class file (JSON with domain and concepts)")
    p.add_argument("--eps", type=_rational, default=Fraction(1, 20))
    p.add_argument("--delta", type=_rational, default=Fraction(1, 20))
    p.add_argument("--eps0", type=_rational, default=Fraction(1, 4))
    p.add_argument("--depth", type=int, default=1, help="subdivision level for exports")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--samples", type=int, default=1000, help="sampled points for spot checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=("delta", "gamma", "cubical"), default="delta")
    p.add_argument("--format", dest="fmt", choices=("json", "off"), default="json")
    p.add_argument("--calibrate", action="store_true", help="halve the sample size")
    p.add_argument("--out", help="write the JSON artifact here")
    return p


def config_from_args(argv: Sequence[str] | None = None) -> RunConfig:
    a = build_parser().parse_args(argv)
    return RunConfig(a.command, a.gen or a.klass, a.klass is not None, a.eps, a.delta, a.eps0, a.depth,
                     a.trials, a.runs, a.reps, a.seed, a.out, a.kind, a.fmt, a.samples, a.calibrate)


# ---------------------------------------------------------------------------
# commands


def _verdict_line(rep: dict) -> str:
    if "scdim" not in rep:
        return rep.get("verdict", "no verdict")
    shape = "cube" if rep["is_cube"] else "≠ cube"
    return f"SCdim = {rep['scdim']}, LR = {rep['lr']} (extremal, {shape})"


def cmd_analyze(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict, str]:
    sh = cc.shattered_sets(C)
    ss = cc.strongly_shattered_sets(C)
    ext = len(ss) == len(sh)
    doc = {
        "size": len(C), "domain": list(C.domain.labels), "vc_dim": cc.vc_dim(C), "extremal": ext,
        "shattered": [sorted(cc.indices_of(m)) for m in sh],
        "strongly_shattered": [sorted(cc.indices_of(m)) for m in ss],
    }
    line = f"VC = {doc['vc_dim']}, " + ("extremal" if ext else "not extremal")
    if ext:
        rep = cv.certify(C, cfg.eps0, audit_points=50, seed=cfg.seed)
        if "scdim" in rep:
            doc["scdim"], doc["lr"] = rep["scdim"], rep["lr"]
            line += f", SCdim = {rep['scdim']}, LR = {rep['lr']}"
    return EXIT_OK, doc, line


def cmd_complex(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict | str, str]:
    if cfg.kind == "cubical":
        K = cx.build_cubical(C)
    elif cfg.kind == "gamma":
        K = cx.gamma_complex(C)
        for _ in range(max(cfg.depth - 1, 0)):
            K = cx.subdivide(K)
    else:
        K = cx.delta_complex(C, cfg.depth)
    if cfg.fmt == "off":
        text = cx.to_off(K)
        return EXIT_OK, text, f"OFF with {len(K.vertices)} vertices"
    doc = json.loads(cx.to_json(K))
    return EXIT_OK, doc, f"{cfg.kind} complex, dim {doc['dim']}"


def cmd_cover(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict, str]:
    vc = cc.vc_dim(C)
    U = cv.vertex_star_cover(C, cfg.eps0, boundary_for_cube=True)
    order = cv.cover_order(U)
    bound = vc - 1 if C.is_cube() else vc
    ok, worst = U.sc.verify()
    doc = {"labels": C.strings(), "order": order.order, "order_kind": order.kind, "bound": bound,
           "cells": len(U.sc.cells), "eps": cx.fmt_rational(U.sc.eps), "worst_distance": cx.fmt_rational(worst),
           "star_check": ok}
    good = ok and order.order <= bound
    return (EXIT_OK if good else EXIT_FAIL), doc, f"star cover order {order.order} ({order.kind}), bound {bound}"


def _sample_points(C: cc.ConceptClass, k: int, seed: int):
    rng = random.Random(seed)
    return [cv.random_delta_point(C, rng) for _ in range(k)]


def gamma_vertices(C: cc.ConceptClass, cubes) -> list:
    """Vertices of the subdivided cubical complex, embedded on the l1 sphere."""
    G = cx.gamma_complex(C)
    out = []
    for y in G.coords:
        if any(y) and cx.carrier_cube(y) in cubes:
            out.append(cx.normalize(y))
    return out


def check_retraction(C: cc.ConceptClass, eps0: Fraction, samples: int, seed: int) -> dict:
    """Spot checks: identity on the cubes, idempotence, property 1, pullback audit."""
    f, sc = cv.build_retraction(C, eps0, boundary_for_cube=True)
    U = cv.StarCoverCover(sc)
    P = cv.pullback_cover(f, U, C, eps0)
    fixed_bad = fixed = 0
    for mu in gamma_vertices(C, f.cubes):
        fixed += 1
        fixed_bad += f(mu) != mu
    idem = prop1 = outside = uncovered = 0
    worst = 0
    for mu in _sample_points(C, samples, seed):
        y = f(mu)
        idem += f(y) != y
        prop1 += not f.property1(mu)
        labs = P.members(mu)
        worst = max(worst, len(labs))
        uncovered += not labs
        outside += sum(1 for g in labs if 2 * cv.loss_of(mu, g) >= eps0)
    for mu in cv.star_witnesses(sc):
        labs = P.members(mu)
        worst = max(worst, len(labs))
        outside += sum(1 for g in labs if 2 * cv.loss_of(mu, g) >= eps0)
    vc = cc.vc_dim(C)
    bound = vc - 1 if C.is_cube() else vc
    doc = {"fixed_vertices": fixed, "fixed_violations": fixed_bad, "idempotence_violations": idem,
           "property1_violations": prop1, "pullback_witness_order": worst - 1, "order_bound": bound,
           "uncovered": uncovered, "outside_dilation": outside, "eps": cx.fmt_rational(f.eps)}
    doc["ok"] = (fixed_bad == 0 and idem == 0 and prop1 == 0 and uncovered == 0 and outside == 0
                 and worst - 1 <= bound)
    return doc


def cmd_retract(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict, str]:
    doc = check_retraction(C, cfg.eps0, cfg.samples, cfg.seed)
    line = "retraction checks " + ("passed" if doc["ok"] else "FAILED")
    return (EXIT_OK if doc["ok"] else EXIT_FAIL), doc, line


def cmd_certify(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict, str]:
    rep = cv.certify(C, cfg.eps0, seed=cfg.seed)
    if rep.get("extremal") and "scdim" not in rep:
        return EXIT_FAIL, rep, "certificate incomplete"
    return EXIT_OK, rep, _verdict_line(rep)


def cmd_learn(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict, str]:
    rep = ln.run_experiment(C, cfg.eps, cfg.delta, cfg.trials, cfg.runs, cfg.seed, cfg.calibrate)
    agg = rep.aggregate
    line = f"max list {agg['max_list_size']} (bound {agg['list_bound']}), " + ("ok" if rep.ok else "VIOLATIONS")
    return (EXIT_OK if rep.ok else EXIT_FAIL), json.loads(rep.to_json()), line


def verify_suite(C: cc.ConceptClass, cfg: RunConfig) -> list[tuple[str, bool, str]]:
    """Every invariant that applies to the class, as (name, passed, detail)."""
    out = []
    sh = cc.shattered_sets(C)
    ss = cc.strongly_shattered_sets(C)
    ext = cc.is_extremal(C)
    out.append(("sandwich", len(ss) <= len(C) <= len(sh) and ((len(ss) == len(sh)) == ext),
                f"{len(ss)} <= {len(C)} <= {len(sh)}"))
    rng = random.Random(cfg.seed)
    bad = 0
    for _ in range(cfg.samples):
        mu = ln.random_realizable(C, rng.randrange(1 << 30))
        h = rng.randrange(1 << C.n)
        bad += ln.loss(mu, h) != ln.loss_l1(mu, h)
    out.append(("loss identity", bad == 0, f"{bad} mismatches"))
    if ext:
        d = cc.vc_dim(cc.dual_class(C))
        out.append(("dual bound", d <= 2 * cc.vc_dim(C) + 1, f"vc(dual) = {d}"))
        U = cv.vertex_star_cover(C, cfg.eps0, boundary_for_cube=True)
        vc = cc.vc_dim(C)
        bound = vc - 1 if C.is_cube() else vc
        ok, worst = U.sc.verify()
        o = U.exact_order()
        out.append(("star cover", ok and o <= bound, f"order {o}, worst {cx.fmt_rational(worst)}"))
        rd = check_retraction(C, cfg.eps0, min(cfg.samples, 300), cfg.seed)
        out.append(("retraction", rd["ok"], json.dumps({k: v for k, v in rd.items() if k != "ok"})))
        if not C.is_cube():
            cert = cv.lower_bound_certificate(C)
            out.append(("lower certificate", cert.ok and cert.dim == vc, f"dim {cert.dim}"))
    for seed in range(3):
        U = cv.random_open_cover(C, cfg.seed + seed)
        F = cv.closed_shrinkage(U)
        W = cv.witness_points(C, level=F.meta["level"] + 1, n_random=500, seed=seed)
        ou, of = cv.cover_order(U, witnesses=W).order, cv.cover_order(F).order
        beta = cv.rounding_radius(F)
        audit = cv.rounding_audit(F, beta, probes=500, seed=seed)
        out.append((f"shrinkage {seed}", cv.is_shrinkage(U, F) and of <= ou and audit["violations"] == 0,
                    f"order {of} <= {ou}, beta {beta}"))
    return out


def cmd_verify(cfg: RunConfig, C: cc.ConceptClass) -> tuple[int, dict, str]:
    rows = verify_suite(C, cfg)
    doc = {"checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in rows]}
    failed = [n for n, ok, _ in rows if not ok]
    doc["ok"] = not failed
    line = "all checks passed" if not failed else "failed: " + ", ".join(failed)
    return (EXIT_OK if not failed else EXIT_FAIL), doc, line


HANDLERS = {"analyze": cmd_analyze, "complex": cmd_complex, "cover": cmd_cover, "retract": cmd_retract,
            "certify": cmd_certify, "learn": cmd_learn, "verify": cmd_verify}


def _dump(doc) -> str:
    if isinstance(doc, str):
        return doc
    return json.dumps(doc, indent=1, sort_keys=True, default=lambda o: cx.fmt_rational(o)
                      if isinstance(o, Fraction) else str(o))


def execute_command(cfg: RunConfig, stream=None) -> int:
    stream = stream or sys.stdout
    try:
        C = cfg.load()
        code, doc, line = HANDLERS[cfg.command](cfg, C)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ln.PipelineError as exc:
        print(f"pipeline failure at {exc.stage}: {exc.cause}", file=sys.stderr)
        return EXIT_PIPELINE
    except (RetractionError, cv.CertificateError, RuntimeError) as exc:
        print(f"pipeline failure: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = _dump(doc)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    print(line, file=stream)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SystemExit as exc:  # argparse reports its own message
        return EXIT_INPUT if exc.code else EXIT_OK
    return execute_command(cfg)


if __name__ == "__main__":
    sys.exit(main())
