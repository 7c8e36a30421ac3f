"""Command-line surface: JSON in, canonical JSON report out.

Exit codes: 0 all asserted checks passed; 2 some check failed (the report is
still written); 1 usage or I/O error. Reports are byte-identical for the same
(config, seed); wall time goes to stderr only. XPLAB_SEED supplies the default
seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .blocks import make_rosenthal
from .criteria import (
    check_proof_bounds,
    check_prop24,
    check_thm13,
    kp_classify,
    prop21_diagnostic,
)
from .experiments import DRIVERS, run_experiment
from .operators import BlockProjection, estimate_opnorm, prop12_bound
from .report import Report, csv_rows
from .serialize import (
    SerializationError,
    block_to_doc,
    canonical_dumps,
    doc_to_block,
    doc_to_constants,
    doc_to_operator,
    doc_to_space,
    doc_to_vector,
    doc_to_witness,
    dump_json,
    load_json,
    space_to_doc,
    vector_to_doc,
    witness_to_doc,
)
from .space import SpVector, norm_2w, norm_p, ratio, xp_norm
from .splitter import InfeasibleConstantsError, solve_constants, split
from .weights import generate, rosenthal_diagnostic
from .criteria import WitnessInfeasibleError, gen_thm13_witnesses

__all__ = ["run", "main"]


def _default_seed() -> int:
    raw = os.environ.get("XPLAB_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise SerializationError(f"XPLAB_SEED must be an integer, got {raw!r}")


def _indices(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise SerializationError(f"expected comma-separated integers, got {text!r}")


def _inline_or_file(text: str):
    if text.lstrip().startswith("{") or text.lstrip().startswith("["):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise SerializationError(f"malformed inline JSON: {exc}") from exc
    return load_json(text)


def _vector_list(doc: dict, what: str):
    space = doc_to_space(doc)
    raw = doc.get("vectors")
    if not isinstance(raw, list) or not raw:
        raise SerializationError(f"{what} must carry a nonempty 'vectors' list")
    out = []
    for k, entries in enumerate(raw):
        out.append(doc_to_vector({"entries": entries}, space))
    return space, out


def _emit(report: Report, args) -> int:
    text = report.canonical()
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    csv = getattr(args, "csv", None)
    if csv:
        with open(csv, "w", encoding="utf-8") as fh:
            fh.write(csv_rows(report))
    if report.wall_time_s is not None:
        print(f"wall_time_s={report.wall_time_s:.3f}", file=sys.stderr)
    return 0 if report.verdict else 2


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xplab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, seed=False):
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--csv", help="also write checks as CSV rows")
        p.add_argument("--tol", type=float, default=1e-9)
        if seed:
            p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("norm", help="norms and ratio of one vector")
    p.add_argument("--x", required=True)
    common(p)

    p = sub.add_parser("blocks", help="build or validate blocks")
    bsub = p.add_subparsers(dest="sub", required=True)
    b = bsub.add_parser("rosenthal", help="extremal block on an index set")
    b.add_argument("--space", required=True)
    b.add_argument("--I", required=True, help="comma-separated indices")
    common(b)
    b = bsub.add_parser("check", help="evaluate the two block conditions")
    b.add_argument("--block", required=True)
    b.add_argument("--space", required=True)
    common(b)

    p = sub.add_parser("project", help="apply a block projection")
    p.add_argument("--x", required=True)
    p.add_argument("--projection", required=True)
    common(p)

    p = sub.add_parser("opnorm", help="sampled operator-norm lower bound")
    p.add_argument("--op", required=True)
    p.add_argument("--mode", choices=("xp", "2w"), default="xp")
    p.add_argument("--budget", type=int, default=256)
    common(p, seed=True)

    p = sub.add_parser("split", help="ratio split of a unit vector")
    p.add_argument("--x", required=True)
    p.add_argument("--constants", required=True, help="inline JSON or a path")
    p.add_argument("--projection", required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--budget", type=int, default=128)
    p.add_argument("--safety", type=float, default=1.05)
    common(p, seed=True)

    p = sub.add_parser("check", help="criterion checkers")
    csub = p.add_subparsers(dest="sub", required=True)
    c = csub.add_parser("thm13")
    c.add_argument("--witness", required=True)
    common(c)
    c = csub.add_parser("proof-bounds")
    c.add_argument("--y", required=True)
    c.add_argument("--F", required=True, help="comma-separated indices")
    c.add_argument("--rho", type=float, required=True)
    c.add_argument("--delta", type=float, required=True)
    common(c)
    c = csub.add_parser("prop24")
    c.add_argument("--z", required=True, help="vector-list document for the span")
    c.add_argument("--x-sample", required=True, help="vector-list document")
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--beta", type=float, required=True)
    c.add_argument("--bprime", type=float, required=True)
    c.add_argument("--variant", choices=("b", "bprime"), default="b")
    common(c, seed=True)

    p = sub.add_parser("gen", help="witness generators")
    gsub = p.add_subparsers(dest="sub", required=True)
    g = gsub.add_parser("thm13")
    g.add_argument("--space", required=True)
    g.add_argument("--eps", type=float, required=True)
    g.add_argument("--delta", type=float, required=True)
    g.add_argument("--c", type=float, required=True)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--start", type=int, default=0)
    common(g, seed=True)

    p = sub.add_parser("classify", help="span classification")
    ksub = p.add_subparsers(dest="sub", required=True)
    k = ksub.add_parser("kp")
    k.add_argument("--v", required=True, help="vector-list document")
    k.add_argument("--C", type=float, required=True)
    k.add_argument("--tail-start", type=int, default=None)
    k.add_argument("--budget", type=int, default=192)
    common(k, seed=True)

    p = sub.add_parser("diag", help="report-only diagnostics")
    dsub = p.add_subparsers(dest="sub", required=True)
    d = dsub.add_parser("prop21")
    d.add_argument("--u", required=True, help="vector-list document")
    d.add_argument("--w", required=True, help="vector-list document")
    d.add_argument("--projection", required=True)
    d.add_argument("--K", type=float, required=True)
    d.add_argument("--window", type=int, required=True)
    d.add_argument("--head-cut", type=int, default=0)
    d.add_argument("--c", type=float, default=None)
    d.add_argument("--delta", type=float, default=None)
    d.add_argument("--eps", type=float, default=None)
    d.add_argument("--budget", type=int, default=192)
    common(d, seed=True)

    p = sub.add_parser("experiment", help="seeded property campaigns")
    p.add_argument("name", choices=sorted(DRIVERS))
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--repro", help="where the splitter campaign writes a counterexample")
    common(p, seed=True)

    p = sub.add_parser("weights", help="weight families")
    wsub = p.add_subparsers(dest="sub", required=True)
    ww = wsub.add_parser("gen")
    ww.add_argument("--family", required=True, help="inline JSON or a path")
    ww.add_argument("--D", type=int, default=None)
    common(ww)
    ww = wsub.add_parser("diag")
    ww.add_argument("--family", required=True, help="inline JSON or a path")
    ww.add_argument("--eps", type=float, required=True)
    ww.add_argument("--D-list", required=True, help="comma-separated truncations")
    ww.add_argument("--p", type=float, required=True)
    common(ww)

    p = sub.add_parser("batch", help="run a list of commands, aggregate verdicts")
    p.add_argument("--config", required=True)
    common(p)
    return ap


def _seed_of(args) -> int:
    s = getattr(args, "seed", None)
    return _default_seed() if s is None else int(s)


def _cmd_norm(args) -> int:
    x = doc_to_vector(load_json(args.x))
    rep = Report("norm", {"x": args.x})
    rep.data = {
        "norm_p": norm_p(x),
        "norm_2w": norm_2w(x),
        "xp_norm": xp_norm(x),
        "ratio": None if x.is_zero() else ratio(x),
    }
    return _emit(rep, args)


def _cmd_blocks(args) -> int:
    space = doc_to_space(load_json(args.space))
    if args.sub == "rosenthal":
        I = _indices(args.I)
        blk = make_rosenthal(space, I)
        core2 = norm_2w(blk.vector)
        from .space import max_ratio

        cap = max_ratio(space, I)
        rep = Report("blocks rosenthal", {"space": args.space, "I": args.I})
        rep.data = {
            "block": {
                "support": list(blk.support.indices),
                "E": list(blk.support.indices),
                "entries": [[i, v] for i, v in sorted(blk.vector.entries.items())],
                "delta": 1.0,
                "c": cap / core2,
            }
        }
        return _emit(rep, args)
    blk = doc_to_block(load_json(args.block), space, require=False)
    core2 = norm_2w(blk.core())
    full2 = norm_2w(blk.vector)
    from .criteria import _check
    from .space import max_ratio

    rep = Report("blocks check", {"block": args.block, "space": args.space})
    rep.add_checks(
        [
            _check("condition_a", core2, ">=", blk.delta * full2),
            _check("condition_b", blk.c * core2, ">=", max_ratio(space, blk.Eset)),
        ]
    )
    rep.data = {"delta": blk.delta, "c": blk.c}
    return _emit(rep, args)


def _cmd_project(args) -> int:
    op = doc_to_operator(load_json(args.projection))
    x = doc_to_vector(load_json(args.x), getattr(op, "space", None))
    px = op.apply(x)
    rep = Report("project", {"x": args.x, "projection": args.projection})
    rep.data = {
        "Px": [[i, v] for i, v in sorted(px.entries.items())],
        "xp_norm_x": xp_norm(x),
        "xp_norm_Px": xp_norm(px),
    }
    if isinstance(op, BlockProjection):
        rep.data["analytic_bound"] = prop12_bound(op.system)
        rep.data["normalized_system"] = op.system.normalized
    return _emit(rep, args)


def _cmd_opnorm(args) -> int:
    seed = _seed_of(args)
    op = doc_to_operator(load_json(args.op))
    est = estimate_opnorm(op, mode=args.mode, budget=args.budget, seed=seed)
    rep = Report(
        "opnorm",
        {"op": args.op, "mode": args.mode, "budget": args.budget},
        seed=seed,
    )
    analytic = None
    if isinstance(op, BlockProjection) and args.mode == "xp" and op.system.normalized:
        analytic = prop12_bound(op.system)
    rep.data = {
        "lower": est.lower,
        "witness": [[i, v] for i, v in sorted(est.witness.entries.items())],
        "analytic_upper": analytic,
        "degenerate": est.degenerate,
    }
    return _emit(rep, args)


def _cmd_split(args) -> int:
    seed = _seed_of(args)
    op = doc_to_operator(load_json(args.projection))
    x = doc_to_vector(load_json(args.x), getattr(op, "space", None))
    cdoc = _inline_or_file(args.constants)
    if all(k in cdoc for k in ("alpha", "beta", "rho", "eps_prime")):
        consts = doc_to_constants(cdoc)
    else:
        for k in ("delta", "c", "eps"):
            if k not in cdoc:
                raise SerializationError(f"constants document is missing field {k!r}")
        normP = cdoc.get("normP")
        normP2 = cdoc.get("normP2")
        if normP is None:
            normP = estimate_opnorm(op, mode="xp", budget=args.budget, seed=seed).lower * args.safety
        if normP2 is None:
            normP2 = estimate_opnorm(op, mode="2w", budget=args.budget, seed=seed).lower * args.safety
        consts = solve_constants(
            float(cdoc["delta"]), float(cdoc["c"]), float(cdoc["eps"]),
            float(normP), float(normP2), x.space.p,
        )
    res = split(x, args.N, consts, op)
    rep = Report(
        "split",
        {"x": args.x, "projection": args.projection, "N": args.N},
        seed=seed,
    )
    rep.checks = [c.to_dict() for c in res.checks]
    rep.data = res.to_dict()
    return _emit(rep, args)


def _cmd_check(args) -> int:
    if args.sub == "thm13":
        wit = doc_to_witness(load_json(args.witness))
        out = check_thm13(wit, tol=args.tol)
        rep = Report("check thm13", {"witness": args.witness})
    elif args.sub == "proof-bounds":
        y = doc_to_vector(load_json(args.y))
        out = check_proof_bounds(y, _indices(args.F), args.rho, args.delta, tol=args.tol)
        rep = Report(
            "check proof-bounds",
            {"y": args.y, "F": args.F, "rho": args.rho, "delta": args.delta},
        )
    else:
        seed = _seed_of(args)
        _, Z = _vector_list(load_json(args.z), "--z")
        _, X = _vector_list(load_json(args.x_sample), "--x-sample")
        out = check_prop24(
            Z, X, args.eps, args.beta, args.bprime, variant=args.variant, seed=seed
        )
        rep = Report(
            "check prop24",
            {
                "z": args.z,
                "x_sample": args.x_sample,
                "eps": args.eps,
                "beta": args.beta,
                "bprime": args.bprime,
                "variant": args.variant,
            },
            seed=seed,
        )
    rep.add_checks(out.checks)
    rep.data = out.data
    return _emit(rep, args)


def _cmd_gen(args) -> int:
    seed = _seed_of(args)
    space = doc_to_space(load_json(args.space))
    wits = gen_thm13_witnesses(
        space, args.c, args.delta, args.eps, args.count, seed=seed, start=args.start
    )
    rep = Report(
        "gen thm13",
        {
            "space": args.space,
            "eps": args.eps,
            "delta": args.delta,
            "c": args.c,
            "count": args.count,
            "start": args.start,
        },
        seed=seed,
    )
    rep.data = {"witnesses": [witness_to_doc(w) for w in wits]}
    for k, w in enumerate(wits):
        out = check_thm13(w, tol=args.tol)
        for c in out.checks:
            d = c.to_dict()
            d["name"] = f"w{k}.{d['name']}"
            rep.checks.append(d)
    return _emit(rep, args)


def _cmd_classify(args) -> int:
    seed = _seed_of(args)
    _, V = _vector_list(load_json(args.v), "--v")
    out = kp_classify(V, args.C, tail_start=args.tail_start, budget=args.budget, seed=seed)
    rep = Report("classify kp", {"v": args.v, "C": args.C, "tail_start": args.tail_start}, seed=seed)
    rep.data = out
    return _emit(rep, args)


def _cmd_diag(args) -> int:
    seed = _seed_of(args)
    _, U = _vector_list(load_json(args.u), "--u")
    _, W = _vector_list(load_json(args.w), "--w")
    op = doc_to_operator(load_json(args.projection))
    out = prop21_diagnostic(
        U,
        W,
        op,
        args.K,
        args.window,
        head_cut=args.head_cut,
        c=args.c,
        delta=args.delta,
        eps=args.eps,
        budget=args.budget,
        seed=seed,
    )
    rep = Report(
        "diag prop21",
        {"u": args.u, "w": args.w, "projection": args.projection, "K": args.K, "window": args.window},
        seed=seed,
    )
    rep.data = out
    return _emit(rep, args)


def _cmd_experiment(args) -> int:
    seed = _seed_of(args)
    kwargs = {}
    if args.name == "splitter" and args.repro:
        kwargs["repro_path"] = args.repro
    out = run_experiment(args.name, seed=seed, scale=args.scale, **kwargs)
    rep = Report(
        "experiment",
        {"name": args.name, "scale": args.scale},
        seed=seed,
    )
    rep.checks = out["checks"]
    rep.data = out["data"]
    return _emit(rep, args)


def _cmd_weights(args) -> int:
    from .serialize import doc_to_family

    fam = doc_to_family(_inline_or_file(args.family))
    if args.sub == "gen":
        values = generate(fam, D=args.D)
        rep = Report("weights gen", {"family": args.family, "D": args.D})
        rep.data = {"weights": values}
        return _emit(rep, args)
    D_list = _indices(args.D_list)
    out = rosenthal_diagnostic(fam, args.eps, D_list, args.p)
    rep = Report(
        "weights diag",
        {"family": args.family, "eps": args.eps, "D_list": args.D_list, "p": args.p},
    )
    rep.data = out
    return _emit(rep, args)


def _cmd_batch(args) -> int:
    doc = load_json(args.config)
    runs = doc.get("runs") if isinstance(doc, dict) else doc
    if runs is None or not isinstance(runs, list):
        raise SerializationError("batch config must be a list or carry a 'runs' list")
    parser = _build_parser()
    parsed = []
    for k, argv in enumerate(runs):
        if not (isinstance(argv, list) and all(isinstance(t, str) for t in argv)):
            raise SerializationError(f"runs[{k}] must be a list of strings")
        if argv and argv[0] == "batch":
            raise SerializationError(f"runs[{k}]: batch cannot nest")
        try:
            parser.parse_args(argv)
        except SystemExit:
            raise SerializationError(f"runs[{k}] failed to parse: {argv!r}")
        parsed.append(argv)
    cfg_dir = os.path.dirname(os.path.abspath(args.config)) or "."
    rows = []
    counts = {"pass": 0, "fail": 0}
    prev = os.getcwd()
    os.chdir(cfg_dir)
    try:
        for argv in parsed:
            code = run(argv)
            ok = code == 0
            counts["pass" if ok else "fail"] += 1
            rows.append({"argv": argv, "exit": code})
    finally:
        os.chdir(prev)
    rep = Report("batch", {"config": args.config})
    rep.checks = [
        {"name": "runs_failed", "lhs": counts["fail"], "op": "<=", "rhs": 0, "ok": counts["fail"] == 0}
    ]
    rep.data = {"runs": rows, "counts": counts}
    return _emit(rep, args)


_HANDLERS = {
    "norm": _cmd_norm,
    "blocks": _cmd_blocks,
    "project": _cmd_project,
    "opnorm": _cmd_opnorm,
    "split": _cmd_split,
    "check": _cmd_check,
    "gen": _cmd_gen,
    "classify": _cmd_classify,
    "diag": _cmd_diag,
    "experiment": _cmd_experiment,
    "weights": _cmd_weights,
    "batch": _cmd_batch,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    t0 = time.perf_counter()
    try:
        handler = _HANDLERS[args.cmd]
        # wall time is measured around the handler but only reported to stderr
        code = handler(args)
    except (SerializationError, WitnessInfeasibleError, InfeasibleConstantsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wall_time_s={time.perf_counter() - t0:.3f}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
