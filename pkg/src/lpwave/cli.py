"""Command line interface: ``lpwave <subcommand> ...``.

Exit codes: 0 success, 1 an invariant or check failed, 2 bad input.
Files named by ``--out`` are written as given; report files of ``run``,
``lp-ratio``, ``sign-sweep`` and ``suite`` go to ``--out-dir`` unless the
``LPWAVE_OUTPUT_DIR`` environment variable overrides it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

from . import acceptance
from ._backend import BACKEND
from .config import ParseError, load_config
from .czd import cz_decompose, save_decomposition, verify_cz
from .experiment import (
    RATIO_COLUMNS,
    SIGN_COLUMNS,
    NoInputsError,
    atomic_write,
    output_dir,
    ratio_svg,
    run,
    to_csv,
    to_json,
    write_outputs,
)
from .grid import format_function, load_function, lp_norm, parse_multi_index
from .lpverify import (
    XorShift64Star,
    khintchine_check,
    khintchine_constants,
    lp_ratios,
    sign_sweep,
    square_function,
    summarize_trials,
    weak11_check,
    weak11_sup,
)
from .proj1d import ProjectorContext, detail, project
from .scaling import biorthogonality_defect, save_system, scaling_from_spec, validate_conditions
from .tensor import TensorContext, detail_nd, project_nd


class CLIError(Exception):
    """Bad user input; reported on stderr with exit status 2."""


def _write_fn(f, out):
    if out is None or out == "-":
        sys.stdout.write(format_function(f))
    else:
        atomic_write(out, format_function(f))


def _inputs(paths) -> list:
    if not paths:
        raise NoInputsError("no inputs: pass at least one --in FILE")
    return [(Path(p).stem, load_function(p)) for p in paths]


def _tensor_ctx(scaling: str, f) -> TensorContext:
    sy = scaling_from_spec(scaling, f.grid.J)
    return TensorContext.build([sy] * f.grid.d, f.grid.axes)


def _k_cap(text, d):
    k = parse_multi_index(text, None)
    return k * d if len(k) == 1 and d > 1 else k


def _p_list(values):
    ps = values or [2.0]
    for p in ps:
        if not 1 < p < math.inf:
            raise CLIError(f"p={p} outside (1, inf)")
    return ps


def _emit(text: str, name: str, args) -> None:
    """CSV/JSON text to stdout, or into the output directory when one is set."""
    if args.out_dir is None and not _env_dir():
        sys.stdout.write(text)
        return
    path = output_dir(args.out_dir or ".") / name
    atomic_write(path, text)
    print(f"wrote {path}")


def _args_hash(args) -> str:
    """Config hash for ad-hoc commands: the arguments that shape the numbers."""
    skip = {"func", "out_dir", "svg", "command"}
    blob = json.dumps({k: v for k, v in sorted(vars(args).items()) if k not in skip}, sort_keys=True, default=str)
    return hashlib.sha256(f"{args.command}:{blob}".encode()).hexdigest()[:12]


def _env_dir():
    return os.environ.get("LPWAVE_OUTPUT_DIR")


# ------------------------------------------------------------------ commands


def cmd_gen_scaling(args) -> int:
    sy = scaling_from_spec(args.scaling, args.J)
    if args.out:
        save_system(sy, args.out)
    else:
        sys.stdout.write(format_function(sy.phi) + format_function(sy.phi_dual))
    return 0


def cmd_validate(args) -> int:
    sy = scaling_from_spec(args.scaling, args.J)
    rep = validate_conditions(sy)
    info = {"system": sy.name, "J": sy.J, **rep.as_dict(), "valid": rep.valid}
    info["biorthogonality_defect"] = biorthogonality_defect(sy, args.shifts)
    print(to_json(info), end="")
    return 0 if rep.valid else 1


def cmd_project(args) -> int:
    f = load_function(args.infile)
    if f.dim != 1:
        raise CLIError("project works on 1-D functions; use project-nd")
    ctx = ProjectorContext(scaling_from_spec(args.scaling, f.grid.J), f.grid1d)
    g = (detail if args.detail else project)(ctx, f, args.kappa)
    _write_fn(g, args.out)
    return 0


def cmd_project_nd(args) -> int:
    f = load_function(args.infile)
    ctx = _tensor_ctx(args.scaling, f)
    k = parse_multi_index(args.kappa, f.grid.d)
    if args.detail:
        g = detail_nd(ctx, f, k, inclusion_exclusion=args.inclusion_exclusion)
    else:
        g = project_nd(ctx, f, k)
    _write_fn(g, args.out)
    return 0


def cmd_czd(args) -> int:
    f = load_function(args.infile)
    if f.dim != 1:
        raise CLIError("czd works on 1-D functions")
    dec = cz_decompose(f, args.alpha)
    rep = verify_cz(dec, f)
    if args.out:
        save_decomposition(dec, args.out)
    print(to_json({"alpha": args.alpha, "selected": [[q.kappa, q.nu] for q in dec.selected], **rep.as_dict()}), end="")
    return 0 if rep.passed else 1


def cmd_square_fn(args) -> int:
    f = load_function(args.infile)
    ctx = _tensor_ctx(args.scaling, f)
    _write_fn(square_function(ctx, f, _k_cap(args.k_cap, f.grid.d)), args.out)
    return 0


def cmd_lp_ratio(args) -> int:
    ps = _p_list(args.p)
    rows, series, bad = [], {}, []
    for f_id, f in _inputs(args.infile):
        ctx = _tensor_ctx(args.scaling, f)
        k = _k_cap(args.k_cap, f.grid.d)
        tail = f - project_nd(ctx, f, k)
        base = {"config_hash": _args_hash(args), "system": ctx.axes[0].sys.name, "d": f.grid.d, "J": f.grid.J, "k_cap": k}
        for rec in lp_ratios(ctx, f, ps, k, f_id):
            rows.append(dict(base, f_id=f_id, p=rec.p, norm_f=rec.norm_f, norm_Sf=rec.norm_Sf,
                             ratio=rec.ratio, tail_norm=lp_norm(tail, rec.p)))
            series.setdefault(f_id, []).append((rec.p, rec.ratio))
            if not 0.05 <= rec.ratio <= 20:
                bad.append(f"{f_id} p={rec.p}: ratio {rec.ratio:.6g} outside [0.05, 20]")
    _emit(to_csv(RATIO_COLUMNS, rows), "ratios.csv", args)
    if args.svg:
        atomic_write(args.svg, ratio_svg(series))
    for msg in bad:
        print(f"invariant: {msg}", file=sys.stderr)
    return 1 if bad else 0


def cmd_sign_sweep(args) -> int:
    ps = _p_list(args.p)
    rows, summaries, d_max = [], {}, 1
    for f_id, f in _inputs(args.infile):
        d_max = max(d_max, f.grid.d)
        ctx = _tensor_ctx(args.scaling, f)
        k = _k_cap(args.k_cap, f.grid.d)
        base = {"config_hash": _args_hash(args), "system": ctx.axes[0].sys.name, "d": f.grid.d, "J": f.grid.J, "k_cap": k}
        for p in ps:
            recs = sign_sweep(ctx, f, p, k, args.trials, args.seed, free_signs=args.free_signs)
            summaries[f"{f_id}/p={p!r}"] = summarize_trials(recs)
            rows += [dict(base, f_id=f_id, p=r.p, seed=r.seed, trial=r.trial, free_signs=int(args.free_signs),
                          norm=r.norm, ratio=r.ratio) for r in recs]
    _emit(to_csv(SIGN_COLUMNS, rows), "signs.csv", args)
    note = "free signs: exploratory, outside the tensor-pattern theorem" if args.free_signs and d_max > 1 else None
    print(to_json({"summaries": summaries, "note": note}), end="", file=sys.stderr)
    return 0


def cmd_khintchine(args) -> int:
    if args.a:
        a = [float(x) for x in args.a.split(",") if x.strip()]
    else:
        rng = XorShift64Star(args.seed)
        a = [((rng.next_u64() >> 11) * 2.0**-53) * 2 - 1 for _ in range(args.n)]
    out = []
    for p in args.p or [1.25, 2.0, 4.0]:
        if not p >= 1:
            raise CLIError("p must be >= 1")
        r = khintchine_check(a, p, exhaustive_limit=args.exhaustive_limit, samples=args.samples, seed=args.seed)
        A, B = khintchine_constants(p)
        out.append({"p": p, "A_p": A, "B_p": B, **r._asdict()})
    print(to_json({"a": a, "results": out}), end="")
    bad = [r for r in out if not (r["lower_ratio"] <= 1 + 1e-12 and r["upper_ratio"] >= 1 - 1e-12)]
    return 1 if bad and all(r["exhaustive"] for r in bad) else 0


def cmd_weak11(args) -> int:
    f = load_function(args.infile)
    if f.dim != 1:
        raise CLIError("weak11 works on 1-D functions")
    ctx = ProjectorContext(scaling_from_spec(args.scaling, f.grid.J), f.grid1d)
    signs = [int(s) for s in args.signs.split(",")] if args.signs else [1] * (args.k_cap + 1)
    if len(signs) < args.k_cap + 1:
        raise CLIError(f"need {args.k_cap + 1} signs, got {len(signs)}")
    alphas = args.alpha or [2.0**e for e in range(-4, 9)]
    pairs = weak11_check(ctx, f, signs, args.k_cap, alphas)
    sup = weak11_sup(ctx, f, signs, args.k_cap)
    print(to_json({"pairs": pairs, "grid_max": max(v for _, v in pairs), "sup": sup}), end="")
    return 0 if math.isfinite(sup) else 1


def cmd_suite(args) -> int:
    only = {int(x) for x in args.only.split(",")} if args.only else None
    print(f"backend: {BACKEND}")
    results = acceptance.run_all(only, echo=print)
    if args.out_dir or _env_dir():
        blob = {r.number: {"name": r.name, "passed": r.passed, "measured": r.measured, "note": r.note}
                for r in results}
        path = output_dir(args.out_dir or ".") / "acceptance.json"
        atomic_write(path, to_json(blob))
        print(f"wrote {path}")
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    res = run(cfg)
    out = output_dir(args.out_dir or cfg.output)
    for path in write_outputs(res, out):
        print(f"wrote {path}")
    for msg in res.failures:
        print(f"invariant: {msg}", file=sys.stderr)
    return 0 if res.ok else 1


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lpwave", description="Littlewood-Paley experiments on dyadic grids.")
    sub = ap.add_subparsers(dest="command", required=True)

    def scaling(p, J=False):
        p.add_argument("--scaling", default="haar", help="haar | dbN | file:PATH (default haar)")
        if J:
            p.add_argument("--J", type=int, default=10, help="grid resolution (default 10)")

    p = sub.add_parser("gen-scaling", help="sample a scaling system and write phi and its dual")
    scaling(p, J=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_scaling)

    p = sub.add_parser("validate", help="check the decay and moment conditions of a scaling system")
    scaling(p, J=True)
    p.add_argument("--shifts", type=int, default=3, help="shift range for the biorthogonality defect")
    p.set_defaults(func=cmd_validate)

    for name, fn, nd in (("project", cmd_project, False), ("project-nd", cmd_project_nd, True)):
        p = sub.add_parser(name, help=f"apply the {'tensor ' if nd else ''}projector (or detail) at one scale")
        scaling(p)
        p.add_argument("--kappa", required=True, type=str if nd else int)
        p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--out")
        p.add_argument("--detail", action="store_true", help="detail operator instead of projector")
        if nd:
            p.add_argument("--inclusion-exclusion", action="store_true", help="oracle path for --detail")
        p.set_defaults(func=fn)

    p = sub.add_parser("czd", help="dyadic stopping-time decomposition at level alpha")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", help="decomposition JSON (parts go next to it)")
    p.set_defaults(func=cmd_czd)

    p = sub.add_parser("square-fn", help="write the truncated square function")
    scaling(p)
    p.add_argument("--k-cap", required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_square_fn)

    for name, fn in (("lp-ratio", cmd_lp_ratio), ("sign-sweep", cmd_sign_sweep)):
        p = sub.add_parser(name, help="square-function ratios" if fn is cmd_lp_ratio else "random tensor sign sums")
        scaling(p)
        p.add_argument("--k-cap", required=True)
        p.add_argument("--p", type=float, action="append")
        p.add_argument("--in", dest="infile", action="append")
        p.add_argument("--out-dir")
        if fn is cmd_lp_ratio:
            p.add_argument("--svg", help="also plot ratio against p")
        else:
            p.add_argument("--trials", type=int, default=200)
            p.add_argument("--seed", type=int, default=1)
            p.add_argument("--free-signs", action="store_true", help="one sign per multi-index (exploratory)")
        p.set_defaults(func=fn)

    p = sub.add_parser("khintchine", help="Khintchine moments of sum a_k r_k")
    p.add_argument("--a", help="comma-separated coefficients")
    p.add_argument("--n", type=int, default=8, help="random coefficients when --a is absent")
    p.add_argument("--p", type=float, action="append")
    p.add_argument("--exhaustive-limit", type=int, default=12)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_khintchine)

    p = sub.add_parser("weak11", help="level-set products alpha * mes{|Tf| > alpha} / ||f||_1")
    scaling(p)
    p.add_argument("--k-cap", type=int, required=True)
    p.add_argument("--signs", help="comma-separated +-1 per scale (default all +1)")
    p.add_argument("--alpha", type=float, action="append")
    p.add_argument("--in", dest="infile", required=True)
    p.set_defaults(func=cmd_weak11)

    p = sub.add_parser("suite", help="run the acceptance battery")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("run", help="run an experiment config")
    p.add_argument("config")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, NoInputsError, ParseError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
