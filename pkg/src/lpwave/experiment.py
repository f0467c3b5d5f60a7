"""Config-driven experiment runner and its report files.

One run writes into the output directory:

* ``ratios.csv``: one :class:`RatioRecord` per (function, p)
* ``signs.csv``: one row per sign-sweep trial (only if ``trials > 0``)
* ``summary.json``: config, hash, per-p constants, invariant checks
* ``ratios.svg``: ratio against p, one polyline per function

Every file is written to a temporary name and renamed, and holds no
timestamps or timings, so equal configs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .config import ExperimentConfig
from .corpus import build_corpus, interior_box
from .grid import Grid1D, embed, load_function, lp_norm
from .lpverify import SignTrialRecord, lp_ratios, sign_sweep, summarize_trials
from .scaling import scaling_from_spec
from .tensor import TensorContext, partial_sum, project_nd

OUTPUT_ENV = "LPWAVE_OUTPUT_DIR"

RATIO_COLUMNS = (
    "config_hash", "system", "d", "J", "k_cap", "f_id", "p", "norm_f", "norm_Sf", "ratio", "tail_norm",
)
SIGN_COLUMNS = (
    "config_hash", "system", "d", "J", "k_cap", "f_id", "p", "seed", "trial", "free_signs", "norm", "ratio",
)

RATIO_BRACKET = (0.05, 20.0)
PARSEVAL_TOL = 1e-6
TELESCOPE_TOL = 1e-12


class NoInputsError(ValueError):
    pass


def output_dir(default) -> Path:
    """The env override wins over the configured directory."""
    return Path(os.environ.get(OUTPUT_ENV) or default)


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(x) -> str:
    """Shortest round-trip text for floats; plain str otherwise."""
    if isinstance(x, float):
        return repr(x)
    if isinstance(x, tuple):
        return ",".join(str(v) for v in x)
    return str(x)


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2, sort_keys=True) + "\n"


def ratio_svg(series: dict, width: int = 480, height: int = 320) -> str:
    """Minimal line plot: ``series`` maps a label to ``[(p, ratio), ...]``."""
    pts = [pt for s in series.values() for pt in s if math.isfinite(pt[1])]
    if not pts:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}"/>\n'
    pad = 40
    x0, x1 = min(p for p, _ in pts), max(p for p, _ in pts)
    y0, y1 = min(0.0, min(r for _, r in pts)), max(r for _, r in pts) * 1.1
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def X(p):
        return pad + (p - x0) / (x1 - x0) * (width - 2 * pad)

    def Y(r):
        return height - pad - (r - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-size="10">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{pad}" y1="{height - pad}" x2="{width - pad}" y2="{height - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{height - pad}" stroke="black"/>',
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle">p</text>',
        f'<text x="10" y="{height / 2:.1f}" transform="rotate(-90 10 {height / 2:.1f})" '
        'text-anchor="middle">||Sf||_p / ||f||_p</text>',
        f'<text x="{pad}" y="{height - pad + 14}" text-anchor="middle">{x0:g}</text>',
        f'<text x="{width - pad}" y="{height - pad + 14}" text-anchor="middle">{x1:g}</text>',
        f'<text x="{pad - 4}" y="{Y(y1):.1f}" text-anchor="end">{y1:.3g}</text>',
        f'<text x="{pad - 4}" y="{Y(y0):.1f}" text-anchor="end">{y0:.3g}</text>',
    ]
    for i, (label, s) in enumerate(series.items()):
        c = colors[i % len(colors)]
        path = " ".join(f"{X(p):.2f},{Y(r):.2f}" for p, r in s if math.isfinite(r))
        out.append(f'<polyline fill="none" stroke="{c}" points="{path}"/>')
        out.append(f'<text x="{width - pad + 2}" y="{pad + 12 * i}" fill="{c}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ runner


@dataclass
class RunResult:
    config: ExperimentConfig
    ratio_rows: list
    sign_rows: list
    summary: dict
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def _context(cfg: ExperimentConfig) -> TensorContext:
    systems = [scaling_from_spec(s, cfg.J) for s in cfg.scaling_specs]
    if cfg.box is not None:
        boxes = [Grid1D.from_interval(cfg.J, *cfg.box)] * cfg.d
    else:
        # the widest per-axis interior box, shared by every axis
        cands = [interior_box(sy, cfg.J, scales=(cfg.band, 0)) for sy in systems]
        lo = min(b.support_lo for b in cands)
        hi = max(b.support_hi for b in cands)
        boxes = [Grid1D(cfg.J, lo, hi)] * cfg.d
    return TensorContext.build(systems, boxes)


def _items(cfg: ExperimentConfig, ctx: TensorContext) -> list:
    """``(f_id, f, interior)`` for the built-in corpus and any input files."""
    items = [
        (it.f_id, it.f, True)
        for it in build_corpus(cfg.kind, ctx.grid, ctx=ctx, seed=cfg.seed, scale=cfg.band, copies=cfg.copies)
    ]
    for path in cfg.input:
        f = load_function(path)
        if f.grid.d != cfg.d or f.grid.J != cfg.J:
            raise ValueError(f"{path}: grid d={f.grid.d}, J={f.grid.J} does not match the config")
        items.append((Path(path).stem, embed(f, ctx.grid), False))
    return items


def run(cfg: ExperimentConfig) -> RunResult:
    ctx = _context(cfg)
    items = _items(cfg, ctx)
    if not items:
        raise NoInputsError("no inputs: the config selects no corpus kinds and no input files")
    h = cfg.hash()
    k = cfg.k_cap
    sysname = "x".join(dict.fromkeys(c.sys.name for c in ctx.axes))
    base = {"config_hash": h, "system": sysname, "d": cfg.d, "J": cfg.J, "k_cap": k}
    orthonormal = all(c.sys.orthonormal for c in ctx.axes)
    ratio_rows, sign_rows, failures, checks = [], [], [], []
    for f_id, f, interior in items:
        tail = f - project_nd(ctx, f, k)
        # p = 2 is always measured for the Parseval chain; rows keep the configured p only
        recs = {r.p: r for r in lp_ratios(ctx, f, sorted(set(cfg.p) | {2.0}), k, f_id)}
        for rec in (recs[float(p)] for p in cfg.p):
            row = dict(base, f_id=f_id, p=rec.p, norm_f=rec.norm_f, norm_Sf=rec.norm_Sf, ratio=rec.ratio,
                       tail_norm=lp_norm(tail, rec.p))
            ratio_rows.append(row)
            lo, hi = RATIO_BRACKET
            if not lo <= rec.ratio <= hi:
                failures.append(f"{f_id} p={rec.p}: ratio {rec.ratio:.6g} outside [{lo}, {hi}]")
        # Parseval chain: ||Sf||_2^2 + ||f - E_k f||_2^2 = ||f||_2^2
        if orthonormal and interior:
            nf, ns, nt = recs[2.0].norm_f, recs[2.0].norm_Sf, lp_norm(tail, 2)
            dev = abs(ns**2 + nt**2 - nf**2) / nf**2 if nf > 0 else 0.0
            checks.append({"f_id": f_id, "check": "parseval", "deviation": dev, "passed": dev <= PARSEVAL_TOL})
            if dev > PARSEVAL_TOL:
                failures.append(f"{f_id}: Parseval chain off by {dev:.3g}")
        tel = partial_sum(ctx, f, k).sup_distance(project_nd(ctx, f, k))
        scale = max(1.0, lp_norm(f, math.inf))
        checks.append({"f_id": f_id, "check": "telescoping", "deviation": tel, "passed": tel <= TELESCOPE_TOL * scale})
        if tel > TELESCOPE_TOL * scale:
            failures.append(f"{f_id}: telescoping off by {tel:.3g}")
        if cfg.trials:
            for p in cfg.p:
                for r in sign_sweep(ctx, f, p, k, cfg.trials, cfg.seed, free_signs=cfg.free_signs):
                    sign_rows.append(dict(base, f_id=f_id, p=r.p, seed=r.seed, trial=r.trial,
                                          free_signs=int(cfg.free_signs), norm=r.norm, ratio=r.ratio))
    constants = {}
    for p in cfg.p:
        vals = [r["ratio"] for r in ratio_rows if r["p"] == p]
        constants[fmt(p)] = {"c2": min(vals), "c3": max(vals), "spread": max(vals) / min(vals)}
    sweeps = {}
    for f_id, _, _ in items:
        for p in cfg.p:
            recs = [r for r in sign_rows if r["f_id"] == f_id and r["p"] == p]
            if recs:
                sweeps[f"{f_id}/p={fmt(p)}"] = summarize_trials(
                    [SignTrialRecord(r["seed"], r["trial"], r["p"], r["norm"], r["ratio"]) for r in recs]
                )
    summary = {
        "config": cfg.canonical(),
        "config_hash": h,
        "system": sysname,
        "box": [[b.lo, b.hi] for b in ctx.grid.axes],
        "functions": [f_id for f_id, _, _ in items],
        "constants": constants,
        "sign_sweeps": sweeps,
        "free_signs_note": "free signs are exploratory for d >= 2" if cfg.free_signs else None,
        "checks": checks,
        "failures": failures,
        "passed": not failures,
    }
    return RunResult(cfg, ratio_rows, sign_rows, summary, failures)


def write_outputs(res: RunResult, out: Path) -> list:
    out = Path(out)
    written = []

    def put(name, text):
        atomic_write(out / name, text)
        written.append(out / name)

    put("ratios.csv", to_csv(RATIO_COLUMNS, res.ratio_rows))
    if res.sign_rows:
        put("signs.csv", to_csv(SIGN_COLUMNS, res.sign_rows))
    put("summary.json", to_json(res.summary))
    if res.config.plot:
        series = {}
        for r in res.ratio_rows:
            series.setdefault(r["f_id"], []).append((r["p"], r["ratio"]))
        put("ratios.svg", ratio_svg(series))
    return written
