"""Experiment configuration files.

A config is a flat list of ``key = value`` lines. ``#`` starts a comment.
The keys ``p``, ``kind`` and ``input`` may repeat and accumulate; every
other key may appear once. ``kind = none`` turns the built-in corpus off. Example::

    scaling = db4
    d = 2
    J = 7
    k_cap = 3,3
    p = 1.5
    p = 4
    kind = bandlimited
    kind = bump
    trials = 200
    seed = 7
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from .corpus import KINDS
from .grid import J_ACC, MAX_J

REPEATED = ("p", "kind", "input")


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str = "<config>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class ExperimentConfig:
    scaling: str = "haar"  # one spec, or one per axis separated by commas
    d: int = 1
    J: int = 10
    k_cap: tuple = (6,)
    p: tuple = (1.25, 1.5, 2.0, 3.0, 4.0)
    kind: tuple = ("bandlimited",)
    input: tuple = ()
    box: tuple | None = None  # (lo, hi) per axis; default: interior box of the corpus
    scale: int | None = None
    copies: int = 1
    seed: int = 0
    trials: int = 0
    free_signs: bool = False
    plot: bool = True
    output: str = "results"

    @property
    def band(self) -> int:
        """Band limit / step scale of the built-in corpus (default k_cap - 2)."""
        if self.scale is not None:
            return self.scale
        return max(min(self.k_cap) - 2, 0)

    @property
    def scaling_specs(self) -> tuple:
        specs = tuple(s.strip() for s in self.scaling.split(","))
        return specs * self.d if len(specs) == 1 else specs

    def canonical(self) -> dict:
        """Everything that determines the numbers (``output`` excluded)."""
        d = asdict(self)
        d.pop("output")
        d["k_cap"] = list(self.k_cap)
        d["p"] = list(self.p)
        d["kind"] = list(self.kind)
        d["input"] = list(self.input)
        d["box"] = list(self.box) if self.box is not None else None
        return d

    def hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def validate(self, source: str = "<config>", lines: dict | None = None) -> "ExperimentConfig":
        lines = lines or {}

        def fail(msg, key):
            raise ParseError(msg, lines.get(key), source)

        if self.d < 1:
            fail("d must be >= 1", "d")
        if not J_ACC <= self.J <= MAX_J:
            fail(f"J={self.J} outside [{J_ACC}, {MAX_J}]", "J")
        if len(self.k_cap) == 1 and self.d > 1:
            object.__setattr__(self, "k_cap", self.k_cap * self.d)
        if len(self.k_cap) != self.d:
            fail(f"k_cap has {len(self.k_cap)} entries, expected d={self.d}", "k_cap")
        for k in self.k_cap:
            if k < 0:
                fail("k_cap entries must be >= 0", "k_cap")
            if k > self.J - J_ACC:
                fail(f"kappa={k} exceeds J - {J_ACC} = {self.J - J_ACC}", "k_cap")
        for p in self.p:
            if not 1 < p < math.inf:
                fail(f"p={p} outside (1, inf)", "p")
        for kind in self.kind:
            if kind not in KINDS:
                fail(f"unknown kind {kind!r}; choose from {', '.join(KINDS)}", "kind")
        n_sys = len(self.scaling_specs)
        if n_sys not in (1, self.d):
            fail(f"{n_sys} scaling specs for d={self.d}", "scaling")
        if self.box is not None:
            if len(self.box) != 2 or not self.box[0] < self.box[1]:
                fail("box needs 'lo,hi' with lo < hi", "box")
            for v in self.box:
                if v * 2**self.J != math.floor(v * 2**self.J):
                    fail(f"box end {v} is not a multiple of 2**-{self.J}", "box")
        if self.copies < 1:
            fail("copies must be >= 1", "copies")
        if self.trials < 0:
            fail("trials must be >= 0", "trials")
        if self.scale is not None and not 0 <= self.scale <= self.J - J_ACC:
            fail(f"scale={self.scale} outside [0, J - {J_ACC}]", "scale")
        return self


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _tuple_of(conv):
    return lambda text: tuple(conv(x) for x in text.split(",") if x.strip())


_CONVERT = {
    "scaling": str,
    "d": int,
    "J": int,
    "k_cap": _tuple_of(int),
    "p": float,
    "kind": str,
    "input": str,
    "box": _tuple_of(float),
    "scale": int,
    "copies": int,
    "seed": int,
    "trials": int,
    "free_signs": _parse_bool,
    "plot": _parse_bool,
    "output": str,
}


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    values: dict = {}
    seen: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno, source)
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _CONVERT:
            raise ParseError(f"unknown key {key!r}", lineno, source)
        if not value:
            raise ParseError(f"empty value for {key!r}", lineno, source)
        try:
            v = _CONVERT[key](value)
        except ValueError as exc:
            raise ParseError(f"bad value for {key!r}: {exc}", lineno, source) from None
        if key in REPEATED:
            values.setdefault(key, []).append(v)
        elif key in seen:
            raise ParseError(f"duplicate key {key!r} (first on line {seen[key]})", lineno, source)
        else:
            values[key] = v
        seen.setdefault(key, lineno)
    for key in REPEATED:
        if key in values:
            # "kind = none" selects an empty built-in corpus
            values[key] = tuple(v for v in values[key] if not (key == "kind" and v == "none"))
    cfg = ExperimentConfig(**values)
    return cfg.validate(source, seen)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc.strerror}", None, str(path)) from None
    return parse_config(text, str(path))


def override(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    return replace(cfg, **changes).validate()
