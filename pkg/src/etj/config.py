"""Flat ``key = value`` experiment configuration.

Lines are ``key = value``; ``#`` starts a comment.  Command-line flags
override file values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod


class ConfigError(ValueError):
    pass


KNOWN_KEYS = {
    "backend", "p", "k", "m", "r_grid", "corpus", "seed", "out", "format",
    "n_samples", "n_tau", "kernel.kind", "kernel.m", "kernel.n_prod", "kernel.delta", "kernel.quad_tol",
    "line.half_width", "line.n_samples", "threads",
}
KNOWN_PREFIXES = ("weight.", "line.weight.", "corpus.")


def parse_text(text: str, source: str = "<config>") -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key not in KNOWN_KEYS and not key.startswith(KNOWN_PREFIXES):
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        out[key] = value
        out.setdefault("_lines", {})[key] = lineno
    return out


def load(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_text(text, str(path))


def parse_int_list(value: str, key: str) -> list[int]:
    try:
        return [int(v) for v in str(value).replace(" ", "").split(",") if v]
    except ValueError:
        raise ConfigError(f"{key}: expected a comma-separated integer list, got {value!r}") from None


def parse_r_grid(value: str) -> list[float]:
    """``min:max:count`` (geometric) or a comma-separated list."""
    value = str(value).strip()
    try:
        if ":" in value:
            lo, hi, count = value.split(":")
            lo, hi, n = float(lo), float(hi), int(count)
            if n < 1 or lo <= 0 or hi < lo:
                raise ValueError
            grid = np.geomspace(lo, hi, n) if n > 1 else np.array([lo])
        else:
            grid = np.array([float(v) for v in value.split(",") if v])
    except ValueError:
        raise ConfigError(f"r_grid: expected 'min:max:count' or a list, got {value!r}") from None
    if grid.size == 0 or np.any(grid <= 0):
        raise ConfigError("r_grid must contain positive values")
    # keep 8.0 from becoming 7.999999999999999 before floor(r) is taken
    return [float(v) for v in np.round(grid, 12)]


@dataclass
class ExperimentConfig:
    backend: str = "periodic"
    p: float = 2.0
    k_list: list = field(default_factory=lambda: [1])
    m_list: list = field(default_factory=list)
    r_grid: list = field(default_factory=lambda: parse_r_grid("1:64:7"))
    corpus: list = field(default_factory=lambda: ["abs-sin"])
    seed: int = 0
    out: str = "etj-out"
    format: str = "csv"
    n_samples: int = 4096
    n_tau: int = 64
    kernel_kind: str = "sinc_product"
    n_prod: int = 4096
    delta: float = 0.1
    quad_tol: float = 1e-10
    line_half_width: float = 64.0
    line_n_samples: int = 8192
    raw: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.backend not in ("periodic", "line"):
            raise ConfigError(f"backend must be periodic or line, got {self.backend!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.format!r}")
        if self.kernel_kind not in ("sinc_product", "fejer"):
            raise ConfigError(f"kernel.kind must be sinc_product or fejer, got {self.kernel_kind!r}")
        if self.kernel_kind == "fejer" and self.backend != "periodic":
            raise ConfigError("the Fejer kernel needs polynomial growth: periodic backend only")
        if not self.k_list or any(k < 1 or k > 12 for k in self.k_list):
            raise ConfigError("k values must lie in 1..12")
        if any(m < 0 for m in self.m_list):
            raise ConfigError("m values must be nonnegative")
        if self.backend != "periodic" and min(self.r_grid) < 1:
            raise ConfigError("r_min < 1 is only allowed on the periodic backend")
        known = corpus_mod.known_names(self.backend)
        for name in self.corpus:
            if name not in known:
                raise ConfigError(f"unknown corpus name {name!r} for backend {self.backend} (known: {', '.join(known)})")
        if not self.corpus:
            raise ConfigError("corpus is empty")
        if self.seed < 0 or self.seed >= 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")

    def weight_items(self, prefix: str) -> dict:
        return {k: v for k, v in self.raw.items() if k.startswith(prefix)}


def _p(value) -> float:
    s = str(value).strip().lower()
    if s in ("inf", "infinity"):
        return math.inf
    try:
        p = float(s)
    except ValueError:
        raise ConfigError(f"p must be 1, 2 or inf, got {value!r}") from None
    if p < 1:
        raise ConfigError(f"p must be >= 1, got {value!r}")
    return p


def build(values: dict) -> ExperimentConfig:
    """Turn merged string values into a validated ``ExperimentConfig``."""
    lines = values.get("_lines", {})

    def where(key):
        return f" (line {lines[key]})" if key in lines else ""

    cfg = ExperimentConfig(raw={k: v for k, v in values.items() if k != "_lines"})
    conv = {
        "backend": ("backend", str),
        "p": ("p", _p),
        "k": ("k_list", lambda v: parse_int_list(v, "k")),
        "m": ("m_list", lambda v: parse_int_list(v, "m")),
        "r_grid": ("r_grid", parse_r_grid),
        "corpus": ("corpus", lambda v: [s.strip() for s in str(v).split(",") if s.strip()]),
        "seed": ("seed", int),
        "out": ("out", str),
        "format": ("format", str),
        "n_samples": ("n_samples", int),
        "n_tau": ("n_tau", int),
        "kernel.kind": ("kernel_kind", str),
        "kernel.n_prod": ("n_prod", int),
        "kernel.delta": ("delta", float),
        "kernel.quad_tol": ("quad_tol", float),
        "line.half_width": ("line_half_width", float),
        "line.n_samples": ("line_n_samples", int),
    }
    for key, (attr, fn) in conv.items():
        if key in values and values[key] is not None:
            try:
                setattr(cfg, attr, fn(values[key]))
            except ConfigError as exc:
                raise ConfigError(f"{exc}{where(key)}") from None
            except ValueError:
                raise ConfigError(f"bad value for {key}: {values[key]!r}{where(key)}") from None
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError(str(exc)) from None
    return cfg
