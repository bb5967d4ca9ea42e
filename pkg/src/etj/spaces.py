"""Sampled function spaces with a shift group.

Two backends:

* ``PeriodicGrid``: 2π-periodic functions sampled at ``n`` equispaced points,
  with L_p(0, 2π) or C(2π) norms.  Shifts act on Fourier coefficients, so
  they are exact for every real shift and the group is isometric.
* ``LineGrid``: functions on ``[-T, T]`` sampled at cell centers, normed in
  the weighted space L_p(R, mu^p).  Shifts of a whole number of cells are
  exact; fractional parts use band-limited interpolation.  Operations that
  would push non-negligible mass off the window raise ``WindowError``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .weights import Weight, check_admissible, make_weight

# relative weighted mass allowed to leave the line window
EDGE_TOL = 1e-6
# tail-energy threshold standing in for membership in D(A^m)
SMOOTHNESS_TOL = 1e-6


class SpaceError(ValueError):
    pass


class WindowError(SpaceError):
    """A line-backend operation would move mass off the sampling window."""


class SmoothnessError(SpaceError):
    """Spectral tail test failed: the function is not resolved as smooth enough."""


def _parse_p(p) -> float:
    if isinstance(p, str):
        p = math.inf if p.lower() in ("inf", "infinity", "c") else float(p)
    p = float(p)
    if not (p >= 1):
        raise SpaceError(f"norm index p must be in [1, inf], got {p}")
    return p


@dataclass(frozen=True)
class PeriodicGrid:
    n: int = 4096

    def __post_init__(self):
        n = self.n
        if n < 16 or n & (n - 1):
            raise SpaceError(f"periodic grid needs a power of two >= 16 samples, got {n}")

    tag = "periodic"

    @property
    def points(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def freqs(self) -> np.ndarray:
        """Integer frequency of each FFT slot."""
        return np.rint(np.fft.fftfreq(self.n, 1.0 / self.n)).astype(int)


@dataclass(frozen=True)
class LineGrid:
    half_width: float
    n: int
    mu: Weight = field(default_factory=lambda: make_weight("constant"))

    tag = "line"

    def __post_init__(self):
        if self.half_width <= 0 or self.n < 16:
            raise SpaceError("line grid needs T > 0 and at least 16 cells")
        report = check_admissible(self.mu)
        if report.verdict != "admissible":
            raise SpaceError(f"line weight {self.mu.kind} is not admissible ({report.verdict})")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def points(self) -> np.ndarray:
        return -self.half_width + (np.arange(self.n) + 0.5) * self.dx

    @property
    def log_mu(self) -> np.ndarray:
        return self.mu.log(self.points)


class GridFunction:
    """An immutable sampled element of one of the concrete spaces."""

    def __init__(self, backend, values, p=2, name: str = ""):
        values = np.array(values, copy=True)
        if values.ndim != 1 or values.size != backend.n:
            raise SpaceError(f"expected {backend.n} samples, got shape {values.shape}")
        if not np.iscomplexobj(values):
            values = values.astype(float)
        if isinstance(backend, PeriodicGrid):
            # drop the Nyquist mode: cos(n xi / 2) has no exact shifts on the grid
            c = np.fft.fft(values)
            if c[backend.n // 2] != 0:
                c[backend.n // 2] = 0.0
                projected = np.fft.ifft(c)
                values = projected if np.iscomplexobj(values) else projected.real
        values.setflags(write=False)
        self.backend = backend
        self.values = values
        self.p = _parse_p(p)
        self.name = name

    @staticmethod
    def _real_hint(v):
        v = np.asarray(v)
        if np.iscomplexobj(v) and np.max(np.abs(v.imag), initial=0.0) <= 1e-14 * max(
            np.max(np.abs(v.real), initial=0.0), 1e-300
        ):
            return v.real
        return v

    # -- helpers -------------------------------------------------------

    @property
    def is_periodic(self) -> bool:
        return isinstance(self.backend, PeriodicGrid)

    def with_values(self, values, name: str | None = None) -> "GridFunction":
        return GridFunction(self.backend, values, self.p, self.name if name is None else name)

    def with_p(self, p) -> "GridFunction":
        return GridFunction(self.backend, self.values, p, self.name)

    def coefficients(self) -> np.ndarray:
        """Fourier coefficients ``x_hat(m) = (1/2pi) int x e^{-i m s} ds`` (FFT order)."""
        if not self.is_periodic:
            raise SpaceError("Fourier coefficients are only defined on the periodic backend")
        return np.fft.fft(self.values) / self.backend.n

    @classmethod
    def from_coefficients(cls, backend: PeriodicGrid, coef, p=2, name="", real=None):
        vals = np.fft.ifft(np.asarray(coef) * backend.n)
        if real is None:
            vals = cls._real_hint(vals)
        elif real:
            vals = vals.real
        return cls(backend, vals, p, name)

    def __add__(self, other):
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        return self.with_values(self.values - other.values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"GridFunction({self.backend.tag}, n={self.backend.n}, p={self.p}, name={self.name!r})"


# ---------------------------------------------------------------------------
# norms


def norm(x: GridFunction, p=None) -> float:
    p = x.p if p is None else _parse_p(p)
    v = np.abs(x.values)
    if v.size == 0:
        raise SpaceError("empty grid")
    if isinstance(x.backend, LineGrid):
        lw = x.backend.log_mu
        with np.errstate(divide="ignore"):
            lv = np.log(v) + lw
        if p == math.inf:
            return float(np.exp(np.max(lv)))
        top = np.max(lv)
        if not np.isfinite(top):
            return 0.0
        s = np.sum(np.exp(p * (lv - top))) * x.backend.dx
        return float(np.exp(top + math.log(s) / p))
    if p == math.inf:
        return float(v.max())
    scale = v.max()
    if scale == 0:
        return 0.0
    return float(scale * (2.0 * np.pi / v.size * np.sum((v / scale) ** p)) ** (1.0 / p))


def edge_fraction(x: GridFunction, width: int | None = None) -> float:
    """Weighted p-mass in the outermost cells relative to the whole."""
    if not isinstance(x.backend, LineGrid):
        return 0.0
    n = x.backend.n
    width = width or max(1, n // 64)
    mass = _weighted_mass(x)
    total = mass.sum()
    if total == 0:
        return 0.0
    return float((mass[:width].sum() + mass[-width:].sum()) / total)


def _weighted_mass(x: GridFunction, p=None) -> np.ndarray:
    p = x.p if p is None else p
    q = 2.0 if p == math.inf else p
    return (np.abs(x.values) * np.exp(x.backend.log_mu)) ** q


# ---------------------------------------------------------------------------
# shifts


def shift(x: GridFunction, t: float) -> GridFunction:
    """``(U(t) x)(s) = x(s + t)``."""
    t = float(t)
    if x.is_periodic:
        c = x.coefficients()
        m = x.backend.freqs
        out = GridFunction.from_coefficients(x.backend, c * np.exp(1j * m * t), x.p, x.name,
                                             real=not np.iscomplexobj(x.values))
        return out
    return _line_shift(x, t)


def _line_shift(x: GridFunction, t: float) -> GridFunction:
    g = x.backend
    n = g.n
    cells = t / g.dx
    j = int(round(cells))
    frac = cells - j
    v = np.asarray(x.values)
    if abs(frac) > 1e-12:
        # band-limited fractional shift on a zero-padded copy
        pad = np.concatenate([np.zeros(n, v.dtype), v, np.zeros(n, v.dtype)])
        k = np.fft.fftfreq(3 * n)
        sh = np.fft.ifft(np.fft.fft(pad) * np.exp(2j * np.pi * k * frac))
        sh = sh if np.iscomplexobj(v) else sh.real
        lost_frac = np.concatenate([sh[:n], sh[2 * n:]])
        v = sh[n:2 * n]
        if np.sum(np.abs(lost_frac) ** 2) > EDGE_TOL * max(np.sum(np.abs(v) ** 2), 1e-300):
            raise WindowError(f"fractional shift by {t:g} leaks mass off the window")
    new = np.zeros_like(v)
    if j >= 0:
        new[: n - j] = v[j:] if j < n else new[:0]
        lost_idx = np.arange(min(j, n))
        lost_pos = g.points[lost_idx] - t
    else:
        jj = -j
        new[jj:] = v[: n - jj] if jj < n else new[:0]
        lost_idx = np.arange(max(n - jj, 0), n)
        lost_pos = g.points[lost_idx] - t
    out = x.with_values(new)
    if lost_idx.size:
        p = x.p
        q = 2.0 if p == math.inf else p
        lost = np.sum((np.abs(v[lost_idx]) * np.exp(g.mu.log(lost_pos))) ** q)
        kept = np.sum(_weighted_mass(out, p))
        if lost > EDGE_TOL * max(lost + kept, 1e-300):
            raise WindowError(f"shift by {t:g} moves mass off the window [-{g.half_width:g}, {g.half_width:g}]")
    return out


# ---------------------------------------------------------------------------
# derivatives and degree


def differentiate(x: GridFunction, m: int) -> GridFunction:
    """``A^m x`` with ``A = d/ds``."""
    if m < 0 or int(m) != m:
        raise SpaceError(f"derivative order must be a nonnegative integer, got {m}")
    if m == 0:
        return x
    if x.is_periodic:
        c = x.coefficients()
        freq = x.backend.freqs
        d = c * (1j * freq) ** m
        energy = np.abs(d) ** 2
        total = energy.sum()
        if total > 0 and energy[np.abs(freq) > x.backend.n // 4].sum() > SMOOTHNESS_TOL * total:
            raise SmoothnessError(f"spectral tail too heavy for {m} derivatives of {x.name or 'x'}")
        return GridFunction.from_coefficients(x.backend, d, x.p, x.name,
                                              real=not np.iscomplexobj(x.values))
    if m > 4:
        raise SpaceError("line backend differentiates at most 4 times")
    v = np.asarray(x.values)
    h = x.backend.dx
    # fourth-order central stencil, zero outside the window
    for _ in range(m):
        pad = np.concatenate([np.zeros(2, v.dtype), v, np.zeros(2, v.dtype)])
        v = (pad[:-4] - 8 * pad[1:-3] + 8 * pad[3:-1] - pad[4:]) / (12 * h)
    return x.with_values(v)


def trig_degree(x: GridFunction, tol: float = 1e-10):
    """Largest ``|m|`` with ``|x_hat(m)| > tol * max |x_hat|``; None for zero."""
    c = np.abs(x.coefficients())
    top = c.max()
    if top == 0:
        return None
    freq = np.abs(x.backend.freqs)
    return int(freq[c > tol * top].max())


# ---------------------------------------------------------------------------
# group norm bound


@dataclass(frozen=True)
class GroupDescriptor:
    backend: str
    M_U: Callable

    @classmethod
    def for_backend(cls, backend) -> "GroupDescriptor":
        if isinstance(backend, PeriodicGrid):
            return cls("periodic", lambda t: np.ones_like(np.asarray(t, dtype=float)))
        if isinstance(backend, LineGrid):
            mu = backend.mu
            return cls("line", lambda t: mu(np.abs(np.asarray(t, dtype=float))))
        raise SpaceError(f"unknown backend {backend!r}")

    @property
    def bounded(self) -> bool:
        return self.backend == "periodic"


def group_bound(g: GroupDescriptor, t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise SpaceError("group_bound needs t >= 0")
    out = np.asarray(g.M_U(t_arr), dtype=float)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# construction helpers


def sample(backend, func, p=2, name="") -> GridFunction:
    return GridFunction(backend, func(backend.points), p, name)


def load_csv(path, backend, p=2, column: int = 0, name: str | None = None) -> GridFunction:
    """Read one column of samples; non-numeric header rows are skipped."""
    vals = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                vals.append(complex(row[column].strip().replace(" ", "")))
            except (ValueError, IndexError):
                if vals:
                    raise SpaceError(f"{path}: bad sample {row!r}") from None
    arr = np.array(vals)
    if np.all(arr.imag == 0):
        arr = arr.real
    return GridFunction(backend, arr, p, name or str(path))
