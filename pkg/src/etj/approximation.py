"""Smoothing operators, best-approximation estimates and Jackson-type checks.

The smoothing operator of order ``k`` is

    x~_{r,k} = int K_r(t) (x + (-1)^(k-1) (U(t) - I)^k x) dt
             = sum_{n=1}^k (-1)^(n+1) C(k, n) x_{r,n},
    x_{r,n}  = int K_r(t) U(n t) x dt .

On the circle each ``x_{r,n}`` is a Fourier multiplier and a trigonometric
polynomial of degree at most ``r/n`` times the kernel's type.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .kernels import Kernel, KernelError, _jsonable, kernel_for_order, kernel_transform
from .smoothness import omega_tilde
from .spaces import (
    EDGE_TOL,
    GridFunction,
    GroupDescriptor,
    LineGrid,
    SpaceError,
    WindowError,
    differentiate,
    group_bound,
    norm,
    trig_degree,
)

METHODS = ("exact_l2", "near_best", "smoothing_upper")


class ApproximationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# kernel compatibility


def check_compatible(kernel: Kernel, k: int, group: GroupDescriptor, t_max: float = 64.0) -> None:
    """Require ``alpha(t) >= M_U(t)^k (1+t)^(k+2)`` so the decay bound covers
    the growth of ``(U(t) - I)^k``."""
    if kernel.weight is None:
        raise ApproximationError("kernel carries no weight")
    t = np.linspace(0.0, t_max, 1025)
    need = k * np.log(np.maximum(group_bound(group, t), 1.0)) + (k + 2) * np.log1p(t)
    have = kernel.weight.log(t)
    if np.any(have < need - 1e-9 * np.maximum(need, 1.0)):
        raise ApproximationError(
            f"kernel weight {kernel.weight.kind} grows slower than M_U^k (1+|t|)^(k+2) for k={k}"
        )


def _binomial_signs(k: int):
    return [(n, (-1) ** (n + 1) * math.comb(k, n)) for n in range(1, k + 1)]


# ---------------------------------------------------------------------------
# smoothing


def periodic_component_multiplier(kernel: Kernel, n_samples: int, r: float, n: int,
                                  path: str = "time") -> np.ndarray:
    """Multiplier of ``x -> x_{r,n}`` in FFT order."""
    if path == "time":
        return kernel.periodized_multiplier(n_samples, float(r), int(n))
    if path == "multiplier":
        m = np.rint(np.fft.fftfreq(n_samples, 1.0 / n_samples))
        freq = n * m / r
        out = np.zeros(n_samples)
        # Paley-Wiener: the transform vanishes beyond the kernel's type
        band = np.abs(freq) <= kernel.partial_sum_a * 1.05
        if np.any(band):
            uniq, inv = np.unique(np.abs(freq[band]), return_inverse=True)
            out[band] = kernel_transform(kernel, 1.0, uniq)[inv]
        return out
    raise ValueError(f"unknown smoothing path {path!r}")


@dataclass
class SmoothingResult:
    value: GridFunction
    components: dict = field(default_factory=dict)  # n -> x_{r,n}
    lost_fraction: float = 0.0


def smooth_vector(x: GridFunction, r: float, k: int, kernel: Kernel, path: str = "time",
                  diagnostics: bool = False, group: GroupDescriptor | None = None):
    """Compute ``x~_{r,k}``.

    ``path="time"`` integrates the shifted copies against the kernel;
    ``path="multiplier"`` (periodic only) multiplies Fourier coefficients by
    sampled kernel transforms.  With ``diagnostics`` the components
    ``x_{r,n}`` are returned in a ``SmoothingResult``.
    """
    if r <= 0:
        raise ApproximationError("r must be positive")
    if k < 1:
        raise ApproximationError("smoothing order k must be >= 1")
    group = group or GroupDescriptor.for_backend(x.backend)
    if not x.is_periodic and r < 1:
        raise ApproximationError("r < 1 is only supported for bounded groups")
    check_compatible(kernel, k, group)
    if x.is_periodic:
        c = x.coefficients()
        total = np.zeros_like(c)
        comps = {}
        for n, sign in _binomial_signs(k):
            mult = periodic_component_multiplier(kernel, x.backend.n, r, n, path)
            if diagnostics:
                comps[n] = GridFunction.from_coefficients(x.backend, c * mult, x.p, f"{x.name}_r{r:g}_n{n}",
                                                          real=not np.iscomplexobj(x.values))
            total = total + sign * mult * c
        out = GridFunction.from_coefficients(x.backend, total, x.p, f"{x.name}~",
                                             real=not np.iscomplexobj(x.values))
        return SmoothingResult(out, comps) if diagnostics else out
    if path != "time":
        raise ApproximationError("the multiplier path exists only on the periodic backend")
    return _line_smooth(x, r, k, kernel, diagnostics)


def _line_smooth(x: GridFunction, r: float, k: int, kernel: Kernel, diagnostics: bool):
    g: LineGrid = x.backend
    dx = g.dx
    total = np.zeros(g.n, dtype=np.result_type(x.values, float))
    comps = {}
    worst = 0.0
    for n, sign in _binomial_signs(k):
        # nodes t_j = j dx / n make every shift U(n t_j) a whole number of cells
        h = dx / n
        J = int(math.ceil(kernel.t_quad / (r * h)))
        j = np.arange(-J, J + 1)
        w = h * r * kernel(r * j * h)
        # y[i] = sum_j w_j x[i + j]
        full = signal.fftconvolve(np.asarray(x.values), w[::-1], mode="full")
        inside = full[J:J + g.n]
        outside_idx = np.concatenate([np.arange(-J, 0), np.arange(g.n, g.n + J)])
        outside = np.concatenate([full[:J], full[J + g.n:]])
        pos = -g.half_width + (outside_idx + 0.5) * dx
        q = 2.0 if x.p == math.inf else x.p
        lost = np.sum((np.abs(outside) * np.exp(g.mu.log(pos))) ** q)
        kept = np.sum((np.abs(inside) * np.exp(g.log_mu)) ** q)
        frac = float(lost / max(lost + kept, 1e-300))
        worst = max(worst, frac)
        if frac > EDGE_TOL:
            raise WindowError(f"smoothing at r={r:g}, n={n} moves mass off the window")
        if diagnostics:
            comps[n] = x.with_values(inside, f"{x.name}_r{r:g}_n{n}")
        total = total + sign * inside
    out = x.with_values(total, f"{x.name}~")
    return SmoothingResult(out, comps, worst) if diagnostics else out


def derivative_identity_error(x: GridFunction, r: float, n: int, nu: int, kernel: Kernel) -> float:
    """Relative L2 gap between ``A^nu x_{r,n}`` by spectral differentiation and
    ``(-1)^nu n^-nu int K_r^(nu)(t) U(n t) x dt`` (periodic backend)."""
    if not 0 <= nu <= 4:
        raise ApproximationError("derivative identity is checked for nu <= 4 only")
    if not x.is_periodic:
        raise ApproximationError("derivative identity check needs the periodic backend")
    c = x.coefficients()
    base = kernel.periodized_multiplier(x.backend.n, float(r), int(n))
    m = x.backend.freqs
    spectral = c * base * (1j * m) ** nu
    dmult = kernel.periodized_multiplier(x.backend.n, float(r), int(n), int(nu))
    direct = c * dmult * (-1.0) ** nu / n**nu
    scale = np.sqrt(np.sum(np.abs(spectral) ** 2))
    return float(np.sqrt(np.sum(np.abs(spectral - direct) ** 2)) / max(scale, 1e-300))


# ---------------------------------------------------------------------------
# best approximation


@dataclass(frozen=True)
class BestApprox:
    value: float
    method: str
    factor: float = 1.0  # near-best: E_r <= value <= factor * E_{r/2}


def _delayed_mean_multiplier(n_samples: int, r: float) -> np.ndarray:
    q = math.floor(r / 2)
    R = math.floor(r) + 1
    m = np.abs(np.rint(np.fft.fftfreq(n_samples, 1.0 / n_samples)))
    return np.clip((R - m) / (R - q), 0.0, 1.0)


def delayed_mean_lebesgue(r: float, oversample: int = 64) -> float:
    """``(1/2pi) int |V_r(s)| ds`` for the delayed-mean kernel, numerically."""
    R = math.floor(r) + 1
    size = 1 << max(6, int(math.ceil(math.log2(oversample * R))))
    v = _delayed_mean_multiplier(size, r)
    kern = np.fft.ifft(v).real * size
    return float(np.mean(np.abs(kern)))


def best_approx(x: GridFunction, r: float, method: str = "exact_l2", k: int | None = None,
                kernel: Kernel | None = None) -> BestApprox:
    """Distance from ``x`` to entire vectors of type <= r, or a tagged bound."""
    if method not in METHODS:
        raise ApproximationError(f"unknown method {method!r}")
    if method == "exact_l2":
        if not x.is_periodic or x.p != 2:
            raise ApproximationError("exact_l2 needs the periodic backend with p = 2")
        c = x.coefficients()
        m = np.abs(x.backend.freqs)
        return BestApprox(float(math.sqrt(2.0 * math.pi * np.sum(np.abs(c[m > math.floor(r)]) ** 2))), method)
    if method == "near_best":
        if not x.is_periodic:
            raise ApproximationError("near_best needs the periodic backend")
        mult = _delayed_mean_multiplier(x.backend.n, r)
        approx = GridFunction.from_coefficients(x.backend, x.coefficients() * mult, x.p,
                                                real=not np.iscomplexobj(x.values))
        L = delayed_mean_lebesgue(r)
        return BestApprox(norm(x - approx), method, 1.0 + L)
    if kernel is None or k is None:
        raise ApproximationError("smoothing_upper needs a kernel and k")
    return BestApprox(norm(x - smooth_vector(x, r, k, kernel)), method)


def default_method(x: GridFunction) -> str:
    if x.is_periodic:
        return "exact_l2" if x.p == 2 else "near_best"
    return "smoothing_upper"


# ---------------------------------------------------------------------------
# constants


def constant_estimate(kernel: Kernel, k: int, group: GroupDescriptor) -> float:
    """``2 c1`` from the kernel's decay certification, times ``M~^k`` for
    bounded groups (``M~ = sup M_U``; 1 on the circle)."""
    if kernel.weight is None:
        raise ApproximationError("kernel is not certified: no weight attached")
    c1 = kernel.c1
    if not (c1 > 0 and math.isfinite(c1)):
        raise ApproximationError("kernel certification produced no finite constant")
    if group.bounded:
        M = float(np.max(group_bound(group, np.linspace(0.0, 64.0, 257))))
        return 2.0 * c1 * M**k
    return 2.0 * c1


# ---------------------------------------------------------------------------
# Jackson reports

_ROW_FIELDS = ("x", "k", "m", "r", "E_r", "method", "modulus", "ratio", "bound", "smoothing_upper", "status")


@dataclass
class JacksonReport:
    x_name: str
    k: int
    m: int | None
    rows: list
    constant_estimate: float
    threshold: float
    verdict: str
    sup_ratio: float
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict.startswith("PASS")

    def summary(self) -> dict:
        out = {
            "x": self.x_name,
            "k": self.k,
            "m": self.m,
            "sup_ratio": self.sup_ratio,
            "constant_estimate": self.constant_estimate,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "n_rows": len(self.rows),
        }
        out.update(self.extra)
        return _jsonable(out)

    def csv_rows(self) -> list:
        return [[_fmt(row.get(f)) for f in _ROW_FIELDS] for row in self.rows]

    def to_csv(self, path) -> None:
        write_rows_csv(path, [self])

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, sort_keys=True, indent=2)
            fh.write("\n")


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def write_rows_csv(path, reports) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(_ROW_FIELDS)
        for rep in reports:
            wr.writerows(rep.csv_rows())


def _zero_tol(x: GridFunction) -> float:
    return 1e-12 * max(norm(x), 1e-300)


def _verdict(rows, threshold: float) -> tuple[str, float]:
    live = [row for row in rows if row["status"] != "degenerate"]
    if any(not math.isfinite(row["E_r"]) or not math.isfinite(row["modulus"]) for row in rows):
        return "FAIL", math.nan
    if not live:
        return "PASS-degenerate", 0.0
    sup = max(row["ratio"] for row in live)
    ok = all(row["status"] == "ok" for row in live)
    return ("PASS" if ok and sup <= threshold else "FAIL"), sup


def jackson_check(x: GridFunction, k: int, r_grid, kernel: Kernel, method: str | None = None,
                  with_smoothing: bool = True, n_tau: int = 64) -> JacksonReport:
    """Tabulate ``E_r``, ``omega~_k(1/r)`` and their ratio against the
    estimated constant ``2 c1``.

    Near-best rows are compared with ``(1 + L) 3^k`` times the constant: the
    delayed mean is within ``1 + L`` of ``E_{r/2}`` and the modulus at ``2/r``
    is at most ``3^k`` times the modulus at ``1/r``.
    """
    group = GroupDescriptor.for_backend(x.backend)
    method = method or default_method(x)
    r_grid = [float(r) for r in r_grid]
    if not group.bounded and min(r_grid) < 1:
        raise ApproximationError("r < 1 is only allowed on the periodic backend")
    const = constant_estimate(kernel, k, group)
    zero = _zero_tol(x)
    rows = []
    worst_factor = 1.0
    for r in r_grid:
        if method == "smoothing_upper":
            ba = best_approx(x, r, method, k, kernel)
        else:
            ba = best_approx(x, r, method)
        worst_factor = max(worst_factor, ba.factor)
        w = omega_tilde(x, 1.0 / r, k, n_tau)
        row = {"x": x.name, "k": k, "m": None, "r": r, "E_r": ba.value, "method": ba.method, "modulus": w}
        factor = ba.factor * 3.0**k if ba.method == "near_best" else 1.0
        row["bound"] = const * factor * w
        if with_smoothing:
            row["smoothing_upper"] = (ba.value if ba.method == "smoothing_upper"
                                      else norm(x - smooth_vector(x, r, k, kernel)))
        if w <= zero:
            row["ratio"] = math.nan
            row["status"] = "degenerate" if ba.value <= zero else "unbounded"
        else:
            row["ratio"] = ba.value / w / factor
            row["status"] = "ok" if ba.value <= row["bound"] else "exceeds"
        rows.append(row)
    verdict, sup = _verdict(rows, const)
    extra = {"method": method, "near_best_factor": worst_factor if method == "near_best" else None,
             "backend": x.backend.tag, "p": x.p, "kernel_kind": kernel.kind}
    return JacksonReport(x.name, k, None, rows, const, const, verdict, sup, extra)


def _slope(r, e, zero):
    r = np.asarray(r, dtype=float)
    e = np.asarray(e, dtype=float)
    keep = e > zero
    if keep.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(r[keep]), np.log(e[keep]), 1)[0])


def jackson_derivative_check(x: GridFunction, m: int, k: int, r_grid, kernel: Kernel | None = None,
                             constant_for=None, method: str | None = None, n_tau: int = 64) -> JacksonReport:
    """Derivative-order Jackson checks.

    Two inequalities with fitted constants:

    * ``E_r <= C1 r^-m M_U(m/r) omega~_k(1/r, A^m x)`` against the estimate
      for order ``k + m``;
    * ``E_r <= C2 r^-m M_U(1/r)^m ||A^m x||`` against the estimate for order
      ``m`` (the trivial constant 1 when ``m = 0``).

    ``constant_for(order)`` supplies the estimated constants; by default a
    kernel for ``alpha = M_U^order (1+|t|)^(order+2)`` is built per order.
    """
    group = GroupDescriptor.for_backend(x.backend)
    method = method or default_method(x)
    r_grid = [float(r) for r in r_grid]
    if not group.bounded and min(r_grid) < 1:
        raise ApproximationError("r < 1 is only allowed on the periodic backend")
    dm = differentiate(x, m)  # raises SmoothnessError
    dnorm = norm(dm)
    if constant_for is None:
        constant_for = _default_constants(x, kernel)
    c_km = constant_for(k + m)
    c_m = constant_for(m) if m > 0 else 1.0
    zero = _zero_tol(x)
    rows = []
    fit1, fit2 = 0.0, 0.0
    factor_max = 1.0
    for r in r_grid:
        if method == "smoothing_upper":
            if kernel is None:
                raise ApproximationError("smoothing_upper needs a kernel")
            ba = best_approx(x, r, method, k, kernel)
        else:
            ba = best_approx(x, r, method)
        factor = ba.factor * 3.0 ** (k + m) if ba.method == "near_best" else 1.0
        factor_max = max(factor_max, factor)
        w = omega_tilde(dm, 1.0 / r, k, n_tau)
        rhs1 = r**-m * float(group_bound(group, m / r)) * w
        rhs2 = r**-m * float(group_bound(group, 1.0 / r)) ** m * dnorm
        row = {"x": x.name, "k": k, "m": m, "r": r, "E_r": ba.value, "method": ba.method,
               "modulus": w, "smoothing_upper": None, "rhs_modulus": rhs1, "rhs_norm": rhs2}
        live = ba.value > zero
        c1 = ba.value / rhs1 if rhs1 > 0 else (math.inf if live else 0.0)
        c2 = ba.value / rhs2 if rhs2 > 0 else (math.inf if live else 0.0)
        fit1, fit2 = max(fit1, c1 / factor), max(fit2, c2 / factor)
        row["ratio"] = c1 / factor if rhs1 > 0 else math.nan
        row["bound"] = c_km * factor * rhs1
        row["status"] = "degenerate" if not live else ("ok" if ba.value <= row["bound"] and
                                                       ba.value <= c_m * factor * rhs2 else "exceeds")
        rows.append(row)
    slope = _slope([row["r"] for row in rows], [row["E_r"] for row in rows], zero)
    finite = math.isfinite(fit1) and math.isfinite(fit2)
    if all(row["status"] == "degenerate" for row in rows):
        verdict = "PASS-degenerate"
    else:
        verdict = "PASS" if finite and fit1 <= c_km and fit2 <= c_m else "FAIL"
    extra = {
        "fitted_C_modulus": fit1,
        "fitted_C_norm": fit2,
        "constant_modulus": c_km,
        "constant_norm": c_m,
        "slope": slope,
        "derivative_norm": dnorm,
        "method": method,
        "backend": x.backend.tag,
        "p": x.p,
    }
    return JacksonReport(x.name, k, m, rows, c_km, c_km, verdict, fit1, extra)


def _default_constants(x: GridFunction, kernel: Kernel | None):
    group = GroupDescriptor.for_backend(x.backend)
    cache = {}

    def constant_for(order: int) -> float:
        if order not in cache:
            if kernel is not None:
                try:
                    check_compatible(kernel, order, group)
                    cache[order] = constant_estimate(kernel, order, group)
                    return cache[order]
                except ApproximationError:
                    pass
            M_U = _group_weight(x)
            kern = kernel_for_order(M_U, order)
            cache[order] = constant_estimate(kern, order, group)
        return cache[order]

    return constant_for


def _group_weight(x: GridFunction):
    from .weights import make_weight

    if x.is_periodic:
        return make_weight("constant")
    return x.backend.mu
