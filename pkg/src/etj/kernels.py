"""Entire smoothing kernels built as products of squared sinc factors.

A kernel is ``K(t) = f(t) / ||f||_1`` with

    f(t) = prod_k (sin(a_k t / 2) / (a_k t / 2))**2 .

Each factor is an entire function of exponential type ``a_k`` whose Fourier
transform is a triangle supported on ``[-a_k, a_k]``, so ``f`` has type
``sum(a_k)`` and its transform vanishes outside that interval.  The
``a_k`` come either from a weight (``build_kernel``) or are ``m`` copies of
``1/m`` (``fejer_kernel``).
"""

from __future__ import annotations

import csv
import functools
import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from .weights import LogWeight, Weight, check_admissible, log_tail_integral, make_weight

log = logging.getLogger(__name__)

# factors with a_k |t| / 2 below this are summed through the log-sinc series
_SERIES_CUTOFF = 0.5
_N_SERIES = 14
# ln(sin x / x) = sum_j s_j x^(2j)
_LOGSINC = np.array(
    [
        (-1) ** j * 2.0 ** (2 * j - 1) * special.bernoulli(2 * j)[2 * j] / (j * math.factorial(2 * j))
        for j in range(1, _N_SERIES + 1)
    ]
)
_GL_X, _GL_W = np.polynomial.legendre.leggauss(64)
_GL_S = 0.5 * (_GL_X + 1.0)
_GL_WS = 0.5 * _GL_W


class KernelError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Q rule and a_k


@dataclass(frozen=True)
class QSelection:
    Q: np.ndarray
    S: float
    R: np.ndarray  # R_k = sum_{j >= k} beta(j)/j^2 (partial + integral tail)
    tail_integral: float  # bound for sum_{k > N} beta(k)/k^2
    tail_bound: float  # bound for sum_{k > N} beta(k) Q_k / k^2
    delta: float


def select_Q(beta: LogWeight, N: int, delta: float = 0.1) -> QSelection:
    """``Q_k = max(1 + delta, R_k**-1/2)`` with ``R_k`` the tail of sum beta(j)/j^2.

    Then ``sum_{k>N} c_k Q_k <= (1+delta) R_{N+1} + 2 sqrt(R_{N+1})`` by
    telescoping ``c_k / sqrt(R_k) <= 2 (sqrt(R_k) - sqrt(R_{k+1}))``, and
    ``S`` is the partial sum plus that bound.
    """
    if delta <= 0:
        raise KernelError("Q floor delta must be positive")
    k = np.arange(1, N + 1, dtype=float)
    c = beta(k) / k**2
    if not np.all(np.isfinite(c)):
        raise KernelError("beta is not finite on 1..N")
    if np.all(c == 0):
        raise KernelError("beta vanishes identically (constant weight); use fejer_kernel")
    if np.any(c < 0):
        raise KernelError("beta must be nonnegative")
    w = beta.weight
    report = check_admissible(w, N=N)
    if report.verdict != "admissible":
        raise KernelError(f"weight {w.kind} is not admissible: {report.verdict}")
    tail = log_tail_integral(w, float(N))
    if not math.isfinite(tail):
        # Denjoy-Carleman admissible weights carry no closed-form tail; the
        # dyadic blocks beta(2^(j+1))/2^j bound it from above.
        tail = _dyadic_upper_tail(w, N)
    R = np.cumsum(c[::-1])[::-1] + tail
    Q = np.maximum(1.0 + delta, R**-0.5)
    tail_bound = (1.0 + delta) * tail + 2.0 * math.sqrt(tail)
    S = float(np.sum(c * Q) + tail_bound)
    return QSelection(Q, S, R, tail, tail_bound, delta)


def _dyadic_upper_tail(w: Weight, N: int) -> float:
    j0 = int(math.floor(math.log2(N)))
    j_top = int(math.log2(w.eval_limit)) if math.isfinite(w.eval_limit) else 60
    js = np.arange(j0, j_top)
    blocks = w.log(2.0 ** (js + 1)) / 2.0**js
    if blocks[-1] > 1e-3 * blocks.sum():
        raise KernelError("tail of sum beta(k)/k^2 cannot be bounded")
    # geometric extrapolation of the last ratio
    q = blocks[-1] / blocks[-2]
    return float(blocks.sum() + blocks[-1] * q / (1.0 - q))


def compute_ak(beta: LogWeight, Q, S: float, N: int) -> np.ndarray:
    """``a_k = beta(k) Q_k / (S k^2)`` for ``k = 1..N``."""
    k = np.arange(1, N + 1, dtype=float)
    return beta(k) * np.asarray(Q)[:N] / (S * k**2)


# ---------------------------------------------------------------------------
# product evaluator


def _sinc_taylor(x0: np.ndarray, order: int) -> np.ndarray:
    """Taylor coefficients ``sinc^(l)(x0)/l!`` for ``l = 0..order``."""
    x0 = np.asarray(x0, dtype=float)
    out = np.empty(x0.shape + (order + 1,))
    near = np.abs(x0) < 20.0
    if np.any(near):
        # sinc^(l)(x) = int_0^1 s^l cos(x s + l pi/2) ds
        xs = x0[near][:, None] * _GL_S[None, :]
        for l in range(order + 1):
            out[near, l] = np.cos(xs + 0.5 * math.pi * l) @ (_GL_WS * _GL_S**l) / math.factorial(l)
    far = ~near
    if np.any(far):
        xf = x0[far]
        # Leibniz on sin(x) * (1/x)
        for l in range(order + 1):
            acc = np.zeros(xf.shape)
            for q in range(l + 1):
                p = l - q
                acc += math.comb(l, q) * np.sin(xf + 0.5 * math.pi * q) * (-1) ** p * math.factorial(p) / xf ** (p + 1)
            out[far, l] = acc / math.factorial(l)
    return out


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    out = np.zeros_like(a)
    for i in range(n):
        out[..., i:] += a[..., i:i + 1] * b[..., : n - i]
    return out


def _jet_exp(g: np.ndarray) -> np.ndarray:
    n = g.shape[-1]
    e = np.zeros_like(g)
    e[..., 0] = np.exp(g[..., 0])
    for l in range(1, n):
        acc = np.zeros(g.shape[:-1])
        for q in range(1, l + 1):
            acc += q * g[..., q] * e[..., l - q]
        e[..., l] = acc / l
    return e


class SincProduct:
    """Evaluates ``prod_k sinc(a_k t / 2)**2`` and its derivatives."""

    def __init__(self, a):
        a = np.sort(np.asarray(a, dtype=float))[::-1]
        if a.size == 0 or np.any(a <= 0):
            raise KernelError("factor widths a_k must be positive")
        self.a = a
        # suffix power sums P[j-1, i] = sum_{k >= i} a_k^(2j)
        powers = a[None, :] ** (2 * np.arange(1, _N_SERIES + 1))[:, None]
        suffix = np.cumsum(powers[:, ::-1], axis=1)[:, ::-1]
        self._P = np.concatenate([suffix, np.zeros((_N_SERIES, 1))], axis=1)
        self._neg_a = -a

    @property
    def type(self) -> float:
        return float(self.a.sum())

    def _split(self, u: np.ndarray) -> np.ndarray:
        # number of factors with a_k u >= cutoff (a sorted descending)
        with np.errstate(divide="ignore"):
            thr = np.where(u > 0, -_SERIES_CUTOFF / u, -np.inf)
        return np.searchsorted(self._neg_a, thr, side="right")

    def log_abs(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        u = 0.5 * np.abs(t.ravel())
        order = np.argsort(-u)
        us = u[order]
        split = self._split(us)
        out = np.zeros(us.shape)
        # series part: 2 sum_j s_j u^(2j) P_j[split]
        P = self._P[:, split]
        w = us * us
        acc = np.zeros(us.shape)
        for j in range(_N_SERIES - 1, -1, -1):
            acc = (acc + _LOGSINC[j] * P[j]) * w
        out += 2.0 * acc
        # explicit factors: split is nonincreasing along the sorted points
        counts = np.searchsorted(-split, -np.arange(split.max(initial=0)), side="left")
        with np.errstate(divide="ignore"):
            for k, cnt in enumerate(counts):
                x = self.a[k] * us[:cnt]
                out[:cnt] += 2.0 * np.log(np.abs(np.sin(x) / x))
        res = np.empty_like(out)
        res[order] = out
        return res.reshape(t.shape)

    def __call__(self, t) -> np.ndarray:
        return np.exp(self.log_abs(t))

    def taylor(self, t, order: int) -> np.ndarray:
        """Taylor coefficients ``f^(l)(t)/l!`` for ``l = 0..order``."""
        t = np.asarray(t, dtype=float).ravel()
        n1 = order + 1
        u = 0.5 * np.abs(t)
        split = self._split(u)
        # small factors: log is the even polynomial 2 sum_j s_j P_j (t/2)^(2j)
        P = self._P[:, split]
        g = np.zeros((t.size, n1))
        for j in range(1, _N_SERIES + 1):
            coef = 2.0 * _LOGSINC[j - 1] * P[j - 1] * 0.5 ** (2 * j)
            for l in range(min(2 * j, order) + 1):
                g[:, l] += coef * math.comb(2 * j, l) * t ** (2 * j - l)
        jet = _jet_exp(g)
        for k in range(int(split.max(initial=0))):
            active = split > k
            if not np.any(active):
                break
            half = 0.5 * self.a[k]
            d = _sinc_taylor(half * t[active], order) * half ** np.arange(n1)
            jet[active] = _jet_mul(jet[active], _jet_mul(d, d))
        return jet

    def derivative(self, t, n: int) -> np.ndarray:
        return self.taylor(t, n)[:, n] * math.factorial(n)

    def envelope_log(self, t) -> np.ndarray:
        """ln prod_k min(1, (2/(a_k |t|))^2), an upper bound for ln |f(t)|."""
        t = np.abs(np.asarray(t, dtype=float))
        with np.errstate(divide="ignore"):
            ratio = 2.0 / (self.a[None, :] * t.ravel()[:, None])
        return (2.0 * np.sum(np.log(np.minimum(1.0, ratio)), axis=1)).reshape(t.shape)

    def tail_bound(self, T: float) -> float:
        """Upper bound for ``int_T^inf f``: each factor with a_k T > 2 decays
        at least like (T/t)^2 past T."""
        J = int(np.sum(self.a * T > 2.0))
        if J < 1:
            return math.inf
        return float(math.exp(self.envelope_log(np.array([T]))[0]) * T / (2 * J - 1))


# ---------------------------------------------------------------------------
# quadrature


def panel_nodes(T: float, width: float, order: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on ``[0, T]``."""
    n_panels = max(1, int(math.ceil(T / width)))
    edges = np.linspace(0.0, T, n_panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def adaptive_half_line(func, T: float, tol: float, width: float = 2.0, order: int = 20):
    """Integrate ``func`` over ``[0, T]``, halving the panel width until two
    successive composite rules agree to ``tol`` (relative)."""
    nodes, weights = panel_nodes(T, width, order)
    prev = float(weights @ func(nodes))
    for _ in range(12):
        width *= 0.5
        nodes, weights = panel_nodes(T, width, order)
        cur = float(weights @ func(nodes))
        if abs(cur - prev) <= tol * max(abs(cur), 1e-300):
            return cur, abs(cur - prev), width
        prev = cur
    raise KernelError("panel quadrature did not converge")


# ---------------------------------------------------------------------------
# kernel


@dataclass
class KernelSpec:
    weight: Weight
    n_prod: int = 4096
    delta: float = 0.1
    t_quad: float | None = None
    quad_tol: float = 1e-10

    def __post_init__(self):
        if self.n_prod < 8:
            raise KernelError(f"n_prod must be >= 8, got {self.n_prod}")


@dataclass
class CertificationReport:
    r: float
    rows: list  # dicts: n, c_hat, argmax_t, unstable
    t_max: float

    def constant(self, n: int = 0) -> float:
        for row in self.rows:
            if row["n"] == n:
                return row["c_hat"]
        raise KeyError(n)

    def to_dict(self) -> dict:
        return {"r": self.r, "t_max": self.t_max, "rows": self.rows}


class Kernel:
    """Normalized product kernel with its construction metadata.

    Instances are treated as immutable; cached tables are derived data only.
    """

    def __init__(self, a, *, kind: str, weight: Weight | None = None, quad_tol: float = 1e-10,
                 t_quad: float | None = None, meta: dict | None = None, l1_norm: float | None = None):
        self.product = SincProduct(a)
        self.kind = kind
        self.weight = weight
        self.quad_tol = quad_tol
        self.meta = dict(meta or {})
        if l1_norm is not None:
            # normalizer known in closed form; the window only serves sampling
            self.t_quad = t_quad if t_quad is not None else self._choose_t_quad(quad_tol, cap=1e4)
            self.truncation_tail = self.product.tail_bound(self.t_quad)
            self.l1_norm = float(l1_norm)
            self.quad_width = 1.0
            self.quad_error = 0.0
        else:
            self.t_quad = t_quad if t_quad is not None else self._choose_t_quad(quad_tol)
            self.truncation_tail = self.product.tail_bound(self.t_quad)
            half, err, width = adaptive_half_line(self.product, self.t_quad, 1e-13)
            self.l1_norm = 2.0 * half
            self.quad_width = width
            self.quad_error = 2.0 * err + 2.0 * self.truncation_tail
            if not self.truncation_tail <= quad_tol * self.l1_norm:
                raise KernelError(
                    f"T_quad={self.t_quad:g} leaves tail {self.truncation_tail:.3g} above tolerance"
                )
        self._c1: float | None = None

    def _choose_t_quad(self, tol: float, cap: float = 1e7) -> float:
        T = 8.0
        mass = None
        while T < cap:
            bound = self.product.tail_bound(T)
            if mass is None and math.isfinite(bound):
                nodes, weights = panel_nodes(T, 1.0)
                mass = 2.0 * float(weights @ self.product(nodes))
            if mass is not None and bound <= 0.1 * tol * mass:
                return T
            T *= 1.25
        if cap < 1e7:
            return cap
        raise KernelError("kernel decays too slowly to choose a quadrature window")

    # -- values ---------------------------------------------------------

    @property
    def a(self) -> np.ndarray:
        return self.product.a

    @property
    def partial_sum_a(self) -> float:
        return self.product.type

    @property
    def type_bound(self) -> float:
        return self.product.type

    def __call__(self, t) -> np.ndarray:
        return self.product(t) / self.l1_norm

    def log_value(self, t) -> np.ndarray:
        return self.product.log_abs(t) - math.log(self.l1_norm)

    def derivative(self, t, n: int) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return (self.product.derivative(t, n) / self.l1_norm).reshape(t.shape)

    def mass_check(self) -> float:
        """``int K - 1`` by the trapezoidal rule with unit step.

        Independent of the panel rule used for normalization; exact up to the
        window tail because the transform of K vanishes outside [-1, 1].
        """
        n = int(math.ceil(self.t_quad))
        t = np.arange(-n, n + 1, dtype=float)
        return float(np.sum(self(t)) - 1.0)

    # -- certification -------------------------------------------------

    @property
    def c1(self) -> float:
        """Empirical ``sup_t K(t) alpha(|t|)`` (decay constant at r = 1)."""
        if self._c1 is None:
            self._c1 = certify_bounds(self, 1.0, 0).constant(0)
        return self._c1

    # -- transforms / periodization ------------------------------------

    @functools.lru_cache(maxsize=128)
    def periodized_multiplier(self, n_samples: int, r: float, n: int = 1, nu: int = 0) -> np.ndarray:
        """Fourier multiplier of ``x -> int K_r^(nu)(t) U(n t) x dt`` on the circle.

        Built in the time domain: the kernel is sampled at
        ``t = (s_l + 2 pi j)/n``, folded onto the ``n_samples`` grid points
        ``s_l`` and integrated by the periodic trapezoidal rule, which is
        exact for trigonometric polynomials of degree below ``n_samples/2``.
        Returns the multiplier indexed like ``numpy.fft`` frequencies (complex
        for odd ``nu``).
        """
        N = int(n_samples)
        step = 2.0 * math.pi * r / (n * N)  # spacing of the arguments r t
        L = int(math.ceil(self.t_quad / step))
        Lp = ((L // N) + 1) * N
        u = np.arange(-Lp, Lp, dtype=float) * step
        vals = self(u) if nu == 0 else self.derivative(u, nu)
        folded = np.roll(vals.reshape(-1, N).sum(axis=0), -(Lp % N))
        # K_r^(nu)(t) = r^(nu+1) K^(nu)(r t); dt = 2 pi / (n N)
        per = folded * r ** (nu + 1) / n
        mult = 2.0 * math.pi * np.fft.ifft(per)
        # K^(nu) has the parity of nu: real multiplier for even, imaginary for odd
        return mult.real if nu % 2 == 0 else 1j * mult.imag

    def to_table(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.column_stack([t, self(t)])

    def metadata(self) -> dict:
        out = {
            "kind": self.kind,
            "n_factors": int(self.a.size),
            "partial_sum_a": self.partial_sum_a,
            "l1_norm_f": self.l1_norm,
            "t_quad": self.t_quad,
            "truncation_tail": self.truncation_tail,
            "quad_error": self.quad_error,
            "mass_check": self.mass_check(),
            "c1_hat": self.c1,
        }
        if self.weight is not None:
            out["weight"] = self.weight.describe()
        out.update(self.meta)
        return out

    def __repr__(self):
        return f"Kernel(kind={self.kind!r}, factors={self.a.size}, type={self.partial_sum_a:.6f})"


def build_kernel(spec: KernelSpec) -> Kernel:
    """Lemma-type kernel for an admissible weight."""
    beta = LogWeight(spec.weight)
    sel = select_Q(beta, spec.n_prod, spec.delta)
    a = compute_ak(beta, sel.Q, sel.S, spec.n_prod)
    meta = {
        "S": sel.S,
        "delta": spec.delta,
        "a_tail_bound": sel.tail_bound / sel.S,
        "Q_first": float(sel.Q[0]),
        "Q_last": float(sel.Q[-1]),
    }
    kern = Kernel(a, kind="sinc_product", weight=spec.weight, quad_tol=spec.quad_tol,
                  t_quad=spec.t_quad, meta=meta)
    log.info("built %r: l1=%.6g T=%.4g", kern, kern.l1_norm, kern.t_quad)
    return kern


def fejer_normalizer(m: int) -> float:
    """``int (sin(x/2m)/(x/2m))**(2m) dx`` in closed form."""
    n = 2 * m
    s = sum((-1) ** j * math.comb(n, j) * (n - 2 * j) ** (n - 1) for j in range(m + 1))
    integral = math.pi * s / (2 ** (n - 1) * math.factorial(n - 1))
    return 2.0 * m * integral


def fejer_kernel(m: int, weight: Weight | None = None, M: float = 1.0) -> Kernel:
    """``(sin(t/2m)/(t/2m))**(2m) / K_m``: ``m`` squared factors of width 1/m.

    ``weight`` is the polynomial weight the kernel serves, bounded by
    ``M (1+|t|)**(2m)``; defaults to that bound itself.
    """
    if int(m) != m or m < 1:
        raise KernelError(f"fejer_kernel needs an integer m >= 1, got {m!r}")
    m = int(m)
    if weight is None:
        weight = make_weight("polynomial", M=M, k=2 * m)
    else:
        t = np.linspace(0.0, 1e4, 2001)
        if np.any(weight.log(t) > math.log(M) + 2 * m * np.log1p(t) + 1e-12):
            raise KernelError(f"weight grows faster than {M:g}(1+|t|)^{2 * m}")
    K_m = fejer_normalizer(m)
    return Kernel(np.full(m, 1.0 / m), kind="fejer", weight=weight, l1_norm=K_m,
                  meta={"m": m, "M": M, "K_m": K_m})


def kernel_for_order(M_U, k: int, kind: str = "sinc_product", n_prod: int = 4096, delta: float = 0.1) -> Kernel:
    """Kernel for ``alpha = M_U(|t|)**k (1+|t|)**(k+2)``."""
    from .weights import alpha_from_group

    weight = alpha_from_group(M_U, k)
    if kind == "fejer":
        return fejer_kernel(int(math.ceil((k + 2) / 2)), weight=weight)
    return build_kernel(KernelSpec(weight, n_prod=n_prod, delta=delta))


# ---------------------------------------------------------------------------
# scaled kernels, certification, transforms


def eval_scaled(kernel: Kernel, r: float, t) -> np.ndarray:
    """``K_r(t) = r K(r t)``."""
    if r <= 0:
        raise KernelError(f"scale r must be positive, got {r}")
    return r * kernel(r * np.asarray(t, dtype=float))


def _default_cert_grid(kernel: Kernel, r: float) -> np.ndarray:
    T = kernel.t_quad / r
    inner = np.linspace(0.0, min(T, 40.0 / r), 4001)
    outer = np.geomspace(max(40.0 / r, 1e-3), T, 2000) if T > 40.0 / r else np.empty(0)
    return np.unique(np.concatenate([inner, outer]))


def certify_bounds(kernel: Kernel, r: float, n_max: int, t_grid=None) -> CertificationReport:
    """Empirical constants for the decay and derivative bounds of ``K_r``.

    Row ``n = 0``: ``max K_r(t) alpha(|t|) / r`` (the decay constant c_r).
    Rows ``n >= 1``: ``max |K_r^(n)(t)| alpha(|t|) / (sqrt(2 pi n) alpha(n/r) r^n)``.
    """
    if n_max > 12:
        raise KernelError("derivative certification is limited to n <= 12")
    if kernel.weight is None:
        raise KernelError("kernel has no weight to certify against")
    w = kernel.weight
    t = np.abs(np.asarray(t_grid if t_grid is not None else _default_cert_grid(kernel, r), dtype=float))
    rows = []
    beta_t = w.log(t)
    # n = 0 in the log domain, refined around the grid maximum
    lv = kernel.log_value(r * t) + beta_t
    i = int(np.nanargmax(lv))
    best_t, best = float(t[i]), float(lv[i])
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, t.size - 1)]
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda s: -(kernel.log_value(np.array([r * s]))[0] + w.log(np.array([s]))[0]),
            bounds=(lo, hi), method="bounded", options={"xatol": 1e-12},
        )
        if -res.fun > best:
            best, best_t = float(-res.fun), float(res.x)
    rows.append({"n": 0, "c_hat": math.exp(best), "argmax_t": best_t, "unstable": False})
    if n_max >= 1:
        jets = kernel.product.taylor(r * t, n_max)
        for n in range(1, n_max + 1):
            deriv = np.abs(jets[:, n]) * math.factorial(n) / kernel.l1_norm * r ** (n + 1)
            unstable = bool(np.any(~np.isfinite(deriv)))
            with np.errstate(divide="ignore"):
                lval = np.log(deriv) + beta_t
            lval = np.where(np.isfinite(lval), lval, -np.inf)
            j = int(np.argmax(lval))
            denom = 0.5 * math.log(2 * math.pi * n) + float(w.log(np.array(n / r))) + n * math.log(r)
            rows.append({
                "n": n,
                "c_hat": math.exp(lval[j] - denom),
                "argmax_t": float(t[j]),
                "unstable": unstable,
            })
    return CertificationReport(r, rows, float(t.max()))


def kernel_transform(kernel: Kernel, r: float, xi_grid, method: str = "auto") -> np.ndarray:
    """``int K_r(t) exp(i xi t) dt``.

    ``method="quadrature"`` uses composite Gauss-Legendre panels on the
    window (K is even, so this is ``2 int_0^T K(u) cos(u xi/r) du``).
    ``"exact"`` (Fejer kernels only) uses the closed-form spline; ``"auto"``
    picks exact when available.
    """
    xi = np.asarray(xi_grid, dtype=float)
    if method not in ("auto", "exact", "quadrature"):
        raise ValueError(f"unknown transform method {method!r}")
    if method != "quadrature" and kernel.kind == "fejer":
        return fejer_transform_exact(kernel.meta["m"], xi / r)
    if method == "exact":
        raise KernelError("closed-form transform only exists for Fejer kernels")
    flat = xi.ravel() / r
    fmax = float(np.max(np.abs(flat), initial=0.0))
    width = min(kernel.quad_width, 4.0 / (fmax + 1.0))
    nodes, weights = panel_nodes(kernel.t_quad, width)
    wk = weights * kernel(nodes)
    out = np.empty(flat.shape)
    for start in range(0, flat.size, 256):
        seg = flat[start:start + 256]
        out[start:start + 256] = 2.0 * (np.cos(np.outer(seg, nodes)) @ wk)
    return out.reshape(xi.shape)


def fejer_transform_exact(m: int, xi) -> np.ndarray:
    """Closed-form transform of the normalized Fejer-type kernel.

    ``(sin(t/2m)/(t/2m))**(2m)`` is the characteristic function of a sum of
    2m uniforms on [-1/2m, 1/2m]; its normalized transform is that sum's
    density (an Irwin-Hall spline) divided by its value at 0.
    """
    n = 2 * m
    xi = np.asarray(xi, dtype=float)

    def irwin_hall(s):
        s = np.asarray(s, dtype=float)
        acc = np.zeros(s.shape)
        for j in range(n + 1):
            acc += (-1) ** j * math.comb(n, j) * np.where(s > j, (s - j), 0.0) ** (n - 1)
        return np.where((s >= 0) & (s <= n), acc / math.factorial(n - 1), 0.0)

    return irwin_hall(m * (xi + 1.0)) / irwin_hall(np.array(float(m)))


# ---------------------------------------------------------------------------
# export


def export_kernel(kernel: Kernel, csv_path, json_path, t=None, certification=None) -> None:
    if t is None:
        t = np.linspace(-kernel.t_quad, kernel.t_quad, 4001)
    with open(csv_path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["t", "K"])
        for ti, ki in kernel.to_table(t):
            wr.writerow([f"{ti:.17g}", f"{ki:.17g}"])
    meta = kernel.metadata()
    if certification is not None:
        meta["certification"] = [c.to_dict() for c in certification]
    with open(json_path, "w") as fh:
        json.dump(_jsonable(meta), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
