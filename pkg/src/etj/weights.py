"""Admissible weights: even, submultiplicative, slowly growing functions.

Weights are evaluated in the log domain.  ``Weight.log(t)`` returns
``beta(t) = ln alpha(|t|)`` and ``Weight(t)`` exponentiates on demand, so
super-polynomial weights stay usable far beyond the range where
``alpha`` itself overflows a double.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, special

log = logging.getLogger(__name__)

KINDS = (
    "constant",
    "polynomial",
    "exp_power",
    "carleman",
    "entire_product",
    "group_composed",
)

# log(DBL_MAX); exp() of anything larger overflows
_LOG_MAX = 709.78


class WeightError(ValueError):
    """Invalid weight parameters or a weight that fails its invariants."""


class WeightOverflow(OverflowError):
    """alpha(t) does not fit in a double; use ``log_domain=True``."""


# ---------------------------------------------------------------------------
# sequences used by the carleman and entire_product kinds


@dataclass(frozen=True)
class CarlemanSequence:
    """Positive sequence ``m_n`` (``m_0 = 1``), stored through ``ln m_n``.

    Entries past the end of an explicit table are treated as ``+inf``, which
    truncates the power series of the associated weight.
    """

    name: str
    log_m: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    length: float = math.inf

    @classmethod
    def factorial_power(cls, s: float) -> "CarlemanSequence":
        """``m_n = (n!)**s``."""
        if s <= 0:
            raise WeightError(f"factorial_power exponent must be positive, got {s}")
        return cls(
            f"factorial_power({s:g})",
            lambda n: s * special.gammaln(np.asarray(n, dtype=float) + 1.0),
        )

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "CarlemanSequence":
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size == 0 or np.any(vals <= 0):
            raise WeightError("carleman sequence must be a nonempty list of positive numbers")
        logs = np.log(vals)

        def log_m(n):
            n = np.asarray(n, dtype=int)
            out = np.full(n.shape, np.inf)
            inside = n < logs.size
            out[inside] = logs[n[inside]]
            return out

        return cls(f"table[{vals.size}]", log_m, float(vals.size))

    def values(self, n_max: int) -> np.ndarray:
        """``ln m_n`` for ``n = 0..n_max``."""
        return np.asarray(self.log_m(np.arange(n_max + 1)), dtype=float)


@dataclass(frozen=True)
class ZeroSequence:
    """Nondecreasing positive zeros ``t_k`` for the entire_product kind.

    Either a power law ``t_k = scale * k**exponent`` (infinite) or an explicit
    finite table.
    """

    scale: float = 1.0
    exponent: float = 2.0
    table: tuple[float, ...] | None = None

    @property
    def name(self) -> str:
        if self.table is not None:
            return f"table[{len(self.table)}]"
        return f"power(scale={self.scale:g}, exponent={self.exponent:g})"

    def head(self, count: int) -> np.ndarray:
        if self.table is not None:
            return np.asarray(self.table[:count], dtype=float)
        return self.scale * np.arange(1, count + 1, dtype=float) ** self.exponent

    def inverse_power_tail(self, j: float, start: int) -> float:
        """``sum_{k > start} t_k**(-j)``."""
        if self.table is not None:
            rest = np.asarray(self.table[start:], dtype=float)
            return float(np.sum(rest ** (-j)))
        return float(self.scale ** (-j) * special.zeta(j * self.exponent, start + 1))


# ---------------------------------------------------------------------------
# the Weight type


@dataclass(frozen=True)
class Weight:
    """An admissible weight ``alpha``; call it for values, ``.log`` for ``beta``."""

    kind: str
    params: Mapping[str, Any]
    _log: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    # largest |t| at which evaluation is cheap (carleman series get long)
    eval_limit: float = math.inf
    table: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)

    def log(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        return self._log(t)

    def __call__(self, t):
        with np.errstate(over="ignore"):
            return np.exp(self.log(t))

    def describe(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind}
        for key, value in self.params.items():
            if isinstance(value, Weight):
                out[key] = value.describe()
            elif isinstance(value, (CarlemanSequence, ZeroSequence)):
                out[key] = value.name
            elif callable(value):
                out[key] = getattr(value, "__name__", "callable")
            else:
                out[key] = value
        return out


class LogWeight:
    """``beta = ln alpha`` as a standalone callable."""

    def __init__(self, weight: Weight):
        self.weight = weight

    def __call__(self, t):
        return self.weight.log(t)

    def ratio_decay(self, samples=None) -> np.ndarray:
        """``beta(t)/t`` on a diverging sample sequence (should tend to 0)."""
        if samples is None:
            top = min(60.0, math.log2(self.weight.eval_limit)) if self.weight.eval_limit < math.inf else 60.0
            samples = 2.0 ** np.arange(1.0, top + 1.0)
        samples = np.asarray(samples, dtype=float)
        return self(samples) / samples


# ---------------------------------------------------------------------------
# log evaluators per kind


def _log_polynomial(M, k):
    lm = math.log(M)
    return lambda t: lm + k * np.log1p(t)


def _log_exp_power(b):
    return lambda t: t**b


def _carleman_log(seq: CarlemanSequence, t: np.ndarray, n_limit: int = 1 << 17) -> np.ndarray:
    """ln sum_n t**n / m_n by a chunked log-sum-exp over a growing n-range."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    flat_t = t.ravel()
    flat_out = out.ravel()
    pos = np.flatnonzero(flat_t > 0)
    if pos.size == 0:
        return out
    order = pos[np.argsort(flat_t[pos])]
    chunk = 256
    n_cap = 64
    for start in range(0, order.size, chunk):
        idx = order[start:start + chunk]
        lt = np.log(flat_t[idx])
        while True:
            n = np.arange(n_cap + 1)
            lm = seq.values(n_cap)
            terms = n[:, None] * lt[None, :] - lm[:, None]
            peak = terms.max(axis=0)
            last = terms[-1]
            # terms are concave in n for log-convex m_n; stop once past the peak
            done = np.all((last < peak - 40.0) | ~np.isfinite(last))
            if done or n_cap >= n_limit or not np.all(np.isfinite(peak)):
                break
            n_cap = min(2 * n_cap, n_limit)
        with np.errstate(invalid="ignore"):
            vals = special.logsumexp(terms, axis=0)
        if not done:
            vals = np.where(np.isfinite(peak) & (last >= peak - 40.0), np.inf, vals)
        flat_out[idx] = vals
    return flat_out.reshape(t.shape)


def _entire_product_log(C: float, zeros: ZeroSequence, t: np.ndarray) -> np.ndarray:
    """ln C + 1/2 sum_k ln(1 + t^2/t_k^2) with a zeta-series tail.

    Factors with ``t/t_k <= 0.1`` are summed through the series of
    ``ln(1+u)`` against tail power sums, so no explicit truncation is needed.
    """
    t = np.asarray(t, dtype=float)
    flat = np.abs(t.ravel())
    out = np.full(flat.shape, math.log(C))
    if zeros.table is not None:
        tk = np.asarray(zeros.table, dtype=float)
        for start in range(0, flat.size, 4096):
            seg = flat[start:start + 4096]
            out[start:start + 4096] += 0.5 * np.sum(np.log1p((seg[:, None] / tk[None, :]) ** 2), axis=1)
        return out.reshape(t.shape)
    order = np.argsort(flat)
    chunk = 512
    for start in range(0, order.size, chunk):
        idx = order[start:start + chunk]
        seg = flat[idx]
        top = float(seg[-1])
        if top == 0.0:
            continue
        # explicit factors while t/t_k > 0.1 for the largest t in the chunk
        K = int(math.ceil((10.0 * top / zeros.scale) ** (1.0 / zeros.exponent)))
        acc = np.zeros(seg.size)
        for lo in range(0, K, 2048):
            tk = zeros.head(min(K, lo + 2048))[lo:]
            acc += np.sum(np.log1p((seg[:, None] / tk[None, :]) ** 2), axis=1)
        series = np.zeros(seg.size)
        for j in range(1, 12):
            zsum = zeros.inverse_power_tail(2.0 * j, K) * zeros.scale ** (2.0 * j)
            series += (-1) ** (j + 1) / j * (seg / zeros.scale) ** (2 * j) * zsum
        out[idx] += 0.5 * (acc + series)
    return out.reshape(t.shape)


def _as_log_bound(M_U) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(M_U, Weight):
        return M_U.log

    def lg(t):
        vals = np.asarray(M_U(np.asarray(t, dtype=float)), dtype=float)
        vals = np.broadcast_to(vals, np.shape(t)).astype(float)
        return np.log(vals)

    return lg


# ---------------------------------------------------------------------------
# analytic integral-test tails  int_N^inf beta(t)/t^2 dt


def _log1p_tail(N: float) -> float:
    # int_N^inf ln(1+t)/t^2 dt
    return math.log1p(N) / N + math.log1p(1.0 / N)


def _entire_product_tail(C: float, zeros: ZeroSequence, N: float) -> float:
    # int_N^inf ln(1+t^2/b^2)/t^2 dt = ln(1+N^2/b^2)/N + (2/b) arctan(b/N)
    total = math.log(C) / N
    if zeros.table is not None:
        b = np.asarray(zeros.table, dtype=float)
        return total + 0.5 * float(np.sum(np.log1p((N / b) ** 2) / N + 2.0 / b * np.arctan(b / N)))
    K = int(math.ceil((10.0 * N / zeros.scale) ** (1.0 / zeros.exponent)))
    b = zeros.head(K)
    total += 0.5 * float(np.sum(np.log1p((N / b) ** 2) / N + 2.0 / b * np.arctan(b / N)))
    # remaining k: u = N/t_k <= 0.1; N * term = ln(1+u^2) + 2u arctan(1/u)
    #   = pi u + sum_i (-1)^(i+1) u^(2i)/i - 2 sum_i (-1)^i u^(2i+2)/(2i+1)
    coeff: dict[int, float] = {1: math.pi}
    for i in range(1, 10):
        coeff[2 * i] = coeff.get(2 * i, 0.0) + (-1) ** (i + 1) / i
    for i in range(0, 9):
        coeff[2 * i + 2] = coeff.get(2 * i + 2, 0.0) - 2.0 * (-1) ** i / (2 * i + 1)
    series = sum(c * N**j * zeros.inverse_power_tail(float(j), K) for j, c in coeff.items())
    return total + 0.5 * series / N


def log_tail_integral(w: Weight, N: float) -> float:
    """Upper bound for ``sum_{k>N} beta(k)/k^2`` by the integral test.

    Returns ``inf`` when the integral diverges or cannot be evaluated.
    """
    kind, p = w.kind, w.params
    if kind == "constant":
        return 0.0
    if kind == "polynomial":
        return math.log(p["M"]) / N + p["k"] * _log1p_tail(N)
    if kind == "exp_power":
        b = p["beta_exp"]
        return N ** (b - 1.0) / (1.0 - b)
    if kind == "entire_product":
        return _entire_product_tail(p["C"], p["t_seq"], N)
    if kind == "group_composed":
        k = p["k"]
        base = p["M_U"]
        if isinstance(base, Weight):
            base_tail = log_tail_integral(base, N)
        else:
            base_tail = _quad_tail(_as_log_bound(base), N)
        return k * base_tail + (k + 2) * _log1p_tail(N)
    if kind == "carleman":
        return math.inf
    return _quad_tail(w.log, N)


def _quad_tail(logf, N: float) -> float:
    # t = N/u maps [N, inf) onto (0, 1]
    def integrand(u):
        return float(logf(np.array(N / u))) / N

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(integrand, 0.0, 1.0, limit=200)
        except (integrate.IntegrationWarning, ZeroDivisionError, OverflowError):
            return math.inf
    if not math.isfinite(val) or err > 1e-6 * max(abs(val), 1.0):
        return math.inf
    return val


# ---------------------------------------------------------------------------
# construction


def default_validation_grid(T: float = 64.0, n: int = 513) -> np.ndarray:
    return np.linspace(-T, T, n)


def _validate_carleman(seq: CarlemanSequence, n_check: int = 48) -> None:
    lm = seq.values(n_check)
    finite = np.isfinite(lm)
    if not finite[0] or abs(lm[0]) > 1e-12:
        raise WeightError("carleman sequence needs m_0 = 1")
    lm = lm[finite]
    if lm.size >= 3:
        # m_n^2 <= m_{n-1} m_{n+1}
        gap = lm[:-2] + lm[2:] - 2.0 * lm[1:-1]
        if np.any(gap < -1e-9 * np.maximum(1.0, np.abs(lm[1:-1]))):
            n_bad = int(np.flatnonzero(gap < -1e-9)[0]) + 1
            raise WeightError(f"carleman sequence is not log-convex at n={n_bad}")
    # (k+l)!/m_{k+l} <= k!/m_k * l!/m_l, i.e. ln(k+l)! - lm[k+l] <= ...
    n = np.arange(lm.size)
    g = special.gammaln(n + 1.0) - lm
    for k in range(1, lm.size):
        ls = np.arange(1, lm.size - k)
        if ls.size == 0:
            break
        if np.any(g[k + ls] > g[k] + g[ls] + 1e-9 * (1.0 + np.abs(g[k + ls]))):
            raise WeightError("carleman sequence violates (k+l)!/m_{k+l} <= k!/m_k * l!/m_l")


def make_weight(kind: str, **params) -> Weight:
    """Build a cataloged weight and check its invariants on a default grid.

    Parameters by kind: ``polynomial(M=1, k)``, ``exp_power(beta_exp)``,
    ``carleman(m_seq)``, ``entire_product(C, t_seq)``,
    ``group_composed(M_U, k)``.
    """
    if kind not in KINDS:
        raise WeightError(f"unknown weight kind {kind!r}; expected one of {KINDS}")
    eval_limit = math.inf
    if kind == "constant":
        w = Weight(kind, {}, lambda t: np.zeros(np.shape(t)))
    elif kind == "polynomial":
        M = float(params.get("M", 1.0))
        k = params.get("k")
        if k is None or int(k) != k or k < 0:
            raise WeightError(f"polynomial weight needs a nonnegative integer k, got {k!r}")
        if M < 1:
            raise WeightError(f"polynomial weight needs M >= 1, got {M}")
        w = Weight(kind, {"M": M, "k": int(k)}, _log_polynomial(M, int(k)))
    elif kind == "exp_power":
        b = float(params.get("beta_exp", float("nan")))
        if not 0.0 < b < 1.0:
            raise WeightError(f"exp_power needs beta_exp in (0, 1), got {b}")
        w = Weight(kind, {"beta_exp": b}, _log_exp_power(b))
    elif kind == "carleman":
        seq = params.get("m_seq")
        if not isinstance(seq, CarlemanSequence):
            seq = CarlemanSequence.from_values(seq)
        _validate_carleman(seq)
        eval_limit = 2.0**16
        w = Weight(kind, {"m_seq": seq}, lambda t, s=seq: _carleman_log(s, t), eval_limit)
    elif kind == "entire_product":
        C = float(params.get("C", 1.0))
        zeros = params.get("t_seq")
        if not isinstance(zeros, ZeroSequence):
            zeros = ZeroSequence(table=tuple(float(v) for v in zeros))
        if C < 1:
            raise WeightError(f"entire_product needs C >= 1, got {C}")
        head = zeros.head(64) if zeros.table is None else np.asarray(zeros.table)
        if head.size == 0 or np.any(head <= 0) or np.any(np.diff(head) < 0):
            raise WeightError("entire_product zeros must be positive and nondecreasing")
        if zeros.table is None and zeros.exponent <= 1.0:
            raise WeightError(
                f"entire_product zeros t_k = {zeros.scale:g} k^{zeros.exponent:g}: "
                "sum 1/t_k diverges"
            )
        w = Weight(
            kind, {"C": C, "t_seq": zeros}, lambda t: _entire_product_log(C, zeros, t), 2.0**24
        )
    else:  # group_composed
        return alpha_from_group(params.get("M_U"), params.get("k"))

    problems = weight_invariant_violations(w, default_validation_grid())
    if any(problems.values()):
        raise WeightError(f"{kind} weight fails its invariants: {problems}")
    return w


def eval_weight(w: Weight, t, log_domain: bool = False):
    """alpha(t), or beta(t) = ln alpha(t) when ``log_domain`` is set."""
    b = w.log(t)
    if log_domain:
        return b
    if np.any(np.asarray(b) > _LOG_MAX):
        raise WeightOverflow(
            f"{w.kind} weight exceeds double range at |t|={np.max(np.abs(t)):g}; "
            "request log_domain=True"
        )
    out = np.exp(b)
    return float(out) if np.ndim(out) == 0 else out


def alpha_from_group(M_U, k) -> Weight:
    """``alpha(t) = M_U(|t|)**k * (1+|t|)**(k+2)`` for a group-norm bound.

    ``M_U`` is a Weight or any vectorized callable with ``M_U(0) >= 1``.
    """
    if k is None or int(k) != k or k < 1:
        raise WeightError(f"alpha_from_group needs an integer k >= 1, got {k!r}")
    k = int(k)
    if M_U is None:
        raise WeightError("alpha_from_group needs an M_U evaluator")
    lb = _as_log_bound(M_U)
    probe = np.linspace(0.0, 64.0, 257)
    lv = lb(probe)
    if np.any(~np.isfinite(lv)) or np.any(lv < -1e-14):
        raise WeightError("M_U must be finite and >= 1 on samples")
    if np.any(np.diff(lv) < -1e-12 * np.maximum(1.0, np.abs(lv[1:]))):
        raise WeightError("M_U must be nondecreasing on samples")

    def lg(t):
        return k * lb(t) + (k + 2) * np.log1p(t)

    limit = M_U.eval_limit if isinstance(M_U, Weight) else math.inf
    return Weight("group_composed", {"M_U": M_U, "k": k}, lg, limit)


def group_alpha_integral(w: Weight) -> float:
    """Quadrature of ``((1+|t|) M_U(|t|))**k / alpha(t)`` over the line.

    Equals 2 for any weight produced by :func:`alpha_from_group`.
    """
    if w.kind != "group_composed":
        raise WeightError("group_alpha_integral needs a group_composed weight")
    k = w.params["k"]
    lb = _as_log_bound(w.params["M_U"])

    def f(t):
        tt = np.array(t)
        return float(np.exp(k * (np.log1p(tt) + lb(tt)) - w.log(tt)))

    val, _ = integrate.quad(f, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)
    return 2.0 * val


# ---------------------------------------------------------------------------
# invariants and admissibility


def weight_invariant_violations(w: Weight, grid, pairs: int = 200, tol: float = 1e-12) -> dict:
    """Count sampled violations of alpha >= 1, evenness, monotonicity and
    submultiplicativity (relative tolerance ``tol``)."""
    grid = np.asarray(grid, dtype=float)
    b = w.log(grid)
    bm = w.log(-grid)
    finite = np.isfinite(b)
    out = {
        "below_one": int(np.sum(b[finite] < -1e-15)),
        "odd": int(np.sum(b != bm)),
        "non_monotone": 0,
        "submultiplicative": 0,
    }
    pos = np.unique(np.abs(grid))
    bp = w.log(pos)
    fin = np.isfinite(bp)
    if fin.sum() > 1:
        bpf = bp[fin]
        out["non_monotone"] = int(np.sum(np.diff(bpf) < -1e-13 * np.maximum(1.0, np.abs(bpf[1:]))))
    sub = grid
    if sub.size > pairs:
        sub = sub[np.linspace(0, sub.size - 1, pairs).astype(int)]
    t1, t2 = np.meshgrid(sub, sub)
    b1, b2, b12 = w.log(t1), w.log(t2), w.log(t1 + t2)
    slack = math.log1p(tol) + 1e-14 * (np.abs(b1) + np.abs(b2))
    ok = np.isfinite(b1) & np.isfinite(b2)
    out["submultiplicative"] = int(np.sum(ok & (b12 > b1 + b2 + slack)))
    return out


@dataclass
class AdmissibilityReport:
    kind: str
    N: int
    partial_sum: float
    tail_bound: float
    verdict: str
    violations: dict
    block_lower_bound: float
    partial_sums: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def admissible(self) -> bool:
        return self.verdict == "admissible"

    def to_dict(self) -> dict:
        def clean(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        return {
            "kind": self.kind,
            "N": self.N,
            "partial_sum": clean(self.partial_sum),
            "tail_bound": clean(self.tail_bound),
            "total_upper_bound": clean(self.partial_sum + self.tail_bound),
            "verdict": self.verdict,
            "violations": self.violations,
            "block_lower_bound": clean(self.block_lower_bound),
            "partial_sums": [[n, clean(s)] for n, s in self.partial_sums],
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def check_admissible(w: Weight, grid=None, tol: float = 1e-12, N: int = 4096) -> AdmissibilityReport:
    """Decide sum_k ln alpha(k)/k^2 < inf by partial sum plus integral-test tail."""
    if grid is None:
        grid = default_validation_grid()
    grid = np.asarray(grid, dtype=float)
    notes = []
    if grid.size == 0 or np.max(grid) < 64 or np.min(grid) > -64:
        notes.append("grid does not cover [-64, 64]")
    violations = weight_invariant_violations(w, grid, tol=tol)

    k = np.arange(1, N + 1, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = w.log(k) / k**2
    csum = np.cumsum(terms)
    checkpoints = [n for n in (2**j for j in range(3, 31)) if n <= N]
    partial_sums = [(n, float(csum[n - 1])) for n in checkpoints]
    partial = float(csum[-1])

    tail = log_tail_integral(w, float(N)) if np.isfinite(partial) else math.inf

    # rigorous dyadic lower bounds beta(2^j)/2^(j+2) for blocks past N
    j0 = int(math.log2(N))
    j_top = int(min(60.0, math.log2(w.eval_limit))) if w.eval_limit < math.inf else 60
    js = np.arange(j0, max(j0 + 1, j_top))
    blocks = w.log(2.0**js) / 2.0 ** (js + 2)
    block_lb = float(np.sum(blocks))

    if w.kind == "carleman":
        dc = carleman_report(w.params["m_seq"], min(N, 512))
        est = dc.estimates["c"]
        verdict = {"converges": "admissible", "diverges": "inadmissible"}.get(est, "undecided")
        notes.append(f"Denjoy-Carleman estimate (c): {est}")
        if verdict == "admissible":
            tail = math.nan
    elif not np.isfinite(partial):
        verdict = "inadmissible"
    elif math.isfinite(tail):
        verdict = "admissible"
    else:
        # divergence evidence: beta(t)/t keeps a positive floor (harmonic minorant)
        ts = 2.0**js
        ratio = w.log(ts) / ts
        verdict = "inadmissible" if np.min(ratio) >= 0.5 * ratio[0] > 0 else "undecided"
    if any(violations.values()) and verdict == "admissible":
        verdict = "inadmissible"
        notes.append("sampled invariant violations")
    return AdmissibilityReport(w.kind, N, partial, tail, verdict, violations, block_lb, partial_sums, notes)


# ---------------------------------------------------------------------------
# Denjoy-Carleman


def _series_estimate(terms: np.ndarray) -> str:
    """Classify sum(terms) by the power-law slope of its last half."""
    n = np.arange(1, terms.size + 1, dtype=float)
    if np.any(~np.isfinite(terms[terms.size // 2:])):
        return "diverges"
    tail = slice(terms.size // 4, terms.size)
    a = terms[tail]
    if np.all(a == 0):
        return "converges"
    if np.any(a <= 0):
        return "undecided"
    slope = np.polyfit(np.log(n[tail]), np.log(a), 1)[0]
    if slope < -1.1:
        return "converges"
    if slope >= -1.02:
        return "diverges"
    return "undecided"


@dataclass
class CarlemanReport:
    N: int
    partial_sums: dict
    estimates: dict
    verdict: str

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "partial_sums": {k: (v if math.isfinite(v) else None) for k, v in self.partial_sums.items()},
            "estimates": self.estimates,
            "verdict": self.verdict,
        }


def carleman_report(m_seq, N: int) -> CarlemanReport:
    """Partial sums of the three Denjoy-Carleman series up to ``N``:

    (a) sum ln mu(k)/k^2, (b) sum (1/m_n)^(1/n), (c) sum m_{n-1}/m_n.
    """
    if N < 8:
        raise WeightError(f"carleman_report needs N >= 8, got {N}")
    seq = m_seq if isinstance(m_seq, CarlemanSequence) else CarlemanSequence.from_values(m_seq)
    lm = seq.values(N)
    if not np.all(np.isfinite(lm)):
        raise WeightError(f"sequence {seq.name} is shorter than N+1={N + 1}")
    n = np.arange(1, N + 1, dtype=float)
    b_terms = np.exp(-lm[1:] / n)
    c_terms = np.exp(lm[:-1] - lm[1:])
    k = np.arange(1, N + 1, dtype=float)
    a_terms = _carleman_log(seq, k) / k**2
    sums = {
        "a": float(np.sum(a_terms)),
        "b": float(np.sum(b_terms)),
        "c": float(np.sum(c_terms)),
    }
    est = {
        "a": _series_estimate(a_terms),
        "b": _series_estimate(b_terms),
        "c": _series_estimate(c_terms),
    }
    values = set(est.values())
    if values == {"converges"}:
        verdict = "admissible"
    elif values == {"diverges"}:
        verdict = "inadmissible"
    else:
        verdict = "undecided"
    return CarlemanReport(N, sums, est, verdict)


# ---------------------------------------------------------------------------
# config loading


def weight_from_config(cfg: Mapping[str, str], prefix: str = "weight.") -> Weight:
    """Build a weight from flat ``weight.kind``/``weight.<param>`` keys."""
    sub = {k[len(prefix):]: v for k, v in cfg.items() if k.startswith(prefix)}
    kind = sub.pop("kind", "constant")
    if kind == "polynomial":
        return make_weight(kind, M=float(sub.get("M", 1.0)), k=int(sub.get("k", 2)))
    if kind == "exp_power":
        return make_weight(kind, beta_exp=float(sub.get("beta_exp", 0.5)))
    if kind == "carleman":
        if "values" in sub:
            seq = CarlemanSequence.from_values([float(v) for v in sub["values"].split(",")])
        else:
            seq = CarlemanSequence.factorial_power(float(sub.get("s", 2.0)))
        return make_weight(kind, m_seq=seq)
    if kind == "entire_product":
        if "zeros" in sub:
            zeros = ZeroSequence(table=tuple(float(v) for v in sub["zeros"].split(",")))
        else:
            zeros = ZeroSequence(float(sub.get("scale", 1.0)), float(sub.get("exponent", 2.0)))
        return make_weight(kind, C=float(sub.get("C", 2.0)), t_seq=zeros)
    if kind == "group_composed":
        base_cfg = {k: v for k, v in cfg.items() if k.startswith(prefix + "base.")}
        base = weight_from_config(base_cfg, prefix + "base.") if base_cfg else make_weight("constant")
        return alpha_from_group(base, int(sub.get("k", 1)))
    if kind == "constant":
        return make_weight(kind)
    raise WeightError(f"unknown weight kind {kind!r}")
