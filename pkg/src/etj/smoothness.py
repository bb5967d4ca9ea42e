"""Finite differences along the shift group and moduli of continuity."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .spaces import GridFunction, GroupDescriptor, SpaceError, group_bound, norm, shift

K_MAX = 12


def finite_difference(x: GridFunction, h: float, k: int) -> GridFunction:
    """``(U(h) - I)^k x = sum_j (-1)^(k-j) C(k, j) U(j h) x``."""
    if k < 0 or k > K_MAX or int(k) != k:
        raise SpaceError(f"difference order must be an integer in [0, {K_MAX}], got {k}")
    if k == 0:
        return x
    if x.is_periodic:
        # same operator applied as the multiplier (e^{i m h} - 1)^k
        m = x.backend.freqs
        mult = (np.exp(1j * m * h) - 1.0) ** k
        return GridFunction.from_coefficients(x.backend, x.coefficients() * mult, x.p, x.name,
                                              real=not np.iscomplexobj(x.values))
    acc = np.zeros(x.backend.n, dtype=np.result_type(x.values, float))
    for j in range(k + 1):
        acc = acc + (-1) ** (k - j) * math.comb(k, j) * shift(x, j * h).values
    return x.with_values(acc)


def _sweep(x, t, k, symmetric, n_tau):
    taus = np.linspace(0.0, t, n_tau + 1)[1:]
    if symmetric:
        taus = np.concatenate([-taus[::-1], taus])
    if x.is_periodic:
        return float(np.max(_periodic_difference_norms(x, taus, k)))
    vals = [norm(finite_difference(x, tau, k)) for tau in taus]
    return max(vals, default=0.0)


def _periodic_difference_norms(x: GridFunction, taus, k: int) -> np.ndarray:
    """``||Delta_tau^k x||`` for many tau at once on the periodic backend."""
    c = x.coefficients()
    m = x.backend.freqs
    n = x.backend.n
    out = np.empty(len(taus))
    for start in range(0, len(taus), 64):
        tau = np.asarray(taus[start:start + 64])[:, None]
        d = c[None, :] * (np.exp(1j * m[None, :] * tau) - 1.0) ** k
        if x.p == 2:
            # discrete Parseval: identical to the trapezoidal sample norm
            out[start:start + len(tau)] = np.sqrt(2.0 * np.pi * np.sum(np.abs(d) ** 2, axis=1))
            continue
        v = np.abs(np.fft.ifft(d * n, axis=1))
        if x.p == math.inf:
            out[start:start + len(tau)] = v.max(axis=1)
        else:
            out[start:start + len(tau)] = (2.0 * np.pi / n * np.sum(v**x.p, axis=1)) ** (1.0 / x.p)
    return out


@dataclass
class ModulusValue:
    value: float
    refined: float
    needs_refinement: bool

    def __float__(self):
        return self.value


def modulus(x: GridFunction, t: float, k: int, symmetric: bool = True, n_tau: int = 64,
            detail: bool = False):
    """Grid maximum of ``||Delta_tau^k x||`` over ``|tau| <= t`` (or ``0 <= tau <= t``).

    The sweep is repeated with twice as many points; the larger value is
    returned and ``needs_refinement`` flags a relative change above 1e-4.
    """
    if t < 0:
        raise SpaceError("modulus needs t >= 0")
    if n_tau < 64:
        raise SpaceError("n_tau must be at least 64")
    if t == 0 or k == 0:
        v = 0.0 if t == 0 and k > 0 else norm(x)
        out = ModulusValue(v, v, False)
        return out if detail else out.value
    coarse = _sweep(x, t, k, symmetric, n_tau)
    fine = _sweep(x, t, k, symmetric, 2 * n_tau)
    best = max(coarse, fine)
    flag = abs(fine - coarse) > 1e-4 * max(best, 1e-300)
    out = ModulusValue(best, fine, flag)
    return out if detail else out.value


def omega(x, t, k, n_tau=64):
    """One-sided modulus (sup over 0 <= tau <= t)."""
    return modulus(x, t, k, symmetric=False, n_tau=n_tau)


def omega_tilde(x, t, k, n_tau=64):
    """Symmetric modulus (sup over |tau| <= t)."""
    return modulus(x, t, k, symmetric=True, n_tau=n_tau)


@dataclass
class ModulusReport:
    k: int
    t_grid: np.ndarray
    values: np.ndarray  # symmetric modulus
    one_sided: np.ndarray | None = None
    x_ref: str = ""
    backend: str = ""
    refinement_flags: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            header = ["t", "omega_tilde"] + (["omega"] if self.one_sided is not None else [])
            wr.writerow(header)
            for i, t in enumerate(self.t_grid):
                row = [f"{t:.17g}", f"{self.values[i]:.17g}"]
                if self.one_sided is not None:
                    row.append(f"{self.one_sided[i]:.17g}")
                wr.writerow(row)


def modulus_report(x: GridFunction, k: int, t_grid, one_sided: bool = True, n_tau: int = 64) -> ModulusReport:
    t_grid = np.asarray(t_grid, dtype=float)
    sym, flags, ones = [], [], []
    for t in t_grid:
        mv = modulus(x, t, k, True, n_tau, detail=True)
        sym.append(mv.value)
        flags.append(mv.needs_refinement)
        if one_sided:
            ones.append(modulus(x, t, k, False, n_tau))
    return ModulusReport(k, t_grid, np.array(sym), np.array(ones) if one_sided else None,
                         x.name, x.backend.tag, flags)


@dataclass
class PropertyReport:
    k: int
    checked: dict = field(default_factory=dict)  # property name -> number of checks
    violations: dict = field(default_factory=dict)  # property name -> list of details

    @property
    def ok(self) -> bool:
        return not any(self.violations.values())

    def _add(self, name, bad, detail):
        self.checked[name] = self.checked.get(name, 0) + 1
        self.violations.setdefault(name, [])
        if bad:
            self.violations[name].append(detail)


def modulus_properties_check(x: GridFunction, k: int, t_grid, group: GroupDescriptor | None = None,
                             tol: float = 1e-10, n_tau: int = 64) -> PropertyReport:
    """Check monotonicity, the n-step and scaling inequalities and
    (for isometric groups) equality of the one-sided and symmetric moduli."""
    group = group or GroupDescriptor.for_backend(x.backend)
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    rep = PropertyReport(k)
    cache = {}

    def om(t):
        key = round(float(t), 15)
        if key not in cache:
            cache[key] = omega_tilde(x, t, k, n_tau)
        return cache[key]

    vals = [om(t) for t in t_grid]
    rep._add("zero_at_zero", om(0.0) != 0.0 and k > 0, om(0.0))
    for a, b, ta, tb in zip(vals, vals[1:], t_grid, t_grid[1:]):
        rep._add("monotone", b < a * (1 - tol) - tol, (ta, tb, a, b))
    for t, w in zip(t_grid, vals):
        for n in (2, 3):
            bound = (1.0 + (n - 1) * group_bound(group, (n - 1) * t)) ** k * w
            rep._add("n_step", om(n * t) > bound * (1 + tol) + tol, (n, t, om(n * t), bound))
        for mu in (2, 3, 5):
            bound = (1.0 + mu * group_bound(group, mu * t)) ** k * w
            rep._add("scaling", om(mu * t) > bound * (1 + tol) + tol, (mu, t, om(mu * t), bound))
        if group.bounded and t > 0:
            one = omega(x, t, k, n_tau)
            rep._add("one_sided_equal", abs(one - w) > tol * max(w, 1.0), (t, one, w))
    return rep
