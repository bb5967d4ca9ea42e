"""Named test functions for the experiment suites."""

from __future__ import annotations

import numpy as np

from .spaces import GridFunction, LineGrid, PeriodicGrid, SpaceError

PERIODIC_NAMES = ("constant", "sawtooth", "abs-sin", "weierstrass", "random-trig")
LINE_NAMES = ("bump", "gaussian")


def sawtooth(backend: PeriodicGrid, p=2, terms: int | None = None) -> GridFunction:
    """Partial sum ``sum_{j<=J} sin(j s)/j`` of the sawtooth (pi - s)/2."""
    J = terms or backend.n // 4 - 1
    c = np.zeros(backend.n, complex)
    j = np.arange(1, J + 1)
    # sin(j s)/j = (e^{ijs} - e^{-ijs}) / (2ij)
    c[j] = 1.0 / (2j * j)
    c[-j] = -1.0 / (2j * j)
    return GridFunction.from_coefficients(backend, c, p, "sawtooth", real=True)


def abs_sin(backend: PeriodicGrid, p=2) -> GridFunction:
    return GridFunction(backend, np.abs(np.sin(backend.points)), p, "abs-sin")


def weierstrass(backend: PeriodicGrid, p=2, a: float = 0.5) -> GridFunction:
    """``sum_j 2^{-a j} cos(2^j s)`` over all octaves below n/4."""
    if a <= 0:
        raise SpaceError("Weierstrass exponent a must be positive")
    s = backend.points
    vals = np.zeros(backend.n)
    j = 0
    while 2**j < backend.n // 4:
        vals += 2.0 ** (-a * j) * np.cos(2**j * s)
        j += 1
    return GridFunction(backend, vals, p, "weierstrass")


def random_trig(backend: PeriodicGrid, p=2, seed: int = 0, decay: float = 4.0) -> GridFunction:
    """Real trigonometric series with ``|x_hat(n)| = n^-decay`` and seeded phases."""
    rng = np.random.default_rng(seed)
    top = backend.n // 2 - 1
    n = np.arange(1, top + 1)
    phase = rng.uniform(0.0, 2.0 * np.pi, size=n.size)
    c = np.zeros(backend.n, complex)
    c[n] = n ** (-decay) * np.exp(1j * phase)
    c[-n] = np.conj(c[n])
    return GridFunction.from_coefficients(backend, c, p, "random-trig", real=True)


def constant(backend, p=2, value: float = 1.0) -> GridFunction:
    return GridFunction(backend, np.full(backend.n, value), p, "constant")


def bump(backend: LineGrid, p=2) -> GridFunction:
    """Indicator of [0, 1]."""
    s = backend.points
    return GridFunction(backend, ((s >= 0) & (s <= 1)).astype(float), p, "bump")


def gaussian(backend: LineGrid, p=2, width: float = 1.0) -> GridFunction:
    s = backend.points
    return GridFunction(backend, np.exp(-0.5 * (s / width) ** 2), p, "gaussian")


_PERIODIC = {
    "constant": constant,
    "sawtooth": sawtooth,
    "abs-sin": abs_sin,
    "weierstrass": weierstrass,
    "random-trig": random_trig,
}
_LINE = {"constant": constant, "bump": bump, "gaussian": gaussian}


def make(name: str, backend, p=2, seed: int = 0, **params) -> GridFunction:
    table = _PERIODIC if isinstance(backend, PeriodicGrid) else _LINE
    if name not in table:
        raise SpaceError(f"unknown corpus function {name!r} for the {backend.tag} backend")
    if name == "random-trig":
        params.setdefault("seed", seed)
    return table[name](backend, p, **params)


def known_names(backend_tag: str) -> tuple:
    return PERIODIC_NAMES if backend_tag == "periodic" else ("constant",) + LINE_NAMES
