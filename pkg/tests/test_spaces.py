import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etj import corpus
from etj.spaces import (
    GridFunction,
    GroupDescriptor,
    LineGrid,
    PeriodicGrid,
    SmoothnessError,
    SpaceError,
    WindowError,
    differentiate,
    edge_fraction,
    group_bound,
    load_csv,
    norm,
    sample,
    shift,
    trig_degree,
)
from etj.weights import make_weight


@pytest.fixture(scope="module")
def line_grid():
    return LineGrid(8.0, 2048, make_weight("exp_power", beta_exp=0.5))


def test_periodic_grid_validation():
    for n in (8, 100, 1000):
        with pytest.raises(SpaceError):
            PeriodicGrid(n)


def test_norms_of_simple_functions(grid):
    assert norm(corpus.constant(grid)) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-15)
    assert norm(sample(grid, np.sin, p="inf")) == pytest.approx(1.0, abs=1e-12)
    # ||sin||_1 = 4 (the kinks of |sin| limit the trapezoid rule to O(h^2))
    assert norm(sample(grid, np.sin, p=1)) == pytest.approx(4.0, rel=1e-6)
    assert norm(sample(grid, lambda s: np.cos(5 * s))) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_bad_p():
    with pytest.raises(SpaceError):
        corpus.constant(PeriodicGrid(16), p=0.5)


def test_line_bump_mass():
    g = LineGrid(8.0, 2048)
    assert norm(corpus.bump(g, p=1)) == pytest.approx(1.0, abs=1e-15)


def test_line_weighted_bump_mass(line_grid):
    # int_0^1 e^sqrt(s) ds = 2
    assert norm(corpus.bump(line_grid, p=1)) == pytest.approx(2.0, rel=1e-4)


def test_nyquist_mode_is_dropped():
    g = PeriodicGrid(16)
    x = GridFunction(g, np.cos(8 * g.points))
    assert np.allclose(x.values, 0, atol=1e-15)


def test_shift_eigenfunction(grid):
    e = sample(grid, lambda s: np.exp(1j * s))
    t = 0.7
    assert np.allclose(shift(e, t).values, np.exp(1j * t) * e.values, atol=1e-14)


def test_shift_isometry_p2(periodic_corpus):
    for x in periodic_corpus.values():
        for t in (1.3, -0.37, 100.0):
            assert norm(shift(x, t)) == pytest.approx(norm(x), rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("p", [1, "inf"])
def test_shift_isometry_grid_aligned(periodic_corpus, grid, p):
    h = 2 * math.pi / grid.n
    for x in periodic_corpus.values():
        y = x.with_p(p)
        for j in (1, 37, -1000):
            assert norm(shift(y, j * h)) == pytest.approx(norm(y), rel=1e-10, abs=1e-15)


def test_shift_isometry_p_inf_off_grid_is_resolution_limited(periodic_corpus):
    # sample max of a smooth function: changes only at the grid-resolution level
    y = periodic_corpus["random-trig"].with_p("inf")
    assert norm(shift(y, 1.3)) == pytest.approx(norm(y), rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.floats(-20, 20), st.floats(-20, 20))
def test_shift_group_law(s, t):
    g = PeriodicGrid(64)
    x = corpus.random_trig(g, seed=5)
    a = shift(shift(x, s), t)
    b = shift(x, s + t)
    assert norm(a - b) <= 1e-12 * norm(x)


def test_differentiate_basics(grid):
    x = sample(grid, np.sin)
    assert np.allclose(differentiate(x, 1).values, np.cos(grid.points), atol=1e-11)
    e = sample(grid, lambda s: np.exp(3j * s))
    assert np.allclose(differentiate(e, 2).values, -9 * e.values, atol=1e-10)
    assert differentiate(x, 0) is x


def test_differentiate_keeps_degree(grid):
    rng = np.random.default_rng(1)
    c = np.zeros(grid.n, complex)
    c[1:6] = rng.normal(size=5) + 1j * rng.normal(size=5)
    c[-5:] = np.conj(c[1:6][::-1])
    y = GridFunction.from_coefficients(grid, c)
    assert trig_degree(y) == 5
    assert trig_degree(differentiate(y, 1)) == 5


def test_differentiate_linear(periodic_corpus):
    x, y = periodic_corpus["random-trig"], periodic_corpus["weierstrass"]
    lhs = differentiate(x * 2.0 + y, 1)
    rhs = differentiate(x, 1) * 2.0 + differentiate(y, 1)
    assert norm(lhs - rhs) <= 1e-12 * norm(rhs)


def test_differentiate_refuses_rough(periodic_corpus):
    with pytest.raises(SmoothnessError):
        differentiate(periodic_corpus["abs-sin"], 2)


def test_shift_and_differentiate_commute(periodic_corpus):
    x = periodic_corpus["random-trig"]
    a = differentiate(shift(x, 0.9), 2)
    b = shift(differentiate(x, 2), 0.9)
    # rounding is amplified by m^2 at the top of the band
    assert norm(a - b) <= 1e-8 * norm(a)


def test_line_differentiate_polynomial_exact():
    g = LineGrid(4.0, 256)
    s = g.points
    x = GridFunction(g, np.exp(-s**2))
    d = differentiate(x, 1).values
    inner = slice(8, -8)
    assert np.allclose(d[inner], (-2 * s * np.exp(-s**2))[inner], atol=2e-5)
    with pytest.raises(SpaceError):
        differentiate(x, 5)


def test_trig_degree(grid):
    assert trig_degree(sample(grid, lambda s: np.cos(5 * s))) == 5
    assert trig_degree(corpus.constant(grid, value=0.0)) is None
    y = sample(grid, lambda s: np.cos(5 * s) + 1e-10 * np.cos(50 * s))
    assert trig_degree(y, 1e-6) == 5
    assert trig_degree(y, 1e-12) == 50


def test_group_bound():
    P = GroupDescriptor.for_backend(PeriodicGrid(16))
    assert group_bound(P, 7.5) == 1.0
    L = GroupDescriptor.for_backend(LineGrid(4.0, 64, make_weight("exp_power", beta_exp=0.5)))
    assert group_bound(L, 4.0) == pytest.approx(math.e**2)
    t = np.linspace(0, 30, 61)
    v = group_bound(L, t)
    assert np.all(np.diff(v) >= 0)
    t1, t2 = np.meshgrid(t, t)
    assert np.all(group_bound(L, t1 + t2) <= group_bound(L, t1) * group_bound(L, t2) * (1 + 1e-12))
    with pytest.raises(SpaceError):
        group_bound(P, -1.0)


def test_line_shift_bounds(line_grid):
    x = corpus.bump(line_grid, p=1)
    mu = line_grid.mu
    base = norm(x)
    for t in np.arange(0.0, 4.0 + 1e-9, 0.25):
        y = shift(x, t)
        assert norm(y) <= mu(t) * base * (1 + 1e-6)
        if t > 1:
            assert norm(y) >= mu(t - 1) * 1.0


def test_line_shift_exact_on_grid(line_grid):
    x = corpus.gaussian(line_grid)
    j = 40
    y = shift(x, j * line_grid.dx)
    assert np.array_equal(y.values[:-j], x.values[j:])


def test_line_fractional_shift():
    g = LineGrid(16.0, 1024)
    x = corpus.gaussian(g)
    y = shift(x, 0.3 * g.dx + 1.0)
    assert np.allclose(y.values, np.exp(-0.5 * (g.points + 1.0 + 0.3 * g.dx) ** 2), atol=1e-10)


def test_line_shift_refuses_leaving_mass(line_grid):
    x = corpus.bump(line_grid)
    with pytest.raises(WindowError):
        shift(x, 8.5)
    with pytest.raises(WindowError):
        shift(x, -7.5)


def test_edge_fraction():
    g = LineGrid(8.0, 1024)
    assert edge_fraction(corpus.gaussian(g)) < 1e-6
    assert edge_fraction(corpus.constant(g)) > 0.01


def test_load_csv(tmp_path):
    g = PeriodicGrid(16)
    path = tmp_path / "x.csv"
    path.write_text("value\n" + "\n".join(str(v) for v in np.sin(g.points)) + "\n")
    x = load_csv(path, g)
    assert np.allclose(x.values, np.sin(g.points))
    path.write_text("1\n2\n")
    with pytest.raises(SpaceError):
        load_csv(path, g)


def test_line_rejects_inadmissible_weight():
    from etj.weights import CarlemanSequence

    w = make_weight("carleman", m_seq=CarlemanSequence.factorial_power(1))
    with pytest.raises(SpaceError):
        LineGrid(4.0, 64, w)
