import json
import math

import numpy as np
import pytest
from scipy import integrate

from etj.kernels import (
    KernelError,
    KernelSpec,
    SincProduct,
    build_kernel,
    certify_bounds,
    compute_ak,
    eval_scaled,
    export_kernel,
    fejer_kernel,
    fejer_normalizer,
    fejer_transform_exact,
    kernel_transform,
    select_Q,
)
from etj.weights import LogWeight, make_weight


# -- Q rule and a_k -----------------------------------------------------------


def test_constant_weight_rejected():
    with pytest.raises(KernelError):
        select_Q(LogWeight(make_weight("constant")), 64)


def test_inadmissible_weight_rejected():
    from etj.weights import CarlemanSequence

    w = make_weight("carleman", m_seq=CarlemanSequence.factorial_power(1))
    with pytest.raises(KernelError):
        select_Q(LogWeight(w), 64)


def test_q_rule_for_sqrt_weight():
    beta = LogWeight(make_weight("exp_power", beta_exp=0.5))
    N = 2048
    sel = select_Q(beta, N)
    k = np.arange(1, N + 1)
    c = np.sqrt(k) / k**2
    assert np.all(sel.Q > 1)
    assert np.all(np.diff(sel.Q) >= 0)
    assert sel.Q[-1] == pytest.approx(sel.R[-1] ** -0.5)
    assert sel.Q[-1] > 4
    # telescoping: sum c_k Q_k <= (1+delta) sum c_k + 2 sqrt(R_1)
    assert np.sum(c * sel.Q) <= 1.1 * np.sum(c) + 2 * math.sqrt(sel.R[0])
    assert sel.R[0] == pytest.approx(np.sum(c) + 2 / math.sqrt(N), rel=1e-12)


def test_ak_formula_and_scaling():
    beta = LogWeight(make_weight("exp_power", beta_exp=0.5))
    sel = select_Q(beta, 256)
    a = compute_ak(beta, sel.Q, sel.S, 256)
    k = np.arange(1, 257)
    assert np.allclose(a, k**-1.5 * sel.Q / sel.S, rtol=1e-14)
    assert np.allclose(compute_ak(beta, sel.Q, 2 * sel.S, 256), a / 2, rtol=1e-15)


@pytest.mark.parametrize("params", [dict(M=1, k=3), dict(M=2, k=1), dict(M=1, k=6)])
def test_ak_partial_sum_window(params):
    beta = LogWeight(make_weight("polynomial", **params))
    sel = select_Q(beta, 1024)
    a = compute_ak(beta, sel.Q, sel.S, 1024)
    assert np.all(a > 0)
    total = a.sum()
    assert 0.9 < total <= 1.0
    assert total >= 1 - sel.tail_bound / sel.S - 1e-15


def test_ak_partial_sum_sqrt_weight_below_ninety_percent():
    # slow tail sum_{k>N} k^-3/2 ~ 2/sqrt(N): with N=1024 the partial sum stays near 0.85
    beta = LogWeight(make_weight("exp_power", beta_exp=0.5))
    sel = select_Q(beta, 1024)
    total = compute_ak(beta, sel.Q, sel.S, 1024).sum()
    assert total == pytest.approx(1 - sel.tail_bound / sel.S, rel=1e-12)
    assert 0.8 < total < 0.9


# -- product evaluation --------------------------------------------------------


def test_product_log_space_matches_direct():
    rng = np.random.default_rng(0)
    a = np.sort(rng.uniform(1e-4, 0.3, 60))[::-1]
    prod = SincProduct(a)
    t = np.concatenate([[0.0, 1e-8], rng.uniform(-200, 200, 500)])
    direct = np.prod(np.sinc(a[None, :] * t[:, None] / (2 * np.pi)) ** 2, axis=1)
    mask = direct > 1e-250
    assert np.allclose(prod(t)[mask], direct[mask], rtol=1e-11, atol=0)


def test_product_derivatives_match_finite_differences():
    prod = SincProduct(np.array([0.4, 0.25, 0.1, 0.05, 0.01]))
    t = np.array([-7.3, 0.0, 0.9, 12.5, 40.0])
    h = 1e-3
    d1 = (prod(t + h) - prod(t - h)) / (2 * h)
    d2 = (prod(t + h) - 2 * prod(t) + prod(t - h)) / h**2
    assert np.allclose(prod.derivative(t, 1), d1, rtol=1e-5, atol=1e-10)
    assert np.allclose(prod.derivative(t, 2), d2, rtol=1e-4, atol=1e-9)


def test_sinc_square_derivatives_closed_form():
    # f(t) = sinc^2(t/2): f'(t) at t = 2 by the quotient rule
    prod = SincProduct(np.array([1.0]))
    t = 2.0
    u = 1.0
    s = math.sin(u) / u
    ds = (u * math.cos(u) - math.sin(u)) / u**2
    assert prod.derivative(np.array([t]), 1)[0] == pytest.approx(2 * s * ds * 0.5, rel=1e-12)


def test_envelope_bounds_product():
    prod = SincProduct(np.array([0.5, 0.3, 0.1, 0.02]))
    t = np.linspace(0.1, 400, 4000)
    assert np.all(prod.log_abs(t) <= prod.envelope_log(t) + 1e-12)


# -- the kernel ------------------------------------------------------------------


def test_kernel_invariants(cubic_kernel):
    K = cubic_kernel
    assert K(np.array([0.0]))[0] == pytest.approx(1.0 / K.l1_norm, rel=1e-15)
    t = np.linspace(-K.t_quad, K.t_quad, 100_001)
    v = K(t)
    assert v.min() >= -1e-14
    assert np.array_equal(v, K(-t))
    assert abs(K.mass_check()) < 1e-8
    assert 0 < K.partial_sum_a <= 1
    assert K.truncation_tail < 1e-10 * K.l1_norm


def test_kernel_mass_by_scipy_quad(cubic_kernel):
    K = cubic_kernel
    edges = np.linspace(0, K.t_quad, 201)
    total = sum(integrate.quad(lambda s: K(np.array([s]))[0], a, b, epsabs=1e-14, limit=200)[0]
                for a, b in zip(edges, edges[1:]))
    assert 2 * total == pytest.approx(1.0, abs=1e-8)


def test_build_rejects_small_nprod():
    with pytest.raises(KernelError):
        KernelSpec(make_weight("polynomial", M=1, k=3), n_prod=4)


def test_build_rejects_short_window():
    with pytest.raises(KernelError):
        build_kernel(KernelSpec(make_weight("polynomial", M=1, k=3), t_quad=20.0))


@pytest.mark.parametrize("r", [0.5, 2.0, 7.0])
def test_scaled_kernel(cubic_kernel, r):
    K = cubic_kernel
    t = np.linspace(-3, 3, 13)
    assert np.allclose(eval_scaled(K, r, t), r * K(r * t))
    assert eval_scaled(K, r, 0.0) == pytest.approx(r * K(np.array([0.0]))[0])
    # trapezoid with step 1/r is exact for the scaled band-limited kernel
    n = int(math.ceil(K.t_quad))
    s = np.arange(-n, n + 1) / r
    assert np.sum(eval_scaled(K, r, s)) / r == pytest.approx(1.0, abs=1e-8)


def test_eval_scaled_rejects_nonpositive(cubic_kernel):
    with pytest.raises(KernelError):
        eval_scaled(cubic_kernel, 0.0, 1.0)


def test_sqrt_weight_kernel():
    K = build_kernel(KernelSpec(make_weight("exp_power", beta_exp=0.5)))
    assert abs(K.mass_check()) < 1e-8
    assert math.isfinite(K.c1)


# -- Fejer kernels ------------------------------------------------------------------


def test_fejer_m1_closed_form(fejer):
    K = fejer[1]
    assert fejer_normalizer(1) == pytest.approx(2 * math.pi, rel=1e-15)
    assert K(np.array([0.0]))[0] == pytest.approx(1 / (2 * math.pi), rel=1e-15)
    t = np.array([0.7, 3.0, 25.0])
    assert np.allclose(K(t), (np.sin(t / 2) / (t / 2)) ** 2 / (2 * math.pi), rtol=1e-13)


@pytest.mark.parametrize("m", [2, 3])
def test_fejer_normalized(fejer, m):
    K = fejer[m]
    # Gauss-Legendre panels on [0, 4000]; the rest is below (2m/T)^(2m) T / (2m-1) / K_m
    x, w = np.polynomial.legendre.leggauss(30)
    edges = np.arange(0.0, 4001.0, 2.0)
    mid, half = (edges[1:] + edges[:-1]) / 2, 1.0
    nodes = (mid[:, None] + half * x[None, :]).ravel()
    val = np.sum(np.tile(w, mid.size) * K(nodes)) * half
    tail = (2 * m / 4000) ** (2 * m) * 4000 / (2 * m - 1) / fejer_normalizer(m)
    assert abs(2 * val - 1.0) < 1e-8 + 2 * tail
    assert K.partial_sum_a == pytest.approx(1.0)


def test_fejer_rejects_bad_m():
    with pytest.raises(KernelError):
        fejer_kernel(0)
    with pytest.raises(KernelError):
        fejer_kernel(1, weight=make_weight("polynomial", M=1, k=3))


@pytest.mark.parametrize("m", [1, 2])
def test_fejer_decay_constant(fejer, m):
    # K(t) alpha(t) <= (M/K_m)(1 + 2m/r)^(2m) with M = 1
    K = fejer[m]
    for r in (1.0, 2.0, 4.0):
        c = certify_bounds(K, r, 0).constant(0)
        assert c <= (1 + 2 * m / r) ** (2 * m) / fejer_normalizer(m)


# -- certification ------------------------------------------------------------------


def test_certification_rows(cubic_kernel):
    K = cubic_kernel
    reps = [certify_bounds(K, r, 4) for r in (1.0, 2.0, 4.0)]
    for rep in reps:
        assert [row["n"] for row in rep.rows] == [0, 1, 2, 3, 4]
        assert all(math.isfinite(row["c_hat"]) and row["c_hat"] > 0 for row in rep.rows)
        assert not any(row["unstable"] for row in rep.rows)
    # n = 0 at t = 0 reduces to r K(0) / r
    at0 = certify_bounds(K, 2.0, 0, t_grid=[0.0]).constant(0)
    assert at0 == pytest.approx(K(np.array([0.0]))[0], rel=1e-14)


def test_certification_limits(cubic_kernel):
    with pytest.raises(KernelError):
        certify_bounds(cubic_kernel, 1.0, 13)


def test_c1_is_decay_sup(cubic_kernel):
    K = cubic_kernel
    t = np.linspace(0, K.t_quad, 200_001)
    assert np.max(K(t) * (1 + t) ** 3) <= K.c1 * (1 + 1e-9)


def test_fejer_and_sinc_product_pass_same_certification(cubic_kernel):
    # alpha = (1+|t|)^3 <= (1+|t|)^4: both constructions apply
    w = make_weight("polynomial", M=1, k=3)
    F = fejer_kernel(2, weight=w)
    for K in (cubic_kernel, F):
        t = np.linspace(-K.t_quad, K.t_quad, 100_001)
        assert K(t).min() >= -1e-14
        for r in (1.0, 2.0, 4.0):
            rep = certify_bounds(K, r, 3)
            assert all(math.isfinite(row["c_hat"]) for row in rep.rows)


# -- transforms ---------------------------------------------------------------------


def test_transform_total_mass(cubic_kernel):
    assert kernel_transform(cubic_kernel, 3.0, np.array([0.0]))[0] == pytest.approx(1.0, abs=1e-8)


def test_transform_band_limit(cubic_kernel):
    K = cubic_kernel
    for r in (1.0, 4.0):
        xi = np.linspace(-2 * r, 2 * r, 401)
        F = kernel_transform(K, r, xi)
        outside = np.abs(xi) > 1.05 * r * K.partial_sum_a
        assert np.max(np.abs(F[outside])) < 1e-6 * F[200]
        assert np.max(np.abs(F[np.abs(xi) >= 1.5 * r])) < 1e-6


def test_fejer_transform_triangle(fejer):
    xi = np.linspace(-2, 2, 81)
    tri = np.clip(1 - np.abs(xi), 0, None)
    assert np.allclose(fejer_transform_exact(1, xi), tri, atol=1e-15)
    assert np.allclose(kernel_transform(fejer[1], 1.0, xi), tri, atol=1e-15)


@pytest.mark.parametrize("m", [2, 3])
def test_fejer_transform_quadrature_vs_spline(fejer, m):
    xi = np.linspace(-1.5, 1.5, 61)
    quad = kernel_transform(fejer[m], 1.0, xi, method="quadrature")
    assert np.allclose(quad, fejer_transform_exact(m, xi), atol=1e-10)


def test_periodized_multiplier_matches_transform(cubic_kernel):
    K = cubic_kernel
    for r, n in ((4.0, 1), (8.0, 2), (2.5, 3)):
        mult = K.periodized_multiplier(256, r, n)
        m = np.rint(np.fft.fftfreq(256, 1 / 256))
        ref = kernel_transform(K, 1.0, n * m / r)
        assert np.allclose(mult, ref, atol=1e-9)


def test_export(cubic_kernel, tmp_path):
    K = cubic_kernel
    export_kernel(K, tmp_path / "k.csv", tmp_path / "k.json", t=np.linspace(-5, 5, 11),
                  certification=[certify_bounds(K, 1.0, 1)])
    lines = (tmp_path / "k.csv").read_text().splitlines()
    assert lines[0] == "t,K" and len(lines) == 12
    meta = json.loads((tmp_path / "k.json").read_text())
    assert meta["partial_sum_a"] == pytest.approx(K.partial_sum_a)
    assert meta["l1_norm_f"] == pytest.approx(K.l1_norm)
    assert meta["certification"][0]["rows"][0]["n"] == 0
