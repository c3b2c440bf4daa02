import math
import warnings

import numpy as np
import pytest

from oscfield import late
from oscfield.core import DomainError, SystemParams, linear_entropy

P = SystemParams()


def test_green_free_values():
    assert late.green_free(0.0, P) == pytest.approx(1 / 25, rel=1e-15)
    w = np.geomspace(1e3, 1e5, 5)
    assert np.allclose(np.abs(late.green_free(w, P)) * w ** 2, 1, rtol=1e-4)
    scan = np.linspace(4.9, 5.1, 200001)
    peak = scan[np.argmax(np.abs(late.green_free(scan, P)))]
    assert abs(peak - P.omega_tilde) < P.gamma


def test_green_half_values():
    assert late.green_half(0.0, P) == pytest.approx(1 / (25 + 2 * 0.02 / 2), rel=1e-15)
    far = P.replace(distance=1e6)
    w = np.array([0.5, 4.99, 5.0, 30.0])
    diff = np.abs(late.green_half(w, far) - late.green_free(w, far))
    # The image term shifts G by |G|^2 (2 gamma / L) to first order, which is
    # 1e-6 on resonance at L = 1e6 and 1e-12 only well above resonance.
    assert np.all(diff <= 1.01 * np.abs(late.green_free(w, far)) ** 2 * 2 * 0.02 / 1e6)
    assert diff[3] < 1e-12
    G0 = late.green_free(5.0, P)
    first = G0 + G0 ** 2 * (-2 * 0.02 * np.exp(5j * 2) / 2) * P.mass
    second = abs(late.green_half(5.0, P) - first)
    # Residual is second order in the image term.
    assert second < 5 * abs(G0) ** 3 * (2 * 0.02 / 2) ** 2


def test_green_half_validity_warning():
    with pytest.warns(late.ValidityWarning):
        late.green_half(1.0, P.replace(distance=1e-3))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        late.green_half(1.0, P)


def test_passive_response():
    w = np.linspace(0.01, 100, 2000)
    assert np.all(np.imag(late.green_free(w, P)) > 0)
    assert np.all(np.imag(late.green_half(w, P)) >= 0)


def test_free_exact_vs_closed_forms():
    v = late.v_late_exact("free", P)
    c = late.v_late_closed_form_free(P, form="large_cutoff")
    e = late.v_late_closed_form_free(P, form="exact")
    assert v.vqp == 0
    assert v.vqq == pytest.approx(c.vqq, rel=1e-6)
    assert v.vpp == pytest.approx(c.vpp, rel=1e-4)
    assert v.vqq == pytest.approx(e.vqq, rel=1e-12)
    assert v.vpp == pytest.approx(e.vpp, rel=1e-12)
    assert c.vqq == pytest.approx(math.atan(P.omega_tilde / P.gamma) / (math.pi * P.omega_tilde))


def test_weak_coupling_ground_state():
    p = P.replace(gamma=1e-6)
    v = late.v_late_exact("free", p)
    assert v.vqq == pytest.approx(0.1, rel=1e-4)
    assert v.vpp == pytest.approx(2.5, rel=1e-4)


def test_perturbative_free():
    z = late.v_free_perturbative(P.replace(gamma=0.0))
    assert (z.vqq, z.vpp) == pytest.approx((0.1, 2.5), rel=1e-15)
    v = late.v_late_exact("free", P)
    w = late.v_free_perturbative(P)
    bound = 5 * (P.gamma / P.omega_tilde) ** 2
    assert abs(w.vqq / v.vqq - 1) < bound and abs(w.vpp / v.vpp - 1) < bound


def test_vpp_log_cutoff_slope():
    a = late.v_late_exact("free", P, cutoff=1e4)
    b = late.v_late_exact("free", P, cutoff=1e5)
    slope = (b.vpp - a.vpp) / math.log(10)
    assert slope == pytest.approx(2 * P.mass * P.gamma / math.pi, rel=0.01)
    pa = late.v_free_perturbative(P, cutoff=1e4).vpp
    pb = late.v_free_perturbative(P, cutoff=1e5).vpp
    assert (pb - pa) / math.log(10) == pytest.approx(2 * P.gamma / math.pi, rel=0.01)


def test_vqq_cutoff_stable():
    a = late.v_late_exact("free", P, cutoff=1e3 * 5)
    b = late.v_late_exact("free", P, cutoff=2e3 * 5)
    assert abs(b.vqq - a.vqq) < 1e-8


@pytest.mark.parametrize("L", [0.4, 2.0, 10.0])
def test_half_direct_vs_contour(L):
    p = P.replace(distance=L)
    d = late.v_late_exact("half_space", p, method="direct")
    c = late.v_late_exact("half_space", p, method="contour")
    assert d.vqq == pytest.approx(c.vqq, rel=1e-10)
    assert d.vpp == pytest.approx(c.vpp, rel=1e-9)


def test_frequency_response_objects():
    g = late.response(P, "half_space")
    assert g(5.0) == late.green_half(5.0, P)
    v = late.v_late_exact(g)
    assert v.vqq == pytest.approx(late.v_late_exact("half_space", P).vqq)
    with pytest.raises(ValueError):
        late.FrequencyResponse("box", P)


def test_fdt_two_routes_free_and_half():
    for geom in ("free", "half_space"):
        a = late.v_late_exact(geom, P, method="direct")
        b = late.v_late_noise_route(P, geom)
        assert b.vqq == pytest.approx(a.vqq, rel=1e-8)
        assert b.vpp == pytest.approx(a.vpp, rel=1e-8)


@pytest.mark.parametrize("geom", ["free", "half_space"])
def test_fdt_pointwise(geom):
    w = np.array([1.0, 4.9, 5.0, 5.1, 20.0])
    G = late.FrequencyResponse(geom, P)(w)
    scale = np.imag(G) / (2 * w)
    assert np.all(np.abs(late.fdt_identity_residual(w, P, geom)) <= 1e-12 * np.abs(scale))


def test_damping_from_density_free():
    w = np.array([0.3, 5.0, 40.0])
    re_g = late.damping_from_density(w, late.spectral_density(w, P), P.mass)
    assert np.allclose(re_g, P.gamma, rtol=1e-15)


@pytest.mark.parametrize("x", [2.0, 10.0, 50.0])
def test_delta_v_closed_form_weak_coupling(x):
    p = P.replace(gamma=0.002, distance=x / 5)
    cf = late.delta_v(p)
    qd = late.delta_v(p, "quadrature")
    assert cf[0] == pytest.approx(qd[0], rel=1e-3)
    assert cf[1] == pytest.approx(qd[1], rel=1e-3)


def test_delta_v_closed_form_error_is_first_order_in_gamma():
    # The closed forms are the gamma -> 0 limit of the first-order integrals,
    # so their deviation shrinks in proportion to gamma.
    dev = []
    for g in (0.02, 0.002):
        p = P.replace(gamma=g, distance=2.0)
        cf, qd = late.delta_v(p), late.delta_v(p, "contour")
        dev.append(abs(cf[0] / qd[0] - 1))
    assert dev[1] < dev[0] / 5
    assert dev[0] < 5e-3


def test_delta_v_quadrature_vs_contour():
    p = P.replace(distance=2.0)
    a, b = late.delta_v(p, "quadrature"), late.delta_v(p, "contour")
    assert a[0] == pytest.approx(b[0], rel=1e-8)
    assert a[1] == pytest.approx(b[1], rel=1e-5)


def test_delta_v_asymptotics_and_domain():
    big = [late.delta_v(P.replace(distance=L))[0] for L in (200.0, 400.0)]
    assert big[0] / big[1] == pytest.approx(4.0, rel=0.02)
    assert abs(big[1]) < 1e-9
    assert big[0] == pytest.approx(-2 * P.gamma / (math.pi * 5 ** 4 * 200.0 ** 2), rel=0.01)
    # SystemParams rejects L <= 0 before delta_v sees it.
    with pytest.raises(DomainError):
        late.delta_v(P.replace(distance=0.0))


def test_delta_v_signs_scan():
    # dV_QQ < 0 across the scan; dV_PP comes out positive (see README).
    for x in np.linspace(2, 50, 25):
        dqq, dpp = late.delta_v(P.replace(distance=x / 5))
        assert dqq < 0
        assert dpp > 0


def test_delta_s_linear_negative_increasing():
    Ls = np.geomspace(0.5, 100, 40)
    ds = np.array([late.delta_s_linear(P.replace(distance=L)) for L in Ls])
    assert np.all(ds < 0)
    assert np.all(np.diff(ds) > 0)
    assert abs(ds[-1]) < 1e-4


def test_delta_s_vs_exact_difference():
    p = P.replace(gamma=0.002)
    free = linear_entropy(late.v_late_exact("free", p)).linear_entropy
    half = linear_entropy(late.v_late_exact("half_space", p)).linear_entropy
    ds = late.delta_s_linear(p)
    assert abs(half - free - ds) <= 10 * (p.gamma / p.omega_tilde) * abs(ds)


def test_s_late_geometry_and_coupling():
    for L in (0.5, 2.0, 20.0):
        p = P.replace(distance=L)
        assert late.s_late(p, "half_space").linear_entropy < late.s_late(p, "free").linear_entropy
    far = P.replace(distance=1e5)
    assert abs(late.s_late(far, "half_space").linear_entropy
               - late.s_late(far, "free").linear_entropy) < 1e-8
    # S_L vanishes linearly in gamma, with a ln(Lambda) coefficient.
    s6 = late.s_late(P.replace(gamma=1e-6)).linear_entropy
    s7 = late.s_late(P.replace(gamma=1e-7)).linear_entropy
    # (1 - P near 1e-7 keeps only ~7 significant digits of the quadrature.)
    assert s6 / s7 == pytest.approx(10, rel=1e-2)
    lead = 1e-6 / (math.pi * 5) * (2 * math.log(5e4 / 5) - 2)
    assert s6 == pytest.approx(lead, rel=1e-3)
    assert late.s_late(P.replace(gamma=1e-6, cutoff=500.0)).linear_entropy < 1e-6
    gs = np.linspace(0.005, 0.1, 6)
    s = [late.s_late(P.replace(gamma=g), "half_space").linear_entropy for g in gs]
    assert np.all(np.diff(s) > 0)


def test_qbm_kernels_basic():
    tau = np.array([-2.0, -0.5, 0.0, 0.5, 2.0])
    for geom in ("free", "half_space"):
        k = late.qbm_kernels(tau, P.replace(cutoff=30.0), geom)
        assert k.mu[0] == 0 and k.mu[1] == 0 and k.mu[2] == 0
        assert k.nu[0] == k.nu[4] and k.nu[1] == k.nu[3]


@pytest.mark.parametrize("geom", ["free", "half_space"])
def test_qbm_kernels_vs_quadrature(geom):
    from oscfield.quad import integrate
    from oscfield.specfun import sinc
    p = P.replace(cutoff=40.0)
    lam2 = p.coupling ** 2

    def I(w):
        base = w / (2 * math.pi ** 2)
        return base if geom == "free" else base * (1 - sinc(w * p.distance))

    k = late.qbm_kernels([0.3, 1.7, 2.0, 5.0], p, geom)
    for t, mu, nu in zip(k.tau, k.mu, k.nu):
        rm = integrate(lambda w: lam2 * I(w) * np.sin(w * t), 0, 40.0, rel_tol=1e-12).value
        rn = integrate(lambda w: lam2 * I(w) * np.cos(w * t), 0, 40.0, rel_tol=1e-12).value
        assert mu == pytest.approx(rm, rel=1e-9, abs=1e-9)
        assert nu == pytest.approx(rn, rel=1e-9, abs=1e-9)


def test_spectral_density_geometry_check():
    with pytest.raises(ValueError):
        late.spectral_density(1.0, P, "slab")
