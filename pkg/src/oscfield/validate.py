"""Oracle comparisons and property checks run by ``oscfield validate``."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, List

import numpy as np

from . import early, late, oracles, specfun, twin
from .core import CovarianceMatrix, SystemParams, linear_entropy, purity, von_neumann_entropy
from .quad import IntegrandHints, integrate


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    deviation: float
    passed: bool
    note: str = ""

    def as_dict(self) -> dict:
        return asdict(self)


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def _check(name, tol, fn: Callable[[], float], note="") -> CheckResult:
    try:
        dev = float(fn())
    except Exception as exc:  # a crash is a failed check, reported not raised
        return CheckResult(name, tol, math.inf, False, f"{type(exc).__name__}: {exc}")
    return CheckResult(name, tol, dev, bool(dev <= tol), note)


P0 = SystemParams()


def _gamma0_points():
    return max(_rel(specfun.gamma0(1.0), oracles.e1_series(1.0)),
               _rel(specfun.gamma0(1j), oracles.gamma0_imag_oracle(1.0)),
               _rel(specfun.gamma0(5j), oracles.gamma0_imag_oracle(5.0)))


def _gamma0_overlap():
    zs = [r * np.exp(1j * a) for r in np.geomspace(3.5, 4.5, 7) for a in np.linspace(0, np.pi / 2, 5)]
    return max(_rel(specfun.gamma0_series(z), specfun.gamma0_cf(z)) for z in zs)


def _entropy_examples():
    return max(abs(purity(CovarianceMatrix(0.1, 2.6, 0.1)) - 1.0),
               abs(von_neumann_entropy(0.5) - (0.5 * math.log(3) - math.log(2 / 3))),
               abs(linear_entropy(CovarianceMatrix(0.1, 5 / 2)).linear_entropy))


def _quad_lorentzian():
    g, W = 0.02, P0.omega_tilde
    r = integrate(lambda x: g / ((x - W) ** 2 + g * g), 0, 100 * W,
                  IntegrandHints((W,), g), rel_tol=1e-12)
    exact = math.atan((100 * W - W) / g) + math.atan(W / g)
    return _rel(r.value, exact)


def _mode_functions():
    p, W = P0, P0.omega_tilde
    h, T = 1e-3, 10 / W
    ts, Y = oracles.oscillator_rk4(p.omega_r, p.gamma, [1, -1j * p.omega_r], T, h)
    q, qd = early.q_homogeneous(ts, p)
    dev = max(np.abs(Y[:, 0] - q).max(), np.abs(Y[:, 1] - qd).max())
    ts, Y = oracles.oscillator_rk4(p.omega_r, p.gamma, [0, 1], T, h)
    G, Gd = early.retarded_kernel(ts, p)
    dev = max(dev, np.abs(Y[:, 0] - G).max(), np.abs(Y[:, 1] - Gd).max())
    om = 5.0
    ts, Y = oracles.oscillator_rk4(p.omega_r, p.gamma, [0, 0], T, h,
                                   force=lambda t: p.coupling / p.mass * np.exp(-1j * om * t))
    q, qd = early.q_plus_zeroth(ts, om, 1.0, p)
    return max(dev, np.abs(Y[:, 0] - q).max(), np.abs(Y[:, 1] - qd).max())


def _reflection():
    p = P0
    L = p.distance
    h = L / 2000
    ts, Y = oracles.delay_oscillator_rk4(p.omega_r, p.gamma, -2 * p.gamma / L, L,
                                         [1, -1j * p.omega_r], 3 * L, h)
    qh, _ = early.q_homogeneous(ts, p)
    dev = 0.0
    for t in np.linspace(L, 3 * L, 21):
        i = int(round(t / h))
        r = early.reflection_series(t, 1, p)
        dev = max(dev, abs(Y[i, 0] - qh[i] - r.values[0]))
    return dev


def _weight_identity():
    w = np.linspace(0, 200, 1000)
    L = 2.0
    lhs = early.spectral_weight_half(w, L, "paper")
    rhs = 0.25 * 2 * early.free_self_weight(w) - 0.5 * early.free_self_weight(w) * specfun.sinc(w * L)
    return float(np.max(np.abs(lhs - rhs)))


def _angular_oracle():
    L = 2.0
    return max(_rel(early.spectral_weight_half(w, L, "reduced"), oracles.angular_weight_half(w, L))
               for w in (0.3, 1.0, 5.0, 12.0))


def _image_identity():
    t = 4.0
    h = early.correlators_v(t, P0, convention="paper", rel_tol=1e-11)
    tw = twin.twin_correlators_v(t, P0, "opposite", rel_tol=1e-11)
    comb = (tw.self_qq / 2 + tw.cross_qq / 2, tw.self_pp / 2 + tw.cross_pp / 2,
            tw.self_qp / 2 + tw.cross_qp / 2)
    return _rel(h, comb)


def _free_closed_form():
    v = late.v_late_exact("free", P0)
    c = late.v_late_closed_form_free(P0, form="large_cutoff")
    return max(_rel(v.vqq, c.vqq), _rel(v.vpp, c.vpp) / 100)   # PP tolerance is 100x looser


def _fdt_routes():
    a = late.v_late_exact("free", P0)
    b = late.v_late_noise_route(P0, "free")
    return max(_rel(a.vqq, b.vqq), _rel(a.vpp, b.vpp))


def _fdt_pointwise():
    w = np.array([1.0, 4.9, 5.0, 5.1, 20.0])
    G = late.green_free(w, P0)
    scale = np.abs(np.imag(G)) / (2 * w * P0.mass)
    return float(np.max(np.abs(late.fdt_identity_residual(w, P0)) / scale))


def _delta_v_consistency():
    dev = 0.0
    for x in (2.0, 10.0, 50.0):
        p = P0.replace(gamma=0.002, distance=x / P0.omega_r)
        cf = late.delta_v(p, "closed_form")
        qd = late.delta_v(p, "quadrature")
        dev = max(dev, _rel(cf[0], qd[0]), _rel(cf[1], qd[1]))
    return dev


def _delta_s_consistency():
    p = P0.replace(gamma=0.002)
    free = linear_entropy(late.v_late_exact("free", p)).linear_entropy
    half = linear_entropy(late.v_late_exact("half_space", p)).linear_entropy
    ds = late.delta_s_linear(p)
    return abs(half - free - ds) / (10 * p.gamma / p.omega_tilde * abs(ds))


def _geometry_limit():
    p = P0.replace(distance=1e5)
    return abs(late.s_late(p, "half_space").linear_entropy - late.s_late(p, "free").linear_entropy)


def _perturbative():
    p = P0
    v = late.v_late_exact("free", p)
    w = late.v_free_perturbative(p)
    res = max(_rel(w.vqq, v.vqq), _rel(w.vpp, v.vpp))
    return res / (5 * (p.gamma / p.omega_tilde) ** 2)


def _twin_mode():
    w = np.array([1.0, 4.9, 5.0, 7.3])
    qb, qa = twin.twin_late_mode_functions(w, 1.7, P0)
    ref = twin.sum_mode_response(w, 1.7, P0)
    return float(np.max(np.abs((qb + qa) / 2j - ref) / np.abs(ref)))


def _free_correction():
    return max(twin.first_order_free_correction(P0.replace(distance=L)).relative_difference
               for L in (2.0, 5.0, 10.0))


def _delta_s_sign():
    Ls = np.geomspace(0.5, 100, 40)
    ds = np.array([late.delta_s_linear(P0.replace(distance=L)) for L in Ls])
    bad = int(np.sum(ds >= 0)) + int(np.sum(np.diff(ds) <= 0))
    return bad


CHECKS = [
    ("gamma0 vs series and Ci/Si oracles", 1e-12, _gamma0_points),
    ("gamma0 series/continued-fraction overlap", 1e-10, _gamma0_overlap),
    ("purity and entropy examples", 1e-14, _entropy_examples),
    ("quadrature vs arctan antiderivative", 1e-10, _quad_lorentzian),
    ("mode functions vs RK4", 1e-7, _mode_functions),
    ("first echo vs delay-ODE RK4", 1e-4, _reflection),
    ("half-space weight identity", 1e-14, _weight_identity),
    ("reduced weight vs angular mode sum", 1e-10, _angular_oracle),
    ("image identity early vs twin", 1e-9, _image_identity),
    ("free closed form vs quadrature", 1e-6, _free_closed_form),
    ("FDT: Im G route vs noise route", 1e-8, _fdt_routes),
    ("FDT pointwise identity", 1e-12, _fdt_pointwise),
    ("delta V closed form vs quadrature (gamma=0.002)", 1e-3, _delta_v_consistency),
    ("delta S_L vs exact entropy difference (scaled)", 1.0, _delta_s_consistency),
    ("half-space -> free at L=1e5", 1e-8, _geometry_limit),
    ("perturbative free covariance (scaled residual)", 1.0, _perturbative),
    ("twin sum mode equals mirror response", 1e-10, _twin_mode),
    ("delta V_QQ equals twin cross correlator", 1e-3, _free_correction),
    ("delta S_L negative and increasing (violations)", 0.0, _delta_s_sign),
]


def run_checks(gamma0_corruption: float = 0.0) -> List[CheckResult]:
    """Run every check; ``gamma0_corruption`` scales E1 by ``1 + value`` (canary)."""
    results = []
    with specfun.perturbed(gamma0_corruption):
        for name, tol, fn in CHECKS:
            results.append(_check(name, tol, fn))
    return results


def format_report(results: List[CheckResult]) -> str:
    width = max((len(r.name) for r in results), default=0)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status}  {r.name:<{width}}  deviation={r.deviation:.3e}  tolerance={r.tolerance:.1e}"
        if r.note:
            line += f"  ({r.note})"
        lines.append(line)
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} checks passed")
    return "\n".join(lines)
