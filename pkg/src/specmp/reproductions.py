"""Named numerical checks with pass/fail verdicts.

Each check takes a parameter mapping and a seed and returns a
:class:`CheckResult` whose rows are written to CSV by :mod:`specmp.cli_io`.
Default parameters reproduce the published numbers; the shipped configs in
``specmp/configs`` pin them explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernel_lab, schemes, stability_lab

__all__ = ["CheckResult", "CHECKS", "run_check"]


@dataclass
class CheckResult:
    """Tabular output, scalar metrics and the verdict of one check."""

    columns: list
    rows: list
    metrics: dict
    passed: bool
    fits: dict = field(default_factory=dict)


def _p(params, key, default):
    return params.get(key, default)


def check_sstar(params, seed):
    tol = float(_p(params, "tol", 1e-12))
    ce = kernel_lab.critical_exponent(tol)
    lo, hi = float(_p(params, "s_low", 0.308443)), float(_p(params, "s_high", 0.308444))
    f_lo, f_hi = kernel_lab.f1(lo), kernel_lab.f1(hi)
    ok = (lo < ce.s_star < hi and abs(f_lo + 1.92202e-6) <= 1e-9 and abs(f_hi - 5.43492e-7) <= 1e-9)
    rows = [("s_star", ce.s_star), ("f1_low", f_lo), ("f1_high", f_hi)]
    return CheckResult(["quantity", "value"], rows,
                       {"s_star": ce.s_star, "f1_low": f_lo, "f1_high": f_hi, "iterations": ce.iterations}, ok)


def check_tau1(params, seed):
    t = stability_lab.tau1_root()
    margin = stability_lab.tau1_margin(float(_p(params, "eta0", 1e-5)))
    ok = abs(t.root - 0.860018) <= 1e-6 and abs(t.root - t.closed_form) <= 1e-12 and margin.min() >= 0
    rows = [("root", t.root), ("closed_form", t.closed_form), ("residual", t.residual),
            ("min_margin", float(margin.min()))]
    return CheckResult(["quantity", "value"], rows,
                       {"root": t.root, "closed_form": t.closed_form, "min_margin": float(margin.min())}, ok)


_APPENDIX_B = (0.54934, 0.219568, 0.0031275, 0.00413676)
_APPENDIX_C = (0.639093, 0.165881, 0.00883796, 0.00691018, -0.00220351)


def check_appendix_b(params, seed):
    beta = stability_lab.heat_beta(float(_p(params, "k0", 1.0)), 3)
    s3 = float(beta[0] + 2 * beta[1:4].sum())
    ok = bool(np.all(np.abs(beta - _APPENDIX_B) <= 1e-5)) and s3 >= 1.002
    rows = [(j, float(beta[j]), _APPENDIX_B[j]) for j in range(4)]
    return CheckResult(["j", "beta", "reference"], rows, {"sum_abs_j_le_3": s3}, ok)


def check_appendix_c(params, seed):
    beta = stability_lab.resolvent_beta(float(_p(params, "k1", 0.5)), 4)
    s3 = float(abs(beta[0]) + 2 * np.abs(beta[1:4]).sum())
    ok = bool(np.all(np.abs(beta - _APPENDIX_C) <= 1e-5)) and s3 > 1.0023
    rows = [(j, float(beta[j]), _APPENDIX_C[j]) for j in range(5)]
    return CheckResult(["j", "beta", "reference"], rows, {"sum_abs_j_le_3": s3}, ok)


def check_closed_form(params, seed):
    bs = [float(b) for b in _p(params, "b", [0.05, 0.2, 0.5])]
    J = int(_p(params, "J", 400))
    rows, ok = [], True
    for b in bs:
        k0 = 2 * math.sqrt(b) / math.pi
        direct = stability_lab._abs_total(stability_lab.heat_beta(k0, J), -2 * b * math.exp(-b))
        closed = stability_lab.heat_closed_form(b)
        ok &= abs(direct - closed) <= 1e-6
        rows.append((b, direct, closed, direct - closed))
    return CheckResult(["b", "direct", "closed_form", "difference"], rows,
                       {"max_abs_difference": max(abs(r[3]) for r in rows)}, bool(ok))


def check_abeta(params, seed):
    beta = float(_p(params, "beta", 1 / (4 * math.pi**2)))
    s = float(_p(params, "s", 0.3))
    a = kernel_lab.a_beta(beta, s)
    ok = 0.60 <= -a.value <= 1.66
    rows = [("minus_A", -a.value), ("first_integral", a.first_integral),
            ("second_integral", a.second_integral), ("second_term", a.second_term)]
    return CheckResult(["quantity", "value"], rows, {"minus_A": -a.value}, ok)


def check_prop_small_tau(params, seed):
    w = stability_lab.counterexample_prop_small_tau(
        float(_p(params, "delta", 0.05)), float(_p(params, "tau", 0.5)),
        int(_p(params, "N", 2)), float(_p(params, "nu", 1e-3)))
    rows = [("overshoot", w.overshoot), ("threshold", w.threshold)]
    return CheckResult(["quantity", "value"], rows,
                       {"overshoot": w.overshoot, "threshold": w.threshold}, w.overshoot > w.threshold)


def check_tau2(params, seed):
    N = _p(params, "N", None)
    w = stability_lab.counterexample_tau2(float(_p(params, "nu", 0.05)), None if N is None else int(N))
    lo, hi = w.window
    u1 = math.sqrt(2) + w.overshoot
    ok = (lo <= w.N <= hi and w.u0_function_max <= math.sqrt(2) and u1 > math.sqrt(2))
    rows = [("N", w.N), ("delta", w.delta), ("u0_max", w.u0_function_max), ("u1_linf", u1),
            ("u1_origin", w.u1_at_origin), ("linear_prediction", w.linear_prediction)]
    return CheckResult(["quantity", "value"], rows,
                       {"N": w.N, "delta": w.delta, "u1_linf": u1, "window_low": lo, "window_high": hi}, ok)


def check_sharp_collocation(params, seed):
    N, nu, tau = int(_p(params, "N", 8)), float(_p(params, "nu", 1.0)), float(_p(params, "tau", 0.5))
    trials, steps = int(_p(params, "trials", 200)), int(_p(params, "steps", 200))
    rng = np.random.Generator(np.random.Philox(seed))
    data = rng.uniform(-1.0, 1.0, size=(trials, N))
    rows, violations = [], 0
    for i, U in enumerate(data):
        peak = 0.0
        for _ in range(steps):
            U = schemes.ac_collocation_imex_step(U, nu, tau)
            peak = max(peak, float(np.max(np.abs(U))))
        violations += peak > 1.0
        rows.append((i, peak))
    return CheckResult(["trial", "max_linf"], rows, {"violations": int(violations)}, violations == 0)


def check_blowup(params, seed):
    tau = float(_p(params, "tau", 3.0))
    steps = int(_p(params, "steps", 50))
    cfg = schemes.SchemeConfig("allen_cahn", "galerkin_imex", float(_p(params, "nu", 0.1)),
                               int(_p(params, "N", 8)), steps, tau,
                               initial=schemes.InitialData("band_limited_expression", "sqrt(4/9) + 0*x"))
    with np.errstate(all="ignore"):
        diag = schemes.run_scheme(cfg)
    linf = np.where(np.isfinite(diag.linf), diag.linf, np.inf)
    hit = np.nonzero(linf > 1e3)[0]
    first = int(hit[0]) if hit.size else -1
    rows = [(int(n), float(v)) for n, v in zip(diag.step, diag.linf)]
    return CheckResult(["step", "linf"], rows, {"first_step_above_1e3": first}, 0 < first <= steps)


def check_energy(params, seed):
    taus = [float(t) for t in _p(params, "tau", [0.1, 0.5, 0.86])]
    N, steps, nu = int(_p(params, "N", 256)), int(_p(params, "steps", 500)), float(_p(params, "nu", 0.02))
    expr = str(_p(params, "initial", "1.29*sin(2*pi*x)"))
    rows, ok = [], True
    for tau in taus:
        cfg = schemes.SchemeConfig("allen_cahn", "galerkin_imex", nu, N, steps, tau,
                                   initial=schemes.InitialData("band_limited_expression", expr))
        d = schemes.run_scheme(cfg)
        inc = float(np.max(np.diff(d.energy)))
        bad = int(np.sum(np.diff(d.energy) > 1e-12))
        ok &= bad == 0 and d.linf[0] <= 1.29 + 1e-12
        rows.append((tau, float(d.linf[0]), inc, bad))
    return CheckResult(["tau", "u0_linf", "max_energy_increase", "increases"], rows,
                       {"violations": int(sum(r[3] for r in rows))}, bool(ok))


_MARGIN_REGIMES = {
    "galerkin_imex": (0.01, 0.1),
    "collocation_imex": (0.002, 0.5),
    "strang": (0.002, 0.5),
}


def check_margins(params, seed):
    Ns = [int(n) for n in _p(params, "N", [128, 256, 512])]
    steps = int(_p(params, "steps", 20))
    expr = str(_p(params, "initial", "clip(1.5*sin(2*pi*x),-1,1)"))
    rows, fits, ok = [], {}, True
    for scheme, (nu, tau) in _MARGIN_REGIMES.items():
        margins = []
        for N in Ns:
            cfg = schemes.SchemeConfig("allen_cahn", scheme, nu, N, steps, tau,
                                       initial=schemes.InitialData("band_limited_expression", expr))
            m = float(schemes.run_scheme(cfg).margin.max())
            margins.append(m)
            rows.append((scheme, nu, tau, N, m))
        if min(margins) > 0:
            fit = schemes.fit_loglog(Ns, margins)
        else:
            fit = {"slope": float("nan"), "intercept": float("nan"), "r2": float("nan")}
        fits[scheme] = fit
        ok &= fit["slope"] <= -0.25
    return CheckResult(["scheme", "nu", "tau", "N", "margin"], rows, {}, bool(ok), fits)


def _burgers_overshoot(N, tau, nu, T, expr):
    cfg = schemes.SchemeConfig("burgers", "galerkin_euler", nu, N, int(round(T / tau)), tau,
                               initial=schemes.InitialData("band_limited_expression", expr))
    return float(schemes.run_scheme(cfg).linf[1:].max() - 1.0)


_NSE_SMOOTH = "(sin(2*pi*x)+0.8*cos(2*pi*(2*y+x))+0.6*sin(2*pi*(x-y)+1))"
_NSE_ROUGH = "clip(1.5*sin(2*pi*x),-1,1)+clip(1.5*sin(2*pi*y),-1,1)"


def _nse_overshoot(N, tau, steps, expr, fmax):
    cfg = schemes.SchemeConfig("nse2d", "galerkin_euler", 1.0, N, steps, tau, d=2,
                               initial=schemes.InitialData("band_limited_expression", expr))
    with np.errstate(all="ignore"):
        return float(schemes.run_scheme(cfg).linf[1:].max() - fmax)


def _dense_max(expr, n=1024):
    x = np.arange(n) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    return float(np.max(np.abs(schemes._eval_expression(expr, X, Y))))


def check_burgers_nse(params, seed):
    """Overshoot above the data bound on an ``N`` axis and a ``tau`` axis for both equations."""
    clip = "clip(1.5*sin(2*pi*x),-1,1)"
    rows, fits = [], {}
    bN = [int(n) for n in _p(params, "burgers_N", [64, 128, 256])]
    bt = [float(t) for t in _p(params, "burgers_tau", [1e-3, 2e-3, 4e-3, 8e-3])]
    nu = float(_p(params, "burgers_nu", 0.07))
    series = {
        "burgers_N": (bN, [_burgers_overshoot(N, 1e-4, nu, 0.2, clip) for N in bN]),
        "burgers_tau": (bt, [_burgers_overshoot(64, t, nu, 0.2, clip) for t in bt]),
    }
    nN = [int(n) for n in _p(params, "nse_N", [16, 32, 64])]
    nt = [float(t) for t in _p(params, "nse_tau", [3.8e-4, 4.0e-4, 4.2e-4, 4.4e-4])]
    amp = float(_p(params, "nse_amplitude", 800.0))
    smooth = f"{amp}*{_NSE_SMOOTH}"
    fmax = _dense_max(smooth)
    series["nse_N"] = (nN, [_nse_overshoot(N, 2e-5, 10, _NSE_ROUGH, 2.0) for N in nN])
    series["nse_tau"] = (nt, [_nse_overshoot(16, t, int(round(0.004 / t)), smooth, fmax) / amp for t in nt])
    ok = True
    for name, (xs, ys) in series.items():
        for x, y in zip(xs, ys):
            rows.append((name, x, y))
        if min(ys) > 0:
            fits[name] = schemes.fit_loglog(xs, ys)
            want_negative = name.endswith("_N")
            ok &= (fits[name]["slope"] < 0) if want_negative else (fits[name]["slope"] > 0)
        else:
            fits[name] = {"slope": float("nan"), "intercept": float("nan"), "r2": float("nan")}
            ok = False
    return CheckResult(["series", "x", "overshoot"], rows, {}, bool(ok), fits)


def check_kernel_bands(params, seed):
    rows, metrics, ok = [], {}, True
    for d, nmax, beta in ((1, int(_p(params, "N_max_1d", 256)), 1.0), (2, int(_p(params, "N_max_2d", 64)), 1.0)):
        ratios = []
        for N in range(2, nmax + 1):
            t = kernel_lab.tail_l1_norm(d, N, beta)
            ratios.append(t.ratio)
            rows.append((d, N, beta, t.value, t.ratio))
        band = max(ratios) / min(ratios)
        metrics[f"band_d{d}"] = band
        ok &= band <= 25.0
    return CheckResult(["d", "N", "beta", "tail_l1", "ratio"], rows, metrics, bool(ok))


def check_strang_order(params, seed):
    N, nu, T = int(_p(params, "N", 32)), float(_p(params, "nu", 0.05)), float(_p(params, "T", 0.5))
    x = np.arange(N) / N
    U0 = 0.9 * np.sin(2 * np.pi * x) + 0.3 * np.cos(6 * np.pi * x)
    ref = schemes.ac_collocation_ode_integrate(U0, nu, T, [0.0, T], rtol=1e-12, atol=1e-13).states[-1]
    rows = []
    for m in [int(v) for v in _p(params, "steps", [20, 40, 80, 160, 320])]:
        U = U0.copy()
        for _ in range(m):
            U = schemes.ac_strang_step(U, nu, T / m)
        rows.append((T / m, float(np.max(np.abs(U - ref)))))
    fit = schemes.fit_loglog([r[0] for r in rows], [r[1] for r in rows])
    return CheckResult(["tau", "error"], rows, {}, abs(fit["slope"] - 2.0) <= 0.1, {"strang": fit})


def check_adversarial(params, seed):
    rows, ok = [], True
    for mode in ("heat", "resolvent"):
        for N in [int(n) for n in _p(params, "N", [128, 256, 512, 1024])]:
            a = stability_lab.adversarial_data(N, mode)
            ok &= a.achieved >= 1.001 and np.max(np.abs(a.values)) <= 1.0
            rows.append((mode, N, a.witness, a.predicted, a.achieved))
    return CheckResult(["mode", "N", "witness", "predicted", "achieved"], rows,
                       {"min_achieved": min(r[4] for r in rows)}, bool(ok))


CHECKS: dict[str, Callable] = {
    "sstar": check_sstar,
    "tau1": check_tau1,
    "appendix_b": check_appendix_b,
    "appendix_c": check_appendix_c,
    "closed_form": check_closed_form,
    "abeta": check_abeta,
    "prop_small_tau": check_prop_small_tau,
    "tau2": check_tau2,
    "sharp_collocation": check_sharp_collocation,
    "blowup": check_blowup,
    "energy": check_energy,
    "margins": check_margins,
    "burgers_nse": check_burgers_nse,
    "kernel_bands": check_kernel_bands,
    "strang_order": check_strang_order,
    "adversarial": check_adversarial,
}


def run_check(name: str, params: dict | None = None, seed: int = 0) -> CheckResult:
    if name not in CHECKS:
        raise KeyError(f"unknown check {name!r}")
    return CHECKS[name](params or {}, seed)
