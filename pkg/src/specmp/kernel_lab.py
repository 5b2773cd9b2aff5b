"""Truncated Helmholtz and Bessel kernels on the torus.

The central object is the partial sum

.. math::

    F_{N,s}(x) = \\sum_{|k|_\\infty \\le N} (1 + 4\\pi^2\\beta|k|^2)^{-s/2} e^{2\\pi i k\\cdot x},

whose case ``s = 2`` is the Helmholtz kernel ``K_N`` of ``(Id - beta Delta)^{-1} Pi_N``.
Its sign and L1 mass decide whether an implicit diffusion step preserves the
maximum of its input.  This module measures those quantities and a few
related scalar constants (the critical exponent of the Bessel family, the
Gamma-ratio integral and the logarithmic 2D integrand).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate, optimize, special
from scipy.fft import next_fast_len

__all__ = [
    "QuadratureError",
    "KernelProfile",
    "ThresholdReport",
    "multipliers",
    "kernel_values",
    "kernel_on_grid",
    "kernel_profile",
    "positivity_threshold",
    "negativity_window",
    "threshold_report",
    "tail_l1_norm",
    "dirichlet_sign_masses",
    "f1",
    "critical_exponent",
    "a_beta",
    "h_s",
    "h_s_infinity",
    "scaled_kernel_limit",
    "discrete_helmholtz_kernel",
    "phi_half",
    "phi_half_slope",
    "appendixA_integrand",
    "appendixA_log_fit",
    "appendixA_constant",
    "second_differences",
    "effective_bound_constants",
    "convex_sequence_tail",
]

TWO_PI = 2.0 * math.pi
ASTRONOMICAL = 2.0**53


class QuadratureError(RuntimeError):
    """Raised when an integral misses its requested accuracy."""


def _check_kernel_args(d, N, beta, s):
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not s > 0:
        raise ValueError(f"s must be positive, got {s}")
    if N < 0:
        raise ValueError("N must be non-negative")


def multipliers(N: int, beta: float, s: float = 2.0, d: int = 1) -> np.ndarray:
    """Fourier multipliers ``c_k = (1 + 4 pi^2 beta |k|^2)^(-s/2)`` for ``|k|_inf <= N``.

    The result has shape ``(2N+1,) * d`` with ``k = -N..N`` along each axis.
    """
    _check_kernel_args(d, N, beta, s)
    k = np.arange(-N, N + 1, dtype=float)
    k2 = sum(np.meshgrid(*([k**2] * d), indexing="ij"))
    return (1.0 + 4 * math.pi**2 * beta * k2) ** (-s / 2)


def kernel_values(x, N: int, beta: float, s: float = 2.0) -> np.ndarray:
    """Evaluate the 1D kernel ``c_0 + 2 sum_{k=1}^N c_k cos(2 pi k x)`` pointwise."""
    x = np.asarray(x, dtype=float)
    c = multipliers(N, beta, s)[N:]
    flat = x.ravel()
    out = np.full(flat.shape, c[0])
    k = np.arange(1, N + 1)
    for start in range(0, flat.size, 2048):
        xs = flat[start:start + 2048, None]
        out[start:start + 2048] += 2.0 * np.cos(TWO_PI * k * xs) @ c[1:]
    return out.reshape(x.shape)


def _kernel_antiderivative(x, N: int, beta: float, s: float = 2.0) -> np.ndarray:
    """``int_0^x`` of the 1D kernel, in closed form."""
    x = np.asarray(x, dtype=float)
    c = multipliers(N, beta, s)[N:]
    k = np.arange(1, N + 1)
    flat = x.ravel()
    out = c[0] * flat
    if N:
        out = out + np.sin(TWO_PI * np.outer(flat, k)) @ (c[1:] / (math.pi * k))
    return out.reshape(x.shape)


def kernel_on_grid(N: int, beta: float, s: float = 2.0, d: int = 1, M: int | None = None) -> np.ndarray:
    """Kernel values on the uniform grid ``j/M`` in every axis, via one inverse FFT."""
    if M is None:
        M = 64 * (2 * N + 1)
    if M < 2 * N + 1:
        raise ValueError("grid too coarse for the kernel band")
    c = multipliers(N, beta, s, d)
    full = np.zeros((M,) * d)
    idx = np.mod(np.arange(-N, N + 1), M)
    full[np.ix_(*([idx] * d))] = c
    return np.real(np.fft.ifftn(full)) * M**d


@dataclass
class KernelProfile:
    """Dense evaluation of a truncated kernel.

    Attributes
    ----------
    samples : ndarray
        Kernel values on the coarse uniform grid (``M`` points per axis).
    min_value, argmin
        Refined minimum and its location (smallest ``x`` wins ties).
    l1_norm, l1_error
        Quadrature estimate of ``int |F|`` and an error estimate.
    positive : bool
        True when the grid minimum minus a derivative bound is positive,
        which certifies positivity on the whole torus.
    """

    d: int
    N: int
    beta: float
    s: float
    M: int
    samples: np.ndarray = field(repr=False)
    grid_min: float
    min_value: float
    argmin: tuple
    l1_norm: float
    l1_error: float
    lipschitz: float
    certificate: float
    positive: bool
    total_mass: float


def _local_minima(values: np.ndarray) -> np.ndarray:
    """Flat indices of periodic local minima (non-strict)."""
    mask = np.ones(values.shape, dtype=bool)
    for ax in range(values.ndim):
        mask &= values <= np.roll(values, 1, axis=ax)
        mask &= values <= np.roll(values, -1, axis=ax)
    return np.flatnonzero(mask)


def _eval_point(point, N, c_full):
    """Kernel value at a single point in any dimension."""
    k = np.arange(-N, N + 1)
    acc = c_full.astype(complex)
    for p in point:
        acc = np.tensordot(np.exp(2j * math.pi * k * p), acc, axes=([0], [0]))
    return float(np.real(acc))


def _refine_minimum(start, h, N, beta, s, c_full):
    """Bounded Brent refinement around a grid minimum, coordinate by coordinate."""
    point = np.array(start, dtype=float)
    d = point.size
    if d == 1:
        res = optimize.minimize_scalar(
            lambda t: kernel_values(np.array([t]), N, beta, s)[0],
            bounds=(point[0] - h, point[0] + h), method="bounded",
            options={"xatol": 1e-13},
        )
        return np.array([res.x % 1.0]), float(res.fun)
    val = _eval_point(point, N, c_full)
    for _sweep in range(3):
        for ax in range(d):
            def f(t, ax=ax):
                p = point.copy()
                p[ax] = t
                return _eval_point(p, N, c_full)

            res = optimize.minimize_scalar(f, bounds=(point[ax] - h, point[ax] + h),
                                           method="bounded", options={"xatol": 1e-12})
            if res.fun < val:
                point[ax] = res.x
                val = float(res.fun)
    return np.mod(point, 1.0), val


def _l1_1d(N, beta, s, x, vals):
    """Exact-up-to-rootfinding ``int_0^1 |F|`` for the 1D kernel."""
    ext_x = np.append(x, 1.0)
    ext_v = np.append(vals, vals[0])
    roots = []
    for i in np.flatnonzero(ext_v[:-1] * ext_v[1:] < 0):
        roots.append(optimize.brentq(lambda t: kernel_values(np.array([t]), N, beta, s)[0],
                                     ext_x[i], ext_x[i + 1], xtol=1e-15))
    pts = np.concatenate(([0.0], np.asarray(roots), [1.0]))
    P = _kernel_antiderivative(pts, N, beta, s)
    pieces = np.abs(np.diff(P))
    l1 = float(pieces.sum())
    # rounding in the antiderivative dominates the error
    err = 1e-14 * (1 + len(roots)) * float(np.abs(multipliers(N, beta, s)).sum())
    return l1, err


def kernel_profile(d: int, N: int, beta: float, s: float = 2.0, refinement: int | None = None) -> KernelProfile:
    """Sample, minimise and integrate the truncated kernel.

    Parameters
    ----------
    d : int
        Dimension, 1 to 3.
    N : int
        Truncation ``|k|_inf <= N``.
    beta : float
        Diffusion-timestep product, ``> 0``.
    s : float
        Bessel exponent; ``s = 2`` is the Helmholtz kernel.
    refinement : int, optional
        Points per band width ``2N+1`` per axis.  Defaults to 64, 16 and 4 in
        dimensions 1, 2 and 3.
    """
    _check_kernel_args(d, N, beta, s)
    if refinement is None:
        refinement = {1: 64, 2: 16, 3: 4}[d]
    M = refinement * (2 * N + 1)
    c_full = multipliers(N, beta, s, d)
    total = float(c_full.sum())
    if N == 0:
        return KernelProfile(d, 0, beta, s, M, np.ones((M,) * d), 1.0, 1.0, (0.0,) * d,
                             1.0, 0.0, 0.0, 1.0, True, 1.0)
    vals = kernel_on_grid(N, beta, s, d, M)
    h = 1.0 / M
    grid_min = float(vals.min())

    k = np.arange(-N, N + 1, dtype=float)
    absk1 = sum(np.meshgrid(*([np.abs(k)] * d), indexing="ij"))
    lip = float(np.sum(TWO_PI * absk1 * c_full))
    certificate = grid_min - lip * h / 2

    cand = _local_minima(vals)
    cand = cand[np.argsort(vals.ravel()[cand], kind="stable")[:5]]
    refined = []
    for flat_idx in cand:
        idx = np.unravel_index(flat_idx, vals.shape)
        start = np.array(idx, dtype=float) * h
        pt, val = _refine_minimum(start, h, N, beta, s, c_full)
        refined.append((val, tuple(float(p) for p in pt)))
    # tie-break toward the smallest coordinates
    refined.sort(key=lambda r: (round(r[0], 14), r[1]))
    min_value, argmin = refined[0]
    min_value = min(min_value, grid_min)

    if d == 1:
        l1, l1_err = _l1_1d(N, beta, s, np.arange(M) * h, vals)
    else:
        l1 = float(np.mean(np.abs(vals)))
        coarse = float(np.mean(np.abs(vals[(slice(None, None, 2),) * d]))) if M % 2 == 0 else l1
        l1_err = abs(l1 - coarse)
    return KernelProfile(d, N, beta, s, M, vals, grid_min, float(min_value), argmin,
                         l1, l1_err, lip, certificate, bool(certificate > 0), total)


class ThresholdValue(NamedTuple):
    value: float
    log_value: float
    astronomically_large: bool


def positivity_threshold(beta: float) -> ThresholdValue:
    """``N_0(beta) = e^{1/(2 sqrt beta)} / (2 pi^2 sqrt beta)``, evaluated in log space.

    Values above ``2**53`` are flagged and returned as ``inf``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    rb = math.sqrt(beta)
    log_v = 1.0 / (2 * rb) - math.log(2 * math.pi**2 * rb)
    if log_v > math.log(ASTRONOMICAL):
        return ThresholdValue(math.inf, log_v, True)
    return ThresholdValue(math.exp(log_v), log_v, False)


def negativity_window(beta: float) -> tuple[float, float]:
    """Range ``1/(2 sqrt3 pi sqrt beta) <= N <~ beta^{-1/4} e^{1/(6 sqrt beta)}`` of forced negativity."""
    rb = math.sqrt(beta)
    lo = 1.0 / (2 * math.sqrt(3) * math.pi * rb)
    log_hi = -0.25 * math.log(beta) + 1.0 / (6 * rb)
    hi = math.exp(log_hi) if log_hi < 700 else math.inf
    return lo, hi


@dataclass
class ThresholdReport:
    beta: float
    formula_N0: float
    log_formula_N0: float
    astronomically_large: bool
    empirical_N0: int | None
    window: tuple | None
    scanned: tuple


def threshold_report(beta: float, N_max: int = 64) -> ThresholdReport:
    """Compare the closed-form positivity threshold with a scan ``N = 1..N_max``.

    ``empirical_N0`` is the smallest ``N`` from which every scanned kernel is
    certified positive (None if the last scanned kernel is not).  ``window``
    is the range of scanned ``N`` with a strictly negative refined minimum.
    """
    th = positivity_threshold(beta)
    negative, certified = [], []
    for N in range(1, N_max + 1):
        prof = kernel_profile(1, N, beta)
        if prof.min_value < 0:
            negative.append(N)
        certified.append(prof.positive)
    emp = None
    if certified[-1]:
        emp = N_max
        while emp > 1 and certified[emp - 2]:
            emp -= 1
    window = (min(negative), max(negative)) if negative else None
    return ThresholdReport(beta, th.value, th.log_value, th.astronomically_large, emp, window, (1, N_max))


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------

def _k_inf_1d(x, beta):
    """Poisson-summed full kernel ``(1/(2a)) sum_n e^{-|x+n|/a}`` on [0, 1]."""
    a = math.sqrt(beta)
    denom = -math.expm1(-1.0 / a)
    return (np.exp(-x / a) + np.exp(-(1.0 - x) / a)) / (2 * a * denom)


def _k_inf_antiderivative(x, beta):
    a = math.sqrt(beta)
    denom = -math.expm1(-1.0 / a)
    return 0.5 * (np.exp((x - 1.0) / a) - np.exp(-x / a)) / denom


class TailNorm(NamedTuple):
    value: float
    ratio: float
    truncation_estimate: float
    method: str


def tail_l1_norm(d: int, N: int, beta: float) -> TailNorm:
    """``||K_{>N,beta}||_1`` with the normalised ratio ``r = ||.||_1 (1 + beta N^2) / log(N+2)^d``.

    In 1D the full kernel is the exact periodised exponential, and the integral
    is split at the sign changes of the difference so that each piece is
    integrated in closed form.  For ``d >= 2`` the full kernel is replaced by a
    truncation at ``N_ref = 8N``; ``truncation_estimate`` is the L2 size of the
    discarded modes, which bounds their L1 contribution.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    _check_kernel_args(d, N, beta, 2.0)
    if d == 1:
        M = 64 * (2 * N + 1)
        x = np.linspace(0.0, 0.5, M // 2 + 1)
        diff = _k_inf_1d(x, beta) - kernel_values(x, N, beta)

        def g(t):
            return float(_k_inf_1d(np.array([t]), beta)[0] - kernel_values(np.array([t]), N, beta)[0])

        roots = [optimize.brentq(g, x[i], x[i + 1], xtol=1e-15)
                 for i in np.flatnonzero(diff[:-1] * diff[1:] < 0)]
        pts = np.concatenate(([0.0], roots, [0.5]))
        P = _k_inf_antiderivative(pts, beta) - _kernel_antiderivative(pts, N, beta)
        value = 2.0 * float(np.abs(np.diff(P)).sum())
        est, method = 0.0, "poisson-sum"
    else:
        n_ref = 8 * N
        M = next_fast_len(2 * (2 * n_ref + 1))
        full = kernel_on_grid(n_ref, beta, 2.0, d, M) - kernel_on_grid(N, beta, 2.0, d, M)
        value = float(np.mean(np.abs(full)))
        # L2 mass of the modes beyond N_ref, from the radial integral of c_k^2
        sigma = {2: 2 * math.pi, 3: 4 * math.pi}[d]
        R = n_ref
        est = math.sqrt(sigma * R ** (d - 4) / ((4 - d) * (4 * math.pi**2 * beta) ** 2))
        method = f"truncated at N_ref={n_ref}"
    ratio = value * (1 + beta * N**2) / math.log(N + 2) ** d
    return TailNorm(value, ratio, est, method)


# ---------------------------------------------------------------------------
# Dirichlet kernel sign masses
# ---------------------------------------------------------------------------

class SignMasses(NamedTuple):
    pos_mass: float
    neg_mass: float
    pos_measure: float


def dirichlet_sign_masses(N: int) -> SignMasses:
    """Masses of the positive and negative parts of ``D_N = sum_{|k|<=N} e^{2 pi i k x}``.

    ``D_N`` is positive exactly on the intervals ``(2m, 2m+1)/(2N+1)``, so
    the masses follow from the antiderivative ``x + sum sin(2 pi k x)/(pi k)``.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    k = np.arange(1, N + 1)

    def P(x):
        x = np.asarray(x, dtype=float)
        return x + np.sin(TWO_PI * np.outer(x, k)) @ (1.0 / (math.pi * k))

    m = np.arange(N + 1)
    a = 2 * m / (2 * N + 1)
    b = (2 * m + 1) / (2 * N + 1)
    pos = float(np.sum(P(b) - P(a)))
    measure = float(np.sum(b - a))
    return SignMasses(pos, pos - 1.0, measure)


# ---------------------------------------------------------------------------
# critical exponent of the Bessel family
# ---------------------------------------------------------------------------

def _quad(f, a, b, tol, **kw):
    """``scipy.integrate.quad`` with round-off warnings muted; callers check ``err``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=tol, epsrel=max(tol, 1e-13),
                                  limit=kw.pop("limit", 400), **kw)
    return val, err


def f1(s: float, tol: float = 1e-14) -> float:
    """``f_1(s) = int_0^{3 pi/2} xi^{1-s} sin(xi) d xi``."""
    val, err = _quad(lambda t: t ** (1 - s) * math.sin(t), 0.0, 1.5 * math.pi, tol)
    if err > 1e-11:
        raise QuadratureError(f"f1({s}) quadrature error estimate {err:.3e}")
    return val


class CriticalExponent(NamedTuple):
    s_star: float
    bracket: tuple
    f_low: float
    f_high: float
    iterations: int


def critical_exponent(tol: float = 1e-12) -> CriticalExponent:
    """Root of ``f_1`` in ``(0, 1)`` by certified bisection.

    ``f_1(0) = -1`` and ``f_1(1) = 1``; every bisection step keeps a bracket
    whose endpoint values have opposite signs.
    """
    if tol < 1e-12:
        raise ValueError("tol must be at least 1e-12")
    lo, hi = 0.0, 1.0
    flo, fhi = f1(lo), f1(hi)
    if not (flo < 0 < fhi):
        raise QuadratureError(f"no sign change: f1(0)={flo}, f1(1)={fhi}")
    it = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f1(mid)
        if fm < 0:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
        it += 1
    return CriticalExponent(0.5 * (lo + hi), (lo, hi), flo, fhi, it)


# ---------------------------------------------------------------------------
# A_beta(s)
# ---------------------------------------------------------------------------

class ABeta(NamedTuple):
    value: float
    first_integral: float
    first_integral_closed_form: float
    second_integral: float
    second_term: float


def _first_integral(s: float) -> float:
    """``int_R (<x>^{-s} - |x|^{-s}) dx`` by quadrature."""
    # On (0, 1) substitute x = u^{1/(1-s)} so that |x|^{-s} dx becomes regular.
    p = 1.0 / (1.0 - s)

    def near(u):
        x = u**p
        return p * (u ** (p - 1) * (1 + x * x) ** (-s / 2)) - p

    v1, e1 = _quad(near, 0.0, 1.0, 1e-13)
    v2, e2 = _quad(lambda x: (1 + x * x) ** (-s / 2) - x ** (-s), 1.0, np.inf, 1e-13)
    if e1 + e2 > 1e-9:
        raise QuadratureError(f"first integral error estimate {e1 + e2:.3e}")
    return 2.0 * (v1 + v2)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


def _second_integral(beta: float, s: float) -> float:
    """``int_R <x>^{-s-2} x {x/c} dx`` with ``c = 2 pi sqrt(beta)``.

    After ``x = c u`` and folding the negative half-line the integrand is
    ``g(u) (2{u} - 1)`` on ``u > 0``, smooth on every unit interval.  Unit
    intervals up to ``U`` use 40-point Gauss-Legendre; the rest uses the
    Euler-Maclaurin expansion of ``int_U^inf g(u) 2 B1({u}) du``.
    """
    c = TWO_PI * math.sqrt(beta)
    U = int(max(4000, math.ceil(400.0 / c)))

    def g(u):
        return c * c * u * (1 + (c * u) ** 2) ** (-s / 2 - 1)

    total = 0.0
    v = 0.5 * (_GL_X + 1.0)
    weight = 0.5 * _GL_W * (2 * v - 1.0)
    for start in range(0, U, 20000):
        n = np.arange(start, min(U, start + 20000))[:, None]
        total += float(np.sum(g(n + v) * weight))
    # second derivative of g at U by a central difference on the scale of U
    hstep = 1e-2 * U
    g2 = (g(U + hstep) - 2 * g(U) + g(U - hstep)) / hstep**2
    return total - g(U) / 6.0 + g2 / 360.0


def a_beta(beta: float, s: float) -> ABeta:
    """``A_beta(s)`` with its two parts.

    ``A = int (<x>^{-s} - |x|^{-s}) - s 2 pi sqrt(beta) int <x>^{-s-2} x {x/(2 pi sqrt beta)}``
    where ``{y} = y - floor(y)``.  The first integral is negative and equals
    ``sqrt(pi) Gamma((s-1)/2) / Gamma(s/2)``; the closed form is returned for
    comparison.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not beta > 0:
        raise ValueError("beta must be positive")
    first = _first_integral(s)
    closed = math.sqrt(math.pi) * special.gamma((s - 1) / 2) / special.gamma(s / 2)
    second = _second_integral(beta, s)
    term = s * TWO_PI * math.sqrt(beta) * second
    return ABeta(first - term, first, float(closed), second, term)


# ---------------------------------------------------------------------------
# scaled Bessel kernel near the origin
# ---------------------------------------------------------------------------

def h_s(Y: float, s: float) -> float:
    """``h_s(Y) = int_0^Y t^{-s} cos t dt`` (``0 < s < 1``)."""
    if Y <= 0:
        return 0.0
    p = 1.0 / (1.0 - s)
    # t = u^p turns t^{-s} dt into p du
    val, err = _quad(lambda u: p * math.cos(u**p), 0.0, Y ** (1 - s), 1e-12,
                     limit=2000)
    if err > 1e-8:
        raise QuadratureError(f"h_s quadrature error {err:.3e}")
    return val


def h_s_infinity(s: float) -> float:
    """``h_s(inf)`` through ``s(1+s) int_0^inf t^{-s-2}(1 - cos t) dt``."""
    p = 1.0 / (1.0 - s)
    # (0, 1): substitute t = u^p; integrand t^{-s-2}(1-cos t) ~ t^{-s}/2
    def near_integrand(u):
        if u == 0.0:
            return 0.0
        t = u**p
        return p * u ** (p - 1) * t ** (-s - 2) * 2.0 * math.sin(0.5 * t) ** 2

    near, _ = _quad(near_integrand, 0.0, 1.0, 1e-13)
    far_cos, _ = integrate.quad(lambda t: t ** (-s - 2), 1.0, np.inf, weight="cos", wvar=1.0)
    far = 1.0 / (s + 1) - far_cos
    return s * (1 + s) * (near + far)


class ScaledKernel(NamedTuple):
    finite: float
    limit: float
    difference: float
    bound: float


def scaled_kernel_limit(N: int, beta: float, s: float, y: float) -> ScaledKernel:
    """``N^{-(1-s)} F_{N,s}(y/N)`` next to its ``N -> inf`` limit.

    The limit is ``2 (2 pi sqrt beta)^{-s} (2 pi y)^{-(1-s)} h_s(2 pi y)``.
    ``bound`` is the reference size ``(1 + beta^{-1/2}) N^{-(1-s)}`` of the
    difference.
    """
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    if not y > 0:
        raise ValueError("y must be positive")
    finite = N ** (-(1 - s)) * float(kernel_values(np.array([y / N]), N, beta, s)[0])
    Y = TWO_PI * y
    limit = 2 * (TWO_PI * math.sqrt(beta)) ** (-s) * Y ** (-(1 - s)) * h_s(Y, s)
    bound = (1 + beta**-0.5) * N ** (-(1 - s))
    return ScaledKernel(finite, limit, finite - limit, bound)


# ---------------------------------------------------------------------------
# discrete (collocation) Helmholtz kernel
# ---------------------------------------------------------------------------

@dataclass
class NodeKernel:
    N: int
    nu: float
    tau: float
    beta: float
    values: np.ndarray = field(repr=False)
    min_value: float
    argmin: int
    l1_mass: float
    positive: bool
    formula_threshold: float
    above_threshold: bool


def discrete_helmholtz_kernel(N: int, nu: float, tau: float) -> NodeKernel:
    """Node values of the collocation kernel of ``(I - nu^2 tau Delta_h)^{-1}``.

    ``K_h(l/N) = sum_{-N/2<k<=N/2} (1 + beta^2 (2 pi k)^2)^{-1} e^{2 pi i k l/N}``
    with ``beta = nu sqrt(tau)``, so that one implicit step reads
    ``U_new[l] = (1/N) sum_j K_h((l-j)/N) F_j``.
    """
    if N < 2 or N % 2:
        raise ValueError(f"collocation kernel needs an even N >= 2, got N={N}")
    if not (nu > 0 and tau > 0):
        raise ValueError("nu and tau must be positive")
    b = nu * math.sqrt(tau)
    k = np.fft.fftfreq(N, 1.0 / N)
    c = 1.0 / (1.0 + b * b * (TWO_PI * k) ** 2)
    vals = np.real(np.fft.ifft(c)) * N
    log_thr = 1.0 / (2 * b) - math.log(math.pi**2 * b)
    thr = 4.0 + (math.exp(log_thr) if log_thr < 700 else math.inf)
    return NodeKernel(N, nu, tau, b, vals, float(vals.min()), int(np.argmin(vals)),
                      float(np.mean(np.abs(vals))), bool(vals.min() > 0), thr, N >= thr)


def phi_half(N: int, s: float) -> float:
    """``phi_N(1/2) = sum_{-N/2<k<=N/2} (-1)^k / (1 + k^2 s)``."""
    k = np.arange(-N // 2 + 1, N // 2 + 1)
    return float(np.sum((-1.0) ** k / (1 + k * k * s)))


def phi_half_slope(N: int) -> int:
    """Exact ``d/ds phi_N(1/2)`` at ``s = 0``, i.e. ``-sum k^2 (-1)^k``."""
    k = np.arange(-N // 2 + 1, N // 2 + 1)
    return int(-np.sum(k * k * (-1) ** np.abs(k)))


# ---------------------------------------------------------------------------
# logarithmic 2D integrand
# ---------------------------------------------------------------------------

def appendixA_integrand(z: float) -> float:
    """``F(z) = e^{-z} int_0^inf e^{-zt} (t + t^2/2)^{-1/2} dt`` for ``z > 0``.

    With ``t = u^2`` the integrand becomes ``2 e^{-z u^2} (1 + u^2/2)^{-1/2}``,
    which is smooth; the range is split at ``u = 1/sqrt(z)`` where the
    Gaussian starts to cut off.
    """
    if not z > 0:
        raise ValueError("z must be positive")

    def f(u):
        return 2.0 * math.exp(-z * u * u) / math.sqrt(1 + 0.5 * u * u)

    knot = 1.0 / math.sqrt(z)
    pieces = [(0.0, 1.0), (1.0, max(knot, 1.0 + 1e-9))]
    total, err = 0.0, 0.0
    for a, b in pieces:
        # geometric sub-splitting keeps quad accurate on the 1/u decay
        edges = np.geomspace(max(a, 1.0), b, 2 + int(math.log10(max(b / max(a, 1.0), 1.0)) * 4)) if a >= 1.0 else np.array([a, b])
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = _quad(f, lo, hi, 1e-12)
            total += v
            err += e
    v, e = _quad(f, max(knot, 1.0 + 1e-9), np.inf, 1e-12)
    total += v
    err += e
    if err > 1e-8:
        raise QuadratureError(f"F({z}) quadrature error {err:.3e}")
    return math.exp(-z) * total


class LogFit(NamedTuple):
    c1: float
    c2: float
    max_residual: float
    z: np.ndarray


def appendixA_log_fit(z_min: float = 1e-5, z_max: float = 0.25, n: int = 25) -> LogFit:
    """Least-squares fit ``F(z) ~ c1 - c2 log z`` over a log-spaced window."""
    if not 0 < z_min < z_max:
        raise ValueError("need 0 < z_min < z_max")
    z = np.geomspace(z_min, z_max, n)
    F = np.array([appendixA_integrand(float(zz)) for zz in z])
    A = np.column_stack([np.ones_like(z), -np.log(z)])
    (c1, c2), *_ = np.linalg.lstsq(A, F, rcond=None)
    resid = F - A @ np.array([c1, c2])
    return LogFit(float(c1), float(c2), float(np.max(np.abs(resid))), z)


def appendixA_constant() -> tuple[float, float]:
    """``int_0^3 (2t + t^2)^{-1/2} dt`` by quadrature and as ``2 asinh(sqrt(3/2))``."""
    # t = u^2 removes the endpoint singularity
    v, _ = _quad(lambda u: 2.0 / math.sqrt(2 + u * u), 0.0, math.sqrt(3.0), 1e-14)
    return v, 2 * math.asinh(math.sqrt(1.5))


# ---------------------------------------------------------------------------
# convexity bookkeeping and effective bounds
# ---------------------------------------------------------------------------

def second_differences(beta: float, k_max: int) -> tuple[int, np.ndarray]:
    """Second differences ``c_k - 2 c_{k+1} + c_{k+2}`` from the inflection index on.

    Returns the starting index ``ceil(1/(2 sqrt3 pi sqrt beta))`` and the
    differences for ``k = start..k_max``.  The differences are formed from a
    common denominator to avoid cancellation.
    """
    start = max(1, math.ceil(1.0 / (2 * math.sqrt(3) * math.pi * math.sqrt(beta))))
    k = np.arange(start, max(start, k_max) + 1, dtype=float)
    a = 4 * math.pi**2 * beta
    p0, p1, p2 = 1 + a * k**2, 1 + a * (k + 1) ** 2, 1 + a * (k + 2) ** 2
    num = p1 * p2 - 2 * p0 * p2 + p0 * p1
    return start, num / (p0 * p1 * p2)


def effective_bound_constants(s: float, beta: float, Ns: Sequence[int], d: int = 1) -> np.ndarray:
    """``(||F_{N,s}||_1 - 1) / ((1 + beta N^2)^{-s/2} log(N+2)^d)`` for each ``N``."""
    out = []
    for N in Ns:
        prof = kernel_profile(d, N, beta, s)
        out.append((prof.l1_norm - 1.0) / ((1 + beta * N**2) ** (-s / 2) * math.log(N + 2) ** d))
    return np.asarray(out)


def convex_sequence_tail(N: int, alpha: int = 1) -> float:
    """``||G_N - G_inf||_1`` for ``G = sum_k |k|^{-alpha} e^{2 pi i k x}`` (``alpha`` in {1, 2}).

    The full series has closed forms: ``-2 log(2 sin pi x)`` for ``alpha = 1``
    and ``2 pi^2 (x^2 - x + 1/6)`` for ``alpha = 2``.
    """
    if alpha not in (1, 2):
        raise ValueError("alpha must be 1 or 2")
    k = np.arange(1, N + 1)

    def tail(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if alpha == 1:
            full = -2.0 * np.log(2.0 * np.sin(math.pi * x))
        else:
            full = 2 * math.pi**2 * (x * x - x + 1.0 / 6)
        part = 2.0 * np.cos(TWO_PI * np.outer(x, k)) @ (k ** (-float(alpha)))
        return full - part

    x = np.linspace(0.0, 0.5, 64 * (2 * N + 1) + 1)[1:]
    v = tail(x)
    roots = [optimize.brentq(lambda t: tail(t)[0], x[i], x[i + 1], xtol=1e-15)
             for i in np.flatnonzero(v[:-1] * v[1:] < 0)]
    pts = np.concatenate(([0.0], roots, [0.5]))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = _quad(lambda t: tail(t)[0], a, b, 1e-11, limit=200)
        total += abs(val)
    return 2.0 * total
