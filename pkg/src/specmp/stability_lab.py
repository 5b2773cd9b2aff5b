"""Scalar stability theory, explicit counterexamples and amplification sums.

The L-infinity behaviour of the IMEX Allen-Cahn step is controlled by the
cubic ``p(x) = f_tau(x) = (1 + tau) x - tau x^3`` and by the L1 mass of the
linear smoothing kernel.  This module evaluates the first exactly and the
second through the discrete heat and resolvent kernels on ``N`` nodes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate, optimize, special

from . import fourier_core as fc
from . import kernel_lab
from .schemes import ac_galerkin_imex_step, f_tau, heat_step, resolvent_step

__all__ = [
    "EnvelopeReport",
    "AmplificationTable",
    "cubic_envelope",
    "prototype_iteration",
    "tau1_root",
    "tau1_margin",
    "counterexample_prop_small_tau",
    "counterexample_tau2",
    "heat_amplification",
    "resolvent_amplification",
    "heat_beta",
    "resolvent_beta",
    "heat_closed_form",
    "bridge_identity",
    "adversarial_data",
    "step_overshoot",
    "modulus_of_continuity",
]


# ---------------------------------------------------------------------------
# cubic envelope
# ---------------------------------------------------------------------------

@dataclass
class EnvelopeReport:
    """``max_{|x| <= alpha} |f_tau(x)|`` with its landmarks."""

    tau: float
    alpha: float
    envelope: float
    critical_point: float
    critical_value: float
    zero: float
    reflection: float
    sampled: float
    attained_at: str


def _critical(tau):
    xc = math.sqrt((1 + tau) / (3 * tau))
    return xc, (2.0 / 3.0) * (1 + tau) ** 1.5 / math.sqrt(3 * tau)


def cubic_envelope(tau: float, alpha: float, samples: int = 100_000) -> EnvelopeReport:
    """Exact envelope of ``|f_tau|`` on ``[-alpha, alpha]``.

    ``f_tau`` is odd, increases up to ``x_c = sqrt((1+tau)/(3 tau))`` and
    decreases afterwards, so the envelope is the larger of ``|f_tau(alpha)|``
    and, when ``x_c <= alpha``, ``f_tau(x_c) = (2/3)(1+tau)^{3/2}/sqrt(3 tau)``.
    ``zero`` is the positive root ``sqrt((1+tau)/tau)`` and ``reflection`` the
    point ``sqrt((2+tau)/tau) = sqrt(1 + 2/tau)`` where ``f_tau(x) = -x``.
    """
    if not (tau > 0 and alpha > 0):
        raise ValueError("tau and alpha must be positive")
    xc, fc_val = _critical(tau)
    end = abs(f_tau(alpha, tau))
    if xc <= alpha and fc_val >= end:
        env, where = fc_val, "critical"
    else:
        env, where = end, "endpoint"
    x = np.linspace(0.0, alpha, samples)
    sampled = float(np.max(np.abs(f_tau(x, tau))))
    return EnvelopeReport(tau, alpha, float(env), xc, fc_val, math.sqrt((1 + tau) / tau),
                          math.sqrt((2 + tau) / tau), sampled, where)


class IterationReport(NamedTuple):
    alphas: np.ndarray
    diverged: bool
    lower_ok: bool
    upper_ok: bool
    upper: np.ndarray


def prototype_iteration(tau: float, eta: float, alpha0: float, n_max: int = 100,
                        blowup: float = 1e150) -> IterationReport:
    """Iterate ``alpha_{k+1} = envelope(tau, alpha_k) + eta``.

    Also checks the sandwich ``1 + eta <= alpha_n <= 1 + theta^n + eta (1 - theta^n)/(1 - theta)``
    with ``theta = 1 - 2 tau`` (meaningful for ``0 < tau <= 1/2`` and ``alpha0 <= 2``).
    """
    if tau < 0 or eta < 0 or not alpha0 > 0:
        raise ValueError("need tau >= 0, eta >= 0 and alpha0 > 0")
    alphas = [float(alpha0)]
    diverged = False
    for _ in range(n_max):
        a = alphas[-1]
        if a > blowup or not math.isfinite(a):
            diverged = True
            break
        with np.errstate(over="ignore"):
            nxt = cubic_envelope(tau, a, samples=2).envelope + eta
        alphas.append(float(nxt))
    if alphas[-1] > blowup or not math.isfinite(alphas[-1]):
        diverged = True
    alphas = np.asarray(alphas)
    n = np.arange(alphas.size)
    theta = 1 - 2 * tau
    if theta != 1:
        upper = 1 + theta**n + eta * (1 - theta**n) / (1 - theta)
    else:
        upper = 1 + theta**n + eta * n
    tol = 1e-12
    lower_ok = bool(np.all(alphas[1:] >= 1 + eta - tol))
    upper_ok = bool(np.all(alphas[1:] <= upper[1:] + tol))
    return IterationReport(alphas, diverged, lower_ok, upper_ok, upper)


# ---------------------------------------------------------------------------
# tau_1
# ---------------------------------------------------------------------------

class Tau1(NamedTuple):
    root: float
    closed_form: float
    residual: float


def _tau1_equation(x):
    return 0.5 + 1.0 / x - 1.5 * _critical(x)[1] ** 2


def tau1_root() -> Tau1:
    """Root in ``(0.5, 1)`` of ``1/2 + 1/x = (3/2) ((2/3)(1+x)^{3/2}/sqrt(3x))^2``.

    Clearing denominators gives ``4 y^3 - 9 y - 9 = 0`` for ``y = 1 + x``,
    whose Cardano root yields the closed form.
    """
    root = optimize.brentq(_tau1_equation, 0.5, 1.0, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    s6 = 3 * math.sqrt(6)
    closed = 0.5 * (-2 + np.cbrt(9 - s6) + np.cbrt(9 + s6))
    return Tau1(root, float(closed), abs(_tau1_equation(root)))


def tau1_margin(eta0: float = 1e-5, lo: float = 0.5, hi: float = 0.86, n: int = 10_000) -> np.ndarray:
    """``1/2 + 1/tau - (3/2) M_b^2`` on a grid, with ``M_b = f_tau(x_c) + eta0``."""
    tau = np.linspace(lo, hi, n)
    mb = (2.0 / 3.0) * (1 + tau) ** 1.5 / np.sqrt(3 * tau) + eta0
    return 0.5 + 1.0 / tau - 1.5 * mb**2


# ---------------------------------------------------------------------------
# counterexamples
# ---------------------------------------------------------------------------

class SmallTauWitness(NamedTuple):
    overshoot: float
    threshold: float
    u1_max: float


def counterexample_prop_small_tau(delta: float = 0.05, tau: float = 0.5, N: int = 2,
                                  nu: float = 1e-3) -> SmallTauWitness:
    """One Galerkin IMEX step from ``u0 = 1 - 2 delta cos^2(2 pi x)``.

    The data are band-limited with ``max u0 = 1``; the step overshoots 1 by
    more than ``(3/8) delta^2``.
    """
    grid = fc.galerkin_grid(N)
    x = grid.nodes()
    u0 = fc.SpectralField.from_values(grid, 1 - 2 * delta * np.cos(2 * np.pi * x) ** 2)
    u1 = ac_galerkin_imex_step(u0, nu, tau)
    mx = float(np.max(u1.sample(max(4096, 64 * (2 * N + 1)))))
    return SmallTauWitness(mx - 1.0, 3 * delta**2 / 8, mx)


@dataclass
class Tau2Witness:
    nu: float
    N: int
    delta: float
    overshoot: float
    linear_prediction: float
    u0_function_max: float
    u1_at_origin: float
    neg_part_l2sq: float
    t_eta_origin_spectral: float
    t_eta_origin_quadrature: float
    pos_pairing: float
    neg_pairing: float
    window: tuple = field(default=())


def counterexample_tau2(nu: float, N: int | None = None, fine: int = 1 << 15,
                        delta0: float = 0.05) -> Tau2Witness:
    """No maximum principle at ``tau = 2`` for kernels with a negative part.

    With ``K_N`` the kernel of ``(1 - 2 nu^2 d_xx)^{-1} Pi_N`` and
    ``eta = -K_N^-``, the data ``u_0 = sqrt2 + delta eta`` satisfy
    ``|u_0| <= sqrt2`` while one IMEX step gives
    ``u^1(0) = -sqrt2 - 9 delta (T eta)(0) + O(delta^2)`` with
    ``(T eta)(0) = int (K_N^-)^2 > 0``.  ``delta`` is halved until the
    measured overshoot is within 50% of the linear prediction.
    """
    beta = 2 * nu * nu
    lo_n = 1.0 / (2 * math.sqrt(3) * math.pi * nu)
    hi_n = nu**-0.5 * math.exp(1.0 / (12 * nu)) if 1.0 / (12 * nu) < 700 else math.inf
    if N is None:
        N = max(1, math.ceil(2 * lo_n))
    x = np.arange(fine) / fine
    K = kernel_lab.kernel_on_grid(N, beta, 2.0, 1, fine)
    Kneg = np.maximum(-K, 0.0)
    if not np.any(Kneg > 0):
        raise ValueError("window mismatch: the kernel has no negative part at this (N, nu)")
    eta = -Kneg
    # Fourier coefficients of eta from dense samples (eta is Lipschitz, aliasing is O(fine^-2))
    eta_hat = np.fft.fft(eta) / fine
    k = np.arange(-N, N + 1)
    c = 1.0 / (1 + 4 * math.pi**2 * beta * k**2)
    t_eta0_spec = float(np.real(np.sum(c * eta_hat[np.mod(k, fine)])))
    t_eta0_quad = float(np.mean(K * eta))  # int K_N(y) eta(y) dy, K even
    pos_pair = float(np.mean(np.maximum(K, 0) * eta))
    neg_pair = float(np.mean(Kneg * eta))
    neg_l2 = float(np.mean(Kneg**2))

    grid = fc.galerkin_grid(N)
    delta = delta0
    for _ in range(40):
        u0_fun = math.sqrt(2) + delta * eta
        coeffs = np.fft.fftshift(np.fft.fft(u0_fun) / fine)[fine // 2 - N: fine // 2 + N + 1]
        u0 = fc.SpectralField.from_coeffs(grid, coeffs)
        u1 = ac_galerkin_imex_step(u0, nu, 2.0)
        u1_0 = float(u1(np.array([0.0]))[0])
        over = fc.linf_norm(u1) - math.sqrt(2)
        lin = 9 * delta * t_eta0_spec
        measured = -u1_0 - math.sqrt(2)
        if measured > 0 and abs(measured - lin) <= 0.5 * abs(lin):
            break
        delta *= 0.5
    return Tau2Witness(nu, N, delta, over, lin, float(u0_fun.max()), u1_0, neg_l2,
                       t_eta0_spec, t_eta0_quad, pos_pair, neg_pair, (lo_n, hi_n))


# ---------------------------------------------------------------------------
# amplification sums
# ---------------------------------------------------------------------------

@dataclass
class AmplificationTable:
    """Discrete L1 mass of a collocation smoothing kernel and its coefficient table."""

    mode: str
    N: int
    nu: float
    t: float
    n: int
    scale: float
    direct: float
    beta: np.ndarray
    table_total: float
    closed_form: float | None
    node_weights: np.ndarray = field(repr=False)


def _cos_coefficient(g, j: int) -> float:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _cos_coefficient_raw(g, j)


def _cos_coefficient_raw(g, j: int) -> float:
    if j == 0:
        val, _ = integrate.quad(g, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13, limit=200)
    else:
        val, _ = integrate.quad(g, 0.0, 1.0, weight="cos", wvar=math.pi * j,
                                epsabs=1e-15, epsrel=1e-13, limit=200)
    return float(val)


def heat_beta(k0: float, J: int) -> np.ndarray:
    """``beta_j = int_0^1 exp(-pi^2 k0^2 s^2 / 4) cos(pi j s) ds`` for ``j = 0..J``."""
    b = math.pi**2 * k0**2 / 4
    return np.array([_cos_coefficient(lambda s: math.exp(-b * s * s), j) for j in range(J + 1)])


def resolvent_beta(k1: float, J: int) -> np.ndarray:
    """``beta_j = int_0^1 cos(pi j s) / (1 + (k1 pi s)^2) ds`` for ``j = 0..J``."""
    return np.array([_cos_coefficient(lambda s: 1.0 / (1 + (k1 * math.pi * s) ** 2), j)
                     for j in range(J + 1)])


def _abs_total(beta: np.ndarray, gprime1: float) -> float:
    """``sum_{j in Z} |beta_j|`` from ``j <= J`` plus the ``|g'(1)| / (pi j)^2`` tail."""
    J = beta.size - 1
    tail = abs(gprime1) / math.pi**2 * float(special.polygamma(1, J + 1))
    return float(beta[0] + 2 * np.sum(np.abs(beta[1:])) + 2 * tail)


def heat_closed_form(b: float) -> float:
    """``2 int_0^1 e^{-b s^2} ds - e^{-b}``; equals the full sum when ``b <= 1/2``."""
    if b == 0:
        return 1.0
    return math.sqrt(math.pi / b) * math.erf(math.sqrt(b)) - math.exp(-b)


def _node_weights(N: int, multiplier) -> np.ndarray:
    k = np.fft.fftfreq(N, 1.0 / N)
    return np.real(np.fft.ifft(multiplier(k)))


def heat_amplification(N: int, t: float, nu: float = 1.0, J: int = 400) -> AmplificationTable:
    """``A_{N,t} = (1/N) sum_j |Q_j|`` for the heat kernel, with its ``beta_j`` table.

    ``Q_j = Re sum_{-N/2<k<=N/2} exp(-4 pi^2 nu^2 t k^2) e^{2 pi i k j/N}``.  The
    table uses ``k0 = 2 N sqrt(t) nu`` and ``b = pi^2 k0^2 / 4``.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be even")
    if not t > 0:
        raise ValueError("t must be positive")
    w = _node_weights(N, lambda k: np.exp(-4 * math.pi**2 * nu * nu * t * k * k))
    direct = float(np.sum(np.abs(w)))
    k0 = 2 * N * math.sqrt(t) * nu
    b = math.pi**2 * k0**2 / 4
    beta = heat_beta(k0, J)
    total = _abs_total(beta, -2 * b * math.exp(-b))
    closed = heat_closed_form(b) if b <= 0.5 else None
    return AmplificationTable("heat", N, nu, t, 1, k0, direct, beta, total, closed, w)


def resolvent_amplification(N: int, tau: float, n: int = 1, nu: float = 1.0, J: int = 400) -> AmplificationTable:
    """``B_{N,n} = (1/N) sum_j |Q_j|`` for ``(I - nu^2 tau Delta_h)^{-n}``.

    For ``n = 1`` the table ``beta_j`` uses ``k1 = N sqrt(tau) nu``.
    """
    if N < 2 or N % 2:
        raise ValueError("N must be even")
    if not tau > 0 or n < 1:
        raise ValueError("need tau > 0 and n >= 1")
    w = _node_weights(N, lambda k: (1 + 4 * math.pi**2 * nu * nu * tau * k * k) ** (-float(n)))
    direct = float(np.sum(np.abs(w)))
    k1 = N * math.sqrt(tau) * nu
    beta, total = np.array([]), float("nan")
    if n == 1:
        beta = resolvent_beta(k1, J)
        gp1 = -2 * (k1 * math.pi) ** 2 / (1 + (k1 * math.pi) ** 2) ** 2
        total = _abs_total(beta, gp1)
    return AmplificationTable("resolvent", N, nu, tau, n, k1, direct, beta, total, None, w)


def bridge_identity(a: float, n: int) -> tuple[float, float]:
    """``a^{-n}`` and ``(1/(n-1)!) int_0^inf e^{-s a} s^{n-1} ds``."""
    val, _ = integrate.quad(lambda s: math.exp(-s * a) * s ** (n - 1), 0.0, np.inf,
                            epsabs=1e-15, epsrel=1e-13)
    return a ** (-n), val / math.factorial(n - 1)


# ---------------------------------------------------------------------------
# adversarial data
# ---------------------------------------------------------------------------

@dataclass
class AdversarialData:
    mode: str
    N: int
    nu: float
    step: float
    witness: int
    buffer: int
    values: np.ndarray = field(repr=False)
    predicted: float
    achieved: float


def adversarial_data(N: int, mode: str = "heat", nu: float = 1.0) -> AdversarialData:
    """Bounded node data whose next linear step overshoots 1 at node ``floor(N/4)``.

    The step is the heat semigroup at ``t = 1/(4 nu^2 N^2)`` or the resolvent
    at ``tau = 1/(4 nu^2 N^2)``.  Data equal the sign of the step weights for
    ``|j| <= 3`` around the witness, vanish for ``4 <= |j| <= floor(N^(1/3))``
    and follow a smooth bounded profile elsewhere.
    """
    if N < 64 or N % 2:
        raise ValueError("adversarial data need an even N >= 64")
    step_time = 1.0 / (4 * nu * nu * N * N)
    if mode == "heat":
        w = _node_weights(N, lambda k: np.exp(-4 * math.pi**2 * nu * nu * step_time * k * k))
        apply = lambda U: heat_step(U, nu, step_time)  # noqa: E731
    elif mode == "resolvent":
        w = _node_weights(N, lambda k: 1.0 / (1 + 4 * math.pi**2 * nu * nu * step_time * k * k))
        apply = lambda U: resolvent_step(U, nu, step_time)  # noqa: E731
    else:
        raise ValueError(f"unknown mode {mode!r}")
    l = N // 4
    buf = int(math.floor(N ** (1.0 / 3.0) + 1e-12))
    x = np.arange(N) / N
    U = 0.5 * np.cos(2 * math.pi * x)
    for j in range(-buf, buf + 1):
        U[(l - j) % N] = 0.0
    for j in range(-3, 4):
        U[(l - j) % N] = np.sign(w[j % N])
    predicted = float(sum(abs(w[j % N]) for j in range(-3, 4)))
    achieved = float(apply(U)[l])
    return AdversarialData(mode, N, nu, step_time, l, buf, U, predicted, achieved)


def step_overshoot(U, mode: str = "heat", nu: float = 1.0) -> float:
    """``max |step(U)| - 1`` for the adversarial step times."""
    U = np.asarray(U, dtype=float)
    N = U.size
    t = 1.0 / (4 * nu * nu * N * N)
    out = heat_step(U, nu, t) if mode == "heat" else resolvent_step(U, nu, t)
    return float(np.max(np.abs(out)) - 1.0)


def modulus_of_continuity(f, delta: float, samples: int = 200_001) -> float:
    """``max_{|x-y| <= delta} |f(x) - f(y)|`` on the torus, by sampling."""
    x = np.linspace(0.0, 1.0, samples, endpoint=False)
    fx = f(x)
    shifts = max(1, int(round(delta * samples)))
    best = 0.0
    step = max(1, shifts // 64)
    for s in range(1, shifts + 1, step):
        best = max(best, float(np.max(np.abs(fx - np.roll(fx, s)))))
    best = max(best, float(np.max(np.abs(fx - np.roll(fx, shifts)))))
    return best
