"""Time steppers for Allen-Cahn, viscous Burgers and 2D vorticity.

Allen-Cahn is written with the interface width ``nu``::

    u_t = nu^2 Delta u + u - u^3,

and its IMEX Euler step with ``f_tau(z) = (1 + tau) z - tau z^3`` reads
``(1 - tau nu^2 Delta) u_new = f_tau(u)``.  Galerkin variants act on
:class:`~specmp.fourier_core.SpectralField` objects and project the exact
nonlinearity; collocation variants act on plain node vectors and apply the
nonlinearity pointwise.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from . import fourier_core as fc
from .fourier_core import SpectralField

__all__ = [
    "IntegrationError",
    "f_tau",
    "ac_galerkin_imex_step",
    "ac_collocation_imex_step",
    "ac_strang_step",
    "strang_nonlinear_flow",
    "heat_step",
    "resolvent_step",
    "ac_collocation_ode_integrate",
    "ac_galerkin_ode_integrate",
    "burgers_galerkin_euler_step",
    "burgers_collocation_ode_integrate",
    "aliasing_witness",
    "biot_savart",
    "nse_vorticity_step",
    "energy",
    "InitialData",
    "SchemeConfig",
    "RunDiagnostics",
    "Trajectory",
    "make_initial",
    "run_scheme",
    "fit_loglog",
    "rough_nodes",
]


class IntegrationError(RuntimeError):
    """The adaptive integrator could not reach the final time."""


def f_tau(z, tau: float):
    """The explicit IMEX nonlinearity ``(1 + tau) z - tau z^3``."""
    return (1.0 + tau) * z - tau * z**3


def _check_tau(tau):
    if not tau > 0:
        raise ValueError(f"time step must be positive, got {tau}")


# ---------------------------------------------------------------------------
# Allen-Cahn
# ---------------------------------------------------------------------------

def ac_galerkin_imex_step(u: SpectralField, nu: float, tau: float, N: int | None = None) -> SpectralField:
    """One Galerkin IMEX step ``u_new = (1 - tau nu^2 Delta)^{-1} Pi_N f_tau(u)``.

    The cubic is formed on the dealiased grid, so ``Pi_N(u^3)`` is exact.
    """
    _check_tau(tau)
    if u.grid.is_collocation:
        raise ValueError("expected a galerkin field")
    if N is not None and N != u.grid.N:
        u = fc.project_galerkin(u, N)
    cube = fc.dealiased_product(u, u, u)
    rhs = u.scale(1.0 + tau) - cube.scale(tau)
    return fc.apply_helmholtz_inverse(rhs, tau * nu * nu)


def _k_collocation(N: int) -> np.ndarray:
    """Wave numbers in FFT order; the Nyquist entry is ``-N/2`` (same multiplier as ``+N/2``)."""
    return np.fft.fftfreq(N, 1.0 / N)


def _apply_multiplier_nodes(U: np.ndarray, m: np.ndarray) -> np.ndarray:
    return np.real(np.fft.ifft(np.fft.fft(U) * m))


def _check_nodes(U) -> np.ndarray:
    U = np.asarray(U, dtype=float)
    if U.ndim != 1:
        raise ValueError("node vector must be one-dimensional")
    if U.size < 2 or U.size % 2:
        raise ValueError(f"collocation requires an even number of nodes, got N={U.size}")
    return U


def resolvent_step(U, nu: float, tau: float) -> np.ndarray:
    """Apply ``(I - nu^2 tau Delta_h)^{-1}`` to node values."""
    U = _check_nodes(U)
    k = _k_collocation(U.size)
    return _apply_multiplier_nodes(U, 1.0 / (1.0 + nu * nu * tau * (2 * np.pi * k) ** 2))


def heat_step(U, nu: float, t: float) -> np.ndarray:
    """Apply the discrete heat semigroup ``exp(nu^2 t Delta_h)`` to node values."""
    U = _check_nodes(U)
    k = _k_collocation(U.size)
    return _apply_multiplier_nodes(U, np.exp(-((2 * np.pi * k) ** 2) * nu * nu * t))


def ac_collocation_imex_step(U, nu: float, tau: float) -> np.ndarray:
    """Collocation IMEX step ``U_new = (I - nu^2 tau Delta_h)^{-1} f_tau(U)`` (cubic taken node-wise)."""
    _check_tau(tau)
    U = _check_nodes(U)
    return resolvent_step(f_tau(U, tau), nu, tau)


def strang_nonlinear_flow(a, tau: float) -> np.ndarray:
    """Exact time-``tau`` flow of ``u' = u - u^3``: ``a / sqrt(e^{-2 tau} + (1 - e^{-2 tau}) a^2)``."""
    a = np.asarray(a, dtype=float)
    e = math.exp(-2.0 * tau)
    return a / np.sqrt(e + (1.0 - e) * a * a)


def ac_strang_step(U, nu: float, tau: float) -> np.ndarray:
    """Strang splitting: half heat step, exact nonlinear flow, half heat step."""
    _check_tau(tau)
    U = _check_nodes(U)
    half = heat_step(U, nu, 0.5 * tau)
    return heat_step(strang_nonlinear_flow(half, tau), nu, 0.5 * tau)


def _laplacian_nodes(U: np.ndarray) -> np.ndarray:
    k = _k_collocation(U.size)
    return _apply_multiplier_nodes(U, -((2 * np.pi * k) ** 2))


@dataclass
class Trajectory:
    """Output of an adaptive integration sampled at ``t``."""

    t: np.ndarray
    states: np.ndarray
    energies: np.ndarray
    nfev: int


def _integrate(rhs, y0, T, t_eval, rtol, atol, method):
    sol = solve_ivp(rhs, (0.0, T), y0, method=method, t_eval=t_eval, rtol=rtol, atol=atol,
                    dense_output=False)
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integration stopped at t={t_fail:.6g}: {sol.message}")
    return sol


def ac_collocation_ode_integrate(U0, nu: float, T: float, t_eval: Sequence[float] | None = None,
                                 rtol: float = 1e-6, atol: float = 1e-8,
                                 method: str = "DOP853") -> Trajectory:
    """Integrate ``dU/dt = nu^2 Delta_h U + U - U^3`` with an embedded Runge-Kutta pair.

    ``method`` is any :func:`scipy.integrate.solve_ivp` method; the default is
    the explicit Dormand-Prince 8(5,3) pair.  Explicit pairs need
    ``nu^2 pi^2 N^2 T`` of moderate size; pass ``method="Radau"`` otherwise.
    """
    U0 = _check_nodes(U0)
    if t_eval is None:
        t_eval = np.linspace(0.0, T, 11)

    def rhs(_t, U):
        return nu * nu * _laplacian_nodes(U) + U - U**3

    jac = None
    if method in ("Radau", "BDF", "LSODA"):
        N = U0.size
        L = np.array([_laplacian_nodes(e) for e in np.eye(N)]).T

        def jac(_t, U):
            return nu * nu * L + np.diag(1.0 - 3.0 * U * U)

    kw = {"jac": jac} if jac is not None else {}
    sol = solve_ivp(rhs, (0.0, T), U0, method=method, t_eval=t_eval, rtol=rtol, atol=atol, **kw)
    if sol.status != 0:
        t_fail = float(sol.t[-1]) if sol.t.size else 0.0
        raise IntegrationError(f"integration stopped at t={t_fail:.6g}: {sol.message}")
    states = sol.y.T
    energies = np.array([energy(U, nu) for U in states])
    return Trajectory(sol.t, states, energies, int(sol.nfev))


def _centered_coeffs(v: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(np.fft.fftn(v)) / v.size


def _odd_samples(c: np.ndarray) -> np.ndarray:
    return np.real(np.fft.ifftn(np.fft.ifftshift(c))) * c.size


def ac_galerkin_ode_integrate(u0: SpectralField, nu: float, T: float, N: int | None = None,
                              t_eval: Sequence[float] | None = None, rtol: float = 1e-6,
                              atol: float = 1e-8, method: str = "DOP853") -> Trajectory:
    """Integrate ``u_t = nu^2 Delta u - Pi_N(u^3 - u)`` on the Galerkin band.

    The state vector is the field sampled on ``2N+1`` points per axis, which
    determines the band-limited field uniquely.  ``states`` holds those samples;
    use :func:`_centered_coeffs` style reconstruction via :class:`SpectralField`
    for evaluation elsewhere.
    """
    if N is not None and N != u0.grid.N:
        u0 = fc.project_galerkin(u0, N)
    grid = u0.grid
    shape = (grid.band_size,) * grid.d
    k2 = grid.k_squared()
    if t_eval is None:
        t_eval = np.linspace(0.0, T, 11)

    def to_field(y):
        return SpectralField.from_coeffs(grid, _centered_coeffs(y.reshape(shape)))

    def rhs(_t, y):
        u = to_field(y)
        cube = fc.dealiased_product(u, u, u)
        dc = -4 * np.pi**2 * nu * nu * k2 * u.coeffs - cube.coeffs + u.coeffs
        return _odd_samples(dc).ravel()

    y0 = _odd_samples(u0.coeffs).ravel()
    sol = _integrate(rhs, y0, T, t_eval, rtol, atol, method)
    states = sol.y.T
    energies = np.array([energy(to_field(y), nu) for y in states])
    return Trajectory(sol.t, states, energies, int(sol.nfev))


# ---------------------------------------------------------------------------
# Burgers
# ---------------------------------------------------------------------------

def burgers_galerkin_euler_step(u: SpectralField, nu: float, tau: float, N: int | None = None) -> SpectralField:
    """``(u_new - u)/tau + Pi_N(u u_x) = nu^2 u_new_xx`` with the product dealiased."""
    _check_tau(tau)
    if u.grid.d != 1:
        raise ValueError("Burgers is one-dimensional")
    if N is not None and N != u.grid.N:
        u = fc.project_galerkin(u, N)
    adv = fc.dealiased_product(u, fc.derivative(u))
    return fc.apply_helmholtz_inverse(u - adv.scale(tau), tau * nu * nu)


def _derivative_nodes(U: np.ndarray) -> np.ndarray:
    N = U.size
    k = _k_collocation(N)
    m = 2j * np.pi * k
    m[N // 2] = 0.0
    return _apply_multiplier_nodes(U, m)


def burgers_collocation_ode_integrate(U0, T: float, t_eval: Sequence[float] | None = None,
                                      rtol: float = 1e-6, atol: float = 1e-8,
                                      method: str = "DOP853") -> Trajectory:
    """Integrate ``dU/dt + (1/2) d_h(U^2) = Delta_h U`` (unit viscosity).

    ``energies`` records the aliasing defect ``<d_h(U^2), U>``, which is
    not zero for collocation in general.
    """
    U0 = _check_nodes(U0)
    if t_eval is None:
        t_eval = np.linspace(0.0, T, 11)

    def rhs(_t, U):
        return _laplacian_nodes(U) - 0.5 * _derivative_nodes(U * U)

    sol = _integrate(rhs, U0, T, t_eval, rtol, atol, method)
    states = sol.y.T
    defect = np.array([fc.discrete_inner(_derivative_nodes(U * U), U) for U in states])
    return Trajectory(sol.t, states, defect, int(sol.nfev))


def aliasing_witness(k0: int) -> dict:
    """Collocation of ``u = sin(2 pi m x)`` with ``N = 6 k0`` and ``m = N/3``.

    Returns the interpolated square's coefficients at ``0`` and ``+-m`` and the
    integral ``int Q_N(u^2) u_x dx``, which vanishes for exact products but not here.
    """
    N = 6 * k0
    m = N // 3
    x = np.arange(N) / N
    U = np.sin(2 * np.pi * m * x)
    grid = fc.collocation_grid(N)
    sq = fc.SpectralField.from_values(grid, U * U)
    ux = fc.derivative(fc.SpectralField.from_values(grid, U))
    # Parseval for real band-limited functions: int f g = sum_k f_k conj(g_k)
    integral = np.real(np.sum(sq.coeffs * np.conj(ux.coeffs)))
    return {"N": N, "m": m, "c0": sq.coeff(0), "cm": sq.coeff(m), "c_minus_m": sq.coeff(-m),
            "integral": float(integral)}


# ---------------------------------------------------------------------------
# 2D Navier-Stokes in vorticity form
# ---------------------------------------------------------------------------

def biot_savart(omega: SpectralField) -> tuple[SpectralField, SpectralField]:
    """Velocity ``u = grad^perp Delta^{-1} omega = (-d_2 psi, d_1 psi)`` with zero mean."""
    if omega.grid.d != 2:
        raise ValueError("vorticity must be two-dimensional")
    k1, k2 = omega.grid.wavevector_grid()
    ksq = (k1**2 + k2**2).astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(ksq > 0, -1.0 / (4 * np.pi**2 * ksq), 0.0)
    psi = omega.coeffs * inv
    u1 = -2j * np.pi * k2 * psi
    u2 = 2j * np.pi * k1 * psi
    return omega.with_coeffs(u1), omega.with_coeffs(u2)


def nse_vorticity_step(omega: SpectralField, tau: float, N: int | None = None,
                       mean_tol: float = 1e-12) -> SpectralField:
    """Euler step ``(w_new - w)/tau + Pi_N(u . grad w) = Delta w_new`` with dealiased transport."""
    _check_tau(tau)
    if omega.grid.d != 2:
        raise ValueError("vorticity must be two-dimensional")
    scale = max(1.0, float(np.max(np.abs(omega.coeffs))))
    if abs(omega.mean()) > mean_tol * scale:
        raise ValueError(f"vorticity must have zero mean, got mean {omega.mean():.3e}")
    if N is not None and N != omega.grid.N:
        omega = fc.project_galerkin(omega, N)
    u1, u2 = biot_savart(omega)
    adv = fc.dealiased_product(u1, fc.derivative(omega, 0)) + fc.dealiased_product(u2, fc.derivative(omega, 1))
    return fc.apply_helmholtz_inverse(omega - adv.scale(tau), tau)


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------

def energy(u, nu: float) -> float:
    """Allen-Cahn energy ``int (nu^2/2 |grad u|^2 + (u^2 - 1)^2 / 4)``.

    A :class:`SpectralField` gets the continuous energy (gradient term by
    Parseval, potential term exactly on the dealiased grid).  A plain node
    vector gets the discrete energy with ``<U, V> = (1/N) sum U_j V_j``.
    """
    if isinstance(u, SpectralField):
        grad = float(np.sum(4 * np.pi**2 * u.grid.k_squared() * np.abs(u.coeffs) ** 2))
        if u.grid.is_collocation:
            pot = float(np.mean((u.values**2 - 1) ** 2))
        else:
            M = max(u.grid.M, 4 * u.grid.N + 1)
            pot = float(np.mean((u.sample(M) ** 2 - 1) ** 2))
        return 0.5 * nu * nu * grad + 0.25 * pot
    U = np.asarray(u, dtype=float)
    lap = _laplacian_nodes(U)
    return 0.5 * nu * nu * fc.discrete_inner(-lap, U) + 0.25 * fc.discrete_inner(U * U - 1, U * U - 1)


# ---------------------------------------------------------------------------
# experiment plumbing
# ---------------------------------------------------------------------------

def rough_nodes(N: int, seed: int, budget: float = 1.0, d: int = 1) -> np.ndarray:
    """Seeded i.i.d. node values uniform in ``[-budget, budget]`` (counter-based Philox stream)."""
    rng = np.random.Generator(np.random.Philox(seed))
    return rng.uniform(-budget, budget, size=(N,) * d)


_SAFE_NAMES = {name: getattr(np, name) for name in (
    "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "tanh", "sign", "clip", "pi", "minimum", "maximum", "where",
)}


def _eval_expression(expr: str, *coords):
    names = dict(_SAFE_NAMES)
    names["x"] = coords[0]
    if len(coords) > 1:
        names["y"] = coords[1]
    value = eval(compile(expr, "<initial>", "eval"), {"__builtins__": {}}, names)  # noqa: S307
    return np.broadcast_to(np.asarray(value, dtype=float), coords[0].shape).copy()


@dataclass
class InitialData:
    """Initial condition description.

    kind
        ``band_limited_expression`` (payload: numpy expression in ``x``/``y``),
        ``node_samples`` (payload: list of values), ``rough_linf`` (payload:
        L-infinity budget, values drawn from the run seed) or ``adversarial``
        (payload: ``"heat"`` or ``"resolvent"``).
    """

    kind: str
    payload: Any = None

    def __post_init__(self):
        if self.kind not in ("band_limited_expression", "node_samples", "rough_linf", "adversarial"):
            raise ValueError(f"unknown initial data kind {self.kind!r}")


COMPATIBLE = {
    "allen_cahn": {"galerkin_imex", "collocation_imex", "collocation_ode", "strang", "galerkin_ode"},
    "burgers": {"galerkin_euler", "collocation_ode"},
    "nse2d": {"galerkin_euler"},
}
ODE_SCHEMES = {"collocation_ode", "galerkin_ode"}


@dataclass
class SchemeConfig:
    """One time-stepping experiment."""

    equation: str
    scheme: str
    nu: float
    N: int
    steps: int = 0
    tau: float | None = None
    T: float | None = None
    d: int = 1
    initial: InitialData = field(default_factory=lambda: InitialData("rough_linf", 1.0))
    seed: int = 0
    bound: float = 1.0
    samples: int = 11

    def __post_init__(self):
        if isinstance(self.initial, dict):
            self.initial = InitialData(**self.initial)
        self.validate()

    def validate(self):
        if self.equation not in COMPATIBLE:
            raise ValueError(f"equation: unknown equation {self.equation!r}")
        if self.scheme not in COMPATIBLE[self.equation]:
            raise ValueError(f"scheme: {self.scheme!r} is not available for {self.equation}")
        if not self.nu > 0:
            raise ValueError("nu: must be positive")
        if self.scheme in ODE_SCHEMES:
            if self.T is None or not self.T > 0:
                raise ValueError("T: ODE schemes need a positive final time")
        else:
            if self.tau is None or not self.tau > 0:
                raise ValueError("tau: must be positive")
            if self.steps < 0:
                raise ValueError("steps: must be non-negative")
        if self.equation == "nse2d" and self.d != 2:
            raise ValueError("d: nse2d runs in two dimensions")
        if self.equation != "nse2d" and self.d != 1 and not (
                self.equation == "allen_cahn" and self.scheme == "galerkin_imex" and self.d == 2):
            raise ValueError("d: only 2D Galerkin IMEX Allen-Cahn runs beyond one dimension")
        if self.scheme in ("collocation_imex", "collocation_ode", "strang") and self.N % 2:
            raise ValueError("N: collocation requires an even N")
        if self.N < 1:
            raise ValueError("N: must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    def hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, default=float).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class RunDiagnostics:
    """Per-sample norms, energy and max-principle margin of one run."""

    step: np.ndarray
    t: np.ndarray
    linf: np.ndarray
    l2: np.ndarray
    energy: np.ndarray
    margin: np.ndarray
    config_hash: str = ""
    wall_time: float = 0.0

    def rows(self):
        for row in zip(self.step, self.t, self.linf, self.l2, self.energy, self.margin):
            yield (int(row[0]), *(float(v) for v in row[1:]))


def make_initial(config: SchemeConfig):
    """Build the initial state (node vector or field) described by ``config``."""
    from . import stability_lab  # local import: stability_lab depends on this module

    init = config.initial
    collocation = config.scheme in ("collocation_imex", "collocation_ode", "strang") or (
        config.equation == "burgers" and config.scheme == "collocation_ode")
    if collocation:
        N = config.N
        if init.kind == "node_samples":
            U = np.asarray(init.payload, dtype=float)
            if U.size != N:
                raise ValueError("initial: node_samples length must equal N")
            return U
        if init.kind == "rough_linf":
            return rough_nodes(N, config.seed, float(init.payload or 1.0))
        if init.kind == "adversarial":
            return stability_lab.adversarial_data(N, init.payload or "heat").values
        return _eval_expression(str(init.payload), np.arange(N) / N)
    grid = fc.galerkin_grid(config.N, d=config.d)
    if init.kind == "band_limited_expression":
        mesh = np.meshgrid(*([grid.nodes()] * grid.d), indexing="ij")
        return SpectralField.from_values(grid, _eval_expression(str(init.payload), *mesh))
    if init.kind == "rough_linf":
        fine = rough_nodes(grid.M, config.seed, float(init.payload or 1.0), d=grid.d)
        if config.equation == "nse2d":
            fine = fine - fine.mean()
        return SpectralField.from_values(grid, fine)
    if init.kind == "node_samples":
        vals = np.asarray(init.payload, dtype=float)
        if vals.shape != (grid.M,) * grid.d:
            raise ValueError("initial: galerkin node_samples must have M^d entries")
        return SpectralField.from_values(grid, vals)
    raise ValueError(f"initial: {init.kind!r} is not supported for galerkin schemes")


def _norms(state, nu, equation):
    if isinstance(state, SpectralField):
        linf = fc.linf_norm(state)
        l2 = fc.l2_norm(state)
    else:
        linf = float(np.max(np.abs(state)))
        l2 = math.sqrt(fc.discrete_inner(state, state))
    e = energy(state, nu) if equation == "allen_cahn" else 0.5 * l2 * l2
    return linf, l2, e


def run_scheme(config: SchemeConfig) -> RunDiagnostics:
    """Execute ``config`` and collect diagnostics after every step (or sample time)."""
    config.validate()
    start = time.perf_counter()
    state = make_initial(config)
    rows = []

    def record(n, t, s):
        linf, l2, e = _norms(s, config.nu, config.equation)
        rows.append((n, t, linf, l2, e, linf - config.bound))

    if config.scheme in ODE_SCHEMES:
        t_eval = np.linspace(0.0, config.T, max(2, config.samples))
        if config.equation == "burgers":
            traj = burgers_collocation_ode_integrate(state, config.T, t_eval)
        elif config.scheme == "collocation_ode":
            traj = ac_collocation_ode_integrate(state, config.nu, config.T, t_eval)
        else:
            traj = ac_galerkin_ode_integrate(state, config.nu, config.T, t_eval=t_eval)
        for n, (t, y) in enumerate(zip(traj.t, traj.states)):
            if config.scheme == "galerkin_ode":
                shape = (state.grid.band_size,) * state.grid.d
                y = SpectralField.from_coeffs(state.grid, _centered_coeffs(y.reshape(shape)))
            record(n, float(t), y)
    else:
        step = _stepper(config)
        record(0, 0.0, state)
        for n in range(1, config.steps + 1):
            state = step(state)
            record(n, n * config.tau, state)
            if not np.all(np.isfinite(state.values if isinstance(state, SpectralField) else state)):
                break
    arr = np.array(rows, dtype=float)
    return RunDiagnostics(arr[:, 0].astype(int), arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4], arr[:, 5],
                          config.hash(), time.perf_counter() - start)


def _stepper(config: SchemeConfig) -> Callable:
    nu, tau = config.nu, config.tau
    if config.equation == "allen_cahn":
        return {
            "galerkin_imex": lambda u: ac_galerkin_imex_step(u, nu, tau),
            "collocation_imex": lambda U: ac_collocation_imex_step(U, nu, tau),
            "strang": lambda U: ac_strang_step(U, nu, tau),
        }[config.scheme]
    if config.equation == "burgers":
        return lambda u: burgers_galerkin_euler_step(u, nu, tau)
    return lambda w: nse_vorticity_step(w, tau)


def fit_loglog(x, y) -> dict:
    """Least-squares fit ``log y = intercept + slope log x``; returns slope, intercept and R^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = intercept + slope * lx
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return {"slope": float(slope), "intercept": float(intercept), "r2": r2}
