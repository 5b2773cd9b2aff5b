"""Fourier transforms, projections and discrete operators on the periodic torus.

All fields live on the unit torus ``[0, 1)^d`` and use the convention

.. math::

    u(x) = \\sum_k \\hat u(k) e^{2\\pi i k\\cdot x}.

Two index conventions are supported:

``galerkin``
    Modes ``|k|_inf <= N`` sampled on ``M >= 3(2N+1)`` equispaced points per
    axis, so that cubic nonlinearities can be projected exactly.
``collocation``
    ``N`` equispaced nodes (``N`` even) and modes ``-N/2 < k <= N/2``.  The
    coefficient ``U~_k = (1/N) sum_j U_j e^{-2 pi i k j / N}``; the ``N/2`` mode is
    stored once and interpolated as ``cos(pi N x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.fft import next_fast_len

__all__ = [
    "GridSpec",
    "SpectralField",
    "galerkin_grid",
    "collocation_grid",
    "galerkin_sample_size",
    "project_galerkin",
    "collocation_interpolant",
    "interpolation_kernel",
    "apply_helmholtz_inverse",
    "apply_helmholtz",
    "laplacian",
    "derivative",
    "dealiased_product",
    "linf_norm",
    "l2_norm",
    "discrete_inner",
]

GALERKIN = "galerkin"
COLLOCATION = "collocation"


def galerkin_sample_size(N: int, factor: int = 3) -> int:
    """Smallest FFT-friendly even size ``>= factor * (2N + 1)``."""
    m = next_fast_len(factor * (2 * N + 1))
    if m % 2:
        m = next_fast_len(m + 1)
    return int(m)


@dataclass(frozen=True)
class GridSpec:
    """Immutable description of a periodic grid.

    Parameters
    ----------
    d : int
        Spatial dimension, 1 to 3.
    N : int
        Spectral cutoff. Galerkin keeps ``|k|_inf <= N``; collocation uses
        ``N`` nodes and wave numbers in ``(-N/2, N/2]``.
    M : int
        Physical sample count per axis.
    convention : {"galerkin", "collocation"}
    """

    d: int
    N: int
    M: int
    convention: str = GALERKIN

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if self.N < 0:
            raise ValueError("cutoff N must be non-negative")
        if self.convention == COLLOCATION:
            if self.N < 2 or self.N % 2:
                raise ValueError(f"collocation requires an even N >= 2, got N={self.N}")
            if self.M != self.N:
                raise ValueError("collocation requires M == N")
        elif self.convention == GALERKIN:
            if self.M < 3 * (2 * self.N + 1):
                raise ValueError(
                    f"galerkin requires M >= 3(2N+1) = {3 * (2 * self.N + 1)}, got M={self.M}"
                )
        else:
            raise ValueError(f"unknown convention {self.convention!r}")

    @property
    def is_collocation(self) -> bool:
        return self.convention == COLLOCATION

    @property
    def band_size(self) -> int:
        """Number of stored modes per axis."""
        return self.N if self.is_collocation else 2 * self.N + 1

    def wavenumbers(self) -> np.ndarray:
        """Integer wave numbers along one axis, in storage order."""
        if self.is_collocation:
            return np.arange(-self.N // 2 + 1, self.N // 2 + 1)
        return np.arange(-self.N, self.N + 1)

    def wavevector_grid(self) -> list[np.ndarray]:
        """Broadcastable wave-number arrays, one per axis."""
        k = self.wavenumbers()
        out = []
        for ax in range(self.d):
            shape = [1] * self.d
            shape[ax] = k.size
            out.append(k.reshape(shape))
        return out

    def k_squared(self) -> np.ndarray:
        """``|k|^2`` over the stored band."""
        return sum(kk.astype(float) ** 2 for kk in self.wavevector_grid())

    def nodes(self) -> np.ndarray:
        """Nodes ``x_j = j / M`` along one axis."""
        return np.arange(self.M) / self.M

    def with_cutoff(self, N: int) -> "GridSpec":
        return GridSpec(self.d, N, self.M, self.convention)


def galerkin_grid(N: int, d: int = 1, M: int | None = None) -> GridSpec:
    """Galerkin grid with the default dealiasing sample count."""
    return GridSpec(d, N, galerkin_sample_size(N) if M is None else M, GALERKIN)


def collocation_grid(N: int, d: int = 1) -> GridSpec:
    return GridSpec(d, N, N, COLLOCATION)


def _band_index(grid: GridSpec, size: int) -> np.ndarray:
    """Positions of the stored wave numbers inside an FFT array of length ``size``."""
    return np.mod(grid.wavenumbers(), size)


def _extract_band(full: np.ndarray, grid: GridSpec) -> np.ndarray:
    idx = _band_index(grid, full.shape[0])
    return full[np.ix_(*([idx] * grid.d))]


def _embed_band(coeffs: np.ndarray, grid: GridSpec, size: int) -> np.ndarray:
    full = np.zeros((size,) * grid.d, dtype=complex)
    idx = _band_index(grid, size)
    full[np.ix_(*([idx] * grid.d))] = coeffs
    return full


def _coeffs_from_values(values: np.ndarray, grid: GridSpec) -> np.ndarray:
    full = np.fft.fftn(values) / values.size
    # Enforce exact Hermitian symmetry: a round-off anti-Hermitian part is
    # invisible in the real values but would be amplified by linear updates.
    axes = tuple(range(full.ndim))
    mirror = np.conj(np.roll(np.flip(full, axes), 1, axes))
    return _extract_band(0.5 * (full + mirror), grid)


def _values_from_coeffs(coeffs: np.ndarray, grid: GridSpec, size: int | None = None) -> np.ndarray:
    size = grid.M if size is None else size
    full = _embed_band(coeffs, grid, size)
    return np.real(np.fft.ifftn(full)) * size**grid.d


@dataclass(frozen=True)
class SpectralField:
    """A real periodic field held as node values and Fourier coefficients.

    Construct with :meth:`from_values` or :meth:`from_coeffs`; both views are
    kept consistent.
    """

    grid: GridSpec
    coeffs: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    @classmethod
    def from_values(cls, grid: GridSpec, values) -> "SpectralField":
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.M,) * grid.d:
            raise ValueError(f"values shape {values.shape} does not match grid {(grid.M,) * grid.d}")
        coeffs = _coeffs_from_values(values, grid)
        if not grid.is_collocation:
            # Drop any content outside the band so that both views agree.
            values = _values_from_coeffs(coeffs, grid)
        return cls(grid, coeffs, values)

    @classmethod
    def from_coeffs(cls, grid: GridSpec, coeffs) -> "SpectralField":
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (grid.band_size,) * grid.d:
            raise ValueError("coefficient array does not match the grid band")
        values = _values_from_coeffs(coeffs, grid)
        # Re-derive the coefficients so that the Hermitian part is kept.
        return cls(grid, _coeffs_from_values(values, grid), values)

    @classmethod
    def from_function(cls, grid: GridSpec, func: Callable) -> "SpectralField":
        """Sample ``func`` on the nodes (Galerkin: trigonometric interpolation then truncation)."""
        x = grid.nodes()
        mesh = np.meshgrid(*([x] * grid.d), indexing="ij")
        return cls.from_values(grid, func(*mesh))

    def coeff(self, k) -> complex:
        """Coefficient of the wave vector ``k`` (0 outside the band)."""
        k = np.atleast_1d(k)
        lo = self.grid.wavenumbers()[0]
        hi = self.grid.wavenumbers()[-1]
        if np.any(k < lo) or np.any(k > hi):
            return 0.0 + 0.0j
        return complex(self.coeffs[tuple(int(kk - lo) for kk in k)])

    def with_coeffs(self, coeffs) -> "SpectralField":
        return SpectralField.from_coeffs(self.grid, coeffs)

    def sample(self, M: int) -> np.ndarray:
        """Values on a uniform ``M``-point grid per axis (Galerkin only)."""
        if self.grid.is_collocation:
            raise ValueError("resampling a collocation field needs the interpolant")
        if M < self.grid.band_size:
            raise ValueError("resampling grid too coarse for the band")
        return _values_from_coeffs(self.coeffs, self.grid, M)

    def __call__(self, *x) -> np.ndarray:
        """Evaluate the trigonometric polynomial at arbitrary points."""
        return _evaluate(self.coeffs, self.grid, x)

    def mean(self) -> float:
        return self.coeff((0,) * self.grid.d).real

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs + other.coeffs, self.values + other.values)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_grid(self, other)
        return SpectralField(self.grid, self.coeffs - other.coeffs, self.values - other.values)

    def scale(self, c: float) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * c, self.values * c)


def _check_same_grid(*fields: SpectralField) -> None:
    g0 = fields[0].grid
    for f in fields[1:]:
        if f.grid != g0:
            raise ValueError("fields live on mismatched grids")


def _axis_basis(grid: GridSpec, x: np.ndarray) -> np.ndarray:
    """Basis functions along one axis, shape ``x.shape + (band,)``."""
    k = grid.wavenumbers()
    x = np.asarray(x, dtype=float)[..., None]
    basis = np.exp(2j * np.pi * k * x)
    if grid.is_collocation:
        basis[..., -1] = np.cos(np.pi * grid.N * x[..., 0])
    return basis


def _evaluate(coeffs: np.ndarray, grid: GridSpec, x: Sequence) -> np.ndarray:
    if len(x) != grid.d:
        raise ValueError(f"expected {grid.d} coordinate arrays")
    arrays = np.broadcast_arrays(*[np.asarray(xi, dtype=float) for xi in x])
    flat = [a.ravel() for a in arrays]
    out = np.empty(flat[0].size, dtype=complex)
    chunk = 4096
    for start in range(0, out.size, chunk):
        sl = slice(start, start + chunk)
        # contract one axis at a time: acc[k1, ..., kd] -> per-point values
        b0 = _axis_basis(grid, flat[0][sl])
        acc = np.tensordot(b0, coeffs, axes=([1], [0]))
        for ax in range(1, grid.d):
            b = _axis_basis(grid, flat[ax][sl])
            acc = np.einsum("pk,pk...->p...", b, acc)
        out[sl] = acc
    return np.real(out).reshape(arrays[0].shape)


def project_galerkin(f: SpectralField, N: int) -> SpectralField:
    """Galerkin truncation ``Pi_N``: keep modes with ``|k|_inf <= N``.

    The result lives on a grid with cutoff ``N`` and the same sample count.
    """
    if f.grid.is_collocation:
        raise ValueError("project_galerkin expects a galerkin field")
    if N < 0:
        raise ValueError("cutoff must be non-negative")
    if N > f.grid.N:
        raise ValueError("cutoff too large for grid")
    new = f.grid.with_cutoff(N)
    off = f.grid.N - N
    sl = (slice(off, off + 2 * N + 1),) * f.grid.d
    return SpectralField.from_coeffs(new, f.coeffs[sl])


def interpolation_kernel(y, N: int) -> np.ndarray:
    """The collocation cardinal function ``G_N(y) = sin(N pi y) / (N tan(pi y))``."""
    y = np.asarray(y, dtype=float)
    yr = y - np.round(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.sin(N * np.pi * yr) / (N * np.tan(np.pi * yr))
    return np.where(np.abs(yr) < 1e-15, 1.0, g)


def collocation_interpolant(U) -> Callable[[np.ndarray], np.ndarray]:
    """Trigonometric interpolant ``Q_N U`` of node values ``U_j`` at ``j/N``.

    The returned callable evaluates the band-limited interpolant with the
    ``N/2`` mode symmetrised to a cosine, so it is real and reproduces ``U`` at
    every node.
    """
    U = np.asarray(U, dtype=float)
    if U.ndim != 1:
        raise ValueError("collocation_interpolant expects a 1D node vector")
    N = U.size
    if N % 2:
        raise ValueError(f"collocation requires an even number of nodes, got N={N}")
    field_ = SpectralField.from_values(collocation_grid(N), U)

    def Q(x):
        return field_(x)

    Q.field = field_
    return Q


def _multiplier(f: SpectralField, m: np.ndarray) -> SpectralField:
    coeffs = f.coeffs * m
    values = _values_from_coeffs(coeffs, f.grid)
    return SpectralField(f.grid, coeffs, values)


def apply_helmholtz_inverse(f: SpectralField, beta: float) -> SpectralField:
    """Apply ``(Id - beta Delta)^{-1}``: multiplier ``1 / (1 + 4 pi^2 beta |k|^2)``."""
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    return _multiplier(f, 1.0 / (1.0 + 4 * np.pi**2 * beta * f.grid.k_squared()))


def apply_helmholtz(f: SpectralField, beta: float) -> SpectralField:
    """Apply ``Id - beta Delta``."""
    return _multiplier(f, 1.0 + 4 * np.pi**2 * beta * f.grid.k_squared())


def laplacian(f: SpectralField) -> SpectralField:
    """Spectral Laplacian, multiplier ``-(2 pi |k|)^2``."""
    return _multiplier(f, -4 * np.pi**2 * f.grid.k_squared())


def derivative(f: SpectralField, axis: int = 0) -> SpectralField:
    """Spectral derivative along ``axis``, multiplier ``2 pi i k``.

    For collocation fields the ``N/2`` multiplier is purely imaginary on a real
    coefficient, so its contribution vanishes in the real field.
    """
    kk = f.grid.wavevector_grid()[axis]
    m = 2j * np.pi * kk
    if f.grid.is_collocation:
        m = np.where(kk == f.grid.N // 2, 0.0, m)
    return _multiplier(f, m)


def dealiased_product(*fields: SpectralField) -> SpectralField:
    """Pointwise product of fields, projected back onto the band.

    Galerkin fields are multiplied on a zero-padded grid large enough that the
    retained coefficients equal the exact convolution.  Collocation fields are
    multiplied node by node, so aliasing is kept on purpose.
    """
    if not fields:
        raise ValueError("need at least one field")
    _check_same_grid(*fields)
    grid = fields[0].grid
    if grid.is_collocation:
        prod = np.prod([f.values for f in fields], axis=0)
        return SpectralField.from_values(grid, prod)
    p = len(fields)
    need = (p + 1) * grid.N + 1
    size = grid.M if grid.M >= need else next_fast_len(need)
    if size == grid.M:
        prod = np.prod([f.values for f in fields], axis=0)
    else:
        prod = np.prod([_values_from_coeffs(f.coeffs, grid, size) for f in fields], axis=0)
    full = np.fft.fftn(prod) / prod.size
    return SpectralField.from_coeffs(grid, _extract_band(full, grid))


def linf_norm(f: SpectralField, oversample: int = 8) -> float:
    """Sup norm estimate.

    Collocation fields return the node maximum.  Galerkin fields are sampled on
    at least ``oversample * (2N + 1)`` points per axis.
    """
    if f.grid.is_collocation:
        return float(np.max(np.abs(f.values)))
    M = max(f.grid.M, galerkin_sample_size(f.grid.N, factor=oversample))
    return float(np.max(np.abs(f.sample(M))))


def l2_norm(f: SpectralField) -> float:
    """L2 norm over the torus via Parseval."""
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2)))


def discrete_inner(U, V) -> float:
    """Collocation inner product ``<U, V> = (1/N) sum_j U_j V_j``."""
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    return float(np.sum(U * V) / U.size)
