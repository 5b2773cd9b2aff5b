"""
Spectral fields, projections and interpolation
==============================================

A tour of the shared Fourier layer: Galerkin fields on a dealiased grid,
projection onto a band, the collocation interpolant and its slow
logarithmic growth on rough node data.
"""

import numpy as np

from specmp import fourier_core as fc
from specmp import kernel_lab

# A Galerkin field keeps the modes |k| <= N and samples on M >= 3(2N+1)
# points so that a cubic product is formed without aliasing.
grid = fc.galerkin_grid(8)
u = fc.SpectralField.from_function(grid, lambda x: np.cos(2 * np.pi * x) + 0.3 * np.sin(6 * np.pi * x))
print("grid:", grid.N, "modes,", grid.M, "samples")
print("sup norm (oversampled):", fc.linf_norm(u))

# Projection drops the k = 3 mode and leaves the rest untouched.
p = fc.project_galerkin(u, 2)
print("projected sup norm:", fc.linf_norm(p))

# The dealiased cube of cos(2 pi x) has the exact coefficients 3/8 and 1/8.
c = fc.SpectralField.from_function(grid, lambda x: np.cos(2 * np.pi * x))
cube = fc.dealiased_product(c, c, c)
print("cube coefficients k=1, k=3:", cube.coeff(1).real, cube.coeff(3).real)

# Projection is not bounded on L-infinity: its norm is the L1 mass of the
# Dirichlet kernel, which grows like (4/pi^2) log N.
for N in (4, 16, 64, 256):
    m = kernel_lab.dirichlet_sign_masses(N)
    print(f"N={N:4d}  ||D_N||_1 = {m.pos_mass + m.neg_mass:.4f}")

# The collocation interpolant reproduces node values exactly, but node data
# bounded by 1 can produce interpolants of size ~ log(N)/(2 pi) between nodes.
for N in (64, 256, 1024, 4096):
    j = np.arange(N)
    U = ((j % 2 == 0) & (j >= 1) & (j <= N / 10)).astype(float)
    Q = fc.collocation_interpolant(U)
    print(f"N={N:5d}  |Q_N U(0.5/N)| = {abs(Q(np.array([0.5 / N]))[0]):.4f}")
