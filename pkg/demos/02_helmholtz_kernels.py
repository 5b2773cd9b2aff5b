"""
Sign and mass of truncated Helmholtz kernels
============================================

Whether an implicit diffusion step keeps the maximum of its input comes down
to the sign of the truncated kernel.  This script scans the kernel minimum,
computes the tail mass and the critical exponent of the Bessel family.
"""

import math

from specmp import kernel_lab as kl

# For a small diffusion product beta the truncated kernel dips below zero for
# a long window of cutoffs; the formula threshold for positivity is huge.
beta = 1e-3
print("negativity window:", kl.negativity_window(beta))
print("positivity threshold (log):", kl.positivity_threshold(beta).log_value)
for N in (3, 10, 50, 200):
    prof = kl.kernel_profile(1, N, beta)
    bound = -0.3 / (1 + 4 * math.pi**2 * beta * (N + 1) ** 2)
    print(f"N={N:4d}  min={prof.min_value:+.5f}  reference bound {bound:+.5f}  L1={prof.l1_norm:.5f}")

# The tail K_inf - K_N has mass ~ log(N+2)/(1 + beta N^2); the normalised
# ratio stays in a narrow band.
for N in (2, 8, 32, 128):
    t = kl.tail_l1_norm(1, N, 1.0)
    print(f"N={N:4d}  tail={t.value:.3e}  ratio={t.ratio:.5f}")

# Bessel kernels F_{N,s} stay positive only above the root of f_1.
ce = kl.critical_exponent()
print("critical exponent s* =", ce.s_star, "bracket", ce.bracket)

# The Gamma-ratio integral and its correction term.
a = kl.a_beta(1 / (4 * math.pi**2), 0.3)
print("-A_beta(0.3) =", -a.value, " first integral =", a.first_integral)
