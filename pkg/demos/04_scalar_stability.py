"""
Scalar stability, counterexamples and amplification sums
========================================================

The IMEX nonlinearity f(x) = (1+tau)x - tau x^3 decides which bounds survive a
step.  Below: its envelope, the step size where two landmarks meet, explicit
one-step overshoots, and the collocation sums that let bounded node data
grow by a fixed fraction.
"""

import math

import numpy as np

from specmp import stability_lab as sl

for tau, alpha in ((0.5, 1.0), (2.0, math.sqrt(2)), (1.0, 2.0)):
    r = sl.cubic_envelope(tau, alpha)
    print(f"tau={tau}  alpha={alpha:.4f}  envelope={r.envelope:.6f} ({r.attained_at})")

it = sl.prototype_iteration(0.25, 1e-3, 2.0, n_max=8)
print("prototype iteration:", np.round(it.alphas, 5), "sandwich ok:", it.lower_ok and it.upper_ok)

t1 = sl.tau1_root()
print("tau1 =", t1.root, "closed form gap", abs(t1.root - t1.closed_form))

w = sl.counterexample_prop_small_tau()
print("small-step overshoot", w.overshoot, "> (3/8) delta^2 =", w.threshold)
w2 = sl.counterexample_tau2(0.05)
print(f"tau=2 witness: N={w2.N} |u1| - sqrt2 = {w2.overshoot:.3e}")

print("heat coefficients k0=1:", sl.heat_beta(1.0, 3))
print("resolvent coefficients k1=1/2:", sl.resolvent_beta(0.5, 4))
for N in (128, 256, 512, 1024):
    a = sl.adversarial_data(N, "heat")
    r = sl.adversarial_data(N, "resolvent")
    print(f"N={N:5d}  adversarial heat {a.achieved:.6f}  resolvent {r.achieved:.6f}")
