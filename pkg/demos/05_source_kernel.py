"""The correlation kernel, twice, and the identity joining the forms.

All eigenvalue correlations of the diffusing ensemble are determinants
of one kernel K_n(x, y). It is built here as a chain sum of transform
pairs over a nested multiplicity ladder; for the symmetric two-source
start the same kernel has a closed double-integral form. The two share
no code - different contours, different integrands - so their
agreement to many digits checks both constructions at once. The
algebraic hinge is a telescoped double geometric sum, checked exactly.

Run: python3 demos/05_source_kernel.py  (a few seconds)
"""

import math

import numpy as np

from dysonflow import (
    MultiplicityChain,
    SourceSpectrum,
    kernel,
    kernel_bh,
    source_sum_identity,
    theta_fn,
)

pair = SourceSpectrum.symmetric_pair(1.0, 4)

# --- the ladder behind the chain sum -----------------------------------

chain = MultiplicityChain.for_source(pair)
print("multiplicity ladder for the +-1 source with n = 4:")
print("  " + " -> ".join(str(m) for m in chain.sequence))
print("each rung adds one eigenvalue; the kernel pairs the两 transforms")
print("across consecutive rungs and sums the products.\n")

# --- one transform piece has an exact residue ---------------------------

got = theta_fn(SourceSpectrum.null(1), (1,), 1.0, 0.0)
print("simplest loop piece, n = 1 at the origin:")
print(f"  theta = {got:.12f}")
print(f"  exact = {-1j * math.sqrt(2.0 * math.pi):.12f}  (pure residue)\n")

# --- chain sum vs closed-form double integral ---------------------------

print("chain-sum kernel vs the double-integral form, n = 4, tau = 1:")
print(f"{'x':>6} {'y':>6} {'K chain':>22} {'rel err':>10}")
for x in (-0.8, 0.0, 0.7):
    for y in (-0.5, 0.6):
        ks = kernel(pair, 1.0, x, y)
        kb = kernel_bh(1.0, 4, 1.0, x, y)
        rel = abs(ks - kb) / abs(kb)
        print(f"{x:6.2f} {y:6.2f} {str(np.round(ks, 8)):>22} {rel:10.1e}")
print()

# --- the algebraic identity underneath ----------------------------------

rng = np.random.default_rng(12)
worst = 0.0
for _ in range(200):
    q = complex(*rng.uniform(-2, 2, 2))
    u = complex(*rng.uniform(-2, 2, 2))
    if min(abs(u - 1), abs(u + 1), abs(u + 1j * q)) < 1e-2:
        continue
    lhs, rhs = source_sum_identity(q, u, 1.0, 4)
    worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
print("telescoped double geometric sum vs its closed form,")
print(f"200 random (q, u) points: worst relative gap {worst:.2e}")
