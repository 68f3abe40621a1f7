"""The r-type boundary operator at a generic crossing parameter collapses to the
identity plus a multiple of a generalized projector.

Run: python demos/04_boundary_operator.py
"""

import math

import numpy as np

from densepoly.tangle import (
    boundary_basis, boundary_operator_planar, generalized_projector, proposition_coefficient,
    verify_projector_properties,
)

lam, u, xi = math.pi / 3, 0.41, 0.77
for rho in range(2, 6):
    basis = boundary_basis(rho - 1)
    K = boundary_operator_planar(rho, u, xi, lam, basis).entries
    P = basis.restrict(generalized_projector(rho, 0, lam, basis))
    c = proposition_coefficient(rho, u, xi, lam)
    dev = np.abs(K - np.eye(len(K)) - c * P).max()
    print(f"rho={rho}: dim {len(K)}, coefficient {c:+.6f}, |K - I - cP| = {dev:.1e}")

print("\nprojector identities at lambda = 2 pi / 5:")
for rho in range(2, 5):
    devs = verify_projector_properties(rho, rho, 2 * math.pi / 5)
    print(f"  rho={rho}:", {k: f"{v:.1e}" for k, v in devs.items()})
