"""Double-row transfer matrices, their normalization, the inversion identity and the
Hamiltonian limit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .linkstates import LinkBasis, SeamLayout, apply_generator, build_basis
from .tangle import (
    HALF_PI,
    QUARTER_PI,
    OperatorMatrix,
    SingularNormalization,
    boundary_eta,
    chebyshev_u,
    contract_double_row,
)

DEFAULT_PROBES = (math.pi / 6, 0.41)
INIT_STEP = 1e-4


@dataclass(frozen=True)
class TransferParams:
    layout: SeamLayout
    u: float
    xi: float = QUARTER_PI


def build_D(params: TransferParams) -> OperatorMatrix:
    D = contract_double_row(build_basis(params.layout), params.u, params.xi)
    D.meta["normalized"] = False
    return D


def normalization_factor(rho: int, u: float, tol: float = 1e-14) -> float:
    """Scalar f(u) with d(u) = f(u) D(u)."""
    power = rho - 2 if rho % 2 == 0 else rho - 1
    den = math.sin(2 * u) * math.cos(2 * u) ** power
    if abs(den) < tol:
        raise SingularNormalization(f"normalization vanishes at u={u} for rho={rho}")
    return 2 ** (rho - 1) / den


def normalize_d(D: OperatorMatrix, params: TransferParams) -> OperatorMatrix:
    f = normalization_factor(params.layout.rho, params.u)
    meta = dict(D.meta, normalized=True)
    return OperatorMatrix(f * D.entries, D.layout, meta)


def build_d(params: TransferParams) -> OperatorMatrix:
    return normalize_d(build_D(params), params)


def _sine_product(N: int, x: float, plus: bool) -> float:
    """cos^{2N}u +/- sin^{2N}u, divided by cos^2 u - sin^2 u in the minus case, as a
    product over zeros in y = sin^2 2u."""
    if plus:
        if N % 2:
            angles = [j * math.pi / N for j in range(1, (N - 1) // 2 + 1)]
        else:
            angles = [(2 * j - 1) * math.pi / (2 * N) for j in range(1, N // 2 + 1)]
    else:
        if N % 2:
            angles = [(2 * j - 1) * math.pi / (2 * N) for j in range(1, (N - 1) // 2 + 1)]
        else:
            angles = [j * math.pi / N for j in range(1, N // 2)]
    y = math.sin(2 * x) ** 2
    return math.prod(1.0 - math.sin(t) ** 2 * y for t in angles)


def inversion_rhs(params: TransferParams) -> float:
    """Scalar multiple of the identity equal to d(u) d(u + pi/2)."""
    N, u = params.layout.N, params.u
    if params.layout.rho % 2 == 0:
        return (math.cos(u) ** (2 * N) + math.sin(u) ** (2 * N)) ** 2
    return _sine_product(N, u, plus=False) ** 2


def unnormalized_rhs(params: TransferParams) -> float:
    """Scalar D(u) D(u + pi/2) at xi = pi/4, written through the boundary normalization eta."""
    layout, u = params.layout, params.u
    eta = boundary_eta(layout.rho, u, QUARTER_PI, HALF_PI)
    q = _sine_product(layout.N, u, plus=layout.rho % 2 == 0)
    # the plus branch is not divided by cos 2u yet
    if layout.rho % 2 == 0:
        c2 = math.cos(2 * u)
        return -math.sin(2 * u) ** 2 * (eta / c2) ** 2 * q ** 2 if c2 else -(
            math.sin(2 * u) ** 2 * 0.25 ** (layout.rho - 1) * math.cos(2 * u) ** (2 * layout.rho - 4) * q ** 2)
    return -math.sin(2 * u) ** 2 * eta ** 2 * q ** 2


@dataclass
class CheckReport:
    layout: SeamLayout
    us: List[float]
    checks: Dict[str, float]

    def to_dict(self) -> dict:
        return {"sector": self.layout.to_dict(), "u": self.us, "checks": self.checks}


def functional_checks(layout: SeamLayout, us: Sequence[float], xi: float = QUARTER_PI) -> CheckReport:
    """Max deviations of the inversion identity, crossing symmetry, commutation and
    the initial condition over the probe points ``us``."""
    basis = build_basis(layout)
    D = lambda x: contract_double_row(basis, x, xi).entries  # noqa: E731
    ident = np.eye(len(basis))
    inv = cross = comm = unnorm = 0.0
    us = list(us)
    for i, u in enumerate(us):
        v = us[(i + 1) % len(us)] if len(us) > 1 else u + 0.3
        Du, Du2 = D(u), D(u + HALF_PI)
        p = TransferParams(layout, u, xi)
        rhs = inversion_rhs(p)
        dd = normalization_factor(layout.rho, u) * normalization_factor(layout.rho, u + HALF_PI) * (Du @ Du2)
        inv = max(inv, float(np.abs(dd - rhs * ident).max()) / abs(rhs))
        if abs(xi - QUARTER_PI) < 1e-15:
            target = unnormalized_rhs(p)
            raw = Du @ Du2
            unnorm = max(unnorm, float(np.abs(raw - target * ident).max()) / max(abs(target), 1e-300))
        cross = max(cross, float(np.abs(D(HALF_PI - u) - Du).max()))
        Dv = D(v)
        comm = max(comm, float(np.abs(Du @ Dv - Dv @ Du).max()))
    d0 = normalization_factor(layout.rho, INIT_STEP) * D(INIT_STEP)
    init = float(np.abs(d0 - ident).max())
    checks = {"inversion": inv, "crossing": cross, "commute": comm, "init": init}
    if abs(xi - QUARTER_PI) < 1e-15:
        checks["unnormalized"] = unnorm
    return CheckReport(layout, us, checks)


# ---------------------------------------------------------------------------
# Hamiltonian limit


def word_matrix(basis: LinkBasis, word: Sequence[int]) -> np.ndarray:
    """Matrix of e_{w_1} e_{w_2} ... e_{w_k} (rightmost acts first) at beta = 0 on the
    seam quotient: loops and seam-violating images are dropped."""
    n = len(basis)
    M = np.zeros((n, n))
    for c, st in enumerate(basis.states):
        cur = st
        for j in reversed(word):
            cur, loops = apply_generator(cur, j)
            if loops:
                break
        else:
            k = basis.index.get(cur)
            if k is not None:
                M[k, c] += 1.0
    return M


def boundary_projector(basis: LinkBasis) -> np.ndarray:
    """P_N^(rho) at beta = 0 on the seam nodes adjoining the bulk."""
    N, rho = basis.layout.N, basis.layout.rho
    P = np.zeros((len(basis), len(basis)))
    for k in range(rho - 1):
        coef = (-1) ** k * chebyshev_u(rho - k - 2, 0.0)
        if coef:
            P += coef * word_matrix(basis, list(range(N, N + k + 1)))
    return P


def hamiltonian(layout: SeamLayout, xi: float = QUARTER_PI) -> OperatorMatrix:
    """H with d(u) = I - 2u H + O(u^2)."""
    basis = build_basis(layout)
    H = np.zeros((len(basis), len(basis)))
    for j in range(1, layout.N):
        H -= word_matrix(basis, [j])
    if layout.rho > 1:
        coupling = math.sin(xi) * math.sin(xi + layout.rho * HALF_PI)
        if abs(coupling) < 1e-14:
            raise SingularNormalization(f"boundary coupling vanishes at xi={xi}")
        H += boundary_projector(basis) / coupling
    return OperatorMatrix(H, layout, {"xi": xi, "lambda": HALF_PI, "kind": "hamiltonian"})


def hamiltonian_fd(layout: SeamLayout, h: float = 1e-5, xi: float = QUARTER_PI) -> np.ndarray:
    """Finite-difference estimate -(d(h) - I)/(2h)."""
    d = build_d(TransferParams(layout, h, xi)).entries
    return -(d - np.eye(d.shape[0])) / (2 * h)
