"""Free energies and conformal data from finite-size groundstate energies.

The energy E = -ln d of an eigenvalue of the normalized transfer matrix behaves as

    E ~ 2 N f_bulk + f_bdy + (2 pi sin 2u / N) (-c/24 + Delta + k)

so subtracting the two free energies and fitting the remainder in 1/N gives c or Delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .linkstates import DomainError, SeamLayout
from .spectra import groundstate_pattern, pattern_value
from .transfer import TransferParams, build_d

CENTRAL_CHARGE = -2
QUAD_TOL = 1e-12
MAX_CONDITION = 1e12


class FitError(RuntimeError):
    """The least-squares problem is singular or badly conditioned."""


def bulk_free_energy(u: float) -> float:
    """Bulk free energy per face, -(1/pi) int_0^{pi/2} ln(1 + sin t sin 2u) dt."""
    if not 0 <= u < math.pi / 2:
        raise DomainError(f"u must lie in [0, pi/2), got {u}")
    y = math.sin(2 * u)
    if y == 0.0:
        return 0.0
    val, err = quad(lambda t: math.log1p(math.sin(t) * y), 0.0, math.pi / 2,
                    epsabs=QUAD_TOL, epsrel=QUAD_TOL, limit=200)
    if err > 10 * QUAD_TOL:
        raise ArithmeticError(f"quadrature error estimate {err:.3g} exceeds tolerance")
    return -val / math.pi


def boundary_free_energy(u: float, rho_parity: str, s_parity: str) -> float:
    """Order-one term of the groundstate energy.

    Pairing the levels t and pi - t turns the product over levels into a trapezoid
    (s odd) or midpoint (s even) sum over (0, pi).  For odd rho the level at
    t = pi/2 is unpaired and divided out by the normalization, which leaves
    ln(1 + sin 2u).  The parity of s does not enter.
    """
    if rho_parity not in ("even", "odd") or s_parity not in ("even", "odd"):
        raise DomainError(f"parities must be 'even' or 'odd', got {rho_parity!r}, {s_parity!r}")
    if not 0 <= u < math.pi / 2:
        raise DomainError(f"u must lie in [0, pi/2), got {u}")
    return 0.0 if rho_parity == "even" else math.log1p(math.sin(2 * u))


def kac_data(r: int, s: int) -> Tuple[Fraction, int, int]:
    """Conformal weight and the two seam lengths realizing (r, s)."""
    if r < 1 or s < 1:
        raise DomainError(f"r, s must be positive, got ({r}, {s})")
    return Fraction((2 * r - s) ** 2 - 1, 8), 2 * r, 2 * r - 1


def _parity(k: int) -> str:
    return "even" if k % 2 == 0 else "odd"


def sector_sizes(r: int, s: int, rho_parity: str, N_max: int, N_min: int = 2) -> List[int]:
    """Bulk widths in [N_min, N_max] compatible with the sector parity."""
    rho = 2 * r if rho_parity == "even" else 2 * r - 1
    return [N for N in range(N_min, N_max + 1) if (N + rho + s) % 2 == 0]


def groundstate_energy(r: int, s: int, rho_parity: str, N: int, u: float,
                       source: str = "pattern") -> float:
    """-ln of the largest eigenvalue of d(u).

    ``source="pattern"`` evaluates the sector groundstate sign pattern in closed form;
    ``source="diag"`` diagonalizes d(u) directly.
    """
    layout = SeamLayout.from_kac(N, r, s, rho_parity)
    if source == "pattern":
        return -math.log(pattern_value(groundstate_pattern(N, r, s), u, N, s))
    if source == "diag":
        w = np.linalg.eigvals(build_d(TransferParams(layout, u)).entries)
        return -math.log(float(w.real.max()))
    raise ValueError(f"unknown source {source!r}")


@dataclass
class ConformalFit:
    u: float
    sector: Tuple[int, int, str]
    N_list: List[int]
    E_list: List[float]
    f_bulk: float
    f_bdy: float
    A: float
    B: float
    c_est: float
    delta_est: float
    residuals: List[float]
    condition: float
    delta_exact: Fraction = field(default=Fraction(0))

    def reduced(self) -> List[float]:
        """E with the bulk and boundary free energies removed."""
        return [E - 2 * N * self.f_bulk - self.f_bdy for N, E in zip(self.N_list, self.E_list)]

    def predicted(self) -> List[float]:
        k = 2 * math.pi * math.sin(2 * self.u)
        return [k * self.A / N + self.B / N ** 2 for N in self.N_list]

    def summary(self) -> dict:
        return {"u": self.u, "sector": {"r": self.sector[0], "s": self.sector[1], "rho_parity": self.sector[2]},
                "c_est": self.c_est, "delta_est": self.delta_est,
                "delta_exact": str(self.delta_exact), "A": self.A, "B": self.B,
                "residual": float(np.linalg.norm(self.residuals)), "condition": self.condition}


def fit_finite_size(N_list: Sequence[int], reduced: Sequence[float], u: float) -> Tuple[float, float, np.ndarray, float]:
    """Least-squares fit of reduced energies to (2 pi sin 2u / N) A + B / N^2."""
    N = np.asarray(N_list, dtype=float)
    k = 2 * math.pi * math.sin(2 * u)
    X = np.column_stack([k / N, 1.0 / N ** 2])
    # scale columns so the condition number reflects the data, not the units
    norms = np.linalg.norm(X, axis=0)
    if not np.all(norms > 0):
        raise FitError("degenerate design matrix")
    cond = float(np.linalg.cond(X / norms))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise FitError(f"condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}")
    coef, *_ = np.linalg.lstsq(X, np.asarray(reduced, dtype=float), rcond=None)
    return float(coef[0]), float(coef[1]), np.asarray(reduced) - X @ coef, cond


def fit_conformal(sector: Tuple[int, int, str], N_list: Sequence[int], u: float = math.pi / 6,
                  source: str = "pattern") -> ConformalFit:
    """Fit groundstate energies of a sector; returns A = -c/24 + Delta and both readings."""
    r, s, rho_parity = sector
    rho = 2 * r if rho_parity == "even" else 2 * r - 1
    N_list = sorted(set(int(N) for N in N_list))
    if len(N_list) < 3:
        raise FitError(f"need at least three sizes, got {N_list}")
    bad = [N for N in N_list if (N + rho + s) % 2]
    if bad:
        raise DomainError(f"sizes {bad} violate N + rho + s even for rho={rho}, s={s}")
    fb = bulk_free_energy(u)
    fd = boundary_free_energy(u, rho_parity, _parity(s))
    E = [groundstate_energy(r, s, rho_parity, N, u, source) for N in N_list]
    reduced = [e - 2 * N * fb - fd for N, e in zip(N_list, E)]
    A, B, res, cond = fit_finite_size(N_list, reduced, u)
    delta, _, _ = kac_data(r, s)
    c_est = -24 * (A - float(delta))
    delta_est = A + CENTRAL_CHARGE / 24
    return ConformalFit(u, (r, s, rho_parity), N_list, E, fb, fd, A, B, c_est, delta_est,
                        [float(x) for x in res], cond, delta)
