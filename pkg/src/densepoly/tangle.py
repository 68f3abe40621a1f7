"""Planar face contractions: the double-row tangle and the r-type boundary operator.

Face operators are ``X(w) = s(lam - w) e + s(w) I`` with ``s(x) = sin x / sin lam``.
Matrices act on column vectors: ``A @ B`` applies ``B`` first, so a diagram
stacked below another corresponds to left multiplication.

States carrying an arc closed inside a seam span a subspace that every
seam-respecting operator maps into itself; operators are reported on the
quotient by that subspace, i.e. as the admissible-admissible block.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .linkstates import (
    DomainError,
    LinkBasis,
    LinkState,
    SeamLayout,
    apply_generator,
    build_basis,
    enumerate_matchings,
    glue,
    seam_admissible,
)

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4


class ContractionError(RuntimeError):
    """Internal inconsistency in a contraction; signals a bug, not bad input."""


class SingularNormalization(ArithmeticError):
    """A normalizing denominator vanished."""


def chebyshev_u(k: int, beta: float) -> float:
    """U_k(beta/2) by the three-term recurrence, with U_{-1} = 0.

    At beta = 0 the values are taken exactly from {1, 0, -1}.
    """
    if k == -1:
        return 0.0
    if k < -1:
        return -chebyshev_u(-k - 2, beta)
    if beta == 0.0:
        return float((0, 1, 0, -1)[(k + 1) % 4] if k % 2 == 0 else 0)
    prev, cur = 0.0, 1.0
    for _ in range(k):
        prev, cur = cur, beta * cur - prev
    return cur


# ---------------------------------------------------------------------------
# face grid description


@dataclass(frozen=True)
class Face:
    row: int  # 0 bottom, 1 top
    col: int  # 1-based column
    arg: float  # spectral argument w of X(w)
    frozen: Optional[str] = None  # "A" (pure e) or "B" (identity) for s-seam faces


@dataclass(frozen=True)
class FaceGrid:
    layout: SeamLayout
    faces: Tuple[Face, ...]
    u: float
    xi: float
    lam: float = HALF_PI

    @property
    def beta(self) -> float:
        return 2 * math.cos(self.lam)

    def xi_j(self, j: int) -> float:
        return self.xi + j * self.lam


def face_args(layout: SeamLayout, u: float, xi: float, lam: float = HALF_PI) -> FaceGrid:
    """Spectral arguments of every face of the double-row tangle."""
    faces = []
    N, rho = layout.N, layout.rho
    for c in range(1, layout.n + 1):
        if c <= N:
            faces += [Face(0, c, u), Face(1, c, lam - u)]
        elif c < N + rho:
            v = xi + (rho - (c - N)) * lam
            faces += [Face(0, c, u - v), Face(1, c, lam - u - v)]
        else:
            faces += [Face(0, c, 0.0, "A"), Face(1, c, 0.0, "B")]
    return FaceGrid(layout, tuple(faces), u, xi, lam)


# ---------------------------------------------------------------------------
# operator container


@dataclass
class OperatorMatrix:
    entries: np.ndarray
    layout: Optional[SeamLayout] = None
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        a = self.entries
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ContractionError(f"operator must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise FloatingPointError("non-finite entries in operator")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> str:
        payload = {
            "basis": self.layout.to_dict() if self.layout else None,
            **{k: v for k, v in self.meta.items()},
            "entries": self.entries.tolist(),
        }
        return json.dumps(payload)

    def to_bytes(self) -> bytes:
        """Column-major float64 dump."""
        return np.asfortranarray(self.entries, dtype=np.float64).tobytes(order="F")


# ---------------------------------------------------------------------------
# frontier contraction of the double-row tangle


@dataclass
class _Plan:
    """u-independent structure of the contraction for one layout."""

    layout: SeamLayout
    steps: List[tuple]
    out_map: sp.csr_matrix  # basis x final frontier states
    n_in: int
    loop_drops: int = 0
    quotient_drops: int = 0
    peak: int = 0


def _step_face(states: List[LinkState], pos: int, counter: List[int]):
    index = {st: i for i, st in enumerate(states)}
    rows, cols = [], []
    new = list(states)
    for i, st in enumerate(states):
        out, loops = apply_generator(st, pos)
        if loops:
            counter[0] += 1
            continue
        k = index.get(out)
        if k is None:
            k = index[out] = len(new)
            new.append(out)
        rows.append(k)
        cols.append(i)
    E = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(new), len(states)))
    return new, E


def _step_map(states: List[LinkState], fn, counter: List[int]):
    """Deterministic rewiring (frozen face, glue) as a 0/1 sparse map."""
    index: Dict[LinkState, int] = {}
    new: List[LinkState] = []
    rows, cols = [], []
    for i, st in enumerate(states):
        out, loops = fn(st)
        if loops:
            counter[0] += 1
            continue
        k = index.get(out)
        if k is None:
            k = index[out] = len(new)
            new.append(out)
        rows.append(k)
        cols.append(i)
    E = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(new), len(states)))
    return new, E


@lru_cache(maxsize=64)
def _plan(layout: SeamLayout, full: bool = False) -> _Plan:
    """Frontier plan; ``full`` uses every matching on both sides and skips the quotient."""
    n = layout.n
    if full:
        states_in = tuple(enumerate_matchings(n))
        basis = LinkBasis(layout, states_in, {st: i for i, st in enumerate(states_in)})
        seams: List[set] = []
    else:
        basis = build_basis(layout)
        seams = [set(layout.r_seam), set(layout.s_seam)]
    states = [(2, 1) + tuple(p + 2 for p in st) + (n + 4, n + 3) for st in basis.states]
    loops = [0]
    steps: List[tuple] = []
    peak = len(states)
    pruned = 0
    for c in range(1, n + 1):
        s_col = c >= layout.N + layout.rho
        # top face: frontier slots (l1, t_c) -> (mid, r1)
        if not s_col:
            states, E = _step_face(states, c + 1, loops)
            steps.append(("face", c, 1, E))
        # bottom face: (l0, mid) -> (b_c, r0)
        if s_col:
            states, E = _step_map(states, lambda st, p=c: apply_generator(st, p), loops)
            steps.append(("map", E))
        else:
            states, E = _step_face(states, c, loops)
            steps.append(("face", c, 0, E))
        # b_c is final: a closed arc inside its seam can never reopen
        for S in seams:
            if c in S:
                keep = [i for i, st in enumerate(states) if not (st[c - 1] < c and st[c - 1] in S)]
                if len(keep) < len(states):
                    pruned += len(states) - len(keep)
                    steps.append(("select", np.asarray(keep, dtype=np.int64)))
                    states = [states[i] for i in keep]
        peak = max(peak, len(states))

    def close_right(st):
        a, l1 = glue(st, n + 2)
        if l1:
            return a, 1
        return glue(a, n + 1)

    states, E = _step_map(states, close_right, loops)
    steps.append(("map", E))
    rows, cols = [], []
    for i, st in enumerate(states):
        k = basis.index.get(st)
        if k is None:
            if len(st) != n:
                raise ContractionError(f"frontier closed on {len(st)} nodes, expected {n}")
            pruned += 1
            continue
        rows.append(k)
        cols.append(i)
    out_map = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(basis), len(states)))
    return _Plan(layout, steps, out_map, len(basis), loops[0], pruned, peak)


def plan_statistics(layout: SeamLayout) -> Dict[str, int]:
    """Frontier sizes and the number of branches dropped by loops or the seam quotient."""
    p = _plan(layout)
    return {"peak_frontier": p.peak, "loop_drops": p.loop_drops, "quotient_drops": p.quotient_drops,
            "steps": len(p.steps)}


def _face_weights(arg: float, lam: float = HALF_PI) -> Tuple[float, float]:
    """(weight of e, weight of identity)."""
    sl = math.sin(lam)
    return math.sin(lam - arg) / sl, math.sin(arg) / sl


def contract_double_row(basis: LinkBasis, u: float, xi: float = QUARTER_PI,
                        chunk_entries: int = 4_000_000) -> OperatorMatrix:
    """Double-row transfer matrix D(u) on the seam-restricted basis (lambda = pi/2)."""
    layout = basis.layout
    D = _evaluate(_plan(layout), u, xi, chunk_entries)
    return OperatorMatrix(D, layout, {"u": u, "xi": xi, "lambda": HALF_PI, "normalized": False})


def seam_leak(layout: SeamLayout, u: float, xi: float = QUARTER_PI) -> Tuple[float, np.ndarray]:
    """Contract on the unrestricted space; returns the largest admissible <- inadmissible
    entry and the admissible block, which must agree with :func:`contract_double_row`."""
    plan = _plan(layout, full=True)
    D = _evaluate(plan, u, xi, 4_000_000)
    states = enumerate_matchings(layout.n)
    adm = np.array([seam_admissible(st, layout) for st in states])
    leak = float(np.abs(D[np.ix_(adm, ~adm)]).max()) if (~adm).any() else 0.0
    return leak, D[np.ix_(adm, adm)]


def _evaluate(plan: _Plan, u: float, xi: float, chunk_entries: int) -> np.ndarray:
    layout = plan.layout
    grid = face_args(layout, u, xi)
    args = {(f.row, f.col): f.arg for f in grid.faces}
    n_in = plan.n_in
    peak = max(plan.peak, 1)
    width = max(1, min(n_in, chunk_entries // peak))
    D = np.zeros((n_in, n_in))
    for start in range(0, n_in, width):
        stop = min(n_in, start + width)
        X = np.zeros((n_in, stop - start))
        X[np.arange(start, stop), np.arange(stop - start)] = 1.0
        for step in plan.steps:
            kind = step[0]
            if kind == "face":
                _, c, row, E = step
                a, b = _face_weights(args[(row, c)])
                Y = E @ X
                Y *= a
                Y[: X.shape[0]] += b * X
                X = Y
            elif kind == "map":
                X = step[1] @ X
            else:
                X = X[step[1]]
        D[:, start:stop] = plan.out_map @ X
    if not np.all(np.isfinite(D)):
        raise FloatingPointError(f"non-finite entries in D(u={u})")
    return D


# ---------------------------------------------------------------------------
# r-type boundary operator at general crossing parameter


@dataclass(frozen=True)
class BoundaryBasis:
    """Link states on ``free`` external nodes followed by ``seam`` seam nodes.

    ``e_0`` joins the last external node to the first seam node, ``e_k``
    joins seam nodes ``k`` and ``k+1``.
    """

    free: int
    seam: int
    states: Tuple[LinkState, ...]
    admissible: Tuple[int, ...]

    @property
    def offset(self) -> int:
        return self.free

    def restrict(self, A: np.ndarray) -> np.ndarray:
        idx = np.asarray(self.admissible)
        return A[np.ix_(idx, idx)]

    def leak(self, A: np.ndarray) -> float:
        """Largest admissible <- inadmissible entry; zero iff the seam quotient is well defined."""
        bad = np.setdiff1d(np.arange(len(self.states)), self.admissible)
        if len(bad) == 0:
            return 0.0
        return float(np.abs(A[np.ix_(list(self.admissible), bad)]).max())


@lru_cache(maxsize=None)
def boundary_basis(seam: int, free: Optional[int] = None) -> BoundaryBasis:
    """Smallest link space in which ``seam`` seam nodes can all reach the outside.

    The default uses ``seam + 2`` external nodes, which keeps the total even
    and leaves room for the words e_0 e_1 ... e_k to be linearly independent.
    """
    if seam < 0:
        raise DomainError("seam length must be non-negative")
    free = seam + 2 if free is None else free
    if (free + seam) % 2:
        raise DomainError("free + seam must be even")
    states = tuple(enumerate_matchings(free + seam))
    seam_nodes = range(free + 1, free + seam + 1)
    adm = tuple(i for i, st in enumerate(states)
                if not any(st[k - 1] in seam_nodes for k in seam_nodes))
    return BoundaryBasis(free, seam, states, adm)


def tl_generator(basis: BoundaryBasis, k: int, beta: float) -> np.ndarray:
    """Matrix of e_k on the full (unrestricted) link space of ``basis``."""
    pos = basis.offset + k
    n = len(basis.states)
    if not 1 <= pos < basis.free + basis.seam:
        raise DomainError(f"e_{k} out of range")
    index = {st: i for i, st in enumerate(basis.states)}
    E = np.zeros((n, n))
    for c, st in enumerate(basis.states):
        out, loops = apply_generator(st, pos)
        E[index[out], c] += beta ** loops
    return E


def generalized_projector(rho: int, start: int, lam: float, basis: BoundaryBasis) -> np.ndarray:
    """P_start^(rho) = sum_k (-1)^k U_{rho-k-2}(beta/2) e_start ... e_{start+k} (full space)."""
    if rho < 2:
        raise DomainError("projector needs rho >= 2")
    beta = 2 * math.cos(lam)
    if start < 0 or start + rho - 2 > basis.seam - 1:
        raise DomainError(f"indices {start}..{start + rho - 2} out of range for seam {basis.seam}")
    dim = len(basis.states)
    P = np.zeros((dim, dim))
    word = np.eye(dim)
    for k in range(rho - 1):
        word = word @ tl_generator(basis, start + k, beta)
        P += (-1) ** k * chebyshev_u(rho - k - 2, beta) * word
    return P


def _s(x: float, lam: float) -> float:
    return math.sin(x) / math.sin(lam)


def boundary_eta(rho: int, u: float, xi: float, lam: float) -> float:
    return math.prod(_s(u + xi + (j - 1) * lam, lam) * _s(u - xi - (j + 1) * lam, lam)
                     for j in range(1, rho))


def boundary_operator_planar(rho: int, u: float, xi: float, lam: float,
                             basis: Optional[BoundaryBasis] = None, tol: float = 1e-9) -> OperatorMatrix:
    """K^(rho)(u, xi) as the ordered product of face operators, restricted to the seam quotient."""
    if rho < 1:
        raise DomainError("rho must be >= 1")
    if not 0 < lam < math.pi:
        raise DomainError("lambda must lie in (0, pi)")
    basis = basis or boundary_basis(rho - 1)
    if basis.seam < rho - 1:
        raise DomainError("basis seam too short")
    beta = 2 * math.cos(lam)
    dim = len(basis.states)
    eta = boundary_eta(rho, u, xi, lam)
    if abs(eta) < 1e-300:
        raise SingularNormalization(f"eta vanishes at u={u}, xi={xi}")
    I = np.eye(dim)
    gens = [tl_generator(basis, j, beta) for j in range(rho - 1)]
    K = I.copy()
    # X_0(u - xi_{rho-1}) ... X_{rho-2}(u - xi_1) X_{rho-2}(u + xi_1) ... X_0(u + xi_{rho-1})
    for j in range(rho - 1):
        w = u - (xi + (rho - 1 - j) * lam)
        K = K @ (_s(lam - w, lam) * I + _s(w, lam) * gens[j])
    for j in reversed(range(rho - 1)):
        w = u + (xi + (rho - 1 - j) * lam)
        K = K @ (_s(lam - w, lam) * I + _s(w, lam) * gens[j])
    K /= eta
    leak = basis.leak(K)
    if leak > tol * max(1.0, float(np.abs(K).max())):
        raise ContractionError(f"boundary operator mixes seam-violating states into admissible ones ({leak:.3g})")
    return OperatorMatrix(basis.restrict(K), None,
                          {"rho": rho, "u": u, "xi": xi, "lambda": lam, "normalized": True})


def proposition_coefficient(rho: int, u: float, xi: float, lam: float) -> float:
    return _s(2 * u, lam) / (_s(u + xi, lam) * _s(u - xi - rho * lam, lam))


def verify_boundary_proposition(rho: int, u: float, xi: float, lam: float,
                                basis: Optional[BoundaryBasis] = None) -> float:
    """Deviation of K from I + c P_0^(rho), relative to max(1, |c|).

    Also reads the coefficients of the words I, e_0, e_0 e_1, ... off K and
    compares them with the closed-form expansion coefficients.
    """
    basis = basis or boundary_basis(rho - 1)
    K = boundary_operator_planar(rho, u, xi, lam, basis).entries
    if rho == 1:
        return float(np.abs(K - np.eye(K.shape[0])).max())
    beta = 2 * math.cos(lam)
    c = proposition_coefficient(rho, u, xi, lam)
    P = basis.restrict(generalized_projector(rho, 0, lam, basis))
    scale = max(1.0, abs(c))
    dev = float(np.abs(K - np.eye(K.shape[0]) - c * P).max()) / scale
    # read the coefficients of I, e_0, e_0 e_1, ... off K by least squares
    dim = len(basis.states)
    words = [np.eye(dim)]
    for j in range(rho - 1):
        words.append(words[-1] @ tl_generator(basis, j, beta))
    W = np.stack([basis.restrict(w).ravel() for w in words], axis=1)
    alpha, *_ = np.linalg.lstsq(W, K.ravel(), rcond=None)
    expected = [1.0] + [(-1) ** (i - 1) * chebyshev_u(rho - i - 1, beta) * c for i in range(1, rho)]
    dev = max(dev, float(np.abs(alpha - expected).max()) / scale)
    dev = max(dev, float(np.abs(W @ alpha - K.ravel()).max()) / scale)
    return dev


def verify_projector_properties(rho: int, rho_prime: int, lam: float,
                                basis: Optional[BoundaryBasis] = None) -> Dict[str, float]:
    """Projector identities on the seam quotient; returns the deviation of each."""
    beta = 2 * math.cos(lam)
    seam = max(rho, rho_prime)
    basis = basis or boundary_basis(seam)
    R = basis.restrict
    P0 = generalized_projector(rho, 0, lam, basis)
    P0p = generalized_projector(rho_prime, 0, lam, basis)
    P1 = generalized_projector(rho, 1, lam, basis)
    P0next = generalized_projector(rho + 1, 0, lam, basis)
    e0 = tl_generator(basis, 0, beta)
    U = lambda k: chebyshev_u(k, beta)  # noqa: E731
    return {
        "product": float(np.abs(R(P0p @ P0 - U(rho_prime - 1) * P0)).max()),
        "P1_e0": float(np.abs(R(P1 @ e0)).max()),
        "e0_P1": float(np.abs(R(e0 @ P1 - U(rho - 1) * e0 + P0next)).max()),
        "e0_P1_e0": float(np.abs(R(e0 @ P1 @ e0 - U(rho - 2) * e0)).max()),
    }
