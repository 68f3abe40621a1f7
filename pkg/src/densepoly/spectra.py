"""Eigenvalue classification of d(u) by sign patterns.

Each eigenvalue of the normalized transfer matrix factorizes as

    prod_j (1 + eps_j sin t_j sin 2u)(1 + mu_j sin t_j sin 2u),   eps_j, mu_j = +/-1,

so it is labelled by the number of minus signs at each level j.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .linkstates import SeamLayout
from .qseries import QExpPoly, UNIT
from .transfer import DEFAULT_PROBES, TransferParams, build_d, hamiltonian

MATCH_TOL = 1e-8
IMAG_TOL = 1e-8
CLUSTER_TOL = 1e-6
MAX_LEVELS = 12


class ClassificationError(RuntimeError):
    """An eigenvalue matched no sign pattern."""


class AmbiguityError(ClassificationError):
    """An eigenvalue matched more than one sign pattern at every probe."""


def level_count(N: int, s: int) -> int:
    return (N - 1) // 2 if s % 2 else N // 2


def level_angles(N: int, s: int) -> np.ndarray:
    M = level_count(N, s)
    j = np.arange(1, M + 1)
    return j * np.pi / N if s % 2 else (2 * j - 1) * np.pi / (2 * N)


def level_energies(M: int, s: int) -> List[Fraction]:
    return [Fraction(j) if s % 2 else Fraction(2 * j - 1, 2) for j in range(1, M + 1)]


@dataclass(frozen=True)
class SignPattern:
    """Minus-sign counts per level; entries in {0, 1, 2}.

    ``edge`` is the sign count of the unpaired level at t = pi/2 which only
    occurs for odd rho.  The normalization of d(u) divides that level out, so it
    contributes the ratio (1 - sin 2u)/(1 + sin 2u) when flipped and 1 otherwise.
    """

    minus: Tuple[int, ...]
    edge: int = 0

    def __post_init__(self):
        if any(m not in (0, 1, 2) for m in self.minus):
            raise ValueError(f"minus counts must be 0, 1 or 2: {self.minus}")
        if self.edge not in (0, 1):
            raise ValueError(f"edge count must be 0 or 1: {self.edge}")

    @property
    def M(self) -> int:
        return len(self.minus)


def pattern_value(pattern: SignPattern, u: float, N: int, s: int) -> float:
    t = level_angles(N, s)
    if len(t) != pattern.M:
        raise ValueError(f"pattern has {pattern.M} levels, expected {len(t)}")
    y = math.sin(2 * u)
    x = np.sin(t) * y
    m = np.asarray(pattern.minus)
    value = float(np.prod((1 + x) ** (2 - m) * (1 - x) ** m))
    return value * ((1 - y) / (1 + y)) ** pattern.edge


def edge_energy(N: int) -> Fraction:
    return Fraction(N, 2)


def pattern_energy(pattern: SignPattern, s: int, N: Optional[int] = None) -> Fraction:
    e = sum((m * e for m, e in zip(pattern.minus, level_energies(pattern.M, s))), Fraction(0))
    if pattern.edge:
        if N is None:
            raise ValueError("N is required for patterns with a flipped edge level")
        e += edge_energy(N)
    return e


def hamiltonian_pattern_energy(pattern: SignPattern, N: int, s: int) -> float:
    """Eigenvalue of H for the pattern: minus the u-derivative of d/2 at u = 0."""
    t = level_angles(N, s)
    return float(-np.sum((2 - 2 * np.asarray(pattern.minus)) * np.sin(t))) + 2.0 * pattern.edge


def groundstate_pattern(N: int, r: int, s: int) -> SignPattern:
    """Lowest-energy pattern: one minus sign on each of the first few levels."""
    excess = (abs(2 * r - s) - 1) // 2 if s % 2 else abs(2 * r - s) // 2
    M = level_count(N, s)
    if excess > M:
        raise ValueError(f"N={N} too small for sector (r, s)=({r}, {s})")
    return SignPattern(tuple([1] * excess + [0] * (M - excess)))


@dataclass
class SpectrumRecord:
    pattern: SignPattern
    energy: Fraction
    multiplicity: int
    values: Tuple[float, ...] = ()

    def to_dict(self) -> dict:
        e = self.energy
        return {"minus": list(self.pattern.minus), "edge": self.pattern.edge,
                "energy": f"{e.numerator}/{e.denominator}" if e.denominator != 1 else str(e.numerator),
                "multiplicity": self.multiplicity, "values": list(self.values)}


class _Candidates:
    """All candidate patterns with log-values at one probe, sorted for bisection.

    Rows of ``patterns`` hold the M minus counts followed by the edge count.
    """

    def __init__(self, N: int, s: int, u: float, edge: bool = False):
        M = level_count(N, s)
        if M > MAX_LEVELS:
            raise ValueError(f"{M} levels exceed the enumeration cap {MAX_LEVELS}")
        body = np.array(list(itertools.product((0, 1, 2), repeat=M)), dtype=np.int8).reshape(3 ** M, M)
        y = math.sin(2 * u)
        x = np.sin(level_angles(N, s)) * y
        logs = (2 - body) @ np.log1p(x) + body @ np.log1p(-x) if M else np.zeros(1)
        edges = (0, 1) if edge else (0,)
        rows, vals = [], []
        for e in edges:
            col = np.full((len(body), 1), e, dtype=np.int8)
            rows.append(np.hstack([body, col]))
            vals.append(logs + e * (math.log1p(-y) - math.log1p(y)))
        self.patterns = np.vstack(rows)
        logs = np.concatenate(vals)
        self.order = np.argsort(logs, kind="stable")
        self.logs = logs[self.order]

    def key(self, i: int) -> Tuple[int, ...]:
        return tuple(int(v) for v in self.patterns[i])

    def match(self, value: float, tol: float) -> List[int]:
        if value <= 0:
            return []
        lv = math.log(value)
        lo = np.searchsorted(self.logs, lv - tol, side="left")
        hi = np.searchsorted(self.logs, lv + tol, side="right")
        return [int(self.order[i]) for i in range(lo, hi)]


def cluster_eigenvalues(w: np.ndarray, tol: float = CLUSTER_TOL) -> np.ndarray:
    """Replace each tight cluster by its mean; a perturbed Jordan block keeps an exact trace."""
    w = np.sort_complex(np.asarray(w, dtype=complex))
    out = np.empty(len(w), dtype=complex)
    i = 0
    while i < len(w):
        j = i + 1
        while j < len(w) and abs(w[j] - w[i]) <= tol * max(1.0, abs(w[i])):
            j += 1
        out[i:j] = w[i:j].mean()
        i = j
    return out


def real_spectrum(A: np.ndarray, imag_tol: float = IMAG_TOL) -> np.ndarray:
    w = cluster_eigenvalues(np.linalg.eigvals(A))
    scale = max(1.0, float(np.abs(w).max())) if len(w) else 1.0
    bad = np.abs(w.imag) > imag_tol * scale
    if bad.any():
        raise ClassificationError(f"complex eigenvalues, max |Im| = {np.abs(w.imag).max():.3g}")
    return np.sort(w.real)


def _classify_at(A: np.ndarray, cands: _Candidates, tol: float) -> List[List[int]]:
    """Candidate indices for every eigenvalue of A.

    Raw eigenvalues are matched first.  Leftovers, typically split Jordan blocks, are
    replaced by their cluster means and matched again.
    """
    w = np.linalg.eigvals(A)
    scale = max(1.0, float(np.abs(w).max())) if len(w) else 1.0
    out, rest = [], []
    for v in w:
        hits = cands.match(float(v.real), tol) if abs(v.imag) <= IMAG_TOL * scale else []
        if hits:
            out.append(hits)
        else:
            rest.append(v)
    if rest:
        merged = cluster_eigenvalues(np.array(rest))
        for v in merged:
            if abs(v.imag) > IMAG_TOL * scale:
                raise ClassificationError(f"complex eigenvalue {v!r} survives clustering")
            hits = cands.match(float(v.real), tol)
            if not hits:
                raise ClassificationError(f"eigenvalue {v.real!r} matches no sign pattern within {tol}")
            out.append(hits)
    return out


def classify_spectrum(layout: SeamLayout, probes: Sequence[float] = DEFAULT_PROBES,
                      tol: float = MATCH_TOL, xi: float = math.pi / 4) -> List[SpectrumRecord]:
    """Label every eigenvalue of d(u) by a sign pattern, consistently at all probes."""
    if len(probes) < 2:
        raise ValueError("at least two probes are required")
    N, s = layout.N, layout.s
    per_probe = []
    for u in probes:
        d = build_d(TransferParams(layout, u, xi)).entries
        cands = _Candidates(N, s, u, edge=layout.rho % 2 == 1)
        per_probe.append((d, _classify_at(d, cands, tol), cands))
    # unambiguous labels from each probe must agree as multisets
    counts: List[Counter] = []
    for vals, hits, cands in per_probe:
        c: Counter = Counter()
        for h in hits:
            if len(h) == 1:
                c[cands.key(h[0])] += 1
            else:
                c[tuple(sorted(cands.key(k) for k in h))] += 1
        counts.append(c)
    resolved = _resolve(counts)
    records = []
    for pat, mult in resolved.items():
        P = SignPattern(tuple(pat[:-1]), pat[-1])
        records.append(SpectrumRecord(P, pattern_energy(P, s, N), mult,
                                      tuple(pattern_value(P, u, N, s) for u in probes)))
    records.sort(key=lambda r: (r.energy, r.pattern.edge, r.pattern.minus))
    total = sum(r.multiplicity for r in records)
    if total != per_probe[0][0].shape[0]:
        raise ClassificationError(f"classified {total} of {per_probe[0][0].shape[0]} eigenvalues")
    return records


def _resolve(counts: List[Counter]) -> Counter:
    """Combine per-probe label counts; ambiguous groups are settled by another probe."""
    def is_group(key):
        return len(key) > 0 and isinstance(key[0], tuple)

    base = None
    for c in counts:
        if not any(is_group(k) for k in c):
            base = c
            break
    if base is None:
        raise AmbiguityError("every probe has ambiguous eigenvalues; retry with another probe")
    for c in counts:
        flat: Counter = Counter()
        for k, v in c.items():
            if is_group(k):
                options = [p for p in k if base.get(p, 0) > 0]
                if len(options) != 1:
                    raise AmbiguityError(f"cannot resolve candidates {k}")
                flat[options[0]] += v
            else:
                flat[k] += v
        if flat != base:
            raise ClassificationError("sign patterns disagree between probes")
    return base


def generating_polynomial(records: Sequence[SpectrumRecord]) -> QExpPoly:
    t: Dict[int, int] = {}
    for r in records:
        k = int(r.energy * UNIT)
        t[k] = t.get(k, 0) + r.multiplicity
    return QExpPoly(t)


@dataclass
class HamiltonianReport:
    max_deviation: float
    eigenvalues: np.ndarray
    predicted: np.ndarray
    max_imag: float


def hamiltonian_check(layout: SeamLayout, records: Sequence[SpectrumRecord],
                      xi: float = math.pi / 4) -> HamiltonianReport:
    """Compare the spectrum of H with the pattern energies, multiplicities included."""
    H = hamiltonian(layout, xi).entries
    raw = np.linalg.eigvals(H)
    pred = np.sort(np.concatenate([
        np.full(r.multiplicity, hamiltonian_pattern_energy(r.pattern, layout.N, layout.s)) for r in records
    ])) if records else np.zeros(0)
    if len(raw) != len(pred):
        return HamiltonianReport(math.inf, np.sort(raw.real), pred, float(np.abs(raw.imag).max(initial=0.0)))
    best = None
    # split Jordan blocks show up as tight clusters; try the raw values and the cluster means
    for w in (raw, cluster_eigenvalues(raw)):
        got = np.sort(w.real)
        dev = float(np.abs(got - pred).max(initial=0.0))
        if best is None or dev < best.max_deviation:
            best = HamiltonianReport(dev, got, pred, float(np.abs(w.imag).max(initial=0.0)))
    return best
