"""Slow reference implementations used to cross-check the library.

Everything here is written from the definitions and deliberately avoids the
library's contraction and q-series code.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Dict, List, Tuple

import numpy as np

from densepoly.linkstates import SeamLayout, build_basis


class _UnionFind:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, a):
        while self.p[a] != a:
            self.p[a] = self.p[self.p[a]]
            a = self.p[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.p[ra] = rb
        return True


def brute_force_D(layout: SeamLayout, u: float, xi: float = math.pi / 4,
                  lam: float = math.pi / 2) -> np.ndarray:
    """Double-row transfer matrix by summing over all face configurations.

    Each face has edges (left, right, bottom, top).  Config A joins left-top and
    bottom-right with weight s(lam - w); config B joins left-bottom and top-right with
    weight s(w).  The s-type seam freezes the lower face to A and the upper face to B.  In-states enter on the top edges of the upper row, out-states
    leave on the bottom edges of the lower row.  Loops weigh zero.
    """
    N, rho, n = layout.N, layout.rho, layout.n
    basis = build_basis(layout)
    index = basis.index
    s = lambda x: math.sin(x) / math.sin(lam)  # noqa: E731

    # args[row][c]; None marks a frozen face with its forced config
    args: List[List] = [[None] * n, [None] * n]
    frozen: Dict[Tuple[int, int], str] = {}
    for c in range(n):
        if c < N:
            args[0][c], args[1][c] = u, lam - u
        elif c < N + rho - 1:
            k = c - N + 1
            v = xi + (rho - k) * lam
            args[0][c], args[1][c] = u - v, lam - u - v
        else:
            frozen[(0, c)], frozen[(1, c)] = "A", "B"

    # edge ids: horizontal edges h[row][c] for c=0..n (left edge of face c),
    # vertical edges vt[c] (bottom of row 0), vm[c] (between rows), vb[c] (top of row 1)
    def h(row, c):
        return row * (n + 1) + c

    base = 2 * (n + 1)

    def vbot(c):
        return base + c

    def vmid(c):
        return base + n + c

    def vtop(c):
        return base + 2 * n + c

    n_edges = base + 3 * n
    faces = [(row, c) for row in range(2) for c in range(n) if (row, c) not in frozen]
    D = np.zeros((len(basis), len(basis)))
    for choice in itertools.product("AB", repeat=len(faces)):
        conf = dict(frozen)
        weight = 1.0
        for (row, c), x in zip(faces, choice):
            conf[(row, c)] = x
            w = args[row][c]
            weight *= s(lam - w) if x == "A" else s(w)
        if weight == 0.0:
            continue
        uf = _UnionFind(n_edges)
        uf.union(h(0, 0), h(1, 0))
        uf.union(h(0, n), h(1, n))
        for (row, c), x in conf.items():
            left, right = h(row, c), h(row, c + 1)
            bottom = vbot(c) if row == 0 else vmid(c)
            top = vmid(c) if row == 0 else vtop(c)
            if x == "A":
                pairs = ((left, top), (bottom, right))
            else:
                pairs = ((left, bottom), (top, right))
            for a, b in pairs:
                uf.union(a, b)
        for col, st in enumerate(basis.states):
            uf2 = _UnionFind(n_edges)
            uf2.p = list(uf.p)
            loops = 0
            for i, j in enumerate(st, start=1):
                if i < j and not uf2.union(vtop(i - 1), vtop(j - 1)):
                    loops += 1
            if loops:
                continue
            # closed components not touching the out edges are loops
            roots_out = {uf2.find(vbot(c)) for c in range(n)}
            all_roots = {uf2.find(e) for e in range(n_edges)}
            if all_roots - roots_out:
                continue
            groups: Dict[int, List[int]] = {}
            for c in range(n):
                groups.setdefault(uf2.find(vbot(c)), []).append(c + 1)
            out = [0] * n
            for g in groups.values():
                a, b = g
                out[a - 1], out[b - 1] = b, a
            k = index.get(tuple(out))
            if k is not None:
                D[k, col] += weight
    return D


# ---------------------------------------------------------------------------
# q-series oracles: plain integer enumeration, exponents as Fractions


def poly_add(a: Dict[Fraction, int], b: Dict[Fraction, int], sign: int = 1) -> Dict[Fraction, int]:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
    return {k: v for k, v in out.items() if v}


def gaussian_by_subsets(a: int, b: int) -> Dict[Fraction, int]:
    """[a, b]_q as a sum over b-subsets of {1..a} of q^{sum - b(b+1)/2}."""
    if b < 0 or b > a:
        return {}
    out: Dict[Fraction, int] = {}
    for S in itertools.combinations(range(1, a + 1), b):
        k = Fraction(sum(S) - b * (b + 1) // 2)
        out[k] = out.get(k, 0) + 1
    return out


def narayana_by_enumeration(M: int, m: int, n: int, half: bool = False) -> Dict[Fraction, int]:
    """Sum over admissible column pairs of q^{energy}; level j weighs j or j - 1/2."""
    out: Dict[Fraction, int] = {}
    if not 0 <= m <= n <= M:
        return out
    for L in itertools.combinations(range(1, M + 1), m):
        for R in itertools.combinations(range(1, M + 1), n):
            Ld, Rd = sorted(L, reverse=True), sorted(R, reverse=True)
            if all(x <= y for x, y in zip(Ld, Rd)):
                e = Fraction(sum(L) + sum(R)) - (Fraction(m + n, 2) if half else 0)
                out[e] = out.get(e, 0) + 1
    return out


def catalan_by_enumeration(M: int, r: int, half: bool = False) -> Dict[Fraction, int]:
    """Configurations with |R| - |L| = r - 1, for r >= 1."""
    out: Dict[Fraction, int] = {}
    for m in range(0, M + 1):
        out = poly_add(out, narayana_by_enumeration(M, m, m + r - 1, half))
    return out


def partitions_min_part(order: int, smallest: int) -> List[int]:
    """Number of partitions of k into parts >= smallest, for k = 0..order, by recursion."""
    from functools import lru_cache

    @lru_cache(maxsize=None)
    def p(k, least):
        if k == 0:
            return 1
        return sum(p(k - part, part) for part in range(least, k + 1))

    return [p(k, smallest) for k in range(order + 1)]


def bulk_free_energy_gauss(u: float, nodes: int = 400) -> float:
    """Same integral as the library but by fixed Gauss-Legendre quadrature."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = (x + 1) * math.pi / 4
    return -float(np.sum(w * np.log1p(np.sin(t) * math.sin(2 * u)))) * (math.pi / 4) / math.pi
