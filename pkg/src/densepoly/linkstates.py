"""Non-crossing link states, seam-restricted bases and the Temperley-Lieb action.

Link states are stored as tuples of 1-based partner indices: ``partner[i-1]``
is the node paired with node ``i``.  Nodes ``1..N`` are bulk, the next
``rho-1`` form the r-type seam and the last ``s-1`` form the s-type seam.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

LinkState = Tuple[int, ...]

MAX_NODES = 24


class DomainError(ValueError):
    """Raised on inputs outside an operation's domain (parity, ranges)."""


def binom(a: int, b) -> int:
    """Binomial coefficient that vanishes for negative or non-integer ``b``."""
    if isinstance(b, float):
        if not b.is_integer():
            return 0
        b = int(b)
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def is_valid(state: Sequence[int]) -> bool:
    """Involution without fixed points and without crossings."""
    n = len(state)
    if n % 2:
        return False
    for i, p in enumerate(state, start=1):
        if not 1 <= p <= n or p == i or state[p - 1] != i:
            return False
    # non-crossing: a stack scan over opening/closing nodes
    stack: List[int] = []
    for i, p in enumerate(state, start=1):
        if p > i:
            stack.append(i)
        else:
            if not stack or stack[-1] != p:
                return False
            stack.pop()
    return True


@lru_cache(maxsize=None)
def _matchings(n: int) -> Tuple[LinkState, ...]:
    if n == 0:
        return ((),)
    out = []
    # node 1 pairs with an even-distance node k, splitting inside/outside
    for k in range(2, n + 1, 2):
        for inner in _matchings(k - 2):
            for outer in _matchings(n - k):
                state = [0] * n
                state[0], state[k - 1] = k, 1
                for i, p in enumerate(inner):
                    state[i + 1] = p + 1
                for i, p in enumerate(outer):
                    state[k + i] = p + k
                out.append(tuple(state))
    return tuple(sorted(out))


def enumerate_matchings(n: int) -> List[LinkState]:
    """All non-crossing perfect matchings on ``n`` nodes, lexicographically sorted."""
    if n < 0 or n % 2:
        raise DomainError(f"link states need an even, non-negative node count, got {n}")
    if n > MAX_NODES:
        raise DomainError(f"n={n} exceeds the supported bound {MAX_NODES}")
    return list(_matchings(n))


@dataclass(frozen=True)
class SeamLayout:
    """Bulk width ``N`` with an r-type seam of ``rho-1`` and an s-type seam of ``s-1`` nodes."""

    N: int
    rho: int = 1
    s: int = 1

    def __post_init__(self):
        if self.N < 0 or self.rho < 1 or self.s < 1:
            raise DomainError(f"need N >= 0, rho >= 1, s >= 1; got {self}")
        if (self.N + self.rho + self.s) % 2:
            raise DomainError(f"N + rho + s must be even; got {self.N}+{self.rho}+{self.s}")

    @property
    def r(self) -> int:
        return (self.rho + 1) // 2

    @property
    def n(self) -> int:
        return self.N + self.rho + self.s - 2

    @property
    def r_seam(self) -> range:
        return range(self.N + 1, self.N + self.rho)

    @property
    def s_seam(self) -> range:
        return range(self.N + self.rho, self.n + 1)

    @classmethod
    def from_kac(cls, N: int, r: int, s: int, rho_parity: str) -> "SeamLayout":
        if rho_parity not in ("even", "odd"):
            raise DomainError(f"rho parity must be 'even' or 'odd', got {rho_parity!r}")
        rho = 2 * r if rho_parity == "even" else 2 * r - 1
        return cls(N, rho, s)

    def to_dict(self) -> dict:
        return {"N": self.N, "rho": self.rho, "s": self.s, "r": self.r}


def seam_admissible(state: Sequence[int], layout: SeamLayout) -> bool:
    """No arc with both ends in the r-seam, and none with both ends in the s-seam."""
    for seam in (layout.r_seam, layout.s_seam):
        for i in seam:
            if state[i - 1] in seam:
                return False
    return True


def dimension(layout: SeamLayout) -> int:
    """Closed-form size of the seam-restricted link-state space."""
    N, rho, s = layout.N, layout.rho, layout.s
    return binom(N, (N - rho + s) // 2) - binom(N, (N - rho - s) // 2) if (N - rho - s) % 2 == 0 else 0


@dataclass(frozen=True)
class LinkBasis:
    layout: SeamLayout
    states: Tuple[LinkState, ...]
    index: Dict[LinkState, int] = field(compare=False, repr=False)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)


@lru_cache(maxsize=None)
def build_basis(layout: SeamLayout) -> LinkBasis:
    states = tuple(st for st in enumerate_matchings(layout.n) if seam_admissible(st, layout))
    if len(states) != dimension(layout):
        raise AssertionError(f"basis size {len(states)} != closed form {dimension(layout)} for {layout}")
    return LinkBasis(layout, states, {st: i for i, st in enumerate(states)})


def apply_generator(state: LinkState, j: int) -> Tuple[LinkState, int]:
    """Act with ``e_j`` from below; returns the new state and the number of closed loops."""
    n = len(state)
    if not 1 <= j < n:
        raise DomainError(f"generator index {j} out of range for {n} nodes")
    a, b = state[j - 1], state[j]
    if a == j + 1:
        return state, 1
    out = list(state)
    out[j - 1], out[j] = j + 1, j
    out[a - 1], out[b - 1] = b, a
    return tuple(out), 0


def glue(state: LinkState, j: int) -> Tuple[LinkState, int]:
    """Identify nodes ``j`` and ``j+1`` and drop them (a cap joining the two ends)."""
    a, b = state[j - 1], state[j]
    if a == j + 1:
        rest = [p for i, p in enumerate(state, start=1) if i not in (j, j + 1)]
        loops = 1
    else:
        tmp = list(state)
        tmp[a - 1], tmp[b - 1] = b, a
        rest = [p for i, p in enumerate(tmp, start=1) if i not in (j, j + 1)]
        loops = 0
    shifted = tuple(p - 2 if p > j + 1 else p for p in rest)
    return shifted, loops


def to_json(state: LinkState) -> str:
    return json.dumps(list(state))


def from_json(text: str) -> LinkState:
    state = tuple(int(p) for p in json.loads(text))
    if not is_valid(state):
        raise DomainError(f"not a valid link state: {state}")
    return state


def catalan(k: int) -> int:
    """Catalan numbers from the convolution recurrence."""
    c = [1]
    for m in range(1, k + 1):
        c.append(sum(c[i] * c[m - 1 - i] for i in range(m)))
    return c[k]


def arcs(state: LinkState) -> Iterable[Tuple[int, int]]:
    return ((i, p) for i, p in enumerate(state, start=1) if i < p)
