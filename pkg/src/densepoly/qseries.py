"""Exact q-series: polynomials with rational exponents, Gaussian binomials, q-Narayana and
q-Catalan polynomials, double-column configurations, and finitized Kac characters.

Exponents are stored as integers counting units of 1/24, which covers the
central-charge shift 1/12, the conformal weights in (1/8)Z and half-integer energies.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from .linkstates import DomainError

UNIT = 24
CENTRAL_CHARGE = -2
Rational = Union[int, Fraction]


class InexactDivision(ArithmeticError):
    """Polynomial long division left a nonzero remainder."""


def _units(e: Rational) -> int:
    f = Fraction(e) * UNIT
    if f.denominator != 1:
        raise DomainError(f"exponent {e} is not a multiple of 1/{UNIT}")
    return int(f)


class QExpPoly:
    """Finite sum of integer multiples of q^e with e in (1/24)Z. Immutable by convention."""

    __slots__ = ("_t",)

    def __init__(self, terms: Optional[Mapping[int, int]] = None):
        self._t: Dict[int, int] = {k: int(v) for k, v in (terms or {}).items() if v}

    # construction -----------------------------------------------------------
    @classmethod
    def monomial(cls, exponent: Rational = 0, coeff: int = 1) -> "QExpPoly":
        return cls({_units(exponent): coeff})

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int], shift: Rational = 0) -> "QExpPoly":
        """Integer-exponent coefficient list c_0 + c_1 q + ..., times q^shift."""
        s = _units(shift)
        return cls({s + UNIT * k: c for k, c in enumerate(coeffs)})

    @classmethod
    def one(cls) -> "QExpPoly":
        return cls({0: 1})

    @classmethod
    def zero(cls) -> "QExpPoly":
        return cls()

    # ring operations --------------------------------------------------------
    @property
    def terms(self) -> Dict[int, int]:
        return dict(self._t)

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, int):
            other = QExpPoly({0: other})
        return isinstance(other, QExpPoly) and self._t == other._t

    def __hash__(self):
        return hash(frozenset(self._t.items()))

    def __add__(self, other: "QExpPoly") -> "QExpPoly":
        if isinstance(other, int):
            other = QExpPoly({0: other})
        t = dict(self._t)
        for k, v in other._t.items():
            t[k] = t.get(k, 0) + v
        return QExpPoly(t)

    __radd__ = __add__

    def __neg__(self) -> "QExpPoly":
        return QExpPoly({k: -v for k, v in self._t.items()})

    def __sub__(self, other: "QExpPoly") -> "QExpPoly":
        if isinstance(other, int):
            other = QExpPoly({0: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other: Union["QExpPoly", int]) -> "QExpPoly":
        if isinstance(other, int):
            return self.scale(other)
        t: Dict[int, int] = {}
        for a, x in self._t.items():
            for b, y in other._t.items():
                t[a + b] = t.get(a + b, 0) + x * y
        return QExpPoly(t)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QExpPoly":
        out = QExpPoly.one()
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: int) -> "QExpPoly":
        return QExpPoly({k: c * v for k, v in self._t.items()})

    def shift(self, exponent: Rational) -> "QExpPoly":
        s = _units(exponent)
        return QExpPoly({k + s: v for k, v in self._t.items()})

    def truncate(self, max_exponent: Rational) -> "QExpPoly":
        cut = _units(max_exponent)
        return QExpPoly({k: v for k, v in self._t.items() if k <= cut})

    def divide_exact(self, divisor: "QExpPoly") -> "QExpPoly":
        """Long division from the lowest exponent up; fails on a nonzero remainder."""
        if not divisor:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self:
            return QExpPoly.zero()
        d_lo, d_hi = min(divisor._t), max(divisor._t)
        top = max(self._t)
        lead = divisor._t[d_lo]
        rem = dict(self._t)
        quot: Dict[int, int] = {}
        while rem:
            lo = min(rem)
            k = lo - d_lo
            c, r = divmod(rem[lo], lead)
            if r or k + d_hi > top:
                raise InexactDivision(f"nonzero remainder at exponent {Fraction(lo, UNIT)}")
            quot[k] = c
            for e, v in divisor._t.items():
                x = rem.get(k + e, 0) - c * v
                if x:
                    rem[k + e] = x
                else:
                    rem.pop(k + e, None)
        return QExpPoly(quot)

    # evaluation -------------------------------------------------------------
    def eval_at_1(self) -> int:
        return sum(self._t.values())

    def eval_float(self, q: float) -> float:
        return float(sum(v * q ** (k / UNIT) for k, v in self._t.items()))

    def items(self) -> List[Tuple[Fraction, int]]:
        return [(Fraction(k, UNIT), v) for k, v in sorted(self._t.items())]

    def lowest_exponent(self) -> Fraction:
        return Fraction(min(self._t), UNIT)

    def coefficient(self, exponent: Rational) -> int:
        return self._t.get(_units(exponent), 0)

    def nonnegative(self) -> bool:
        return all(v > 0 for v in self._t.values())

    # serialization ----------------------------------------------------------
    def to_list(self) -> List[List[int]]:
        return [[k, v] for k, v in sorted(self._t.items())]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    @classmethod
    def from_json(cls, text: str) -> "QExpPoly":
        return cls({int(k): int(v) for k, v in json.loads(text)})

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for k, v in sorted(self._t.items()):
            e = Fraction(k, UNIT)
            if e == 0:
                mono = ""
            elif e == 1:
                mono = "q"
            elif e.denominator == 1 and e > 0:
                mono = f"q^{e.numerator}"
            else:
                mono = f"q^{{{e}}}"
            mag = abs(v)
            body = (str(mag) if mag != 1 or not mono else "") + mono
            sign = "-" if v < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self) -> str:
        return f"QExpPoly({self})"


def q(exponent: Rational = 1) -> QExpPoly:
    return QExpPoly.monomial(exponent)


# ---------------------------------------------------------------------------
# Gaussian binomials and their relatives


@lru_cache(maxsize=None)
def _gauss(a: int, b: int) -> Tuple[int, ...]:
    if b < 0 or a < 0 or b > a:
        return ()
    if b == 0 or b == a:
        return (1,)
    x = _gauss(a - 1, b - 1)
    y = _gauss(a - 1, b)
    out = [0] * (b * (a - b) + 1)
    for i, c in enumerate(x):
        out[i] += c
    for i, c in enumerate(y):
        out[i + b] += c
    return tuple(out)


def q_binomial(a: int, b) -> QExpPoly:
    """Gaussian polynomial [a, b]_q; zero outside 0 <= b <= a (and for non-integer b)."""
    if isinstance(b, Fraction):
        if b.denominator != 1:
            return QExpPoly.zero()
        b = int(b)
    return QExpPoly.from_coeffs(_gauss(a, b))


def q_pochhammer(m: int) -> QExpPoly:
    """(q)_m = prod_{k=1}^m (1 - q^k)."""
    out = QExpPoly.one()
    for k in range(1, m + 1):
        out = out * (QExpPoly.one() - q(k))
    return out


def q_narayana(M: int, m: int, n: int) -> QExpPoly:
    """Weight polynomial of admissible double columns with |L| = m, |R| = n."""
    if not 0 <= m <= n <= M:
        return QExpPoly.zero()
    head = q_binomial(M, m) * q_binomial(M, n)
    tail = (q_binomial(M, m - 1) * q_binomial(M, n + 1)).shift(n - m + 1)
    return (head - tail).shift(Fraction(m * (m + 1) + n * (n + 1), 2))


def q_catalan(M: int, r: int, kind: str = "plain") -> QExpPoly:
    """C_{M,r} (``plain``, levels weighted j) or C'_{M,r} (``prime``, levels j - 1/2).

    Negative r follows the antisymmetric extension and r = 0 gives zero.
    """
    if kind not in ("plain", "prime"):
        raise DomainError(f"kind must be 'plain' or 'prime', got {kind!r}")
    if r == 0:
        return QExpPoly.zero()
    if r < 0:
        return -q_catalan(M, -r, kind)
    one = QExpPoly.one()
    if kind == "plain":
        num = (one - q(r)) * q_binomial(2 * M + 2, M + 1 - r)
        return num.divide_exact(one - q(M + 1)).shift(Fraction(r * (r - 1), 2))
    num = (one - q(2 * r)) * q_binomial(2 * M + 1, M + 1 - r)
    return num.divide_exact(one - q(M + r + 1)).shift(Fraction((r - 1) ** 2, 2))


# ---------------------------------------------------------------------------
# double-column configurations


@dataclass(frozen=True)
class DoubleColumn:
    """Occupied levels of the left and right columns, each strictly decreasing."""

    M: int
    L: Tuple[int, ...]
    R: Tuple[int, ...]

    def __post_init__(self):
        for col in (self.L, self.R):
            if any(not 1 <= x <= self.M for x in col):
                raise DomainError(f"levels must lie in 1..{self.M}: {col}")
            if any(a <= b for a, b in zip(col, col[1:])):
                raise DomainError(f"levels must be strictly decreasing: {col}")

    @property
    def m(self) -> int:
        return len(self.L)

    @property
    def n(self) -> int:
        return len(self.R)

    def admissible(self) -> bool:
        return self.m <= self.n and all(l <= r for l, r in zip(self.L, self.R))

    def energy(self, half_shift: bool = False) -> Fraction:
        """Sum of occupied levels; with ``half_shift`` each level j counts as j - 1/2."""
        e = Fraction(sum(self.L) + sum(self.R))
        return e - Fraction(self.m + self.n, 2) if half_shift else e


def enumerate_double_columns(M: int, m: int, n: int, admissible_only: bool = True) -> List[DoubleColumn]:
    if not (0 <= m <= M and 0 <= n <= M):
        raise DomainError(f"need 0 <= m, n <= M; got M={M}, m={m}, n={n}")
    out = []
    for L in itertools.combinations(range(M, 0, -1), m):
        for R in itertools.combinations(range(M, 0, -1), n):
            S = DoubleColumn(M, L, R)
            if not admissible_only or S.admissible():
                out.append(S)
    return out


def phi_bijection(S: DoubleColumn, direction: str = "forward") -> DoubleColumn:
    """Weight-preserving map from inadmissible configurations with (m, n), m <= n, to all
    configurations with (m - 1, n + 1), and its inverse."""
    L, R = S.L, S.R
    if direction == "forward":
        if S.m > S.n or S.admissible():
            raise DomainError("forward map needs an inadmissible configuration with m <= n")
        j0 = next(j for j in range(S.m) if L[j] > R[j])  # 0-based
        newL = R[:j0] + L[j0 + 1:]
        newR = L[: j0 + 1] + R[j0:]
        return DoubleColumn(S.M, newL, newR)
    if direction == "inverse":
        m = S.m + 1
        if m > S.n - 1 or S.n < 1:
            raise DomainError("inverse map needs |R| - |L| >= 2")
        i0 = next(i for i in range(m) if (L[i] if i < S.m else 0) < R[i])
        newL = R[: i0 + 1] + L[i0:]
        newR = L[:i0] + R[i0 + 1:]
        return DoubleColumn(S.M, newL, newR)
    raise DomainError(f"direction must be 'forward' or 'inverse', got {direction!r}")


def configuration_sum(configs: Iterable[DoubleColumn], half_shift: bool = False) -> QExpPoly:
    t: Dict[int, int] = {}
    for S in configs:
        k = _units(S.energy(half_shift))
        t[k] = t.get(k, 0) + 1
    return QExpPoly(t)


# ---------------------------------------------------------------------------
# characters


def kac_weight(r: int, s: int) -> Fraction:
    return Fraction((2 * r - s) ** 2 - 1, 8)


def central_shift() -> Fraction:
    """-c/24 for c = -2."""
    return Fraction(-CENTRAL_CHARGE, 24)


def _rho_parity(rho_parity: str) -> int:
    if rho_parity not in ("even", "odd"):
        raise DomainError(f"rho parity must be 'even' or 'odd', got {rho_parity!r}")
    return 0 if rho_parity == "even" else 1


def finitized_body(N: int, r: int, s: int, rho_parity: str) -> QExpPoly:
    """[N, t] - q^{rs} [N, t - s] without the conformal prefactor."""
    shift = _rho_parity(rho_parity)
    top = Fraction(N - 2 * r + s + shift, 2)
    bot = Fraction(N - 2 * r - s + shift, 2)
    return q_binomial(N, top) - q_binomial(N, bot).shift(r * s)


def finitized_characters(N: int, r: int, s: int, rho_parity: str) -> QExpPoly:
    rho = 2 * r if rho_parity == "even" else 2 * r - 1
    if (N + rho + s) % 2:
        raise DomainError(f"N + rho + s must be even (N={N}, rho={rho}, s={s})")
    return finitized_body(N, r, s, rho_parity).shift(central_shift() + kac_weight(r, s))


def selection_sum(N: int, rho: int, s: int) -> QExpPoly:
    """Generating polynomial of the selected double columns, prefactors stripped."""
    if (N + rho + s) % 2:
        raise DomainError(f"N + rho + s must be even (N={N}, rho={rho}, s={s})")
    out = QExpPoly.zero()
    if s % 2:
        if rho % 2 == 0:
            M = (N - 1) // 2
            for k in range(1, s + 1):
                out = out + q_catalan(M, (rho - s - 1 + 2 * k) // 2)
        else:
            M = (N - 2) // 2
            for k in range(1, s + 1):
                out = out + q_catalan(M, (rho - s + 2 * k) // 2)
                out = out + q_catalan(M, (rho - s - 2 + 2 * k) // 2).shift(Fraction(N, 2))
    else:
        if rho % 2 == 0:
            M = N // 2
            for k in range(1, s // 2 + 1):
                out = out + q_catalan(M, (rho - s - 2 + 4 * k) // 2, "prime")
        else:
            M = (N - 1) // 2
            for k in range(1, s // 2 + 1):
                out = out + q_catalan(M, (rho - s - 1 + 4 * k) // 2, "prime")
                out = out + q_catalan(M, (rho - s - 3 + 4 * k) // 2, "prime").shift(Fraction(N, 2))
    return out


def selection_prefactor(s: int) -> Fraction:
    """Exponent multiplying the selection sum to give the finitized character."""
    return central_shift() - (Fraction(1, 8) if s % 2 == 0 else 0)


def euler_inverse(order: int) -> QExpPoly:
    """1/(q)_inf truncated at q^order (partition numbers)."""
    if order > 64:
        raise DomainError("truncation order capped at 64")
    p = [0] * (order + 1)
    p[0] = 1
    for k in range(1, order + 1):
        for n in range(k, order + 1):
            p[n] += p[n - k]
    return QExpPoly.from_coeffs(p)


def character_series(r: int, s: int, order: int) -> QExpPoly:
    """Kac character q^{-c/24 + Delta}(1 - q^{rs})/(q)_inf, body truncated at q^order."""
    body = ((QExpPoly.one() - q(r * s)) * euler_inverse(order)).truncate(order)
    return body.shift(central_shift() + kac_weight(r, s))


def irreducible_character(k: int, s: int, order: int) -> QExpPoly:
    """ch_{k,s} for s in {1, 2}; zero at k = 0 and odd under k -> -k."""
    if s not in (1, 2):
        raise DomainError("irreducible characters are indexed by s = 1, 2")
    if k == 0:
        return QExpPoly.zero()
    if k < 0:
        return -irreducible_character(-k, s, order)
    return character_series(k, s, order)


def irreducible_decomposition(r: int, s: int, order: int) -> QExpPoly:
    """Sum of irreducible characters whose total should reproduce the Kac character."""
    out = QExpPoly.zero()
    if s % 2:
        for k in range(1, s + 1):
            out = out + irreducible_character((2 * r - s - 1 + 2 * k) // 2, 1, order)
    else:
        for k in range(1, s // 2 + 1):
            out = out + irreducible_character((2 * r - s - 2 + 4 * k) // 2, 2, order)
    return out


def decomposition_holds(r: int, s: int, order: int) -> bool:
    """Compare Kac character and irreducible sum up to a common absolute cutoff."""
    chi = character_series(r, s, order)
    cut = central_shift() + kac_weight(r, s) + order
    # every irreducible summand starts at or above the Kac leading term
    return chi.truncate(cut) == irreducible_decomposition(r, s, order).truncate(cut)
