"""Formal non-holomorphic parts: weights of Gamma(1/2; 4 pi y n^2) q^(-n^2) / sqrt(pi)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import re

from ..exactmath import CycloNumber, CycloRing

R28 = CycloRing(28)


@dataclass(frozen=True)
class NonholoCoefficient:
    n: int
    weight: CycloNumber

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")


def _calM_weight(a: int, c: int, n: int, ring: CycloRing) -> CycloNumber:
    z = ring.root_of_unity(Fraction(a, c))
    sign = -1 if n % 2 else 1
    diff = ring.root_of_unity(Fraction(-2 * a * n, c)) - ring.root_of_unity(Fraction(2 * a * n, c))
    return (1 - z) * (1 + z).inv() * diff * sign


def _N7_weight(k: int, n: int, ring: CycloRing) -> CycloNumber:
    half_i = ring.i * Fraction(1, 2)
    out = ring.zero()
    # n = 7j + k with j >= 0 carries +(i/2)(-1)^j, n = 7j - k with j >= 1 carries -(i/2)(-1)^j
    if (n - k) % 7 == 0 and n >= k:
        j = (n - k) // 7
        out = out + half_i * (-1 if j % 2 else 1)
    if (n + k) % 7 == 0 and n + k >= 7:
        j = (n + k) // 7
        out = out - half_i * (-1 if j % 2 else 1)
    return out


def nonholo_coeff(kind: str, n: int, ring: CycloRing = R28) -> NonholoCoefficient:
    """kind is "M17" (the completed rank function at zeta_7) or "N7(k)" for 1 <= k <= 6."""
    if n < 1:
        raise ValueError("n must be positive")
    if kind == "M17":
        return NonholoCoefficient(n, _calM_weight(1, 7, n, ring))
    m = re.fullmatch(r"N7\((\d)\)", kind)
    if m and 1 <= int(m.group(1)) <= 6:
        return NonholoCoefficient(n, _N7_weight(int(m.group(1)), n, ring))
    raise ValueError(f"unknown non-holomorphic kind {kind!r}")
