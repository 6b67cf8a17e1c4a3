"""Exact multiplier systems: the eta multiplier, Jacobi symbols and the derived systems."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from ..cusps import GroupSpec, Matrix, violated_congruence
from ..exactmath import CycloNumber, CycloRing

R24 = CycloRing(24)


def jacobi(m: int, n: int) -> int:
    """Jacobi symbol (m/n) for odd n > 0 and any integer m."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("jacobi needs an odd positive modulus")
    m %= n
    out = 1
    while m:
        while m % 2 == 0:
            m //= 2
            if n % 8 in (3, 5):
                out = -out
        m, n = n, m
        if m % 4 == 3 and n % 4 == 3:
            out = -out
        m %= n
    return out if n == 1 else 0


def jacobi_ext(m: int, n: int) -> int:
    """Jacobi symbol extended to negative odd n: (m/n) = (m/|n|), negated when m and n are both negative."""
    if n % 2 == 0:
        raise ValueError("the extended symbol needs an odd lower entry")
    s = jacobi(m, abs(n))
    return -s if (m < 0 and n < 0) else s


def _z24(k: int) -> CycloNumber:
    return R24.zeta(k % 24)


def eta_multiplier(A: Matrix) -> CycloNumber:
    """nu(A) with eta(A tau) = nu(A) sqrt(gamma tau + delta) eta(tau), principal square root."""
    a, b, c, d = A.a, A.b, A.c, A.d
    if c == 0:
        # A = +-T^b: the square root of -1 is i
        return _z24(b) if a == 1 else _z24(6) * -1 * _z24(-b)
    if c < 0:
        # sqrt(-w) = -i sqrt(w) for w in the upper half plane
        return _z24(6) * eta_multiplier(-A)
    if c % 2:
        return jacobi_ext(d, c) * _z24((a + d) * c - b * d * (c * c - 1) - 3 * c)
    return jacobi_ext(c, d) * _z24((a + d) * c - b * d * (c * c - 1) + 3 * d - 3 - 3 * c * d)


@dataclass(frozen=True)
class MultiplierValue:
    value: CycloNumber
    branch: str = "principal sqrt(gamma tau + delta)"

    def to_complex(self) -> complex:
        return complex(self.value.embed(1))

    def __eq__(self, other):
        if isinstance(other, MultiplierValue):
            return self.value == other.value
        return self.value == other


def _i_pow(k: int) -> CycloNumber:
    return _z24(6 * k)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def standard_multiplier(A: Matrix) -> CycloNumber:
    """nu(^2A)^-3 (-1)^(beta + (alpha-1)/2) i^(-alpha beta); needs gamma even."""
    return eta_multiplier(A.upper(2)) ** -3 * _sign(A.b + (A.a - 1) // 2) * _i_pow(-A.a * A.b)


def _require(G: GroupSpec, A: Matrix, what: str) -> None:
    bad = violated_congruence(G, A)
    if bad:
        raise ValueError(f"{what}: A is not in {G}: {bad}")


def group_multiplier(kind: str, A: Matrix, params: Optional[Sequence[int]] = None) -> MultiplierValue:
    """Multiplier of N(a,c), P(a,c), N7(k) or an F-product on its group.

    params: (a, c) for N and P, (k,) for N7, (r0, ..., r7) for Fproduct.
    """
    if kind in ("N", "P"):
        a, c = params
        G = GroupSpec((2, c * c), (c,))
        _require(G, A, kind)
        if kind == "N":
            return MultiplierValue(standard_multiplier(A))
        return MultiplierValue(eta_multiplier(A.upper(2)) * eta_multiplier(A) ** -2)
    if kind == "N7":
        (k,) = params
        if k % 7 == 0:
            raise ValueError("7 divides k")
        _require(GroupSpec((98,), (14,)), A, kind)
        return MultiplierValue(standard_multiplier(A))
    if kind == "Fproduct":
        r = list(params)
        if len(r) != 8:
            raise ValueError("Fproduct needs exponents r0..r7")
        _require(GroupSpec((98,), (14,)), A, kind)
        R = sum(r[1:])
        S = r[1] + r[3] + r[5] + r[7]
        v = eta_multiplier(A.upper(98)) ** (r[0] + 3 * R)
        v = v * _sign(((A.a - 1) // 2 + A.b) * S) * _i_pow(A.a * A.b * S)
        return MultiplierValue(v)
    raise ValueError(f"unknown multiplier kind {kind!r}")


def biagioli_multiplier(N: int, rho: int, A: Matrix) -> CycloNumber:
    """Factor c with f_(N,rho)(A tau) = c sqrt(gamma tau + delta) f_(N, rho alpha)(tau), A in Gamma0(N)."""
    if A.c % N:
        raise ValueError(f"A is not in Gamma0({N})")
    ring = CycloRing(math.lcm(24, 2 * N))
    nu = eta_multiplier(A.upper(N)).lift(ring)
    phase = ring.root_of_unity(Fraction(A.a * A.b * rho * rho, 2 * N))
    return nu**3 * _sign(rho * A.b + (rho * A.a) // N + rho // N) * phase


def to_complex(c: CycloNumber) -> complex:
    return complex(c.embed(1))


def unit_modulus(c: CycloNumber) -> bool:
    """|c| = 1 under every embedding (exact: c * conj(c) = 1)."""
    return c * c.conjugate() == 1


def principal_sqrt(w: complex) -> complex:
    return cmath.sqrt(w)
