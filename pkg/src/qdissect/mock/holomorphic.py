"""Exact holomorphic parts of the Appell-Lerch specialisations.

Arguments of mu are written relative to the modulus tau' = m*tau:
u = r1*tau' + s1 and v = r2*tau' + s2, so with Q = q^m

    mu(u, v; tau') = e(s1/2) Q^(r1/2) / theta(v; tau')
                     * sum_n (-1)^n Q^(n(n+1)/2 + n r2) e(n s2) / (1 - e(s1) Q^(n + r1))

where e(x) = exp(2 pi i x), and 1/theta comes from the triple product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..exactmath import CycloNumber, CycloRing, QQ
from ..qseries import (
    DEFAULT_D,
    Pochhammer,
    ProductSpec,
    QSeries,
    eta_spec,
    klein_spec,
)

F = Fraction


@dataclass(frozen=True)
class MuSpec:
    """q^alpha * mu(r1 tau' + s1, r2 tau' + s2; tau') with tau' = m tau."""

    alpha: Fraction
    u: tuple
    v: tuple
    m: int

    def __post_init__(self):
        object.__setattr__(self, "alpha", F(self.alpha))
        object.__setattr__(self, "u", (F(self.u[0]), F(self.u[1])))
        object.__setattr__(self, "v", (F(self.v[0]), F(self.v[1])))
        for name, (r, s) in (("u", self.u), ("v", self.v)):
            if r.denominator == 1 and s.denominator == 1:
                raise ValueError(f"{name} = {r}*tau + {s} is a lattice point (pole of mu)")
        if self.m < 1:
            raise ValueError("modulus multiplier m must be positive")

    def default_ring(self) -> CycloRing:
        dens = [4, (self.u[1] / 2).denominator, (self.v[1] / 2).denominator]
        return CycloRing(math.lcm(*dens))


def _grid(e: Fraction, D: int) -> int:
    g = e * D
    if g.denominator != 1:
        raise ValueError(f"exponent {e} is not on the 1/{D} grid")
    return int(g)


def theta_inverse_spec(r2: Fraction, s2: Fraction, m: int, ring: CycloRing) -> ProductSpec:
    """1/theta(r2 tau' + s2; tau') as a product, tau' = m tau."""
    one = ring.one()
    w = ring.root_of_unity(s2)
    factors = (
        (Pochhammer(one, m, m), -1),
        (Pochhammer(w, m * r2, m), -1),
        (Pochhammer(w.inv(), m * (1 - r2), m), -1),
    )
    scalar = ring.i * ring.root_of_unity(s2 / 2)
    return ProductSpec(factors, m * (r2 / 2 - F(1, 8)), scalar)


def _lambert_sum(spec: MuSpec, T: Fraction, ring: CycloRing, D: int) -> QSeries:
    """sum_n (-1)^n Q^(n(n+1)/2 + n r2) e(n s2) / (1 - e(s1) Q^(n + r1)), known below q^T."""
    (r1, s1), (r2, s2), m = spec.u, spec.v, spec.m
    acc: dict[int, CycloNumber] = {}

    def add(g: int, c: CycloNumber) -> None:
        prev = acc.get(g)
        acc[g] = c if prev is None else prev + c

    def term(n: int) -> bool:
        base = F(n * (n + 1), 2) + n * r2
        f = n + r1
        start = base + (-f if f < 0 else 0)
        if m * start >= T:
            return False
        sign = -1 if n % 2 else 1
        if f > 0:
            k = 0
            while m * (base + k * f) < T:
                add(_grid(m * (base + k * f), D), sign * ring.root_of_unity(n * s2 + k * s1))
                k += 1
        elif f < 0:
            k = 1
            while m * (base - k * f) < T:
                add(_grid(m * (base - k * f), D), -sign * ring.root_of_unity(n * s2 - k * s1))
                k += 1
        else:
            c = ring.root_of_unity(s1)
            if c == 1:
                raise ValueError("u lies on the lattice: 1 - e(s1) vanishes")
            add(_grid(m * base, D), sign * ring.root_of_unity(n * s2) * (1 - c).inv())
        return True

    # lower bound n(n+1)/2 - |n||r2| is increasing once |n| > |r2| + 1
    bound = abs(r2) + 2
    n = 0
    while term(n) or n <= bound:
        n += 1
    n = -1
    while term(n) or -n <= bound:
        n -= 1
    terms = {F(g, D): c for g, c in acc.items() if c}
    return QSeries.from_terms(terms, ring, D, T) if terms else QSeries.zero(ring, D, T)


def mu_series(spec: MuSpec, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """Exact q-expansion of q^alpha * mu(u, v; m tau), known below q^T."""
    T = F(T)
    ring = ring or spec.default_ring()
    (r1, s1), (r2, s2), m = spec.u, spec.v, spec.m
    pre_shift = spec.alpha + m * r1 / 2
    th = theta_inverse_spec(r2, s2, m, ring)
    L_th = th.leading_exponent()
    S = _lambert_sum(spec, T - pre_shift - L_th, ring, D)
    v_S = S.valuation
    th_series = th.expand(T - pre_shift - v_S, ring, D)
    out = (S * th_series).shift(pre_shift).scale(ring.root_of_unity(s1 / 2))
    return out


def holomorphic_correction(spec: MuSpec, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> Optional[QSeries]:
    """Holomorphic piece of q^alpha (i/2) R(u - v; tau'), or None when there is none.

    R(u - v) has a holomorphic piece only when Im(u - v)/Im(tau') = r1 - r2 is +-1/2,
    where it equals Q^(1/8) e(b/2) with b = s2 - s1 (for -1/2) or s1 - s2 (for +1/2).
    """
    ring = ring or spec.default_ring()
    (r1, s1), (r2, s2) = spec.u, spec.v
    a = r1 - r2
    if abs(a) > F(1, 2):
        raise ValueError(f"Im(u - v)/Im(tau) = {a} lies outside [-1/2, 1/2]; reduce first")
    if abs(a) != F(1, 2):
        return None
    b = s2 - s1 if a < 0 else s1 - s2
    c = ring.i * ring.root_of_unity(b / 2) * F(1, 2)
    return QSeries.monomial(c, spec.alpha + spec.m * F(1, 8), ring, D)


def mutilde_holomorphic_series(spec: MuSpec, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    ring = ring or spec.default_ring()
    s = mu_series(spec, T, ring, D)
    corr = holomorphic_correction(spec, ring, D)
    return s if corr is None else s + corr


# -- named specialisations ----------------------------------------------------------------


def _check_ac(a: int, c: int) -> None:
    if c <= 0:
        raise ValueError("c must be positive")
    if (2 * a) % c == 0:
        raise ValueError(f"c={c} divides 2a={2 * a}")


def default_ring_ac(c: int) -> CycloRing:
    return CycloRing(math.lcm(4, 2 * c))


def N_spec(a: int, c: int) -> MuSpec:
    """N(a,c;tau) = q^(-1/4) mu~(2a/c, tau; 2tau)."""
    _check_ac(a, c)
    return MuSpec(F(-1, 4), (0, F(2 * a, c)), (F(1, 2), 0), 2)


def N_series(a: int, c: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """Holomorphic part: q^(-1/4) mu(2a/c, tau; 2tau) + (i/2) zeta_c^(-a)."""
    ring = ring or default_ring_ac(c)
    return mutilde_holomorphic_series(N_spec(a, c), T, ring, D)


def P_spec(a: int, c: int, ring: Optional[CycloRing] = None) -> ProductSpec:
    """(-q;q) (q^2;q^2)^2 / ((q;q) j(zeta_c^(2a); q^2))."""
    _check_ac(a, c)
    ring = ring or default_ring_ac(c)
    one = ring.one()
    z = ring.root_of_unity(F(2 * a, c))
    return ProductSpec(
        (
            (Pochhammer(-one, 1, 1), 1),
            (Pochhammer(one, 2, 2), 2),
            (Pochhammer(one, 1, 1), -1),
            (Pochhammer(z, 0, 2), -1),
            (Pochhammer(z.inv(), 2, 2), -1),
        )
    )


def P_series(a: int, c: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    ring = ring or default_ring_ac(c)
    return P_spec(a, c, ring).expand(T, ring, D)


def P_klein_spec(a: int, c: int, ring: Optional[CycloRing] = None) -> ProductSpec:
    """-zeta_c^a eta(2 tau) / (eta(tau)^2 t_(0, 2a/c)(2 tau)), the Klein-form quotient."""
    _check_ac(a, c)
    ring = ring or default_ring_ac(c)
    t = klein_spec(0, F(2 * a, c), 2, ring)
    return eta_spec(2, ring) * eta_spec(1, ring) ** -2 * t**-1 * (-ring.root_of_unity(F(a, c)))


def P_klein_series(a: int, c: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    ring = ring or default_ring_ac(c)
    return P_klein_spec(a, c, ring).expand(T, ring, D)


def klein_discrepancy(a: int, c: int, T=40, ring: Optional[CycloRing] = None) -> tuple[CycloNumber, Fraction]:
    """(constant, q-power) with Klein expression = constant * q^power * P, checked to q^T."""
    ring = ring or default_ring_ac(c)
    k = P_klein_series(a, c, T, ring)
    p = P_series(a, c, T, ring)
    ratio = k / p
    if len(list(ratio.items())) != 1:
        raise ArithmeticError("Klein expression is not a monomial multiple of P")
    (e, coef), = ratio.items()
    return coef, e


def calM_series(a: int, c: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """Holomorphic part of the completed rank function: 2z(1-z)/(1+z) (P - i N), z = zeta_c^a."""
    ring = ring or default_ring_ac(c)
    z = ring.root_of_unity(F(a, c))
    pref = 2 * z * (1 - z) * (1 + z).inv()
    return (P_series(a, c, T, ring, D) - N_series(a, c, T, ring, D).scale(ring.i)).scale(pref)


def M_spec(a: int, c: int, m: int) -> MuSpec:
    """M(a,c; m tau) = q^(-m (a/c - 1/2)^2 / 2) mu~(a tau'/c, tau'/2; tau')."""
    if c <= 0 or a % c == 0:
        raise ValueError("need c > 0 and c not dividing a")
    x = F(a, c) - F(1, 2)
    return MuSpec(-m * x * x / 2, (F(a, c), 0), (F(1, 2), 0), m)


def M_series(a: int, c: int, m: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    spec = M_spec(a, c, m)
    ring = ring or spec.default_ring()
    return mutilde_holomorphic_series(spec, T, ring, D)


def _check_k(k: int) -> None:
    if k % 7 == 0:
        raise ValueError("7 divides k")
    if not 1 <= k <= 6:
        raise ValueError("N7(k) is implemented for 1 <= k <= 6")


def N7_spec(k: int) -> MuSpec:
    """N7(k; tau) = q^(-k^2 + 7k - 49/4) mu~(14k tau, 49 tau; 98 tau)."""
    _check_k(k)
    return MuSpec(F(-k * k + 7 * k) - F(49, 4), (F(k, 7), 0), (F(1, 2), 0), 98)


def N7_series(k: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    ring = ring or CycloRing(28)
    return mutilde_holomorphic_series(N7_spec(k), T, ring, D)


def bilateral_lambert(A: int, B: int, C: int, T, ring: CycloRing = QQ, D: int = DEFAULT_D) -> QSeries:
    """sum_n (-1)^n q^(A n(n+1)) / (1 - q^(B n + C)) with integer data, known below q^T."""
    T = F(T)
    acc: dict[int, int] = {}
    for n in _bilateral_range(A, B, C, T):
        base = A * n * (n + 1)
        f = B * n + C
        sign = -1 if n % 2 else 1
        if f == 0:
            raise ValueError("pole: B n + C = 0")
        if f > 0:
            e, step, s = base, f, sign
        else:
            e, step, s = base - f, -f, -sign
        while e < T:
            acc[e] = acc.get(e, 0) + s
            e += step
    terms = {e: v for e, v in acc.items() if v}
    return QSeries.from_terms(terms, ring, D, T)


def _bilateral_range(A, B, C, T):
    out = []
    for direction in (1, -1):
        n = 0 if direction == 1 else -1
        misses = 0
        while misses < 3:
            base = A * n * (n + 1)
            f = B * n + C
            start = base + (-f if f < 0 else 0)
            if start < T:
                out.append(n)
                misses = 0
            else:
                misses += 1
            n += direction
    return out


def lambert_N7_series(k: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """q^(7k-k^2) (q^98;q^98) / (q^49;q^49)^2 * sum (-1)^n q^(49n(n+1)) / (1 - q^(49n+7k))."""
    _check_k(k)
    T = F(T)
    ring = ring or CycloRing(28)
    one = ring.one()
    shift = 7 * k - k * k
    rel = T - shift
    prod = ProductSpec(((Pochhammer(one, 98, 98), 1), (Pochhammer(one, 49, 49), -2)))
    lam = bilateral_lambert(49, 49, 7 * k, rel, ring, D)
    p = prod.expand(rel - lam.valuation, ring, D)
    return (lam * p).shift(shift)


def N7_product_series(k: int, T, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """q^(7k-k^2) (q^98;q^98)^3 / ((q^49;q^49)^2 j(q^(14k); q^98))."""
    _check_k(k)
    ring = ring or CycloRing(28)
    one = ring.one()
    spec = ProductSpec(
        (
            (Pochhammer(one, 98, 98), 3),
            (Pochhammer(one, 49, 49), -2),
            (Pochhammer(one, 14 * k, 98), -1),
            (Pochhammer(one, 98 - 14 * k, 98), -1),
        ),
        F(7 * k - k * k),
    )
    return spec.expand(T, ring, D)
