"""Exact arithmetic in cyclotomic fields.

Elements of Q(zeta_n) are stored in the power basis 1, zeta, ..., zeta^(phi(n)-1)
as integer numerators over one positive common denominator, always reduced
modulo the n-th cyclotomic polynomial.  Rationals are ``fractions.Fraction``.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

Rational = Fraction

Scalar = Union[int, Fraction]


def euler_phi(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: Sequence[int]) -> list[int]:
    """Exact division of integer polynomials (low-to-high), ``den`` monic."""
    num = list(num)
    dd = len(den) - 1
    out = [0] * (len(num) - dd)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + dd]
        out[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    if any(num[:dd]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first."""
    if n < 1:
        raise ValueError("conductor must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


# -- polynomial helpers over Q used by inversion and subfield membership -----

def _qpoly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _qpoly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    lb = b[-1]
    while len(a) >= len(b) and a:
        c = a[-1] / lb
        shift = len(a) - len(b)
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] -= c * bj
        a.pop()
        _qpoly_trim(a)
    return _qpoly_trim(q), a


def _qpoly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _qpoly_trim(out)


def _qpoly_sub(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _qpoly_trim([Fraction(x) for x in out])


class CycloRing:
    """The field Q(zeta_n), zeta_n = exp(2 pi i / n).  One instance per n."""

    _instances: dict[int, "CycloRing"] = {}

    def __new__(cls, n: int):
        n = int(n)
        inst = cls._instances.get(n)
        if inst is None:
            inst = super().__new__(cls)
            inst._setup(n)
            cls._instances[n] = inst
        return inst

    def _setup(self, n: int) -> None:
        self.n = n
        self.phi = cyclotomic_polynomial(n)
        self.degree = len(self.phi) - 1
        d = self.degree
        # reduced dense vectors of x^t for 0 <= t < max(n, 2d - 1)
        powers: list[list[int]] = []
        vec = [0] * d
        vec[0] = 1
        for _ in range(max(n, 2 * d - 1)):
            powers.append(vec)
            top = vec[-1]
            nxt = [0] + vec[:-1]
            if top:
                for j in range(d):
                    nxt[j] -= top * self.phi[j]
            vec = nxt
        self._powers = powers
        self._reduce_table = [
            [(j, c) for j, c in enumerate(powers[t]) if c] for t in range(2 * d - 1)
        ]
        self._zeta_cache: dict[int, CycloNumber] = {}

    def __reduce__(self):
        return (CycloRing, (self.n,))

    def __repr__(self) -> str:
        return f"CycloRing({self.n})"

    # constructors
    def element(self, coeffs: Iterable[Scalar]) -> "CycloNumber":
        return CycloNumber(self, coeffs)

    def zero(self) -> "CycloNumber":
        return CycloNumber._raw(self, (0,) * self.degree, 1)

    def one(self) -> "CycloNumber":
        return self.from_rational(1)

    def from_rational(self, q: Scalar) -> "CycloNumber":
        q = Fraction(q)
        return CycloNumber._raw(self, (q.numerator,) + (0,) * (self.degree - 1), q.denominator)

    def zeta(self, k: int = 1) -> "CycloNumber":
        """zeta_n^k."""
        k %= self.n
        z = self._zeta_cache.get(k)
        if z is None:
            z = CycloNumber._raw(self, tuple(self._powers[k]), 1)
            self._zeta_cache[k] = z
        return z

    def has_root(self, r: Scalar) -> bool:
        return (Fraction(r) * self.n).denominator == 1

    def root_of_unity(self, r: Scalar) -> "CycloNumber":
        """exp(2 pi i r) for rational r; the ring must contain it."""
        r = Fraction(r)
        k = r * self.n
        if k.denominator != 1:
            raise ValueError(f"Q(zeta_{self.n}) does not contain exp(2 pi i * {r})")
        return self.zeta(int(k))

    @property
    def i(self) -> "CycloNumber":
        return self.root_of_unity(Fraction(1, 4))


def _coerce(ring: CycloRing, x) -> "CycloNumber":
    if isinstance(x, CycloNumber):
        if x.ring is not ring:
            raise ValueError(f"ring mismatch: {x.ring} vs {ring}")
        return x
    if isinstance(x, (int, Fraction)):
        return ring.from_rational(x)
    raise TypeError(f"cannot coerce {type(x).__name__} into {ring}")


class CycloNumber:
    """Immutable element of Q(zeta_n)."""

    __slots__ = ("ring", "_num", "_den", "_hash")

    def __init__(self, ring: CycloRing, coeffs: Iterable[Scalar]):
        fr = [Fraction(c) for c in coeffs]
        if len(fr) > ring.degree:
            # accept longer vectors and reduce them
            acc = [Fraction(0)] * ring.degree
            for t, c in enumerate(fr):
                if c:
                    for j, r in enumerate(ring._powers[t % ring.n]):
                        if r:
                            acc[j] += c * r
            fr = acc
        fr += [Fraction(0)] * (ring.degree - len(fr))
        den = 1
        for c in fr:
            den = den * c.denominator // math.gcd(den, c.denominator)
        num = tuple(c.numerator * (den // c.denominator) for c in fr)
        self._set(ring, num, den)

    def _set(self, ring, num, den):
        g = den
        for x in num:
            if x:
                g = math.gcd(g, x)
                if g == 1:
                    break
        if not any(num):
            den = 1
        elif g != 1:
            num = tuple(x // g for x in num)
            den //= g
        self.ring = ring
        self._num = num
        self._den = den
        self._hash = None

    @classmethod
    def _raw(cls, ring: CycloRing, num: tuple, den: int) -> "CycloNumber":
        obj = cls.__new__(cls)
        obj._set(ring, num, den)
        return obj

    # -- views -------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self._den) for x in self._num)

    @property
    def numerators(self) -> tuple[int, ...]:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def is_zero(self) -> bool:
        return not any(self._num)

    def __bool__(self) -> bool:
        return any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return Fraction(self._num[0], self._den)

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        try:
            o = _coerce(self.ring, other)
        except TypeError:
            return NotImplemented
        if self._den == o._den:
            return CycloNumber._raw(self.ring, tuple(a + b for a, b in zip(self._num, o._num)), self._den)
        da, db = self._den, o._den
        return CycloNumber._raw(
            self.ring, tuple(a * db + b * da for a, b in zip(self._num, o._num)), da * db
        )

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber._raw(self.ring, tuple(-a for a in self._num), self._den)

    def __sub__(self, other):
        try:
            o = _coerce(self.ring, other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return CycloNumber._raw(
                self.ring,
                tuple(a * other.numerator for a in self._num),
                self._den * other.denominator,
            )
        if not isinstance(other, CycloNumber):
            return NotImplemented
        if other.ring is not self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        num = _mul_vectors(self.ring, self._num, other._num)
        return CycloNumber._raw(self.ring, num, self._den * other._den)

    __rmul__ = __mul__

    def inv(self) -> "CycloNumber":
        """Multiplicative inverse via the extended gcd with Phi_n."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        if self.is_rational():
            return self.ring.from_rational(1 / self.as_rational())
        ring = self.ring
        a = _qpoly_trim([Fraction(x, self._den) for x in self._num])
        b = [Fraction(c) for c in ring.phi]
        # invariant: s*self == r (mod Phi)
        r0, r1 = b, a
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            q, rem = _qpoly_divmod(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, _qpoly_sub(s0, _qpoly_mul(q, s1))
        c = r1[0]
        return CycloNumber(ring, [x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if not isinstance(other, CycloNumber):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return _coerce(self.ring, other) * self.inv()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inv()
        k = abs(k)
        result = self.ring.one()
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparison ------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.from_rational(other)
        if not isinstance(other, CycloNumber):
            return NotImplemented
        if other.ring is not self.ring:
            n = math.lcm(self.ring.n, other.ring.n)
            big = CycloRing(n)
            return self.lift(big) == other.lift(big)
        return self._den == other._den and self._num == other._num

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.n, self._num, self._den))
        return self._hash

    # -- maps --------------------------------------------------------------------
    def embed(self, j: int = 1) -> complex:
        """Complex value under zeta_n -> exp(2 pi i j / n)."""
        n = self.ring.n
        if math.gcd(j, n) != 1:
            raise ValueError(f"embedding index {j} is not a unit mod {n}")
        total = 0j
        for k, c in enumerate(self._num):
            if c:
                total += c * cmath.exp(2j * math.pi * ((k * j) % n) / n)
        return total / self._den

    def galois(self, j: int) -> "CycloNumber":
        """Image under the automorphism zeta -> zeta^j."""
        n = self.ring.n
        if math.gcd(j, n) != 1:
            raise ValueError(f"{j} is not a unit mod {n}")
        powers = self.ring._powers
        acc = [0] * self.ring.degree
        for k, c in enumerate(self._num):
            if c:
                for idx, r in enumerate(powers[(k * j) % n]):
                    if r:
                        acc[idx] += c * r
        return CycloNumber._raw(self.ring, tuple(acc), self._den)

    def conjugate(self) -> "CycloNumber":
        return self.galois(-1)

    def lift(self, ring: CycloRing) -> "CycloNumber":
        """The same number inside Q(zeta_N) for n | N."""
        if ring is self.ring:
            return self
        if ring.n % self.ring.n:
            raise ValueError(f"Q(zeta_{self.ring.n}) is not a subfield of Q(zeta_{ring.n})")
        step = ring.n // self.ring.n
        acc = [0] * ring.degree
        for k, c in enumerate(self._num):
            if c:
                for idx, r in enumerate(ring._powers[(k * step) % ring.n]):
                    if r:
                        acc[idx] += c * r
        return CycloNumber._raw(ring, tuple(acc), self._den)

    def restrict(self, ring: CycloRing) -> "CycloNumber":
        """Express this number in the subfield ``ring``; ValueError if it is not a member."""
        if ring is self.ring:
            return self
        if self.ring.n % ring.n:
            raise ValueError(f"Q(zeta_{ring.n}) is not a subfield of Q(zeta_{self.ring.n})")
        d_small = ring.degree
        columns = [ring.zeta(k).lift(self.ring).coeffs for k in range(d_small)]
        target = self.coeffs
        solution = _solve_rational(columns, target)
        if solution is None:
            raise ValueError(f"{self!r} does not lie in Q(zeta_{ring.n})")
        return CycloNumber(ring, solution)

    # -- serialization -------------------------------------------------------------
    def to_json(self) -> list[str]:
        return [str(Fraction(x, self._den)) for x in self._num]

    @classmethod
    def from_json(cls, ring: CycloRing, data: Sequence[str]) -> "CycloNumber":
        if len(data) != ring.degree:
            raise ValueError(f"expected {ring.degree} coefficients, got {len(data)}")
        return cls(ring, [Fraction(s) for s in data])

    def __repr__(self) -> str:
        n = self.ring.n
        parts = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                parts.append(str(c))
            else:
                mono = f"z{n}" if k == 1 else f"z{n}^{k}"
                if c == 1:
                    parts.append(mono)
                elif c == -1:
                    parts.append("-" + mono)
                else:
                    parts.append(f"{c}*{mono}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


def _mul_vectors(ring: CycloRing, a: tuple, b: tuple) -> tuple:
    d = ring.degree
    sa = [(i, x) for i, x in enumerate(a) if x]
    sb = [(j, y) for j, y in enumerate(b) if y]
    if not sa or not sb:
        return (0,) * d
    if len(sa) == 1 and sa[0][0] == 0:
        x = sa[0][1]
        return tuple(x * y for y in b)
    if len(sb) == 1 and sb[0][0] == 0:
        y = sb[0][1]
        return tuple(x * y for x in a)
    acc = [0] * (2 * d - 1)
    for i, x in sa:
        for j, y in sb:
            acc[i + j] += x * y
    table = ring._reduce_table
    for t in range(2 * d - 2, d - 1, -1):
        c = acc[t]
        if c:
            for j, r in table[t]:
                acc[j] += c * r
    return tuple(acc[:d])


def _solve_rational(columns: list[Sequence[Fraction]], target: Sequence[Fraction]):
    """Solve sum_k x_k columns[k] = target exactly; None if inconsistent."""
    rows = len(target)
    ncols = len(columns)
    m = [[Fraction(columns[k][r]) for k in range(ncols)] + [Fraction(target[r])] for r in range(rows)]
    pivots = []
    row = 0
    for col in range(ncols):
        piv = next((r for r in range(row, rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        m[row] = [x / pv for x in m[row]]
        for r in range(rows):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
    for r in range(row, rows):
        if m[r][-1] != 0:
            return None
    sol = [Fraction(0)] * ncols
    for r, col in enumerate(pivots):
        sol[col] = m[r][-1]
    return sol


def solve_rational(columns, target):
    """Public wrapper: exact solution of a (possibly overdetermined) linear system."""
    return _solve_rational(columns, target)


QQ = CycloRing(1)


def raw_product(a: CycloNumber, b: CycloNumber) -> tuple[list[int], int]:
    """Unreduced integer convolution of two numerators, with its denominator.

    Length is 2*degree - 1.  Summing many of these and reducing once via
    ``from_unreduced`` is the inner loop of series multiplication.
    """
    d = a.ring.degree
    acc = [0] * (2 * d - 1)
    sb = [(j, y) for j, y in enumerate(b._num) if y]
    for i, x in enumerate(a._num):
        if x:
            for j, y in sb:
                acc[i + j] += x * y
    return acc, a._den * b._den


def from_unreduced(ring: CycloRing, acc: list[int], den: int) -> CycloNumber:
    d = ring.degree
    acc = list(acc)
    table = ring._reduce_table
    for t in range(len(acc) - 1, d - 1, -1):
        c = acc[t]
        if c:
            for j, r in table[t]:
                acc[j] += c * r
    return CycloNumber._raw(ring, tuple(acc[:d]), den)
