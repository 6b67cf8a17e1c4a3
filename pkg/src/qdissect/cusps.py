"""SL2(Z) matrices, congruence subgroups Gamma0(N) & Gamma1(M), cusps, widths and orders at cusps."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

F = Fraction


@dataclass(frozen=True)
class Matrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"{self} is not in SL2(Z)")

    @classmethod
    def identity(cls) -> "Matrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def T(cls, k: int = 1) -> "Matrix":
        return cls(1, k, 0, 1)

    @classmethod
    def S(cls) -> "Matrix":
        return cls(0, -1, 1, 0)

    def __mul__(self, o: "Matrix") -> "Matrix":
        return Matrix(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> "Matrix":
        return Matrix(-self.a, -self.b, -self.c, -self.d)

    def inv(self) -> "Matrix":
        return Matrix(self.d, -self.b, -self.c, self.a)

    def act(self, tau: complex) -> complex:
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def act_cusp(self, z: "Cusp") -> "Cusp":
        return Cusp.of(self.a * z.a + self.b * z.c, self.c * z.a + self.d * z.c)

    def j(self, tau: complex) -> complex:
        """(A : tau) = gamma tau + delta."""
        return self.c * tau + self.d

    def upper(self, m: int) -> "Matrix":
        """^mA = [[alpha, m beta], [gamma/m, delta]]; needs m | gamma."""
        if self.c % m:
            raise ValueError(f"^{m}A needs {m} | gamma = {self.c}")
        return Matrix(self.a, m * self.b, self.c // m, self.d)

    def lower(self, m: int) -> "Matrix":
        """_mA = [[m alpha, beta], [gamma, delta/m]]; needs m | delta."""
        if self.d % m:
            raise ValueError(f"_{m}A needs {m} | delta = {self.d}")
        return Matrix(m * self.a, self.b, self.c, self.d // m)

    def cusp(self) -> "Cusp":
        return Cusp.of(self.a, self.c)

    def as_list(self) -> list[list[int]]:
        return [[self.a, self.b], [self.c, self.d]]


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


@dataclass(frozen=True, order=True)
class Cusp:
    """a/c in lowest terms with c >= 0; infinity is 1/0."""

    a: int
    c: int

    @classmethod
    def of(cls, a: int, c: int) -> "Cusp":
        g = math.gcd(a, c)
        if g == 0:
            raise ValueError("0/0 is not a cusp")
        a, c = a // g, c // g
        if c < 0 or (c == 0 and a < 0):
            a, c = -a, -c
        return cls(a, c)

    @classmethod
    def parse(cls, text: str) -> "Cusp":
        t = text.strip().lower()
        if t in ("inf", "infinity", "oo", "i*inf"):
            return cls(1, 0)
        m = re.fullmatch(r"(-?\d+)(?:\s*/\s*(\d+))?", t)
        if not m:
            raise ValueError(f"cannot parse cusp {text!r}")
        return cls.of(int(m.group(1)), int(m.group(2) or 1))

    @property
    def is_infinity(self) -> bool:
        return self.c == 0

    def matrix(self) -> Matrix:
        """Deterministic B in SL2(Z) with B(infinity) = a/c; for c odd, delta is chosen odd."""
        if self.c == 0:
            return Matrix.identity()
        g, x, y = _egcd(self.a, self.c)  # a x + c y = 1
        # B = [[a, -y], [c, x]]
        d, b = x, -y
        if self.c % 2 and d % 2 == 0:
            d, b = d + self.c, b + self.a
        return Matrix(self.a, b, self.c, d)

    def __str__(self) -> str:
        if self.c == 0:
            return "inf"
        return str(self.a) if self.c == 1 else f"{self.a}/{self.c}"


# -- groups -------------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    gamma0_levels: tuple = ()
    gamma1_levels: tuple = ()

    def __post_init__(self):
        g0 = tuple(int(x) for x in self.gamma0_levels)
        g1 = tuple(int(x) for x in self.gamma1_levels)
        if any(x < 1 for x in g0 + g1):
            raise ValueError("levels must be positive")
        object.__setattr__(self, "gamma0_levels", g0)
        object.__setattr__(self, "gamma1_levels", g1)

    @property
    def M(self) -> int:
        return math.lcm(1, *self.gamma1_levels)

    @property
    def N(self) -> int:
        """Gamma0 level after folding in Gamma1 levels (Gamma1(M) lies in Gamma0(M))."""
        return math.lcm(1, *self.gamma0_levels, *self.gamma1_levels)

    @property
    def contains_minus_identity(self) -> bool:
        return self.M <= 2

    def __str__(self) -> str:
        parts = [f"G0({n})" for n in self.gamma0_levels] + [f"G1({n})" for n in self.gamma1_levels]
        return "&".join(parts) or "G0(1)"


WORKING_GROUP = GroupSpec((98,), (14,))


class GroupParseError(ValueError):
    pass


def parse_group(text: str) -> GroupSpec:
    """Recursive-descent parser for "G0(98)&G1(14)"; "SL2" is the full modular group."""
    pos = 0
    s = text.replace(" ", "")

    def expect(tok: str) -> None:
        nonlocal pos
        if not s.startswith(tok, pos):
            raise GroupParseError(f"expected {tok!r} at position {pos} in {text!r}")
        pos += len(tok)

    def number() -> int:
        nonlocal pos
        m = re.match(r"\d+", s[pos:])
        if not m:
            raise GroupParseError(f"expected a level at position {pos} in {text!r}")
        pos += m.end()
        n = int(m.group())
        if n < 1:
            raise GroupParseError("levels must be positive")
        return n

    def factor(g0: list, g1: list) -> None:
        nonlocal pos
        if s.startswith("SL2", pos):
            pos += 3
            return
        for name, bucket in (("G0(", g0), ("G1(", g1)):
            if s.startswith(name, pos):
                pos += len(name)
                bucket.append(number())
                expect(")")
                return
        raise GroupParseError(f"unknown group factor at position {pos} in {text!r}")

    if not s:
        raise GroupParseError("empty group description")
    g0: list[int] = []
    g1: list[int] = []
    factor(g0, g1)
    while pos < len(s):
        expect("&")
        factor(g0, g1)
    return GroupSpec(tuple(g0), tuple(g1))


def violated_congruence(G: GroupSpec, A: Matrix) -> Optional[str]:
    for n in G.gamma0_levels + G.gamma1_levels:
        if A.c % n:
            return f"gamma = {A.c} is not 0 mod {n}"
    for n in G.gamma1_levels:
        if (A.a - 1) % n or (A.d - 1) % n:
            return f"alpha, delta = {A.a}, {A.d} are not 1 mod {n}"
    return None


def group_contains(G: GroupSpec, A: Matrix) -> bool:
    return violated_congruence(G, A) is None


def sample_elements(G: GroupSpec, count: int, rng, bound: int = 400, c_mult: int = 3) -> list[Matrix]:
    """Elements of G with gamma a nonzero multiple of the level, drawn with the given random.Random."""
    out = []
    N, M = G.N, G.M
    while len(out) < count:
        c = N * rng.randint(1, c_mult) * rng.choice((1, -1))
        d = rng.randint(-bound, bound)
        if math.gcd(c, d) != 1 or (d - 1) % M:
            continue
        a = pow(d, -1, abs(c))
        # a d = 1 mod c and, since M | c, a = 1 mod M as well
        A = Matrix(a, (a * d - 1) // c, c, d)
        if group_contains(G, A):
            out.append(A)
    return out


def _psi(n: int) -> int:
    out = n
    for p in _prime_factors(n):
        out = out // p * (p + 1)
    return out


def _phi(n: int) -> int:
    out = n
    for p in _prime_factors(n):
        out = out // p * (p - 1)
    return out


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def group_index(G: GroupSpec) -> int:
    """Index of the image of G in PSL2(Z), from the closed formula psi(N) phi(M) (halved when -I is absent)."""
    sl = _psi(G.N) * _phi(G.M)
    return sl if G.contains_minus_identity else sl // 2


# -- cosets and cusp classes -----------------------------------------------------------------


class _CosetSpace:
    """Right cosets G B, keyed by the bottom row of B mod N up to units that are 1 mod M."""

    def __init__(self, G: GroupSpec):
        self.G = G
        N, M = G.N, G.M
        self.N = N
        self.units = [u for u in range(1, N + 1) if math.gcd(u, N) == 1 and (u - 1) % M == 0] if N > 1 else [1]

    def key(self, c: int, d: int) -> tuple[int, int]:
        N = self.N
        return min(((u * c) % N, (u * d) % N) for u in self.units)

    def key_of(self, B: Matrix) -> tuple[int, int]:
        return self.key(B.c, B.d)

    def t_orbit(self, B: Matrix) -> list[tuple[int, int]]:
        """Keys of G B T^k for k = 0, 1, ... until the orbit closes."""
        start = self.key_of(B)
        out = [start]
        c, d = B.c, B.d
        while True:
            d += c
            k = self.key(c, d)
            if k == start:
                return out
            out.append(k)


def cusp_width(G: GroupSpec, z: Cusp) -> int:
    """Least w > 0 with B T^w B^-1 in G, B(infinity) = z."""
    B = z.matrix()
    limit = G.N if G.N > 1 else 1
    for w in range(1, limit + 1):
        if group_contains(G, B * Matrix.T(w) * B.inv()):
            return w
    raise ArithmeticError(f"no width found for {z} below the level")  # cannot happen


def cusp_equivalent(G: GroupSpec, z1: Cusp, z2: Cusp) -> Optional[Matrix]:
    """A witness g in G with g(z1) = z2, or None."""
    B1, B2 = z1.matrix(), z2.matrix()
    B1i = B1.inv()
    for k in range(max(G.N, 1)):
        for s in (1, -1):
            g = B2 * Matrix.T(k) * B1i
            if s < 0:
                g = -g
            if group_contains(G, g):
                return g
    return None


@lru_cache(maxsize=16)
def _cusp_classes(G: GroupSpec) -> tuple[dict, tuple]:
    """Map coset key -> class id, and per-class (canonical cusp, width)."""
    space = _CosetSpace(G)
    key_to_class: dict[tuple[int, int], int] = {}
    classes: list[tuple[Cusp, int]] = []

    def register(z: Cusp) -> None:
        B = z.matrix()
        if space.key_of(B) in key_to_class:
            return
        cid = len(classes)
        orbit = space.t_orbit(B)
        for k in orbit:
            key_to_class[k] = cid
        for k in space.t_orbit(-B):
            key_to_class[k] = cid
        classes.append((z, len(orbit)))

    register(Cusp(1, 0))
    L = G.N
    for c in range(1, L + 1):
        for a in range(0, c):
            if math.gcd(a, c) == 1:
                register(Cusp(a, c))
    # every cusp a/c depends on (a mod c-data) through c mod L and a mod gcd(c, L); c <= L suffices
    return key_to_class, tuple(classes)


def cusp_class(G: GroupSpec, z: Cusp) -> int:
    key_to_class, _ = _cusp_classes(G)
    return key_to_class[_CosetSpace(G).key_of(z.matrix())]


def cusp_representatives(G: GroupSpec) -> list[tuple[Cusp, int]]:
    """Inequivalent cusps with widths; infinity first, then by denominator and numerator."""
    _, classes = _cusp_classes(G)
    return list(classes)


# reference representatives and widths for Gamma0(98) & Gamma1(14)
REFERENCE_CUSPS: tuple[tuple[str, int], ...] = (
    ("0", 98), ("1/14", 1), ("3/38", 49), ("2/25", 98), ("1/12", 49), ("3/35", 2), ("2/23", 98),
    ("3/28", 1), ("5/42", 1), ("1/8", 49), ("1/7", 2), ("5/28", 1), ("3/14", 1), ("8/35", 2),
    ("5/21", 2), ("2/7", 2), ("17/56", 1), ("11/35", 2), ("9/28", 1), ("5/14", 1), ("18/49", 2),
    ("37/98", 1), ("8/21", 2), ("19/49", 2), ("11/28", 1), ("3/7", 2), ("22/49", 2), ("16/35", 2),
    ("45/98", 1), ("13/28", 1), ("10/21", 2), ("27/56", 1), ("29/56", 1), ("11/21", 2), ("15/28", 1),
    ("19/35", 2), ("4/7", 2), ("13/21", 2), ("9/14", 1), ("39/56", 1), ("5/7", 2), ("16/21", 2),
    ("27/35", 2), ("11/14", 1), ("6/7", 2), ("37/42", 1), ("13/14", 1), ("inf", 1),
)


def reference_cusps() -> list[tuple[Cusp, int]]:
    return [(Cusp.parse(s), w) for s, w in REFERENCE_CUSPS]


def match_tables(G: GroupSpec, reference: Sequence[tuple[Cusp, int]]) -> list[str]:
    """Problems preventing a width-preserving bijection between reference and our classes."""
    reps = cusp_representatives(G)
    problems = []
    seen: dict[int, Cusp] = {}
    for z, w in reference:
        cid = cusp_class(G, z)
        if cid in seen:
            problems.append(f"{z} is equivalent to {seen[cid]}")
        seen[cid] = z
        ww = cusp_width(G, z)
        if ww != w:
            problems.append(f"{z}: width {ww}, reference says {w}")
    if len(seen) != len(reps):
        problems.append(f"reference covers {len(seen)} of {len(reps)} classes")
    return problems


# -- orders at cusps -----------------------------------------------------------------------


def frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


def nu_order(u, w) -> Fraction:
    """Lowest exponent of mu(u tau + v, w tau + x; tau) for 0 <= u, w < 1."""
    u, w = F(u), F(w)
    if not (0 <= u < 1 and 0 <= w < 1):
        raise ValueError("nu_order needs 0 <= u, w < 1")
    s = u + w
    return s / 2 - F(1, 8) if s <= 1 else F(7, 8) - s / 2


def nutilde_order(u, w) -> Fraction:
    """Lower bound for the holomorphic part of mu~(u tau + v, w tau + x; tau), any real u, w."""
    u, w = F(u), F(w)
    fu, fw = frac(u), frac(w)
    du = math.floor(u) - math.floor(w)
    nu = nu_order(fu, fw)
    k = min(F(1, 8), nu) if abs(fu - fw) == F(1, 2) else nu
    return F(du * du, 2) + du * (fu - fw) + k


@dataclass(frozen=True)
class OrderBound:
    value: Fraction
    exact: bool

    def __add__(self, o: "OrderBound") -> "OrderBound":
        return OrderBound(self.value + o.value, self.exact and o.exact)


class Descriptor:
    exact = True

    def order(self, A: Matrix) -> Fraction:
        raise NotImplementedError

    def bound(self, z: Cusp) -> OrderBound:
        return OrderBound(self.order(z.matrix()), self.exact)


@dataclass(frozen=True)
class Eta(Descriptor):
    m: int

    def order(self, A: Matrix) -> Fraction:
        g = math.gcd(self.m, A.c)
        return F(g * g, 24 * self.m)

    def __str__(self):
        return f"eta({self.m}tau)"


@dataclass(frozen=True)
class FNrho(Descriptor):
    N: int
    rho: int

    def order(self, A: Matrix) -> Fraction:
        g = math.gcd(self.N, A.c)
        return F(g * g, 2 * self.N) * (frac(F(A.a * self.rho, g)) - F(1, 2)) ** 2

    def __str__(self):
        return f"f({self.N},{self.rho})"


@dataclass(frozen=True)
class PDesc(Descriptor):
    a: int
    c: int

    def order(self, A: Matrix) -> Fraction:
        if A.c % 2 == 0:
            t = frac(F(self.a * A.c, self.c))
            return t - t * t
        # gamma odd: theta(2a/c; 2 tau) is moved to modulus tau/2, so the argument doubles
        t = frac(F(2 * self.a * A.c, self.c))
        return t / 4 - t * t / 4 - F(1, 16)

    def __str__(self):
        return f"P({self.a},{self.c})"


@dataclass(frozen=True)
class NDesc(Descriptor):
    a: int
    c: int
    exact = False

    def order(self, A: Matrix) -> Fraction:
        a, c, al, ga = self.a, self.c, A.a, A.c
        if ga % 2 == 0:
            t = F(a * ga, c)
            return -t * t + t - F(1, 4) + 2 * nutilde_order(t, F(1, 2))
        t = F(a * ga, c)
        return -t * t + t * al - F(al * al, 4) + nutilde_order(2 * t, al) / 2

    def __str__(self):
        return f"N({self.a},{self.c})"


@dataclass(frozen=True)
class MDesc(Descriptor):
    a: int
    c: int
    m: int
    exact = False

    def order(self, A: Matrix) -> Fraction:
        g = math.gcd(self.m, A.c)
        x = F(self.m * A.a, g)
        h = F(self.a, self.c) - F(1, 2)
        return -g * g * x * x / (2 * self.m) * h * h + F(g * g, self.m) * nutilde_order(self.a * x / self.c, x / 2)

    def __str__(self):
        return f"M({self.a},{self.c};{self.m}tau)"


@dataclass(frozen=True)
class CalMDesc(Descriptor):
    """Holomorphic part of the completed rank function: a combination of P and N."""

    a: int
    c: int
    exact = False

    def order(self, A: Matrix) -> Fraction:
        return min(PDesc(self.a, self.c).order(A), NDesc(self.a, self.c).order(A))

    def __str__(self):
        return f"calM({self.a},{self.c})"


@dataclass(frozen=True)
class Monomial:
    """Product of descriptor powers; bounded descriptors may only appear to the first power."""

    factors: tuple = ()
    label: str = ""

    def __post_init__(self):
        for d, p in self.factors:
            if not d.exact and p != 1:
                raise ValueError(f"{d} gives only a lower bound and cannot be raised to power {p}")

    def bound(self, z: Cusp) -> OrderBound:
        A = z.matrix()
        total = OrderBound(F(0), True)
        for d, p in self.factors:
            total = total + OrderBound(p * d.order(A), d.exact)
        return total

    def __str__(self):
        return self.label or "*".join(f"{d}^{p}" for d, p in self.factors)


def term_order_bound(term, z: Cusp) -> OrderBound:
    if isinstance(term, Monomial):
        return term.bound(z)
    if isinstance(term, Descriptor):
        return term.bound(z)
    raise TypeError(f"unsupported descriptor {term!r}")


@dataclass
class CuspBound:
    cusp: Cusp
    width: int
    bound: Fraction
    limiting_term: int
    exact: bool

    def to_dict(self) -> dict:
        return {
            "cusp": str(self.cusp),
            "width": self.width,
            "bound": str(self.bound),
            "limiting_term": self.limiting_term,
            "bound_limited": not self.exact,
        }


def valence_budget(
    G: GroupSpec, terms: Sequence, representatives: Optional[Sequence[tuple[Cusp, int]]] = None
) -> tuple[list[CuspBound], Fraction]:
    """Sum over non-infinite cusps of width * (minimum over terms of the order bound)."""
    if not terms:
        raise ValueError("no terms")
    reps = list(representatives) if representatives is not None else cusp_representatives(G)
    table = []
    total = F(0)
    for z, w in reps:
        if z.is_infinity:
            continue
        best = None
        for i, t in enumerate(terms):
            b = term_order_bound(t, z)
            if best is None or b.value < best[0].value:
                best = (b, i)
        b, i = best
        table.append(CuspBound(z, w, b.value, i, b.exact))
        total += w * b.value
    return table, total


def full_valence_sum(G: GroupSpec, term, representatives: Optional[Sequence[tuple[Cusp, int]]] = None) -> Fraction:
    """Sum over all cusps (infinity included) of width * order; zero for a weight-0 eta quotient on G."""
    reps = list(representatives) if representatives is not None else cusp_representatives(G)
    return sum((w * term_order_bound(term, z).value for z, w in reps), F(0))


def eta_quotient(powers: dict[int, int]) -> Monomial:
    return Monomial(tuple((Eta(m), p) for m, p in sorted(powers.items())))
