"""Truncated q-series with exponents on a fixed grid (1/D)Z and cyclotomic coefficients.

A series stores its leading exponent ``lead`` in units of 1/D, a dense list of
coefficients starting there, and a truncation ``trunc``: every coefficient of
q^e with e < trunc is known exactly.  ``trunc=None`` marks an exact polynomial.
"""

from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from .exactmath import CycloNumber, CycloRing, QQ, from_unreduced, raw_product

Scalar = Union[int, Fraction]
DEFAULT_D = 24


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class QSeries:
    __slots__ = ("ring", "D", "lead", "coeffs", "trunc")

    def __init__(
        self,
        ring: CycloRing,
        D: int,
        lead: int,
        coeffs: Sequence[CycloNumber],
        trunc: Optional[Scalar] = None,
    ):
        self.ring = ring
        self.D = int(D)
        self.trunc = None if trunc is None else _frac(trunc)
        coeffs = list(coeffs)
        if self.trunc is not None:
            # drop anything at or beyond the truncation
            limit = _ceil(self.trunc * self.D) - lead
            if limit < len(coeffs):
                coeffs = coeffs[: max(limit, 0)]
        start = 0
        while start < len(coeffs) and not coeffs[start]:
            start += 1
        lead += start
        coeffs = coeffs[start:]
        # trailing zeros are implicit below the truncation
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        if self.trunc is None:
            if not coeffs:
                lead = 0
        elif not coeffs:
            lead = max(lead, _ceil(self.trunc * self.D))
        self.lead = lead
        self.coeffs = coeffs

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, ring: CycloRing = QQ, D: int = DEFAULT_D, trunc=None) -> "QSeries":
        return cls(ring, D, 0, [], trunc)

    @classmethod
    def one(cls, ring: CycloRing = QQ, D: int = DEFAULT_D, trunc=None) -> "QSeries":
        return cls.monomial(ring.one(), 0, ring, D, trunc)

    @classmethod
    def monomial(cls, c, exponent: Scalar, ring: CycloRing = QQ, D: int = DEFAULT_D, trunc=None) -> "QSeries":
        if not isinstance(c, CycloNumber):
            c = ring.from_rational(c)
        g = _frac(exponent) * D
        if g.denominator != 1:
            raise ValueError(f"exponent {exponent} is not on the 1/{D} grid")
        return cls(ring, D, int(g), [c], trunc)

    @classmethod
    def from_terms(cls, terms: dict, ring: CycloRing = QQ, D: int = DEFAULT_D, trunc=None) -> "QSeries":
        """Build from {exponent: coefficient}."""
        if not terms:
            return cls.zero(ring, D, trunc)
        grid = {}
        for e, c in terms.items():
            g = _frac(e) * D
            if g.denominator != 1:
                raise ValueError(f"exponent {e} is not on the 1/{D} grid")
            if not isinstance(c, CycloNumber):
                c = ring.from_rational(c)
            elif c.ring is not ring:
                raise ValueError("ring mismatch")
            grid[int(g)] = c
        lo, hi = min(grid), max(grid)
        z = ring.zero()
        return cls(ring, D, lo, [grid.get(g, z) for g in range(lo, hi + 1)], trunc)

    # -- views -------------------------------------------------------------------
    @property
    def valuation(self) -> Optional[Fraction]:
        """Leading exponent; None for an exact zero, ``trunc`` for a truncated zero."""
        if not self.coeffs:
            return None if self.trunc is None else Fraction(self.lead, self.D)
        return Fraction(self.lead, self.D)

    @property
    def leading_coefficient(self) -> CycloNumber:
        if not self.coeffs:
            raise ValueError("zero series has no leading coefficient")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not self.coeffs

    def _grid_end(self) -> int:
        """Exclusive end of known grid positions (absolute units)."""
        if self.trunc is None:
            return self.lead + len(self.coeffs)
        return _ceil(self.trunc * self.D)

    def coefficient(self, e: Scalar) -> CycloNumber:
        e = _frac(e)
        if self.trunc is not None and e >= self.trunc:
            raise ValueError(f"coefficient of q^{e} is beyond the truncation {self.trunc}")
        g = e * self.D
        if g.denominator != 1:
            return self.ring.zero()
        k = int(g) - self.lead
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return self.ring.zero()

    def items(self) -> Iterator[tuple[Fraction, CycloNumber]]:
        for k, c in enumerate(self.coeffs):
            if c:
                yield Fraction(self.lead + k, self.D), c

    def _sparse(self) -> list[tuple[int, CycloNumber]]:
        return [(k, c) for k, c in enumerate(self.coeffs) if c]

    def truncate(self, T: Scalar) -> "QSeries":
        T = _frac(T)
        if self.trunc is not None and T > self.trunc:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.ring, self.D, self.lead, self.coeffs, T)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        terms = list(self.items())[:4]
        body = " + ".join(f"({c})*q^({e})" for e, c in terms) or "0"
        more = " + ..." if len(list(self.items())) > 4 else ""
        tail = "" if self.trunc is None else f" + O(q^({self.trunc}))"
        return f"QSeries[{self.ring.n}, D={self.D}]({body}{more}{tail})"

    # -- compatibility -------------------------------------------------------------
    def _check(self, other: "QSeries") -> None:
        if other.ring is not self.ring:
            raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
        if other.D != self.D:
            raise ValueError(f"grid mismatch: 1/{self.D} vs 1/{other.D}")

    def _as_series(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction, CycloNumber)):
            return QSeries.monomial(other, 0, self.ring, self.D)
        raise TypeError(type(other).__name__)

    # -- arithmetic ------------------------------------------------------------------
    def __add__(self, other):
        try:
            o = self._as_series(other)
        except TypeError:
            return NotImplemented
        if self.trunc is None:
            T = o.trunc
        elif o.trunc is None:
            T = self.trunc
        else:
            T = min(self.trunc, o.trunc)
        if not self.coeffs:
            return QSeries(self.ring, self.D, o.lead, o.coeffs, T)
        if not o.coeffs:
            return QSeries(self.ring, self.D, self.lead, self.coeffs, T)
        lo = min(self.lead, o.lead)
        hi = max(self.lead + len(self.coeffs), o.lead + len(o.coeffs))
        if T is not None:
            hi = min(hi, _ceil(T * self.D))
        z = self.ring.zero()
        out = [z] * max(hi - lo, 0)
        for s in (self, o):
            for k, c in enumerate(s.coeffs):
                g = s.lead + k - lo
                if g >= len(out):
                    break
                if c:
                    out[g] = out[g] + c if out[g] else c
        return QSeries(self.ring, self.D, lo, out, T)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.ring, self.D, self.lead, [-c for c in self.coeffs], self.trunc)

    def __sub__(self, other):
        try:
            o = self._as_series(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        if isinstance(c, CycloNumber) and c.ring is not self.ring:
            raise ValueError("ring mismatch")
        return QSeries(self.ring, self.D, self.lead, [x * c for x in self.coeffs], self.trunc)

    def shift(self, e: Scalar) -> "QSeries":
        """Multiply by q^e."""
        g = _frac(e) * self.D
        if g.denominator != 1:
            raise ValueError(f"shift {e} is not on the 1/{self.D} grid")
        T = None if self.trunc is None else self.trunc + _frac(e)
        return QSeries(self.ring, self.D, self.lead + int(g), self.coeffs, T)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        self._check(other)
        a, b = self, other
        va, vb = a.valuation, b.valuation
        if a.trunc is None and b.trunc is None:
            T = None
        elif a.trunc is None:
            T = b.trunc + va if va is not None else None
        elif b.trunc is None:
            T = a.trunc + vb if vb is not None else None
        else:
            T = min(a.trunc + vb, b.trunc + va)
        if not a.coeffs or not b.coeffs:
            return QSeries(self.ring, self.D, a.lead + b.lead, [], T)
        lead = a.lead + b.lead
        if T is None:
            n = len(a.coeffs) + len(b.coeffs) - 1
        else:
            n = _ceil(T * self.D) - lead
        return QSeries(self.ring, self.D, lead, _convolve(self.ring, a._sparse(), b._sparse(), n), T)

    __rmul__ = __mul__

    def invert(self, trunc: Optional[Scalar] = None) -> "QSeries":
        """Multiplicative inverse.

        Relative precision is preserved, so a series known to q^T with leading
        exponent v inverts to one known to q^(T - 2v).  An exact polynomial that
        is not a monomial needs an explicit ``trunc``.
        """
        if not self.coeffs:
            raise ZeroDivisionError("inverse of a zero series")
        v = self.valuation
        if self.trunc is None:
            if len(self.coeffs) == 1:
                return QSeries(self.ring, self.D, -self.lead, [self.coeffs[0].inv()], None)
            if trunc is None:
                raise ValueError("inverting a polynomial requires an explicit truncation")
            T = _frac(trunc)
        else:
            T = self.trunc - 2 * v
            if trunc is not None:
                T = min(T, _frac(trunc))
        n = _ceil(T * self.D) + self.lead
        return QSeries(self.ring, self.D, -self.lead, _invert_dense(self.ring, self.coeffs, n), T)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        if isinstance(other, CycloNumber):
            return self.scale(other.inv())
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other):
        return self._as_series(other) * self.invert()

    def __pow__(self, k: int, modulo=None):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return QSeries.one(self.ring, self.D)
        base = self if k > 0 else self.invert()
        k = abs(k)
        result = None
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- comparisons -------------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (
            self.ring is other.ring
            and self.D == other.D
            and self.trunc == other.trunc
            and self.lead == other.lead
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.ring.n, self.D, self.lead, self.trunc, tuple(self.coeffs)))

    def agrees_with(self, other: "QSeries", T: Optional[Scalar] = None) -> bool:
        """Equality of all coefficients known to both (and below ``T``)."""
        diff = self - other
        if T is not None:
            if diff.trunc is not None and _frac(T) > diff.trunc:
                raise ValueError("comparison bound exceeds known precision")
            diff = diff.truncate(T)
        return diff.is_zero()

    # -- transformations ---------------------------------------------------------------
    def change_ring(self, ring: CycloRing) -> "QSeries":
        """Lift coefficients into a larger cyclotomic field (or restrict to a subfield)."""
        if ring is self.ring:
            return self
        if ring.n % self.ring.n == 0:
            cs = [c.lift(ring) for c in self.coeffs]
        else:
            cs = [c.restrict(ring) for c in self.coeffs]
        return QSeries(ring, self.D, self.lead, cs, self.trunc)

    def regrid(self, D: int) -> "QSeries":
        if D == self.D:
            return self
        if D % self.D == 0:
            f = D // self.D
            z = self.ring.zero()
            out = [z] * ((len(self.coeffs) - 1) * f + 1 if self.coeffs else 0)
            for k, c in enumerate(self.coeffs):
                out[k * f] = c
            return QSeries(self.ring, D, self.lead * f, out, self.trunc)
        if self.D % D == 0:
            f = self.D // D
            if self.lead % f or any(c for k, c in enumerate(self.coeffs) if (self.lead + k) % f):
                raise ValueError(f"series does not live on the 1/{D} grid")
            return QSeries(self.ring, D, self.lead // f, self.coeffs[::f], self.trunc)
        return self.regrid(math.lcm(D, self.D)).regrid(D)

    def substitute(self, m: int) -> "QSeries":
        """q -> q^m."""
        if m < 1:
            raise ValueError("substitution power must be positive")
        z = self.ring.zero()
        out = [z] * ((len(self.coeffs) - 1) * m + 1 if self.coeffs else 0)
        for k, c in enumerate(self.coeffs):
            out[k * m] = c
        T = None if self.trunc is None else self.trunc * m
        return QSeries(self.ring, self.D, self.lead * m, out, T)

    def dissect(self, m: int, d: int) -> "QSeries":
        """The series sum_n a_(mn+d) q^n."""
        if m < 1:
            raise ValueError("dissection modulus must be positive")
        D = self.D
        for k, c in enumerate(self.coeffs):
            if c and (self.lead + k) % D:
                raise ValueError("dissection needs integer exponents")
        T = None if self.trunc is None else (self.trunc - d) / m
        terms = {}
        for e, c in self.items():
            n, r = divmod(int(e) - d, m)
            if r == 0:
                terms[n] = c
        return QSeries.from_terms(terms, self.ring, D, T) if terms else QSeries(
            self.ring, D, 0 if T is None else _ceil(T * D), [], T
        )

    # -- numerics ------------------------------------------------------------------------
    def numeric_eval(self, tau: complex, embedding: int = 1) -> tuple[complex, float]:
        """Value at q = exp(2 pi i tau) and a heuristic bound on the omitted tail."""
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        total = 0j
        mags = []
        for e, c in self.items():
            w = c.embed(embedding)
            total += w * cmath.exp(2j * math.pi * tau * float(e))
        for c in self.coeffs[-max(1, len(self.coeffs) // 10):]:
            mags.append(abs(c.embed(embedding)))
        if self.trunc is None:
            return total, 0.0
        aq = math.exp(-2 * math.pi * tau.imag)
        cmax = max(mags) if mags else 1.0
        tail = max(cmax, 1.0) * aq ** float(self.trunc) / (1 - aq ** (1 / self.D))
        return total, tail

    # -- serialization --------------------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "conductor": self.ring.n,
            "D": self.D,
            "lead": self.lead,
            "coeffs": [c.to_json() for c in self.coeffs],
            "T": None if self.trunc is None else str(self.trunc),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "QSeries":
        ring = CycloRing(int(data["conductor"]))
        cs = [CycloNumber.from_json(ring, c) for c in data["coeffs"]]
        T = None if data.get("T") is None else Fraction(data["T"])
        return cls(ring, int(data["D"]), int(data["lead"]), cs, T)

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = [f"# conductor={self.ring.n} D={self.D} T={'exact' if self.trunc is None else self.trunc}"]
        for e, c in self.items():
            lines.append(f"{format_cyclo(c)} * q^({e})")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "QSeries":
        header, *body = [ln for ln in text.splitlines() if ln.strip()]
        m = re.fullmatch(r"#\s*conductor=(\d+)\s+D=(\d+)\s+T=(\S+)", header.strip())
        if not m:
            raise ValueError(f"bad series header: {header!r}")
        ring = CycloRing(int(m.group(1)))
        D = int(m.group(2))
        T = None if m.group(3) == "exact" else Fraction(m.group(3))
        terms = {}
        for ln in body:
            cm = re.fullmatch(r"\s*(.+?)\s*\*\s*q\^\(([^)]+)\)\s*", ln)
            if not cm:
                raise ValueError(f"bad series line: {ln!r}")
            e = Fraction(cm.group(2))
            if e in terms:
                raise ValueError(f"duplicate exponent {e}")
            terms[e] = parse_cyclo(cm.group(1), ring)
        return cls.from_terms(terms, ring, D, T)


def format_cyclo(c: CycloNumber) -> str:
    """Compact text form '[a0, a1, ...]' of the power-basis coefficients."""
    return "[" + ", ".join(str(x) for x in c.coeffs) + "]"


def parse_cyclo(text: str, ring: CycloRing) -> CycloNumber:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"bad coefficient {text!r}")
    parts = [p for p in text[1:-1].split(",") if p.strip()]
    if len(parts) != ring.degree:
        raise ValueError(f"expected {ring.degree} coefficients, got {len(parts)}")
    return CycloNumber(ring, [Fraction(p.strip()) for p in parts])


def _convolve(ring: CycloRing, sa, sb, n: int) -> list[CycloNumber]:
    """First n coefficients of the product of two sparse coefficient lists."""
    zero = ring.zero()
    if n <= 0:
        return []
    if ring.degree == 1:
        acc = [Fraction(0)] * n
        for i, x in sa:
            if i >= n:
                break
            xv = Fraction(x._num[0], x._den)
            for j, y in sb:
                if i + j >= n:
                    break
                acc[i + j] += xv * Fraction(y._num[0], y._den)
        return [ring.from_rational(v) if v else zero for v in acc]
    d2 = 2 * ring.degree - 1
    nums: list = [None] * n
    dens = [1] * n
    # split by rationality so most products avoid the full convolution
    for i, x in sa:
        if i >= n:
            break
        x_rat = not any(x._num[1:])
        for j, y in sb:
            t = i + j
            if t >= n:
                break
            if x_rat:
                p = [x._num[0] * v for v in y._num]
                pd = x._den * y._den
            elif not any(y._num[1:]):
                p = [y._num[0] * v for v in x._num]
                pd = x._den * y._den
            else:
                p, pd = raw_product(x, y)
            cur = nums[t]
            if cur is None:
                nums[t] = p + [0] * (d2 - len(p))
                dens[t] = pd
                continue
            cd = dens[t]
            if cd == pd:
                for k, v in enumerate(p):
                    if v:
                        cur[k] += v
            else:
                L = cd * pd // math.gcd(cd, pd)
                fc, fp = L // cd, L // pd
                if fc != 1:
                    for k in range(d2):
                        cur[k] *= fc
                for k, v in enumerate(p):
                    if v:
                        cur[k] += v * fp
                dens[t] = L
    return [zero if v is None else from_unreduced(ring, v, dens[t]) for t, v in enumerate(nums)]


def _invert_dense(ring: CycloRing, coeffs: Sequence[CycloNumber], n: int) -> list[CycloNumber]:
    c0inv = coeffs[0].inv()
    rest = [(k, c) for k, c in enumerate(coeffs) if k and c]
    zero = ring.zero()
    out = [zero] * max(n, 0)
    if n <= 0:
        return out
    out[0] = c0inv
    neg = -c0inv
    unit = coeffs[0] == 1
    for t in range(1, n):
        s = None
        for k, c in rest:
            if k > t:
                break
            b = out[t - k]
            if b:
                term = c * b
                s = term if s is None else s + term
        if s is not None and s:
            out[t] = -s if unit else s * neg
    return out


# ---------------------------------------------------------------------------------------
# infinite products


@dataclass(frozen=True)
class Pochhammer:
    """(z q^a; q^b)_infinity."""

    z: CycloNumber
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if self.b <= 0:
            raise ValueError("pochhammer modulus must be positive")


@dataclass(frozen=True)
class ProductSpec:
    """scalar * q^shift * prod (pochhammer)^power."""

    factors: tuple = ()
    shift: Fraction = Fraction(0)
    scalar: Optional[CycloNumber] = None

    @classmethod
    def poch(cls, z, a, b) -> "ProductSpec":
        return cls(((Pochhammer(z, a, b), 1),))

    @classmethod
    def jac(cls, z: CycloNumber, a, b) -> "ProductSpec":
        """j(z q^a; q^b) = (z q^a, z^-1 q^(b-a); q^b)."""
        a, b = _frac(a), _frac(b)
        return cls(((Pochhammer(z, a, b), 1), (Pochhammer(z.inv(), b - a, b), 1)))

    @classmethod
    def qpower(cls, e) -> "ProductSpec":
        return cls((), _frac(e))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CycloNumber)):
            return ProductSpec(self.factors, self.shift, _mulscalar(self.scalar, other))
        if not isinstance(other, ProductSpec):
            return NotImplemented
        sc = other.scalar if self.scalar is None else _mulscalar(self.scalar, other.scalar)
        return ProductSpec(self.factors + other.factors, self.shift + other.shift, sc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        sc = None if self.scalar is None else self.scalar**k
        return ProductSpec(tuple((p, e * k) for p, e in self.factors), self.shift * k, sc)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, CycloNumber):
            return self * other.inv()
        return self * other**-1

    def linear_factors(self, T: Fraction):
        """Flatten to (constant, shift, [(w, e, mult)]) with every e > 0 and e < T.

        Factors (1 - w q^e) with e < 0 are rewritten as -w q^e (1 - w^-1 q^-e);
        e = 0 factors are folded into the constant.  Factors whose exponent
        reaches T relative to the leading term are dropped.
        """
        const = self.scalar
        shift = self.shift
        lin: dict = {}
        for p, mult in self.factors:
            if mult == 0:
                continue
            j = 0
            # negative exponents first: their count is finite
            while p.a + j * p.b < 0:
                e = p.a + j * p.b
                w = p.z
                unit = -w
                const = _mulscalar(const, unit**mult)
                shift += e * mult
                key = (w.inv(), -e)
                lin[key] = lin.get(key, 0) + mult
                j += 1
            if p.a + j * p.b == 0:
                w = p.z
                c = 1 - w
                if not c:
                    raise ZeroDivisionError("factor (1 - q^0) vanishes")
                const = _mulscalar(const, c**mult)
                j += 1
            # positive exponents up to T
            while p.a + j * p.b < T:
                e = p.a + j * p.b
                key = (p.z, e)
                lin[key] = lin.get(key, 0) + mult
                j += 1
        out = [(w, e, m) for (w, e), m in lin.items() if m]
        return const, shift, out

    def leading_exponent(self) -> Fraction:
        _, shift, _ = self.linear_factors(Fraction(0))
        return shift

    def expand(self, T: Scalar, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
        """Expand to a QSeries known for exponents below T."""
        T = _frac(T)
        lead = self.leading_exponent()
        rel = T - lead
        const, shift, lin = self.linear_factors(max(rel, Fraction(0)))
        if ring is None:
            rings = [w.ring for w, _, _ in lin] + ([const.ring] if const is not None else [])
            ring = max(rings, key=lambda r: r.n) if rings else QQ
        lin = [(_lift(w, ring), e, m) for w, e, m in lin]
        body = _expand_linear(ring, D, lin, rel)
        out = body.shift(shift)
        if const is not None:
            out = out.scale(_lift(const, ring))
        return out

    def numeric_eval(self, tau: complex, embedding: int = 1, tol: float = 1e-17) -> tuple[complex, float]:
        """Direct numeric product; factors with |q^e| < tol are dropped and bounded."""
        tau = complex(tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        aq = math.exp(-2 * math.pi * tau.imag)
        val = 1 + 0j if self.scalar is None else self.scalar.embed(embedding)
        val *= cmath.exp(2j * math.pi * tau * float(self.shift))
        log_tail = 0.0
        for p, mult in self.factors:
            zc = p.z.embed(embedding)
            j = 0
            prod = 1 + 0j
            while True:
                e = float(p.a + j * p.b)
                mag = abs(zc) * aq**e
                if e > 0 and mag < tol:
                    # tail of prod(1 - z q^e): log-bound |q^e|/(1-|q^b|)
                    log_tail += abs(mult) * mag / (1 - aq ** float(p.b))
                    break
                prod *= 1 - zc * cmath.exp(2j * math.pi * tau * e)
                j += 1
            val *= prod**mult
        return val, abs(val) * (math.exp(log_tail) - 1)


def _mulscalar(a, b):
    if a is None:
        return b if isinstance(b, CycloNumber) else QQ.from_rational(b) if b is not None else None
    if b is None:
        return a
    if isinstance(b, CycloNumber) and b.ring is not a.ring:
        n = math.lcm(a.ring.n, b.ring.n)
        r = CycloRing(n)
        return a.lift(r) * b.lift(r)
    return a * b


def _lift(x: CycloNumber, ring: CycloRing) -> CycloNumber:
    if x.ring is ring:
        return x
    return x.lift(ring)


def _expand_linear(ring: CycloRing, D: int, lin, rel: Fraction) -> QSeries:
    """prod (1 - w q^e)^m as a series starting at 1, known below ``rel``."""
    if rel <= 0:
        return QSeries(ring, D, 0, [], rel)
    # work on the coarsest grid holding every exponent
    steps = []
    for _, e, _ in lin:
        g = e * D
        if g.denominator != 1:
            raise ValueError(f"exponent {e} is not on the 1/{D} grid")
        steps.append(int(g))
    step = 0
    for s in steps:
        step = math.gcd(step, s)
    step = step or D
    n = _ceil(rel * D / step)
    one = ring.one()
    zero = ring.zero()
    c = [one] + [zero] * (n - 1)
    top = 1  # c[top:] are zero
    for (w, _, mult), s in sorted(zip(lin, steps), key=lambda t: t[1]):
        k = s // step
        if k >= n:
            continue
        for _ in range(abs(mult)):
            if mult > 0:
                newtop = min(n, top + k)
                for t in range(newtop - 1, k - 1, -1):
                    prev = c[t - k]
                    if prev:
                        c[t] = c[t] - (prev if w == 1 else prev * w)
                top = newtop
            else:
                top = n
                for t in range(k, n):
                    prev = c[t - k]
                    if prev:
                        c[t] = c[t] + (prev if w == 1 else prev * w)
    if step == 1:
        out = c
    else:
        out = [zero] * ((n - 1) * step + 1)
        for t, v in enumerate(c):
            out[t * step] = v
    return QSeries(ring, D, 0, out, rel)


# ---------------------------------------------------------------------------------------
# builders


def pochhammer_series(z, a: Scalar, b: Scalar, T: Scalar, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """(z q^a; q^b)_infinity truncated at T."""
    if not isinstance(z, CycloNumber):
        z = (ring or QQ).from_rational(z)
    return ProductSpec.poch(z, a, b).expand(T, ring or z.ring, D)


def jacprod_series(z, a: Scalar, b: Scalar, T: Scalar, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """j(z q^a; q^b)."""
    if not isinstance(z, CycloNumber):
        z = (ring or QQ).from_rational(z)
    return ProductSpec.jac(z, a, b).expand(T, ring or z.ring, D)


def eta_spec(m: int, ring: CycloRing = QQ) -> ProductSpec:
    return ProductSpec(((Pochhammer(ring.one(), m, m), 1),), Fraction(m, 24))


def eta_series(m: int, T: Scalar, ring: CycloRing = QQ, D: int = DEFAULT_D) -> QSeries:
    """eta(m tau) = q^(m/24) (q^m; q^m)."""
    if (Fraction(m, 24) * D).denominator != 1:
        raise ValueError(f"grid 1/{D} cannot hold q^({m}/24)")
    return eta_spec(m, ring).expand(T, ring, D)


def B2(x: Scalar) -> Fraction:
    x = _frac(x)
    return x * x - x + Fraction(1, 6)


def klein_ring(a1: Scalar, a2: Scalar) -> CycloRing:
    """Smallest cyclotomic field holding the phases of t_(a1,a2)."""
    a1, a2 = _frac(a1), _frac(a2)
    n = math.lcm((a2 * (a1 - 1) / 2).denominator, a2.denominator)
    return CycloRing(n)


def klein_spec(a1: Scalar, a2: Scalar, m: int, ring: Optional[CycloRing] = None) -> ProductSpec:
    """t_(a1,a2)(m tau) = -Q^(B2(a1)-1/12) e^(pi i a2 (a1-1)) j(e^(2 pi i a2) Q^a1; Q) / (Q;Q)^2, Q = q^m."""
    a1, a2 = _frac(a1), _frac(a2)
    if not 0 <= a1 <= 1:
        raise ValueError("reduce a1 into [0, 1] with klein_shift first")
    ring = ring or klein_ring(a1, a2)
    phase = ring.root_of_unity(a2 * (a1 - 1) / 2)
    zeta = ring.root_of_unity(a2)
    spec = ProductSpec.jac(zeta, a1 * m, m) * ProductSpec(((Pochhammer(ring.one(), m, m), -2),))
    return spec * ProductSpec.qpower(m * (B2(a1) - Fraction(1, 12))) * (-phase)


def klein_series(a1: Scalar, a2: Scalar, m: int, T: Scalar, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    ring = ring or klein_ring(a1, a2)
    return klein_spec(a1, a2, m, ring).expand(T, ring, D)


def klein_shift_factor(a1: Scalar, a2: Scalar, b1: int, b2: int, ring: CycloRing) -> CycloNumber:
    """Constant c with t_(a1+b1, a2+b2) = c * t_(a1, a2)."""
    a1, a2 = _frac(a1), _frac(a2)
    sign = -1 if (b1 * b2 + b1 + b2) % 2 else 1
    return sign * ring.root_of_unity(-(b1 * a2 - b2 * a1) / 2)


def fNrho_spec(N: int, rho: int) -> ProductSpec:
    if rho % N == 0:
        raise ValueError(f"f_(N,rho) needs N not dividing rho (N={N}, rho={rho})")
    rho %= N
    rho = min(rho, N - rho)
    one = QQ.one()
    spec = ProductSpec(
        (
            (Pochhammer(one, rho, N), 1),
            (Pochhammer(one, N - rho, N), 1),
            (Pochhammer(one, N, N), 1),
        ),
        Fraction((N - 2 * rho) ** 2, 8 * N),
    )
    return spec


def fNrho_series(N: int, rho: int, T: Scalar, ring: CycloRing = QQ, D: int = DEFAULT_D) -> QSeries:
    """f_(N,rho) = q^((N-2rho)^2/(8N)) (q^rho, q^(N-rho), q^N; q^N)."""
    return fNrho_spec(N, rho).expand(T, ring, D)


def partition_series(T: Scalar, ring: CycloRing = QQ, D: int = DEFAULT_D) -> QSeries:
    """1/(q;q)."""
    return ProductSpec(((Pochhammer(ring.one(), 1, 1), -1),)).expand(T, ring, D)
