"""Overpartition ranks: enumeration, counting tables, and the generating function at roots of unity."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .exactmath import CycloNumber, CycloRing
from .qseries import DEFAULT_D, QSeries

ENUMERATION_CAP = 40
# beyond this the weighted counts can leave int64
_INT64_SAFE_N = 400


@dataclass(frozen=True)
class Overpartition:
    parts: tuple[int, ...]  # non-increasing
    overlined: frozenset  # part sizes whose first occurrence is overlined

    @property
    def rank(self) -> int:
        return (self.parts[0] - len(self.parts)) if self.parts else 0

    def __str__(self) -> str:
        out, seen = [], set()
        for p in self.parts:
            if p in self.overlined and p not in seen:
                out.append(f"{p}'")
                seen.add(p)
            else:
                out.append(str(p))
        return "+".join(out) or "()"


def _partitions(n: int, maxpart: int):
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def enumerate_overpartitions(n: int, cap: int = ENUMERATION_CAP) -> list[tuple[tuple[int, ...], frozenset, int]]:
    """All overpartitions of n as (parts, overlined sizes, rank)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > cap:
        raise ValueError(f"enumeration of n={n} exceeds the cap {cap}")
    out = []
    for parts in _partitions(n, n):
        sizes = sorted(set(parts))
        for mask in range(1 << len(sizes)):
            over = frozenset(s for i, s in enumerate(sizes) if mask >> i & 1)
            op = Overpartition(parts, over)
            out.append((parts, over, op.rank))
    return out


class RankTable:
    """Counts N(m, n) of overpartitions of n with rank m, for n <= n_max."""

    def __init__(self, n_max: int, counts: dict[tuple[int, int], int]):
        self.n_max = n_max
        self.counts = counts

    def N(self, m: int, n: int) -> int:
        self._check(n)
        return self.counts.get((m, n), 0)

    def N_mod(self, k: int, t: int, n: int) -> int:
        """Number of overpartitions of n with rank congruent to k mod t."""
        self._check(n)
        return sum(c for (m, nn), c in self.counts.items() if nn == n and (m - k) % t == 0)

    def pbar(self, n: int) -> int:
        self._check(n)
        return sum(c for (m, nn), c in self.counts.items() if nn == n)

    def _check(self, n: int) -> None:
        if not 0 <= n <= self.n_max:
            raise ValueError(f"n={n} is outside the table (n_max={self.n_max})")

    def rows(self):
        for (m, n) in sorted(self.counts, key=lambda k: (k[1], k[0])):
            yield n, m, self.counts[(m, n)]

    def to_csv(self, modulus: Optional[int] = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if modulus is None:
            w.writerow(["n", "m", "count"])
            for row in self.rows():
                w.writerow(row)
        else:
            w.writerow(["n", f"k_mod_{modulus}", "count"])
            for n in range(self.n_max + 1):
                for k in range(modulus):
                    w.writerow([n, k, self.N_mod(k, modulus, n)])
        return buf.getvalue()


@lru_cache(maxsize=8)
def _rank_counts(n_max: int) -> dict[tuple[int, int], int]:
    if n_max > _INT64_SAFE_N:
        raise ValueError(f"counting beyond n={_INT64_SAFE_N} would overflow int64")
    size = n_max + 1
    # g[s, c]: multisets of parts <= k with sum s and c parts, weight 2^(distinct sizes)
    g = np.zeros((size, size), dtype=np.int64)
    g[0, 0] = 1
    counts: dict[tuple[int, int], int] = {(0, 0): 1}
    for L in range(1, size):
        # h[s, c]: at least one copy of L added to a multiset of parts < L
        h = np.zeros_like(g)
        for s in range(L, size):
            h[s, 1:] = g[s - L, :-1] + h[s - L, :-1]
        h *= 2
        for s in range(L, size):
            row = h[s]
            for c in np.nonzero(row)[0]:
                key = (L - int(c), s)
                counts[key] = counts.get(key, 0) + int(row[c])
        g = g + h
        if g.min() < 0:
            raise OverflowError("rank counting overflowed")
    return counts


def rank_table(n_max: int) -> RankTable:
    return RankTable(n_max, dict(_rank_counts(n_max)))


def rank_table_by_enumeration(n_max: int, cap: int = ENUMERATION_CAP) -> RankTable:
    counts: dict[tuple[int, int], int] = {}
    for n in range(n_max + 1):
        for _, _, r in enumerate_overpartitions(n, cap):
            counts[(r, n)] = counts.get((r, n), 0) + 1
    return RankTable(n_max, counts)


def rank_table_by_expansion(n_max: int) -> RankTable:
    """Read N(m, n) off the two-variable expansion of the defining double sum.

    Each summand is (-1;q)_k q^(k(k+1)/2) / ((zq;q)_k (q/z;q)_k), expanded as a
    polynomial in q with Laurent-polynomial coefficients in z.
    """
    N = n_max
    off = N  # z exponent offset
    width = 2 * N + 1
    total = np.zeros((N + 1, width), dtype=object)
    total[0, off] = 1
    k = 1
    while k * (k + 1) // 2 <= N:
        term = np.zeros((N + 1, width), dtype=object)
        term[k * (k + 1) // 2, off] = 1
        # (-1;q)_k = 2 prod_{j=1}^{k-1} (1 + q^j)
        term *= 2
        for j in range(1, k):
            new = term.copy()
            new[j:] += term[: N + 1 - j]
            term = new
        for j in range(1, k + 1):
            for zs in (1, -1):
                # divide by (1 - z^zs q^j): running sum along q with a z shift
                for e in range(j, N + 1):
                    shifted = np.roll(term[e - j], zs)
                    term[e] = term[e] + shifted
        total = total + term
        k += 1
    counts = {}
    for n in range(N + 1):
        for idx in range(width):
            v = int(total[n, idx])
            if v:
                counts[(idx - off, n)] = v
    return RankTable(n_max, counts)


# -- the generating function at a root of unity ------------------------------------------


def _dense_div_linear(c: list, w: CycloNumber, e: int) -> None:
    """c <- c / (1 - w q^e) in place."""
    for t in range(e, len(c)):
        p = c[t - e]
        if p:
            c[t] = c[t] + p * w


def _dense_mul_linear(c: list, w, e: int) -> None:
    """c <- c * (1 - w q^e) in place."""
    for t in range(len(c) - 1, e - 1, -1):
        p = c[t - e]
        if p:
            c[t] = c[t] - p * w


def _default_ring(c: int) -> CycloRing:
    return CycloRing(c)


def _check_root(a: int, c: int) -> None:
    if c <= 0:
        raise ValueError("c must be positive")
    if (2 * a) % c == 0:
        raise ValueError("z = +-1 is not supported")


def O_double_sum(a: int, c: int, T: int, ring: Optional[CycloRing] = None) -> list:
    """Integer-exponent coefficients (below T) of the defining double sum at z = zeta_c^a."""
    _check_root(a, c)
    ring = ring or _default_ring(c)
    z = ring.root_of_unity(Fraction(a, c))
    zi = z.inv()
    zero, one = ring.zero(), ring.one()
    total = [zero] * T
    total[0] = one
    k = 1
    while k * (k + 1) // 2 < T:
        term = [zero] * T
        term[k * (k + 1) // 2] = one * 2
        for j in range(1, k):
            # multiply by (1 + q^j)
            _dense_mul_linear(term, -1, j)
        for j in range(1, k + 1):
            _dense_div_linear(term, z, j)
            _dense_div_linear(term, zi, j)
        total = [x + y if y else x for x, y in zip(total, term)]
        k += 1
    return total


def O_lambert(a: int, c: int, T: int, ring: Optional[CycloRing] = None) -> list:
    """Same coefficients via (-q)/(q) [1 + 2 sum (1-z)(1-1/z)(-1)^n q^(n^2+n) / ((1-zq^n)(1-q^n/z))]."""
    _check_root(a, c)
    ring = ring or _default_ring(c)
    z = ring.root_of_unity(Fraction(a, c))
    zi = z.inv()
    zero, one = ring.zero(), ring.one()
    pref = (1 - z) * (1 - zi) * 2
    bracket = [zero] * T
    bracket[0] = one
    n = 1
    while n * n + n < T:
        term = [zero] * T
        term[n * n + n] = pref if n % 2 == 0 else -pref
        _dense_div_linear(term, z, n)
        _dense_div_linear(term, zi, n)
        bracket = [x + y if y else x for x, y in zip(bracket, term)]
        n += 1
    # (-q;q)/(q;q)
    for j in range(1, T):
        _dense_mul_linear(bracket, -1, j)
        _dense_div_linear(bracket, one, j)
    return bracket


def O_at_root(a: int, c: int, T: int, ring: Optional[CycloRing] = None, D: int = DEFAULT_D) -> QSeries:
    """The rank generating function at z = zeta_c^a, known below q^T.

    Both the double-sum definition and the Lambert form are computed and must agree.
    """
    T = int(T)
    ring = ring or _default_ring(c)
    lhs = O_double_sum(a, c, T, ring)
    rhs = O_lambert(a, c, T, ring)
    if lhs != rhs:
        bad = next(i for i, (x, y) in enumerate(zip(lhs, rhs)) if x != y)
        raise ArithmeticError(f"double sum and Lambert form disagree at q^{bad}")
    return QSeries(ring, 1, 0, lhs, T).regrid(D)


def rank_difference_series(r: int, s: int, d: int, T: int, t: int = 7, table: Optional[RankTable] = None) -> QSeries:
    """sum_n (N(r,t,tn+d) - N(s,t,tn+d)) q^n, known below q^T."""
    T = int(T)
    need = t * (T - 1) + d
    if table is None or table.n_max < need:
        table = rank_table(max(need, 0))
    terms = {}
    for n in range(T):
        m = t * n + d
        v = table.N_mod(r, t, m) - table.N_mod(s, t, m)
        if v:
            terms[n] = v
    return QSeries.from_terms(terms, CycloRing(1), DEFAULT_D, T)
