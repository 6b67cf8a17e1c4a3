"""Exact expansion of the identity, the dissection cross-check and the non-holomorphic cancellation."""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from ..exactmath import CycloNumber, CycloRing, solve_rational
from ..mock.holomorphic import N7_series, bilateral_lambert, calM_series
from ..mock.nonholo import nonholo_coeff
from ..qseries import DEFAULT_D, Pochhammer, ProductSpec, QSeries, eta_spec, fNrho_spec
from ..ranks import O_at_root, rank_difference_series
from .terms import A_value, IdentityTerm, DissectionTerm, build_dissection_terms

F = Fraction
R28 = CycloRing(28)
QQ = CycloRing(1)
CONDUCTOR = 28
CACHE_ENV = "QDISSECT_CACHE"


# -- F-notation --------------------------------------------------------------------------------


def F_spec(k: int) -> ProductSpec:
    """F0 = eta(98 tau), Fk = f_(98, 7k)."""
    if k == 0:
        return eta_spec(98)
    if not 1 <= k <= 7:
        raise ValueError("F index must be in 0..7")
    return fNrho_spec(98, 7 * k)


def monomial_spec(exponents: Sequence[int]) -> ProductSpec:
    out = ProductSpec()
    for k, e in enumerate(exponents):
        if e:
            out = out * F_spec(k) ** e
    return out


def special_series(term: IdentityTerm, T, D: int = DEFAULT_D) -> Optional[QSeries]:
    s = term.special
    if s.kind == "none":
        return None
    if s.kind == "N7":
        return N7_series(s.k, T, R28, D)
    return calM_series(1, 7, T, R28, D)


def term_series(term: IdentityTerm, T, D: int = DEFAULT_D) -> QSeries:
    """coefficient * F-monomial * special factor, known below q^T."""
    T = F(T)
    mono = monomial_spec(term.exponents)
    v_m = mono.leading_exponent()
    coef = term.coefficient(R28)
    spec = special_series(term, T - v_m, D)
    if spec is None:
        return mono.expand(T, QQ, D).change_ring(R28).scale(coef)
    if spec.is_zero():
        return QSeries.zero(R28, D, T)
    body = mono.expand(T - spec.valuation, QQ, D).change_ring(R28)
    return (body * spec).scale(coef)


def _cache_path(term: IdentityTerm, T, D: int) -> Optional[Path]:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    key = hashlib.sha256(f"{term.to_line()}|{F(T)}|{D}".encode()).hexdigest()[:32]
    return Path(root) / f"term-{key}.json"


def cached_term_series(term: IdentityTerm, T, D: int = DEFAULT_D) -> QSeries:
    path = _cache_path(term, T, D)
    if path is not None and path.exists():
        return QSeries.from_json(path.read_text())
    out = term_series(term, T, D)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(out.to_json())
        tmp.replace(path)
    return out


def _term_job(args):
    return cached_term_series(*args)


def expand_terms(terms: Sequence[IdentityTerm], T, D: int = DEFAULT_D, jobs: int = 1) -> list[QSeries]:
    args = [(t, F(T), D) for t in terms]
    if jobs > 1 and len(terms) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_term_job, args))
    return [_term_job(a) for a in args]


def expand_identity(terms: Sequence[IdentityTerm], T, D: int = DEFAULT_D, jobs: int = 1) -> QSeries:
    """Exact sum of all terms, known below q^T; the identity says this is zero."""
    total = QSeries.zero(R28, D, F(T))
    for s in expand_terms(terms, T, D, jobs):
        total = total + s
    return total


def first_nonzero(s: QSeries) -> Optional[Fraction]:
    """Exponent of the first nonzero coefficient below the truncation, None if there is none."""
    return s.valuation if not s.is_zero() else None


# -- J-notation and the dissection --------------------------------------------------------------


def J_spec(a: int) -> ProductSpec:
    """J0 = (q^14;q^14), Ja = (q^a, q^(14-a); q^14)."""
    one = QQ.one()
    if a == 0:
        return ProductSpec(((Pochhammer(one, 14, 14), 1),))
    if not 1 <= a <= 7:
        raise ValueError("J index must be in 0..7")
    return ProductSpec(((Pochhammer(one, a, 14), 1), (Pochhammer(one, 14 - a, 14), 1)))


def J_monomial_spec(exponents: Sequence[int]) -> ProductSpec:
    out = ProductSpec()
    for a, e in enumerate(exponents):
        if e:
            out = out * J_spec(a) ** e
    return out


def dissection_term_series(t: DissectionTerm, T: int) -> QSeries:
    """One summand of R_d(q) on the integer grid, known below q^T."""
    coef = A_value(t.A_triple, R28) * t.scale
    if t.lambert is None:
        body = J_monomial_spec(t.exponents).expand(T - t.qpow, QQ, 1).change_ring(R28)
    else:
        lam = bilateral_lambert(7, 7, t.lambert, T - t.qpow, R28, 1)
        if lam.is_zero():
            return QSeries.zero(R28, 1, T)
        prod = J_monomial_spec(t.exponents).expand(T - t.qpow - lam.valuation, QQ, 1).change_ring(R28)
        body = prod * lam
    return body.shift(t.qpow).scale(coef)


def R_series(d: int, T: int, terms: Optional[Sequence[DissectionTerm]] = None) -> QSeries:
    terms = terms if terms is not None else build_dissection_terms()
    out = QSeries.zero(R28, 1, T)
    for t in terms:
        if t.d == d:
            out = out + dissection_term_series(t, T)
    return out


def A_components(c: CycloNumber) -> Optional[tuple]:
    """(x, y, z) with c = A(x, y, z), or None when c is not of that shape."""
    c = c.lift(R28) if c.ring is not R28 else c
    cols = [A_value(tuple(int(i == j) for i in range(3)), R28).coeffs for j in range(3)]
    sol = solve_rational(cols, c.coeffs)
    return None if sol is None else tuple(sol)


# R_{1,0}(0;q) closed form, transcribed separately: (coefficient, q-power, J-exponents j0..j7)
R10_CLOSED_FORM = (
    (-16, 0, (1, -3, -3, -3, -1, -1, -1, -2)),
    (-1, 0, (1, -3, -3, -3, 0, -3, -2, 0)),
    (1, 0, (1, -3, -3, -2, -3, 0, -3, 0)),
    (-5, 0, (1, -3, -2, -3, -3, -3, 0, 0)),
    (20, 0, (1, -3, -3, -2, -2, -3, 0, -1)),
    (-3, 1, (1, -3, -3, -2, 1, -2, -3, -2)),
    (4, 1, (1, -3, -3, 0, -3, -1, -3, -1)),
    (3, 2, (1, -3, -3, 2, -3, -2, -3, -2)),
)


def R10_closed_form_series(T: int) -> QSeries:
    out = QSeries.zero(QQ, 1, T)
    for c, p, exps in R10_CLOSED_FORM:
        out = out + J_monomial_spec(exps).expand(T - p, QQ, 1).shift(p).scale(F(c))
    return out


@dataclass
class DissectionReport:
    N: int
    matches: bool
    first_mismatch: Optional[int]
    rank_differences: dict = field(default_factory=dict)  # (r, d) -> bool
    closed_form_matches: bool = False
    closed_form_constant: Optional[Fraction] = None
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.matches and self.closed_form_matches and all(self.rank_differences.values())

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "matches": self.matches,
            "first_mismatch": self.first_mismatch,
            "rank_differences": {f"R_{r},0({d})": v for (r, d), v in sorted(self.rank_differences.items())},
            "closed_form_matches": self.closed_form_matches,
            "closed_form_constant": None if self.closed_form_constant is None else str(self.closed_form_constant),
            "problems": list(self.problems),
            "ok": self.ok,
        }


def dissection_check(
    N: int = 150, terms: Optional[Sequence[DissectionTerm]] = None, closed_form_T: int = 21
) -> DissectionReport:
    """Compare sum_d q^d R_d(q^7) with the rank generating function at zeta_7 through q^N."""
    terms = terms if terms is not None else build_dissection_terms()
    T = N + 1
    O = O_at_root(1, 7, T, R28, 1)
    total = QSeries.zero(R28, 1, T)
    Rd = {}
    for d in range(7):
        Td = -(-(T - d) // 7)
        Rd[d] = R_series(d, Td, terms)
        total = total + Rd[d].substitute(7).shift(d)
    diff = (O - total).truncate(T)
    mismatch = None if diff.is_zero() else int(diff.valuation)
    report = DissectionReport(N, mismatch is None, mismatch)

    # R_{r,0}(d) from the A-components of R_d
    for d in range(7):
        Td = Rd[d].trunc
        comps = {r: {} for r in (1, 2, 3)}
        for e, c in Rd[d].items():
            xyz = A_components(c)
            if xyz is None:
                report.problems.append(f"R_{d} coefficient of q^{e} is not of the form A(x,y,z)")
                continue
            for r, v in zip((1, 2, 3), xyz):
                if v:
                    comps[r][int(e)] = v
        n = int(Td)
        for r in (1, 2, 3):
            got = QSeries.from_terms(comps[r], QQ, 1, n) if comps[r] else QSeries.zero(QQ, 1, n)
            want = rank_difference_series(r, 0, d, n).regrid(1)
            report.rank_differences[(r, d)] = got == want
            if d == 0 and r == 1:
                r10 = got

    # the closed form of R_{1,0}(0;q)
    Tc = min(closed_form_T, int(Rd[0].trunc))
    closed = R10_closed_form_series(Tc)
    report.closed_form_matches = closed == r10.truncate(Tc)
    report.closed_form_constant = closed.coefficient(0).as_rational()
    return report


# -- non-holomorphic parts ------------------------------------------------------------------------

# Lambert partner weights: k -> A-triple of the -i A N7(k) term
NONHOLO_PARTNERS = {2: (-8, 0, -6), 3: (6, 4, 4), 1: (8, 2, 4)}


@dataclass
class CancellationReport:
    n_max: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {"n_max": self.n_max, "mismatches": self.mismatches, "ok": self.ok}


def nonholo_cancellation(n_max: int = 50, partners: Optional[dict] = None) -> CancellationReport:
    """Non-holomorphic coefficient of the rank function equals the weighted N7 coefficients."""
    partners = partners if partners is not None else NONHOLO_PARTNERS
    bad = []
    for n in range(1, n_max + 1):
        lhs = nonholo_coeff("M17", n, R28).weight
        rhs = R28.zero()
        for k, trip in partners.items():
            rhs = rhs - R28.i * A_value(trip, R28) * nonholo_coeff(f"N7({k})", n, R28).weight
        if lhs != rhs:
            bad.append(n)
    return CancellationReport(n_max, bad)
