"""The twelve acceptance criteria, one PASS/FAIL line each (run with -s to see them)."""

import cmath
import math
import random
import time
from collections import Counter
from fractions import Fraction

import pytest

from qdissect.cusps import (
    WORKING_GROUP,
    GroupSpec,
    Matrix,
    cusp_class,
    cusp_representatives,
    group_index,
    match_tables,
    reference_cusps,
    sample_elements,
    valence_budget,
)
from qdissect.exactmath import CycloRing
from qdissect.mock import numeric
from qdissect.mock.holomorphic import N7_product_series, N7_series, N_series, P_series, lambert_N7_series
from qdissect.mock.multipliers import R24, eta_multiplier, jacobi_ext
from qdissect.ranks import O_at_root, enumerate_overpartitions, rank_table_by_enumeration
from qdissect.verifier.certificate import verify_mod7
from qdissect.verifier.expand import dissection_check, expand_identity, nonholo_cancellation
from qdissect.verifier.mutations import fixed_mutations
from qdissect.verifier.terms import build_identity_terms

F = Fraction
R28 = CycloRing(28)


@pytest.fixture
def report(capsys):
    def emit(n, title, ok, detail, start, limit):
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {n:2d} {title}: {detail} ({elapsed:.1f}s, limit {limit}s)")
        assert ok, detail

    return emit


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def test_01_rank_oracle(report):
    t0 = time.perf_counter()
    ops = enumerate_overpartitions(4)
    mods = Counter(r % 7 for _, _, r in ops)
    ok = len(ops) == 14 and mods == {0: 2, 1: 4, 3: 2, 4: 2, 6: 4}
    report(1, "overpartitions of 4", ok, f"{len(ops)} overpartitions, ranks mod 7 {dict(sorted(mods.items()))}", t0, 1)


def test_02_generating_function(report):
    t0 = time.perf_counter()
    T = 26
    O = O_at_root(1, 7, T, R28, 1)
    table = rank_table_by_enumeration(T - 1)
    z = R28.root_of_unity(F(1, 7))
    bad = [
        n
        for n in range(T)
        if O.coefficient(n) != sum((table.N(m, n) * z ** (m % 7) for m in range(-n - 1, n + 2)), R28.zero())
    ]
    report(2, "O(zeta_7) vs enumeration", not bad, f"n <= 25, mismatches {bad}", t0, 10)


def test_03_decomposition(report):
    t0 = time.perf_counter()
    T = 101
    z = R28.root_of_unity(F(1, 7))
    pref = 2 * z * (1 - z) * (1 + z).inv()
    diff = O_at_root(1, 7, T, R28) - (P_series(1, 7, T, R28) - N_series(1, 7, T, R28).scale(R28.i)).scale(pref)
    report(3, "decomposition of O(zeta_7)", diff.is_zero(), f"difference zero below q^{diff.trunc}", t0, 30)


def test_04_N7_routes(report):
    t0 = time.perf_counter()
    T = 60  # 1440 steps of the 1/24 grid
    bad = [
        k
        for k in (1, 2, 3)
        if lambert_N7_series(k, T, R28) != N7_product_series(k, T, R28) - N7_series(k, T, R28).scale(R28.i)
    ]
    report(4, "N7 route equivalence", not bad, f"k = 1,2,3 through q^{T}, failing {bad}", t0, 30)


def test_05_cusp_table(report):
    t0 = time.perf_counter()
    G = WORKING_GROUP
    reps = cusp_representatives(G)
    table = reference_cusps()
    problems = match_tables(G, table)
    total = sum(w for _, w in reps)
    finite = [z for z, _ in reps if not z.is_infinity]
    distinct = len({cusp_class(G, z) for z, _ in table})
    ok = not problems and total == group_index(G) == 504 and len(reps) == len(table) == distinct
    detail = (
        f"{len(reps)} classes ({len(finite)} besides infinity), width-preserving bijection with the "
        f"{len(table)}-row table, widths sum {total} = index {group_index(G)}"
    )
    report(5, "cusp table", ok, detail, t0, 60)


def test_06_valence_budget(report):
    t0 = time.perf_counter()
    monos = [t.monomial() for t in build_identity_terms()]
    _, ours = valence_budget(WORKING_GROUP, monos)
    _, theirs = valence_budget(WORKING_GROUP, monos, reference_cusps())
    report(6, "valence budget", ours == theirs == -109, f"budget {ours} (reference representatives {theirs})", t0, 60)


def test_07_certificate(report):
    t0 = time.perf_counter()
    s = expand_identity(build_identity_terms(), 111)
    cert = verify_mod7()
    ok = s.is_zero() and cert.verdict == "proven" and cert.V + cert.budget >= 1
    detail = f"zero below q^111; V {cert.V}, budget {cert.budget}, verdict {cert.verdict}"
    report(7, "main certificate", ok, detail, t0, 300)


def test_08_dissection(report):
    t0 = time.perf_counter()
    rep = dissection_check(150, closed_form_T=21)
    detail = (
        f"match through q^150 {rep.matches}, rank differences {sum(rep.rank_differences.values())}/21, "
        f"closed form {rep.closed_form_matches} with constant {rep.closed_form_constant}"
    )
    report(8, "dissection cross-check", rep.ok and rep.closed_form_constant == -1, detail, t0, 120)


def test_09_nonholo(report):
    t0 = time.perf_counter()
    rep = nonholo_cancellation(50)
    report(9, "non-holomorphic cancellation", rep.ok, f"n <= 50, mismatches {rep.mismatches}", t0, 5)


def _random_sl2(rng, size=9):
    while True:
        c, d = rng.randint(-size, size), rng.randint(-size, size)
        if c == 0 or math.gcd(c, d) != 1:
            continue
        a = pow(d, -1, abs(c)) if abs(c) > 1 else 0
        b, r = divmod(a * d - 1, c)
        if r == 0:
            return Matrix(a, b, c, d)


def test_10_numeric_transformations(report):
    t0 = time.perf_counter()
    rng = random.Random(2024)
    tau = 0.2 + 1.1j
    eta_bad = 0
    for _ in range(20):
        A = _random_sl2(rng)
        rhs = complex(eta_multiplier(A).embed(1)) * cmath.sqrt(A.j(tau)) * numeric.eta(tau)
        eta_bad += not close(numeric.eta(A.act(tau)), rhs, 1e-8)

    mu_bad = 0
    tau2, u, v = 0.15 + 1.2j, 0.2 + 0.3j, 0.1 - 0.2j
    for A in (Matrix(0, -1, 1, 0), Matrix(1, 1, 1, 2), Matrix(2, 1, 5, 3)):
        j = A.j(tau2)
        nu = complex(eta_multiplier(A).embed(1))
        rhs = nu**-3 * cmath.exp(-1j * cmath.pi * A.c * (u - v) ** 2 / j) * cmath.sqrt(j) * numeric.mutilde(u, v, tau2)
        mu_bad += not close(numeric.mutilde(u / j, v / j, A.act(tau2)), rhs, 1e-6)

    # N(a,c) under gamma-even matrices, through mu~ at modulus 2 tau
    N_bad = 0
    a, c = 1, 7
    tau3 = 0.05 + 0.8j
    for A in (Matrix(1, 0, 2, 1), Matrix(3, 1, 2, 1), Matrix(1, 0, -4, 1)):
        al, be, ga, de = A.a, A.b, A.c, A.d
        nu = complex(eta_multiplier(A.upper(2)).embed(1))
        sign = -1 if (be + (al - 1) // 2) % 2 else 1
        ph = cmath.exp(-1j * cmath.pi * (2 * a * a * ga * de / c**2 + 2 * a / c + al * be / 2 - 2 * a * de / c))
        qp = cmath.exp(-1j * cmath.pi * tau3 * (2 * a * a * ga * ga / c**2 - 2 * a * ga / c + 0.5))
        mt = numeric.mutilde(2 * a * de / c + 2 * a * ga * tau3 / c, tau3, 2 * tau3)
        rhs = nu**-3 * sign * ph * qp * cmath.sqrt(A.j(tau3)) * mt
        N_bad += not close(numeric.N_numeric(a, c, A.act(tau3)), rhs, 1e-6)

    ok = eta_bad == mu_bad == N_bad == 0
    detail = f"eta law failures {eta_bad}/20, mu~ failures {mu_bad}/3, N gamma-even failures {N_bad}/3"
    report(10, "numeric transformation suite", ok, detail, t0, 30)


def test_11_multiplier_identity(report):
    t0 = time.perf_counter()
    G = GroupSpec((16, 49), (4, 7))
    sample = sample_elements(G, 50, random.Random(11))
    bad = [A for A in sample if eta_multiplier(A.upper(2)) ** -3 * R24.zeta(6 * A.b % 24) != jacobi_ext(A.c, A.d)]
    report(11, "nu/Jacobi multiplier identity", len(sample) == 50 and not bad, f"{len(sample)} samples, {len(bad)} failures", t0, 10)


def test_12_mutations(report):
    t0 = time.perf_counter()
    terms = build_identity_terms()
    caught = []
    for m in fixed_mutations():
        s = expand_identity(m.apply(terms), 111)
        caught.append((m.name, None if s.is_zero() else s.valuation))
    missed = [name for name, v in caught if v is None]
    detail = f"{len(caught) - len(missed)}/{len(caught)} caught by the vanishing check, missed {missed}"
    report(12, "mutation sensitivity", len(caught) == 10 and not missed, detail, t0, 600)
