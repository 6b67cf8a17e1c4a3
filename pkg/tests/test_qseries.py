import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qdissect.exactmath import CycloRing, QQ
from qdissect.qseries import (
    Pochhammer,
    ProductSpec,
    QSeries,
    eta_series,
    eta_spec,
    fNrho_series,
    jacprod_series,
    klein_series,
    klein_shift_factor,
    partition_series,
    pochhammer_series,
)

R7 = CycloRing(7)
R28 = CycloRing(28)


def partitions_count(n):
    # simple dynamic programme, independent of the product machinery
    p = [1] + [0] * n
    for k in range(1, n + 1):
        for s in range(k, n + 1):
            p[s] += p[s - k]
    return p[n]


def brute_product(exps, T):
    """Coefficients of prod(1 - q^e) below T by repeated polynomial multiplication."""
    poly = [1] + [0] * (T - 1)
    for e in exps:
        new = poly[:]
        for i in range(T - e):
            new[i + e] -= poly[i]
        poly = new
    return poly


def test_geometric_inverse_pair():
    one_minus_q = QSeries.from_terms({0: 1, 1: -1})
    geo = QSeries.from_terms({n: 1 for n in range(30)}, trunc=30)
    prod = one_minus_q * geo
    assert prod.agrees_with(QSeries.one(), 29)
    assert one_minus_q.invert(30) == geo


def test_euler_product_and_partitions():
    e = pochhammer_series(1, 1, 1, 13)
    assert {int(k): c for k, c in e.items()} == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1}
    inv = e.invert()
    assert inv.coefficient(10) == 42
    assert partition_series(40).coefficient(39) == partitions_count(39)
    assert (e * inv).truncate(13) == QSeries.one(trunc=13)


def test_cube_matches_brute_triple_convolution():
    T = 40
    single = brute_product(range(1, T), T)
    cube = [0] * T
    for i, a in enumerate(single):
        for j, b in enumerate(single):
            for k, c in enumerate(single):
                if a and b and c and i + j + k < T:
                    cube[i + j + k] += a * b * c
    s = pochhammer_series(1, 1, 1, T) ** 3
    assert [s.coefficient(n) for n in range(T)] == cube
    assert s.coefficient(3) == 5 and s.coefficient(6) == -7


def test_invert_leading_coefficient_rule():
    z = R7.zeta()
    s = QSeries.from_terms({0: 1 - z, 1: R7.one()}, R7, trunc=10)
    assert s.invert().leading_coefficient == (1 - z).inv()
    with pytest.raises(ZeroDivisionError):
        QSeries.zero(R7, trunc=5).invert()


def test_invert_tracks_relative_precision():
    s = QSeries.from_terms({2: 1, 3: 1}, trunc=10)
    inv = s.invert()
    assert inv.valuation == -2 and inv.trunc == 6
    assert (s * inv).agrees_with(QSeries.one(), 4)


def test_truncation_min_rule():
    a = QSeries.from_terms({1: 1}, trunc=10)
    b = QSeries.from_terms({3: 1}, trunc=7)
    assert (a * b).trunc == min(10 + 3, 7 + 1)
    assert (a + b).trunc == 7


def test_grid_and_ring_mismatch():
    a = QSeries.one(QQ, 24)
    with pytest.raises(ValueError):
        a * QSeries.one(QQ, 12)
    with pytest.raises(ValueError):
        a + QSeries.one(R7, 24)


def test_pochhammer_first_factor():
    z = R7.zeta()
    s = pochhammer_series(z, 1, 1, 10)
    assert s.coefficient(0) == 1 and s.coefficient(1) == -z
    j = jacprod_series(R7.zeta(2), 0, 2, 10)
    assert j.coefficient(0) == 1 - R7.zeta(2)
    with pytest.raises(ValueError):
        Pochhammer(z, 1, 0)


def test_pochhammer_peel_first_factor():
    z = R7.zeta(3)
    full = pochhammer_series(z, 1, 2, 40)
    rest = pochhammer_series(z, 3, 2, 40)
    first = QSeries.from_terms({0: 1, 1: -z}, R7)
    assert (full * first.invert(40)).agrees_with(rest, 39)


def test_eta_leading_exponents():
    assert eta_series(1, 5).valuation == Fraction(1, 24)
    assert eta_series(98, 10).valuation == Fraction(49, 12)
    q = eta_series(2, 10) / eta_series(1, 10) ** 2
    assert q.valuation == 0
    with pytest.raises(ValueError):
        eta_series(1, 5, D=4)


def test_klein_series():
    t = klein_series(0, Fraction(2, 7), 2, 10)
    assert t.valuation == Fraction(1, 6)
    assert t.leading_coefficient
    ring = t.ring
    t1 = klein_series(1, Fraction(2, 7), 2, 10, ring)
    assert t1 == t.scale(klein_shift_factor(0, Fraction(2, 7), 1, 0, ring))


def test_fNrho():
    assert fNrho_series(98, 7, 30).valuation == 9
    assert fNrho_series(98, 49, 10).valuation == 0
    assert fNrho_series(98, 91, 80) == fNrho_series(98, 7, 80)
    assert fNrho_series(98, -7, 80) == fNrho_series(98, 105, 80)
    with pytest.raises(ValueError):
        fNrho_series(98, 98, 10)


def test_dissect():
    geo = QSeries.from_terms({n: 1 for n in range(71)}, trunc=71)
    d = geo.dissect(7, 3)
    assert d == QSeries.from_terms({n: 1 for n in range(10)}, trunc=Fraction(68, 7))
    f = QSeries.from_terms({0: 2, 1: -1, 3: 5}, trunc=10)
    assert f.substitute(7).shift(1).dissect(7, 1).agrees_with(f, 9)
    with pytest.raises(ValueError):
        QSeries.from_terms({Fraction(1, 2): 1}).dissect(2, 0)


def test_dissect_round_trip():
    s = pochhammer_series(R7.zeta(), 1, 1, 50) * partition_series(50, R7)
    back = QSeries.zero(R7, trunc=50)
    for d in range(7):
        back = back + s.dissect(7, d).substitute(7).shift(d)
    assert back.agrees_with(s, 49)


def test_eta_numeric_values():
    val, tail = eta_spec(1).numeric_eval(1j)
    assert abs(val - math.gamma(0.25) / (2 * math.pi**0.75)) < 1e-12
    s = eta_series(1, 12)
    v, t = s.numeric_eval(1j)
    assert abs(v - val) < 1e-10
    r, _ = eta_spec(1).numeric_eval(1 + 1j)
    import cmath

    assert abs(r / val - cmath.exp(1j * math.pi / 12)) < 1e-9
    pv, _ = ProductSpec(((Pochhammer(QQ.one(), 1, 1), 1),)).numeric_eval(1j)
    assert abs(pv - val * math.exp(2 * math.pi / 24)) < 1e-12


def test_product_numeric_vs_expansion():
    z = R28.zeta(3)
    spec = ProductSpec.jac(z, Fraction(1, 2), 2) * eta_spec(2, R28) ** -3
    T = 40
    s = spec.expand(T, R28)
    tau = 0.1 + 0.8j
    v1, tail1 = spec.numeric_eval(tau)
    v2, tail2 = s.numeric_eval(tau)
    assert abs(v1 - v2) <= tail1 + tail2 + 1e-12


def test_json_and_text_round_trip():
    s = (klein_series(0, Fraction(2, 7), 2, 8, R28) * eta_series(1, 8, R28)).shift(Fraction(-1, 4))
    assert QSeries.from_json(s.to_json()) == s
    assert QSeries.from_text(s.to_text()) == s
    p = QSeries.from_terms({0: 3, 5: Fraction(-1, 2)})
    assert QSeries.from_text(p.to_text()) == p
    with pytest.raises(ValueError):
        QSeries.from_text("# conductor=1 D=24 T=5\nnonsense\n")


small = st.dictionaries(st.integers(0, 12), st.integers(-5, 5), max_size=6)


@settings(max_examples=40, deadline=None)
@given(small, small, small)
def test_ring_laws(a, b, c):
    A = QSeries.from_terms(a, trunc=15)
    B = QSeries.from_terms(b, trunc=13)
    C = QSeries.from_terms(c, trunc=11)
    assert ((A * B) * C).agrees_with(A * (B * C))
    assert (A * (B + C)).agrees_with(A * B + A * C)
