import cmath
import math
import pickle
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qdissect.exactmath import CycloNumber, CycloRing, cyclotomic_polynomial, euler_phi

R7 = CycloRing(7)
R28 = CycloRing(28)


def A(x, y, z, ring=R7):
    zt = ring.root_of_unity(Fraction(1, 7))
    return x * zt + y * zt**2 + z * zt**3 + z * zt**4 + y * zt**5 + x * zt**6


def test_cyclotomic_polynomials_small():
    assert cyclotomic_polynomial(1) == (-1, 1)
    assert cyclotomic_polynomial(7) == (1,) * 7
    assert cyclotomic_polynomial(28) == (1, 0, -1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 1)
    for n in (1, 2, 7, 12, 14, 24, 28, 30, 56):
        assert len(cyclotomic_polynomial(n)) - 1 == euler_phi(n)


def test_ring_is_cached_and_pickles():
    assert CycloRing(28) is R28
    z = R28.zeta(5)
    back = pickle.loads(pickle.dumps(z))
    assert back.ring is R28 and back == z


def test_zeta_product_is_one():
    z = R7.zeta()
    assert z * z**6 == 1
    assert R7.zeta(7) == 1


def test_phi7_relation_annihilates():
    s = sum((R7.zeta(k) for k in range(7)), R7.zero())
    assert s == 0
    assert (s * A(3, -2, 5)).is_zero()


def test_mul_matches_embedding():
    a, b = A(1, 0, 0), A(0, 1, 0)
    assert abs((a * b).embed(1) - a.embed(1) * b.embed(1)) < 1e-12


def test_inverse_examples():
    assert R7.one().inv() == 1
    assert R7.zeta().inv() == R7.zeta(6)
    u = 1 + R7.zeta()
    assert u.inv() * u == 1
    with pytest.raises(ZeroDivisionError):
        R7.zero().inv()


def test_embed_examples():
    assert R28.one().embed(3) == 1
    assert abs(R7.zeta().embed(1) - cmath.exp(2j * math.pi / 7)) < 1e-15
    assert abs(A(-16, -8, -8).embed(1).imag) < 1e-12
    with pytest.raises(ValueError):
        R28.zeta().embed(2)


def test_ring_mismatch():
    with pytest.raises(ValueError):
        R7.zeta() * R28.zeta()
    with pytest.raises(ValueError):
        R7.zeta() + R28.zeta()


def test_root_of_unity_membership():
    assert R28.root_of_unity(Fraction(1, 4)) == R28.i
    assert R28.i * R28.i == -1
    with pytest.raises(ValueError):
        R28.root_of_unity(Fraction(1, 3))


def test_lift_and_restrict():
    a = A(2, -1, Fraction(1, 3))
    big = a.lift(R28)
    assert big.restrict(R7) == a
    assert big == a
    with pytest.raises(ValueError):
        R28.i.restrict(R7)


def test_galois_fixes_A():
    a = A(5, -3, 7)
    assert a.galois(-1) == a
    assert a.conjugate() == a
    assert A(1, 0, 0).galois(2) == A(0, 1, 0)


def test_json_round_trip():
    a = A(Fraction(1, 2), -3, 4).lift(R28) + R28.i / 3
    data = a.to_json()
    assert all("/" in s or s.lstrip("-").isdigit() for s in data)
    assert CycloNumber.from_json(R28, data) == a


coeff = st.fractions(min_value=-20, max_value=20, max_denominator=12)
elem = st.lists(coeff, min_size=12, max_size=12).map(lambda cs: CycloNumber(R28, cs))


@settings(max_examples=40, deadline=None)
@given(elem, elem, elem)
def test_field_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    if a:
        assert a * a.inv() == 1


@settings(max_examples=40, deadline=None)
@given(elem, elem, st.sampled_from([1, 3, 5, 9, 11, 13, 27]))
def test_embedding_homomorphism(a, b, j):
    lhs = (a * b).embed(j)
    rhs = a.embed(j) * b.embed(j)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs))
