from collections import Counter
from fractions import Fraction

import pytest

from qdissect.exactmath import CycloRing
from qdissect.qseries import Pochhammer, ProductSpec
from qdissect.ranks import (
    O_at_root,
    O_double_sum,
    O_lambert,
    enumerate_overpartitions,
    rank_difference_series,
    rank_table,
    rank_table_by_enumeration,
    rank_table_by_expansion,
)
from qdissect.verifier.expand import R10_closed_form_series

R7 = CycloRing(7)


def test_overpartitions_of_four():
    ops = enumerate_overpartitions(4)
    assert len(ops) == 14
    assert len({(p, o) for p, o, _ in ops}) == 14
    assert Counter(r for _, _, r in ops) == {3: 2, 1: 4, 0: 2, -1: 4, -3: 2}
    assert Counter(r % 7 for _, _, r in ops) == {0: 2, 1: 4, 3: 2, 4: 2, 6: 4}


def test_empty_overpartition():
    assert enumerate_overpartitions(0) == [((), frozenset(), 0)]


def test_enumeration_cap():
    with pytest.raises(ValueError):
        enumerate_overpartitions(41)


def test_rank_table_examples():
    t = rank_table(10)
    assert (t.N_mod(0, 7, 4), t.N_mod(1, 7, 4), t.N_mod(3, 7, 4)) == (2, 4, 2)
    assert sum(t.N_mod(k, 7, 4) for k in range(7)) == 14
    for n in range(11):
        for k in range(7):
            assert t.N_mod(k, 7, n) == t.N_mod(7 - k, 7, n)


def test_counting_routes_agree():
    a = rank_table_by_enumeration(18)
    b = rank_table_by_expansion(18)
    c = rank_table(18)
    for n in range(19):
        for m in range(-n - 1, n + 2):
            assert a.N(m, n) == b.N(m, n) == c.N(m, n)
            assert c.N(m, n) == c.N(-m, n)


def test_pbar_matches_product():
    one = CycloRing(1).one()
    s = ProductSpec(((Pochhammer(-one, 1, 1), 1), (Pochhammer(one, 1, 1), -1))).expand(41, D=1)
    t = rank_table(40)
    for n in range(41):
        assert t.pbar(n) == s.coefficient(n).as_rational()


def test_O_at_root_against_table():
    T = 26
    O = O_at_root(1, 7, T, R7)
    t = rank_table(T)
    z = R7.zeta()
    assert O.coefficient(0) == 1
    assert O.coefficient(1) == 2
    for n in range(T):
        want = sum((t.N(m, n) * z ** (m % 7) for m in range(-n - 1, n + 2)), R7.zero())
        assert O.coefficient(n) == want


def test_two_routes_to_O():
    assert O_double_sum(2, 9, 20) == O_lambert(2, 9, 20)


def test_O_rejects_plus_minus_one():
    with pytest.raises(ValueError):
        O_at_root(1, 2, 5)
    with pytest.raises(ValueError):
        O_at_root(7, 7, 5)


def test_rank_differences():
    s = rank_difference_series(1, 0, 0, 6)
    assert s.coefficient(0) == -1
    assert rank_difference_series(3, 3, 2, 10).is_zero()
    closed = R10_closed_form_series(6)
    assert closed.regrid(24) == rank_difference_series(1, 0, 0, 6)


def test_csv_total_rows():
    text = rank_table(4).to_csv(7)
    assert "4,1,4" in text.splitlines()
