import cmath
import math
from fractions import Fraction

import pytest

from qdissect.cusps import (
    WORKING_GROUP,
    CalMDesc,
    Cusp,
    Eta,
    FNrho,
    GroupParseError,
    GroupSpec,
    Matrix,
    Monomial,
    NDesc,
    PDesc,
    cusp_class,
    cusp_equivalent,
    cusp_representatives,
    cusp_width,
    eta_quotient,
    full_valence_sum,
    group_contains,
    group_index,
    match_tables,
    nu_order,
    nutilde_order,
    reference_cusps,
    parse_group,
    term_order_bound,
    valence_budget,
)
from qdissect.mock.holomorphic import P_spec

F = Fraction
G = WORKING_GROUP


def test_matrix_basics():
    with pytest.raises(ValueError):
        Matrix(1, 1, 1, 1)
    A = Matrix(2, 1, 3, 2)
    assert A * A.inv() == Matrix.identity()
    assert A.cusp() == Cusp(2, 3)
    assert Matrix.S().act(1j) == pytest.approx(1j)


def test_group_membership():
    assert group_contains(G, Matrix(1, 1, 0, 1))
    assert group_contains(G, Matrix(1, 0, 98, 1))
    assert not group_contains(G, Matrix(1, 0, 49, 1))
    assert not group_contains(G, Matrix(-1, 0, 0, -1))
    assert not G.contains_minus_identity


def test_parse_group():
    assert parse_group("G0(98)&G1(14)") == G
    assert parse_group(" G0( 4 ) ") == GroupSpec((4,), ())
    assert parse_group("SL2").N == 1
    for bad in ("G0(98", "G2(3)", "G0(0)", "G0(98)&", ""):
        with pytest.raises(GroupParseError):
            parse_group(bad)


def test_index_formula():
    assert group_index(G) == 504
    assert group_index(GroupSpec((2,), ())) == 3
    assert group_index(GroupSpec((), (4,))) == 6


def test_representatives_and_widths():
    reps = cusp_representatives(G)
    # 48 classes, as in the reference table
    assert len(reps) == 48
    assert sum(w for _, w in reps) == 504 == group_index(G)
    widths = dict(reps)
    assert widths[Cusp(1, 0)] == 1 and reps[0][0].is_infinity
    assert cusp_width(G, Cusp(0, 1)) == 98
    assert cusp_width(G, Cusp.parse("3/38")) == 49
    assert cusp_width(G, Cusp.parse("1/14")) == 1
    assert cusp_width(G, Cusp.parse("3/35")) == 2
    assert cusp_representatives(GroupSpec((1,), ())) == [(Cusp(1, 0), 1)]


def test_reference_table_bijection():
    assert match_tables(G, reference_cusps()) == []
    classes = {cusp_class(G, z) for z, _ in reference_cusps()}
    assert len(classes) == 48


def test_equivalence_witnesses():
    z = Cusp.parse("3/38")
    assert cusp_equivalent(G, z, z) is not None
    assert cusp_equivalent(G, Cusp(0, 1), Cusp(1, 0)) is None
    # each reference cusp is equivalent to exactly one computed representative
    reps = [r for r, _ in cusp_representatives(G)]
    for p, _ in reference_cusps()[:12]:
        hits = [r for r in reps if cusp_equivalent(G, p, r) is not None]
        assert len(hits) == 1
        g = cusp_equivalent(G, p, hits[0])
        assert group_contains(G, g) and g.act_cusp(p) == hits[0]
    # distinct reference entries are pairwise inequivalent (sampled pairs)
    table = [p for p, _ in reference_cusps()]
    for i in range(0, 48, 5):
        for j in range(i + 1, 48, 7):
            assert cusp_equivalent(G, table[i], table[j]) is None


def test_nu_orders():
    assert nu_order(0, F(1, 2)) == F(1, 8)
    assert nu_order(F(3, 4), F(3, 4)) == F(1, 8)
    assert nutilde_order(F(1, 3), F(1, 5)) == nu_order(F(1, 3), F(1, 5))
    assert nutilde_order(F(1, 2), 0) == min(F(1, 8), nu_order(F(1, 2), 0))


def test_descriptor_orders():
    assert FNrho(98, 7).bound(Cusp(1, 0)).value == 9
    assert FNrho(98, 14).bound(Cusp(1, 2)).value == F(1, 196)
    assert PDesc(1, 7).order(Matrix(1, 0, 2, 1)) == F(2, 7) - F(4, 49)
    assert not NDesc(1, 7).exact and not CalMDesc(1, 7).exact
    with pytest.raises(ValueError):
        Monomial(((NDesc(1, 7), 2),))
    with pytest.raises(TypeError):
        term_order_bound("eta", Cusp(0, 1))


def _numeric_order(spec, A, y1=30.0, y2=40.0):
    vals = []
    for y in (y1, y2):
        t = 1j * y
        v, _ = spec.numeric_eval(A.act(t))
        vals.append(math.log(abs(v / cmath.sqrt(A.j(t)))))
    return -(vals[1] - vals[0]) / (2 * math.pi * (y2 - y1))


@pytest.mark.parametrize("cusp", ["0", "1/3", "1/5", "2/7", "1/2", "1/4", "3/14"])
def test_P_order_numeric(cusp):
    # the order of P(1,7) read off from |P(A(iy))| as y grows
    A = Cusp.parse(cusp).matrix()
    got = _numeric_order(P_spec(1, 7), A)
    assert got == pytest.approx(float(PDesc(1, 7).order(A)), abs=1e-6)


def test_P_order_gamma_odd_uses_doubled_argument():
    # {2 a gamma / c} rather than {a gamma / c}; the latter gives -25/784 at the cusp 0
    assert PDesc(1, 7).order(Cusp(0, 1).matrix()) == F(-9, 784)


QUOTIENTS = [
    (GroupSpec((2,), ()), {1: -24, 2: 24}),
    (GroupSpec((4,), ()), {1: -8, 4: 8}),
    (GroupSpec((4,), ()), {1: 8, 2: -24, 4: 16}),
    (GroupSpec((98,), ()), {1: -4, 7: 4}),
    (GroupSpec((98,), ()), {2: -4, 14: 4}),
]


@pytest.mark.parametrize("group,powers", QUOTIENTS)
def test_eta_quotient_valence(group, powers):
    assert full_valence_sum(group, eta_quotient(powers)) == 0


def test_exact_orders_are_representative_independent():
    mono = Monomial(((Eta(98), -3), (FNrho(98, 7), 2), (FNrho(98, 21), 1), (PDesc(1, 7), 1)))
    reps = cusp_representatives(G)
    for p, _ in reference_cusps():
        r = next(r for r, _ in reps if cusp_class(G, r) == cusp_class(G, p))
        assert mono.bound(p) == mono.bound(r)


def test_budget_errors_and_total():
    with pytest.raises(ValueError):
        valence_budget(G, [])
    from qdissect.verifier.terms import build_identity_terms

    monos = [t.monomial() for t in build_identity_terms()]
    table, total = valence_budget(G, monos)
    assert total == -109
    assert len(table) == 47
    assert valence_budget(G, monos, reference_cusps())[1] == -109
