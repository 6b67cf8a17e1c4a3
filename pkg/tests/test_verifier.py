import json
from fractions import Fraction

import pytest

from qdissect.cusps import WORKING_GROUP
from qdissect.exactmath import CycloRing
from qdissect.mock.nonholo import nonholo_coeff
from qdissect.verifier.certificate import Certificate, decide, replay, verify_mod7
from qdissect.verifier.expand import (
    A_components,
    dissection_check,
    expand_identity,
    monomial_spec,
    nonholo_cancellation,
    term_series,
    dissection_term_series,
)
from qdissect.verifier.mutations import fixed_mutations, perturb_term
from qdissect.verifier.terms import (
    A_value,
    DigestError,
    IdentityTerm,
    Special,
    _data_text,
    build_identity_terms,
    build_dissection_terms,
    load_identity_text,
    same_terms,
    dissection_to_identity,
)

F = Fraction
R28 = CycloRing(28)


@pytest.fixture(scope="module")
def terms():
    return build_identity_terms()


def test_identity_table_shape(terms):
    assert len(terms) == 62
    first = terms[0]
    assert first.A_triple == (-16, -8, -8) and first.exponents == (0,) * 8 and first.scale == 1
    assert any(t.scale == F(1, 2) and t.A_triple == (37, -1, 25) for t in terms)
    n7 = [t.special.k for t in terms if t.special.kind == "N7"]
    assert n7 == [2, 3, 1]
    assert sum(t.special.kind == "M17" for t in terms) == 1
    assert all(t.weight_twice == 0 for t in terms)


def test_checksum_is_enforced():
    text = _data_text("identity_terms.txt")
    tampered = text.replace("1 | -16,-8,-8", "1 | -16,-8,-7")
    with pytest.raises(DigestError):
        load_identity_text(tampered)
    assert len(load_identity_text(tampered, check_digest=False)) == 62
    with pytest.raises(DigestError):
        load_identity_text("\n".join(l for l in text.splitlines() if "sha256" not in l))


def test_special_parsing():
    s = Special.parse("-i*N7(3)")
    assert (s.kind, s.k, s.unit) == ("N7", 3, 3)
    assert str(s) == "-i*N7(3)"
    assert Special.parse("M17").unit == 0
    with pytest.raises(ValueError):
        Special.parse("N7(7)")


def test_A_value_is_real_and_decomposes():
    a = A_value((-16, -8, -8))
    assert abs(a.embed(1).imag) < 1e-12
    assert A_components(a) == (-16, -8, -8)
    assert A_components(R28.i) is None


def test_two_transcriptions_agree(terms):
    assert same_terms(dissection_to_identity(build_dissection_terms()), terms) == []


def test_J_and_F_notation_agree_termwise():
    # q^d (q^7)^p prod J^j(q^7) equals the F-monomial with e0 = j0 - sum j_k
    for t in build_dissection_terms()[:12]:
        if t.lambert is not None:
            continue
        e = list(t.exponents)
        e[0] -= sum(t.exponents[1:])
        T = 90
        f = monomial_spec(e).expand(T, CycloRing(1)).change_ring(R28).scale(A_value(t.A_triple) * t.scale)
        j = dissection_term_series(t, (T - t.d) // 7 + 1).substitute(7).shift(t.d).regrid(24).truncate(T)
        assert f.truncate(T) == j


def test_expansion_vanishes(terms):
    s = expand_identity(terms, 111)
    assert s.is_zero() and s.trunc == 111


def test_expansion_has_power(terms):
    dropped = [t for t in terms if t.special.kind != "M17"]
    assert expand_identity(dropped, 40).valuation in (0, 1)
    for i in (0, 20, 59):
        assert expand_identity(perturb_term(terms, i), 111).valuation <= 110


def test_term_series_known_to_T(terms):
    for t in (terms[0], terms[58], terms[61]):
        assert term_series(t, 30).trunc == 30


def test_certificate_default():
    cert = verify_mod7()
    assert cert.verdict == "proven"
    assert cert.budget == -109
    assert cert.V >= 110 and cert.V + cert.budget >= 1
    assert len(cert.cusps) == 47
    assert cert.group == str(WORKING_GROUP)
    d = json.loads(cert.to_json())
    assert {"group", "cusps", "budget", "conductor", "D", "V", "verdict", "digest"} <= set(d)
    assert d["budget"] == "-109" and d["conductor"] == 28


def test_certificate_inconclusive_and_violated(terms):
    assert verify_mod7(50).verdict == "inconclusive"
    bad = verify_mod7(60, perturb_term(terms, 5))
    assert bad.verdict == "violated" and bad.first_nonzero is not None


def test_decide_rules():
    assert decide(F(130), F(-109), None)[0] == "proven"
    assert decide(F(109), F(-109), None)[0] == "inconclusive"
    assert decide(F(7), F(-109), F(7))[0] == "violated"
    assert decide(None, F(-109), None)[0] == "inconclusive"


def test_certificate_replay_and_determinism():
    a = verify_mod7(112)
    b = verify_mod7(112)
    assert a.to_json() == b.to_json()
    restored = Certificate.from_json(a.to_json())
    assert restored.to_json() == a.to_json()
    assert replay(restored) == []
    forged = Certificate.from_dict({**json.loads(a.to_json()), "budget": "-100"})
    assert replay(forged) == ["budget"]


def test_dissection_check():
    rep = dissection_check(150)
    assert rep.matches and rep.first_mismatch is None
    assert all(rep.rank_differences.values()) and len(rep.rank_differences) == 21
    assert rep.closed_form_matches and rep.closed_form_constant == -1


def test_dissection_catches_transcription_typo():
    thm = build_dissection_terms()
    from dataclasses import replace

    thm[3] = replace(thm[3], A_triple=(-5, -1, -2))
    assert not dissection_check(40, thm).matches


def test_nonholo_cancellation():
    assert nonholo_cancellation(50).ok
    assert not nonholo_coeff("M17", 7).weight
    # n = 1 only meets the k = 1 branch, n = 9 only the k = 2 branch
    for n, k, trip in ((1, 1, (8, 2, 4)), (9, 2, (-8, 0, -6))):
        lhs = nonholo_coeff("M17", n).weight
        assert lhs == -R28.i * A_value(trip) * nonholo_coeff(f"N7({k})", n).weight
    assert not nonholo_cancellation(20, {2: (-8, 0, 6), 3: (6, 4, 4), 1: (8, 2, 4)}).ok


def test_some_fixed_mutations(terms):
    muts = fixed_mutations()
    assert len(muts) == 10
    for m in muts[:3]:
        assert not expand_identity(m.apply(terms), 111).is_zero()


def test_cache_and_jobs(tmp_path, monkeypatch, terms):
    base = expand_identity(terms[:6], 40)
    monkeypatch.setenv("QDISSECT_CACHE", str(tmp_path))
    first = expand_identity(terms[:6], 40)
    assert len(list(tmp_path.glob("term-*.json"))) == 6
    again = expand_identity(terms[:6], 40)
    assert base == first == again
    monkeypatch.delenv("QDISSECT_CACHE")
    assert expand_identity(terms[:6], 40, jobs=2) == base
