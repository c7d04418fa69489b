import pytest

from k3rdp import fqf
from k3rdp.k3 import (BadSigma, EvenP, K3Error, NotBoundaryCase, PNotCoprime, RankTooLarge,
                      SignatureOutOfRange, arth, elliptic_pair, emb_complex, emb_supersingular,
                      lambda_fqf, lambda_local_set, lift_residues, load_table1, nk, nk0,
                      nk0_via_table1, parse_group, residue_set, smallest_nonsquare,
                      ss_reduction_possible)
from k3rdp.local import LocalInvariant as LI, local_invariant_set
from k3rdp.roots import children, parse_dynkin, sigma_fqf


def sig(r):
    r = parse_dynkin(r)
    return sigma_fqf(r), 0, r.rank


def test_arth():
    assert arth(5, 10, 3)          # (-3/5) = (2/5) = -1
    assert not arth(7, 10, 3)
    with pytest.raises(EvenP):
        arth(2, 1, 3)
    with pytest.raises(BadSigma):
        arth(5, 11, 3)
    with pytest.raises(K3Error):
        arth(5, 1, 10)


def test_emb_complex_examples():
    assert emb_complex(*sig("A1"))
    assert not emb_complex(*sig("17A1"))
    assert emb_complex(fqf.TRIVIAL, 0, 0)


def test_emb_complex_signature_guard():
    with pytest.raises(SignatureOutOfRange):
        emb_complex(fqf.TRIVIAL, 2, 0)
    with pytest.raises(SignatureOutOfRange):
        emb_complex(fqf.TRIVIAL, 0, 20)


def test_lambda_local_set_examples():
    assert lambda_local_set(3, 1, 2) == {LI(3, 4, 1)}
    assert lambda_local_set(5, 1, 2) == {LI(5, 4, -1)}
    assert lambda_local_set(3, 1, 1) == frozenset()
    assert lambda_local_set(7, 2, 9) == {LI(7, 4, 1), LI(7, 4, -1)}


def test_lambda_form_shape():
    f = lambda_fqf(7, 3)
    assert f.orders == (7,) * 6
    assert smallest_nonsquare(7) == 3
    assert local_invariant_set(7, 6, f) == lambda_local_set(7, 3, 6)


def test_emb_supersingular_examples():
    assert not emb_supersingular(*sig("16A1"), 3, 3)
    assert emb_supersingular(*sig("A2"), 5, 10)
    assert not emb_supersingular(*sig("A2"), 7, 10)
    assert not emb_supersingular(*sig("5A1"), 3, 9)   # 18 > 22 - 5


def test_emb_supersingular_coprime():
    with pytest.raises(PNotCoprime):
        emb_supersingular(*sig("A2"), 3, 10)


def test_nk0_examples():
    assert not nk0("17A1").verdict
    res = nk0("16A1")
    assert res.verdict and res.witness["index"] == 32
    assert not nk0("A4+11A1").verdict
    assert nk0("0").verdict and nk0("0").witness["glue"] == []


def test_nk0_prefers_trivial_glue():
    assert nk0("A1").witness["index"] == 1


def test_nk0_rank_guard():
    with pytest.raises(RankTooLarge):
        nk0("20A1")


def test_nk_examples():
    assert nk(5, 10, "A2").verdict
    assert not nk(7, 10, "A2").verdict
    assert nk(3, 2, "16A1").verdict
    assert not nk(3, 3, "16A1").verdict


def test_nk_cases():
    assert nk(5, 1, "A2").extra["case"] == "same as complex"
    assert nk(5, 10, "A3").extra["case"] == "rank too large for sigma"
    r = nk(5, 10, "A2", verify_direct=True)
    assert r.extra["direct"] is True and r.extra["arth"] is True


def test_nk_coprime_guard():
    with pytest.raises(PNotCoprime):
        nk(3, 10, "A2")
    with pytest.raises(PNotCoprime):
        nk(2, 10, "A2")


def test_residue_examples():
    mod, res = residue_set("A2", 10)
    assert mod == 12
    assert lift_residues(mod, res, 24) == {5, 11, 17, 23}
    mod, res = residue_set("2A1", 10)
    assert {x % 8 for x in res} == {3, 7}
    mod, res = residue_set("A4", 9)
    assert lift_residues(mod, res, 40) == {3, 7, 13, 17, 23, 27, 33, 37}


def test_residue_boundary_only():
    with pytest.raises(NotBoundaryCase):
        residue_set("A2", 9)


def test_residue_empty_iff_square():
    # sigma = 9 needs rank 4 and then (-1)^10 d = disc(R)
    assert residue_set("4A1", 9)[1] == frozenset()
    assert residue_set("D4", 9)[1] == frozenset()
    assert residue_set("A1+A3", 9)[1]


def test_minimal_list_fixture():
    entries = load_table1()
    assert len(entries) == 60
    assert len(set(entries)) == 60
    assert all(15 <= t.rank <= 19 for t in entries)
    assert [str(t) for t in entries].count("17A1") == 1


def test_minimal_list_sample():
    for s in ("17A1", "A4+11A1"):
        assert not nk0(s).verdict
        assert all(nk0(k).verdict for k in children(parse_dynkin(s)))


def test_nk0_via_minimal_list():
    assert not nk0_via_table1("18A1")
    assert nk0_via_table1("16A1")
    assert nk0_via_table1("E8+E8")
    assert not nk0_via_table1("E8+D4+5A1")


def test_parse_group():
    assert parse_group("Z/2xZ/4") == (2, 4)
    assert parse_group("Z/6") == (2, 3)
    assert parse_group("0") == ()


def test_elliptic_examples():
    assert elliptic_pair("0", "0")
    assert not elliptic_pair("A1", "Z/2")
    assert isinstance(elliptic_pair("8A1", "Z/2"), bool)


def test_ssred_examples():
    for p in (3, 5, 7, 11, 13, 17, 19):
        assert ss_reduction_possible(4, p) == (p % 4 == 3)
        assert ss_reduction_possible(1, p) == (p % 4 == 3)
    assert ss_reduction_possible(3, 5)
    with pytest.raises(PNotCoprime):
        ss_reduction_possible(3, 3)


def test_minimal_list_parents_stay_false():
    a1 = parse_dynkin("A1")
    for r in load_table1():
        if r.rank <= 17:
            assert not nk0(r + a1).verdict
