import pytest

from k3rdp import fqf
from k3rdp.overlattices import BudgetExceeded, enumerate_overlattices, symmetry_images
from k3rdp.roots import enumerate_dynkin_types, parse_dynkin, sigma_fqf

from oracles import brute_force_subgroups


def _sets(r):
    return [set(o.elements) for o in enumerate_overlattices(r)]


def test_a1_only_trivial():
    assert [o.order for o in enumerate_overlattices("A1")] == [1]


def test_a3_only_trivial():
    assert [o.order for o in enumerate_overlattices("A3")] == [1]


def test_8a1_two_classes():
    out = list(enumerate_overlattices("8A1"))
    assert [o.order for o in out] == [1, 2]
    assert set(out[1].elements) == {(0,) * 8, (1,) * 8}


def test_trivial_first():
    ov = next(enumerate_overlattices("D4+4A1"))
    assert ov.order == 1 and ov.generators == ()


@pytest.mark.parametrize("r", ["2D4", "A7+A1", "D6+2A1", "3A3", "12A1", "E7+3A1", "2A5"])
def test_index_formula(r):
    r = parse_dynkin(r)
    for ov in enumerate_overlattices(r):
        assert r.disc == ov.order ** 2 * ov.form.size
        assert fqf.is_nondegenerate(ov.form)


@pytest.mark.parametrize("r", ["4A1+A3", "2A3", "D4+2A1", "A5+A1", "6A1", "2A2+A1"])
def test_matches_brute_force(r):
    r = parse_dynkin(r)
    reps = list(enumerate_overlattices(r))
    orbits = [symmetry_images(r, o.generators) for o in reps]
    covered = set().union(*orbits)
    assert covered == brute_force_subgroups(r)
    for i in range(len(orbits)):
        for j in range(i):
            assert not orbits[i] & orbits[j]


def test_no_symmetry_mode_lists_everything():
    r = parse_dynkin("6A1")
    plain = list(enumerate_overlattices(r, symmetry=False))
    assert {frozenset(o.elements) for o in plain} == brute_force_subgroups(r)


def test_subgroup_cap():
    with pytest.raises(BudgetExceeded):
        list(enumerate_overlattices("16A1", max_subgroups=5))


def test_form_is_quotient():
    ov = list(enumerate_overlattices("8A1"))[1]
    assert ov.form.size == 2 ** 6
    assert ov.glue_invariants == (2,)
    assert fqf.is_isomorphic(list(enumerate_overlattices("A1"))[0].form,
                             sigma_fqf(parse_dynkin("A1")))


def test_small_ranks_enumerate():
    for t in enumerate_dynkin_types(4):
        out = list(enumerate_overlattices(t))
        assert out[0].order == 1
