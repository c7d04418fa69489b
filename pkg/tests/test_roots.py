from fractions import Fraction as F

import pytest

from k3rdp import fqf
from k3rdp.roots import (DynkinType, ParseError, IllegalComponent, children,
                         component_glue_data, coset_min_norm, enumerate_dynkin_types,
                         format_dynkin, gram_of_sigma, is_root_free, num_roots,
                         parse_dynkin, s_closure, s_contains, sigma_fqf)


def test_parse_examples():
    r = parse_dynkin("E8+D4+5A1")
    assert (r.rank, r.disc) == (17, 128)
    r = parse_dynkin("17A1")
    assert (r.rank, r.disc) == (17, 2 ** 17)
    r = parse_dynkin("")
    assert (r.rank, r.disc) == (0, 1)


def test_parse_canonical_output():
    assert format_dynkin(parse_dynkin(" 2A2 + 11A1 ")) == "2A2+11A1"
    assert str(parse_dynkin("A1+E6+A1+D5")) == "E6+D5+2A1"
    assert str(parse_dynkin("0")) == "0"


@pytest.mark.parametrize("bad", ["A0", "D3", "E9", "B2", "2", "A1++A2", "xA1"])
def test_parse_rejects(bad):
    with pytest.raises((ParseError, IllegalComponent)):
        parse_dynkin(bad)


def test_glue_examples():
    a2 = component_glue_data(("A", 2))
    assert a2.min_norm[1] == F(2, 3) and a2.q[1] == F(4, 3)
    d4 = component_glue_data(("D", 4))
    v = d4.labels.index("v")
    assert d4.min_norm[v] == 1 and d4.q[v] == 1
    assert component_glue_data(("E", 8)).size == 1


def test_d_odd_is_cyclic():
    d5 = component_glue_data(("D", 5))
    s, v = d5.labels.index("s"), d5.labels.index("v")
    assert d5.kind == "cyclic" and d5.add(s, s) == v


def test_q_is_minus_min_norm():
    comps = [("A", n) for n in range(1, 20)] + [("D", n) for n in range(4, 20)]
    comps += [("E", 6), ("E", 7), ("E", 8)]
    for c in comps:
        g = component_glue_data(c)
        for j in range(g.size):
            assert fqf.mod2(g.q[j] + g.min_norm[j]) == 0


def test_coset_min_norm_examples():
    assert coset_min_norm(parse_dynkin("4A1"), (1, 1, 1, 1)) == 2
    assert coset_min_norm(parse_dynkin("8A1"), (1,) * 8) == 4
    assert coset_min_norm(parse_dynkin("8A1"), (0,) * 8) == 0


def test_root_free_examples():
    assert not is_root_free(parse_dynkin("4A1"), [(1, 1, 1, 1)])
    assert is_root_free(parse_dynkin("8A1"), [(1,) * 8])
    assert not is_root_free(parse_dynkin("3A2"), [(1, 1, 1)])


def test_sigma_fqf_matches_gram():
    r = parse_dynkin("A5+D4+E7")
    assert fqf.is_isomorphic(fqf.discriminant_form_of_gram(gram_of_sigma(r)), sigma_fqf(r))


def test_children_examples():
    assert children(parse_dynkin("D4")) == {parse_dynkin("A3"), parse_dynkin("3A1")}
    assert children(parse_dynkin("A1")) == {parse_dynkin("0")}
    assert children(parse_dynkin("E6")) == {parse_dynkin(s) for s in
                                            ("D5", "A5", "A4+A1", "2A2+A1")}


def test_s_contains_examples():
    assert not s_contains("A3", "A2+A1")
    assert s_contains("A3", "2A1")
    assert s_contains("E8", "A7") and not s_contains("E8", "A8")
    assert s_contains("D4", "3A1")
    assert not s_contains("3A1", "A2")


def test_s_closure_rank_filter():
    want = {parse_dynkin(x) for x in ("A3", "A2", "2A1")}
    assert s_closure(parse_dynkin("A3"), min_rank=2) == want


def test_enumeration_counts():
    assert len(enumerate_dynkin_types(2)) == 3
    counts = [0] * 20
    for t in enumerate_dynkin_types(19):
        counts[t.rank] += 1
    assert counts[1:] == [1, 2, 3, 6, 9, 16, 24, 39, 57, 88, 128, 193, 276, 403, 570,
                          815, 1137, 1599, 2207]


def test_num_roots():
    assert num_roots(parse_dynkin("E8")) == 240
    assert num_roots(parse_dynkin("D4+A2")) == 24 + 6


def test_type_ordering_and_sum():
    a = parse_dynkin("A2")
    b = parse_dynkin("A1")
    assert str(a + b + b) == "A2+2A1"
    assert isinstance(a + b, DynkinType)
    assert sorted([a, b]) == [b, a]
