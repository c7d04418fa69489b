from fractions import Fraction as F

import pytest

from k3rdp import fqf
from k3rdp.fqf import (EvenPiece, CyclicPiece, cyclic_form, decompose_cyclic_even,
                       direct_sum, discriminant_form_of_gram, gram_lattice, is_isomorphic,
                       is_isotropic, make_fqf, negate, orthogonal_complement,
                       quotient_form, recompose, subgroup_span)
from k3rdp.roots import gram_of_sigma, parse_dynkin, sigma_fqf


def test_a1_form_is_valid():
    f = make_fqf([2], [F(3, 2)], [[F(1, 2)]])
    assert f.size == 2
    assert f.eval_q((1,)) == F(3, 2)


def test_trivial_form():
    f = make_fqf([], [], [])
    assert f.is_trivial and f.size == 1


def test_inconsistent_q_and_b():
    with pytest.raises(fqf.InconsistentQB):
        make_fqf([2], [F(3, 2)], [[F(0)]])


def test_degenerate_form_rejected():
    with pytest.raises(fqf.DegenerateForm):
        make_fqf([2, 2], [F(0), F(0)], [[F(0), F(0)], [F(0), F(0)]])


def test_eval_reduces_mod():
    f = cyclic_form(3, F(4, 3))
    assert f.eval_q((2,)) == F(4, 3)   # 4 * 4/3 = 16/3 = 4/3 mod 2
    assert f.eval_b((1,), (1,)) == F(1, 3)


def test_gram_a1():
    f = discriminant_form_of_gram(gram_lattice([[-2]]))
    assert f.orders == (2,) and f.q == (F(3, 2),)


def test_gram_a2():
    f = discriminant_form_of_gram(gram_lattice([[-2, 1], [1, -2]]))
    assert f.orders == (3,) and f.q == (F(4, 3),)


def test_gram_e8_trivial():
    f = discriminant_form_of_gram(gram_of_sigma(parse_dynkin("E8")))
    assert f.is_trivial


def test_odd_gram_rejected():
    with pytest.raises(fqf.NotEven):
        discriminant_form_of_gram(gram_lattice([[1]]))


def test_decompose_a2_cyclic():
    pieces = decompose_cyclic_even(cyclic_form(3, F(4, 3)))
    assert len(pieces) == 1
    p = pieces[0]
    assert isinstance(p, CyclicPiece) and p.order == 3 and p.q == F(4, 3)


def test_decompose_hyperbolic():
    u = make_fqf([2, 2], [F(0), F(0)], [[F(0), F(1, 2)], [F(1, 2), F(0)]])
    pieces = decompose_cyclic_even(u)
    assert pieces == [EvenPiece(1, 0, 1, 0)]


def test_decompose_3a1():
    pieces = decompose_cyclic_even(sigma_fqf(parse_dynkin("3A1")))
    assert len(pieces) == 3
    assert all(isinstance(p, CyclicPiece) and p.order == 2 and p.q == F(3, 2) for p in pieces)


def test_decompose_d4_even_type():
    pieces = decompose_cyclic_even(sigma_fqf(parse_dynkin("D4")))
    assert pieces == [EvenPiece(1, 1, 1, 1)]


def test_recompose_mixed():
    f = sigma_fqf(parse_dynkin("D6+A3+2A1"))
    assert is_isomorphic(recompose(decompose_cyclic_even(fqf.l_part(f, 2))), fqf.l_part(f, 2))


def test_quotient_by_all_ones_8a1():
    f = sigma_fqf(parse_dynkin("8A1"))
    h = subgroup_span(f, [(1,) * 8])
    assert is_isotropic(f, h)
    perp = orthogonal_complement(f, h)
    assert perp.order == 2 ** 7
    qf = quotient_form(f, h)
    assert qf.size == 2 ** 6 and fqf.is_nondegenerate(qf)


def test_quotient_needs_isotropic():
    f = sigma_fqf(parse_dynkin("4A1"))
    with pytest.raises(fqf.NotIsotropic):
        quotient_form(f, subgroup_span(f, [(1, 0, 0, 0)]))


def test_index_formula_matches_gram():
    # 4A1 glued by (1,1,1,1) is D4
    f = sigma_fqf(parse_dynkin("4A1"))
    qf = quotient_form(f, subgroup_span(f, [(1, 1, 1, 1)]))
    assert is_isomorphic(qf, sigma_fqf(parse_dynkin("D4")))


def test_negate_and_sum():
    f = cyclic_form(5, F(2, 5))
    g = direct_sum(f, negate(f))
    assert g.size == 25
    h = subgroup_span(g, [(1, 1)])
    assert is_isotropic(g, h)
    assert quotient_form(g, h).is_trivial


def test_json_round_trip():
    f = sigma_fqf(parse_dynkin("D5+A2"))
    assert fqf.FiniteQuadraticForm.from_json(f.to_json()) == f


def test_isomorphism_distinguishes():
    assert not is_isomorphic(cyclic_form(3, F(4, 3)), cyclic_form(3, F(2, 3)))
    assert is_isomorphic(cyclic_form(5, F(2, 5)), cyclic_form(5, F(8, 5)))
