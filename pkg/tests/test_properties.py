"""Property-based checks of the algebraic invariants."""

import random
from math import gcd

from hypothesis import HealthCheck, assume, given, settings, strategies as st
from sympy import totient, primefactors

from k3rdp import fqf, intmat
from k3rdp.codes import glue_code
from k3rdp.k3 import nk0, nk0_via_table1, residue_set
from k3rdp.local import (LocalInvariant, exists_even_lattice, local_invariant_set,
                         local_set_unimodular, star, tau_of_gram)
from k3rdp.roots import (DynkinType, children, enumerate_dynkin_types, glue_subgroup,
                         is_root_free, s_contains, sigma_fqf)

from oracles import all_isotropic_subgroups

SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])

TYPES_8 = enumerate_dynkin_types(8)
TYPES_12 = enumerate_dynkin_types(12)


@st.composite
def even_grams(draw, max_rank=5):
    n = draw(st.integers(1, max_rank))
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2 * draw(st.integers(-4, 4))
        for j in range(i + 1, n):
            g[i][j] = g[j][i] = draw(st.integers(-3, 3))
    assume(intmat.det(g) != 0)
    return g


@st.composite
def unimodular(draw, n):
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        if i == j:
            u[i] = [-x for x in u[i]]
        else:
            k = draw(st.integers(-2, 2))
            u[i] = [a + k * b for a, b in zip(u[i], u[j])]
    return u


def _transform(g, u):
    n = len(g)
    return [[sum(u[i][a] * g[a][b] * u[j][b] for a in range(n) for b in range(n))
             for j in range(n)] for i in range(n)]


types_8 = st.sampled_from(TYPES_8)
types_12 = st.sampled_from(TYPES_12)


def _elem(draw, form):
    return tuple(draw(st.integers(0, o - 1)) for o in form.orders)


@SETTINGS
@given(types_12, st.data())
def test_b_polarizes_q(r, data):
    f = sigma_fqf(r)
    x, y = _elem(data.draw, f), _elem(data.draw, f)
    lhs = f.eval_b(x, y)
    rhs = fqf.mod1((f.eval_q(f.add(x, y)) - f.eval_q(x) - f.eval_q(y)) / 2)
    assert lhs == rhs


@SETTINGS
@given(even_grams(), st.data())
def test_gram_form_size_and_basis_invariance(g, data):
    lat = fqf.gram_lattice(g)
    f = fqf.discriminant_form_of_gram(lat)
    assert f.size == abs(intmat.det(g))
    assert fqf.is_nondegenerate(f)
    u = data.draw(unimodular(len(g)))
    g2 = _transform(g, u)
    lat2 = fqf.gram_lattice(g2)
    assert lat2.signature == lat.signature
    assume(f.size <= 2000)
    assert fqf.is_isomorphic(fqf.discriminant_form_of_gram(lat2), f)


@SETTINGS
@given(even_grams())
def test_lattice_exists_for_its_own_form(g):
    lat = fqf.gram_lattice(g)
    f = fqf.discriminant_form_of_gram(lat)
    sp, sm = lat.signature
    assert exists_even_lattice(sp, sm, f)
    for l in sorted(set(primefactors(2 * f.size))):
        tau = tau_of_gram(l, lat)
        assert tau in local_invariant_set(l, lat.rank, fqf.l_part(f, l))


@SETTINGS
@given(types_8, st.data())
def test_quotient_nondegenerate(r, data):
    subs = all_isotropic_subgroups(r, limit=50, rng=random.Random(1))
    assume(subs)
    gens = data.draw(st.sampled_from(subs))
    h = glue_subgroup(r, gens)
    q = fqf.quotient_form(h.form, h)
    assert fqf.is_nondegenerate(q)
    assert q.size * h.order ** 2 == r.disc


@SETTINGS
@given(types_12)
def test_diagonal_of_f_and_minus_f(r):
    f = sigma_fqf(r)
    g = fqf.direct_sum(f, fqf.negate(f))
    k = len(f.orders)
    gens = [tuple(int(i == j) for j in range(k)) * 2 for i in range(k)]
    h = fqf.subgroup_span(g, gens)
    assert fqf.is_isotropic(g, h)
    assert fqf.quotient_form(g, h).is_trivial


@SETTINGS
@given(types_12)
def test_decomposition_recomposes(r):
    f = sigma_fqf(r)
    for l in f.primes:
        fl = fqf.l_part(f, l)
        assume(fl.size <= 4096)
        assert fqf.is_isomorphic(fqf.recompose(fqf.decompose_cyclic_even(fl)), fl)


@SETTINGS
@given(types_12, st.integers(0, 22), st.randoms(use_true_random=False))
def test_local_set_ignores_generator_order(r, n, rnd):
    f = sigma_fqf(r)
    for l in f.primes:
        fl = fqf.l_part(f, l)
        k = len(fl.orders)
        perm = list(range(k))
        rnd.shuffle(perm)
        shuffled = fqf.make_fqf([fl.orders[i] for i in perm], [fl.q[i] for i in perm],
                                [[fl.b[i][j] for j in perm] for i in perm])
        assert local_invariant_set(l, n, shuffled) == local_invariant_set(l, n, fl)


def _invariants(l):
    rhos = (1, 3, 5, 7) if l == 2 else (1, -1)
    return st.builds(lambda s, r: LocalInvariant(l, s, r), st.integers(0, 7), st.sampled_from(rhos))


@SETTINGS
@given(st.sampled_from([2, 3, 5, 7]), st.data())
def test_star_commutative_associative(l, data):
    a, b, c = (data.draw(_invariants(l)) for _ in range(3))
    assert star(a, b) == star(b, a)
    assert star(star(a, b), c) == star(a, star(b, c))


@SETTINGS
@given(types_8, types_8, types_8)
def test_s_contains_order(a, b, c):
    assert s_contains(a, a)
    if s_contains(a, b):
        assert b.rank <= a.rank
        if s_contains(b, c):
            assert s_contains(a, c)


@SETTINGS
@given(types_8)
def test_nk0_monotone_low_rank(r):
    if nk0(r).verdict:
        assert all(nk0(k).verdict for k in children(r))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([t for t in enumerate_dynkin_types(17) if t.rank >= 15]))
def test_nk0_agrees_with_minimal_list(r):
    assert nk0(r).verdict == nk0_via_table1(r)


BOUNDARY = [(t, (22 - t.rank) // 2) for t in enumerate_dynkin_types(12)
            if t.rank % 2 == 0 and t.rank >= 2]


@SETTINGS
@given(st.sampled_from(BOUNDARY))
def test_residue_set_size(case):
    r, sigma = case
    mod, res = residue_set(r, sigma)
    assert len(res) in (0, int(totient(mod)) // 2)
    assert all(gcd(x, mod) == 1 for x in res)


@SETTINGS
@given(st.integers(1, 10), st.data())
def test_code_dictionary(k, data):
    r = DynkinType.of([("A", 1)] * k)
    words = data.draw(st.lists(st.integers(1, 2 ** k - 1), min_size=1, max_size=3))
    gens = [tuple((w >> i) & 1 for i in range(k)) for w in words]
    code = glue_code(r, gens)
    h = glue_subgroup(r, gens)
    assert fqf.is_isotropic(h.form, h) == code.is_doubly_even()
    if code.is_doubly_even():
        assert is_root_free(r, gens) == (4 not in code.weights())


@given(st.integers(0, 40))
def test_unimodular_two_adic_excess(n):
    assert all(x.sigma == n % 8 for x in local_set_unimodular(2, n))


def test_nk0_monotone_all_pairs_rank_8():
    verdict = {t: nk0(t).verdict for t in TYPES_8}
    for a in TYPES_8:
        if not verdict[a]:
            continue
        for b in TYPES_8:
            if b.rank <= a.rank and s_contains(a, b):
                assert verdict[b]
