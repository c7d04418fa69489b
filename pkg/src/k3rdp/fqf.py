"""Finite quadratic forms (D, q) on finite abelian groups.

A form is presented by cyclic generators of prime-power order, the values
``q(g_i)`` in Q/2Z and the bilinear values ``b(g_i, g_j)`` in Q/Z. Elements
are tuples of integers, one coefficient per generator.

Subgroups are handled through lattice algebra on the preimage in Z^k, so
nothing here needs to list the elements of a large group.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm, prod

from sympy import factorint

from . import intmat


class FqfError(ValueError):
    pass


class DegenerateForm(FqfError):
    pass


class InconsistentQB(FqfError):
    pass


class BadDenominator(FqfError):
    pass


class DimensionMismatch(FqfError):
    pass


class SubgroupTooLarge(FqfError):
    pass


class NotIsotropic(FqfError):
    pass


class MixedPrimes(FqfError):
    pass


class NotEven(FqfError):
    pass


class SingularGram(FqfError):
    pass


DEFAULT_CAP = 2 ** 20


def mod2(x) -> Fraction:
    """Canonical representative of x in Q/2Z, in [0, 2)."""
    x = Fraction(x)
    return x - 2 * (x.numerator // (2 * x.denominator))


def mod1(x) -> Fraction:
    x = Fraction(x)
    return x - x.numerator // x.denominator


def prime_of(order: int) -> int:
    f = factorint(order)
    if len(f) != 1:
        raise BadDenominator(f"generator order {order} is not a prime power")
    return next(iter(f))


def split_prime_powers(n: int) -> list[tuple[int, int]]:
    """[(p, p^e), ...] for the prime-power factors of n, ascending in p."""
    return [(p, p ** e) for p, e in sorted(factorint(n).items())]


@dataclass(frozen=True)
class FiniteQuadraticForm:
    orders: tuple
    q: tuple
    b: tuple

    def __len__(self):
        return len(self.orders)

    @property
    def size(self) -> int:
        return prod(self.orders)

    @cached_property
    def primes(self) -> tuple:
        return tuple(sorted({prime_of(o) for o in self.orders}))

    @property
    def leng(self) -> int:
        """Minimal number of generators of D."""
        counts = {}
        for o in self.orders:
            p = prime_of(o)
            counts[p] = counts.get(p, 0) + 1
        return max(counts.values(), default=0)

    @property
    def is_trivial(self) -> bool:
        return not self.orders

    @cached_property
    def _scale(self) -> int:
        return 2 * lcm(1, *self.orders)

    def reduce(self, x) -> tuple:
        if len(x) != len(self.orders):
            raise DimensionMismatch(f"element has {len(x)} coefficients, form has {len(self.orders)}")
        return tuple(int(c) % o for c, o in zip(x, self.orders))

    def eval_q(self, x) -> Fraction:
        x = self.reduce(x)
        k = len(x)
        total = Fraction(0)
        for i in range(k):
            if x[i]:
                total += x[i] * x[i] * self.q[i]
                row = self.b[i]
                for j in range(i + 1, k):
                    if x[j] and row[j]:
                        total += 2 * x[i] * x[j] * row[j]
        return mod2(total)

    def eval_b(self, x, y) -> Fraction:
        x, y = self.reduce(x), self.reduce(y)
        total = Fraction(0)
        for i, xi in enumerate(x):
            if xi:
                row = self.b[i]
                for j, yj in enumerate(y):
                    if yj and row[j]:
                        total += xi * yj * row[j]
        return mod1(total)

    def add(self, x, y) -> tuple:
        return tuple((a + c) % o for a, c, o in zip(x, y, self.orders))

    def scale(self, n, x) -> tuple:
        return tuple((n * a) % o for a, o in zip(x, self.orders))

    def zero(self) -> tuple:
        return (0,) * len(self.orders)

    def elements(self, cap: int = DEFAULT_CAP):
        if self.size > cap:
            raise SubgroupTooLarge(f"|D| = {self.size} exceeds cap {cap}")
        return itertools.product(*(range(o) for o in self.orders))

    def element_order(self, x) -> int:
        n = 1
        for a, o in zip(self.reduce(x), self.orders):
            if a:
                n = lcm(n, o // _gcd(a, o))
        return n

    def to_json(self) -> str:
        return json.dumps({
            "orders": list(self.orders),
            "q": [str(v) for v in self.q],
            "b": [[str(v) for v in row] for row in self.b],
        })

    @classmethod
    def from_json(cls, text: str) -> "FiniteQuadraticForm":
        d = json.loads(text) if isinstance(text, str) else text
        return make_fqf(d["orders"], [Fraction(v) for v in d["q"]],
                        [[Fraction(v) for v in row] for row in d["b"]])

    def __str__(self):
        parts = []
        for i, o in enumerate(self.orders):
            parts.append(f"Z/{o}[{self.q[i]}]")
        off = [(i, j, self.b[i][j]) for i in range(len(self)) for j in range(i + 1, len(self))
               if self.b[i][j]]
        s = " + ".join(parts) if parts else "0"
        if off:
            s += "  b:" + ",".join(f"({i},{j})={v}" for i, j, v in off)
        return s


def _gcd(a, b):
    from math import gcd
    return gcd(a, b)


def _raw(orders, q, b) -> FiniteQuadraticForm:
    return FiniteQuadraticForm(tuple(orders), tuple(mod2(v) for v in q),
                               tuple(tuple(mod1(v) for v in row) for row in b))


def make_fqf(orders, q_diag, b_matrix) -> FiniteQuadraticForm:
    """Validated constructor; rejects inconsistent or degenerate input."""
    orders = [int(o) for o in orders]
    k = len(orders)
    if len(q_diag) != k or len(b_matrix) != k or any(len(r) != k for r in b_matrix):
        raise DimensionMismatch("orders, q and b have incompatible sizes")
    q = [mod2(v) for v in q_diag]
    b = [[mod1(v) for v in row] for row in b_matrix]
    for i, o in enumerate(orders):
        if o < 2:
            raise BadDenominator(f"generator order {o} < 2")
        p = prime_of(o)
        t = o * q[i]
        if t.denominator != 1 or (p != 2 and t.numerator % 2):
            raise BadDenominator(f"q(g_{i}) = {q[i]} incompatible with order {o}")
        for j in range(k):
            if b[i][j] != b[j][i]:
                raise InconsistentQB("b is not symmetric")
            if (o * b[i][j]).denominator != 1:
                raise BadDenominator(f"b(g_{i}, g_{j}) = {b[i][j]} incompatible with order {o}")
        if mod1(q[i]) != b[i][i]:
            raise InconsistentQB(f"b(g_{i}, g_{i}) = {b[i][i]} but q(g_{i}) = {q[i]}")
    form = _raw(orders, q, b)
    if not is_nondegenerate(form):
        raise DegenerateForm("bilinear form is degenerate")
    return form


TRIVIAL = FiniteQuadraticForm((), (), ())


def cyclic_form(order: int, qval) -> FiniteQuadraticForm:
    qval = Fraction(qval)
    return make_fqf([order], [qval], [[mod1(qval)]])


# -- lattice algebra on preimages in Z^k ------------------------------------

def _diag_rows(orders):
    k = len(orders)
    return [[o * int(i == j) for j in range(k)] for i, o in enumerate(orders)]


def _bilinear_kernel(form, gens):
    """Rows spanning the preimage of {x : b(x, g) = 0 for all g in gens}."""
    k = len(form)
    if not gens:
        return [[int(i == j) for j in range(k)] for i in range(k)]
    n = lcm(1, *form.orders)
    cmat = []
    for i in range(k):
        row = []
        for g in gens:
            v = sum(g[j] * form.b[i][j] for j in range(k) if g[j])
            row.append(int(mod1(v) * n))
        cmat.append(row)
    return intmat.kernel_mod(cmat, n, k)


def _basis_from_rows(orders, num_rows, den_rows):
    """Prime-power cyclic basis of span(num)/span(den) as (element, order)."""
    k = len(orders)
    out = []
    for vec, d in intmat.quotient_basis(num_rows, den_rows, k):
        for _, pe in split_prime_powers(d):
            m = d // pe
            out.append((tuple((m * a) % o for a, o in zip(vec, orders)), pe))
    out.sort(key=lambda t: (prime_of(t[1]), -t[1]))
    return out


def is_nondegenerate(form: FiniteQuadraticForm) -> bool:
    if form.is_trivial:
        return True
    k = len(form)
    ker = _bilinear_kernel(form, [tuple(int(i == j) for j in range(k)) for i in range(k)])
    return not _basis_from_rows(form.orders, ker + _diag_rows(form.orders), _diag_rows(form.orders))


@dataclass(frozen=True)
class Subgroup:
    """A subgroup of the group of ``form`` given by generators."""
    form: FiniteQuadraticForm = field(repr=False)
    gens: tuple

    @cached_property
    def basis(self) -> list:
        rows = [list(g) for g in self.gens] + _diag_rows(self.form.orders)
        return _basis_from_rows(self.form.orders, rows, _diag_rows(self.form.orders))

    @property
    def order(self) -> int:
        return prod(o for _, o in self.basis)

    def __len__(self):
        return self.order

    def elements(self, cap: int = DEFAULT_CAP) -> list:
        if self.order > cap:
            raise SubgroupTooLarge(f"|H| = {self.order} exceeds cap {cap}")
        f = self.form
        out = [f.zero()]
        for g, o in self.basis:
            out = [f.add(x, f.scale(m, g)) for m in range(o) for x in out]
        return out

    def __contains__(self, x) -> bool:
        rows = [list(g) for g in self.gens] + _diag_rows(self.form.orders)
        basis, piv = intmat.hnf(rows, len(self.form))
        try:
            intmat.solve_echelon(basis, piv, list(x))
            return True
        except ValueError:
            return False


def subgroup_span(form, generators, cap: int = DEFAULT_CAP) -> Subgroup:
    gens = tuple(form.reduce(g) for g in generators)
    h = Subgroup(form, gens)
    h.elements(cap)
    return h


def is_isotropic(form, h: Subgroup) -> bool:
    # q vanishes on H iff it vanishes on generators and b does on pairs
    gens = [g for g, _ in h.basis]
    if any(form.eval_q(g) != 0 for g in gens):
        return False
    return all(form.eval_b(g1, g2) == 0 for g1, g2 in itertools.combinations(gens, 2))


def orthogonal_complement(form, h: Subgroup) -> Subgroup:
    ker = _bilinear_kernel(form, [g for g, _ in h.basis])
    basis = _basis_from_rows(form.orders, ker + _diag_rows(form.orders), _diag_rows(form.orders))
    return Subgroup(form, tuple(g for g, _ in basis))


def restrict(form, h: Subgroup) -> FiniteQuadraticForm:
    """The form q|H presented on a prime-power basis of H."""
    gens = [g for g, _ in h.basis]
    orders = [o for _, o in h.basis]
    q = [form.eval_q(g) for g in gens]
    b = [[form.eval_b(x, y) for y in gens] for x in gens]
    return _raw(orders, q, b)


def quotient_form(form, h: Subgroup) -> FiniteQuadraticForm:
    """The induced form on H^perp / H for an isotropic subgroup H."""
    if not is_isotropic(form, h):
        raise NotIsotropic("quotient requires an isotropic subgroup")
    diag = _diag_rows(form.orders)
    hrows = [list(g) for g in h.gens] + diag
    perp = _bilinear_kernel(form, [g for g, _ in h.basis]) + diag
    basis = _basis_from_rows(form.orders, perp, hrows)
    gens = [g for g, _ in basis]
    q = [form.eval_q(g) for g in gens]
    b = [[form.eval_b(x, y) for y in gens] for x in gens]
    return _raw([o for _, o in basis], q, b)


def direct_sum(f1, f2) -> FiniteQuadraticForm:
    k1, k2 = len(f1), len(f2)
    b = [list(r) + [Fraction(0)] * k2 for r in f1.b] + [[Fraction(0)] * k1 + list(r) for r in f2.b]
    return _raw(f1.orders + f2.orders, f1.q + f2.q, b)


def negate(form) -> FiniteQuadraticForm:
    return _raw(form.orders, [-v for v in form.q], [[-v for v in r] for r in form.b])


def l_part(form, l: int) -> FiniteQuadraticForm:
    idx = [i for i, o in enumerate(form.orders) if prime_of(o) == l]
    return _select(form, idx)


def _select(form, idx):
    return FiniteQuadraticForm(tuple(form.orders[i] for i in idx), tuple(form.q[i] for i in idx),
                               tuple(tuple(form.b[i][j] for j in idx) for i in idx))


# -- orthogonal splitting into cyclic and even-type pieces ------------------

@dataclass(frozen=True)
class CyclicPiece:
    l: int
    order: int
    q: Fraction

    @property
    def nu(self):
        return self.order.bit_length() - 1 if self.l == 2 else _valuation(self.order, self.l)

    def form(self):
        return _raw([self.order], [self.q], [[self.q]])


@dataclass(frozen=True)
class EvenPiece:
    """2-adic piece on (Z/2^nu)^2 with q = 2u/2^nu, 2w/2^nu and b = v/2^nu."""
    nu: int
    u: int
    v: int
    w: int
    l: int = 2

    def form(self):
        o = 2 ** self.nu
        q1, q2 = Fraction(2 * self.u, o), Fraction(2 * self.w, o)
        bb = Fraction(self.v, o)
        return _raw([o, o], [q1, q2], [[q1, bb], [bb, q2]])


def _valuation(n, l):
    v = 0
    while n % l == 0:
        n //= l
        v += 1
    return v


def _blocks(form):
    """Index sets of the connected components of the b-graph."""
    k = len(form)
    seen, out = set(), []
    for s in range(k):
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in range(k):
                if j not in seen and form.b[i][j]:
                    seen.add(j)
                    stack.append(j)
        out.append(sorted(comp))
    return out


def decompose_cyclic_even(form) -> list:
    """Split a non-degenerate l-group form into cyclic and even-type pieces.

    Follows the classical induction: peel off a cyclic summand generated by
    some gamma with b(gamma, gamma) of maximal order; when none exists (only
    for l = 2) peel off a rank-two block of even type.
    """
    if form.is_trivial:
        return []
    if len(form.primes) != 1:
        raise MixedPrimes(f"form has primes {form.primes}")
    if not is_nondegenerate(form):
        raise DegenerateForm("cannot decompose a degenerate form")
    pieces = []
    _decompose(form, form.primes[0], pieces)
    return pieces


def _decompose(form, l, pieces):
    for idx in _blocks(form):
        block = _select(form, idx)
        if len(block) == 1:
            pieces.append(CyclicPiece(l, block.orders[0], block.q[0]))
        else:
            _split_one(block, l, pieces)


def _split_one(form, l, pieces):
    top = max(form.orders)
    k = len(form)
    cand = [i for i in range(k) if form.orders[i] == top]
    unit = lambda i: tuple(int(i == j) for j in range(k))
    gamma = next((unit(i) for i in cand if form.b[i][i].denominator == top), None)
    if gamma is None and l != 2:
        gamma = next((form.add(unit(i), unit(j)) for i, j in itertools.combinations(cand, 2)
                      if form.b[i][j].denominator == top), None)
    if gamma is not None:
        pieces.append(CyclicPiece(l, top, form.eval_q(gamma)))
        sub = Subgroup(form, (gamma,))
    else:
        i, j = next((i, j) for i, j in itertools.combinations(cand, 2)
                    if form.b[i][j].denominator == top)
        nu = _valuation(top, 2)
        u = int(form.q[i] * top / 2)
        w = int(form.q[j] * top / 2)
        v = int(form.b[i][j] * top)
        pieces.append(EvenPiece(nu, u, v, w))
        sub = Subgroup(form, (unit(i), unit(j)))
    rest = restrict(form, orthogonal_complement(form, sub))
    if not rest.is_trivial:
        _decompose(rest, l, pieces)


def recompose(pieces) -> FiniteQuadraticForm:
    out = TRIVIAL
    for p in pieces:
        out = direct_sum(out, p.form())
    return out


# -- isomorphism by exhaustive generator matching (small groups only) -------

def is_isomorphic(f1, f2, cap: int = 2 ** 16) -> bool:
    if sorted(f1.orders) != sorted(f2.orders):
        return False
    if f1.is_trivial:
        return True
    elems = list(f2.elements(cap))
    info = [(x, f2.element_order(x), f2.eval_q(x)) for x in elems]
    k = len(f1)
    images = []

    def extend(i):
        if i == k:
            return Subgroup(f2, tuple(images)).order == f2.size
        for x, o, qx in info:
            if o != f1.orders[i] or qx != f1.q[i]:
                continue
            if any(f2.eval_b(x, images[j]) != f1.b[i][j] for j in range(i)):
                continue
            images.append(x)
            if extend(i + 1):
                return True
            images.pop()
        return False

    return extend(0)


# -- integral lattices given by Gram matrices --------------------------------

@dataclass(frozen=True)
class GramLattice:
    gram: tuple
    signature: tuple

    @property
    def rank(self):
        return len(self.gram)

    @property
    def is_even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def det(self):
        return intmat.det(self.gram)


def gram_lattice(matrix) -> GramLattice:
    g = tuple(tuple(int(x) for x in row) for row in matrix)
    n = len(g)
    if any(len(r) != n for r in g):
        raise DimensionMismatch("Gram matrix must be square")
    if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
        raise FqfError("Gram matrix must be symmetric")
    if n and intmat.det(g) == 0:
        raise SingularGram("Gram matrix is singular")
    return GramLattice(g, exact_signature(g))


def exact_signature(matrix) -> tuple:
    """(s+, s-) by symmetric Gaussian elimination over Q."""
    a = [[Fraction(x) for x in r] for r in matrix]
    pos = neg = 0
    while a:
        n = len(a)
        i = next((i for i in range(n) if a[i][i] != 0), None)
        if i is None:
            pair = next(((i, j) for i in range(n) for j in range(n) if a[i][j] != 0), None)
            if pair is None:
                raise SingularGram("degenerate symmetric matrix")
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 a_ij != 0
            for r in range(n):
                a[r][i] += a[r][j]
            for c in range(n):
                a[i][c] += a[j][c]
        piv = a[i][i]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        rest = [r for r in range(n) if r != i]
        a = [[a[r][c] - a[r][i] * a[i][c] / piv for c in rest] for r in rest]
    return pos, neg


def discriminant_form_of_gram(lat: GramLattice, with_vectors: bool = False):
    """(D_L, q_L) from the inverse Gram matrix and a Smith decomposition.

    With ``with_vectors`` also returns the dual vectors (in the coordinates of
    the lattice basis, as Fractions) that represent the generators.
    """
    if not lat.is_even:
        raise NotEven("lattice is not even")
    n = lat.rank
    if n == 0:
        return (TRIVIAL, []) if with_vectors else TRIVIAL
    g = lat.gram
    delta = abs(intmat.det(g))
    if delta == 0:
        raise SingularGram("Gram matrix is singular")
    inv = intmat.inverse(g)
    num = [[int(x * delta) for x in row] for row in inv]
    den = [[delta * int(i == j) for j in range(n)] for i in range(n)]
    gens, orders = [], []
    for vec, d in intmat.quotient_basis(num, den, n):
        for _, pe in split_prime_powers(d):
            m = d // pe
            gens.append([Fraction(m * a, delta) for a in vec])
            orders.append(pe)

    def ip(x, y):
        return sum(x[i] * g[i][j] * y[j] for i in range(n) for j in range(n) if x[i] and y[j])

    q = [ip(x, x) for x in gens]
    b = [[ip(x, y) for y in gens] for x in gens]
    form = _raw(orders, q, b)
    return (form, gens) if with_vectors else form
