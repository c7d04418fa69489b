"""Local invariants [l-excess, reduced discriminant] of even Z_l-lattices.

For a non-degenerate l-group form (D, q) and a rank n, ``local_invariant_set``
returns every pair [sigma, rho] realised by an even Z_l-lattice of rank n
with discriminant form (D, q). ``exists_even_lattice`` glues these local
choices into the global existence test for an even Z-lattice of given
signature and discriminant form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, legendre_symbol

from .fqf import (EvenPiece, FiniteQuadraticForm, GramLattice,
                  decompose_cyclic_even, l_part)


class LocalError(ValueError):
    pass


class NotAUnit(LocalError):
    pass


class PrimeMismatch(LocalError):
    pass


class BadNumerator(LocalError):
    pass


class DegenerateEvenType(LocalError):
    pass


def _valuation(n: int, l: int) -> int:
    if n == 0:
        raise NotAUnit("valuation of zero")
    v = 0
    while n % l == 0:
        n //= l
        v += 1
    return v


def square_class_of(l: int, u) -> int:
    """Class of an l-adic unit: u mod 8 for l = 2, else +1/-1 (square/not)."""
    u = Fraction(u)
    num, den = u.numerator, u.denominator
    if num % l == 0 or den % l == 0:
        raise NotAUnit(f"{u} is not an {l}-adic unit")
    if l == 2:
        return (num * den) % 8
    return int(legendre_symbol((num * den) % l, l))


def unit_part(l: int, x) -> Fraction:
    x = Fraction(x)
    if x == 0:
        raise NotAUnit("zero has no unit part")
    v = _valuation(x.numerator, l) - _valuation(x.denominator, l)
    return x / Fraction(l) ** v


@dataclass(frozen=True, order=True)
class LocalInvariant:
    l: int
    sigma: int
    rho: int

    def __post_init__(self):
        object.__setattr__(self, "sigma", self.sigma % 8)
        ok = self.rho in ((1, 3, 5, 7) if self.l == 2 else (1, -1))
        if not ok:
            raise LocalError(f"bad square class {self.rho} at l = {self.l}")

    def __str__(self):
        if self.l == 2:
            r = str(self.rho)
        else:
            r = "1" if self.rho == 1 else "n"
        return f"[{self.sigma},{r}]"

    @classmethod
    def parse(cls, l: int, text: str) -> "LocalInvariant":
        s, r = text.strip().strip("[]").split(",")
        r = r.strip()
        rho = (-1 if r == "n" else 1) if l != 2 else int(r)
        return cls(l, int(s), rho)


def _mul_class(l, a, b):
    return (a * b) % 8 if l == 2 else a * b


def star(a: LocalInvariant, b: LocalInvariant) -> LocalInvariant:
    if a.l != b.l:
        raise PrimeMismatch(f"star of invariants at {a.l} and {b.l}")
    return LocalInvariant(a.l, a.sigma + b.sigma, _mul_class(a.l, a.rho, b.rho))


def star_sets(s1, s2) -> frozenset:
    return frozenset(star(a, b) for a in s1 for b in s2)


def format_set(s) -> str:
    return "{" + ",".join(str(x) for x in sorted(s)) + "}"


def local_set_unimodular(l: int, n: int) -> frozenset:
    L = lambda s, r: LocalInvariant(l, s, r)
    if n == 0:
        return frozenset({L(0, 1)})
    if l != 2:
        return frozenset({L(0, 1), L(0, -1)})
    if n % 2:
        return frozenset()
    if n % 4 == 0:
        return frozenset({L(n, 1), L(n, 5)})
    return frozenset({L(n, 3), L(n, 7)})


def local_set_cyclic(l: int, nu: int, a: int) -> frozenset:
    if nu < 1 or a % l == 0:
        raise BadNumerator(f"need nu >= 1 and a prime to {l}, got nu={nu}, a={a}")
    L = lambda s, r: LocalInvariant(l, s, r)
    if l != 2:
        lam = int(legendre_symbol(a % l, l))
        if lam == 1:
            return frozenset({L(l ** nu - 1, 1)})
        if nu % 2 == 0:
            return frozenset({L(l ** nu - 1, -1)})
        return frozenset({L(l ** nu + 3, -1)})
    a8 = a % 8
    if nu == 1:
        if a % 4 == 1:
            return frozenset({L(0, 1), L(0, 5)})
        return frozenset({L(2, 3), L(2, 7)})
    if nu % 2 == 0 or a8 in (1, 7):
        return frozenset({L(1 - a8, a8)})
    return frozenset({L(5 - a8, a8)})


def local_set_even_type(nu: int, u: int, v: int, w: int) -> frozenset:
    if v % 2 == 0:
        raise DegenerateEvenType("v must be odd")
    if (u * w) % 2 == 0:
        return frozenset({LocalInvariant(2, 2, 7)})
    if nu % 2 == 0:
        return frozenset({LocalInvariant(2, 2, 3)})
    return frozenset({LocalInvariant(2, 6, 3)})


def cyclic_numerator(l: int, order: int, qval: Fraction) -> int:
    """The integer a with q = a / l^nu read through Q_l/2Z_l.

    For odd l the value c/l^nu in Q/2Z has c even, and its image in
    Q_l/Z_l is a/l^nu with a = c mod l^nu. For l = 2, a is odd and is
    defined modulo 2^(nu+1).
    """
    c = qval * order
    if c.denominator != 1:
        raise BadNumerator(f"q = {qval} does not have denominator {order}")
    c = c.numerator
    if l == 2:
        return c % (2 * order)
    return c % order


def piece_set(piece) -> frozenset:
    if isinstance(piece, EvenPiece):
        return local_set_even_type(piece.nu, piece.u, piece.v, piece.w)
    a = cyclic_numerator(piece.l, piece.order, piece.q)
    return local_set_cyclic(piece.l, piece.nu, a)


@lru_cache(maxsize=65536)
def local_invariant_set(l: int, n: int, form_l: FiniteQuadraticForm) -> frozenset:
    """All [l-excess, reddisc] of even Z_l-lattices of rank n with form form_l."""
    if not form_l.is_trivial and form_l.primes != (l,):
        raise PrimeMismatch(f"form is not an {l}-group")
    leng = form_l.leng
    if n < leng:
        return frozenset()
    acc = local_set_unimodular(l, n - leng)
    for p in decompose_cyclic_even(form_l):
        acc = star_sets(acc, piece_set(p))
        if not acc:
            break
    return acc


def required_rho(l: int, d: int) -> int:
    return square_class_of(l, unit_part(l, d))


def exists_even_lattice(s_plus: int, s_minus: int, form: FiniteQuadraticForm,
                        with_witness: bool = False):
    """Existence of an even Z-lattice of signature (s+, s-) with form (D, q).

    The witness maps each prime in D(2d) to the chosen local invariant.
    """
    n = s_plus + s_minus
    if n == 0 or s_plus < 0 or s_minus < 0:
        ok = n == 0 and form.is_trivial
        return (ok, {}) if with_witness else ok
    d = (-1) ** s_minus * form.size
    primes = sorted(set(factorint(abs(d))) | {2})
    options = []
    for l in primes:
        rho = required_rho(l, d)
        s = [x for x in local_invariant_set(l, n, l_part(form, l)) if x.rho == rho]
        if not s:
            return (False, None) if with_witness else False
        options.append(sorted(s))
    # dp over the residue of the running excess sum
    target = (n - (s_plus - s_minus)) % 8
    reach = {0: []}
    for opts in options:
        nxt = {}
        for r, chosen in reach.items():
            for x in opts:
                nxt.setdefault((r + x.sigma) % 8, chosen + [x])
        reach = nxt
    chosen = reach.get(target)
    ok = chosen is not None
    if not with_witness:
        return ok
    return ok, ({x.l: x for x in chosen} if ok else None)


# -- Jordan decomposition oracle --------------------------------------------

@dataclass(frozen=True)
class JordanConstituent:
    """l^nu [unit] (kind 'diag'), or 2^nu U / 2^nu V at l = 2."""
    nu: int
    kind: str
    unit: Fraction = Fraction(1)


@dataclass(frozen=True)
class JordanDecomposition:
    l: int
    constituents: tuple

    @property
    def rank(self):
        return sum(1 if c.kind == "diag" else 2 for c in self.constituents)


def _fval(x: Fraction, l: int) -> int:
    return _valuation(x.numerator, l) - _valuation(x.denominator, l)


def jordan_decompose(l: int, lat) -> JordanDecomposition:
    """Split a Gram matrix over Z_(l) into Jordan constituents."""
    gram = lat.gram if isinstance(lat, GramLattice) else lat
    a = [[Fraction(x) for x in r] for r in gram]
    out = []
    while a:
        n = len(a)
        nz = [(i, j) for i in range(n) for j in range(n) if a[i][j] != 0]
        if not nz:
            from .fqf import SingularGram
            raise SingularGram("singular over Q_l")
        vmin = min(_fval(a[i][j], l) for i, j in nz)
        diag = next((i for i in range(n) if a[i][i] != 0 and _fval(a[i][i], l) == vmin), None)
        if diag is None and l != 2:
            i, j = next((i, j) for i, j in nz if _fval(a[i][j], l) == vmin)
            for r in range(n):
                a[r][i] += a[r][j]
            for c in range(n):
                a[i][c] += a[j][c]
            diag = i
        if diag is not None:
            i = diag
            piv = a[i][i]
            out.append(JordanConstituent(vmin, "diag", piv / Fraction(l) ** vmin))
            rest = [r for r in range(n) if r != i]
            a = [[a[r][c] - a[r][i] * a[i][c] / piv for c in rest] for r in rest]
            continue
        i, j = next((i, j) for i, j in nz if _fval(a[i][j], l) == vmin)
        s = Fraction(2) ** vmin
        alpha, gamma = a[i][i] / s / 2, a[j][j] / s / 2
        ag = alpha * gamma
        odd = (ag.numerator * ag.denominator) % 2 == 1 if ag != 0 else False
        out.append(JordanConstituent(vmin, "V" if odd else "U"))
        det = a[i][i] * a[j][j] - a[i][j] ** 2
        binv = [[a[j][j] / det, -a[i][j] / det], [-a[i][j] / det, a[i][i] / det]]
        rest = [r for r in range(n) if r not in (i, j)]
        new = []
        for r in rest:
            row = []
            for c in rest:
                x = a[r][c]
                vr, vc = (a[r][i], a[r][j]), (a[i][c], a[j][c])
                for p in range(2):
                    for q in range(2):
                        x -= vr[p] * binv[p][q] * vc[q]
                row.append(x)
            new.append(row)
        a = new
    return JordanDecomposition(l, tuple(out))


def _excess(l, c: JordanConstituent) -> int:
    if l != 2:
        sq = square_class_of(l, c.unit) == 1
        return (l ** c.nu - 1 + (0 if (c.nu % 2 == 0 or sq) else 4)) % 8
    if c.kind == "U":
        return 2
    if c.kind == "V":
        return (4 - (-1) ** c.nu * 2) % 8
    a = square_class_of(2, c.unit)
    if c.nu % 2 == 0 or a in (1, 7):
        return (1 - a) % 8
    return (5 - a) % 8


def tau_of_jordan(j: JordanDecomposition) -> LocalInvariant:
    sigma, rho = 0, 1
    for c in j.constituents:
        sigma += _excess(j.l, c)
        if c.kind == "diag":
            cls = square_class_of(j.l, c.unit)
        else:
            cls = 7 if c.kind == "U" else 3
        rho = _mul_class(j.l, rho, cls)
    return LocalInvariant(j.l, sigma, rho)


def tau_of_gram(l: int, lat) -> LocalInvariant:
    return tau_of_jordan(jordan_decompose(l, lat))

