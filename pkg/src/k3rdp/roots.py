"""Dynkin types of ADE configurations and the glue data of root lattices.

A ``DynkinType`` is a multiset of components ``("A", n)``, ``("D", n)`` or
``("E", n)``. The negative-definite root lattice of type R is written
Sigma_R below; its discriminant group D_R is the product of the component
glue groups, and every glue class carries a q-value (negative-definite
convention) together with the minimal norm of its coset in the positive
definite lattice.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from math import prod

from .fqf import (FiniteQuadraticForm, GramLattice, Subgroup, TRIVIAL, _raw,
                  direct_sum, gram_lattice, is_isotropic, split_prime_powers)


class RootsError(ValueError):
    pass


class ParseError(RootsError):
    pass


class IllegalComponent(RootsError):
    pass


_LETTER_ORDER = {"E": 0, "D": 1, "A": 2}


def _check_component(letter, n):
    if letter == "A" and n >= 1:
        return
    if letter == "D" and n >= 4:
        return
    if letter == "E" and n in (6, 7, 8):
        return
    raise IllegalComponent(f"{letter}{n} is not an ADE component")


def _comp_key(c):
    return (_LETTER_ORDER[c[0]], -c[1])


@total_ordering
@dataclass(frozen=True)
class DynkinType:
    components: tuple  # sorted canonically, repeated per multiplicity

    @classmethod
    def of(cls, comps) -> "DynkinType":
        comps = [(str(a), int(b)) for a, b in comps]
        for a, b in comps:
            _check_component(a, b)
        return cls(tuple(sorted(comps, key=_comp_key)))

    @property
    def rank(self) -> int:
        return sum(n for _, n in self.components)

    @property
    def disc(self) -> int:
        return prod(component_disc(c) for c in self.components)

    @property
    def counts(self) -> Counter:
        return Counter(self.components)

    def __add__(self, other: "DynkinType") -> "DynkinType":
        return DynkinType.of(self.components + other.components)

    def __str__(self):
        return format_dynkin(self)

    def __repr__(self):
        return f"DynkinType({format_dynkin(self)!r})"

    def __lt__(self, other):
        return (self.rank, format_dynkin(self)) < (other.rank, format_dynkin(other))

    def is_kA1(self) -> bool:
        return all(c == ("A", 1) for c in self.components)


EMPTY = DynkinType(())

_SUMMAND = re.compile(r"^(\d*)([ADE])(\d+)$")


def parse_dynkin(s: str) -> DynkinType:
    if isinstance(s, DynkinType):
        return s
    text = re.sub(r"\s+", "", s)
    if text in ("", "0"):
        return EMPTY
    comps = []
    for part in text.split("+"):
        m = _SUMMAND.match(part)
        if not m:
            raise ParseError(f"cannot parse summand {part!r} in {s!r}")
        mult = int(m.group(1)) if m.group(1) else 1
        if mult < 1:
            raise ParseError(f"multiplicity must be positive in {part!r}")
        letter, n = m.group(2), int(m.group(3))
        _check_component(letter, n)
        comps += [(letter, n)] * mult
    return DynkinType.of(comps)


def format_dynkin(r: DynkinType) -> str:
    if not r.components:
        return "0"
    out, seen = [], []
    for c in r.components:
        if c not in seen:
            seen.append(c)
    cnt = r.counts
    for c in seen:
        m = cnt[c]
        out.append(f"{m if m > 1 else ''}{c[0]}{c[1]}")
    return "+".join(out)


def component_disc(c) -> int:
    letter, n = c
    if letter == "A":
        return n + 1
    if letter == "D":
        return 4
    return {6: 3, 7: 2, 8: 1}[n]


# -- glue data ---------------------------------------------------------------

@dataclass(frozen=True)
class ComponentGlueData:
    """Glue group of one component with class-indexed tables.

    Classes are integers ``0 .. size-1``. For kind ``"cyclic"`` class j is
    j times a fixed generator; for kind ``"klein"`` (D_n, n even) class
    ``a + 2c`` is ``a*s + c*s'``, so addition is xor.
    """
    component: tuple
    kind: str
    size: int
    labels: tuple
    q: tuple          # Fractions in [0, 2), negative-definite convention
    min_norm: tuple   # positive-definite coset minimal norms
    sym_classes: tuple  # colour label per class, equal labels may be swapped

    def add(self, i, j):
        if self.kind == "klein":
            return i ^ j
        return (i + j) % self.size

    def mul(self, m, i):
        if self.kind == "klein":
            return i if m % 2 else 0
        return (m * i) % self.size

    def b(self, i, j):
        v = (self.q[self.add(i, j)] - self.q[i] - self.q[j]) / 2
        return v - (v.numerator // v.denominator)

    def automorphisms(self):
        """Class permutations of the implemented glue symmetry group."""
        letter, n = self.component
        ident = tuple(range(self.size))
        if self.size <= 2:
            return [ident]
        if letter == "D" and n == 4:
            import itertools
            return [(0,) + p for p in itertools.permutations((1, 2, 3))]
        if self.kind == "klein":
            return [ident, (0, 2, 1, 3)]
        return [ident, tuple((-i) % self.size for i in ident)]


def _mod2(x):
    x = Fraction(x)
    return x - 2 * (x.numerator // (2 * x.denominator))


@lru_cache(maxsize=None)
def component_glue_data(c) -> ComponentGlueData:
    letter, n = c
    _check_component(letter, n)
    if letter == "A":
        m = n + 1
        mins = tuple(Fraction(j * (m - j), m) for j in range(m))
        q = tuple(_mod2(Fraction(-j * j * n, m)) for j in range(m))
        labels = tuple(str(j) for j in range(m))
        sym = tuple(min(j, m - j) for j in range(m))
        return ComponentGlueData(c, "cyclic", m, labels, q, mins, sym)
    if letter == "D":
        quarter = Fraction(n, 4)
        if n % 2:
            labels = ("0", "s", "v", "s'")
            mins = (Fraction(0), quarter, Fraction(1), quarter)
            sym = (0, 1, 2, 1)
            kind = "cyclic"
        else:
            labels = ("0", "s", "s'", "v")
            mins = (Fraction(0), quarter, quarter, Fraction(1))
            sym = (0, 1, 1, 1) if n == 4 else (0, 1, 1, 2)
            kind = "klein"
        q = tuple(_mod2(-x) for x in mins)
        return ComponentGlueData(c, kind, 4, labels, q, mins, sym)
    if n == 6:
        f = Fraction(4, 3)
        return ComponentGlueData(c, "cyclic", 3, ("0", "1", "2"), (Fraction(0), _mod2(-f), _mod2(-f)),
                                 (Fraction(0), f, f), (0, 1, 1))
    if n == 7:
        f = Fraction(3, 2)
        return ComponentGlueData(c, "cyclic", 2, ("0", "1"), (Fraction(0), _mod2(-f)),
                                 (Fraction(0), f), (0, 1))
    return ComponentGlueData(c, "cyclic", 1, ("0",), (Fraction(0),), (Fraction(0),), (0,))


def _component_fqf_parts(c):
    """Prime-power generators of a component glue group as class indices."""
    g = component_glue_data(c)
    if g.size == 1:
        return []
    if g.kind == "klein":
        return [(1, 2), (2, 2)]
    return [(g.size // pe, pe) for _, pe in split_prime_powers(g.size)]


def component_fqf(c) -> FiniteQuadraticForm:
    g = component_glue_data(c)
    parts = _component_fqf_parts(c)
    cls = [x for x, _ in parts]
    q = [g.q[x] for x in cls]
    b = [[g.b(x, y) for y in cls] for x in cls]
    return _raw([o for _, o in parts], q, b)


def sigma_fqf(r: DynkinType) -> FiniteQuadraticForm:
    out = TRIVIAL
    for c in r.components:
        out = direct_sum(out, component_fqf(c))
    return out


def classes_to_fqf_element(r: DynkinType, classes) -> tuple:
    """Coordinates in ``sigma_fqf(r)`` of the element with given glue classes."""
    out = []
    for c, x in zip(r.components, classes):
        g = component_glue_data(c)
        parts = _component_fqf_parts(c)
        if g.kind == "klein":
            out += [x & 1, (x >> 1) & 1]
            continue
        for gen, pe in parts:
            # x = sum over prime powers of coeff * gen with gen = size / pe
            out.append((x * pow(gen, -1, pe)) % pe)
    return tuple(out)


def glue_subgroup(r: DynkinType, generators) -> Subgroup:
    """Subgroup of ``sigma_fqf(r)`` spanned by class-vector generators."""
    f = sigma_fqf(r)
    return Subgroup(f, tuple(classes_to_fqf_element(r, g) for g in generators))


def coset_min_norm(r: DynkinType, classes) -> Fraction:
    return sum((component_glue_data(c).min_norm[x] for c, x in zip(r.components, classes)),
               Fraction(0))


def element_q(r: DynkinType, classes) -> Fraction:
    return _mod2(sum((component_glue_data(c).q[x] for c, x in zip(r.components, classes)),
                     Fraction(0)))


def span_classes(r: DynkinType, generators) -> list:
    """All elements (class vectors) of the subgroup spanned by generators."""
    glue = [component_glue_data(c) for c in r.components]
    zero = tuple(0 for _ in glue)
    elems = {zero}
    frontier = [zero]
    gens = [tuple(g) for g in generators]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(d.add(a, b) for d, a, b in zip(glue, x, g))
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(elems)


def is_root_free(r: DynkinType, generators) -> bool:
    """True iff the isotropic glue spanned by generators adds no norm-2 vector."""
    sub = glue_subgroup(r, generators)
    if not is_isotropic(sub.form, sub):
        from .fqf import NotIsotropic
        raise NotIsotropic("glue subgroup is not isotropic")
    return all(coset_min_norm(r, x) != 2 for x in span_classes(r, generators) if any(x))


# -- Gram matrices -------------------------------------------------------------

def dynkin_edges(c) -> list:
    letter, n = c
    if letter == "A":
        return [(i, i + 1) for i in range(n - 1)]
    if letter == "D":
        return [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    return [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)]


def gram_of_component(c) -> list:
    n = c[1]
    g = [[-2 * int(i == j) for j in range(n)] for i in range(n)]
    for i, j in dynkin_edges(c):
        g[i][j] = g[j][i] = 1
    return g


def gram_of_sigma(r: DynkinType) -> GramLattice:
    n = r.rank
    g = [[0] * n for _ in range(n)]
    off = 0
    for c in r.components:
        block = gram_of_component(c)
        for i, row in enumerate(block):
            for j, x in enumerate(row):
                g[off + i][off + j] = x
        off += c[1]
    return gram_lattice(g) if n else GramLattice((), (0, 0))


def num_roots(r: DynkinType) -> int:
    total = 0
    for letter, n in r.components:
        if letter == "A":
            total += n * (n + 1)
        elif letter == "D":
            total += 2 * n * (n - 1)
        else:
            total += {6: 72, 7: 126, 8: 240}[n]
    return total


# -- the poset S(R) ------------------------------------------------------------

def _classify_tree(vertices, adj) -> tuple:
    degs = {v: sum(1 for w in adj[v] if w in vertices) for v in vertices}
    branch = [v for v in vertices if degs[v] == 3]
    if not branch:
        return ("A", len(vertices))
    centre = branch[0]
    arms = []
    for start in adj[centre]:
        if start not in vertices:
            continue
        length, prev, cur = 1, centre, start
        while True:
            nxt = [w for w in adj[cur] if w in vertices and w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return ("D", arms[2] + 3)
    return ("E", {(1, 2, 2): 6, (1, 2, 3): 7, (1, 2, 4): 8}[tuple(arms)])


@lru_cache(maxsize=None)
def component_children(c) -> frozenset:
    """Types obtained from one component by deleting a single vertex."""
    n = c[1]
    adj = {v: set() for v in range(n)}
    for i, j in dynkin_edges(c):
        adj[i].add(j)
        adj[j].add(i)
    out = set()
    for v in range(n):
        rest = set(range(n)) - {v}
        comps, seen = [], set()
        for s in sorted(rest):
            if s in seen:
                continue
            stack, part = [s], set()
            while stack:
                x = stack.pop()
                if x in part:
                    continue
                part.add(x)
                stack += [w for w in adj[x] if w in rest and w not in part]
            seen |= part
            comps.append(_classify_tree(part, adj))
        out.add(tuple(sorted(comps, key=_comp_key)))
    return frozenset(out)


def children(r: DynkinType) -> frozenset:
    out = set()
    comps = list(r.components)
    for idx, c in enumerate(dict.fromkeys(comps)):
        i = comps.index(c)
        rest = comps[:i] + comps[i + 1:]
        for piece in component_children(c):
            out.add(DynkinType.of(rest + list(piece)))
    return frozenset(out)


def s_closure(r: DynkinType, min_rank: int = 0) -> set:
    """All types in S(R) of rank >= min_rank, R included."""
    seen = {r}
    frontier = [r]
    while frontier:
        nxt = []
        for t in frontier:
            if t.rank <= min_rank:
                continue
            for ch in children(t):
                if ch not in seen:
                    seen.add(ch)
                    nxt.append(ch)
        frontier = nxt
    return seen


def s_contains(r, r_sub) -> bool:
    """Whether r_sub lies in S(r), i.e. is obtained by deleting vertices."""
    r, r_sub = parse_dynkin(r), parse_dynkin(r_sub)
    return _s_contains(r, r_sub)


@lru_cache(maxsize=200000)
def _s_contains(r, r_sub):
    if r == r_sub:
        return True
    if r.rank <= r_sub.rank:
        return False
    return any(_s_contains(ch, r_sub) for ch in children(r))


def all_components(max_rank: int) -> list:
    comps = [("E", n) for n in (8, 7, 6) if n <= max_rank]
    comps += [("D", n) for n in range(max_rank, 3, -1)]
    comps += [("A", n) for n in range(max_rank, 0, -1)]
    return comps


def enumerate_dynkin_types(max_rank: int, include_empty: bool = False) -> list:
    """All Dynkin types of rank <= max_rank, ordered by rank then string."""
    comps = all_components(max_rank)
    out = []

    def rec(i, left, acc):
        if i == len(comps):
            out.append(DynkinType(tuple(acc)))
            return
        c = comps[i]
        m = 0
        while m * c[1] <= left:
            rec(i + 1, left - m * c[1], acc + [c] * m)
            m += 1

    rec(0, max_rank, [])
    if not include_empty:
        out = [t for t in out if t.components]
    return sorted(out)
