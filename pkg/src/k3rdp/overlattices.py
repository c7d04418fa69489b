"""Root-free even overlattices of negative definite root lattices.

Even overlattices M of Sigma_R correspond to isotropic subgroups H of the
discriminant form of Sigma_R. M has no roots beyond those of Sigma_R exactly
when every nonzero element of H has coset minimal norm different from 2.

Subgroups are grown one prime-index step at a time. Two subgroups related
by a permutation of identical components combined with per-component glue
automorphisms are identified using a canonical labelling of a coloured
graph (nauty), and candidate extensions are first reduced modulo the
stabiliser of the current subgroup.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from functools import cached_property
from math import lcm, prod

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from sympy import primefactors

from . import fqf
from .roots import (DynkinType, component_glue_data, classes_to_fqf_element,
                    parse_dynkin, sigma_fqf)

try:
    import pynauty
except ImportError:  # pragma: no cover - exercised only without pynauty
    pynauty = None


class BudgetExceeded(RuntimeError):
    pass


MAX_GROUP = 2 ** 22


class GlueSpace:
    """The group D_R as mixed-radix integers with vectorised lookup tables.

    Only components with nontrivial glue (everything except E8) take part.
    All q-values, norms and pairings are scaled by ``S``, the exponent of D_R.
    """

    def __init__(self, r: DynkinType):
        self.R = r
        self.slots = [i for i, c in enumerate(r.components) if component_glue_data(c).size > 1]
        self.glue = [component_glue_data(r.components[i]) for i in self.slots]
        self.sizes = [g.size for g in self.glue]
        self.m = len(self.glue)
        self.N = prod(self.sizes)
        if self.N > MAX_GROUP:
            raise BudgetExceeded(f"|D_R| = {self.N} is above the enumeration cap")
        self.S = lcm(1, *self.sizes)
        S = self.S
        self.strides = np.ones(self.m, dtype=np.int64)
        for i in range(self.m - 2, -1, -1):
            self.strides[i] = self.strides[i + 1] * self.sizes[i + 1]
        idx = np.arange(self.N, dtype=np.int64)
        self.cls = np.empty((self.N, self.m), dtype=np.int32)
        for i in range(self.m):
            self.cls[:, i] = (idx // self.strides[i]) % self.sizes[i]
        self.qtab = [np.array([int(x * S) for x in g.q], dtype=np.int64) for g in self.glue]
        self.mntab = [np.array([int(x * S) for x in g.min_norm], dtype=np.int64) for g in self.glue]
        self.btab = [np.array([[int(g.b(a, b) * S) for b in range(g.size)] for a in range(g.size)],
                              dtype=np.int64) for g in self.glue]
        q = np.zeros(self.N, dtype=np.int64)
        mn = np.zeros(self.N, dtype=np.int64)
        for i in range(self.m):
            q += self.qtab[i][self.cls[:, i]]
            mn += self.mntab[i][self.cls[:, i]]
        self.q = q % (2 * S)
        self.mn = mn
        self.good = (self.q == 0) & (self.mn != 2 * S)
        self.good[0] = False
        self.X = np.nonzero(self.good)[0]
        self.primes = primefactors(self.N) if self.N > 1 else []

    # element arithmetic on index arrays
    def encode(self, cls):
        return cls @ self.strides

    def add(self, a, b):
        ca, cb = self.cls[a], self.cls[b]
        out = np.empty_like(ca)
        for i, g in enumerate(self.glue):
            if g.kind == "klein":
                out[..., i] = ca[..., i] ^ cb[..., i]
            else:
                out[..., i] = (ca[..., i] + cb[..., i]) % g.size
        return self.encode(out)

    def mul(self, k, a):
        ca = self.cls[a]
        out = np.empty_like(ca)
        for i, g in enumerate(self.glue):
            if g.kind == "klein":
                out[..., i] = ca[..., i] if k % 2 else 0
            else:
                out[..., i] = (k * ca[..., i]) % g.size
        return self.encode(out)

    def pair(self, a, b):
        """Scaled b(a, b) mod S for an index array a and a single index b."""
        ca, cb = self.cls[a], self.cls[b]
        tot = np.zeros(np.shape(a), dtype=np.int64)
        for i in range(self.m):
            tot += self.btab[i][ca[..., i], cb[i]]
        return tot % self.S

    def full_classes(self, idx) -> tuple:
        """Class vector over all components of R (E8 slots get 0)."""
        out = [0] * len(self.R.components)
        for s, x in zip(self.slots, self.cls[idx]):
            out[s] = int(x)
        return tuple(out)

    def index_of(self, classes) -> int:
        return int(sum(int(classes[s]) * int(self.strides[k]) for k, s in enumerate(self.slots)))

    # coloured graph encoding the symmetry group
    @cached_property
    def _frame(self):
        comp_colour = {}
        for i, g in enumerate(self.glue):
            comp_colour.setdefault(g.component, []).append(i)
        order = sorted(comp_colour, key=lambda c: ("EDA".index(c[0]), -c[1]))
        offsets, off = [], self.m
        for g in self.glue:
            offsets.append(off)
            off += g.size
        adj = {v: [] for v in range(off)}
        value_colour = {}
        for i, g in enumerate(self.glue):
            for j in range(g.size):
                v = offsets[i] + j
                adj[i].append(v)
                value_colour.setdefault((g.component, g.sym_classes[j]), set()).add(v)
            if g.kind == "cyclic" and g.component[0] == "A" and g.size >= 3:
                for j in range(g.size):
                    adj[offsets[i] + j].append(offsets[i] + (j + 1) % g.size)
        colours = [set(comp_colour[c]) for c in order]
        colours += [value_colour[k] for k in sorted(value_colour, key=lambda k: (
            "EDA".index(k[0][0]), -k[0][1], k[1]))]
        return offsets, off, adj, colours

    def graph(self, elems):
        offsets, base, adj, colours = self._frame
        nz = [int(e) for e in elems if e != 0]
        n = base + len(nz)
        adj = {v: list(w) for v, w in adj.items()}
        for k, e in enumerate(nz):
            v = base + k
            adj[v] = [offsets[i] + int(c) for i, c in enumerate(self.cls[e]) if c]
        cols = [set(c) for c in colours] + [set(range(base, n))]
        cols = [c for c in cols if c]
        return pynauty.Graph(n, directed=False, adjacency_dict=adj, vertex_coloring=cols)

    def class_maps(self, perm):
        """Decode a graph automorphism into (component map, class maps)."""
        offsets, _, _, _ = self._frame
        comp = [perm[i] for i in range(self.m)]
        maps = []
        for i, g in enumerate(self.glue):
            k = comp[i]
            maps.append(np.array([perm[offsets[i] + j] - offsets[k] for j in range(g.size)],
                                 dtype=np.int32))
        return comp, maps

    def apply(self, comp, maps, idx):
        c = self.cls[idx]
        out = np.empty_like(c)
        for i in range(self.m):
            out[..., comp[i]] = maps[i][c[..., i]]
        return self.encode(out)


@dataclass
class Overlattice:
    R: DynkinType
    generators: tuple          # class vectors over all components of R
    order: int
    elements: tuple = field(repr=False, default=())

    @cached_property
    def subgroup(self) -> fqf.Subgroup:
        f = sigma_fqf(self.R)
        return fqf.Subgroup(f, tuple(classes_to_fqf_element(self.R, g) for g in self.generators))

    @cached_property
    def form(self) -> fqf.FiniteQuadraticForm:
        """Discriminant form of M, i.e. H^perp / H."""
        if self.order == 1:
            return sigma_fqf(self.R)
        return fqf.quotient_form(self.subgroup.form, self.subgroup)

    @cached_property
    def glue_invariants(self) -> tuple:
        """Prime-power orders of a cyclic decomposition of H, sorted."""
        return tuple(sorted(o for _, o in self.subgroup.basis))


class _Sub:
    __slots__ = ("elems", "gens", "mask")

    def __init__(self, elems, gens, n):
        self.elems = np.sort(np.asarray(elems, dtype=np.int64))
        self.gens = list(gens)
        self.mask = np.zeros(n, dtype=bool)
        self.mask[self.elems] = True


def enumerate_overlattices(r, budget_seconds: float | None = None,
                           max_subgroups: int | None = None, symmetry: bool = True):
    """Yield representatives of root-free isotropic subgroups, ascending |H|.

    With ``symmetry=False`` every subgroup is produced (no identification).
    """
    r = parse_dynkin(r)
    start = time.monotonic()
    sp = GlueSpace(r)
    use_sym = symmetry and pynauty is not None and sp.m > 0
    root = _Sub([0], [], sp.N)
    yield _emit(sp, root)
    if sp.X.size == 0:
        return
    heap = [(1, 0, root)]
    seen = set()
    counter, emitted = 1, 1
    while heap:
        _, _, h = heapq.heappop(heap)
        for x, p in _extensions(sp, h, use_sym):
            if budget_seconds is not None and time.monotonic() - start > budget_seconds:
                raise BudgetExceeded(f"overlattice enumeration of {r} exceeded {budget_seconds}s")
            new = [h.elems]
            step = x
            for _ in range(p - 1):
                new.append(sp.add(h.elems, step))
                step = sp.add(np.array([step]), x)[0]
            elems = np.concatenate(new)
            if np.any(sp.mn[elems] == 2 * sp.S):
                continue
            key = _key(sp, elems, use_sym)
            if key in seen:
                continue
            seen.add(key)
            child = _Sub(elems, h.gens + [int(x)], sp.N)
            emitted += 1
            if max_subgroups is not None and emitted > max_subgroups:
                raise BudgetExceeded(f"more than {max_subgroups} glue subgroups for {r}")
            yield _emit(sp, child)
            heapq.heappush(heap, (len(elems), counter, child))
            counter += 1


def _emit(sp, h):
    gens = tuple(sp.full_classes(g) for g in h.gens)
    elems = tuple(sp.full_classes(e) for e in h.elems)
    return Overlattice(sp.R, gens, len(h.elems), elems)


def _key(sp, elems, use_sym):
    if not use_sym:
        return tuple(np.sort(elems).tolist())
    return (len(elems), pynauty.certificate(sp.graph(elems)))


def _extensions(sp, h, use_sym):
    """Orbit representatives (x, p) with x outside H, p*x in H, x perp H."""
    cand = sp.X[~h.mask[sp.X]]
    for g in h.gens:
        if cand.size == 0:
            break
        cand = cand[sp.pair(cand, g) == 0]
    if cand.size == 0:
        return []
    prime = np.zeros(cand.size, dtype=np.int64)
    for p in sp.primes:
        hit = h.mask[sp.mul(p, cand)]
        prime[hit & (prime == 0)] = p
    keep = prime > 0
    cand, prime = cand[keep], prime[keep]
    if cand.size == 0:
        return []
    if use_sym and cand.size > 1:
        gens = pynauty.autgrp(sp.graph(h.elems))[0]
        if gens:
            pos = np.full(sp.N, -1, dtype=np.int64)
            pos[cand] = np.arange(cand.size)
            rows, cols = [], []
            for perm in gens:
                comp, maps = sp.class_maps(perm)
                img = pos[sp.apply(comp, maps, cand)]
                rows.append(np.arange(cand.size))
                cols.append(img)
            rows, cols = np.concatenate(rows), np.concatenate(cols)
            if np.any(cols < 0):
                raise AssertionError("stabiliser does not preserve the candidate set")
            adj = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(cand.size, cand.size))
            _, labels = connected_components(adj, directed=True, connection="weak")
            _, first = np.unique(labels, return_index=True)
            first.sort()
            cand, prime = cand[first], prime[first]
    return list(zip(cand.tolist(), prime.tolist()))


def symmetry_images(r, generators):
    """All images of a glue subgroup under the implemented symmetry group.

    Brute force over component permutations and glue automorphisms; only
    meant for small test cases.
    """
    import itertools
    from .roots import span_classes
    r = parse_dynkin(r)
    comps = r.components
    elems = span_classes(r, generators)
    glue = [component_glue_data(c) for c in comps]
    groups = {}
    for i, c in enumerate(comps):
        groups.setdefault(c, []).append(i)
    perms_per_type = [list(itertools.permutations(ix)) for ix in groups.values()]
    autos = [g.automorphisms() for g in glue]
    out = set()
    for choice in itertools.product(*perms_per_type):
        sigma = list(range(len(comps)))
        for ix, img in zip(groups.values(), choice):
            for a, b in zip(ix, img):
                sigma[a] = b
        for aut in itertools.product(*autos):
            img = set()
            for x in elems:
                y = [0] * len(comps)
                for i, xi in enumerate(x):
                    y[sigma[i]] = aut[i][xi]
                img.add(tuple(y))
            out.add(frozenset(img))
    return out
