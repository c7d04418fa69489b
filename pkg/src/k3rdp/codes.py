"""Binary linear codes: glue codes of kA1 configurations and a small
classification of length-16 codes with all nonzero weights in {8, 12, 16}.

Words are Python ints used as bitmasks; bit i is coordinate i.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

import pynauty

from .roots import parse_dynkin


class CodesError(ValueError):
    pass


class NotElementaryHost(CodesError):
    pass


def rref(words, n):
    rows = []
    for w in words:
        for r in rows:
            if w & (1 << (r.bit_length() - 1)):
                w ^= r
        if w:
            top = 1 << (w.bit_length() - 1)
            rows = [r ^ w if r & top else r for r in rows]
            rows.append(w)
    return tuple(sorted(rows, reverse=True))


@dataclass(frozen=True)
class BinaryCode:
    n: int
    rows: tuple

    @classmethod
    def from_words(cls, n, words):
        if n > 32:
            raise CodesError("length above 32 is not supported")
        return cls(n, rref([int(w) for w in words], n))

    @property
    def dim(self):
        return len(self.rows)

    def words(self):
        if self.dim > 20:
            raise CodesError("dimension above 20: word list too large")
        out = [0]
        for r in self.rows:
            out += [w ^ r for w in out]
        return out

    def weights(self) -> Counter:
        return Counter(bin(w).count("1") for w in self.words())

    def weight_enumerator(self) -> list:
        c = self.weights()
        return [c.get(i, 0) for i in range(self.n + 1)]

    def is_doubly_even(self) -> bool:
        return all(k % 4 == 0 for k in self.weights())

    def contains_all_ones(self) -> bool:
        full = (1 << self.n) - 1
        return full in set(self.words())

    def __contains__(self, w):
        for r in self.rows:
            if w & (1 << (r.bit_length() - 1)):
                w ^= r
        return w == 0

    def hex_rows(self) -> list:
        width = (self.n + 3) // 4
        return [f"{r:0{width}x}" for r in self.rows]

    def __str__(self):
        return f"[{self.n},{self.dim}] rows={','.join(self.hex_rows())}"


def _popcount(a):
    a = a.astype(np.uint32)
    c = np.zeros(a.shape, dtype=np.int64)
    for i in range(32):
        c += (a >> i) & 1
    return c


def _code_graph(n, words):
    nz = [w for w in words if w]
    adj = {i: [] for i in range(n + len(nz))}
    for k, w in enumerate(nz):
        adj[n + k] = [i for i in range(n) if w >> i & 1]
    cols = [set(range(n))]
    if nz:
        cols.append(set(range(n, n + len(nz))))
    return pynauty.Graph(n + len(nz), directed=False, adjacency_dict=adj, vertex_coloring=cols)


def canonical_key(code: BinaryCode):
    """Invariant of the code under coordinate permutations."""
    return code.dim, pynauty.certificate(_code_graph(code.n, code.words()))


def _apply_perm(perm, words, n):
    out = np.zeros_like(words)
    for i in range(n):
        out |= ((words >> i) & 1) << perm[i]
    return out


def lemma52_search(n: int = 16, allowed=(8, 12, 16), max_dim: int = 6,
                   time_limit: float | None = None) -> dict:
    """Classify [n, k] codes with nonzero weights in ``allowed`` up to permutation.

    Codes are grown one generator at a time; extensions of a class are first
    reduced modulo its automorphism group, then identified by a canonical
    form. Returns classes per dimension and the codes of dimension >= 5
    lacking the all-ones word.
    """
    start = time.monotonic()
    allowed = set(allowed)
    space = np.arange(1 << n, dtype=np.int64)
    wt = _popcount(space)
    ok_wt = np.isin(wt, list(allowed))
    cand_all = space[ok_wt]
    levels = {0: [BinaryCode(n, ())]}
    for k in range(1, max_dim + 1):
        found = {}
        for code in levels[k - 1]:
            words = np.array(code.words(), dtype=np.int64)
            cand = cand_all
            for w in words[1:]:
                cand = cand[ok_wt[cand ^ w]]
            # keep one word per coset of the code
            cand = np.unique(np.min(cand[:, None] ^ words[None, :], axis=1))
            cand = cand[ok_wt[cand]]
            if cand.size == 0:
                continue
            gens = pynauty.autgrp(_code_graph(n, code.words()))[0]
            if gens and cand.size > 1:
                pos = {int(w): i for i, w in enumerate(cand)}
                rows, cols = [], []
                for perm in gens:
                    img = _apply_perm(perm[:n], cand, n)
                    # reduce images to coset representatives as well
                    img = np.min(img[:, None] ^ words[None, :], axis=1)
                    rows.append(np.arange(cand.size))
                    cols.append(np.array([pos[int(x)] for x in img]))
                adj = coo_matrix((np.ones(sum(r.size for r in rows)),
                                  (np.concatenate(rows), np.concatenate(cols))),
                                 shape=(cand.size, cand.size))
                _, labels = connected_components(adj, directed=True, connection="weak")
                _, first = np.unique(labels, return_index=True)
                cand = cand[np.sort(first)]
            for w in cand.tolist():
                new = BinaryCode.from_words(n, code.rows + (w,))
                key = canonical_key(new)
                if key not in found:
                    found[key] = new
            if time_limit is not None and time.monotonic() - start > time_limit:
                raise TimeoutError("code search exceeded its time limit")
        levels[k] = list(found.values())
        if not found:
            break
    counter = [c for k, cs in levels.items() if k >= 5 for c in cs if not c.contains_all_ones()]
    return {
        "length": n,
        "classes_per_dim": {k: len(v) for k, v in levels.items()},
        "codes": {k: v for k, v in levels.items()},
        "counterexamples": counter,
        "seconds": time.monotonic() - start,
    }


def reed_muller_1_4() -> BinaryCode:
    """First-order Reed-Muller code of length 16."""
    rows = [(1 << 16) - 1]
    for j in range(4):
        rows.append(sum(1 << x for x in range(16) if x >> j & 1))
    return BinaryCode.from_words(16, rows)


def glue_code(r, generators) -> BinaryCode:
    """Binary code of a glue subgroup of kA1 (class 1 in slot i sets bit i)."""
    r = parse_dynkin(r)
    if not r.is_kA1():
        raise NotElementaryHost(f"{r} is not of the form kA1")
    words = [sum(1 << i for i, x in enumerate(g) if x % 2) for g in generators]
    return BinaryCode.from_words(r.rank, words)


def kummer_check(ov) -> bool:
    """Whether the glue code of an overlattice of 16A1 contains the all-ones word."""
    return glue_code(ov.R, ov.generators).contains_all_ones()
