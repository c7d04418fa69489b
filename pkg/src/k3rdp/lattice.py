"""Short-vector enumeration in positive definite lattices (Fincke-Pohst)."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def _completion(gram):
    """Coefficients q_ii, q_ij with x G x^T = sum_i q_ii (x_i + sum_j>i q_ij x_j)^2."""
    a = np.array(gram, dtype=float)
    n = len(a)
    q = a.copy()
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def short_vectors(gram, bound, shift=None):
    """Integer vectors v with (v + shift) G (v + shift)^T <= bound.

    ``gram`` must be positive definite. The zero vector is included when it
    qualifies. Exact norms are recomputed with Fractions so the float
    enumeration only has to be slightly generous.
    """
    n = len(gram)
    if n == 0:
        return [()]
    q = _completion(gram)
    c = [float(s) for s in shift] if shift is not None else [0.0] * n
    eps = 1e-7 * max(1.0, float(bound))
    out = []
    x = [0] * n

    def rec(i, remaining):
        centre = -c[i] - sum(q[i][j] * (x[j] + c[j]) for j in range(i + 1, n))
        qi = q[i][i]
        r = math.sqrt(max(remaining, 0.0) / qi) if remaining > 0 else 0.0
        lo, hi = math.ceil(centre - r - 1e-9), math.floor(centre + r + 1e-9)
        for v in range(lo, hi + 1):
            x[i] = v
            t = v + c[i] + sum(q[i][j] * (x[j] + c[j]) for j in range(i + 1, n))
            rem = remaining - qi * t * t
            if rem < -eps:
                continue
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, rem)
        x[i] = 0

    rec(n - 1, float(bound) + eps)
    sh = [Fraction(s) for s in shift] if shift is not None else [Fraction(0)] * n
    bound = Fraction(bound)
    exact = []
    for v in out:
        y = [v[i] + sh[i] for i in range(n)]
        if norm(gram, y) <= bound:
            exact.append(v)
    return exact


def norm(gram, y):
    n = len(gram)
    return sum(y[i] * gram[i][j] * y[j] for i in range(n) for j in range(n) if y[i] and y[j])


def coset_minimum(gram, shift):
    """Minimal norm over the coset shift + Z^n of a positive definite lattice."""
    n = len(gram)
    y0 = [Fraction(s) - round(Fraction(s)) for s in shift]
    bound = norm(gram, y0)
    if bound == 0:
        return Fraction(0)
    vecs = short_vectors(gram, bound, y0)
    return min(norm(gram, [v[i] + y0[i] for i in range(n)]) for v in vecs)


def has_vector_below(gram, bound, shift, strict=True):
    """Whether the coset shift + Z^n contains a vector of norm < bound (<= if not strict)."""
    n = len(gram)
    q = _completion(gram)
    c = [float(s) for s in shift]
    sh = [Fraction(s) for s in shift]
    bound = Fraction(bound)
    x = [0] * n

    def rec(i, remaining):
        centre = -c[i] - sum(q[i][j] * (x[j] + c[j]) for j in range(i + 1, n))
        qi = q[i][i]
        r = math.sqrt(max(remaining, 0.0) / qi)
        for v in range(math.ceil(centre - r - 1e-9), math.floor(centre + r + 1e-9) + 1):
            x[i] = v
            t = v + c[i] + sum(q[i][j] * (x[j] + c[j]) for j in range(i + 1, n))
            rem = remaining - qi * t * t
            if rem < -1e-7:
                continue
            if i == 0:
                nv = norm(gram, [x[k] + sh[k] for k in range(n)])
                if nv < bound or (not strict and nv == bound):
                    return True
            elif rec(i - 1, rem):
                return True
        x[i] = 0
        return False

    return rec(n - 1, float(bound) + 1e-7)
