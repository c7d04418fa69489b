"""Exact integer matrix routines: Hermite and Smith forms, kernels mod N.

Matrices are plain lists of lists of Python ints; everything here is small
(at most a few dozen rows), so clarity beats vectorisation.
"""

from fractions import Fraction


def hnf(rows, ncols):
    """Row-style Hermite normal form.

    Returns ``(basis, pivots)`` where ``basis`` spans the same Z-module as
    ``rows`` and is in echelon form with positive pivots at columns ``pivots``;
    entries above each pivot are reduced into ``[0, pivot)``.
    """
    work = [list(r) for r in rows if any(r)]
    basis, pivots = [], []
    for c in range(ncols):
        active = [r for r in work if r[c] != 0]
        if not active:
            continue
        rest = [r for r in work if r[c] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[c]))
            p = active[0]
            nxt = [p]
            for r in active[1:]:
                f = r[c] // p[c]
                r = [a - f * b for a, b in zip(r, p)]
                if r[c] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        p = active[0]
        if p[c] < 0:
            p = [-a for a in p]
        basis.append(p)
        pivots.append(c)
        work = rest
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            c = pivots[j]
            f = basis[i][c] // basis[j][c]
            if f:
                basis[i] = [a - f * b for a, b in zip(basis[i], basis[j])]
    return basis, pivots


def smith_cols(mat):
    """Smith form of ``mat`` tracking only the inverse column transform.

    Returns ``(diag, vinv)`` with ``U * mat * V = diag`` for some unimodular
    ``U`` and ``V = vinv^-1``. The rows of ``vinv`` are the basis in which the
    row span of ``mat`` becomes ``sum d_i * w_i``.
    """
    a = [list(r) for r in mat]
    n = len(a)
    m = len(a[0]) if n else 0
    vinv = [[int(i == j) for j in range(m)] for i in range(m)]
    diag = []
    for t in range(min(n, m)):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, m):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return diag + [0] * (min(n, m) - t), vinv
            i, j = best
            a[t], a[i] = a[i], a[t]
            if j != t:
                for row in a:
                    row[t], row[j] = row[j], row[t]
                vinv[t], vinv[j] = vinv[j], vinv[t]
            piv = a[t][t]
            clean = True
            for i in range(t + 1, n):
                f = a[i][t] // piv
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    clean = False
            for j in range(t + 1, m):
                f = a[t][j] // piv
                if f:
                    for row in a:
                        row[j] -= f * row[t]
                    vinv[t] = [x + f * y for x, y in zip(vinv[t], vinv[j])]
                if a[t][j]:
                    clean = False
            if not clean:
                continue
            bad = next((i for i in range(t + 1, n)
                        for j in range(t + 1, m) if a[i][j] % piv), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
    return diag, vinv


def solve_echelon(basis, pivots, row):
    """Integer coefficients ``x`` with ``x * basis == row`` (must exist)."""
    row = list(row)
    coeffs = []
    for b, c in zip(basis, pivots):
        f, r = divmod(row[c], b[c])
        if r:
            raise ValueError("vector not in lattice")
        coeffs.append(f)
        if f:
            row = [x - f * y for x, y in zip(row, b)]
    if any(row):
        raise ValueError("vector not in lattice")
    return coeffs


def quotient_basis(num_rows, den_rows, ncols):
    """Cyclic decomposition of ``span(num_rows) / span(den_rows)``.

    Both spans must be full rank with ``den`` contained in ``num``. Returns a
    list of ``(vector, order)`` with order > 1, invariant-factor style.
    """
    basis, pivots = hnf(num_rows, ncols)
    if len(basis) != ncols:
        raise ValueError("numerator lattice is not of full rank")
    den, _ = hnf(den_rows, ncols)
    t = [solve_echelon(basis, pivots, r) for r in den]
    diag, vinv = smith_cols(t)
    out = []
    for d, w in zip(diag, vinv):
        if d == 1:
            continue
        if d == 0:
            raise ValueError("quotient is infinite")
        vec = [sum(w[i] * basis[i][c] for i in range(ncols)) for c in range(ncols)]
        out.append((vec, d))
    return out


def kernel_mod(cmat, modulus, k):
    """Basis of ``{x in Z^k : x * cmat == 0 mod modulus}`` (cmat is k x g)."""
    g = len(cmat[0]) if cmat else 0
    if g == 0:
        return [[int(i == j) for j in range(k)] for i in range(k)]
    rows = [list(cmat[i]) + [int(i == j) for j in range(k)] for i in range(k)]
    rows += [[modulus * int(i == j) for j in range(g)] + [0] * k for i in range(g)]
    basis, pivots = hnf(rows, g + k)
    return [b[g:] for b, c in zip(basis, pivots) if c >= g]


def det(mat):
    """Exact determinant via fraction-free Bareiss elimination."""
    a = [list(r) for r in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse(mat):
    """Inverse over Q as a matrix of Fractions."""
    n = len(mat)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(mat)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[p] = a[p], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]
