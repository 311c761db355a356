"""Exact integer and rational matrix helpers.

All routines work on lists/tuples of Python ints (or Fractions where noted);
nothing here ever touches floating point.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def copy_matrix(m) -> Matrix:
    return [list(row) for row in m]


def transpose(m) -> Matrix:
    return [list(col) for col in zip(*m)]


def mat_mul(a, b) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    bt = list(zip(*b))
    return [[sum(a[i][t] * bt[j][t] for t in range(k)) for j in range(m)] for i in range(n)]


def mat_vec(a, v):
    return [sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def congruent(u, g) -> Matrix:
    """U * G * U^T for integer matrices."""
    return mat_mul(mat_mul(u, g), transpose(u))


def det_bareiss(m) -> int:
    """Exact determinant via fraction-free Gaussian elimination."""
    a = copy_matrix(m)
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def mat_inverse(m) -> list[list[Fraction]]:
    """Exact inverse with Fraction entries."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(i == j) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def hnf_row(m) -> Matrix:
    """Row-style Hermite normal form (lower-left zeros) of a full-rank
    integer matrix; rows span the same lattice as the input rows."""
    a = [list(row) for row in m]
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if a[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        # clear column c below row r by exact gcd steps
        for i in range(r + 1, rows):
            while a[i][c] != 0:
                q = a[r][c] // a[i][c]
                a[r] = [x - q * y for x, y in zip(a[r], a[i])]
                a[r], a[i] = a[i], a[r]
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return [row for row in a if any(row)]


def lattice_basis_from_generators(gens, n: int) -> Matrix:
    """Basis (as rows) of the sublattice of Z^n spanned by the given
    generator rows.  Raises if the span has rank < n."""
    basis = hnf_row(gens)
    if len(basis) != n:
        raise ValueError("generators do not span a full-rank lattice")
    return basis


def kernel_mod_p(m, p: int) -> list[list[int]]:
    """Basis of the kernel of the matrix over F_p (row vectors x with
    x*M = 0 mod p)."""
    a = [[x % p for x in row] for row in m]
    rows, cols = len(a), len(a[0])
    # row reduce [A | I]
    aug = [a[i] + [1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    r = 0
    pivots = []
    for c in range(cols):
        piv = next((i for i in range(r, rows) if aug[i][c] % p != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [(x * inv) % p for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] % p != 0:
                f = aug[i][c]
                aug[i] = [(x - f * y) % p for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    return [row[cols:] for row in aug[r:]]


def rref_mod_p(rows_in, p: int) -> list[list[int]]:
    """Reduced row echelon form over F_p; returns the nonzero rows."""
    a = [[x % p for x in row] for row in rows_in]
    if not a:
        return []
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return [row for row in a[:r]]


def gram_fractions(g) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in g]


def lll_reduce_gram(g, delta: Fraction = Fraction(3, 4)):
    """LLL reduction of a Gram matrix: (g', u) with g' = u * g * u^T.

    The reduction transform is found in floating point and applied exactly,
    so the result is always a correct unimodular change of basis; float
    round-off can only affect how small the entries get.
    """
    n = len(g)
    gg = copy_matrix(g)
    u = identity(n)
    for _ in range(8):
        ur = _lll_transform_float(gg, float(delta))
        if ur is None or ur == identity(n):
            break
        new_g = congruent(ur, gg)
        if max(abs(x) for row in new_g for x in row) >= max(abs(x) for row in gg for x in row):
            break
        gg = new_g
        u = mat_mul(ur, u)
    return gg, u


def _lll_transform_float(g, delta: float):
    """Integer transform that LLL-reduces the float Cholesky basis of g."""
    n = len(g)
    a = [[float(x) for x in row] for row in g]
    # Cholesky: rows of b are basis vectors
    b = [[0.0] * n for _ in range(n)]
    for i in range(n):
        s = a[i][i] - sum(b[i][k] * b[i][k] for k in range(i))
        if s <= 0:
            return None
        b[i][i] = s**0.5
        for j in range(i + 1, n):
            b[j][i] = (a[j][i] - sum(b[j][k] * b[i][k] for k in range(i))) / b[i][i]
    basis = [row[:] for row in b]
    ur = identity(n)

    def gs():
        star = [row[:] for row in basis]
        mu = [[0.0] * n for _ in range(n)]
        norms = [0.0] * n
        for i in range(n):
            for j in range(i):
                mu[i][j] = sum(basis[i][k] * star[j][k] for k in range(n)) / norms[j]
                for k in range(n):
                    star[i][k] -= mu[i][j] * star[j][k]
            norms[i] = sum(x * x for x in star[i])
            if norms[i] <= 0:
                return None, None
        return mu, norms

    res = gs()
    if res[0] is None:
        return None
    mu, norms = res
    k = 1
    steps = 0
    while k < n and steps < 10000:
        steps += 1
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                for c in range(n):
                    basis[k][c] -= q * basis[j][c]
                    ur[k][c] -= q * ur[j][c]
                res = gs()
                if res[0] is None:
                    return ur
                mu, norms = res
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            ur[k], ur[k - 1] = ur[k - 1], ur[k]
            res = gs()
            if res[0] is None:
                return ur
            mu, norms = res
            k = max(k - 1, 1)
    return ur


def lll_reduce_gram_exact(g, delta: Fraction = Fraction(3, 4)):
    """Exact-arithmetic LLL on a Gram matrix (slow; kept as a reference)."""
    n = len(g)
    u = identity(n)
    gg = copy_matrix(g)

    def inner(i, j):
        return Fraction(gg[i][j])

    # Gram-Schmidt norms B[i] and coefficients mu[i][j], recomputed lazily
    def gram_schmidt():
        B = [Fraction(0)] * n
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            B[i] = inner(i, i)
            for j in range(i):
                num = inner(i, j) - sum(mu[i][t] * mu[j][t] * B[t] for t in range(j))
                mu[i][j] = num / B[j]
                B[i] -= mu[i][j] ** 2 * B[j]
        return B, mu

    def size_reduce(i, j, mu):
        if abs(mu[i][j]) > Fraction(1, 2):
            q = int((mu[i][j] + Fraction(1, 2)).__floor__())
            for c in range(n):
                u[i][c] -= q * u[j][c]
            # b_i <- b_i - q b_j: row op then matching column op
            for c in range(n):
                gg[i][c] -= q * gg[j][c]
            for r in range(n):
                gg[r][i] -= q * gg[r][j]
            return True
        return False

    k = 1
    B, mu = gram_schmidt()
    guard = 0
    while k < n:
        guard += 1
        if guard > 20000:
            break  # safety net; partial reduction is still sound
        changed = False
        for j in range(k - 1, -1, -1):
            changed |= size_reduce(k, j, mu)
        if changed:
            B, mu = gram_schmidt()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            u[k], u[k - 1] = u[k - 1], u[k]
            gg[k], gg[k - 1] = gg[k - 1], gg[k]
            for row in gg:
                row[k], row[k - 1] = row[k - 1], row[k]
            B, mu = gram_schmidt()
            k = max(k - 1, 1)
    return gg, u


def random_unimodular(n: int, rng: random.Random, steps: int = 30) -> Matrix:
    """Random unimodular integer matrix built from elementary operations."""
    u = identity(n)
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        c = rng.choice((-2, -1, 1, 2))
        for col in range(n):
            u[i][col] += c * u[j][col]
    if rng.random() < 0.5:
        i, j = rng.randrange(n), rng.randrange(n)
        u[i], u[j] = u[j], u[i]
        if i != j:
            u[0] = [-x for x in u[0]]
    return u


def content(m) -> int:
    """gcd of all entries."""
    g = 0
    for row in m:
        for x in row:
            g = gcd(g, x)
    return g


def smith_normal_form_with_transform(m):
    """Smith normal form D = S * M * T with exact integer transforms.

    Returns (divisors, S, T) where divisors are the diagonal entries.
    """
    from sympy import Matrix as SymMatrix
    from sympy.matrices.normalforms import smith_normal_decomp
    from sympy.polys.domains import ZZ

    sm = SymMatrix(m)
    d, s, t = smith_normal_decomp(sm, domain=ZZ)
    dd = [[int(x) for x in row] for row in d.tolist()]
    divisors = [dd[i][i] for i in range(min(len(dd), len(dd[0])))]
    ss = [[int(x) for x in row] for row in s.tolist()]
    tt = [[int(x) for x in row] for row in t.tolist()]
    return divisors, ss, tt
