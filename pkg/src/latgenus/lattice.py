"""Positive definite integral lattices given by exact Gram matrices.

A lattice is represented basis-free by its Gram matrix; sublattices and
over-lattices are materialized through exact integer transformation
matrices.  Everything is exact, no floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from sympy import isprime

from .matrixops import (
    content,
    det_bareiss,
    hnf_row,
    lattice_basis_from_generators,
    lll_reduce_gram,
    mat_inverse,
    mat_mul,
    smith_normal_form_with_transform,
    transpose,
)

Gram = tuple[tuple[int, ...], ...]


def _freeze(m) -> Gram:
    return tuple(tuple(int(x) for x in row) for row in m)


@dataclass(frozen=True)
class GramLattice:
    """Integral lattice described by a symmetric positive definite Gram matrix."""

    gram: Gram

    def __post_init__(self):
        g = self.gram
        n = len(g)
        if any(len(row) != n for row in g):
            raise ValueError("gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(i)):
            raise ValueError("gram matrix must be symmetric")

    @staticmethod
    def from_rows(rows) -> "GramLattice":
        return GramLattice(_freeze(rows))

    @staticmethod
    def diagonal(entries) -> "GramLattice":
        n = len(entries)
        return GramLattice.from_rows(
            [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def identity(n: int) -> "GramLattice":
        return GramLattice.diagonal([1] * n)

    @property
    def n(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        d = det_bareiss(self.gram)
        if d <= 0:
            raise ValueError("lattice is not positive definite")
        return d

    def check_positive_definite(self) -> bool:
        g = [list(r) for r in self.gram]
        for k in range(1, self.n + 1):
            if det_bareiss([row[:k] for row in g[:k]]) <= 0:
                return False
        return True

    def discriminant(self) -> int:
        s = (self.n + 1) // 2
        return (-1) ** s * self.det

    def is_primitive(self) -> bool:
        return content(self.gram) == 1

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.n))

    def scaled(self, a: int) -> "GramLattice":
        return GramLattice.from_rows([[a * x for x in row] for row in self.gram])

    def transformed(self, u) -> "GramLattice":
        """Gram of the sublattice (or rebasis) with row transformation u."""
        return GramLattice.from_rows(mat_mul(mat_mul(u, [list(r) for r in self.gram]), transpose(u)))

    def reduced(self) -> "GramLattice":
        """LLL-reduce; same isometry class, smaller entries."""
        g, _ = lll_reduce_gram([list(r) for r in self.gram])
        return GramLattice.from_rows(g)

    # -- duality ----------------------------------------------------------

    def dual_gram(self) -> list[list[Fraction]]:
        """Gram matrix of the dual lattice in the dual basis (= gram^{-1})."""
        return mat_inverse([list(r) for r in self.gram])

    @cached_property
    def discriminant_group(self):
        """Smith data of gram: (divisors d_1 | ... | d_n, S) where the dual
        is generated over the lattice by rows S_i / d_i in lattice coordinates."""
        divisors, s, _t = smith_normal_form_with_transform([list(r) for r in self.gram])
        return divisors, s

    def norm_of(self, x) -> Fraction:
        """beta(x, x) for a rational coordinate row vector x."""
        g = self.gram
        n = self.n
        return sum(Fraction(x[i]) * Fraction(x[j]) * g[i][j] for i in range(n) for j in range(n))

    # -- rescaling --------------------------------------------------------


def rescale_primitive_rows(rows) -> tuple[GramLattice, Fraction]:
    """Unique positive rational multiple of the given symmetric matrix that is
    integral and primitive.  Returns (lattice, factor applied)."""
    denom = 1
    for row in rows:
        for x in row:
            denom = denom * Fraction(x).denominator // gcd(denom, Fraction(x).denominator)
    scaled = [[int(Fraction(x) * denom) for x in row] for row in rows]
    c = content(scaled)
    if c == 0:
        raise ValueError("zero matrix cannot be rescaled")
    factor = Fraction(denom, c)
    return GramLattice.from_rows([[x // c for x in row] for row in scaled]), factor


def rescale_primitive(lat_or_rows) -> GramLattice:
    rows = lat_or_rows.gram if isinstance(lat_or_rows, GramLattice) else lat_or_rows
    return rescale_primitive_rows(rows)[0]


# -- sublattices and over-lattices ---------------------------------------


def sublattice_from_fp_subspace(lat: GramLattice, p: int, gens) -> GramLattice:
    """Sublattice {x in L : x mod p in span(gens)} + pL with exact basis.

    gens are coordinate rows mod p; the resulting index is p^(n - dim span).
    """
    n = lat.n
    for row in gens:
        if len(row) != n:
            raise ValueError("subspace generator has wrong length")
    stack = [[p if i == j else 0 for j in range(n)] for i in range(n)]
    stack += [[int(x) % p for x in row] for row in gens]
    basis = lattice_basis_from_generators(stack, n)
    return lat.transformed(basis)


def overlattice_with_dual_vector(lat: GramLattice, coeffs, denom: int) -> GramLattice:
    """Over-lattice L + Z*(coeffs/denom) where coeffs is an integer coordinate
    row with (coeffs/denom) in L^#."""
    n = lat.n
    gens = [[denom if i == j else 0 for j in range(n)] for i in range(n)]
    gens.append([int(c) for c in coeffs])
    basis = lattice_basis_from_generators(gens, n)
    g = mat_mul(mat_mul(basis, [list(r) for r in lat.gram]), transpose(basis))
    d2 = denom * denom
    out = []
    for row in g:
        new = []
        for x in row:
            if x % d2:
                raise ValueError("vector does not define an integral over-lattice")
            new.append(x // d2)
        out.append(new)
    return GramLattice.from_rows(out)


def _p_torsion_generators(lat: GramLattice, p: int):
    """Rows c such that c/p generate the p-torsion of L^#/L."""
    divisors, s = lat.discriminant_group
    gens = []
    for d, row in zip(divisors, s):
        if d % p == 0:
            # row/d has order d in L^#/L, so (d/p)*(row/d) = row/p has order p
            gens.append([x % p for x in row])
    return gens


def _projective_points(p: int, k: int):
    """Representatives of P^{k-1}(F_p)."""
    point = [0] * k
    for lead in range(k):
        point = [0] * k
        point[lead] = 1
        tail = k - lead - 1
        for idx in range(p**tail):
            rest = []
            t = idx
            for _ in range(tail):
                rest.append(t % p)
                t //= p
            yield point[: lead + 1] + rest


def _enlargement_vector(lat: GramLattice, p: int, norm_modulus: int):
    """A coordinate row c (with c/p in L^# of order p) whose norm is in
    (norm_modulus)*Z, or None.  norm_modulus is 1 for integral maximality
    and 2 for even maximality."""
    gens = _p_torsion_generators(lat, p)
    k = len(gens)
    if k == 0:
        return None
    g = [list(r) for r in lat.gram]
    a = mat_mul(mat_mul(gens, g), transpose(gens))
    mod = norm_modulus * p * p
    for c in _projective_points(p, k):
        val = 0
        for i in range(k):
            if c[i]:
                for j in range(k):
                    if c[j]:
                        val += c[i] * c[j] * a[i][j]
        if val % mod == 0:
            return [sum(c[i] * gens[i][j] for i in range(k)) for j in range(lat.n)]
    return None


def _maximality_primes(det: int):
    from sympy import factorint

    return [p for p, e in factorint(det).items() if e >= 2]


def is_maximal(lat: GramLattice) -> bool:
    """True iff no proper integral over-lattice exists."""
    for p in _maximality_primes(lat.det):
        if _enlargement_vector(lat, p, 1) is not None:
            return False
    return True


def maximal_integral_overlattice(lat: GramLattice) -> GramLattice:
    """Saturate with index-p integral enlargements until maximal."""
    cur = lat
    while True:
        for p in _maximality_primes(cur.det):
            c = _enlargement_vector(cur, p, 1)
            if c is not None:
                cur = overlattice_with_dual_vector(cur, c, p).reduced()
                break
        else:
            return cur


def is_even_maximal(lat: GramLattice) -> bool:
    """No over-lattice all of whose norms are even (lat must be even)."""
    for p in _maximality_primes(lat.det):
        if _enlargement_vector(lat, p, 2) is not None:
            return False
    return True


def even_maximal_overlattice(lat: GramLattice) -> GramLattice:
    """Saturate with enlargements keeping all norms even."""
    cur = lat
    while True:
        primes = _maximality_primes(cur.det)
        for p in primes:
            c = _enlargement_vector(cur, p, 2)
            if c is not None:
                cur = overlattice_with_dual_vector(cur, c, p).reduced()
                break
        else:
            return cur


def is_qf_maximal(lat: GramLattice) -> bool:
    """Quadratic-form maximality: even lattices must be even-maximal, odd
    lattices must have even-maximal double."""
    if lat.is_even():
        return is_even_maximal(lat)
    return is_even_maximal(lat.scaled(2))


def partial_dual(lat: GramLattice, p: int) -> GramLattice:
    """Primitive rescale of <L, p-part of L^#/L>."""
    if not isprime(p):
        raise ValueError("p must be prime")
    divisors, s = lat.discriminant_group
    n = lat.n
    vmax = 0
    gens = []
    for d, row in zip(divisors, s):
        v = 0
        dd = d
        while dd % p == 0:
            dd //= p
            v += 1
        vmax = max(vmax, v)
        if v:
            # Sylow p-part of the class row/d is generated by row/p^v
            gens.append((v, row))
    if vmax == 0:
        return rescale_primitive(lat)
    big = p**vmax
    rows = [[big if i == j else 0 for j in range(n)] for i in range(n)]
    for v, row in gens:
        rows.append([x * big // p**v for x in row])
    basis = lattice_basis_from_generators(rows, n)
    g = mat_mul(mat_mul(basis, [list(r) for r in lat.gram]), transpose(basis))
    frac = [[Fraction(x, big * big) for x in row] for row in g]
    return rescale_primitive(frac).reduced()


# -- file format ----------------------------------------------------------


def gram_to_text(lat: GramLattice) -> str:
    lines = [str(lat.n)]
    for row in lat.gram:
        lines.append(" ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def gram_from_text(text: str) -> GramLattice:
    parts = text.split()
    if not parts:
        raise ValueError("empty gram file")
    n = int(parts[0])
    vals = [int(x) for x in parts[1:]]
    if len(vals) != n * n:
        raise ValueError(f"expected {n*n} entries, got {len(vals)}")
    rows = [vals[i * n : (i + 1) * n] for i in range(n)]
    return GramLattice.from_rows(rows)
