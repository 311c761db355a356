"""p-adic Jordan splitting of integral lattices, including p = 2.

The decomposition is computed by exact rational pivoting: denominators that
appear are always prime to p, so p-adic valuations are read off numerators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import jacobi_symbol

from .lattice import GramLattice


def _valuation(x: Fraction, p: int) -> int:
    if x == 0:
        return 10**9
    num = abs(x.numerator)
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    # denominators stay prime to p during the reduction
    return v


def _unit_part(x: Fraction, p: int, v: int) -> Fraction:
    return x / Fraction(p**v)


def _mod8(x: Fraction) -> int:
    num, den = x.numerator, x.denominator
    return num * pow(den, -1, 8) % 8


@dataclass(frozen=True)
class JordanBlock:
    """One p^scale-modular constituent."""

    scale: int
    rank: int
    det_class: int  # odd p: Legendre symbol +-1 of the unit determinant; p=2: unit det mod 8
    odd: bool = False  # p=2 only: True if the constituent is odd (type I)
    oddity: int = 0  # p=2, type I only: trace of a diagonalization mod 8


@dataclass(frozen=True)
class JordanDecomposition:
    p: int
    n: int
    blocks: tuple[JordanBlock, ...]  # strictly increasing scales, nonzero ranks

    def rank_at(self, scale: int) -> int:
        for b in self.blocks:
            if b.scale == scale:
                return b.rank
        return 0

    def block_at(self, scale: int) -> JordanBlock | None:
        for b in self.blocks:
            if b.scale == scale:
                return b
        return None

    @property
    def min_scale(self) -> int:
        return self.blocks[0].scale

    @property
    def max_scale(self) -> int:
        return self.blocks[-1].scale

    @property
    def length(self) -> int:
        return self.max_scale - self.min_scale + 1

    def valuation_of_det(self) -> int:
        return sum(b.scale * b.rank for b in self.blocks)


def jordan_decompose(lat: GramLattice, p: int) -> JordanDecomposition:
    """Split the p-adic completion into p^i-modular constituents.

    For odd p every constituent is diagonalized; for p = 2 the pivoting
    prefers odd diagonal entries of minimal valuation and otherwise splits
    off a 2x2 block with off-diagonal entry of minimal valuation.
    """
    if not isprime(p):
        raise ValueError("p must be prime")
    n = lat.n
    g = [[Fraction(x) for x in row] for row in lat.gram]
    active = list(range(n))
    ones: list[tuple[int, Fraction]] = []  # (scale, unit)
    twos: list[tuple[int, Fraction]] = []  # (scale, unit determinant) for 2x2 even blocks

    while active:
        vmin = min(_valuation(g[i][j], p) for i in active for j in active)
        # prefer a diagonal pivot of minimal valuation
        diag = next((i for i in active if _valuation(g[i][i], p) == vmin), None)
        if diag is None and p != 2:
            # make one: some off-diagonal entry achieves vmin
            i, j = next(
                (i, j) for i in active for j in active if i != j and _valuation(g[i][j], p) == vmin
            )
            for k in range(n):
                g[i][k] += g[j][k]
            for k in range(n):
                g[k][i] += g[k][j]
            diag = i
        if diag is not None:
            i = diag
            pivot = g[i][i]
            for j in active:
                if j == i:
                    continue
                f = g[i][j] / pivot
                if f:
                    for k in range(n):
                        g[j][k] -= f * g[i][k]
                    for k in range(n):
                        g[k][j] -= f * g[k][i]
            ones.append((vmin, _unit_part(pivot, p, vmin)))
            active.remove(i)
            continue
        # p = 2, no odd-ish diagonal at minimal valuation: 2x2 even pivot
        i, j = next(
            (i, j) for i in active for j in active if i != j and _valuation(g[i][j], p) == vmin
        )
        a, b, c = g[i][i], g[i][j], g[j][j]
        det2 = a * c - b * b
        for k in active:
            if k in (i, j):
                continue
            # solve [a b; b c] (x, y)^T = (g[i][k], g[j][k])^T
            x = (c * g[i][k] - b * g[j][k]) / det2
            y = (a * g[j][k] - b * g[i][k]) / det2
            if x or y:
                for t in range(n):
                    g[k][t] -= x * g[i][t] + y * g[j][t]
                for t in range(n):
                    g[t][k] -= x * g[t][i] + y * g[t][j]
        twos.append((vmin, _unit_part(det2, p, 2 * vmin)))
        active.remove(i)
        active.remove(j)

    by_scale: dict[int, dict] = {}
    for v, unit in ones:
        d = by_scale.setdefault(v, {"rank": 0, "det": Fraction(1), "odd": False, "trace": Fraction(0)})
        d["rank"] += 1
        d["det"] *= unit
        d["odd"] = True
        d["trace"] += unit
    for v, unit_det in twos:
        d = by_scale.setdefault(v, {"rank": 0, "det": Fraction(1), "odd": False, "trace": Fraction(0)})
        d["rank"] += 2
        d["det"] *= unit_det

    blocks = []
    for scale in sorted(by_scale):
        d = by_scale[scale]
        if p == 2:
            det_class = _mod8(d["det"])
            oddity = _mod8(d["trace"]) if d["odd"] else 0
            blocks.append(JordanBlock(scale, d["rank"], det_class, d["odd"], oddity))
        else:
            leg = jacobi_symbol(d["det"].numerator * d["det"].denominator, p)
            blocks.append(JordanBlock(scale, d["rank"], leg))
    return JordanDecomposition(p, n, tuple(blocks))


def len_p(lat: GramLattice, p: int) -> int:
    return jordan_decompose(lat, p).length


def is_padically_squarefree(lat: GramLattice, p: int) -> bool:
    """exp(L^#/L) is not divisible by p^2, i.e. all Jordan scales are <= 1."""
    return jordan_decompose(lat, p).max_scale <= 1


def is_squarefree(lat: GramLattice) -> bool:
    return all(is_padically_squarefree(lat, p) for p in factorint(lat.det))


def is_strongly_primitive(lat: GramLattice) -> bool:
    if not lat.is_primitive():
        return False
    for p in factorint(2 * lat.det):
        dec = jordan_decompose(lat, p)
        if dec.max_scale > 1:
            return False
        if dec.rank_at(0) < dec.rank_at(1):
            return False
    return True
