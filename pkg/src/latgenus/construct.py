"""Building an explicit lattice with a prescribed square-free genus symbol.

Route: realize the rational quadratic space from its invariants by a diagonal
form, pass to the norm-maximal lattice (computed as an even-maximal lattice of
the doubled form, whose genus depends only on the space), then walk down to
the requested local symbols through random bounded-index sublattices.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import replace
from fractions import Fraction
from functools import cache
from math import prod

from sympy import factorint, isprime, nextprime

from .lattice import (
    GramLattice,
    even_maximal_overlattice,
    rescale_primitive,
    sublattice_from_fp_subspace,
)
from .jordan import jordan_decompose
from .symbol import (
    Constituent,
    GenusSymbol,
    assemble_symbol,
    canonical_key_part_2,
    is_valid_genus_symbol,
    scale_symbol_part_by_unit,
    symbol_from_lattice,
    trace_set,
)
from sympy.functions.combinatorial.numbers import jacobi_symbol


class ConstructionError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Hilbert symbols and rational space invariants


def _split(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """Hilbert symbol (a, b)_p for nonzero integers; p prime or -1 (reals)."""
    if a == 0 or b == 0:
        raise ValueError("arguments must be nonzero")
    if p == -1:
        return -1 if a < 0 and b < 0 else 1
    if p == 2:
        alpha, u = _split(a, 2)
        beta, v = _split(b, 2)
        eps_u, eps_v = (u - 1) // 2, (v - 1) // 2
        om_u, om_v = (u * u - 1) // 8, (v * v - 1) // 8
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    alpha, u = _split(a, p)
    beta, v = _split(b, p)
    res = 1
    if beta % 2:
        res *= int(jacobi_symbol(u, p))
    if alpha % 2:
        res *= int(jacobi_symbol(v, p))
    if alpha % 2 and beta % 2 and (p - 1) // 2 % 2:
        res = -res
    return res


def hasse_invariant(entries, p: int) -> int:
    """Hasse invariant of the diagonal form <a_1, ..., a_n> at p."""
    out = 1
    n = len(entries)
    for i in range(n):
        for j in range(i + 1, n):
            out *= hilbert_symbol(entries[i], entries[j], p)
    return out


@cache
def _smallest_nonresidue(p: int) -> int:
    u = 2
    while jacobi_symbol(u, p) != -1:
        u += 1
    return u


def _unit_multiset(rank: int, d8: int, t8: int) -> tuple[int, ...]:
    """Some diagonal units mod 8 realizing a type I constituent."""
    best = None

    def rec(prefix, d, t):
        nonlocal best
        if best is not None:
            return
        if len(prefix) == rank:
            if d == d8 % 8 and t == t8 % 8:
                best = tuple(prefix)
            return
        for u in (1, 3, 5, 7):
            rec(prefix + [u], d * u % 8, (t + u) % 8)

    rec([], 1, 0)
    if best is None:
        raise ValueError("unrealizable constituent")
    return best


def diagonal_model(p: int, cs) -> list[int]:
    """Integer diagonal entries of a Q_p-form with the given local symbol."""
    out = []
    for c in cs:
        if p == 2:
            if c.odd:
                out.extend(u * 2**c.scale for u in _unit_multiset(c.rank, c.det_class, c.oddity))
            else:
                base = 2 ** (c.scale + 1)
                m = c.rank // 2
                for k in range(m):
                    last = k == m - 1
                    v_block = c.det_class % 8 in (3, 5) if last else False
                    if v_block:
                        out.extend([base, 3 * base])
                    else:
                        out.extend([base, -base])
        else:
            units = [1] * (c.rank - 1)
            units.append(1 if c.det_class == 1 else _smallest_nonresidue(p))
            out.extend(u * p**c.scale for u in units)
    return out


def space_invariants(sym: GenusSymbol):
    """(dimension, square-free determinant class, primes with Hasse -1)."""
    if not is_valid_genus_symbol(sym):
        raise ValueError("invalid genus symbol")
    det = sym.det
    det_class = _squarefree_part(det)
    minus = set()
    for p in sorted({2} | set(factorint(det))):
        cs = sym.part(p)
        if p == 2 and not cs:
            cs = (Constituent(0, sym.n, det % 8, True, sym.n % 8),)
        if hasse_invariant(diagonal_model(p, cs), p) == -1:
            minus.add(p)
    return sym.n, det_class, frozenset(minus)


def _squarefree_part(m: int) -> int:
    out = 1
    for q, e in factorint(m).items():
        if e % 2:
            out *= q
    return out


# ---------------------------------------------------------------------------
# diagonal forms with prescribed invariants


def find_diagonal_form(n: int, det: int, hasse_minus: frozenset[int]) -> list[int]:
    """Positive diagonal entries with det class det and Hasse -1 exactly on
    the given primes.  Searches products of primes near the determinant."""
    target_class = _squarefree_part(det)
    if len(hasse_minus) % 2:
        raise ConstructionError("odd Hasse set cannot occur for a definite form")
    pool = sorted(set(factorint(2 * det)) | _extra_primes(det))
    products = _pool_products(tuple(pool))
    relevant = lambda entries: sorted(
        {2, *hasse_minus, *factorint(target_class), *(q for a in entries for q in factorint(a))}
    )
    for bound in range(len(products)):
        for combo in _combos(products[: bound + 1], n - 1, bound):
            last = _squarefree_part(target_class * prod(combo))
            entries = list(combo) + [last]
            primes = relevant(entries)
            if all((hasse_invariant(entries, p) == -1) == (p in hasse_minus) for p in primes):
                return entries
    raise ConstructionError("diagonal form search exhausted")


def _extra_primes(det: int) -> set[int]:
    out = set()
    p = 2
    while len(out) < 10:
        p = int(nextprime(p))
        if det % p:
            out.add(p)
    return out


@cache
def _pool_products(pool: tuple[int, ...]) -> list[int]:
    """Square-free products of at most 3 pool primes, ascending."""
    vals = {1}
    for a in pool:
        vals.add(a)
        for b in pool:
            if b > a:
                vals.add(a * b)
                for c in pool:
                    if c > b:
                        vals.add(a * b * c)
    return sorted(vals)[:160]


def _combos(values, k, bound):
    """Nondecreasing k-tuples from values with last element values[bound]."""
    if k == 0:
        yield ()
        return
    top = values[bound]
    for combo in _combos_upto(values[: bound + 1], k - 1):
        yield combo + (top,)


def _combos_upto(values, k):
    if k == 0:
        yield ()
        return
    for i, v in enumerate(values):
        for rest in _combos_upto(values[i:], k - 1):
            yield (v,) + rest


# ---------------------------------------------------------------------------
# descent to a prescribed local symbol


def part_key(p: int, cs) -> object:
    if p == 2:
        return canonical_key_part_2(cs)
    return tuple((c.scale, c.rank, c.det_class) for c in cs)


def local_part_of(lat: GramLattice, p: int):
    dec = jordan_decompose(lat, p)
    return tuple(Constituent(b.scale, b.rank, b.det_class, b.odd, b.oddity) for b in dec.blocks)


def _seeded_rng(*tokens) -> random.Random:
    h = hashlib.sha256("|".join(str(t) for t in tokens).encode()).digest()
    return random.Random(int.from_bytes(h[:8], "big"))


def _random_subspace(rng: random.Random, p: int, n: int, dim: int):
    from .matrixops import rref_mod_p

    while True:
        rows = [[rng.randrange(p) for _ in range(n)] for _ in range(dim)]
        rref = rref_mod_p(rows, p)
        if len(rref) == dim:
            return rref


def sample_subspace(lat: GramLattice, rng: random.Random, p: int, dim: int, mode: int):
    """One candidate subspace of L/pL: uniform, isotropic-guided, or built
    around the kernel of the Gram matrix mod p."""
    from .matrixops import kernel_mod_p, rref_mod_p

    n = lat.n
    if mode == 0:
        return _random_subspace(rng, p, n, dim)
    if mode == 1:
        return _random_isotropic_subspace(lat, rng, p, dim)
    kernel = kernel_mod_p([list(r) for r in lat.gram], p)
    if not kernel:
        return _random_subspace(rng, p, n, dim)
    if len(kernel) >= dim:
        # random subspace of the kernel
        for _ in range(20):
            rows = [[sum(rng.randrange(p) * kernel[i][j] for i in range(len(kernel))) % p
                     for j in range(n)] for _ in range(dim)]
            rref = rref_mod_p(rows, p)
            if len(rref) == dim:
                return rref
        return _random_subspace(rng, p, n, dim)
    # kernel plus isotropic-ish extension
    basis = [row[:] for row in kernel]
    extra = _random_isotropic_subspace(lat, rng, p, dim)
    rref = rref_mod_p(basis + extra, p)
    while len(rref) > dim:
        rref.pop()
    if len(rref) == dim:
        return rref
    return _random_subspace(rng, p, n, dim)


def _random_isotropic_subspace(lat: GramLattice, rng: random.Random, p: int, dim: int):
    """Subspace of L/pL on which the form vanishes mod p (and diagonally mod
    2p when p = 2), when one can be found; falls back to a partial basis
    padded with random vectors."""
    from .matrixops import rref_mod_p

    from .matrixops import kernel_mod_p, transpose

    n = lat.n
    g = [list(r) for r in lat.gram]
    basis: list[list[int]] = []
    diag_mod = 2 * p if p == 2 else p

    def norm_of(x):
        return sum(x[i] * g[i][j] * x[j] for i in range(n) for j in range(n))

    # pass 1 insists on zero norms (totally isotropic); pass 2 relaxes to
    # pairwise orthogonality, which yields rank-deficient restrictions.
    # Orthogonality is solved linearly; only the norm condition is sampled.
    for require_norm in (True, False):
        stalled = 0
        while len(basis) < dim and stalled < 40:
            if basis:
                pair_rows = [[sum(b[i] * g[i][j] for i in range(n)) % p for j in range(n)]
                             for b in basis]
                comp = kernel_mod_p(transpose(pair_rows), p)
            else:
                comp = [[1 if j == i else 0 for j in range(n)] for i in range(n)]
            if not comp:
                break
            x = [0] * n
            for row in comp:
                c = rng.randrange(p)
                if c:
                    x = [(a + c * b) % p for a, b in zip(x, row)]
            if not any(x):
                stalled += 1
                continue
            if require_norm and norm_of(x) % diag_mod:
                stalled += 1
                continue
            cand = rref_mod_p(basis + [x], p)
            if len(cand) == len(basis) + 1:
                basis = cand
                stalled = 0
            else:
                stalled += 1
    while len(basis) < dim:
        basis.append([rng.randrange(p) for _ in range(n)])
        basis = rref_mod_p(basis, p)
    while len(basis) > dim:
        basis.pop()
    return basis


def sublattice_with_local_symbol(lat: GramLattice, p: int, target, *,
                                 seed="", budget_factor: int = 60) -> GramLattice:
    """Find L' with e_p L <= L' <= L whose p-adic symbol matches target.

    Randomized subspace descent; one index-p^k step for odd p, up to two for
    p = 2.  Raises ConstructionError after exhausting the retry budget.
    """
    tkey = part_key(p, target)
    if part_key(p, local_part_of(lat, p)) == tkey:
        return lat
    n = lat.n
    v_now = jordan_decompose(lat, p).valuation_of_det()
    v_target = sum(c.scale * c.rank for c in target)
    delta = v_target - v_now
    if delta <= 0 or delta % 2:
        raise ConstructionError(f"target {p}-adic determinant unreachable by descent")
    k = delta // 2
    # split the codimension into one step (odd p) or up to two (p = 2)
    splits = [(k,)] if (p != 2 or k <= n) else []
    if p == 2:
        splits += [(k1, k - k1) for k1 in range(1, min(k, n) + 1) if 0 < k - k1 <= n]
    if not splits:
        raise ConstructionError(f"index budget cannot reach the {p}-adic target")
    rng = _seeded_rng("descent", seed, p)
    budget = budget_factor * n * (2 if p == 2 else 1) + 40
    for trial in range(budget):
        cur = lat
        good = True
        for kk in splits[trial % len(splits)] if trial % 2 else rng.choice(splits):
            if kk > n:
                good = False
                break
            w = sample_subspace(cur, rng, p, n - kk, trial % 3)
            sub = sublattice_from_fp_subspace(cur, p, w)
            cur = sub.reduced() if sub.det > 10**8 else sub
        if good and part_key(p, local_part_of(cur, p)) == tkey:
            return cur
    raise ConstructionError(
        f"could not realize the target {p}-adic symbol within the retry budget"
    )


# ---------------------------------------------------------------------------
# whole-genus construction


def scale_symbol_by_two(sym: GenusSymbol) -> GenusSymbol:
    """Symbol of (L, 2*beta) given the symbol of (L, beta)."""
    parts = {}
    for p, cs in sym.parts:
        if p == 2:
            parts[2] = tuple(replace(c, scale=c.scale + 1) for c in cs)
        else:
            leg = int(jacobi_symbol(2, p))
            parts[p] = scale_symbol_part_by_unit(p, cs, 0, leg)
    if 2 not in parts:
        raise ValueError("symbol is missing its 2-adic part")
    return assemble_symbol(sym.n, parts)


def maximal_overlattice(lat: GramLattice) -> GramLattice:
    """Integral lattice with no proper integral over-lattice containing lat."""
    from .lattice import maximal_integral_overlattice

    return maximal_integral_overlattice(lat)


def construct_representative(sym: GenusSymbol, *, seed="") -> GramLattice:
    """A lattice whose genus symbol equals the given square-free symbol."""
    if not is_valid_genus_symbol(sym):
        raise ValueError("invalid genus symbol")
    if not sym.is_squarefree():
        raise ValueError("construction requires a square-free symbol")
    n, det_class, minus = space_invariants(sym)
    entries = find_diagonal_form(n, sym.det, minus)
    doubled_target = scale_symbol_by_two(sym)
    lat = even_maximal_overlattice(GramLattice.diagonal([2 * a for a in entries]))
    for p in sorted({2} | set(factorint(doubled_target.det))):
        target_part = doubled_target.part(p)
        if not target_part:
            continue
        if p == 2:
            lat = sublattice_with_local_symbol(lat, 2, target_part, seed=seed)
        else:
            lat = sublattice_with_local_symbol(lat, p, target_part, seed=seed)
        lat = lat.reduced()
    halved = GramLattice.from_rows([[x // 2 for x in row] for row in lat.gram])
    result = halved.reduced()
    if symbol_from_lattice(result) != sym:
        raise ConstructionError("constructed lattice has the wrong symbol")
    return result
