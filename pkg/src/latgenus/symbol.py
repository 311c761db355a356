"""Genus symbols: per-prime Jordan invariants with canonical 2-adic form.

A symbol stores, for every relevant prime, the scaled Jordan constituents.
At odd primes the constituent data (scale, rank, unit-determinant class) is a
complete invariant.  At p = 2 many splittings describe the same completion;
equality is decided by closing the constituent data under the exact
equivalence moves (determinant rescalings of adjacent constituents coupled
with oddity shifts) and comparing minimal representatives.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cache, lru_cache
from math import gcd, prod

from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import jacobi_symbol

from .jordan import jordan_decompose
from .lattice import GramLattice


@dataclass(frozen=True, order=True)
class Constituent:
    """One p^scale-modular Jordan constituent.

    det_class holds the Legendre symbol (+-1) of the unit determinant for odd
    p, and the unit determinant mod 8 for p = 2.  oddity is used at p = 2 for
    odd (type I) constituents only.
    """

    scale: int
    rank: int
    det_class: int
    odd: bool = False
    oddity: int = 0

    @property
    def eps(self) -> int:
        """Sign as printed: at p=2, +1 iff det = +-1 mod 8."""
        if self.det_class in (1, 7):
            return 1
        if self.det_class in (3, 5):
            return -1
        return self.det_class  # odd p: already +-1


@dataclass(frozen=True)
class GenusSymbol:
    n: int
    parts: tuple[tuple[int, tuple[Constituent, ...]], ...]  # (p, constituents), p ascending

    def part(self, p: int) -> tuple[Constituent, ...]:
        for q, cs in self.parts:
            if q == p:
                return cs
        return ()

    def primes(self) -> list[int]:
        return [p for p, _ in self.parts]

    @property
    def det(self) -> int:
        return prod(p ** sum(c.scale * c.rank for c in cs) for p, cs in self.parts)

    def det_valuation(self, p: int) -> int:
        return sum(c.scale * c.rank for c in self.part(p))

    def is_even(self) -> bool:
        for c in self.part(2):
            if c.scale == 0:
                return not c.odd
        return True

    def is_squarefree(self) -> bool:
        return all(c.scale <= 1 for _, cs in self.parts for c in cs)

    def min_scale(self, p: int) -> int:
        cs = self.part(p)
        return min(c.scale for c in cs) if cs else 0

    def __hash__(self):
        return hash(canonical_key(self))

    def __eq__(self, other):
        if not isinstance(other, GenusSymbol):
            return NotImplemented
        return canonical_key(self) == canonical_key(other)

    def __repr__(self):
        from .symbol_io import print_symbol

        try:
            return f"GenusSymbol({print_symbol(self)!r})"
        except Exception:
            return f"GenusSymbol(n={self.n}, parts={self.parts!r})"


# ---------------------------------------------------------------------------
# realizability of unimodular 2-adic constituents


@cache
def trace_set(rank: int, d8: int) -> frozenset[int]:
    """Possible traces mod 8 of a diagonal odd unimodular 2-adic form of the
    given rank and determinant class mod 8."""
    if rank == 0:
        return frozenset({0}) if d8 == 1 else frozenset()
    acc = {(u % 8, u % 8) for u in (1, 3, 5, 7)}
    for _ in range(rank - 1):
        acc = {((d * u) % 8, (t + u) % 8) for d, t in acc for u in (1, 3, 5, 7)}
    return frozenset(t for d, t in acc if d == d8 % 8)


@cache
def even_det_set(rank: int) -> frozenset[int]:
    """Unit determinants mod 8 of even (type II) unimodular 2-adic forms."""
    if rank == 0:
        return frozenset({1})
    if rank % 2:
        return frozenset()
    m = rank // 2
    base = 1 if m % 2 == 0 else 7
    return frozenset({base, (5 * base) % 8})


def constituent_ok(c: Constituent) -> bool:
    if c.rank <= 0 or c.scale < 0:
        return False
    if c.odd:
        return c.oddity in trace_set(c.rank, c.det_class % 8)
    return c.det_class % 8 in even_det_set(c.rank) and c.oddity == 0


# ---------------------------------------------------------------------------
# 2-adic state space: equivalence moves and canonical keys

# A 2-adic "structure" is the move-invariant part: ((scale, rank, odd), ...).
# A "state" holds the variable part: (d-vector, compartment-oddity-vector).


def _compartments(struct) -> list[list[int]]:
    """Indices of maximal chains of odd constituents at consecutive scales."""
    comps = []
    cur = []
    prev_scale = None
    for i, (scale, rank, odd) in enumerate(struct):
        if odd and cur and prev_scale is not None and scale == prev_scale + 1:
            cur.append(i)
        elif odd:
            if cur:
                comps.append(cur)
            cur = [i]
        else:
            if cur:
                comps.append(cur)
            cur = []
        prev_scale = scale
    if cur:
        comps.append(cur)
    return comps


def _compartment_realizable(ranks, ds, total) -> bool:
    """Can oddities summing to `total` be distributed over the constituents?"""
    feasible = {0}
    for rank, d in zip(ranks, ds):
        ts = trace_set(rank, d % 8)
        if not ts:
            return False
        feasible = {(a + t) % 8 for a in feasible for t in ts}
    return total % 8 in feasible


@lru_cache(maxsize=200000)
def _two_adic_closure(struct, state0):
    """All (d-vector, compartment-total-vector) states equivalent to state0."""
    comps = _compartments(struct)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for i in comp:
            comp_of[i] = ci
    scales = [s for s, _, _ in struct]
    scale_index = {s: i for i, s in enumerate(scales)}

    def ok(state):
        ds, ts = state
        for (scale, rank, odd), d in zip(struct, ds):
            if not odd and d % 8 not in even_det_set(rank):
                return False
        for ci, comp in enumerate(comps):
            if not _compartment_realizable(
                tuple(struct[i][1] for i in comp), tuple(ds[i] for i in comp), ts[ci]
            ):
                return False
        return True

    pairs = []
    for i, si in enumerate(scales):
        for j in range(i + 1, len(scales)):
            dj = scales[j] - si
            if dj == 1:
                pairs.append((i, j))
            elif dj == 2 and si + 1 not in scale_index:
                # across an empty scale: only between two odd constituents
                if struct[i][2] and struct[j][2]:
                    pairs.append((i, j))

    seen = {state0}
    todo = [state0]
    while todo:
        ds, ts = todo.pop()
        for i, j in pairs:
            touched = sorted({comp_of[k] for k in (i, j) if k in comp_of})
            for m in (3, 5, 7):
                shift = 4 if m in (3, 5) else 0
                if shift and not touched:
                    continue
                nds = list(ds)
                nds[i] = nds[i] * m % 8
                nds[j] = nds[j] * m % 8
                nts = list(ts)
                for ci in touched:
                    nts[ci] = (nts[ci] + shift) % 8
                new = (tuple(nds), tuple(nts))
                if new not in seen and ok(new):
                    seen.add(new)
                    todo.append(new)
    return frozenset(seen)


def _two_struct_state(cs: tuple[Constituent, ...]):
    struct = tuple((c.scale, c.rank, c.odd) for c in cs)
    comps = _compartments(struct)
    ds = tuple(c.det_class % 8 for c in cs)
    ts = tuple(sum(cs[i].oddity for i in comp) % 8 for comp in comps)
    return struct, (ds, ts)


def two_adic_states(cs: tuple[Constituent, ...]):
    struct, state0 = _two_struct_state(cs)
    return struct, _two_adic_closure(struct, state0)


def _state_to_constituents(struct, state) -> tuple[Constituent, ...]:
    """Concrete constituent tuple for a state, with the lexicographically
    smallest realizable oddity split within each compartment."""
    ds, ts = state
    comps = _compartments(struct)
    oddities = [0] * len(struct)
    for comp, total in zip(comps, ts):
        remaining = list(comp)
        left = total % 8
        for pos, i in enumerate(remaining):
            rank, d = struct[i][1], ds[i]
            choices = sorted(trace_set(rank, d))
            for t in choices:
                tail_ok = _compartment_realizable(
                    tuple(struct[k][1] for k in remaining[pos + 1 :]),
                    tuple(ds[k] for k in remaining[pos + 1 :]),
                    (left - t) % 8,
                )
                if tail_ok:
                    oddities[i] = t
                    left = (left - t) % 8
                    break
            else:
                raise ValueError("unrealizable compartment state")
    return tuple(
        Constituent(scale, rank, ds[i], odd, oddities[i] if odd else 0)
        for i, (scale, rank, odd) in enumerate(struct)
    )


def canonical_two_part(cs: tuple[Constituent, ...]) -> tuple[Constituent, ...]:
    struct, states = two_adic_states(cs)
    best = min(states)
    return _state_to_constituents(struct, best)


def canonicalize_2adic(sym: GenusSymbol) -> GenusSymbol:
    """Unique representative under the 2-adic symbol equivalences."""
    parts = []
    for p, cs in sym.parts:
        parts.append((p, canonical_two_part(cs) if p == 2 else cs))
    return GenusSymbol(sym.n, tuple(parts))


def canonical_key(sym: GenusSymbol):
    parts = []
    for p, cs in sym.parts:
        if p == 2:
            struct, states = two_adic_states(cs)
            parts.append((2, struct, min(states)))
        else:
            parts.append((p, tuple((c.scale, c.rank, c.det_class) for c in cs)))
    return (sym.n, tuple(parts))


def symbols_equal(a: GenusSymbol, b: GenusSymbol) -> bool:
    return canonical_key(a) == canonical_key(b)


# ---------------------------------------------------------------------------
# building symbols


def symbol_from_lattice(lat: GramLattice) -> GenusSymbol:
    """Genus symbol of an integral lattice (canonical 2-adic part)."""
    parts = []
    for p in sorted({2} | set(factorint(lat.det))):
        dec = jordan_decompose(lat, p)
        cs = tuple(
            Constituent(b.scale, b.rank, b.det_class, b.odd, b.oddity) for b in dec.blocks
        )
        if p == 2:
            cs = canonical_two_part(cs)
        parts.append((p, cs))
    return GenusSymbol(lat.n, tuple(parts))


def assemble_symbol(n: int, parts_dict: dict[int, tuple[Constituent, ...]]) -> GenusSymbol:
    """Normalized symbol: parts sorted by prime; redundant odd-prime parts
    (a single scale-0 constituent, whose sign is globally determined) dropped."""
    parts = []
    for p in sorted(parts_dict):
        cs = tuple(sorted(parts_dict[p], key=lambda c: c.scale))
        if not cs:
            continue
        if p != 2 and len(cs) == 1 and cs[0].scale == 0:
            continue
        parts.append((p, cs))
    return GenusSymbol(n, tuple(parts))


# ---------------------------------------------------------------------------
# validity


def _odd_part_ok(p: int, cs: tuple[Constituent, ...], n: int) -> bool:
    if sum(c.rank for c in cs) != n:
        return False
    scales = [c.scale for c in cs]
    if scales != sorted(scales) or len(set(scales)) != len(scales):
        return False
    return all(c.rank >= 1 and c.scale >= 0 and c.det_class in (1, -1) and not c.odd for c in cs)


def _two_part_ok(cs: tuple[Constituent, ...], n: int) -> bool:
    if sum(c.rank for c in cs) != n:
        return False
    scales = [c.scale for c in cs]
    if scales != sorted(scales) or len(set(scales)) != len(scales):
        return False
    if not all(c.scale >= 0 and constituent_ok(c) for c in cs):
        return False
    struct, (ds, ts) = _two_struct_state(cs)
    comps = _compartments(struct)
    for comp, total in zip(comps, ts):
        if not _compartment_realizable(
            tuple(struct[i][1] for i in comp), tuple(ds[i] for i in comp), total
        ):
            return False
    return True


def p_excess(p: int, cs: tuple[Constituent, ...]) -> int:
    """Excess of the p-adic part mod 8 (odd p)."""
    e = 0
    for c in cs:
        e += c.rank * (pow(p, c.scale, 8) - 1)
        if c.scale % 2 and c.det_class == -1:
            e += 4
    return e % 8


def two_adic_oddity(cs: tuple[Constituent, ...]) -> int:
    t = 0
    for c in cs:
        t += c.oddity
        if c.scale % 2 and c.eps == -1:
            t += 4
    return t % 8


def is_valid_genus_symbol(sym: GenusSymbol) -> bool:
    """Existence of a positive definite lattice with these invariants."""
    n = sym.n
    if n < 1:
        return False
    primes = sym.primes()
    if len(set(primes)) != len(primes) or primes != sorted(primes):
        return False
    if 2 not in primes:
        return False
    for p, cs in sym.parts:
        if p == 2:
            if not _two_part_ok(cs, n):
                return False
        else:
            if not isprime(p) or not _odd_part_ok(p, cs, n):
                return False
    det = sym.det
    # unit square-class consistency at every prime of the symbol
    for p, cs in sym.parts:
        u = det // p ** sym.det_valuation(p)
        if p == 2:
            d_all = 1
            for c in cs:
                d_all = d_all * c.det_class % 8
            if d_all != u % 8:
                return False
        else:
            target = jacobi_symbol(u, p)
            if prod(c.det_class for c in cs) != target:
                return False
    # primes dividing det must carry a symbol
    for p in factorint(det):
        if p not in primes:
            return False
    # global oddity relation
    total_excess = sum(p_excess(p, cs) for p, cs in sym.parts if p != 2) % 8
    if two_adic_oddity(sym.part(2)) != (n + total_excess) % 8:
        return False
    return True


# ---------------------------------------------------------------------------
# enumeration of square-free local data


def _constituent_options_2(rank: int) -> list[Constituent | None]:
    opts: list[Constituent] = []
    if rank == 0:
        return [None]
    for d in (1, 3, 5, 7):
        for t in sorted(trace_set(rank, d)):
            opts.append(Constituent(0, rank, d, True, t))
    for d in sorted(even_det_set(rank)):
        opts.append(Constituent(0, rank, d, False, 0))
    return opts


def enumerate_squarefree_local(p: int, n: int) -> list[tuple[Constituent, ...]]:
    """All local constituent lists with scales in {0, 1} and scale-0 rank >= 1.

    For p = 2, inequivalent under the 2-adic symbol moves; for odd p each
    (rank split, sign pair) occurs once.  Cached per (p, n).
    """
    return list(_enumerate_squarefree_local_cached(p, n))


@cache
def _enumerate_squarefree_local_cached(p: int, n: int) -> tuple:
    out = []
    if p != 2:
        for r0 in range(1, n + 1):
            r1 = n - r0
            for e0 in (1, -1):
                if r1 == 0:
                    out.append((Constituent(0, r0, e0),))
                    continue
                for e1 in (1, -1):
                    out.append((Constituent(0, r0, e0), Constituent(1, r1, e1)))
        return tuple(out)
    seen = set()
    for r0 in range(1, n + 1):
        r1 = n - r0
        for c0 in _constituent_options_2(r0):
            for c1 in _constituent_options_2(r1):
                cs = (c0,) if c1 is None else (c0, replace(c1, scale=1))
                key = canonical_key_part_2(cs)
                if key not in seen:
                    seen.add(key)
                    out.append(canonical_two_part(cs))
    return tuple(out)


def canonical_key_part_2(cs: tuple[Constituent, ...]):
    struct, states = two_adic_states(cs)
    return (struct, min(states))


# ---------------------------------------------------------------------------
# rescaling of symbols


def scale_symbol_part_by_unit(p: int, cs: tuple[Constituent, ...], u_mod: int,
                              leg_u: int) -> tuple[Constituent, ...]:
    """Rescale constituents at prime p by a p-adic unit u.

    leg_u is the Legendre symbol of u mod p (odd p); u_mod is u mod 8 (p=2).
    """
    out = []
    for c in cs:
        if p == 2:
            d = c.det_class * pow(u_mod, c.rank, 8) % 8
            t = c.oddity * u_mod % 8 if c.odd else 0
            out.append(replace(c, det_class=d, oddity=t))
        else:
            out.append(replace(c, det_class=c.det_class * (leg_u ** (c.rank % 2))))
    return tuple(out)


def rescale_symbol(sym: GenusSymbol) -> GenusSymbol:
    """Symbol of rescale_primitive(L) for any lattice L of the genus."""
    shifts = {p: sym.min_scale(p) for p in sym.primes()}
    factor_primes = [(p, k) for p, k in shifts.items() if k > 0]
    parts = {}
    for p, cs in sym.parts:
        # shift away p's own common scale
        cs = tuple(replace(c, scale=c.scale - shifts[p]) for c in cs)
        # unit adjustments from the other primes' factors
        for q, k in factor_primes:
            if q == p:
                continue
            if p == 2:
                u = pow(pow(q, -1, 8), k, 8)
                cs = scale_symbol_part_by_unit(2, cs, u, 0)
            else:
                leg = jacobi_symbol(q, p) ** k
                cs = scale_symbol_part_by_unit(p, cs, 0, leg)
        parts[p] = cs
    # drop primes that became trivial (single scale-0 constituent at odd p
    # is kept -- it may still carry required determinant data)
    out = assemble_symbol(sym.n, parts)
    return canonicalize_2adic(out)
