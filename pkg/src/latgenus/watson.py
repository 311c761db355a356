"""Watson descent maps on lattices and genus symbols, with pre-image search.

Wat_p(L) = rescale(L intersect p L^#) shortens the p-adic Jordan chain; on
symbols it acts by moving the scale-0 block to scale 2, merging, and
rescaling.  Pre-image enumeration scans bounded-scale local data and keeps
whatever maps forward onto the given symbol.
"""

from __future__ import annotations

from dataclasses import replace

from sympy.functions.combinatorial.numbers import jacobi_symbol

from .lattice import GramLattice, rescale_primitive, sublattice_from_fp_subspace
from .matrixops import kernel_mod_p
from .symbol import (
    Constituent,
    GenusSymbol,
    assemble_symbol,
    canonical_key,
    canonicalize_2adic,
    even_det_set,
    is_valid_genus_symbol,
    p_excess,
    rescale_symbol,
    scale_symbol_part_by_unit,
    trace_set,
)


def watson_map(lat: GramLattice, p: int) -> GramLattice:
    """rescale(L intersect p L^#) as an explicit lattice."""
    g = [list(r) for r in lat.gram]
    ker = kernel_mod_p(g, p)
    sub = sublattice_from_fp_subspace(lat, p, ker)
    return rescale_primitive(sub.gram).reduced()


def _merge(p: int, a: Constituent, b: Constituent) -> Constituent:
    if p == 2:
        return Constituent(
            a.scale, a.rank + b.rank, a.det_class * b.det_class % 8,
            a.odd or b.odd, (a.oddity + b.oddity) % 8,
        )
    return Constituent(a.scale, a.rank + b.rank, a.det_class * b.det_class)


def _forced_oddity(parts, n) -> int:
    total = sum(p_excess(q, qcs) for q, qcs in parts.items() if q != 2) % 8
    return (n + total) % 8


def watson_symbol(sym: GenusSymbol, p: int) -> GenusSymbol:
    """Symbol of Wat_p applied to any lattice of the genus."""
    cs = sym.part(p)
    if p == 2 and not cs:
        raise ValueError("symbol is missing its 2-adic part")
    if not cs or all(c.scale == 0 for c in cs) and p != 2:
        return canonicalize_2adic(sym)
    moved: dict[int, Constituent] = {}
    for c in cs:
        c2 = replace(c, scale=2) if c.scale == 0 else c
        moved[c2.scale] = c2 if c2.scale not in moved else _merge(p, moved[c2.scale], c2)
    shift = min(moved)
    new_p_part = tuple(replace(moved[s], scale=s - shift) for s in sorted(moved))
    parts = {}
    for q, qcs in sym.parts:
        if q == p:
            continue
        if shift:
            if q == 2:
                u = pow(pow(p, -1, 8), shift, 8)
                qcs = scale_symbol_part_by_unit(2, qcs, u, 0)
            else:
                leg = int(jacobi_symbol(p, q)) ** shift
                qcs = scale_symbol_part_by_unit(q, qcs, 0, leg)
        parts[q] = qcs
    parts[p] = new_p_part
    out = assemble_symbol(sym.n, parts)
    return canonicalize_2adic(out)


def _constituent_options(p: int, scale: int, rank: int):
    if rank == 0:
        return [None]
    opts = []
    if p == 2:
        for d in (1, 3, 5, 7):
            for t in sorted(trace_set(rank, d)):
                opts.append(Constituent(scale, rank, d, True, t))
        for d in sorted(even_det_set(rank)):
            opts.append(Constituent(scale, rank, d, False, 0))
    else:
        opts = [Constituent(scale, rank, 1), Constituent(scale, rank, -1)]
    return opts


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _profile_after_watson(ranks: tuple[int, ...]) -> tuple[int, ...] | None:
    """Rank-by-scale profile of the rescaled Watson image, or None."""
    merged: dict[int, int] = {}
    for scale, r in enumerate(ranks):
        if r == 0:
            continue
        s = 2 if scale == 0 else scale
        merged[s] = merged.get(s, 0) + r
    if not merged:
        return None
    shift = min(merged)
    prof = {}
    for s, r in merged.items():
        prof[s - shift] = r
    return tuple(prof.get(i, 0) for i in range(max(prof) + 1))


def watson_preimage_symbols(sym: GenusSymbol, p: int, *, extra_scale: int = 0):
    """All genus symbols whose rescaled Watson image at p equals rescale(sym).

    Candidate p-parts scan scales up to max(target scale) + 1 (at least 2 for
    odd p, 3 for p = 2) plus extra_scale in verification mode; other primes'
    data is forced up to the rescaling unit twist.
    """
    target = rescale_symbol(sym)
    target_key = canonical_key(target)
    n = sym.n
    tcs = target.part(p)
    tprof_map = {c.scale: c.rank for c in tcs}
    if not tprof_map:
        tprof = (n,)
    else:
        tprof = tuple(tprof_map.get(i, 0) for i in range(max(tprof_map) + 1))
    max_scale = max((c.scale for c in tcs), default=0)
    cap = max(max_scale + 1, 2 if p != 2 else 3) + extra_scale
    other = tuple((q, qcs) for q, qcs in target.parts if q != p)
    out = {}
    for ranks in _compositions(n, cap + 1):
        if ranks[0] == 0:
            continue
        if _profile_after_watson(ranks) != tprof:
            continue
        option_lists = [_constituent_options(p, s, r) for s, r in enumerate(ranks)]
        for combo in _product(option_lists):
            p_part = tuple(c for c in combo if c is not None)
            shift = min(2 if c.scale == 0 else c.scale for c in p_part)
            cand = _assemble_candidate(n, p, p_part, other, shift)
            if cand is None or not is_valid_genus_symbol(cand):
                continue
            img = rescale_symbol(watson_symbol(cand, p))
            if canonical_key(img) == target_key:
                out[canonical_key(cand)] = cand
    return list(out.values())


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for rest in _product(lists[1:]):
            yield (head,) + rest


def _assemble_candidate(n, p, p_part, other, shift):
    parts = {p: p_part}
    for q, qcs in other:
        if shift:
            # undo the unit twist the forward rescale will apply (twists are
            # involutions, so applying the same one inverts it)
            if q == 2:
                u = pow(pow(p, -1, 8), shift, 8)
                qcs = scale_symbol_part_by_unit(2, qcs, u, 0)
            else:
                leg = int(jacobi_symbol(p, q)) ** shift
                qcs = scale_symbol_part_by_unit(q, qcs, 0, leg)
        parts[q] = qcs
    if 2 not in parts:
        raise ValueError("candidate symbol is missing its 2-adic part")
    return assemble_symbol(n, parts)
