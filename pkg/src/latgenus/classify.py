"""Top-level classification drivers.

Pipeline: enumerate square-free candidate genera from the mass bounds,
construct representatives and certify class number one, then close the result
set under Watson pre-images realized by random bounded-index sublattices.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from sympy import factorint, nextprime

from .autgroup import aut_group_order
from .bounds import b_bound, decide, maxprime, minimal_mass
from .construct import (
    ConstructionError,
    _seeded_rng,
    construct_representative,
    sample_subspace,
)
from .jordan import jordan_decompose
from .lattice import GramLattice, is_maximal, is_qf_maximal, rescale_primitive, \
    sublattice_from_fp_subspace
from .massformula import mass, mass_condition
from .symbol import (
    GenusSymbol,
    assemble_symbol,
    canonical_key,
    enumerate_squarefree_local,
    rescale_symbol,
    symbol_from_lattice,
)
from .symbol_io import print_symbol
from .watson import watson_preimage_symbols, watson_symbol


@dataclass
class ClassifiedGenus:
    symbol: GenusSymbol
    representative: GramLattice
    mass: Fraction
    aut_order: int
    maximal: bool = False
    qf_maximal: bool = False
    family_id: int = -1
    family_size: int = 0
    family_m1: int = 0
    family_m2: int = 0

    @property
    def det(self) -> int:
        return self.symbol.det

    def sort_key(self):
        return (self.det, print_symbol(self.symbol))


# ---------------------------------------------------------------------------
# Algorithm: candidate square-free genera


def enumerate_squarefree_candidates(n: int, *, cap_prime: int | None = None):
    """Every primitive square-free symbol of dimension n whose mass can be
    at most 1/2: worklist over (2-adic data, odd-prime data, next prime),
    pruned by sound float lower bounds and certified by exact masses."""
    from .bounds import local_factor_float_low, minimal_mass_float_low, s_lower_float
    from .symbol import is_valid_genus_symbol

    cap = cap_prime or maxprime(n)
    HALF = 0.5 * (1 + 1e-9)
    U = enumerate_squarefree_local(2, n)
    odd_patterns = [cs for cs in enumerate_squarefree_local(3, n) if len(cs) == 2]
    pattern_low = {cs: None for cs in odd_patterns}  # per-prime cache below
    base_low = s_lower_float(n)

    out = []
    seen = set()

    def consider(two, odd_list):
        parts = {2: two}
        for p, cs in odd_list:
            parts[p] = cs
        sym = assemble_symbol(n, parts)
        if not is_valid_genus_symbol(sym):
            return
        if mass(sym) > Fraction(1, 2):
            return
        key = canonical_key(sym)
        if key not in seen:
            seen.add(key)
            out.append(sym)

    work = deque()
    for two in U:
        consider(two, ())
        prefix = base_low * local_factor_float_low(2, two, n)
        work.append((two, (), 3, prefix))
    while work:
        two, odd_list, p, prefix = work.popleft()
        if p > cap:
            continue
        # no extension at any prime >= p survives if even the weakest does not
        if minimal_mass_float_low(prefix, n, p) > HALF:
            continue
        q = int(nextprime(p))
        for pattern in odd_patterns:
            pat = tuple(c.__class__(c.scale, c.rank, c.det_class) for c in pattern)
            pat_low = local_factor_float_low(p, pat, n)
            cand_prefix = prefix * pat_low * (1 - 1e-9)
            extended = odd_list + ((p, pat),)
            if cand_prefix <= HALF:
                consider(two, extended)
            if q <= cap and minimal_mass_float_low(cand_prefix, n, q) <= HALF:
                work.append((two, extended, q, cand_prefix))
        if q <= cap:
            work.append((two, odd_list, q, prefix))
    out.sort(key=lambda s: (s.det, print_symbol(s)))
    return out


def certify(sym: GenusSymbol, *, seed="") -> ClassifiedGenus | None:
    """Construct a representative and keep it iff the genus is single-class."""
    lat = construct_representative(sym, seed=seed)
    m = mass(sym)
    inv = 1 / m
    if inv.denominator != 1:
        return None
    aut = aut_group_order(lat, exceeds=inv.numerator)
    if aut != inv.numerator:
        return None
    return ClassifiedGenus(sym, lat, m, aut)


def classify_squarefree(n: int, *, jobs: int = 1, salt: str = "") -> list[ClassifiedGenus]:
    """All single-class square-free genera in dimension n, certified."""
    cands = [s for s in enumerate_squarefree_candidates(n) if mass_condition(s)]
    tasks = [(print_symbol(s, table_style=False) + salt, s) for s in cands]
    results = []
    if jobs > 1:
        import multiprocessing as mp

        with mp.Pool(jobs) as pool:
            for res in pool.imap(_certify_task, tasks, chunksize=4):
                if res is not None:
                    results.append(res)
    else:
        for t in tasks:
            res = _certify_task(t)
            if res is not None:
                results.append(res)
    results.sort(key=ClassifiedGenus.sort_key)
    return results


def _certify_task(item):
    name, sym = item
    return certify(sym, seed=name)


# ---------------------------------------------------------------------------
# Watson closure


def _s_primes(n: int, m: Fraction, det: int) -> list[int]:
    out = sorted(set(factorint(2 * det)))
    p = 3
    while True:
        if p not in out:
            bound = decide(lambda k: b_bound(n, p, k) * m,
                           lambda iv: iv.surely_le(Fraction(1, 2)))
            if bound:
                out.append(p)
            else:
                break
        p = int(nextprime(p))
    return sorted(out)


def _admissible_dims(lat: GramLattice, p: int, targets) -> list[int]:
    """Subspace dimensions that can produce some remaining target."""
    n = lat.n
    v_now = jordan_decompose(lat, p).valuation_of_det()
    dims = set()
    for t in targets:
        v_t = sum(c.scale * c.rank for c in t.part(p))
        for v_gcd in (0, 1, 2):
            # v_p det of rescaled sublattice: v_now + 2*(n-dim) - n*v_gcd
            num = v_t - v_now + n * v_gcd
            if num % 2 == 0 and 0 <= num // 2 <= n:
                dims.add(n - num // 2)
    return sorted(d for d in dims if 0 <= d < n)


def _sweep_subspaces(p: int, n: int, dim: int, limit: int):
    """Deterministic enumeration of the dim-dimensional subspaces of F_p^n
    when there are few enough (lines and hyperplanes); None otherwise."""
    from .matrixops import kernel_mod_p

    if dim not in (1, n - 1):
        return None
    count = (p**n - 1) // (p - 1)
    if count > limit:
        return None

    def projective_points():
        point = [0] * n
        for lead in range(n):
            tail = n - lead - 1
            for idx in range(p**tail):
                rest = []
                t = idx
                for _ in range(tail):
                    rest.append(t % p)
                    t //= p
                yield [0] * lead + [1] + rest

    if dim == 1:
        return ([pt] for pt in projective_points())
    return (kernel_mod_p([[x] for x in pt], p) for pt in projective_points())


def realize_targets(lat: GramLattice, p: int, targets: list[GenusSymbol], *,
                    seed="", budget: int = 3000):
    """Sublattices p L <= L' <= L, rescaled, hitting every target symbol.

    Random stratified sampling first; for targets still missing, lines and
    hyperplanes are swept exhaustively (deterministically)."""
    remaining = {canonical_key(t): t for t in targets}
    found: dict = {}
    if not remaining:
        return found
    rng = _seeded_rng("realize", seed, p)
    n = lat.n

    def try_subspace(w):
        sub = sublattice_from_fp_subspace(lat, p, w)
        cand = rescale_primitive(sub.gram).reduced()
        key = canonical_key(symbol_from_lattice(cand))
        if key in remaining:
            found[key] = cand
            del remaining[key]

    for trial in range(budget):
        if not remaining:
            return found
        dims = _admissible_dims(lat, p, remaining.values())
        if not dims:
            return found
        dim = dims[trial % len(dims)] if trial % 2 else rng.choice(dims)
        try_subspace(sample_subspace(lat, rng, p, dim, trial % 3))
    for dim in _admissible_dims(lat, p, remaining.values()):
        if not remaining:
            break
        sweep = _sweep_subspaces(p, n, dim, 40000)
        if sweep is None:
            continue
        for w in sweep:
            if not remaining:
                break
            try_subspace(w)
    return found


def classify_all(n: int, seeds: list[ClassifiedGenus] | None = None, *,
                 jobs: int = 1, alarm=None, salt: str = "") -> list[ClassifiedGenus]:
    """Complete list of single-class genera in dimension n.

    seeds must be the full square-free classification (computed if omitted);
    the worklist closes it under Watson pre-images.
    """
    if seeds is None:
        seeds = classify_squarefree(n, jobs=jobs, salt=salt)
    out: dict = {}
    seen: set = set()
    work = deque()
    for cg in sorted(seeds, key=ClassifiedGenus.sort_key):
        key = canonical_key(rescale_symbol(cg.symbol))
        out[key] = cg
        seen.add(key)
        work.append(cg)
    while work:
        cg = work.popleft()
        for p in _s_primes(n, cg.mass, cg.det):
            pre = watson_preimage_symbols(cg.symbol, p)
            targets = []
            for s in pre:
                key = canonical_key(s)  # pre-images are primitive already
                if key not in seen:
                    seen.add(key)
                    targets.append(s)
            if not targets:
                continue
            found = realize_targets(
                cg.representative, p, targets,
                seed=print_symbol(cg.symbol, table_style=False) + salt,
            )
            missing = [canonical_key(t) for t in targets if canonical_key(t) not in found]
            if missing and alarm:
                alarm(f"{len(missing)} pre-image symbols at p={p} not realized "
                      f"from {print_symbol(cg.symbol)}")
            for key, lat in sorted(found.items(), key=lambda kv: str(kv[0])):
                sym = symbol_from_lattice(lat)
                m = mass(sym)
                inv = 1 / m
                if inv.denominator != 1:
                    continue
                aut = aut_group_order(lat, exceeds=inv.numerator)
                if aut == inv.numerator:
                    new = ClassifiedGenus(sym, lat, m, aut)
                    out[key] = new
                    work.append(new)
    results = sorted(out.values(), key=ClassifiedGenus.sort_key)
    annotate(results)
    return results


# ---------------------------------------------------------------------------
# families and annotations


def group_families(results: list[ClassifiedGenus]):
    """Orbits of the result set under rescaled partial duals."""
    from .lattice import partial_dual

    by_key = {canonical_key(cg.symbol): cg for cg in results}
    assigned: dict = {}
    families: list[list[ClassifiedGenus]] = []
    for cg in results:
        key = canonical_key(cg.symbol)
        if key in assigned:
            continue
        fam = [cg]
        assigned[key] = len(families)
        queue = deque([cg])
        while queue:
            cur = queue.popleft()
            for p in factorint(cur.det):
                dual = rescale_primitive(partial_dual(cur.representative, p).gram)
                dkey = canonical_key(symbol_from_lattice(dual))
                if dkey not in by_key:
                    raise AssertionError("partial dual left the classified set")
                if dkey not in assigned:
                    assigned[dkey] = len(families)
                    fam.append(by_key[dkey])
                    queue.append(by_key[dkey])
        families.append(fam)
    return families


def annotate(results: list[ClassifiedGenus]) -> None:
    """Fill maximality flags and family annotations in place."""
    for cg in results:
        cg.maximal = is_maximal(cg.representative)
        cg.qf_maximal = is_qf_maximal(cg.representative)
    for fid, fam in enumerate(group_families(results)):
        m1 = sum(1 for cg in fam if cg.maximal)
        m2 = sum(1 for cg in fam if cg.qf_maximal)
        for cg in fam:
            cg.family_id = fid
            cg.family_size = len(fam)
            cg.family_m1 = m1
            cg.family_m2 = m2


def family_representatives(results: list[ClassifiedGenus]) -> list[ClassifiedGenus]:
    best: dict[int, ClassifiedGenus] = {}
    for cg in results:
        cur = best.get(cg.family_id)
        if cur is None or cg.sort_key() < cur.sort_key():
            best[cg.family_id] = cg
    return sorted(best.values(), key=ClassifiedGenus.sort_key)


def annotation_string(cg: ClassifiedGenus) -> str:
    sub = f"{cg.family_m1},{cg.family_m2}" if (cg.family_m1 or cg.family_m2) else ""
    return f"{cg.aut_order}_{{{sub}}}^{{*{cg.family_size}}}"


def summary_statistics(results: list[ClassifiedGenus]) -> dict:
    dets = [cg.det for cg in results]
    primes = sorted({p for d in dets for p in factorint(d)} | set())
    return {
        "total": len(results),
        "maximal": sum(1 for cg in results if cg.maximal),
        "qf_maximal": sum(1 for cg in results if cg.qf_maximal),
        "max_prime": max(primes) if primes else 1,
        "max_det": max(dets) if dets else 1,
    }


# ---------------------------------------------------------------------------
# catalogue persistence


CATALOGUE_VERSION = 1


def catalogue_records(n: int, results: list[ClassifiedGenus]) -> dict:
    records = []
    for cg in results:
        records.append({
            "dim": n,
            "symbol": print_symbol(cg.symbol),
            "gram": [x for row in cg.representative.gram for x in row],
            "mass_num": cg.mass.numerator,
            "mass_den": cg.mass.denominator,
            "aut_order": cg.aut_order,
            "maximal": cg.maximal,
            "qf_maximal": cg.qf_maximal,
            "family_id": cg.family_id,
            "family_annotation": annotation_string(cg),
        })
    return {"version": CATALOGUE_VERSION, "dim": n, "count": len(records),
            "genera": records}


def write_catalogue(path: str, n: int, results: list[ClassifiedGenus]) -> None:
    with open(path, "w") as f:
        json.dump(catalogue_records(n, results), f, indent=1, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# general realization (square-free via construction, otherwise Watson ascent)


def realize_symbol(sym: GenusSymbol, *, seed="") -> GramLattice:
    """Representative lattice for any valid symbol reachable by Watson ascent
    from its square-free reduction."""
    if sym.is_squarefree():
        return construct_representative(sym, seed=seed)
    chain = []
    cur = sym
    guard = 0
    while not cur.is_squarefree():
        guard += 1
        if guard > 64:
            raise ConstructionError("reduction chain did not terminate")
        p = min(p for p in cur.primes()
                if any(c.scale >= 2 for c in cur.part(p)))
        chain.append((p, cur))
        cur = watson_symbol(cur, p)
    lat = construct_representative(cur, seed=seed)
    for p, target in reversed(chain):
        found = realize_targets(lat, p, [target], seed=seed + print_symbol(target, table_style=False))
        if not found:
            raise ConstructionError(
                f"could not realize {print_symbol(target)} as a {p}-descent")
        (lat,) = found.values()
    return lat
