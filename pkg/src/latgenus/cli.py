"""Command-line interface.

Exit codes: 0 success/match, 1 verification mismatch, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources

from .bounds import B_set, maxprime, t_min
from .classify import (
    annotation_string,
    catalogue_records,
    classify_all,
    classify_squarefree,
    family_representatives,
    summary_statistics,
    write_catalogue,
)
from .lattice import GramLattice, gram_from_text, gram_to_text
from .massformula import mass
from .autgroup import aut_group_order
from .symbol import symbol_from_lattice
from .symbol_io import parse_symbol, print_symbol
from .watson import watson_map, watson_symbol


def expected_tables() -> dict:
    with resources.files("latgenus.data").joinpath("expected_tables.json").open() as f:
        return json.load(f)


def _read_gram(path: str) -> GramLattice:
    with open(path) as f:
        return gram_from_text(f.read())


def cmd_bounds(args) -> int:
    n = args.dim
    t = t_min(n)
    B = B_set(n)
    mp = maxprime(n)
    bset = "{" + ",".join(str(p) for p in B) + "}" if B else "{}"
    print(f"t={t} B={bset} maxprime={mp}")
    return 0


def cmd_mass(args) -> int:
    sym = parse_symbol(args.symbol)
    m = mass(sym)
    print(f"{m.numerator}/{m.denominator}")
    return 0


def cmd_symbol(args) -> int:
    lat = _read_gram(args.gram)
    print(print_symbol(symbol_from_lattice(lat)))
    return 0


def cmd_aut(args) -> int:
    lat = _read_gram(args.gram)
    print(aut_group_order(lat))
    return 0


def cmd_construct(args) -> int:
    from .classify import realize_symbol

    sym = parse_symbol(args.symbol)
    lat = realize_symbol(sym, seed=args.seed or "")
    text = gram_to_text(lat)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_watson(args) -> int:
    lat = _read_gram(args.gram)
    image = watson_map(lat, args.p)
    print("input symbol: ", print_symbol(symbol_from_lattice(lat)))
    print("image symbol: ", print_symbol(symbol_from_lattice(image)))
    sys.stdout.write(gram_to_text(image))
    return 0


def _run_classification(args):
    if args.squarefree_only:
        results = classify_squarefree(args.dim, jobs=args.jobs, salt=args.seed)
        from .classify import annotate

        annotate(results)
    else:
        results = classify_all(args.dim, jobs=args.jobs, salt=args.seed,
                               alarm=lambda msg: print("alarm:", msg, file=sys.stderr))
    return results


def cmd_classify(args) -> int:
    results = _run_classification(args)
    if args.out:
        write_catalogue(args.out, args.dim, results)
        print(f"wrote {len(results)} genera to {args.out}")
    else:
        json.dump(catalogue_records(args.dim, results), sys.stdout, indent=1, sort_keys=True)
        print()
    return 0


def cmd_verify(args) -> int:
    data = expected_tables()
    n = args.dim
    results = classify_all(n, jobs=args.jobs,
                           alarm=lambda msg: print("alarm:", msg, file=sys.stderr))
    stats = summary_statistics(results)
    overview = data["overview"][str(n)]
    failures = []

    def check(name, got, want):
        if got != want:
            failures.append(f"{name}: got {got}, expected {want}")

    check("total", stats["total"], overview["total"])
    check("maximal", stats["maximal"], overview["maximal"])
    check("qf_maximal", stats["qf_maximal"], overview["qf_maximal"])
    check("max_prime", stats["max_prime"], overview["max_prime"])
    check("max_det", stats["max_det"], overview["max_det"])

    expected_fams = {e["symbol"]: e for e in data["families"] if e["dim"] == n}
    matched = 0
    if expected_fams:
        reps = family_representatives(results)
        got_fams = {print_symbol(cg.symbol): cg for cg in reps}
        for symtext, entry in sorted(expected_fams.items()):
            cg = got_fams.get(symtext)
            if cg is None:
                failures.append(f"missing family {symtext}")
                continue
            ok = (cg.aut_order == entry["aut"] and cg.family_size == entry["family_size"]
                  and cg.family_m1 == entry["n_maximal"] and cg.family_m2 == entry["n_qf_maximal"])
            if ok:
                matched += 1
            else:
                failures.append(
                    f"family {symtext}: got {annotation_string(cg)}, expected "
                    f"{entry['aut']}_{{{entry['n_maximal']},{entry['n_qf_maximal']}}}"
                    f"^{{*{entry['family_size']}}}")
        for symtext in sorted(set(got_fams) - set(expected_fams)):
            failures.append(f"unexpected family {symtext}")
        print(f"{matched}/{len(expected_fams)} genera matched")
    else:
        print(f"dimension {n}: compared by count and summary rows only")
    for f in failures:
        print("MISMATCH", f)
    if failures:
        return 1
    print(f"verify --dim {n}: OK "
          f"(total={stats['total']}, maximal={stats['maximal']}, "
          f"qf-maximal={stats['qf_maximal']})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="latgenus",
        description="Classification of single-class genera of definite lattices",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run the classification for one dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--squarefree-only", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--seed", default="")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="classify and diff against the published tables")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mass", help="exact mass of a genus symbol")
    p.add_argument("--symbol", required=True)
    p.set_defaults(func=cmd_mass)

    p = sub.add_parser("symbol", help="genus symbol of a gram matrix file")
    p.add_argument("--gram", required=True)
    p.set_defaults(func=cmd_symbol)

    p = sub.add_parser("construct", help="build a lattice with a given symbol")
    p.add_argument("--symbol", required=True)
    p.add_argument("--seed", default="")
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("watson", help="apply the descent map at a prime")
    p.add_argument("--gram", required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(func=cmd_watson)

    p = sub.add_parser("aut", help="order of the automorphism group")
    p.add_argument("--gram", required=True)
    p.set_defaults(func=cmd_aut)

    p = sub.add_parser("bounds", help="dimension bounds: t, B, maxprime")
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
