"""Run acceptance presets outside pytest and print one verdict line per criterion.

    python3 scripts/run_acceptance.py                 # all ten
    python3 scripts/run_acceptance.py lemma1 dsl      # a subset (determinism reruns only these)
"""

import argparse
import sys
from pathlib import Path

from vclab.criteria import CRITERIA, csv_digests, run_criterion
from vclab.seeding import resolve_seed


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("ids", nargs="*", help="criterion ids (default: all)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", default="runs/acceptance")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args(argv)
    ids = args.ids or list(CRITERIA)
    bad = [i for i in ids if i not in CRITERIA]
    if bad:
        ap.error(f"unknown criteria: {', '.join(bad)}")
    seed = resolve_seed(args.seed)
    out = Path(args.out)
    first, ok = {}, True
    for cid in ids:
        if cid == "determinism":
            continue
        res = run_criterion(cid, seed, out / f"{cid}_a", args.jobs)
        first[cid] = csv_digests(out / f"{cid}_a")
        print(res.line(), flush=True)
        ok &= res.passed
    if "determinism" in ids:
        others = [i for i in ids if i != "determinism"] or None
        res = run_criterion("determinism", seed, out, args.jobs, ids=others, first=first)
        print(res.line(), flush=True)
        ok &= res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
