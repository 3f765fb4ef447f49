#!/usr/bin/env python3
"""Reproduce the local Bahadur efficiency tables.

Writes one CSV with the efficiencies of the classical battery (fixed and
tuned statistics at a in {0.2, 0.5, 1, 2, 5, 10}) and one CSV with the
efficiency curves of the two pair-minimum statistics, both over the four
local alternative families.

Usage:
    python3 scripts/reproduce_efficiency_tables.py --out-dir results
"""

import argparse
import csv
import sys
import time
from pathlib import Path

from exptests.families import LOCAL_FAMILIES
from exptests.slopes import efficiency
from exptests.statistics import (PLAIN_STATISTICS, TUNED_STATISTICS,
                                 StatisticId)

TUNING = (0.2, 0.5, 1.0, 2.0, 5.0, 10.0)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="results")
    args = ap.parse_args(argv)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    battery = [StatisticId(name) for name in sorted(PLAIN_STATISTICS)]
    for name in sorted(TUNED_STATISTICS - {"MD", "LD"}):
        battery.extend(StatisticId(name, a) for a in TUNING)
    new_tests = [StatisticId(name, a) for name in ("MD", "LD")
                 for a in TUNING]

    t0 = time.time()
    for fname, stats in (("efficiency_battery.csv", battery),
                         ("efficiency_new_tests.csv", new_tests)):
        path = out_dir / fname
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["statistic", "a", "family", "a_T", "c_coeff",
                             "lrt_coeff", "efficiency", "flagged"])
            for stat in stats:
                for family in LOCAL_FAMILIES:
                    rep = efficiency(stat, family)
                    writer.writerow([
                        stat.name,
                        "" if stat.a is None else f"{stat.a:g}",
                        family, repr(rep.a_T), repr(rep.c_coeff),
                        repr(rep.lrt_coeff), f"{rep.efficiency:.4f}",
                        rep.flagged])
                print(f"{stat.label():12s} done [{time.time() - t0:5.0f}s]",
                      flush=True)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
