#!/usr/bin/env python3
"""Diagnostics for the largest-eigenvalue approximation of the pair-minimum
operator: prints the Gauss-Legendre ladder, the equal-width grid ladder with
Richardson extrapolation, and the agreement between the two routes for each
tuning parameter.

Usage:
    python3 scripts/eigen_diagnostics.py [--a 0.2,0.5,1,2,5,10]
"""

import argparse
import sys

from exptests.nulldist import grid_ladder_delta1, largest_eigenvalue_delta1


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", default="0.2,0.5,1,2,5,10",
                    help="comma-separated tuning parameters")
    args = ap.parse_args(argv)

    for a in (float(tok) for tok in args.a.split(",") if tok.strip()):
        primary = largest_eigenvalue_delta1(a)
        print(f"a = {a:g}")
        for n_nodes, est in primary.trace:
            print(f"  gauss-legendre  nodes={n_nodes:4d}  delta1={est:.10e}")
        extr, trace = grid_ladder_delta1(a)
        for m, B, est in trace:
            print(f"  grid            m={m:5d} B={B:g}  delta1={est:.10e}")
        print(f"  grid extrapolated              delta1={extr:.10e}")
        rel = abs(extr - primary.delta1) / primary.delta1
        print(f"  final delta1 = {primary.delta1:.10e}   "
              f"route disagreement = {rel:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
