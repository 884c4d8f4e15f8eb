"""Largest solution-free density for every catalog group, as CSV.

    python3 scripts/density_table.py --max-order 24 --eq square > densities.csv
"""
import argparse
import csv
import sys
import time

from nonabelian_roth.counting import CSV_HEADER, EquationKind, max_solution_free
from nonabelian_roth.groups import catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-order", type=int, default=24)
    ap.add_argument("--eq", default="square")
    ap.add_argument("--budget", type=int, default=2_000_000)
    args = ap.parse_args()
    eq = EquationKind.parse(args.eq)
    out = csv.writer(sys.stdout)
    out.writerow(CSV_HEADER + ["exhaustive", "seconds"])
    for _, G in catalog(max_order=args.max_order):
        t0 = time.perf_counter()
        rep = max_solution_free(G, eq, args.budget)
        out.writerow(rep.csv_row() + [rep.exhaustive, f"{time.perf_counter() - t0:.3f}"])


if __name__ == "__main__":
    main()
