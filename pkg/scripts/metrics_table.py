"""Recompute the metrics table from raw counts and check the printed values.

Reads a CSV with columns ``eta1,eta2,n1,n2`` plus printed metric columns
(``nt,delta,lam,b``), derives every metric from the counts, and reports how
often the derivation agrees with the printed value within tolerance.  With
``--emit`` it prints the fully recomputed table instead.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from termxform.metrics import HalsteadCounts, halstead, report_csv

DEFAULT_TABLE = Path(__file__).resolve().parent.parent / "tests" / "data" / "halstead_rows.csv"

TOLERANCES = {"nt": 0.15, "delta": 1.5, "b": 0.05}


def check_rows(rows: list[dict[str, str]]) -> dict[str, int]:
    hits = {"nt": 0, "delta": 0, "lam": 0, "b": 0}
    for row in rows:
        report = halstead(
            HalsteadCounts(
                eta1=int(row["eta1"]),
                eta2=int(row["eta2"]),
                n1=int(row["n1"]),
                n2=int(row["n2"]),
            )
        )
        computed = {
            "nt": report.theoretical_length,
            "delta": report.delta,
            "lam": report.lam,
            "b": report.bugs,
        }
        for key, value in computed.items():
            printed = float(row[key])
            tolerance = TOLERANCES.get(key, 0.1 if printed >= 1 else 0.05)
            if abs(value - printed) <= tolerance:
                hits[key] += 1
    return hits


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--table", default=str(DEFAULT_TABLE), help="counts CSV to read")
    parser.add_argument(
        "--emit", action="store_true", help="print the recomputed table instead of pass rates"
    )
    args = parser.parse_args(argv)

    with open(args.table, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))

    if args.emit:
        labeled = []
        for row in rows:
            counts = HalsteadCounts(
                eta1=int(row["eta1"]),
                eta2=int(row["eta2"]),
                n1=int(row["n1"]),
                n2=int(row["n2"]),
                loc=int(row.get("loc") or 0),
                bytes=int(row.get("bytes") or 0),
            )
            label = "%s-%s" % (row.get("example", "?"), row.get("label", "?"))
            labeled.append((label, halstead(counts)))
        print(report_csv(labeled), end="")
        return 0

    hits = check_rows(rows)
    total = len(rows)
    print("rows: %d" % total)
    for key in ("nt", "delta", "lam", "b"):
        print("%-6s %4d/%d  (%.1f%%)" % (key, hits[key], total, 100.0 * hits[key] / total))
    return 0


if __name__ == "__main__":
    sys.exit(main())
