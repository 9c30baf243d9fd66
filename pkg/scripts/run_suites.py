"""Run the positive and negative suites and print one line per instance.

    python3 scripts/run_suites.py                 # both suites
    python3 scripts/run_suites.py --suite negative --json out.json
"""

import argparse
import json
import time
from dataclasses import dataclass

from constgen.catalog import build
from constgen.suites import NEGATIVE, POSITIVE
from constgen.verify import group_d, star_check


@dataclass
class RunConfig:
    suite: str = "all"
    names: tuple = ()
    json_out: str | None = None


def entries(cfg: RunConfig):
    pool = {"positive": POSITIVE, "negative": NEGATIVE, "all": POSITIVE + NEGATIVE}[cfg.suite]
    return [e for e in pool if not cfg.names or e.name in cfg.names]


def run(cfg: RunConfig) -> list[dict]:
    rows = []
    for e in entries(cfg):
        t = time.perf_counter()
        Q = build(e.spec, e.m)
        v = star_check(Q, e.m)
        row = {
            "name": e.name,
            "order": Q.group.order,
            "K": Q.certificate.K,
            "certificate": Q.certificate.mode,
            "max_index": v.max_index,
            "d": group_d(Q),
            "outcome": v.outcome,
            "witness": [(w.index, w.d_found) for w in v.witnesses],
            "seconds": round(time.perf_counter() - t, 2),
        }
        rows.append(row)
        wit = " ".join(f"[{i}:{d}]" for i, d in row["witness"])
        print(f"{e.name:24s} |G|={row['order']:<8d} K={row['K']} {row['certificate']:9s} "
              f"d={row['d']} p^m={row['max_index']:<4d} {row['outcome']:7s} {wit:14s} {row['seconds']:.1f}s",
              flush=True)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--suite", choices=["positive", "negative", "all"], default="all")
    ap.add_argument("--name", action="append", default=[], help="restrict to these entries")
    ap.add_argument("--json", dest="json_out")
    args = ap.parse_args()
    cfg = RunConfig(args.suite, tuple(args.name), args.json_out)
    rows = run(cfg)
    if cfg.json_out:
        with open(cfg.json_out, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
