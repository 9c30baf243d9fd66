"""Print the decomposition-count triples allowed by the module inequality."""

import argparse

from constgen.repdecomp import table1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, nargs="+", default=[2, 3, 5])
    ap.add_argument("--max-dim", type=int, default=8)
    args = ap.parse_args()
    for p in args.p:
        rows = table1(p, args.max_dim)
        print(f"p = {p}, n <= {args.max_dim}: {len(rows)} triples")
        print("    n   n1  n2  n3  label")
        for r in rows:
            print(f"  {r.n:3d} {r.n1:4d}{r.n2:4d}{r.n3:4d}  {r.label or '-'}")
        print()


if __name__ == "__main__":
    main()
