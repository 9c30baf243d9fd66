"""Side by side: star check on Lie lattices and on the matching groups."""

import argparse

from constgen.catalog import MatrixSplit, build, family
from constgen.errors import ConstraintViolation
from constgen.lielattice import abelian_lattice, star_check_lattice, x_action_lattice, x_scalar_lattice
from constgen.verify import star_check


def fmt(v):
    if v is None:
        return "no group"
    wit = " ".join(f"[{w.index}:{w.d_found}]" for w in v.witnesses)
    return f"{v.outcome:7s} {wit}"


def group_verdict(make, m):
    try:
        spec = make()
    except ConstraintViolation:
        return None
    return star_check(build(spec, m), m)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=2, help="index bound p^m")
    args = ap.parse_args()
    m, K = args.m, args.m + 2
    shapes = []
    for p in (2, 3, 5):
        shapes.append((f"abelian p={p}", abelian_lattice(p, 2, K=K), lambda p=p: family(1, p=p, d=2)))
    for p, s in [(3, 1), (3, 2), (5, 1), (2, 2), (2, 3), (2, 0), (3, 0)]:
        shapes.append((f"x-scalar p={p} s={s}", x_scalar_lattice(p, 2, s, K=K),
                       lambda p=p, s=s: family(2, p=p, d=2, s=s)))
    for p in (3, 5):
        shapes.append((f"unipotent p={p}", x_action_lattice(p, [[0, p], [0, 0]], K=K),
                       lambda p=p: MatrixSplit(p, ((1, p), (0, 1)))))
    print(f"index bound p^{m}; witnesses as [index:d]")
    for name, L, make in shapes:
        print(f"{name:20s} lattice {fmt(star_check_lattice(L, m)):22s} group {fmt(group_verdict(make, m))}",
              flush=True)


if __name__ == "__main__":
    main()
