"""Command-line front end.

Exit codes: 0 every check passed, 1 a witness was found, 2 no certificate
could be produced (or a budget ran out), 3 the input was invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .catalog import build
from .errors import (
    BudgetExceeded,
    CertificateUnavailable,
    ConstgenError,
    ConstraintViolation,
    JacobiFails,
    NotAntisymmetric,
    NotOrderDividingP,
    SpecSemanticError,
    SpecSyntaxError,
)
from .lielattice import constants_from_brackets, make_lie_lattice, star_check_lattice
from .pgroup import DEFAULT_BUDGET
from .repdecomp import (
    DecompositionCounts,
    decompose,
    inequality_check,
    rational_d,
    synth_instance,
    table1,
    table1_label,
)
from .specfile import SpecDocument, parse_spec, print_group
from .suites import NEGATIVE, POSITIVE, by_name
from .verify import d_profile, en_check, recheck_witness, schreier_defect_report, star_check, theorem_oracle

SCHEMA_VERSION = 1
EXIT_PASS, EXIT_WITNESS, EXIT_NOCERT, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# loading inputs


def load_document(source: str) -> SpecDocument:
    """A spec file path, ``-`` for stdin, or ``catalog:NAME`` for a built-in entry."""
    if source.startswith("catalog:"):
        try:
            entry = by_name(source.split(":", 1)[1])
        except KeyError:
            raise InputError(f"no catalog entry {source!r}") from None
        return SpecDocument((entry.spec,), max_index=entry.m)
    return parse_spec(_read_text(source))


def _read_text(source: str) -> str:
    if source == "-":
        return sys.stdin.read()
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None


def parse_matrix(text: str):
    """JSON nested list or a whitespace grid with one row per line."""
    text = text.strip()
    if text.startswith("["):
        try:
            M = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad matrix JSON: {exc}") from None
    else:
        try:
            M = [[int(x) for x in line.split()] for line in text.splitlines() if line.strip()]
        except ValueError:
            raise InputError("matrix grid must contain integers only") from None
    if not (isinstance(M, list) and M and all(isinstance(r, list) and len(r) == len(M) for r in M)
            and all(isinstance(x, int) for r in M for x in r)):
        raise InputError("matrix must be a non-empty square integer matrix")
    return M


def _matrix_arg(arg: str):
    if arg.lstrip().startswith("[") or "\n" in arg:
        return parse_matrix(arg)
    return parse_matrix(_read_text(arg))


# --------------------------------------------------------------------------
# report assembly


def spec_json(spec) -> dict:
    return {"kind": type(spec).__name__, "text": print_group(spec)}


def new_report(command: str) -> dict:
    return {"version": __version__, "schema": SCHEMA_VERSION, "command": command,
            "spec": [], "certificate": [], "results": [], "profile": [], "timing": None}


def _settings(args, doc: SpecDocument):
    m = args.max_index if args.max_index is not None else doc.max_index
    m = 1 if m is None else m
    precision = args.precision or doc.precision or "auto"
    if precision != "auto":
        try:
            precision = int(precision)
        except ValueError:
            raise InputError("--precision must be 'auto' or an integer") from None
    budget = args.budget or doc.budget or DEFAULT_BUDGET
    return m, precision, budget


def cmd_verify(args, report) -> int:
    doc = load_document(args.spec)
    m, precision, budget = _settings(args, doc)
    code = EXIT_PASS
    for gi, spec in enumerate(doc.groups):
        report["spec"].append(spec_json(spec))
        Q = build(spec, m, precision=precision, budget=budget)
        report["certificate"].append(Q.certificate.to_json())
        if args.check == "star":
            v = star_check(Q, m, args.d_expected)
            res = v.to_json()
            bad = not v.passed
        elif args.check == "en":
            n = args.n if args.n is not None else _default_n(spec, Q)
            v = en_check(Q, m, n)
            res = v.to_json() | {"n": n}
            bad = not v.passed
        else:
            rep = schreier_defect_report(Q, m)
            res = rep.to_json() | {"check": "schreier"}
            bad = not rep.free_like
        res["group"] = gi
        res["oracle"] = theorem_oracle(spec).to_json()
        report["results"].append(res)
        report["profile"].append({"group": gi, "entries": d_profile(Q, m).to_json()})
        if bad:
            code = EXIT_WITNESS
    return code


def _default_n(spec, Q):
    from .catalog import analytic_dim

    n = analytic_dim(spec)
    if n is None:
        raise InputError("--n is required for groups without a known dimension")
    return n


def cmd_profile(args, report) -> int:
    doc = load_document(args.spec)
    m, precision, budget = _settings(args, doc)
    for gi, spec in enumerate(doc.groups):
        report["spec"].append(spec_json(spec))
        Q = build(spec, m, precision=precision, budget=budget)
        report["certificate"].append(Q.certificate.to_json())
        report["profile"].append({"group": gi, "entries": d_profile(Q, m).to_json()})
    return EXIT_PASS


def _decomposition_result(p, T):
    c = decompose(p, T)
    return {"p": p, "n": len(T), "counts": list(c.astuple()), "rational_d": rational_d(c),
            "inequality": inequality_check(p, c), "table1_label": table1_label(p, c)}


def cmd_decompose(args, report) -> int:
    if args.synth is not None:
        try:
            n1, n2, n3 = (int(x) for x in args.synth.split(","))
        except ValueError:
            raise InputError("--synth takes n1,n2,n3") from None
        T = [list(r) for r in synth_instance(args.p, DecompositionCounts(n1, n2, n3, args.p), args.seed).T]
    elif args.matrix is not None:
        T = _matrix_arg(args.matrix)
    else:
        raise InputError("give a matrix or --synth")
    res = _decomposition_result(args.p, T)
    res["matrix"] = T
    report["results"].append(res)
    return EXIT_PASS


def cmd_table1(args, report) -> int:
    rows = table1(args.p, args.max_dim)
    report["results"].append({"p": args.p, "max_dim": args.max_dim, "rows": [r.to_json() for r in rows]})
    return EXIT_PASS


def load_lattice(text: str, K: int | None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"bad lattice JSON: {exc}") from None
    if not isinstance(data, dict) or "p" not in data or "dim" not in data:
        raise InputError("lattice JSON needs keys p, dim and either c or brackets")
    dim = data["dim"]
    if "c" in data:
        c = data["c"]
    elif "brackets" in data:
        br = {}
        for key, vec in data["brackets"].items():
            try:
                i, j = (int(x) - 1 for x in key.split(","))
            except ValueError:
                raise InputError(f"bracket key {key!r} must look like 'i,j' (1-based)") from None
            br[(i, j)] = vec
        c = constants_from_brackets(dim, br)
    else:
        raise InputError("lattice JSON needs c or brackets")
    return make_lie_lattice(data["p"], K or data.get("K", 8), dim, c), data.get("d_expected")


def cmd_lattice(args, report) -> int:
    L, d_exp = load_lattice(_read_text(args.spec), args.precision_int)
    m = 1 if args.max_index is None else args.max_index
    v = star_check_lattice(L, m, args.d_expected or d_exp)
    report["spec"].append({"kind": "LieLattice", "p": L.p, "K": L.K, "dim": L.dim,
                           "c": [[list(r) for r in M] for M in L.c]})
    report["results"].append(v.to_json())
    return EXIT_PASS if v.passed else EXIT_WITNESS


def cmd_catalog(args, report) -> int:
    for suite, entries in (("positive", POSITIVE), ("negative", NEGATIVE)):
        for e in entries:
            report["results"].append({"suite": suite, "name": e.name, "max_index": e.m,
                                      "note": e.note, "spec": spec_json(e.spec),
                                      "oracle": theorem_oracle(e.spec).to_json()})
    return EXIT_PASS


def cmd_recheck(args, report) -> int:
    doc = load_document(args.spec)
    try:
        old = json.loads(_read_text(args.report))
    except json.JSONDecodeError as exc:
        raise InputError(f"bad report JSON: {exc}") from None
    code = EXIT_PASS
    for res, cert in zip(old.get("results", []), old.get("certificate", [])):
        gi = res.get("group", 0)
        if gi >= len(doc.groups):
            raise InputError("report refers to a group missing from the spec file")
        for w in res.get("witnesses_by_d") or ([res["witness"]] if res.get("witness") else []):
            out = recheck_witness(doc.groups[gi], cert["max_index_exponent"], w, precision=cert["precision"])
            out["group"] = gi
            report["results"].append(out)
            if not out["matches"]:
                code = EXIT_WITNESS
    return code


# --------------------------------------------------------------------------
# rendering


def render_text(report: dict) -> str:
    lines = [f"constgen {report['version']} {report['command']}"]
    for s in report["spec"]:
        lines.append(s.get("text", json.dumps(s, sort_keys=True)))
    for c in report["certificate"]:
        lines.append(f"certificate: {c['mode']} (K={c['precision']}, m={c['max_index_exponent']})")
    for r in report["results"]:
        lines.append(_render_result(r))
    for prof in report["profile"]:
        cells = ", ".join(f"|G:H|={e['index']} d={e['d']} x{e['count']}" for e in prof["entries"])
        lines.append(f"profile[{prof['group']}]: {cells}")
    if report["timing"]:
        lines.append(f"time: {report['timing']['seconds']:.3f}s")
    return "\n".join(lines) + "\n"


def _render_result(r: dict) -> str:
    if "outcome" in r:
        s = f"{r['check']}: {r['outcome']} ({r['subgroups_checked']} subgroups, index <= {r['max_index']})"
        w = r.get("witness")
        if w:
            s += f"\n  witness: index {w['index']}, d = {w['d_found']} (expected {w['d_expected']})"
            s += f", re-verified: {w['verified']}"
        if "oracle" in r:
            s += f"\n  oracle: {r['oracle']['status']} {r['oracle']['reason']}"
        return s
    if r.get("check") == "schreier":
        bad = sum(1 for row in r["rows"] if row["lhs"] != row["rhs"])
        return f"schreier: free-like={r['free_like']} ({bad} of {len(r['rows'])} rows defective)"
    if "rows" in r:
        return "\n".join(f"({x['n1']}, {x['n2']}, {x['n3']})  n={x['n']}  {x['label']}" for x in r["rows"])
    if "counts" in r:
        return (f"counts (n1, n2, n3) = {tuple(r['counts'])}, rational d = {r['rational_d']}, "
                f"inequality {'holds' if r['inequality'] else 'fails'}, label {r['table1_label']}")
    if "matches" in r:
        return f"recheck group {r['group']}: index {r['index']}, d {r['d']}, matches={r['matches']}"
    if "name" in r:
        return f"{r['suite']:8s} {r['name']:24s} m={r['max_index']}  {r['oracle']['status']}"
    return json.dumps(r, sort_keys=True)


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-index", type=int, default=None, metavar="M",
                        help="check subgroups of index up to p^M")
    common.add_argument("--precision", default=None, help="'auto' or a fixed K")
    common.add_argument("--budget", type=int, default=None, help="element cap for closures")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")
    common.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    ap = argparse.ArgumentParser(prog="constgen", description="Constant generating number explorer.")
    ap.add_argument("--version", action="version", version=f"constgen {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="star, E_n or Schreier checks")
    v.add_argument("check", choices=("star", "en", "schreier"))
    v.add_argument("spec", help="spec file, '-' or catalog:NAME")
    v.add_argument("--n", type=int, default=None, help="n for the E_n check (default: dimension)")
    v.add_argument("--d-expected", type=int, default=None)

    pr = sub.add_parser("profile", parents=[common], help="(index, d, count) census")
    pr.add_argument("spec")

    de = sub.add_parser("decompose", parents=[common], help="(n1, n2, n3) of a C_p action")
    de.add_argument("matrix", nargs="?", default=None, help="JSON matrix, grid file, or '-'")
    de.add_argument("--p", type=int, required=True)
    de.add_argument("--synth", default=None, metavar="N1,N2,N3",
                    help="decompose a seeded synthetic instance instead")

    t1 = sub.add_parser("table1", parents=[common], help="triples satisfying the module inequality")
    t1.add_argument("--p", type=int, required=True)
    t1.add_argument("--max-dim", type=int, required=True)

    la = sub.add_parser("lattice", parents=[common], help="star check on a Lie lattice (JSON)")
    la.add_argument("spec")
    la.add_argument("--d-expected", type=int, default=None)

    ca = sub.add_parser("catalog", parents=[common], help="built-in suites")
    ca.add_argument("action", choices=("list",))

    rc = sub.add_parser("recheck", parents=[common], help="re-verify witnesses from a report")
    rc.add_argument("spec")
    rc.add_argument("report")
    return ap


COMMANDS = {"verify": cmd_verify, "profile": cmd_profile, "decompose": cmd_decompose,
            "table1": cmd_table1, "lattice": cmd_lattice, "catalog": cmd_catalog,
            "recheck": cmd_recheck}

INPUT_ERRORS = (InputError, SpecSyntaxError, SpecSemanticError, ConstraintViolation,
                NotOrderDividingP, NotAntisymmetric, JacobiFails)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    args.precision_int = None
    if args.command == "lattice" and args.precision not in (None, "auto"):
        try:
            args.precision_int = int(args.precision)
        except ValueError:
            print("error: --precision must be 'auto' or an integer", file=sys.stderr)
            return EXIT_INPUT
    report = new_report(args.command if args.command != "verify" else f"verify {args.check}")
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args, report)
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CertificateUnavailable, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        report["error"] = str(exc)
        code = EXIT_NOCERT
    except (ConstgenError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.timing:
        report["timing"] = {"seconds": time.perf_counter() - start}
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = render_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
