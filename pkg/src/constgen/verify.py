"""Checks of generating-number properties on certified quotients.

All checkers walk the subgroups of index at most p^m breadth first, in
(index, canonical key) order, so the first violation found is a witness of
minimal index with a deterministic tie-break.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Any

from . import intlin
from .catalog import (
    Abelian,
    CustomAffine,
    MatrixSplit,
    MaxClass3,
    Quotient,
    ScalarSplit,
    TorsionScalar,
    build,
)
from .errors import CertificateUnavailable
from .pgroup import FiniteGroup, SubgroupEntry, all_subgroups_up_to_index, subgroup_closure

_ENUM_CACHE: "weakref.WeakKeyDictionary[FiniteGroup, tuple[int, list]]" = weakref.WeakKeyDictionary()


def _unpack(Q, m):
    if isinstance(Q, Quotient):
        cert = Q.certificate
        if cert.mode == "Failed":
            raise CertificateUnavailable("quotient has a failed certificate")
        if m > cert.m:
            raise CertificateUnavailable(f"certificate covers index p^{cert.m}, not p^{m}")
        return Q.group, cert.mode
    return Q, None


def enumerate_entries(G: FiniteGroup, m: int) -> list[SubgroupEntry]:
    """Cached all_subgroups_up_to_index; a deeper cached run serves shallower calls."""
    hit = _ENUM_CACHE.get(G)
    if hit is not None and hit[0] >= m:
        bound = G.p**m
        return [e for e in hit[1] if e.index <= bound]
    entries = all_subgroups_up_to_index(G, m)
    _ENUM_CACHE[G] = (m, entries)
    return entries


@dataclass(frozen=True)
class Witness:
    generators: tuple  # AffineElement, or integer vectors for lattice witnesses
    index: int
    d_found: int
    d_expected: int
    key: str
    verified: bool

    def to_json(self) -> dict:
        return {"index": self.index, "d_found": self.d_found, "d_expected": self.d_expected,
                "key": self.key, "verified": self.verified,
                "generators": [g.to_json() if hasattr(g, "to_json") else list(g)
                               for g in self.generators]}


@dataclass(frozen=True)
class Verdict:
    check: str
    outcome: str  # "Pass" or "Witness"
    witness: Witness | None
    certificate_mode: str | None
    max_index: int
    checked: int
    violations: tuple = field(default=())  # (index, d, count) over all violations found
    witnesses: tuple = field(default=())  # first witness for each distinct d_found

    def witness_with_d(self, d: int) -> Witness | None:
        return next((w for w in self.witnesses if w.d_found == d), None)

    @property
    def passed(self) -> bool:
        return self.outcome == "Pass"

    def to_json(self) -> dict:
        return {"check": self.check, "outcome": self.outcome,
                "certificate": self.certificate_mode, "max_index": self.max_index,
                "subgroups_checked": self.checked,
                "violations": [list(v) for v in self.violations],
                "witness": self.witness.to_json() if self.witness else None,
                "witnesses_by_d": [w.to_json() for w in self.witnesses]}


def make_witness(G: FiniteGroup, entry: SubgroupEntry, d_expected: int) -> Witness:
    S = entry.subgroup
    gens = tuple(G.element(i) for i in S.mingens)
    again = subgroup_closure(G, list(S.mingens))
    ok = again.key == S.key and again.d == entry.d and again.index == entry.index
    return Witness(gens, entry.index, entry.d, d_expected, S.key, ok)


def _census(items):
    counts: dict[tuple, int] = {}
    for e in items:
        counts[(e.index, e.d)] = counts.get((e.index, e.d), 0) + 1
    return tuple((i, d, c) for (i, d), c in sorted(counts.items()))


def _scan(check, Q, m, predicate, expected_of):
    G, mode = _unpack(Q, m)
    entries = enumerate_entries(G, m)
    bad = [e for e in entries if not predicate(e)]
    firsts: dict[int, SubgroupEntry] = {}
    for e in bad:
        firsts.setdefault(e.d, e)
    witnesses = tuple(make_witness(G, e, expected_of(e)) for e in firsts.values())
    return Verdict(check, "Witness" if bad else "Pass", witnesses[0] if bad else None, mode,
                   G.p**m, len(entries), _census(bad), witnesses)


def group_d(Q) -> int:
    G = Q.group if isinstance(Q, Quotient) else Q
    return G.whole().d


def star_check(Q, m: int, d_expected: int | None = None) -> Verdict:
    """d(H) == d_expected for every subgroup of index <= p^m."""
    d = group_d(Q) if d_expected is None else d_expected
    return _scan("star", Q, m, lambda e: e.d == d, lambda e: d)


def en_check(Q, m: int, n: int) -> Verdict:
    """d(H) - n == |G:H| (d(G) - n) for every subgroup of index <= p^m."""
    dG = group_d(Q)
    return _scan(f"E_{n}", Q, m, lambda e: e.d - n == e.index * (dG - n),
                 lambda e: n + e.index * (dG - n))


@dataclass(frozen=True)
class DefectRow:
    key: str
    index: int
    lhs: int
    rhs: int

    @property
    def defect(self) -> int:
        return self.lhs - self.rhs


@dataclass(frozen=True)
class SchreierReport:
    rows: tuple
    free_like: bool
    certificate_mode: str | None

    def to_json(self) -> dict:
        return {"free_like": self.free_like, "certificate": self.certificate_mode,
                "rows": [{"key": r.key, "index": r.index, "lhs": r.lhs, "rhs": r.rhs}
                         for r in self.rows]}


def schreier_defect_report(Q, m: int) -> SchreierReport:
    G, mode = _unpack(Q, m)
    dG = group_d(G)
    rows = tuple(DefectRow(e.subgroup.key, e.index, e.d - 1, e.index * (dG - 1))
                 for e in enumerate_entries(G, m))
    return SchreierReport(rows, all(r.lhs == r.rhs for r in rows), mode)


@dataclass(frozen=True)
class DProfile:
    entries: tuple  # (index, d, count), sorted

    def to_json(self) -> list:
        return [{"index": i, "d": d, "count": c} for i, d, c in self.entries]


def d_profile(Q, m: int) -> DProfile:
    G, _ = _unpack(Q, m)
    return DProfile(_census(enumerate_entries(G, m)))


# --------------------------------------------------------------------------
# theorem oracle


@dataclass(frozen=True)
class OracleResult:
    status: str  # "Listed", "NotListed" or "Unknown"
    item: int | None = None
    params: dict = field(default_factory=dict)
    reason: str = ""

    def to_json(self) -> dict:
        return {"status": self.status, "item": self.item, "params": self.params,
                "reason": self.reason}


def _scalar_verdict(p, d, form) -> OracleResult:
    if form.kind == "Trivial":
        return OracleResult("Listed", 1, {"p": p, "d": d}, "trivial action")
    if form.kind == "MinusOne":
        return OracleResult("Listed", 4, {"p": p, "d": d}, "scalar -1")
    if p > 2 or form.s >= 2:
        return OracleResult("Listed", 2, {"p": p, "d": d, "form": str(form)}, "scalar action")
    return OracleResult("NotListed", reason=f"scalar normal form {form} outside the list")


def theorem_oracle(spec) -> OracleResult:
    """Shape classifier over specs; never searches for isomorphisms."""
    if isinstance(spec, Abelian):
        return OracleResult("Listed", 1, {"p": spec.p, "d": spec.d}, "abelian")
    if isinstance(spec, ScalarSplit):
        return _scalar_verdict(spec.p, spec.d, spec.form)
    if isinstance(spec, MatrixSplit):
        lam = spec.scalar()
        if lam is None:
            return OracleResult("NotListed", reason="non-scalar action on A")
        return _scalar_verdict(spec.p, spec.k + 1, ScalarSplit(spec.p, spec.k + 1, lam).form)
    if isinstance(spec, MaxClass3):
        return OracleResult("Listed", 3, {"p": 3, "d": 2}, "maximal class")
    if isinstance(spec, TorsionScalar):
        return OracleResult("NotListed", reason="torsion top other than the maximal class group")
    if isinstance(spec, CustomAffine):
        return _custom_oracle(spec)
    raise TypeError(f"unknown spec {spec!r}")


def _point_group(gens, cap=48):
    """Closure of the linear parts as exact matrices, or None if it looks infinite."""
    n = len(gens[0][0])
    start = intlin.freeze(intlin.identity(n))
    elems = {start}
    frontier = [start]
    lin = [intlin.freeze(M) for M, _ in gens]
    while frontier:
        nxt = []
        for A in frontier:
            for B in lin:
                C = intlin.freeze(intlin.matmul(A, B))
                if C not in elems:
                    if len(elems) >= cap or max(abs(x) for r in C for x in r) > 10**6:
                        return None
                    elems.add(C)
                    nxt.append(C)
        frontier = nxt
    return elems


def _coset_reps(gens):
    """One affine element (M, v) of the group for each linear part M."""
    n = len(gens[0][0])
    ident = intlin.freeze(intlin.identity(n))
    reps = {ident: (intlin.identity(n), [0] * n)}
    frontier = [ident]
    while frontier:
        nxt = []
        for A in frontier:
            MA, vA = reps[A]
            for M, v in gens:
                B = intlin.freeze(intlin.matmul(MA, M))
                if B not in reps:
                    reps[B] = (intlin.matmul(MA, M), [a + b for a, b in zip(intlin.matvec(MA, v), vA)])
                    nxt.append(B)
        frontier = nxt
    return reps


def _translation_vectors(gens, reps):
    """Schreier generators of the translation subgroup: r_A s r_(AB)^-1."""
    vecs = []
    for A, (MA, vA) in reps.items():
        for M, v in gens:
            # (MA, vA) o (M, v) has linear part MA M and translation MA v + vA
            B = intlin.freeze(intlin.matmul(MA, M))
            w = [a + b for a, b in zip(intlin.matvec(MA, v), vA)]
            _, vB = reps[B]
            vecs.append([a - b for a, b in zip(w, vB)])
    return [v for v in vecs if any(v)]


def _custom_oracle(spec: CustomAffine) -> OracleResult:
    gens = [(list(map(list, M)), list(v)) for M, v in spec.gens]
    n = spec.n
    P = _point_group(gens)
    if P is None:
        return OracleResult("Unknown", reason="linear parts generate an infinite group")
    reps = _coset_reps(gens)
    trans = _translation_vectors(gens, reps)
    r = intlin.rank(trans) if trans else 0
    if r < n:
        return OracleResult("Unknown", reason="translation subgroup is not of full rank")
    order = len(P)
    if order == 1:
        return OracleResult("Listed", 1, {"p": spec.p, "d": n}, "translations only")
    for MA, vA in reps.values():
        # (MA, vA)^2 = (MA^2, MA vA + vA); every listed group is torsion free
        if (not intlin.is_identity(MA) and intlin.is_identity(intlin.matmul(MA, MA))
                and not any(a + b for a, b in zip(intlin.matvec(MA, vA), vA))):
            return OracleResult("NotListed", reason="contains an element of order 2")
    invol = [A for A in P if not intlin.is_identity(A) and intlin.is_identity(intlin.matmul(A, A))]
    if order == 4 and len(invol) == 3:
        return OracleResult("NotListed", reason="Klein four point group")
    if spec.p == 2 and order == 2:
        (A,) = invol
        fixed = n - intlin.rank(intlin.sub(A, intlin.identity(n)))
        if fixed != 1:
            return OracleResult("NotListed",
                                reason=f"involution fixes a rank-{fixed} sublattice, not rank 1")
        return OracleResult("Unknown", reason="point group C2 with rank-1 fixed lattice")
    if spec.p == 3 and order == 3:
        return OracleResult("Unknown", reason="point group C3")
    return OracleResult("NotListed", reason=f"point group of order {order} is not 1, C2 or C3")


# --------------------------------------------------------------------------
# witness recheck


def recheck_witness(spec, m: int, witness: dict, precision: int | str = "auto") -> dict[str, Any]:
    """Rebuild the quotient and recompute index and d of a reported witness."""
    from .pgroup import AffineElement

    Q = build(spec, m, precision=precision)
    G = Q.group
    gens = [AffineElement.from_parts(G.p, G.K, g["M"], g["v"]) for g in witness["generators"]]
    S = subgroup_closure(G, gens)
    ok = S.index == witness["index"] and S.d == witness["d_found"]
    return {"index": S.index, "d": S.d, "key": S.key, "matches": ok,
            "certificate": Q.certificate.mode}
