"""Group constructions, their finite quotients, and precision certificates.

Every construction is realised inside Aff_n(Z_p) by exact integer
generators and then reduced mod p^K.  Groups with an infinite procyclic top
``<y> |x A`` get an extra counter coordinate: y maps (c, a) to (c + 1, T a),
so the image of y keeps order p^K in the quotient even when T has small
order (T = -1, for instance).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .errors import BudgetExceeded, CertificateUnavailable, ConstraintViolation, NotPPowerOrder
from .padic import (
    Lattice,
    RMatrix,
    Residue,
    ScalarForm,
    full_lattice,
    is_prime,
    lattice_from_columns,
    log_p,
    matrix_order_mod,
    scalar_normal_form,
)
from .pgroup import (
    DEFAULT_BUDGET,
    AffineElement,
    FiniteGroup,
    all_subgroups_up_to_index,
    closure,
    frattini_series,
    subgroup_closure,
)

OMEGA = ((0, -1), (1, -1))  # multiplication by a primitive cube root of unity on Z + Z*omega


# --------------------------------------------------------------------------
# specs


def _check_prime(p):
    if not is_prime(p):
        raise ConstraintViolation(f"{p} is not prime")


def _ident(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class Abelian:
    p: int
    d: int
    listed: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        if self.d < 1:
            raise ConstraintViolation("rank must be positive")


@dataclass(frozen=True)
class ScalarSplit:
    """<y> |x Z_p^(d-1) with y acting as the scalar ``lam``."""

    p: int
    d: int
    lam: int
    listed: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        if self.d < 2:
            raise ConstraintViolation("a split scalar group needs d >= 2")
        self.form  # validates the scalar

    @property
    def form(self) -> ScalarForm:
        return scalar_normal_form(self.p, Residue(self.p, _form_precision(self.p, self.lam), self.lam))


def _form_precision(p, lam):
    # enough digits to see v(lam - 1) and v(lam + 1) exactly
    K = 3
    while p**K <= 4 * (abs(lam) + 1):
        K += 1
    return K


@dataclass(frozen=True)
class MatrixSplit:
    """<y> |x Z_p^k with y acting by the exact integer matrix T."""

    p: int
    T: tuple
    listed: bool = field(default=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        T = tuple(tuple(int(x) for x in r) for r in self.T)
        object.__setattr__(self, "T", T)
        if not T or any(len(r) != len(T) for r in T):
            raise ConstraintViolation("T must be a non-empty square matrix")
        try:
            matrix_order_mod(RMatrix.from_ints(self.p, 1, T))
        except NotPPowerOrder:
            raise ConstraintViolation("T mod p must have p-power order") from None
        except ArithmeticError:
            raise ConstraintViolation("T is not invertible mod p") from None

    @property
    def k(self) -> int:
        return len(self.T)

    def scalar(self) -> int | None:
        """The scalar if T is a scalar matrix, else None."""
        lam = self.T[0][0]
        if self.T == tuple(tuple(lam if i == j else 0 for j in range(self.k)) for i in range(self.k)):
            return lam
        return None


@dataclass(frozen=True)
class MaxClass3:
    listed: bool = field(default=False, compare=False)

    @property
    def p(self) -> int:
        return 3


@dataclass(frozen=True)
class TorsionScalar:
    """C_2 |x Z_2^rank with the generator of C_2 acting as -1."""

    rank: int
    p: int = 2
    lam: int = -1
    listed: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.p != 2 or self.lam != -1:
            raise ConstraintViolation("torsion scalar tops are only supported for p=2, lambda=-1")
        if self.rank < 1:
            raise ConstraintViolation("rank must be positive")


@dataclass(frozen=True)
class CustomAffine:
    """Closed subgroup of Aff_n(Z_p) generated by exact integer affine maps."""

    p: int
    gens: tuple  # ((M rows), (v)) pairs
    name: str = field(default="", compare=False)
    dim: int | None = field(default=None, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        gens = tuple((tuple(tuple(int(x) for x in r) for r in M), tuple(int(x) for x in v))
                     for M, v in self.gens)
        object.__setattr__(self, "gens", gens)
        if not gens:
            raise ConstraintViolation("at least one generator is required")
        n = len(gens[0][0])
        for M, v in gens:
            if len(M) != n or any(len(r) != n for r in M) or len(v) != n:
                raise ConstraintViolation("generators must share one dimension")

    @property
    def n(self) -> int:
        return len(self.gens[0][0])


GroupSpec = Abelian | ScalarSplit | MatrixSplit | MaxClass3 | TorsionScalar | CustomAffine
SPLIT_KINDS = (Abelian, ScalarSplit, MatrixSplit, MaxClass3, TorsionScalar)


def family(item: int, p: int | None = None, d: int | None = None, s: int | None = None,
           sign: int = 1, lam: int | None = None) -> GroupSpec:
    """Validated spec for item 1-4 of the classification list."""
    if item == 1:
        if p is None or d is None:
            raise ConstraintViolation("item 1 needs p and d")
        return Abelian(p, d, listed=True)
    if item == 2:
        if p is None or d is None:
            raise ConstraintViolation("item 2 needs p and d")
        _check_prime(p)
        if d < 2:
            raise ConstraintViolation("item 2 needs d >= 2")
        if lam is None:
            if s is None:
                raise ConstraintViolation("item 2 needs s or lam")
            if sign not in (1, -1):
                raise ConstraintViolation("sign must be +1 or -1")
            if p == 2 and s < 2:
                raise ConstraintViolation("p = 2 requires s >= 2")
            if p > 2 and (s < 1 or sign == -1):
                raise ConstraintViolation("p > 2 requires lambda = 1 + p^s with s >= 1")
            lam = sign * (1 + p**s)
        spec = ScalarSplit(p, d, lam, listed=True)
        form = spec.form
        if form.kind not in ("Plus", "Minus") or (p == 2 and form.s < 2):
            raise ConstraintViolation(f"scalar {lam} normalises to {form}, not an item-2 scalar")
        return spec
    if item == 3:
        if p not in (None, 3) or d not in (None, 2):
            raise ConstraintViolation("item 3 exists only for p = 3, d = 2")
        return MaxClass3(listed=True)
    if item == 4:
        if p not in (None, 2) or d is None or d < 2:
            raise ConstraintViolation("item 4 needs p = 2 and d >= 2")
        return ScalarSplit(2, d, -1, listed=True)
    raise ConstraintViolation(f"no item {item} in the list")


def analytic_dim(spec: GroupSpec) -> int | None:
    if isinstance(spec, (Abelian, ScalarSplit)):
        return spec.d
    if isinstance(spec, MatrixSplit):
        return spec.k + 1
    if isinstance(spec, MaxClass3):
        return 2
    if isinstance(spec, TorsionScalar):
        return spec.rank
    return spec.dim


# --------------------------------------------------------------------------
# affine realisation


@dataclass(frozen=True)
class SplitLayout:
    """How a split single-top spec sits inside Aff_n."""

    n: int
    T: tuple  # exact action on A
    top: str | None  # "counter", "torsion" or None
    top_exp: int | None  # log_p of the top order for torsion tops
    offset: int  # first A coordinate

    @property
    def k(self) -> int:
        return len(self.T)


def split_layout(spec) -> SplitLayout:
    if isinstance(spec, Abelian):
        return SplitLayout(spec.d, _ident(spec.d), None, None, 0)
    if isinstance(spec, ScalarSplit):
        k = spec.d - 1
        T = tuple(tuple(spec.lam if i == j else 0 for j in range(k)) for i in range(k))
        return SplitLayout(spec.d, T, "counter", None, 1)
    if isinstance(spec, MatrixSplit):
        return SplitLayout(spec.k + 1, spec.T, "counter", None, 1)
    if isinstance(spec, MaxClass3):
        return SplitLayout(2, OMEGA, "torsion", 1, 0)
    if isinstance(spec, TorsionScalar):
        k = spec.rank
        T = tuple(tuple(-1 if i == j else 0 for j in range(k)) for i in range(k))
        return SplitLayout(k, T, "torsion", 1, 0)
    raise TypeError(f"{type(spec).__name__} is not a split single-top spec")


def top_generator(lay: SplitLayout):
    n, o = lay.n, lay.offset
    M = [[0] * n for _ in range(n)]
    if lay.top == "counter":
        M[0][0] = 1
    for i in range(lay.k):
        for j in range(lay.k):
            M[o + i][o + j] = lay.T[i][j]
    v = [0] * n
    if lay.top == "counter":
        v[0] = 1
    return M, v


def translation(n, v):
    return [list(r) for r in _ident(n)], list(v)


def exact_generators(spec: GroupSpec) -> tuple[int, list]:
    """(n, [(M, v), ...]) exact integer generators of the group."""
    if isinstance(spec, CustomAffine):
        return spec.n, [(list(map(list, M)), list(v)) for M, v in spec.gens]
    lay = split_layout(spec)
    gens = []
    if lay.top is not None:
        gens.append(top_generator(lay))
    for i in range(lay.k):
        v = [0] * lay.n
        v[lay.offset + i] = 1
        gens.append(translation(lay.n, v))
    return lay.n, gens


def quotient_at(spec: GroupSpec, K: int, budget: int = DEFAULT_BUDGET) -> FiniteGroup:
    """The image of the group in Aff_n(Z/p^K), without a certificate."""
    n, gens = exact_generators(spec)
    return closure(spec.p, K, n, gens, budget=budget)


# --------------------------------------------------------------------------
# symbolic Frattini series


@dataclass(frozen=True)
class PhiSeriesEntry:
    """Phi^j(G) = <y^(p^top_exp)> |x lattice; top_exp None means no top part."""

    level: int
    top_exp: int | None
    lattice: Lattice


def symbolic_phi_series(spec: GroupSpec, j: int, precision: int | None = None) -> list[PhiSeriesEntry]:
    """Levels 0..j via L_{i+1} = p L_i + (T^(p^i) - 1) L_i."""
    lay = split_layout(spec)
    p = spec.p
    K = precision if precision is not None else j + 3
    k = lay.k
    T = RMatrix.from_ints(p, K, lay.T)
    I = RMatrix.identity(p, K, k)
    L = full_lattice(p, K, k)
    out = []
    Tpow = T  # T^(p^i)
    for i in range(j + 1):
        if lay.top is None:
            top = None
        elif lay.top == "torsion" and i >= lay.top_exp:
            top = None
        else:
            top = i
        out.append(PhiSeriesEntry(i, top, L))
        if i == j:
            break
        D = Tpow - I
        cols = [[(p * x) for x in c] for c in L.basis]
        cols += [list(D.apply(c)) for c in L.basis]
        L = lattice_from_columns(p, K, k, cols)
        Tpow = Tpow**p
    return out


def realise_phi_entry(spec: GroupSpec, entry: PhiSeriesEntry, Q: FiniteGroup):
    """The subgroup of Q matching a symbolic series entry."""
    lay = split_layout(spec)
    ids = []
    if entry.top_exp is not None:
        M, v = top_generator(lay)
        y = Q.id_of(_reduce_el(Q, M, v))
        ids.append(Q.power(y, spec.p**entry.top_exp))
    for c in entry.lattice.basis:
        v = [0] * lay.n
        for i, x in enumerate(c):
            v[lay.offset + i] = x
        ids.append(Q.id_of(_reduce_el(Q, *translation(lay.n, v))))
    return subgroup_closure(Q, ids)


def _reduce_el(Q, M, v):
    return AffineElement.from_parts(Q.p, Q.K, M, v)


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    mode: str  # "Exact", "Heuristic" or "Failed"
    m: int
    K: int
    evidence: dict

    def to_json(self) -> dict:
        return {"mode": self.mode, "max_index_exponent": self.m, "precision": self.K,
                "evidence": self.evidence}


def census(Q: FiniteGroup, m: int) -> list[tuple[int, int, int]]:
    """Sorted (index, d, count) triples for subgroups of index <= p^m."""
    counts: dict[tuple[int, int], int] = {}
    for e in all_subgroups_up_to_index(Q, m):
        counts[(e.index, e.d)] = counts.get((e.index, e.d), 0) + 1
    return sorted((i, d, c) for (i, d), c in counts.items())


def _exact_check(spec, K, m):
    lay = split_layout(spec)
    p = spec.p
    series = symbolic_phi_series(spec, m + 1, precision=max(K, m + 1) + 2)
    target = series[m + 1]
    # kernel of reduction mod p^K: <y^(p^kappa)> x p^K A
    if lay.top is None:
        top_ok, kappa = True, None
    else:
        e_T = log_p(matrix_order_mod(RMatrix.from_ints(p, K, lay.T)), p)
        if lay.top == "counter":
            kappa = max(K, e_T)
            top_ok = kappa >= m + 1
        else:
            kappa = e_T
            top_ok = kappa >= min(m + 1, lay.top_exp)
    kernel_lattice_ok = all(target.lattice.contains([p**K * int(i == j) for j in range(lay.k)])
                            for i in range(lay.k))
    evidence = {
        "kernel": {"top_exponent": kappa, "lattice_exponent": K},
        "phi_series": [{"level": e.level, "top_exponent": e.top_exp,
                        "lattice_pivots": list(e.lattice.pivots)} for e in series],
        "top_contained": top_ok,
        "lattice_contained": kernel_lattice_ok,
    }
    return top_ok and kernel_lattice_ok, evidence


def _heuristic_check(spec, K, m, budget):
    lo = quotient_at(spec, K, budget)
    hi = quotient_at(spec, K + 1, budget)
    image = hi.reduce_ids(lo)
    kernel = (image == lo.identity_id).nonzero()[0]
    phi = frattini_series(hi, m + 1)[m + 1]
    kernel_ok = bool(phi.mask[kernel].all())
    c_lo, c_hi = census(lo, m), census(hi, m)
    evidence = {
        "levels": [K, K + 1],
        "kernel_order": int(kernel.shape[0]),
        "kernel_in_phi": kernel_ok,
        "census": [list(t) for t in c_lo],
        "census_agrees": c_lo == c_hi,
    }
    return kernel_ok and c_lo == c_hi, evidence, lo


def certify(spec: GroupSpec, K: int, m: int, budget: int = DEFAULT_BUDGET) -> Certificate:
    cert, _ = _certify(spec, K, m, budget)
    return cert


def _certify(spec, K, m, budget):
    evidence: dict[str, Any] = {}
    if isinstance(spec, SPLIT_KINDS):
        ok, ev = _exact_check(spec, K, m)
        evidence["exact"] = ev
        if ok:
            return Certificate("Exact", m, K, evidence), None
    try:
        ok, ev, lo = _heuristic_check(spec, K, m, budget)
    except BudgetExceeded as exc:
        evidence["heuristic"] = {"error": str(exc)}
        return Certificate("Failed", m, K, evidence), None
    evidence["heuristic"] = ev
    if ok:
        return Certificate("Heuristic", m, K, evidence), lo
    return Certificate("Failed", m, K, evidence), None


@dataclass
class Quotient:
    """A finite quotient together with the certificate that makes it usable."""

    spec: GroupSpec
    group: FiniteGroup
    certificate: Certificate

    def __iter__(self):
        return iter((self.group, self.certificate))

    @property
    def m(self) -> int:
        return self.certificate.m


def build(spec: GroupSpec, m: int, precision: int | str = "auto",
          budget: int = DEFAULT_BUDGET, max_extra: int = 3) -> Quotient:
    """Quotient at the smallest precision K in [m+1, m+1+max_extra] that certifies."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if precision == "auto":
        levels = range(m + 1, m + 2 + max_extra)
    else:
        levels = [int(precision)]
    last = None
    for K in levels:
        cert, lo = _certify(spec, K, m, budget)
        last = cert
        if cert.mode == "Failed":
            continue
        group = lo if lo is not None else quotient_at(spec, K, budget)
        return Quotient(spec, group, cert)
    exc = CertificateUnavailable(f"no certificate for m={m} at precision K in {list(levels)}")
    exc.evidence = last.evidence
    raise exc
