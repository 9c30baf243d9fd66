"""Z_p C_p-lattices: decomposition into the three indecomposables.

A lattice with an action T of order p splits as n1 trivial summands I1,
n2 cyclotomic summands I2 (rank p-1) and n3 free summands I3 (rank p).  The
counts are recovered from two exact invariants: the rank r of the fixed
lattice F, which is n1 + n3, and the index of the norm image N(M) in F,
which is p^n1 because the norm of I1 is multiplication by p while the norm
of I3 maps onto its fixed line.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import intlin
from .errors import ConstraintViolation, NotOrderDividingP, PrecisionExhausted
from .padic import RMatrix, is_prime, snf


@dataclass(frozen=True)
class CpLattice:
    p: int
    T: tuple

    def __post_init__(self):
        object.__setattr__(self, "T", intlin.freeze(self.T))
        check_order_p(self.p, self.T)

    @property
    def n(self) -> int:
        return len(self.T)


@dataclass(frozen=True)
class DecompositionCounts:
    n1: int
    n2: int
    n3: int
    p: int

    def __post_init__(self):
        if min(self.n1, self.n2, self.n3) < 0:
            raise ConstraintViolation("counts must be non-negative")

    @property
    def n(self) -> int:
        return self.n1 + (self.p - 1) * self.n2 + self.p * self.n3

    def astuple(self) -> tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)

    def __add__(self, other: "DecompositionCounts") -> "DecompositionCounts":
        if self.p != other.p:
            raise ValueError("counts over different primes")
        return DecompositionCounts(self.n1 + other.n1, self.n2 + other.n2, self.n3 + other.n3, self.p)


def _norm_and_check(p: int, T):
    """I + T + ... + T^(p-1), raising NotOrderDividingP unless T^p = I."""
    if not is_prime(p):
        raise ConstraintViolation(f"{p} is not prime")
    T = [list(r) for r in T]
    n = len(T)
    if n == 0 or any(len(r) != n for r in T):
        raise NotOrderDividingP("T must be a non-empty square matrix")
    acc = intlin.identity(n)
    X = intlin.identity(n)
    for _ in range(p - 1):
        X = intlin.matmul(X, T)
        acc = intlin.add(acc, X)
    if not intlin.is_identity(intlin.matmul(X, T)):
        raise NotOrderDividingP(f"T^{p} is not the identity")
    return acc


def check_order_p(p: int, T) -> None:
    """Raise NotOrderDividingP unless T is a square integer matrix with T^p = I."""
    _norm_and_check(p, T)


def norm_map(p: int, T):
    return _norm_and_check(p, T)


def decompose(p: int, T) -> DecompositionCounts:
    N = _norm_and_check(p, T)
    T = [list(r) for r in T]
    n = len(T)
    r = n - intlin.rank(intlin.sub(T, intlin.identity(n)))
    # (T - I) N = T^p - I = 0, so N(M) lies in F and rank N <= r; the SNF
    # below resolving r invariants gives rank N >= r, hence equality
    K = 2
    while True:
        # elementary divisors of N are all 1 or p, so K = 2 normally suffices
        S = snf(RMatrix.from_ints(p, K, N))
        if S.rank == r:
            n1 = sum(S.valuations[:r])
            break
        K += 1
        if K > 4 * n + 4:
            raise PrecisionExhausted("norm map invariants did not resolve")
    n3 = r - n1
    rest = n - n1 - p * n3
    if n3 < 0 or rest < 0 or rest % (p - 1):
        raise AssertionError("inconsistent decomposition counts")
    return DecompositionCounts(n1, rest // (p - 1), n3, p)


def rational_d(counts: DecompositionCounts) -> int:
    """Minimal number of generators of Q_p (x) M as a Q_p C_p-module."""
    return max(counts.n1, counts.n2) + counts.n3


def inequality_check(p: int, counts: DecompositionCounts) -> bool:
    n1, n2, n3 = counts.astuple()
    return 1 + max(0, n2 - n1) >= (p - 1) * (n2 + n3)


# Table rows: (label, condition, n1 range, n2 range, n3 range); ranges are (lo, hi or None)
_ROWS = {
    2: (
        ("T 2.1", "n1 > n2", (2, None), (0, 0), (0, 0)),
        ("T 2.2", "n1 > n2", (2, None), (1, 1), (0, 0)),
        ("T 2.3", "n1 > n2", (1, None), (0, 0), (1, 1)),
        ("T 2.4", "n1 <= n2", (0, 0), (2, None), (0, 0)),
        ("T 2.5", "n1 <= n2", (1, 1), (1, None), (0, 0)),
        ("T 2.6", "n1 <= n2", (0, 0), (0, None), (1, 1)),
    ),
    3: (
        ("T 3.1", "n1 > n2", (2, None), (0, 0), (0, 0)),
        ("T 3.2", "n1 <= n2", (0, 0), (1, 1), (0, 0)),
    ),
}
_GENERIC = (("p>=5", "", (2, None), (0, 0), (0, 0)),)


def _in(x, rng):
    lo, hi = rng
    return x >= lo and (hi is None or x <= hi)


def table_rows(p: int) -> tuple:
    return _ROWS.get(p, _GENERIC)


def table1_label(p: int, counts: DecompositionCounts) -> str | None:
    """Case label of a triple, or None when it satisfies no row."""
    t = counts.astuple()
    hits = [row[0] for row in table_rows(p) if all(_in(x, r) for x, r in zip(t, row[2:]))]
    if len(hits) > 1:
        raise AssertionError(f"overlapping table rows {hits}")
    return hits[0] if hits else None


@dataclass(frozen=True)
class Table1Row:
    n1: int
    n2: int
    n3: int
    n: int
    label: str | None

    def to_json(self) -> dict:
        return {"n1": self.n1, "n2": self.n2, "n3": self.n3, "n": self.n, "label": self.label}


def table1(p: int, n_max: int) -> list[Table1Row]:
    """Every triple with 2 <= n1 + (p-1)n2 + p n3 <= n_max satisfying the inequality."""
    if not is_prime(p):
        raise ConstraintViolation(f"{p} is not prime")
    if n_max < 2:
        raise ConstraintViolation("n_max must be at least 2")
    out = []
    for n3 in range(n_max // p + 1):
        for n2 in range((n_max - p * n3) // (p - 1) + 1):
            for n1 in range(n_max - p * n3 - (p - 1) * n2 + 1):
                c = DecompositionCounts(n1, n2, n3, p)
                if c.n >= 2 and inequality_check(p, c):
                    out.append(Table1Row(n1, n2, n3, c.n, table1_label(p, c)))
    out.sort(key=lambda r: (r.n, r.n1, r.n2, r.n3))
    return out


# --------------------------------------------------------------------------
# synthetic instances


def cyclotomic_companion(p: int):
    """Companion matrix of 1 + x + ... + x^(p-1)."""
    k = p - 1
    C = [[0] * k for _ in range(k)]
    for i in range(1, k):
        C[i][i - 1] = 1
    for i in range(k):
        C[i][k - 1] = -1
    return C


def cyclic_permutation(p: int):
    return [[int(i == (j + 1) % p) for j in range(p)] for i in range(p)]


def block_instance(p: int, counts: DecompositionCounts):
    blocks = ([[[1]]] * counts.n1 + [cyclotomic_companion(p)] * counts.n2
              + [cyclic_permutation(p)] * counts.n3)
    return intlin.block_diag(blocks)


def random_unimodular(n: int, rng: random.Random, bound: int = 3):
    """L * U with unit triangular factors, entries of each factor in [-bound, bound]."""
    L = intlin.identity(n)
    U = intlin.identity(n)
    for i in range(n):
        for j in range(i):
            L[i][j] = rng.randint(-bound, bound)
            U[j][i] = rng.randint(-bound, bound)
    return L, U


def _unit_triangular_inverse(A, lower: bool):
    n = len(A)
    X = intlin.identity(n)
    idx = range(n) if lower else range(n - 1, -1, -1)
    for i in idx:
        cols = range(i) if lower else range(i + 1, n)
        for j in range(n):
            X[i][j] = int(i == j) - sum(A[i][k] * X[k][j] for k in cols)
    return X


def synth_instance(p: int, counts: DecompositionCounts, seed: int) -> CpLattice:
    """Block instance conjugated by a seeded unimodular matrix."""
    base = block_instance(p, counts)
    n = len(base)
    if n == 0:
        raise ConstraintViolation("counts describe the zero lattice")
    L, U = random_unimodular(n, random.Random(seed))
    C = intlin.matmul(L, U)
    Cinv = intlin.matmul(_unit_triangular_inverse(U, lower=False), _unit_triangular_inverse(L, lower=True))
    return CpLattice(p, intlin.matmul(intlin.matmul(C, base), Cinv))


def all_counts(p: int, n_max: int, n_min: int = 1):
    """Every count triple with n_min <= n <= n_max."""
    for n3 in range(n_max // p + 1):
        for n2 in range((n_max - p * n3) // (p - 1) + 1):
            for n1 in range(n_max - p * n3 - (p - 1) * n2 + 1):
                c = DecompositionCounts(n1, n2, n3, p)
                if n_min <= c.n <= n_max:
                    yield c
