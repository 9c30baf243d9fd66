"""Arithmetic and linear algebra over Z/p^K.

Everything here works at an explicit precision ``K``.  A lattice at
precision ``K`` stands for a Z_p-lattice that contains ``p^K Z_p^n``; its
canonical form is a lower-triangular column basis whose diagonal entries
are exact powers of ``p``.  Operations refuse to guess when the precision
is too small and raise :class:`PrecisionExhausted` instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    DiscontinuousAction,
    InfiniteIndex,
    NonUnit,
    NotContained,
    NotPPowerOrder,
    PrecisionExhausted,
)


class _AtLeastK:
    """Saturated valuation: the residue vanishes at the working precision."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "AtLeastK"

    def __reduce__(self):
        return (_AtLeastK, ())

    # compares above every integer valuation
    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


AT_LEAST_K = _AtLeastK()


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def vp_int(x: int, p: int) -> int | None:
    """p-adic valuation of an exact integer; None for zero."""
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def log_p(q: int, p: int) -> int:
    """Exponent e with p^e == q; raises ValueError otherwise."""
    e = 0
    while q > 1 and q % p == 0:
        q //= p
        e += 1
    if q != 1:
        raise ValueError(f"not a power of {p}")
    return e


@dataclass(frozen=True)
class Residue:
    p: int
    K: int
    value: int

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("precision K must be >= 1")
        object.__setattr__(self, "value", self.value % self.p**self.K)

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if (other.p, other.K) != (self.p, self.K):
                raise ValueError("residues with different (p, K) cannot be combined")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Residue(self.p, self.K, self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Residue(self.p, self.K, self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Residue(self.p, self.K, o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else Residue(self.p, self.K, self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(self.p, self.K, -self.value)

    def __pow__(self, e: int):
        if e < 0:
            return unit_inverse(self) ** (-e)
        return Residue(self.p, self.K, pow(self.value, e, self.modulus))

    def __int__(self):
        return self.value


def val(x: Residue):
    """Saturated valuation of ``x``: an int below K, or AT_LEAST_K for zero."""
    if x.value == 0:
        return AT_LEAST_K
    return vp_int(x.value, x.p)


def unit_inverse(x: Residue) -> Residue:
    if x.value % x.p == 0:
        raise NonUnit(f"{x.value} is not a unit mod {x.p}^{x.K}")
    return Residue(x.p, x.K, pow(x.value, -1, x.modulus))


@dataclass(frozen=True)
class RMatrix:
    """Matrix over Z/p^K stored as a tuple of reduced integer rows."""

    p: int
    K: int
    entries: tuple

    def __post_init__(self):
        q = self.p**self.K
        rows = tuple(tuple(int(x) % q for x in row) for row in self.entries)
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix dimensions must be positive and rectangular")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def from_ints(cls, p: int, K: int, rows: Iterable[Iterable[int]]) -> "RMatrix":
        return cls(p, K, tuple(tuple(r) for r in rows))

    @classmethod
    def identity(cls, p: int, K: int, n: int) -> "RMatrix":
        return cls(p, K, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, p: int, K: int, cols: Sequence[Sequence[int]], n: int | None = None):
        if not cols:
            if n is None:
                raise ValueError("need the row count for an empty column list")
            return cls(p, K, tuple((0,) for _ in range(n)))
        return cls(p, K, tuple(zip(*cols)))

    @property
    def modulus(self) -> int:
        return self.p**self.K

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij) -> Residue:
        i, j = ij
        return Residue(self.p, self.K, self.entries[i][j])

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(col) for col in zip(*self.entries)]

    def _check(self, other: "RMatrix"):
        if (other.p, other.K) != (self.p, self.K):
            raise ValueError("matrices over different rings")

    def __matmul__(self, other: "RMatrix") -> "RMatrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        oc = other.columns()
        return RMatrix(self.p, self.K, tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in oc) for row in self.entries))

    def __add__(self, other: "RMatrix") -> "RMatrix":
        self._check(other)
        return RMatrix(self.p, self.K, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def __sub__(self, other: "RMatrix") -> "RMatrix":
        self._check(other)
        return RMatrix(self.p, self.K, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)))

    def scale(self, c: int) -> "RMatrix":
        return RMatrix(self.p, self.K, tuple(tuple(c * a for a in r) for r in self.entries))

    def __pow__(self, e: int) -> "RMatrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        result = RMatrix.identity(self.p, self.K, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def is_identity(self) -> bool:
        return all(a == int(i == j) for i, r in enumerate(self.entries) for j, a in enumerate(r))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        q = self.modulus
        return tuple(sum(a * b for a, b in zip(row, v)) % q for row in self.entries)

    def inverse(self) -> "RMatrix":
        """Gauss-Jordan inverse; raises NonUnit when the determinant is not a unit."""
        n, q, p = self.rows, self.modulus, self.p
        if n != self.cols:
            raise ValueError("inverse of a non-square matrix")
        a = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(self.entries)]
        for c in range(n):
            piv = next((r for r in range(c, n) if a[r][c] % p), None)
            if piv is None:
                raise NonUnit("matrix is not invertible mod p")
            a[c], a[piv] = a[piv], a[c]
            inv = pow(a[c][c], -1, q)
            a[c] = [(x * inv) % q for x in a[c]]
            for r in range(n):
                if r != c and a[r][c]:
                    f = a[r][c]
                    a[r] = [(x - f * y) % q for x, y in zip(a[r], a[c])]
        return RMatrix(p, self.K, tuple(tuple(r[n:]) for r in a))


# --------------------------------------------------------------------------
# lattices


@dataclass(frozen=True)
class Lattice:
    """Canonical lower-triangular column basis of a sublattice of Z_p^n.

    ``pivots[i]`` is the valuation of the diagonal entry of column ``i``,
    or None when the row has no pivot at this precision (rank deficient).
    """

    p: int
    n: int
    K: int
    basis: tuple
    pivots: tuple

    @property
    def full_rank(self) -> bool:
        return all(a is not None for a in self.pivots)

    @property
    def rank(self) -> int:
        return sum(a is not None for a in self.pivots)

    def log_index(self) -> int:
        """log_p |Z_p^n : L| for a full-rank lattice."""
        if not self.full_rank:
            raise InfiniteIndex("lattice is not of full rank")
        return sum(self.pivots)

    def contains(self, v: Sequence[int]) -> bool:
        q = self.p**self.K
        w = [x % q for x in v]
        for i, col in enumerate(self.basis):
            a = self.pivots[i]
            if w[i] == 0:
                continue
            if a is None or w[i] % self.p**a:
                return False
            f = w[i] // self.p**a
            w = [(x - f * y) % q for x, y in zip(w, col)]
        return not any(w)

    def matrix(self) -> RMatrix:
        return RMatrix.from_columns(self.p, self.K, self.basis, self.n)


def hnf(M: RMatrix, strict: bool = True) -> Lattice:
    """Canonical column echelon form of the lattice spanned by the columns of M.

    The lattice is taken together with p^K Z_p^n, so the result only depends
    on the submodule of (Z/p^K)^n the columns generate.  With ``strict`` a row
    without a pivot below p^K raises PrecisionExhausted.
    """
    p, K, n = M.p, M.K, M.rows
    q = p**K
    cols = [list(c) for c in M.columns() if any(c)]
    basis: list[list[int] | None] = []
    pivots: list[int | None] = []
    for i in range(n):
        best, best_v = None, None
        for idx, c in enumerate(cols):
            if c[i]:
                v = vp_int(c[i], p)
                if best_v is None or v < best_v:
                    best, best_v = idx, v
        if best is None:
            if strict:
                raise PrecisionExhausted(f"row {i} has no pivot below p^{K}")
            basis.append(None)
            pivots.append(None)
            continue
        piv = cols.pop(best)
        a = best_v
        u = pow(piv[i] // p**a, -1, q)
        piv = [(x * u) % q for x in piv]
        rest = []
        for c in cols:
            if c[i]:
                f = c[i] // p**a
                c = [(x - f * y) % q for x, y in zip(c, piv)]
            if any(c):
                rest.append(c)
        # p^(K-a) * pivot column accounts for p^K e_i in the lattice
        extra = [(x * p ** (K - a)) % q for x in piv]
        if any(extra):
            rest.append(extra)
        cols = rest
        basis.append(piv)
        pivots.append(a)
    # reduce entries below each pivot modulo the pivot of their row
    for j in range(n):
        if basis[j] is None:
            continue
        col = basis[j]
        for r in range(j + 1, n):
            if pivots[r] is None or basis[r] is None:
                continue
            f = col[r] // p ** pivots[r]
            if f:
                col = [(x - f * y) % q for x, y in zip(col, basis[r])]
        basis[j] = col
    zero = tuple([0] * n)
    return Lattice(p, n, K, tuple(tuple(c) if c is not None else zero for c in basis), tuple(pivots))


def lattice_from_columns(p: int, K: int, n: int, cols, strict: bool = True) -> Lattice:
    return hnf(RMatrix.from_columns(p, K, list(cols), n), strict=strict)


def full_lattice(p: int, K: int, n: int) -> Lattice:
    return hnf(RMatrix.identity(p, K, n))


def lattice_contains(Lsup: Lattice, Lsub: Lattice) -> bool:
    if (Lsup.p, Lsup.n) != (Lsub.p, Lsub.n):
        raise ValueError("lattices live in different ambient spaces")
    return all(Lsup.contains(c) for c, a in zip(Lsub.basis, Lsub.pivots) if a is not None)


def lattice_index(Lsub: Lattice, Lsup: Lattice) -> int:
    """|Lsup : Lsub| as an exact power of p."""
    if not (Lsub.full_rank and Lsup.full_rank):
        raise InfiniteIndex("index between lattices of different rank")
    if not lattice_contains(Lsup, Lsub):
        raise NotContained("first lattice is not contained in the second")
    return Lsub.p ** (Lsub.log_index() - Lsup.log_index())


@dataclass(frozen=True)
class SNF:
    valuations: tuple  # non-decreasing ints, then AT_LEAST_K for vanished pivots
    U: RMatrix
    D: RMatrix
    V: RMatrix

    @property
    def resolved(self) -> bool:
        return all(v is not AT_LEAST_K for v in self.valuations)

    @property
    def rank(self) -> int:
        return sum(v is not AT_LEAST_K for v in self.valuations)


def snf(M: RMatrix, strict: bool = False) -> SNF:
    """Smith form U*M*V = diag(p^a_1, ...), a_1 <= a_2 <= ... .

    Pivots that vanish mod p^K are reported as AT_LEAST_K; ``strict`` turns
    them into PrecisionExhausted.
    """
    p, K = M.p, M.K
    q = p**K
    m, n = M.shape
    A = [list(r) for r in M.entries]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    vals = []
    for t in range(min(m, n)):
        best, best_v = None, None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j]:
                    v = vp_int(A[i][j], p)
                    if best_v is None or v < best_v:
                        best, best_v = (i, j), v
        if best is None:
            vals.extend([AT_LEAST_K] * (min(m, n) - t))
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        U[t], U[i] = U[i], U[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in V:
            row[t], row[j] = row[j], row[t]
        a = best_v
        u = pow(A[t][t] // p**a, -1, q)
        A[t] = [(x * u) % q for x in A[t]]
        U[t] = [(x * u) % q for x in U[t]]
        for r in range(t + 1, m):
            if A[r][t]:
                f = A[r][t] // p**a
                A[r] = [(x - f * y) % q for x, y in zip(A[r], A[t])]
                U[r] = [(x - f * y) % q for x, y in zip(U[r], U[t])]
        for c in range(t + 1, n):
            if A[t][c]:
                f = A[t][c] // p**a
                for row in A:
                    row[c] = (row[c] - f * row[t]) % q
                for row in V:
                    row[c] = (row[c] - f * row[t]) % q
        vals.append(a)
    if strict and AT_LEAST_K in vals:
        raise PrecisionExhausted("Smith form has pivots vanishing mod p^K")
    return SNF(tuple(vals), RMatrix(p, K, tuple(map(tuple, U))),
               RMatrix(p, K, tuple(map(tuple, A))), RMatrix(p, K, tuple(map(tuple, V))))


def matrix_order_mod(T: RMatrix) -> int:
    """Least power q of p with T^q = I mod p^K."""
    n = T.rows
    if T.cols != n:
        raise ValueError("order of a non-square matrix")
    T.inverse()  # raises NonUnit for singular T
    bound = (T.K - 1) * n * n + n * (n - 1) // 2 + 1
    q, X = 1, T
    for _ in range(bound + 1):
        if X.is_identity():
            return q
        X = X**T.p
        q *= T.p
    raise NotPPowerOrder("matrix order has a prime factor other than p")


@dataclass(frozen=True)
class ScalarForm:
    """Normalised scalar action: kind is Trivial, Plus, MinusOne or Minus."""

    kind: str
    s: int | None = None

    def __str__(self):
        return self.kind if self.s is None else f"{self.kind}({self.s})"

    def value(self, p: int) -> int:
        """Representative integer scalar of this normal form."""
        if self.kind == "Trivial":
            return 1
        if self.kind == "MinusOne":
            return -1
        if self.kind == "Plus":
            return 1 + p**self.s
        return -(1 + p**self.s)


def scalar_normal_form(p: int, lam: Residue) -> ScalarForm:
    if lam.p != p:
        raise ValueError("residue over a different prime")
    if lam.value % p == 0:
        raise NonUnit("scalar action must be a unit")
    if p != 2:
        if lam.value % p != 1:
            raise DiscontinuousAction(f"{lam.value} is not congruent to 1 mod {p}")
        s = val(lam - 1)
        return ScalarForm("Trivial") if s is AT_LEAST_K else ScalarForm("Plus", s)
    if (lam - 1).value == 0:
        return ScalarForm("Trivial")
    if (lam + 1).value == 0:
        return ScalarForm("MinusOne")
    eps = 1 if lam.value % 4 == 1 else -1
    s = val(lam * eps - 1)
    return ScalarForm("Plus" if eps == 1 else "Minus", s)
