"""Z_p-Lie lattices at finite precision and their bracket-closed sublattices.

The generator count of a lattice L is dim_Fp L/(pL + [L,L]), the additive
analogue of log_p |G : Phi(G)|.  Sublattices are found by descending through
index-p additive sublattices and keeping the bracket-closed ones.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass

from .errors import BudgetExceeded, ConstraintViolation, JacobiFails, NotAntisymmetric
from .padic import Lattice, full_lattice, is_prime, lattice_contains, lattice_from_columns
from .verify import Verdict, Witness

DEFAULT_K = 8


@dataclass(frozen=True)
class LieLattice:
    p: int
    K: int
    dim: int
    c: tuple  # c[i][j][k]: coefficient of e_k in [e_i, e_j], reduced mod p^K

    @property
    def q(self) -> int:
        return self.p**self.K

    def bracket(self, u, v) -> tuple:
        q = self.q
        out = [0] * self.dim
        for i, a in enumerate(u):
            if a % q == 0:
                continue
            for j, b in enumerate(v):
                if b % q == 0 or i == j:
                    continue
                ab = a * b
                for k, x in enumerate(self.c[i][j]):
                    if x:
                        out[k] += ab * x
        return tuple(x % q for x in out)

    def whole(self) -> "SubLattice":
        return SubLattice(self, full_lattice(self.p, self.K, self.dim))


def _jacobi(p, K, dim, c):
    q = p**K
    L = LieLattice(p, K, dim, c)
    e = [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    for i, j, k in itertools.combinations(range(dim), 3):
        terms = (L.bracket(L.bracket(e[i], e[j]), e[k]),
                 L.bracket(L.bracket(e[j], e[k]), e[i]),
                 L.bracket(L.bracket(e[k], e[i]), e[j]))
        total = tuple(sum(t) % q for t in zip(*terms))
        if any(total):
            return (i, j, k), total
    return None


def make_lie_lattice(p: int, K: int, dim: int, c) -> LieLattice:
    """Validated lattice from structure constants c[i][j][k] (exact integers)."""
    if not is_prime(p):
        raise ConstraintViolation(f"{p} is not prime")
    if K < 1 or dim < 1:
        raise ConstraintViolation("precision and dimension must be positive")
    q = p**K
    try:
        cc = tuple(tuple(tuple(int(c[i][j][k]) % q for k in range(dim)) for j in range(dim))
                   for i in range(dim))
    except (IndexError, TypeError):
        raise ConstraintViolation("structure constants must form a dim x dim x dim array") from None
    for i in range(dim):
        for j in range(dim):
            if any((a + b) % q for a, b in zip(cc[i][j], cc[j][i])):
                raise NotAntisymmetric(f"[e{i + 1},e{j + 1}] != -[e{j + 1},e{i + 1}]")
    bad = _jacobi(p, K, dim, cc)
    if bad is not None:
        (i, j, k), total = bad
        raise JacobiFails(f"Jacobi sum for (e{i + 1},e{j + 1},e{k + 1}) is {list(total)}")
    return LieLattice(p, K, dim, cc)


def constants_from_brackets(dim: int, brackets: dict) -> list:
    """Structure constants from {(i, j): vector} with 0-based i != j; fills in antisymmetry."""
    c = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j), vec in brackets.items():
        for k, x in enumerate(vec):
            c[i][j][k] += x
            c[j][i][k] -= x
    return c


def abelian_lattice(p: int, dim: int, K: int = DEFAULT_K) -> LieLattice:
    return make_lie_lattice(p, K, dim, constants_from_brackets(dim, {}))


def x_action_lattice(p: int, D, K: int = DEFAULT_K) -> LieLattice:
    """Z_p x + A with A abelian and ad(x) acting on A by the integer matrix D."""
    k = len(D)
    dim = k + 1
    br = {}
    for j in range(k):
        br[(0, j + 1)] = [0] + [D[i][j] for i in range(k)]
    return make_lie_lattice(p, K, dim, constants_from_brackets(dim, br))


def x_scalar_lattice(p: int, dim: int, s: int, K: int = DEFAULT_K) -> LieLattice:
    """ad(x) acts on A = Z_p^(dim-1) as multiplication by p^s."""
    k = dim - 1
    return x_action_lattice(p, [[p**s * int(i == j) for j in range(k)] for i in range(k)], K)


@dataclass(frozen=True)
class SubLattice:
    parent: LieLattice
    lattice: Lattice

    @property
    def generators(self) -> tuple:
        return tuple(b for b, a in zip(self.lattice.basis, self.lattice.pivots) if a is not None)

    @property
    def key(self) -> str:
        blob = repr((self.lattice.basis, self.lattice.pivots)).encode()
        return hashlib.sha256(blob).hexdigest()

    @property
    def log_index(self) -> int:
        return self.lattice.log_index()

    @property
    def index(self) -> int:
        return self.parent.p**self.log_index

    def is_closed(self) -> bool:
        g = self.generators
        return all(self.lattice.contains(self.parent.bracket(u, v))
                   for u, v in itertools.combinations(g, 2))


def sublattice(L: LieLattice, gens) -> SubLattice:
    """Additive span of gens; raises ConstraintViolation unless it is bracket closed."""
    S = SubLattice(L, lattice_from_columns(L.p, L.K, L.dim, [tuple(g) for g in gens], strict=True))
    if not S.is_closed():
        raise ConstraintViolation("span is not closed under the bracket")
    return S


def lattice_dmin(L) -> int:
    """dim_Fp of S/(pS + [S,S]) for a lattice or sublattice S."""
    S = L.whole() if isinstance(L, LieLattice) else L
    P = S.parent
    g = S.generators
    cols = [tuple(P.p * x for x in b) for b in g]
    cols += [P.bracket(u, v) for u, v in itertools.combinations(g, 2)]
    F = lattice_from_columns(P.p, P.K, P.dim, cols, strict=True)
    return F.log_index() - S.log_index


def _maximal_additive(S: SubLattice) -> list[SubLattice]:
    P = S.parent
    p, q = P.p, P.q
    g = S.generators
    n = len(g)
    out = []
    for k in range(n):
        for tail in itertools.product(range(p), repeat=n - k - 1):
            f = (0,) * k + (1,) + tail
            cols = [g[j] for j in range(k)]
            cols += [tuple((a - f[j] * b) % q for a, b in zip(g[j], g[k])) for j in range(k + 1, n)]
            cols.append(tuple(p * x % q for x in g[k]))
            out.append(SubLattice(P, lattice_from_columns(p, P.K, P.dim, cols, strict=True)))
    return out


@dataclass(frozen=True)
class SubLatticeEntry:
    sublattice: SubLattice
    index: int
    d: int

    def __iter__(self):
        return iter((self.sublattice, self.index, self.d))


def lie_sublattices_up_to_index(L: LieLattice, m: int, max_additive: int = 500_000) -> list[SubLatticeEntry]:
    """Bracket-closed sublattices of index <= p^m, sorted by (index, key)."""
    if m < 0:
        raise ConstraintViolation("m must be non-negative")
    if L.K < m + 2:
        raise ConstraintViolation(f"precision K={L.K} is too small for index p^{m}; need K >= m+2")
    level = {L.whole().key: L.whole()}
    everything = [L.whole()]
    for _ in range(m):
        nxt: dict[str, SubLattice] = {}
        for S in level.values():
            for T in _maximal_additive(S):
                nxt.setdefault(T.key, T)
        everything.extend(nxt.values())
        if len(everything) > max_additive:
            raise BudgetExceeded(f"more than {max_additive} additive sublattices")
        level = nxt
    closed = [S for S in everything if S.is_closed()]
    entries = [SubLatticeEntry(S, S.index, lattice_dmin(S)) for S in closed]
    entries.sort(key=lambda e: (e.index, e.sublattice.key))
    return entries


def star_check_lattice(L: LieLattice, m: int, d_expected: int | None = None) -> Verdict:
    """Every bracket-closed sublattice of index <= p^m needs d_expected generators."""
    d = L.dim if d_expected is None else d_expected
    entries = lie_sublattices_up_to_index(L, m)
    bad = [e for e in entries if e.d != d]
    firsts: dict[int, SubLatticeEntry] = {}
    for e in bad:
        firsts.setdefault(e.d, e)
    witnesses = tuple(_lattice_witness(e, d) for e in firsts.values())
    census: dict[tuple, int] = {}
    for e in bad:
        census[(e.index, e.d)] = census.get((e.index, e.d), 0) + 1
    return Verdict("star-lattice", "Witness" if bad else "Pass", witnesses[0] if bad else None,
                   "Exact", L.p**m, len(entries),
                   tuple((i, dd, c) for (i, dd), c in sorted(census.items())), witnesses)


def _lattice_witness(e: SubLatticeEntry, d_expected: int) -> Witness:
    S = e.sublattice
    again = sublattice(S.parent, S.generators)
    ok = (again.key == S.key and lattice_contains(S.lattice, again.lattice)
          and lattice_dmin(again) == e.d and again.index == e.index)
    return Witness(S.generators, e.index, e.d, d_expected, S.key, ok)
