"""Finite p-groups of affine maps over Z/p^K.

An element is a pair (M, v) acting by x -> Mx + v, stored flat as
``M`` row-major followed by ``v``.  Its packed key is that tuple read as a
big-endian number in base p^K; a group keeps its elements sorted by key and
refers to them by position ("element id").  Subgroups are sorted id arrays.

Closure uses Dimino's coset algorithm with whole cosets multiplied at once
in numpy, so the cost is linear in the size of the group being built.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, NotAPGroup
from .padic import RMatrix, Residue, log_p

DEFAULT_BUDGET = 2**21


# --------------------------------------------------------------------------
# flat tuple arithmetic


def _mul(a, b, n, q):
    """(Ma, va) o (Mb, vb) = (Ma Mb, Ma vb + va)."""
    nn = n * n
    out = [0] * (nn + n)
    for i in range(n):
        ra = a[i * n:(i + 1) * n]
        for j in range(n):
            out[i * n + j] = sum(ra[k] * b[k * n + j] for k in range(n)) % q
        out[nn + i] = (sum(ra[k] * b[nn + k] for k in range(n)) + a[nn + i]) % q
    return tuple(out)


def _identity(n):
    return tuple(int(i == j) for i in range(n) for j in range(n)) + (0,) * n


def _inv(a, n, p, K):
    q = p**K
    nn = n * n
    M = RMatrix(p, K, tuple(tuple(a[i * n:(i + 1) * n]) for i in range(n)))
    Mi = M.inverse()
    v = Mi.apply(a[nn:])
    return tuple(x for r in Mi.entries for x in r) + tuple((-x) % q for x in v)


def _key(t, q):
    k = 0
    for x in t:
        k = k * q + x
    return k


def _use_int64(q, E):
    return q**E < 2**63


def _pack(cols: np.ndarray, q: int) -> np.ndarray:
    k = np.zeros(cols.shape[0], dtype=np.int64)
    for c in range(cols.shape[1]):
        k = k * q + cols[:, c]
    return k


def _keys(rows: np.ndarray, q: int) -> np.ndarray:
    if _use_int64(q, rows.shape[1]):
        return _pack(rows, q)
    return np.array([_key(r, q) for r in rows.tolist()], dtype=object)


class _Keyer:
    """Sort keys for the elements of one group.

    When the packed key overflows int64, the linear part is replaced by its
    rank among the linear parts occurring in the group.  That keeps keys in
    int64 and sorts exactly like the big-endian packed key.
    """

    def __init__(self, q: int, n: int, linear_parts: np.ndarray | None = None):
        self.q, self.n = q, n
        nn = n * n
        self.qv = q**n
        self.mkeys = None
        if not _use_int64(q, nn + n) and linear_parts is not None:
            self.mkeys = linear_parts

    @staticmethod
    def compressible(q: int, n: int, budget: int) -> bool:
        return not _use_int64(q, n * n + n) and _use_int64(q, n * n) and budget * q**n < 2**63

    def keys(self, rows: np.ndarray) -> np.ndarray:
        """Keys of rows; -1 marks a linear part that does not occur in the group."""
        if self.mkeys is None:
            return _keys(rows, self.q)
        nn = self.n * self.n
        mk = _pack(rows[:, :nn], self.q)
        idx = np.searchsorted(self.mkeys, mk)
        clipped = np.minimum(idx, len(self.mkeys) - 1)
        k = idx * self.qv + _pack(rows[:, nn:], self.q)
        k[self.mkeys[clipped] != mk] = -1
        return k

    def key(self, t) -> int:
        if self.mkeys is None:
            return _key(t, self.q)
        return int(self.keys(np.array([t], dtype=np.int64))[0])


def _mul_rows_right(rows: np.ndarray, t, n: int, q: int) -> np.ndarray:
    """Row-wise h o t for every row h."""
    nn = n * n
    N = rows.shape[0]
    MA = rows[:, :nn].reshape(N, n, n)
    tM = np.array(t[:nn], dtype=np.int64).reshape(n, n)
    tv = np.array(t[nn:], dtype=np.int64)
    out = np.empty_like(rows)
    out[:, :nn] = (MA @ tM).reshape(N, nn) % q
    out[:, nn:] = (MA @ tv + rows[:, nn:]) % q
    return out


# --------------------------------------------------------------------------
# elements and groups


@dataclass(frozen=True)
class AffineElement:
    p: int
    K: int
    n: int
    data: tuple

    @classmethod
    def from_parts(cls, p: int, K: int, M: Sequence[Sequence[int]], v: Sequence[int] | None = None):
        q = p**K
        n = len(M)
        v = [0] * n if v is None else v
        data = tuple(int(x) % q for r in M for x in r) + tuple(int(x) % q for x in v)
        el = cls(p, K, n, data)
        if int(el.det()) % p == 0:
            raise ValueError("linear part is not invertible mod p")
        return el

    @classmethod
    def identity(cls, p: int, K: int, n: int):
        return cls(p, K, n, _identity(n))

    @property
    def M(self) -> RMatrix:
        n = self.n
        return RMatrix(self.p, self.K, tuple(tuple(self.data[i * n:(i + 1) * n]) for i in range(n)))

    @property
    def v(self) -> tuple:
        return tuple(Residue(self.p, self.K, x) for x in self.data[self.n * self.n:])

    def det(self) -> int:
        n, q = self.n, self.p**self.K
        rows = [list(self.data[i * n:(i + 1) * n]) for i in range(n)]
        return _det(rows) % q

    def __matmul__(self, other: "AffineElement") -> "AffineElement":
        return AffineElement(self.p, self.K, self.n, _mul(self.data, other.data, self.n, self.p**self.K))

    def inverse(self) -> "AffineElement":
        return AffineElement(self.p, self.K, self.n, _inv(self.data, self.n, self.p, self.K))

    def key(self) -> int:
        return _key(self.data, self.p**self.K)

    def to_json(self):
        n = self.n
        return {"M": [list(self.data[i * n:(i + 1) * n]) for i in range(n)],
                "v": list(self.data[n * n:])}


def _det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    return sum((-1) ** j * rows[0][j] * _det([r[:j] + r[j + 1:] for r in rows[1:]]) for j in range(n))


class FiniteGroup:
    """A materialised finite subgroup of Aff_n(Z/p^K)."""

    def __init__(self, p, K, n, gens, rows, keys, keyer: _Keyer | None = None):
        self.p, self.K, self.n = p, K, n
        self.q = p**K
        self.keyer = keyer or _Keyer(self.q, n)
        self.gens = tuple(gens)
        self.rows = rows
        self.keys = keys
        self.rows.setflags(write=False)
        self.order = rows.shape[0]
        self.identity_id = self.id_of(_identity(n))

    def __repr__(self):
        return f"FiniteGroup(p={self.p}, K={self.K}, n={self.n}, order={self.p}^{self.log_order})"

    @property
    def log_order(self) -> int:
        return log_p(self.order, self.p)

    # element access -------------------------------------------------------
    def element(self, i: int) -> AffineElement:
        return AffineElement(self.p, self.K, self.n, tuple(int(x) for x in self.rows[i]))

    def tup(self, i: int) -> tuple:
        return tuple(int(x) for x in self.rows[i])

    def id_of(self, t) -> int:
        if isinstance(t, AffineElement):
            t = t.data
        k = self.keyer.key(t)
        i = int(np.searchsorted(self.keys, k))
        if k < 0 or i >= self.order or self.keys[i] != k:
            raise KeyError("element is not in the group")
        return i

    def contains(self, t) -> bool:
        try:
            self.id_of(t)
        except KeyError:
            return False
        return True

    def ids_of_rows(self, rows: np.ndarray) -> np.ndarray:
        k = self.keyer.keys(rows)
        idx = np.searchsorted(self.keys, k)
        if np.any(idx >= self.order) or np.any(self.keys[np.minimum(idx, self.order - 1)] != k):
            raise KeyError("rows are not all in the group")
        return idx.astype(np.int64)

    def mul(self, i: int, j: int) -> int:
        return self.id_of(_mul(self.tup(i), self.tup(j), self.n, self.q))

    def inv(self, i: int) -> int:
        return self.id_of(_inv(self.tup(i), self.n, self.p, self.K))

    def power(self, i: int, e: int) -> int:
        t = self.tup(i)
        r = _identity(self.n)
        while e:
            if e & 1:
                r = _mul(r, t, self.n, self.q)
            t = _mul(t, t, self.n, self.q)
            e >>= 1
        return self.id_of(r)

    def conj(self, x: int, g: int) -> int:
        """g^-1 x g."""
        gt = self.tup(g)
        gi = _inv(gt, self.n, self.p, self.K)
        return self.id_of(_mul(_mul(gi, self.tup(x), self.n, self.q), gt, self.n, self.q))

    def comm(self, a: int, b: int) -> int:
        """[a, b] = a^-1 b^-1 a b."""
        at, bt = self.tup(a), self.tup(b)
        ai = _inv(at, self.n, self.p, self.K)
        bi = _inv(bt, self.n, self.p, self.K)
        n, q = self.n, self.q
        return self.id_of(_mul(_mul(_mul(ai, bi, n, q), at, n, q), bt, n, q))

    def coset(self, ids: np.ndarray, t: int) -> np.ndarray:
        """Ids of the right coset {h t : h in ids}."""
        return self.ids_of_rows(_mul_rows_right(self.rows[ids], self.tup(t), self.n, self.q))

    @cached_property
    def generator_ids(self) -> tuple:
        return tuple(self.id_of(g.data) for g in self.gens)

    def whole(self) -> "Subgroup":
        return Subgroup(self, np.arange(self.order, dtype=np.int64), self.generator_ids)

    def reduce_ids(self, other: "FiniteGroup") -> np.ndarray:
        """Image in ``other`` (same p and n, lower K) of every element, by id."""
        if other.p != self.p or other.n != self.n or other.K > self.K:
            raise ValueError("can only reduce to a lower precision over the same p, n")
        return other.ids_of_rows(self.rows % other.q)


def closure(p: int, K: int, n: int, gens: Iterable, budget: int = DEFAULT_BUDGET) -> FiniteGroup:
    """Materialise the subgroup of Aff_n(Z/p^K) generated by ``gens``."""
    q = p**K
    els = []
    for g in gens:
        if not isinstance(g, AffineElement):
            M, v = g
            g = AffineElement.from_parts(p, K, M, v)
        if (g.p, g.K, g.n) != (p, K, n):
            raise ValueError("generator over a different ring or dimension")
        if g.det() % p == 0:
            raise ValueError("generator is not invertible")
        els.append(g)
    nn = n * n
    if _Keyer.compressible(q, n, budget):
        # provisional keys: linear parts numbered in order of discovery
        found: dict[int, int] = {}
        qv = q**n

        def keys_of(rows):
            u, inv = np.unique(_pack(rows[:, :nn], q), return_inverse=True)
            idx = np.array([found.setdefault(int(x), len(found)) for x in u], dtype=np.int64)
            return idx[inv.reshape(-1)] * qv + _pack(rows[:, nn:], q)
    else:
        def keys_of(rows):
            return _keys(rows, q)

    def key_of(t):
        return int(keys_of(np.array([t], dtype=np.int64))[0])

    ident = _identity(n)
    seen = {key_of(ident)}
    parts = [np.array([ident], dtype=np.int64)]
    used: list[tuple] = []
    size = 1
    for g in els:
        gt = g.data
        if key_of(gt) in seen:
            continue
        used.append(gt)
        H = np.concatenate(parts)
        parts = [H]
        reps = [ident]

        def add_coset(t):
            nonlocal size
            C = _mul_rows_right(H, t, n, q)
            seen.update(keys_of(C).tolist())
            parts.append(C)
            reps.append(t)
            size += H.shape[0]
            if size > budget:
                raise BudgetExceeded(f"group exceeds {budget} elements")

        add_coset(gt)
        i = 1
        while i < len(reps):
            r = reps[i]
            for s in used:
                t = _mul(r, s, n, q)
                if key_of(t) not in seen:
                    add_coset(t)
            i += 1
        try:
            log_p(len(reps), p)
        except ValueError:
            raise NotAPGroup(f"index {len(reps)} is not a power of {p}") from None
    del seen
    rows = np.concatenate(parts)
    if _Keyer.compressible(q, n, budget):
        keyer = _Keyer(q, n, np.unique(_pack(rows[:, :nn], q)))
    else:
        keyer = _Keyer(q, n)
    keys = keyer.keys(rows)
    order = np.argsort(keys, kind="stable")
    return FiniteGroup(p, K, n, els, rows[order].copy(), keys[order], keyer)


# --------------------------------------------------------------------------
# subgroups


def _extend(Q: FiniteGroup, base: np.ndarray, base_gens: tuple, new: Iterable[int]):
    """Dimino step: the subgroup generated by ``base`` (a subgroup) and ``new``."""
    mask = np.zeros(Q.order, dtype=bool)
    mask[base] = True
    parts = [base]
    used = list(base_gens)
    e = Q.identity_id
    for g in new:
        g = int(g)
        if mask[g]:
            continue
        used.append(g)
        H = np.concatenate(parts) if len(parts) > 1 else parts[0]
        parts = [H]
        reps = [e]

        def add_coset(t):
            C = Q.coset(H, t)
            mask[C] = True
            parts.append(C)
            reps.append(t)

        add_coset(g)
        i = 1
        while i < len(reps):
            r = reps[i]
            for s in used:
                t = Q.mul(r, s)
                if not mask[t]:
                    add_coset(t)
            i += 1
    ids = np.concatenate(parts) if len(parts) > 1 else parts[0]
    return np.sort(ids), tuple(used)


class Subgroup:
    """A subgroup of a FiniteGroup, held as its sorted element ids."""

    def __init__(self, parent: FiniteGroup, ids: np.ndarray, gens: Sequence[int]):
        self.parent = parent
        self.ids = np.asarray(ids, dtype=np.int64)
        self.ids.setflags(write=False)
        self.gens = tuple(int(g) for g in gens)

    def __repr__(self):
        return f"Subgroup(order={self.order}, index={self.index}, key={self.key[:12]})"

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and other.parent is self.parent
                and other.key == self.key)

    def __hash__(self):
        return hash(self.key)

    @property
    def order(self) -> int:
        return int(self.ids.shape[0])

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    @property
    def log_index(self) -> int:
        return log_p(self.index, self.parent.p)

    @cached_property
    def key(self) -> str:
        return hashlib.sha256(self.ids.astype("<i8").tobytes()).hexdigest()

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[self.ids] = True
        return m

    def contains_id(self, i: int) -> bool:
        return bool(self.mask[i])

    def issubset(self, other: "Subgroup") -> bool:
        return bool(np.all(other.mask[self.ids]))

    @cached_property
    def phi(self) -> "Subgroup":
        return frattini(self)

    @cached_property
    def d(self) -> int:
        return dmin(self)

    @cached_property
    def mingens(self) -> tuple:
        """A minimal generating set, chosen greedily from ``gens``."""
        Q, p = self.parent, self.parent.p
        F = self.phi
        cur = F.ids
        mask = F.mask.copy()
        chosen = []
        for g in self.gens:
            if cur.shape[0] == self.order:
                break
            if mask[g]:
                continue
            chosen.append(g)
            parts, x = [cur], g
            for _ in range(p - 1):
                C = Q.coset(cur, x)
                parts.append(C)
                x = Q.mul(x, g)
            cur = np.concatenate(parts)
            mask[cur] = True
        return tuple(chosen)


def subgroup_closure(Q: FiniteGroup, gens: Iterable) -> Subgroup:
    ids = []
    for g in gens:
        if isinstance(g, (AffineElement, tuple)):
            g = Q.id_of(g)
        ids.append(int(g))
    sub, used = _extend(Q, np.array([Q.identity_id], dtype=np.int64), (), ids)
    return Subgroup(Q, sub, used)


def frattini(S: Subgroup) -> Subgroup:
    """S^p [S, S] as the normal closure of generator p-th powers and commutators."""
    Q, p = S.parent, S.parent.p
    gens = S.gens
    seeds = [Q.power(g, p) for g in gens]
    seeds += [Q.comm(a, b) for a, b in itertools.combinations(gens, 2)]
    ids, ngens = _extend(Q, np.array([Q.identity_id], dtype=np.int64), (), seeds)
    changed = True
    while changed:
        changed = False
        mask = np.zeros(Q.order, dtype=bool)
        mask[ids] = True
        for x in ngens:
            for g in gens:
                c = Q.conj(x, g)
                if not mask[c]:
                    ids, ngens = _extend(Q, ids, ngens, [c])
                    changed = True
                    break
            if changed:
                break
    return Subgroup(Q, ids, ngens)


def dmin(S: Subgroup) -> int:
    """log_p |S : Phi(S)|, the minimal number of generators of S."""
    return log_p(S.order // S.phi.order, S.parent.p)


def _functionals(p: int, d: int):
    """Nonzero vectors of F_p^d whose first nonzero coordinate is 1."""
    for k in range(d):
        for tail in itertools.product(range(p), repeat=d - k - 1):
            yield (0,) * k + (1,) + tail


def maximal_subgroups(S: Subgroup) -> list[Subgroup]:
    """All index-p subgroups, as preimages of hyperplanes of S/Phi(S)."""
    if S.order == 1:
        return []
    Q, p = S.parent, S.parent.p
    F = S.phi
    h = S.mingens
    d = len(h)
    powers = [[Q.identity_id] for _ in range(d)]
    for i, g in enumerate(h):
        for _ in range(p - 1):
            powers[i].append(Q.mul(powers[i][-1], g))
    vectors = list(itertools.product(range(p), repeat=d))
    words = {}
    for a in vectors:
        x = Q.identity_id
        for i, e in enumerate(a):
            if e:
                x = Q.mul(x, powers[i][e])
        words[a] = x
    out = []
    for phi in _functionals(p, d):
        kernel = [a for a in vectors if sum(x * y for x, y in zip(phi, a)) % p == 0]
        k = phi.index(1)
        basis = []
        for i in range(d):
            if i != k:
                b = [0] * d
                b[i] = 1
                b[k] = (-phi[i]) % p
                basis.append(words[tuple(b)])
        ids = np.sort(np.concatenate([Q.coset(F.ids, words[a]) for a in kernel]))
        out.append(Subgroup(Q, ids, tuple(basis) + F.gens))
    return out


@dataclass(frozen=True)
class SubgroupEntry:
    subgroup: Subgroup
    index: int
    d: int

    def __iter__(self):
        return iter((self.subgroup, self.index, self.d))


def all_subgroups_up_to_index(Q: FiniteGroup | Subgroup, m: int,
                              max_subgroups: int = 200_000) -> list[SubgroupEntry]:
    """Every subgroup of index at most p^m, each once, ordered by (index, key)."""
    if m < 0:
        raise ValueError("m must be non-negative")
    top = Q.whole() if isinstance(Q, FiniteGroup) else Q
    level = [top]
    result = [top]
    for _ in range(m):
        nxt: dict[str, Subgroup] = {}
        for S in level:
            for M in maximal_subgroups(S):
                nxt.setdefault(M.key, M)
                if len(result) + len(nxt) > max_subgroups:
                    raise BudgetExceeded(f"more than {max_subgroups} subgroups")
        level = [nxt[k] for k in sorted(nxt)]
        if not level:
            break
        result.extend(level)
    base = top.order
    return [SubgroupEntry(S, base // S.order, S.d) for S in result]


def frattini_series(Q: FiniteGroup | Subgroup, j: int) -> list[Subgroup]:
    S = Q.whole() if isinstance(Q, FiniteGroup) else Q
    chain = [S]
    for _ in range(j):
        chain.append(chain[-1].phi)
    return chain
