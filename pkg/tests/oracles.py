"""Slow, independent reference computations used to cross-check the engine."""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np

from constgen.pgroup import FiniteGroup, Subgroup

BRUTE_FORCE_MAX_ORDER = 5**6


def mult_table(S: Subgroup) -> tuple[list[int], np.ndarray]:
    """Elements of S (parent ids) and its multiplication table in local indices."""
    Q = S.parent
    ids = [int(i) for i in S.ids]
    pos = np.full(Q.order, -1, dtype=np.int64)
    pos[S.ids] = np.arange(len(ids))
    tab = np.empty((len(ids), len(ids)), dtype=np.int64)
    # column b holds x * y_b for every x, i.e. the right coset of S by y_b
    for b, y in enumerate(ids):
        tab[:, b] = pos[Q.coset(S.ids, y)]
    if (tab < 0).any():
        raise AssertionError("S is not closed under multiplication")
    return ids, tab


def _close(tab: np.ndarray, identity: int, gens) -> frozenset:
    seen = {identity}
    frontier = [identity]
    gens = list(gens)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = int(tab[x, g])
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(seen)


def _affine_products(A: np.ndarray, B: np.ndarray, n: int, q: int) -> np.ndarray:
    """Row-wise a o b for paired rows (M, v) flattened as in the engine."""
    nn = n * n
    N = A.shape[0]
    MA = A[:, :nn].reshape(N, n, n)
    MB = B[:, :nn].reshape(N, n, n)
    out = np.empty_like(A)
    out[:, :nn] = (MA @ MB).reshape(N, nn) % q
    out[:, nn:] = ((MA @ B[:, nn:, None])[:, :, 0] + A[:, nn:]) % q
    return out


def _pth_powers(S: Subgroup, pos: np.ndarray) -> np.ndarray:
    """Mask of the local indices that are p-th powers of elements of S."""
    Q = S.parent
    X = Q.rows[S.ids]
    P = X
    for _ in range(Q.p - 1):
        P = _affine_products(P, X, Q.n, Q.q)
    mask = np.zeros(S.order, dtype=bool)
    mask[pos[Q.ids_of_rows(P)]] = True
    return mask


class _Search:
    """Local view of a subgroup: elements 0..N-1 and right multiplication by them."""

    def __init__(self, S: Subgroup):
        if S.order > BRUTE_FORCE_MAX_ORDER:
            raise ValueError("group too large for the brute-force oracle")
        self.S = S
        self.Q = Q = S.parent
        self.N = S.order
        self.pos = np.full(Q.order, -1, dtype=np.int64)
        self.pos[S.ids] = np.arange(self.N)
        self.e = int(self.pos[Q.identity_id])
        self.cols: dict[int, np.ndarray] = {}

    def col(self, g: int) -> np.ndarray:
        """x * g for every local x."""
        if g not in self.cols:
            c = self.pos[self.Q.coset(self.S.ids, int(self.S.ids[g]))]
            if (c < 0).any():
                raise AssertionError("S is not closed under multiplication")
            self.cols[g] = c
        return self.cols[g]

    def grow(self, mask: np.ndarray, gens) -> np.ndarray:
        mask = mask.copy()
        frontier = np.flatnonzero(mask)
        while frontier.size:
            new = np.concatenate([self.col(g)[frontier] for g in gens])
            new = np.unique(new[~mask[new]])
            mask[new] = True
            frontier = new
        return mask

    def generating_set(self) -> tuple:
        """A smallest generating set, by exhaustive search over generated subgroups.

        Level k holds the subgroups generated by k elements, grown from level
        k-1 by one more generator.  Enlarging a generator's cyclic subgroup,
        or the subgroup being grown, can only enlarge the result, so
        generators come from maximal cyclic subgroups and each level keeps
        only its inclusion-maximal members.
        """
        N = self.N
        if N == 1:
            return ()
        # a nontrivial x sits properly inside a cyclic subgroup exactly when it
        # is a p-th power, and the generators of a maximal <x> are its
        # elements that are not p-th powers
        taken = _pth_powers(self.S, self.pos)
        start = np.zeros(N, dtype=bool)
        start[self.e] = True
        reps, level = [], []
        for r in np.flatnonzero(~taken):
            if taken[r]:
                continue
            C = self.grow(start, (int(r),))
            if C.all():
                return (int(r),)
            taken |= C
            reps.append(int(r))
            level.append((C, (int(r),)))
        k = 1
        while True:
            k += 1
            found = {}
            for H, gens in level:
                # a proper subgroup already found that holds H and r also holds <H, r>
                covered = H.copy()
                for J, _ in found.values():
                    if J[list(gens)].all():
                        covered |= J
                for r in reps:
                    if covered[r] or (k == 2 and r < gens[0]):
                        continue
                    J = self.grow(H, gens + (r,))
                    if J.all():
                        return gens + (r,)
                    found.setdefault(np.packbits(J).tobytes(), (J, gens + (r,)))
                    covered |= J
            if not found:
                raise AssertionError("search stalled below the whole group")
            level = _inclusion_maximal(found.values())

    def homs_to_cyclic(self, gens) -> int:
        """Number of homomorphisms S -> Z/p, trying every value on ``gens``."""
        p = self.Q.p
        count = 0
        for vals in itertools.product(range(p), repeat=len(gens)):
            f = np.full(self.N, -1, dtype=np.int64)
            f[self.e] = 0
            frontier = np.array([self.e])
            while frontier.size:
                nxt = []
                for g, a in zip(gens, vals):
                    y = self.col(g)[frontier]
                    fresh = f[y] < 0
                    f[y[fresh]] = (f[frontier[fresh]] + a) % p
                    nxt.append(y[fresh])
                frontier = np.unique(np.concatenate(nxt))
            # f(x g) = f(x) + f(g) on generators makes f a homomorphism
            if all((f[self.col(g)] == (f + a) % p).all() for g, a in zip(gens, vals)):
                count += 1
        return count


def _inclusion_maximal(found) -> list:
    found = sorted(found, key=lambda t: -int(t[0].sum()))
    kept = []
    for mask, gens in found:
        if not any(m[mask].all() for m, _ in kept):
            kept.append((mask, gens))
    return kept


def brute_force_d(S: Subgroup) -> int:
    """Least k such that some k elements generate S."""
    return len(_Search(S).generating_set())


def brute_force_index_p_count(S: Subgroup) -> int:
    """Index-p subgroups of S, counted as kernels of surjections onto Z/p."""
    if S.order == 1:
        return 0
    search = _Search(S)
    homs = search.homs_to_cyclic(search.generating_set())
    # every nonzero hom is onto, and p - 1 of them share each kernel
    return (homs - 1) // (S.parent.p - 1)


def brute_force_invariants(S: Subgroup) -> tuple[int, int]:
    """(least number of generators, number of index-p subgroups) from one search."""
    if S.order == 1:
        return 0, 0
    search = _Search(S)
    gens = search.generating_set()
    return len(gens), (search.homs_to_cyclic(gens) - 1) // (S.parent.p - 1)


def brute_force_frattini(S: Subgroup) -> frozenset:
    """Intersection of all maximal subgroups, found among two-step closures."""
    ids, tab = mult_table(S)
    e = ids.index(S.parent.identity_id)
    n = len(ids)
    p = S.parent.p
    subs = set()
    for g in range(n):
        subs.add(_close(tab, e, [g]))
    grown = True
    while grown:
        grown = False
        for H in list(subs):
            for g in range(n):
                if g not in H:
                    J = _close(tab, e, list(H) + [g])
                    if J not in subs and len(J) < n:
                        subs.add(J)
                        grown = True
    maximal = [H for H in subs if len(H) * p == n]
    inter = frozenset(range(n))
    for H in maximal:
        inter &= H
    return frozenset(ids[i] for i in inter)


# --------------------------------------------------------------------------
# lattices


def span_mod(p: int, K: int, cols) -> frozenset:
    """All vectors of (Z/p^K)^n in the Z-span of cols, by closing under addition."""
    q = p**K
    cols = [tuple(x % q for x in c) for c in cols]
    n = len(cols[0])
    zero = (0,) * n
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for c in cols:
                w = tuple((a + b) % q for a, b in zip(v, c))
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return frozenset(seen)


def determinantal_valuations(p: int, M) -> list[int | None]:
    """Valuations of Smith invariants from gcds of k x k minors (None for zero)."""
    m, n = len(M), len(M[0])
    out = []
    prev = 0
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, _det([[M[r][c] for c in cols] for r in rows]))
        if g == 0:
            out.extend([None] * (min(m, n) - k + 1))
            break
        v = 0
        while g % p == 0:
            g //= p
            v += 1
        out.append(v - prev)
        prev = v
    return out


def _det(A):
    n = len(A)
    if n == 1:
        return A[0][0]
    return sum((-1) ** j * A[0][j] * _det([r[:j] + r[j + 1:] for r in A[1:]]) for j in range(n))


def jacobi_direct(dim: int, brackets: dict) -> list[int]:
    """Jacobi sum for (e1, e2, e3) from a sparse bracket table {(i, j): vector}."""
    def br(u, v):
        out = [0] * dim
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                if i == j or not a or not b:
                    continue
                if (i, j) in brackets:
                    vec = brackets[(i, j)]
                    out = [o + a * b * x for o, x in zip(out, vec)]
                elif (j, i) in brackets:
                    vec = brackets[(j, i)]
                    out = [o - a * b * x for o, x in zip(out, vec)]
        return out

    e = [[int(i == j) for j in range(dim)] for i in range(dim)]
    parts = [br(br(e[0], e[1]), e[2]), br(br(e[1], e[2]), e[0]), br(br(e[2], e[0]), e[1])]
    return [sum(t) for t in zip(*parts)]


def group_elements(G: FiniteGroup) -> list[tuple]:
    return [G.tup(i) for i in range(G.order)]


# --------------------------------------------------------------------------
# module decomposition table, transcribed by hand: (label, n1, n2, n3 ranges)

REFERENCE_TABLE1 = {
    2: [("T 2.1", (2, None), (0, 0), (0, 0)),
        ("T 2.2", (2, None), (1, 1), (0, 0)),
        ("T 2.3", (1, None), (0, 0), (1, 1)),
        ("T 2.4", (0, 0), (2, None), (0, 0)),
        ("T 2.5", (1, 1), (1, None), (0, 0)),
        ("T 2.6", (0, 0), (0, None), (1, 1))],
    3: [("T 3.1", (2, None), (0, 0), (0, 0)),
        ("T 3.2", (0, 0), (1, 1), (0, 0))],
    5: [("p>=5", (2, None), (0, 0), (0, 0))],
}


def reference_table1_rows(p: int, n_max: int) -> set:
    """{((n1, n2, n3), label)} for 2 <= n <= n_max, straight from the transcription."""
    rows = REFERENCE_TABLE1[p if p < 5 else 5]
    out = set()
    for n3 in range(n_max // p + 1):
        for n2 in range(n_max // (p - 1) + 1):
            for n1 in range(n_max + 1):
                n = n1 + (p - 1) * n2 + p * n3
                if not 2 <= n <= n_max:
                    continue
                for label, *ranges in rows:
                    if all(lo <= x and (hi is None or x <= hi) for x, (lo, hi) in zip((n1, n2, n3), ranges)):
                        out.add(((n1, n2, n3), label))
    return out
