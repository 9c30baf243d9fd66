"""Exact integer matrix helpers (lists of lists of Python ints)."""

from __future__ import annotations

from operator import mul


def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(map(mul, row, col)) for col in Bt] for row in A]


def matvec(A, v):
    return [sum(map(mul, row, v)) for row in A]


def add(A, B):
    return [[a + b for a, b in zip(r, s)] for r, s in zip(A, B)]


def sub(A, B):
    return [[a - b for a, b in zip(r, s)] for r, s in zip(A, B)]


def mpow(A, e):
    R = identity(len(A))
    while e:
        if e & 1:
            R = matmul(R, A)
        A = matmul(A, A)
        e >>= 1
    return R


def block_diag(blocks):
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    o = 0
    for b in blocks:
        k = len(b)
        for i in range(k):
            for j in range(k):
                out[o + i][o + j] = b[i][j]
        o += k
    return out


def rank(rows) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination."""
    A = [list(r) for r in rows]
    if not A:
        return 0
    r, prev = 0, 1
    for c in range(len(A[0])):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        for i in range(r + 1, len(A)):
            A[i] = [(A[r][c] * x - A[i][c] * y) // prev for x, y in zip(A[i], A[r])]
        prev = A[r][c]
        r += 1
        if r == len(A):
            break
    return r


def is_identity(A) -> bool:
    return all(x == int(i == j) for i, r in enumerate(A) for j, x in enumerate(r))


def freeze(A):
    return tuple(tuple(r) for r in A)
