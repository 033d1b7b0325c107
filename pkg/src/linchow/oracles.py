"""Slow, independent reference implementations used to cross-check the fast paths."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def naive_smith(M) -> list:
    """Elementary divisors by textbook row/column operations on the full matrix."""
    A = [list(r) for r in M]
    if not A or not A[0]:
        return []
    m, n = len(A), len(A[0])
    out = []
    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                return out
            _, i, j = min(nz)
            A[t], A[i] = A[i], A[t]
            for r in A:
                r[t], r[j] = r[j], r[t]
            piv = A[t][t]
            clean = True
            for i in range(t + 1, m):
                q = A[i][t] // piv
                for j in range(t, n):
                    A[i][j] -= q * A[t][j]
                clean &= A[i][t] == 0
            for j in range(t + 1, n):
                q = A[t][j] // piv
                for i in range(t, m):
                    A[i][j] -= q * A[i][t]
                clean &= A[t][j] == 0
            if not clean:
                continue
            bad = [i for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % piv]
            if bad:
                for j in range(t, n):
                    A[t][j] += A[bad[0]][j]
                continue
            out.append(abs(piv))
            break
    return out


def rational_rank(M) -> int:
    A = [[Fraction(x) for x in r] for r in M]
    rk = 0
    cols = len(A[0]) if A else 0
    for j in range(cols):
        piv = next((i for i in range(rk, len(A)) if A[i][j]), None)
        if piv is None:
            continue
        A[rk], A[piv] = A[piv], A[rk]
        for i in range(len(A)):
            if i != rk and A[i][j]:
                f = A[i][j] / A[rk][j]
                A[i] = [a - f * b for a, b in zip(A[i], A[rk])]
        rk += 1
    return rk


def determinantal_divisors(M) -> list:
    """Elementary divisors as ratios of gcds of k x k minors (tiny matrices only)."""
    from math import gcd

    def det(B):
        B = [[Fraction(x) for x in r] for r in B]
        n, d = len(B), Fraction(1)
        for j in range(n):
            piv = next((i for i in range(j, n) if B[i][j]), None)
            if piv is None:
                return 0
            if piv != j:
                B[j], B[piv] = B[piv], B[j]
                d = -d
            d *= B[j][j]
            for i in range(j + 1, n):
                f = B[i][j] / B[j][j]
                B[i] = [a - f * b for a, b in zip(B[i], B[j])]
        return int(d)

    m, n = len(M), len(M[0]) if M else 0
    prev, out = 1, []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                g = gcd(g, det([[M[i][j] for j in cols] for i in rows]))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out
