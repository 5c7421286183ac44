"""Slow, independent reference computations used as test oracles.

Nothing here imports the implementation except the model data structure
(centers and the intersection matrix are inputs, not results under test).
"""
from __future__ import annotations

import random
from fractions import Fraction
from math import ceil

from valsem.resolution import build_model, random_centers, restrict


# -- value matrix -------------------------------------------------------------------

def proximity_matrix(centers):
    s = len(centers)
    Q = [[int(i == j) for j in range(s)] for i in range(s)]
    for c in centers:
        for p in c.parents:
            Q[p - 1][c.id - 1] = -1
    return Q


def fraction_inverse(mat):
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def value_matrix(centers):
    """``(Q Q^T)^{-1}`` in exact rationals."""
    Q = proximity_matrix(centers)
    s = len(Q)
    QQt = [[sum(Q[i][k] * Q[j][k] for k in range(s)) for j in range(s)] for i in range(s)]
    return fraction_inverse(QQt)


# -- colength of valuation ideals ---------------------------------------------------

def unload(M, marked, m):
    """Least divisor ``D >= sum m_i E_{marked[i]}`` with ``D.E_b <= 0`` for every ``b``."""
    s = len(M)
    a = [0] * s
    for v, mi in zip(marked, m):
        a[v - 1] = max(a[v - 1], mi)
    while True:
        for b in range(s):
            x = sum(a[k] * M[k][b] for k in range(s))
            if x > 0:
                a[b] += ceil(x / -M[b][b])
                break
        else:
            return a


def colength(M, marked, m):
    """``dim R / J(m)`` from the unloaded divisor (Hoskin-Deligne)."""
    m = [max(x, 0) for x in m]
    a = unload(M, marked, m)
    s = len(M)
    DD = sum(a[i] * a[j] * M[i][j] for i in range(s) for j in range(s))
    KD = sum(a[b] * (-2 - M[b][b]) for b in range(s))
    val = -(DD + KD)
    assert val % 2 == 0
    return val // 2


def d_oracle(M, marked, m):
    return colength(M, marked, [x + 1 for x in m]) - colength(M, marked, m)


def di_oracle(M, marked, m, i):
    up = list(m)
    up[i] += 1
    return colength(M, marked, up) - colength(M, marked, m)


# -- semigroups by set closure --------------------------------------------------------

def members(gens, box):
    """All sums of ``gens`` inside ``[0, box]``, by breadth-first closure."""
    gens = [tuple(g) for g in gens]
    zero = tuple(0 for _ in box)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in gens:
                w = tuple(x + y for x, y in zip(v, g))
                if w not in seen and all(x <= b for x, b in zip(w, box)):
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return seen


def indecomposables_literal(gens, box):
    S = members(gens, box)
    nonzero = [m for m in S if any(m)]
    out = set()
    for m in nonzero:
        if not any(n != m and tuple(x - y for x, y in zip(m, n)) in S
                   for n in nonzero if all(y <= x for x, y in zip(m, n))):
            out.add(m)
    return out


def conductor_literal(gens, limit=500):
    S = members([(g,) for g in gens], (limit,))
    gaps = [x for x in range(limit + 1) if (x,) not in S]
    return gaps[-1] + 1 if gaps else 0


# -- series by dictionaries -----------------------------------------------------------

def expand_naive(factors, box):
    """``prod (1 - t^v)^e`` as a dict, truncated to ``box``; geometric series summed term by term."""
    r = len(box)
    poly = {(0,) * r: 1}

    def fits(m):
        return all(x <= b for x, b in zip(m, box))

    def times(p, q):
        out = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                m = tuple(x + y for x, y in zip(m1, m2))
                if fits(m):
                    out[m] = out.get(m, 0) + c1 * c2
        return {m: c for m, c in out.items() if c}

    for v, e in factors:
        v = tuple(v)
        if e > 0:
            f = {(0,) * r: 1}
            if fits(v):
                f[v] = -1
        else:
            f = {}
            k = 0
            while fits(tuple(k * x for x in v)):
                f[tuple(k * x for x in v)] = 1
                k += 1
        for _ in range(abs(e)):
            poly = times(poly, f)
    return poly


# -- random minimal models --------------------------------------------------------------

def random_minimal(rng: random.Random, smax=9, arities=(2, 3), satellite_prob=0.4, max_cells=None):
    """A random model restricted to the minimal resolution of random distinct marked vertices."""
    while True:
        s = rng.randint(2, smax)
        model = build_model(random_centers(rng, s, satellite_prob))
        # late centers have long ancestries, so the restricted model stays large
        pool = range(max(1, s // 2), s + 1)
        r = min(rng.choice(arities), len(pool))
        picks = rng.sample(pool, r)
        sub, relabel = restrict(model, picks)
        marked = [relabel[a] for a in picks]
        if max_cells is not None:
            B = [[sub.A[a - 1][b - 1] for b in marked] for a in marked]
            box = [2 * sum(row[c] for row in B) for c in range(r)]
            cells = 1
            for x in box:
                cells *= x + 1
            if cells > max_cells:
                continue
        return sub, marked

