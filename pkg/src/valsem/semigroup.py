"""Arithmetic in the semigroup of values of a finite set of divisorial valuations."""
from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .dualgraph import classify, h_set, path
from .errors import (BoxTooLarge, InternalNoSolution, NoComponent, NoStabilization, NotInSemigroup,
                     NotMinimal, NotSingleMinimal)
from .poincare import CurveMarking, vk_extend
from .resolution import ResolutionModel, validate_minimality

Vector = tuple[int, ...]

DEFAULT_CELL_CAP = 10 ** 8


def cell_cap() -> int:
    return int(os.environ.get("VALSEM_CELL_CAP", DEFAULT_CELL_CAP))


def reachable_set(gens: Sequence[Vector], box: Sequence[int], cap: int | None = None) -> np.ndarray:
    """Boolean array over ``[0, box]`` marking the sums of ``gens`` that fit in the box."""
    box = tuple(box)
    cells = math.prod(b + 1 for b in box)
    cap = cell_cap() if cap is None else cap
    if cells > cap:
        raise BoxTooLarge(f"box {box} has {cells} cells, cap is {cap}")
    shape = tuple(b + 1 for b in box)
    reach = np.zeros(shape, dtype=bool)
    reach[(0,) * len(box)] = True
    for g in sorted(set(gens)):
        step = list(g)
        # closing under +g by doubling: after j rounds every multiple < 2^j g is added
        while all(x < n for x, n in zip(step, shape)):
            dst = tuple(slice(x, None) for x in step)
            src = tuple(slice(0, n - x) for x, n in zip(step, shape))
            reach[dst] |= reach[src]
            step = [2 * x for x in step]
    return reach


class SemigroupHandle:
    """The semigroup ``S_V`` of the valuations at the marked vertices.

    ``S_V`` is the projection onto the marked coordinates of the free
    semigroup generated by the rows of the value matrix.
    """

    def __init__(self, model: ResolutionModel, marked: Sequence[int]):
        self.model = model
        self.marked = tuple(int(a) for a in marked)
        for a in self.marked:
            model.check_vertex(a)
        self.fullB = [model.row(v) for v in model.vertices]
        self.projB = [model.projected_row(v, self.marked) for v in model.vertices]
        self.markedB = [model.projected_row(a, self.marked) for a in self.marked]
        self._cache: dict[Vector, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def r(self) -> int:
        return len(self.marked)

    def _arity(self, m: Sequence[int]) -> Vector:
        m = tuple(int(x) for x in m)
        if len(m) != self.r:
            raise ValueError(f"vector {m} has arity {len(m)}, expected {self.r}")
        return m

    def reachable(self, box: Sequence[int]) -> np.ndarray:
        """Membership bitmap on ``[0, box]`` (read-only view, cached)."""
        box = self._arity(box)
        with self._lock:
            for cached, arr in self._cache.items():
                if all(b <= c for b, c in zip(box, cached)):
                    return arr[tuple(slice(0, b + 1) for b in box)]
        arr = reachable_set(self.projB, box)
        arr.flags.writeable = False
        with self._lock:
            self._cache[box] = arr
        return arr

    def contains(self, m: Sequence[int]) -> bool:
        m = self._arity(m)
        if any(x < 0 for x in m):
            return False
        return bool(self.reachable(m)[m])

    def member(self, m: Sequence[int]) -> tuple[int, ...] | None:
        """A witness ``lambda`` with ``sum lambda_j projB[j] = m``, or None."""
        m = self._arity(m)
        if any(x < 0 for x in m):
            raise ValueError(f"{m} has a negative coordinate")
        reach = self.reachable(m)
        if not reach[m]:
            return None
        lam = [0] * self.model.s
        cur = m
        while any(cur):
            for j, g in enumerate(self.projB):
                rest = tuple(c - x for c, x in zip(cur, g))
                if min(rest) >= 0 and reach[rest]:
                    lam[j] += 1
                    cur = rest
                    break
            else:  # pragma: no cover - reach is closed under the generators
                raise InternalNoSolution(f"witness walk stuck at {cur}")
        return tuple(lam)

    def indecomposables_bruteforce(self, box: Sequence[int]) -> set[Vector]:
        """Nonzero members of the box that are not a sum of two nonzero members."""
        box = self._arity(box)
        reach = self.reachable(box)
        nonzero = reach.copy()
        nonzero[(0,) * self.r] = False
        decomposable = np.zeros_like(reach)
        shape = reach.shape
        for g in set(self.projB):
            if any(x >= n for x, n in zip(g, shape)):
                continue
            dst = tuple(slice(x, None) for x in g)
            src = tuple(slice(0, n - x) for x, n in zip(g, shape))
            decomposable[dst] |= nonzero[src]
        return {tuple(int(i) for i in idx) for idx in zip(*np.nonzero(nonzero & ~decomposable))}

    def decompose(self, m: Sequence[int]) -> Decomposition:
        """``m = n + sum a_i B^i`` with ``a_i`` maximal and ``n - B^i`` outside ``S_V``."""
        m = self._arity(m)
        if not self.contains(m):
            raise NotInSemigroup(f"{m} is not in the semigroup")
        reach = self.reachable(m)

        def inside(v):
            return min(v) >= 0 and bool(reach[v])

        a = []
        for B in self.markedB:
            k = min(x // b for x, b in zip(m, B))
            while not inside(tuple(x - k * b for x, b in zip(m, B))):
                k -= 1
            a.append(k)
        n = tuple(x - sum(ai * B[c] for ai, B in zip(a, self.markedB)) for c, x in enumerate(m))
        if not inside(n):
            raise InternalNoSolution(f"remainder {n} of {m} left the semigroup")
        for B in self.markedB:
            if inside(tuple(x - b for x, b in zip(n, B))):
                raise InternalNoSolution(f"remainder {n} of {m} is not reduced")
        return Decomposition(tuple(a), n)

    def dim_di(self, m: Sequence[int], i: int) -> int:
        """``d_i(m) = a_i + 1``; ``i`` is a 0-based branch index."""
        return self.decompose(m).a[i] + 1

    def h_values(self) -> dict[int, Vector]:
        return {v: self.projB[v - 1] for v in sorted(h_set(self.model, self.marked).H)}

    def sample(self, rng, count: int, box: Sequence[int]) -> list[Vector]:
        """Up to ``count`` distinct random members of the box."""
        pts = np.argwhere(self.reachable(box))
        idx = sorted(rng.sample(range(len(pts)), min(count, len(pts))))
        return [tuple(int(x) for x in pts[i]) for i in idx]


class Decomposition(NamedTuple):
    a: tuple[int, ...]
    n: Vector

    def to_json(self) -> dict:
        return {"a": list(self.a), "n": list(self.n)}


def witness_json(lam: Sequence[int]) -> dict:
    return {"lambda": {str(j + 1): c for j, c in enumerate(lam) if c}}


# -- monomials in curvettes at dead ends -----------------------------------------

def _generators(model: ResolutionModel) -> frozenset:
    # vertex 1 always carries a generator even when it is not a leaf
    return classify(model).dead_ends | {1}


def _solutions(coeffs: Sequence[int], target: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative solutions of ``sum c_j x_j = target`` in lexicographic order."""
    if not coeffs:
        if target == 0:
            yield ()
        return
    head, rest = coeffs[0], coeffs[1:]
    for x in range(target // head + 1):
        for tail in _solutions(rest, target - x * head):
            yield (x,) + tail


def monomial_for_component(model: ResolutionModel, alpha: int, delta) -> dict[int, int]:
    """Exponents on the dead ends of ``delta`` with values equal to ``Q_alpha``
    off ``delta`` and strictly larger on ``delta``."""
    model.check_vertex(alpha)
    delta = frozenset(delta)
    if delta not in classify(model).components_without(alpha):
        raise NoComponent(f"{sorted(delta)} is not a component of the graph minus {alpha}")
    A = model.A
    ends = sorted(_generators(model) & delta)
    coeffs = [A[rho - 1][alpha - 1] for rho in ends]
    for lam in _solutions(coeffs, A[alpha - 1][alpha - 1]):
        ok = True
        for g in model.vertices:
            val = sum(x * A[rho - 1][g - 1] for x, rho in zip(lam, ends))
            want = A[alpha - 1][g - 1]
            if (g in delta and val <= want) or (g not in delta and val != want):
                ok = False
                break
        if ok:
            return {rho: x for rho, x in zip(ends, lam) if x}
    raise InternalNoSolution(f"no monomial for vertex {alpha} on component {sorted(delta)}")


def monomial_dominating(model: ResolutionModel, beta: int, alpha_h: int) -> dict[int, int]:
    """A monomial at least as large as ``Q_{alpha_h}`` everywhere, equal at ``beta``."""
    model.check_vertex(beta)
    model.check_vertex(alpha_h)
    if alpha_h in _generators(model):
        lam = {alpha_h: 1}
    else:
        comps = [c for c in classify(model).components_without(alpha_h) if beta not in c]
        lam = monomial_for_component(model, alpha_h, comps[0])
    A = model.A
    for g in model.vertices:
        val = sum(x * A[rho - 1][g - 1] for rho, x in lam.items())
        want = A[alpha_h - 1][g - 1]
        if val < want or (g == beta and val != want):
            raise InternalNoSolution(f"monomial {lam} does not dominate Q_{alpha_h} at {g}")
    return lam


# -- a single valuation ------------------------------------------------------------

@dataclass(frozen=True)
class MaximalContactData:
    dead_end_order: tuple[int, ...]
    beta_bar: tuple[int, ...]
    e: tuple[int, ...]
    multiplier: int
    c: int
    conductor: int

    @property
    def g(self) -> int:
        return len(self.dead_end_order) - 1

    def to_json(self) -> dict:
        return {"deadEnds": list(self.dead_end_order), "betaBar": list(self.beta_bar), "e": list(self.e),
                "multiplier": self.multiplier, "c": self.c, "conductor": self.conductor}


def numerical_members(gens: Sequence[int], bound: int) -> np.ndarray:
    return reachable_set([(g,) for g in gens], (bound,), cap=None)


def conductor(gens: Sequence[int]) -> int:
    """Least ``c`` with ``c + Z>=0`` inside the numerical semigroup ``<gens>``."""
    gens = [g for g in gens if g > 0]
    if math.gcd(*gens) != 1:
        raise ValueError(f"<{gens}> has infinite complement")
    run_len = min(gens)
    bound = 4 * max(gens)
    while True:
        members = numerical_members(gens, bound)
        run = 0
        for x in range(bound + 1):
            run = run + 1 if members[x] else 0
            if run == run_len:
                return x - run_len + 1
        bound *= 2


def maximal_contact(model: ResolutionModel, alpha: int) -> MaximalContactData:
    """Maximal contact values of the valuation at ``alpha`` and the last relation
    ``beta_{g+1} = n beta_g + c``."""
    model.check_vertex(alpha)
    if not validate_minimality(model, [alpha]).ok:
        raise NotSingleMinimal(f"model is not the minimal resolution of the valuation at {alpha}")
    graph = classify(model)
    rhos = tuple(sorted(v for v in _generators(model) if v == 1 or v != alpha))
    A = model.A
    bb = tuple(A[r - 1][alpha - 1] for r in rhos) + (A[alpha - 1][alpha - 1],)
    e = tuple(math.gcd(*bb[: i + 1]) for i in range(len(rhos)))
    g = len(rhos) - 1
    # the last dead-end branch leaves the geodesic [1, alpha] at st_g
    trunk = set(graph.root_path(alpha))
    star = next(v for v in path(graph, rhos[-1], alpha) if v in trunk)
    mult = e[g - 1] if g else 1
    c = len(path(graph, star, alpha)) - 1
    if bb[-1] != mult * bb[g] + c:
        raise InternalNoSolution(f"relation {bb[-1]} = {mult}*{bb[g]} + {c} fails")
    return MaximalContactData(rhos, bb, e, mult, c, conductor(bb[:-1]))


# -- curves ------------------------------------------------------------------------

class CurveMembership(NamedTuple):
    member: bool
    k: int
    witness: tuple[int, ...] | None
    heuristic: bool

    def to_json(self) -> dict:
        out = {"member": self.member, "k": self.k, "heuristic": self.heuristic}
        if self.witness is not None:
            out.update(witness_json(self.witness))
        return out


def curve_member(marking: CurveMarking, m: Sequence[int], kcap: int = 32) -> CurveMembership:
    """Membership in ``S_C`` by climbing the tower ``S_V(0) <= S_V(1) <= ...``.

    A negative answer is heuristic: it is given once the reachable set inside
    ``[0, m]`` is unchanged between two consecutive levels.
    """
    m = tuple(int(x) for x in m)
    prev = None
    for k in range(kcap + 1):
        ext = vk_extend(marking, k)
        handle = SemigroupHandle(ext.model, ext.marked)
        lam = handle.member(m)
        if lam is not None:
            return CurveMembership(True, k, lam, False)
        cur = handle.reachable(m)
        if prev is not None and np.array_equal(prev, cur):
            return CurveMembership(False, k, None, True)
        prev = cur
    raise NoStabilization(f"membership of {m} undecided up to k = {kcap}")


@dataclass(frozen=True)
class IndecomposableFamily:
    base: Vector
    direction: int

    def member(self, k: int) -> Vector:
        return tuple(x + (k if c == self.direction else 0) for c, x in enumerate(self.base))

    def to_json(self) -> dict:
        return {"base": list(self.base), "direction": self.direction}


class CurveIndecomposables(NamedTuple):
    finite: tuple[Vector, ...]
    families: tuple[IndecomposableFamily, ...]


def curve_indecomposables(marking: CurveMarking, bound: Sequence[int] | None = None) -> CurveIndecomposables:
    """Values of curvettes at the arrowed-graph index set plus one family per branch."""
    model, marked = marking.model, marking.marked
    hs = h_set(model, sorted(set(marked)), dead_ends=marking.dead_ends())
    vals = sorted({model.projected_row(v, marked) for v in hs.H})
    if bound is not None:
        vals = [v for v in vals if all(x <= b for x, b in zip(v, bound))]
    fams = tuple(IndecomposableFamily(model.projected_row(a, marked), i) for i, a in enumerate(marked))
    return CurveIndecomposables(tuple(vals), fams)


def generating_sequence(model: ResolutionModel, marked: Sequence[int], curve: bool = False) -> dict:
    """Curvettes at the dead ends (plus the branch equations for a curve)."""
    marked = tuple(marked)
    report = validate_minimality(model, sorted(set(marked)))
    if not report.ok:
        raise NotMinimal(f"unmarked leaves {list(report.offending)}")
    if curve:
        ends = CurveMarking(model, marked).dead_ends() | {1}
        branches = [f"f{i + 1}" for i in range(len(marked))] if len(marked) > 1 else []
    else:
        ends = _generators(model)
        branches = []
    out = {"curvettes": sorted(ends), "branches": branches, "degenerate": model.s == 1}
    if model.s == 1:
        out["note"] = "single blow-up: one curvette cannot generate the maximal ideal"
    return out

