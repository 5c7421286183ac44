"""Combinatorial model of a sequence of point blow-ups.

A blow-up sequence is given as a list of :class:`Center` objects.  Center
``j`` is the point whose blow-up creates the exceptional divisor ``E_j``;
vertex ``j`` of every graph and row/column ``j`` (1-based) of every matrix
refer to that divisor.

From the proximity relations we build

* ``M``: intersection matrix of the strict transforms ``E_1..E_s``,
  ``M = -Q Q^T`` with ``Q = I - (proximity)^T``;
* ``A = -M^{-1}``: the value matrix, ``A[a][g] = nu_g(Q_a)`` where ``Q_a`` is
  a curvette at ``E_a``.

Everything is exact: the inverse is computed by fraction-free elimination
over Python integers.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .errors import (
    DanglingParent,
    IllegalSatellite,
    NonTreeConfiguration,
    NonUnimodular,
    ValidationError,
    VertexOutOfRange,
)

ORIGIN, FREE, SATELLITE = "origin", "free", "satellite"

Matrix = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Center:
    """One blow-up center.

    ``parents`` is empty for the origin, ``(p,)`` for a free point on ``E_p``
    and ``(a, b)`` with ``a < b`` for the satellite point ``E_a & E_b``.
    """

    id: int
    kind: str
    parents: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind == SATELLITE and len(self.parents) == 2:
            a, b = self.parents
            if a > b:
                object.__setattr__(self, "parents", (b, a))

    @classmethod
    def origin(cls) -> Center:
        return cls(1, ORIGIN)

    @classmethod
    def free(cls, id: int, on: int) -> Center:
        return cls(id, FREE, (on,))

    @classmethod
    def satellite(cls, id: int, a: int, b: int) -> Center:
        return cls(id, SATELLITE, (a, b))

    @property
    def tree_parent(self) -> int | None:
        """Immediate predecessor in the tree of infinitely near points."""
        return max(self.parents) if self.parents else None

    def to_json(self) -> dict:
        doc: dict = {"id": self.id, "kind": self.kind}
        if self.kind == FREE:
            doc["on"] = self.parents[0]
        elif self.kind == SATELLITE:
            doc["on"] = list(self.parents)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> Center:
        try:
            cid = int(doc["id"])
            kind = str(doc["kind"]).lower()
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"center {doc!r}: needs integer 'id' and a 'kind'") from exc
        if kind == ORIGIN:
            return cls(cid, ORIGIN)
        if kind == FREE:
            on = doc.get("on")
            if isinstance(on, list):
                if len(on) != 1:
                    raise ValidationError(f"center {cid}: free point lies on exactly one divisor")
                on = on[0]
            if not isinstance(on, int):
                raise ValidationError(f"center {cid}: free point needs integer 'on'")
            return cls(cid, FREE, (on,))
        if kind == SATELLITE:
            on = doc.get("on")
            if not (isinstance(on, list) and len(on) == 2 and all(isinstance(x, int) for x in on)):
                raise ValidationError(f"center {cid}: satellite point needs 'on': [a, b]")
            if on[0] == on[1]:
                raise ValidationError(f"center {cid}: satellite parents must differ")
            return cls(cid, SATELLITE, (on[0], on[1]))
        raise ValidationError(f"center {cid}: unknown kind {kind!r}")


class MinimalityReport(NamedTuple):
    ok: bool
    offending: tuple[int, ...]


@dataclass(frozen=True)
class ResolutionModel:
    centers: tuple[Center, ...]
    proximity: Matrix
    M: Matrix
    A: Matrix
    edges: frozenset = field(default_factory=frozenset)

    @property
    def s(self) -> int:
        return len(self.centers)

    @property
    def vertices(self) -> range:
        return range(1, self.s + 1)

    def check_vertex(self, alpha: int) -> int:
        if not (isinstance(alpha, int) and 1 <= alpha <= self.s):
            raise VertexOutOfRange(f"vertex {alpha!r} outside 1..{self.s}")
        return alpha

    def value(self, alpha: int, gamma: int) -> int:
        """``nu_gamma(Q_alpha)``."""
        return self.A[alpha - 1][gamma - 1]

    def row(self, alpha: int) -> tuple[int, ...]:
        return self.A[self.check_vertex(alpha) - 1]

    def projected_row(self, alpha: int, marked: Sequence[int]) -> tuple[int, ...]:
        row = self.row(alpha)
        return tuple(row[g - 1] for g in marked)

    def tree_children(self) -> dict[int, list[int]]:
        children: dict[int, list[int]] = {v: [] for v in self.vertices}
        for c in self.centers:
            if c.tree_parent is not None:
                children[c.tree_parent].append(c.id)
        return children

    def ancestors(self, alpha: int) -> list[int]:
        """Chain of centers ``1 = c_0, ..., c_k = alpha`` in the point tree."""
        chain = [self.check_vertex(alpha)]
        while (p := self.centers[chain[-1] - 1].tree_parent) is not None:
            chain.append(p)
        return chain[::-1]


# -- exact linear algebra ----------------------------------------------------

def bareiss_inverse(mat: Sequence[Sequence[int]]) -> tuple[int, list[list[int]]]:
    """Fraction-free Gauss-Jordan elimination.

    Returns ``(det, adj)`` with ``adj = det * mat^{-1}`` (the adjugate); all
    intermediate quantities are integers.
    """
    n = len(mat)
    work = [list(map(int, r)) + [int(i == j) for j in range(n)] for i, r in enumerate(mat)]
    sign, prev = 1, 1
    for k in range(n):
        piv = next((i for i in range(k, n) if work[i][k] != 0), None)
        if piv is None:
            return 0, [[0] * n for _ in range(n)]
        if piv != k:
            work[k], work[piv] = work[piv], work[k]
            sign = -sign
        pk = work[k]
        for i in range(n):
            if i == k:
                continue
            wi = work[i]
            f = wi[k]
            for j in range(2 * n):
                if j != k:
                    wi[j] = (pk[k] * wi[j] - f * pk[j]) // prev
            wi[k] = 0
        prev = pk[k]
    # left block is now prev * I; prev equals sign * det
    det = sign * prev
    adj = [[sign * work[i][n + j] for j in range(n)] for i in range(n)]
    return det, adj


def int_matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a]


# -- construction ------------------------------------------------------------

def _validate(centers: Sequence[Center]) -> set[frozenset]:
    """Check the center list and return the final set of intersecting pairs.

    Intersections are tracked incrementally: a free point on ``E_p`` adds the
    pair ``{p, j}``; a satellite point on ``E_a & E_b`` removes ``{a, b}`` and
    adds ``{a, j}``, ``{b, j}``.
    """
    if not centers:
        raise ValidationError("empty blow-up sequence")
    meets: set[frozenset] = set()
    for pos, c in enumerate(centers, start=1):
        if c.id != pos:
            raise ValidationError(f"center ids must be 1..s in order; got {c.id} at position {pos}")
        if pos == 1:
            if c.kind != ORIGIN:
                raise ValidationError("center 1 must be the origin")
            continue
        if c.kind == ORIGIN:
            raise ValidationError(f"center {c.id}: only center 1 may be the origin")
        for p in c.parents:
            if not 1 <= p < c.id:
                raise DanglingParent(f"center {c.id}: parent {p} must satisfy 1 <= parent < id")
        if c.kind == FREE:
            meets.add(frozenset((c.parents[0], c.id)))
        elif c.kind == SATELLITE:
            a, b = c.parents
            pair = frozenset((a, b))
            if pair not in meets:
                raise IllegalSatellite(
                    f"center {c.id}: E_{a} and E_{b} do not intersect at creation time"
                )
            meets.discard(pair)
            meets.add(frozenset((a, c.id)))
            meets.add(frozenset((b, c.id)))
        else:
            raise ValidationError(f"center {c.id}: unknown kind {c.kind!r}")
    return meets


def build_model(centers: Iterable[Center]) -> ResolutionModel:
    """Build the proximity, intersection and value matrices of a blow-up sequence."""
    centers = tuple(centers)
    meets = _validate(centers)
    s = len(centers)

    prox = [[0] * s for _ in range(s)]
    for c in centers:
        for p in c.parents:
            prox[c.id - 1][p - 1] = 1
    # Q[i][j] = -1 iff center j is proximate to center i
    q = [[int(i == j) - prox[j][i] for j in range(s)] for i in range(s)]
    qqt = int_matmul(q, [list(r) for r in zip(*q)])
    M = [[-x for x in r] for r in qqt]

    det, adj = bareiss_inverse(qqt)
    if det not in (1, -1):
        raise NonUnimodular(f"det(Q Q^T) = {det}")
    A = [[det * x for x in r] for r in adj]  # inverse of unimodular matrix
    if int_matmul(A, qqt) != [[int(i == j) for j in range(s)] for i in range(s)]:
        raise NonUnimodular("value matrix is not the inverse of -M")

    edges = frozenset(
        frozenset((i + 1, j + 1)) for i in range(s) for j in range(i + 1, s) if M[i][j] == 1
    )
    if any(M[i][j] not in (0, 1) for i in range(s) for j in range(s) if i != j):
        raise NonTreeConfiguration("off-diagonal intersection numbers must be 0 or 1")
    if edges != meets or not _is_tree(s, edges):
        raise NonTreeConfiguration("dual graph is not the expected tree")

    return ResolutionModel(
        centers=centers,
        proximity=tuple(map(tuple, prox)),
        M=tuple(map(tuple, M)),
        A=tuple(map(tuple, A)),
        edges=edges,
    )


def _is_tree(s: int, edges: frozenset) -> bool:
    if len(edges) != s - 1:
        return False
    adj: dict[int, list[int]] = {v: [] for v in range(1, s + 1)}
    for e in edges:
        u, v = tuple(e)
        adj[u].append(v)
        adj[v].append(u)
    seen, stack = {1}, [1]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == s


def b_vector(model: ResolutionModel, alpha: int) -> tuple[int, ...]:
    """Full value vector ``nu(Q_alpha)`` (row ``alpha`` of ``A``)."""
    return model.row(alpha)


def validate_minimality(model: ResolutionModel, marked: Sequence[int]) -> MinimalityReport:
    """Is ``model`` the minimal resolution of the divisors in ``marked``?

    It is iff every leaf of the point tree (a center that is the tree parent
    of no later center) is marked; otherwise the leaf could be dropped.
    """
    marked = [model.check_vertex(a) for a in marked]
    if not marked or len(set(marked)) != len(marked):
        raise ValidationError("marked vertices must be nonempty and distinct")
    children = model.tree_children()
    leaves = [v for v in model.vertices if not children[v]]
    offending = tuple(v for v in leaves if v not in set(marked))
    return MinimalityReport(not offending, offending)


def restrict(model: ResolutionModel, marked: Sequence[int]) -> tuple[ResolutionModel, dict[int, int]]:
    """Minimal resolution of ``marked`` inside ``model``.

    Keeps the centers that are ancestors of some marked center and renumbers
    them consecutively.  Returns the submodel and the old -> new vertex map.
    """
    keep: set[int] = set()
    for a in marked:
        keep.update(model.ancestors(a))
    order = sorted(keep)
    relabel = {old: new for new, old in enumerate(order, start=1)}
    centers = []
    for old in order:
        c = model.centers[old - 1]
        centers.append(Center(relabel[old], c.kind, tuple(relabel[p] for p in c.parents)))
    return build_model(centers), relabel


def extend(model: ResolutionModel, new_centers: Iterable[Center]) -> ResolutionModel:
    return build_model(model.centers + tuple(new_centers))


def random_centers(rng: random.Random, s: int, satellite_prob: float = 0.4) -> list[Center]:
    """Uniformly-ish random legal blow-up sequence with ``s`` centers."""
    centers = [Center.origin()]
    meets: list[tuple[int, int]] = []
    for j in range(2, s + 1):
        if meets and rng.random() < satellite_prob:
            a, b = meets.pop(rng.randrange(len(meets)))
            centers.append(Center.satellite(j, a, b))
            meets += [(a, j), (b, j)]
        else:
            p = rng.randrange(1, j)
            centers.append(Center.free(j, p))
            meets.append((p, j))
    return centers


def centers_from_json(items: Sequence[dict]) -> list[Center]:
    if not isinstance(items, list):
        raise ValidationError("'centers' must be a list")
    return [Center.from_json(d) for d in items]
