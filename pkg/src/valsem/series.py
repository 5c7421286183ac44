"""Exact box-truncated multivariate power series.

A :class:`SparseSeries` is a power series in ``t_1..t_r`` truncated to the
box ``[0, N_1] x ... x [0, N_r]`` (inclusive).  Coefficients live in a dense
numpy array; it is ``int64`` while magnitudes are small and is promoted to an
``object`` array of Python integers before any operation that could overflow,
so arithmetic is always exact.

A :class:`FactoredSeries` is a finite product ``prod (1 - t^v)^e``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from .errors import ArityMismatch, MarginExceeded, Unstable, ZeroVectorFactor

_SAFE = 2 ** 61

Vector = tuple[int, ...]


def _grow(arr: np.ndarray, factor: int) -> np.ndarray:
    """Promote to Python integers if multiplying magnitudes by ``factor`` could overflow."""
    if arr.dtype == object or arr.size == 0:
        return arr
    peak = int(np.abs(arr).max())
    if peak * factor >= _SAFE:
        return arr.astype(object)
    return arr


def _shift_slices(shape: Sequence[int], v: Sequence[int]):
    """(dst, src) slices so that ``arr[dst] += arr[src]`` multiplies by t^v, or None."""
    if any(vi >= n for vi, n in zip(v, shape)):
        return None
    dst = tuple(slice(vi, None) for vi in v)
    src = tuple(slice(0, n - vi) for vi, n in zip(v, shape))
    return dst, src


class SparseSeries:
    """Truncated series; ``box`` is the inclusive per-coordinate bound."""

    __slots__ = ("box", "arr")

    def __init__(self, box: Sequence[int], arr: np.ndarray | None = None):
        self.box = tuple(int(b) for b in box)
        shape = tuple(b + 1 for b in self.box)
        if arr is None:
            arr = np.zeros(shape, dtype=np.int64)
        if arr.shape != shape:
            raise ValueError(f"array shape {arr.shape} does not match box {self.box}")
        self.arr = arr

    # construction
    @classmethod
    def zero(cls, box: Sequence[int]) -> SparseSeries:
        return cls(box)

    @classmethod
    def monomial(cls, box: Sequence[int], m: Sequence[int], c: int = 1) -> SparseSeries:
        s = cls(box)
        if all(0 <= mi <= b for mi, b in zip(m, s.box)):
            s.arr[tuple(m)] = c
        return s

    @classmethod
    def one(cls, box: Sequence[int]) -> SparseSeries:
        return cls.monomial(box, [0] * len(box))

    @classmethod
    def from_dict(cls, box: Sequence[int], coeffs: dict) -> SparseSeries:
        s = cls(box)
        arr = s.arr
        if any(abs(int(c)) >= _SAFE for c in coeffs.values()):
            arr = arr.astype(object)
        for m, c in coeffs.items():
            if all(0 <= mi <= b for mi, b in zip(m, s.box)):
                arr[tuple(m)] = int(c)
        s.arr = arr
        return s

    @property
    def r(self) -> int:
        return len(self.box)

    def copy(self) -> SparseSeries:
        return SparseSeries(self.box, self.arr.copy())

    # access
    def __getitem__(self, m: Sequence[int]) -> int:
        m = tuple(m)
        if len(m) != self.r:
            raise ArityMismatch(f"exponent {m} has arity {len(m)}, series has {self.r}")
        if any(mi < 0 for mi in m):
            return 0
        if any(mi > b for mi, b in zip(m, self.box)):
            raise MarginExceeded(f"exponent {m} outside box {self.box}")
        return int(self.arr[m])

    def items(self) -> Iterator[tuple[Vector, int]]:
        """Nonzero terms in lexicographic order of exponents."""
        for idx in zip(*np.nonzero(self.arr)):
            m = tuple(int(i) for i in idx)
            yield m, int(self.arr[m])

    def support(self) -> list[Vector]:
        return [m for m, _ in self.items()]

    def nnz(self) -> int:
        return int(np.count_nonzero(self.arr))

    def restrict(self, box: Sequence[int]) -> SparseSeries:
        box = tuple(box)
        if any(b > sb for b, sb in zip(box, self.box)) or len(box) != self.r:
            raise MarginExceeded(f"box {box} is not inside {self.box}")
        return SparseSeries(box, self.arr[tuple(slice(0, b + 1) for b in box)].copy())

    def to_json(self) -> list[dict]:
        return [{"m": list(m), "c": str(c)} for m, c in self.items()]

    # arithmetic
    def _check(self, other: SparseSeries):
        if self.box != other.box:
            raise ArityMismatch(f"boxes differ: {self.box} vs {other.box}")

    def __add__(self, other: SparseSeries) -> SparseSeries:
        return add(self, other)

    def __sub__(self, other: SparseSeries) -> SparseSeries:
        return add(self, other.scale(-1))

    def __mul__(self, other: SparseSeries) -> SparseSeries:
        return mul(self, other)

    def scale(self, c: int) -> SparseSeries:
        arr = _grow(self.arr, abs(c) + 1)
        return SparseSeries(self.box, arr * c)

    def __neg__(self) -> SparseSeries:
        return self.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseSeries) or other.box != self.box:
            return NotImplemented
        return bool(np.array_equal(self.arr, other.arr))

    def __repr__(self) -> str:
        terms = list(itertools.islice(self.items(), 6))
        more = "..." if self.nnz() > 6 else ""
        return f"SparseSeries(box={self.box}, {terms}{more})"

    # in-place building blocks for products of binomials
    def times_one_minus(self, v: Sequence[int], power: int = 1) -> SparseSeries:
        """Multiply by ``(1 - t^v)^power``; negative powers expand geometrically."""
        if not any(v):
            raise ZeroVectorFactor("factor (1 - t^0) is zero")
        arr = self.arr.copy()
        shape = arr.shape
        if power >= 0:
            for _ in range(power):
                sl = _shift_slices(shape, v)
                if sl is None:
                    break
                arr = _grow(arr, 2)
                arr[sl[0]] -= arr[sl[1]]
        else:
            for _ in range(-power):
                # 1/(1-x) = (1+x)(1+x^2)(1+x^4)... truncated
                step = list(v)
                while (sl := _shift_slices(shape, step)) is not None:
                    arr = _grow(arr, 2)
                    arr[sl[0]] += arr[sl[1]]
                    step = [2 * x for x in step]
        return SparseSeries(self.box, arr)

    def times_monomial(self, v: Sequence[int], c: int = 1) -> SparseSeries:
        out = SparseSeries(self.box, np.zeros_like(_grow(self.arr, abs(c) + 1)))
        sl = _shift_slices(self.arr.shape, v)
        if sl is not None:
            out.arr[sl[0]] = self.arr[sl[1]] * c
        return out


def add(a: SparseSeries, b: SparseSeries) -> SparseSeries:
    a._check(b)
    x, y = _grow(a.arr, 2), _grow(b.arr, 2)
    if x.dtype != y.dtype:
        x, y = x.astype(object), y.astype(object)
    return SparseSeries(a.box, x + y)


def mul(a: SparseSeries, b: SparseSeries) -> SparseSeries:
    """Truncated exact product (convolution over the box)."""
    a._check(b)
    if a.nnz() > b.nnz():
        a, b = b, a
    bound = 0
    if b.arr.size and a.arr.size:
        bound = int(np.abs(a.arr).max()) * int(np.abs(b.arr).max()) * max(a.nnz(), 1)
    out_dtype = object if bound >= _SAFE or a.arr.dtype == object or b.arr.dtype == object else np.int64
    out = np.zeros(b.arr.shape, dtype=out_dtype)
    barr = b.arr.astype(out_dtype)
    for m, c in a.items():
        sl = _shift_slices(out.shape, m)
        if sl is not None:
            out[sl[0]] += barr[sl[1]] * c
    return SparseSeries(a.box, out)


def first_discrepancy(a: SparseSeries, b: SparseSeries) -> tuple[Vector, int, int] | None:
    """Lexicographically first exponent where ``a`` and ``b`` differ."""
    a._check(b)
    diff = np.nonzero(a.arr != b.arr)
    if len(diff[0]) == 0:
        return None
    m = min(tuple(int(i) for i in idx) for idx in zip(*diff))
    return m, int(a.arr[m]), int(b.arr[m])


def count_discrepancies(a: SparseSeries, b: SparseSeries) -> int:
    a._check(b)
    return int(np.count_nonzero(a.arr != b.arr))


# -- factored products --------------------------------------------------------

@dataclass(frozen=True)
class FactoredSeries:
    """``prod (1 - t^v)^e`` with factors merged by ``v``, zero exponents dropped, sorted."""

    r: int
    factors: tuple[tuple[Vector, int], ...]

    @classmethod
    def of(cls, pairs: Iterable[tuple[Sequence[int], int]], r: int | None = None) -> FactoredSeries:
        acc: dict[Vector, int] = {}
        for v, e in pairs:
            v = tuple(int(x) for x in v)
            if r is None:
                r = len(v)
            if len(v) != r:
                raise ArityMismatch(f"factor {v} has arity {len(v)}, expected {r}")
            if any(x < 0 for x in v):
                raise ValueError(f"factor vector {v} has a negative entry")
            if not any(v):
                raise ZeroVectorFactor(f"factor vector {v} is zero")
            acc[v] = acc.get(v, 0) + int(e)
        if r is None:
            raise ValueError("arity of an empty product must be given")
        return cls(r, tuple(sorted((v, e) for v, e in acc.items() if e != 0)))

    @classmethod
    def one(cls, r: int) -> FactoredSeries:
        return cls(r, ())

    def __mul__(self, other: FactoredSeries) -> FactoredSeries:
        if other.r != self.r:
            raise ArityMismatch("arity mismatch")
        return FactoredSeries.of(self.factors + other.factors, self.r)

    def inverse(self) -> FactoredSeries:
        return FactoredSeries(self.r, tuple((v, -e) for v, e in self.factors))

    def numerator(self) -> list[tuple[Vector, int]]:
        return [(v, e) for v, e in self.factors if e > 0]

    def denominator(self) -> list[tuple[Vector, int]]:
        return [(v, -e) for v, e in self.factors if e < 0]

    def expand(self, box: Sequence[int]) -> SparseSeries:
        return expand(self, box)

    def specialize_at_one(self, J: Iterable[int]) -> FactoredSeries:
        """Set ``t_j = 1`` for ``j`` in ``J`` (0-based); exact on the factored form.

        Every factor must keep a nonzero exponent outside ``J``; then each
        factor, and hence the product, specializes coefficientwise.
        """
        J = set(J)
        keep = [i for i in range(self.r) if i not in J]
        pairs = []
        for v, e in self.factors:
            w = tuple(v[i] for i in keep)
            if not any(w):
                raise ZeroVectorFactor(f"factor {v} vanishes at t_J = 1 for J = {sorted(J)}")
            pairs.append((w, e))
        return FactoredSeries.of(pairs, len(keep))

    def to_json(self) -> list[dict]:
        return [{"v": list(v), "e": e} for v, e in self.factors]

    @classmethod
    def from_json(cls, doc: list[dict], r: int | None = None) -> FactoredSeries:
        return cls.of(((d["v"], d["e"]) for d in doc), r)

    def __str__(self) -> str:
        def mono(v):
            return "*".join(f"t{i + 1}^{x}" if x != 1 else f"t{i + 1}" for i, x in enumerate(v) if x)

        def part(items):
            return "".join(f"(1-{mono(v)})" + (f"^{e}" if e != 1 else "") for v, e in items) or "1"

        den = self.denominator()
        return part(self.numerator()) + (f" / {part(den)}" if den else "")


def expand(f: FactoredSeries, box: Sequence[int]) -> SparseSeries:
    """Expand ``f`` on ``box``: positive powers as polynomials, negative ones geometrically."""
    box = tuple(box)
    if len(box) != f.r:
        raise ArityMismatch(f"box {box} has arity {len(box)}, series has {f.r}")
    s = SparseSeries.one(box)
    # apply denominators last so intermediate values stay small
    for v, e in sorted(f.factors, key=lambda ve: -ve[1]):
        s = s.times_one_minus(v, e)
    return s


class Specialization(NamedTuple):
    series: SparseSeries
    stable: bool | None


def specialize_at_one(s: SparseSeries, J: Iterable[int], box: Sequence[int],
                      probe: SparseSeries | None = None) -> Specialization:
    """Sum out the coordinates in ``J`` (0-based) of a truncated series.

    The reduced coefficient at ``m`` is the sum of the coefficients of ``s``
    over every exponent whose non-``J`` part is ``m``.  ``box`` bounds the
    remaining coordinates.  If ``probe`` (the same series truncated on a larger
    box) is given, ``stable`` reports whether it yields the same result.
    """
    J = sorted(set(J))
    keep = [i for i in range(s.r) if i not in J]
    box = tuple(box)
    if len(box) != len(keep):
        raise ArityMismatch(f"reduced box {box} must have arity {len(keep)}")

    def collapse(src: SparseSeries) -> SparseSeries:
        for i, b in zip(keep, box):
            if b > src.box[i]:
                raise MarginExceeded(f"reduced box {box} exceeds source box {src.box}")
        idx = tuple(slice(None) if i in J else slice(0, box[keep.index(i)] + 1) for i in range(src.r))
        arr = _grow(src.arr[idx], int(np.prod([src.box[j] + 1 for j in J] or [1])))
        reduced = arr.sum(axis=tuple(J)) if J else arr.copy()
        return SparseSeries(box, np.asarray(reduced, dtype=arr.dtype).reshape(tuple(b + 1 for b in box)))

    out = collapse(s)
    stable = None
    if probe is not None:
        stable = collapse(probe) == out
    return Specialization(out, stable)


def embed(s: SparseSeries, J: Iterable[int], r: int, box: Sequence[int]) -> SparseSeries:
    """View a series in the non-``J`` variables as a series in all ``r`` variables."""
    J = set(J)
    keep = [i for i in range(r) if i not in J]
    out = SparseSeries(box)
    src = s.restrict(tuple(box[i] for i in keep)) if keep else s
    out.arr = np.zeros(out.arr.shape, dtype=src.arr.dtype)
    idx = tuple(slice(None) if i not in J else 0 for i in range(r))
    out.arr[idx] = src.arr if keep else src.arr[()]
    return out


# -- recovering the dimension table --------------------------------------------

def _diag_minus_one(s: SparseSeries) -> SparseSeries:
    """``(t_1 ... t_r - 1) * s``."""
    return s.times_monomial([1] * s.r) - s


class DimensionTable:
    """Dimensions ``d(m)`` of the graded pieces on ``[0, box]``, with the
    Laurent extension ``d(m) = d(max(m, 0))`` unless every ``m_i <= -1``."""

    def __init__(self, series: SparseSeries):
        self.series = series

    @property
    def box(self) -> Vector:
        return self.series.box

    def __call__(self, m: Sequence[int]) -> int:
        m = tuple(m)
        if all(x <= -1 for x in m):
            return 0
        return self.series[tuple(max(x, 0) for x in m)]

    def hilbert(self, m: Sequence[int]) -> int:
        return hilbert(self, m)


def recover_dims(Pv: FactoredSeries, box: Sequence[int], method: str = "factored",
                 source_box: Sequence[int] | None = None,
                 probe_box: Sequence[int] | None = None) -> DimensionTable:
    """Recover ``d(m)`` on ``box`` from the Poincare series ``Pv``.

    ``P' = (t_1...t_r - 1) Pv``; ``P~' = sum_J (-1)^|J| P'|_{t_J = 1}``;
    ``L~ = P~' * prod_i -1/(1 - t_i)`` is the generating series of ``d`` on
    the nonnegative orthant.  The ``J = I`` term vanishes because
    ``(t_1...t_r - 1)`` specializes to zero.

    ``method="factored"`` specializes the product formula factor by factor
    (exact).  ``method="truncated"`` expands ``P'`` on ``source_box`` and sums
    out coordinates, comparing against ``probe_box``; it raises
    :class:`Unstable` if the two disagree.
    """
    box = tuple(box)
    r = Pv.r
    if len(box) != r:
        raise ArityMismatch("box arity")
    total = SparseSeries.zero(box)
    if method == "truncated":
        source_box = tuple(source_box or [4 * b + 4 for b in box])
        probe_box = tuple(probe_box or [2 * b for b in source_box])
        p_src = _diag_minus_one(expand(Pv, source_box))
        p_probe = _diag_minus_one(expand(Pv, probe_box))
    elif method != "factored":
        raise ValueError(f"unknown method {method!r}")

    for size in range(r):
        for J in itertools.combinations(range(r), size):
            keep = [i for i in range(r) if i not in J]
            red_box = tuple(box[i] for i in keep)
            if method == "factored":
                reduced = _diag_minus_one(Pv.specialize_at_one(J).expand(red_box))
            elif not J:
                reduced = p_src.restrict(box)
            else:
                reduced, stable = specialize_at_one(p_src, J, red_box, probe=p_probe)
                if not stable:
                    raise Unstable(f"specialization at t_J = 1, J = {list(J)}, "
                                   f"changed between boxes {source_box} and {probe_box}")
            term = embed(reduced, J, r, box)
            total = total + (term if size % 2 == 0 else -term)
    dims = total
    for i in range(r):
        e = [0] * r
        e[i] = 1
        dims = -dims.times_one_minus(e, -1)
    return DimensionTable(dims)


def hilbert(table: DimensionTable, m: Sequence[int]) -> int:
    """``h(m) = dim R/J(m) = sum_{k >= 1} d(m - k(1,...,1))``."""
    m = tuple(m)
    need = tuple(max(x - 1, 0) for x in m)
    if any(n > b for n, b in zip(need, table.box)):
        raise MarginExceeded(f"h{m} needs d up to {need}, table box is {table.box}")
    total, k = 0, 1
    while not all(x - k <= -1 for x in m):
        total += table(tuple(x - k for x in m))
        k += 1
    return total
