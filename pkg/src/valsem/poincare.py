"""Closed-form Poincare series, the Alexander polynomial of the general curve,
the divisorial tower V^(k) and executable checks of the identities between them."""
from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .dualgraph import classify
from .errors import NotMinimalWarning, OutsideFigureClass
from .resolution import Center, ResolutionModel, extend, validate_minimality
from .series import FactoredSeries, SparseSeries, count_discrepancies, expand, first_discrepancy


@dataclass(frozen=True)
class CurveMarking:
    """A curve with ``r`` branches whose strict transforms meet ``E_{marked[i]}``."""

    model: ResolutionModel
    marked: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "marked", tuple(int(a) for a in self.marked))
        if not self.marked:
            raise ValueError("a curve needs at least one branch")
        for a in self.marked:
            self.model.check_vertex(a)

    @property
    def r(self) -> int:
        return len(self.marked)

    @property
    def arrows(self) -> dict[int, int]:
        return dict(Counter(self.marked))

    @property
    def markedB(self) -> list[tuple[int, ...]]:
        return [self.model.projected_row(a, self.marked) for a in self.marked]

    def dead_ends(self) -> frozenset:
        """Dead ends of the arrowed graph: an arrow makes its vertex interior."""
        return classify(self.model).dead_ends - set(self.marked)


def _check_scope(model: ResolutionModel, marked: Sequence[int]) -> None:
    if model.s == 1:
        warnings.warn("single-vertex model lies outside the s >= 2 setting", OutsideFigureClass, stacklevel=3)
    report = validate_minimality(model, marked)
    if not report.ok:
        warnings.warn(f"model is not minimal for {list(marked)}: unmarked leaves {list(report.offending)}",
                      NotMinimalWarning, stacklevel=3)


def exponent_excess(model: ResolutionModel) -> int:
    """``sum_alpha (b(alpha) - 2)``; equals -2 on every tree."""
    g = classify(model)
    return sum(g.degree(v) - 2 for v in g.vertices)


def poincare_acampo(model: ResolutionModel, marked: Sequence[int]) -> FactoredSeries:
    """``P_V = prod_alpha (1 - t^{nu^alpha})^{b(alpha) - 2}``."""
    marked = tuple(marked)
    _check_scope(model, marked)
    g = classify(model)
    return FactoredSeries.of(
        ((model.projected_row(v, marked), g.degree(v) - 2) for v in g.vertices), len(marked))


def alexander_general_curve(marking: CurveMarking) -> FactoredSeries:
    """Eisenbud-Neumann product with exponents ``b(alpha) + arrows(alpha) - 2``."""
    model, marked = marking.model, marking.marked
    _check_scope(model, sorted(set(marked)))
    g = classify(model)
    arrows = marking.arrows
    return FactoredSeries.of(
        ((model.projected_row(v, marked), g.degree(v) + arrows.get(v, 0) - 2) for v in g.vertices),
        len(marked))


@dataclass(frozen=True)
class VkExtension:
    k: int
    model: ResolutionModel
    marked: tuple[int, ...]
    markedB: list[tuple[int, ...]] = field(compare=False)
    dead_ends: frozenset = field(compare=False)


def vk_extend(marking: CurveMarking, k: int) -> VkExtension:
    """Blow up ``k`` more times along each branch; the new marked vertices are the chain tips."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    model = marking.model
    tips = list(marking.marked)
    new: list[Center] = []
    nxt = model.s + 1
    for i, root in enumerate(marking.marked):
        prev = root
        for _ in range(k):
            new.append(Center.free(nxt, prev))
            prev = nxt
            nxt += 1
        tips[i] = prev
    ext = extend(model, new) if new else model
    tips_t = tuple(tips)
    markedB = [ext.projected_row(a, tips_t) for a in tips_t]
    return VkExtension(k, ext, tips_t, markedB, classify(ext).dead_ends)


def numerator_series(model: ResolutionModel, marked: Sequence[int], box: Sequence[int]) -> SparseSeries:
    """``expand(P_V) * prod_i (1 - t^{B^i})`` on ``box``, multiplied after expansion."""
    marked = tuple(marked)
    s = expand(poincare_acampo(model, marked), box)
    for a in marked:
        s = s.times_one_minus(model.projected_row(a, marked))
    return s


@dataclass(frozen=True)
class CheckReport:
    name: str
    ok: bool
    first_discrepancy: tuple | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        status = "skip" if "skipped" in self.detail else "pass" if self.ok else "fail"
        out = {"name": self.name, "status": status}
        if self.first_discrepancy is not None:
            m, a, b = self.first_discrepancy
            out["firstDiscrepancy"] = {"m": list(m), "lhs": str(a), "rhs": str(b)}
        if self.detail:
            out["detail"] = self.detail
        return out


def check_curve_numerator(marking: CurveMarking, box: Sequence[int]) -> CheckReport:
    """``P_V * prod(1 - t^{B^i}) == P_C`` coefficientwise on ``box``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideFigureClass)
        lhs = numerator_series(marking.model, marking.marked, box)
        rhs = expand(alexander_general_curve(marking), box)
    return CheckReport("curve_numerator", lhs == rhs, first_discrepancy(lhs, rhs), {"box": list(box)})


def check_tower_numerator(marking: CurveMarking, kmax: int, box: Sequence[int]) -> CheckReport:
    """The numerator ``P_{V^(k)} * prod(1 - t^{B^i_(k)})`` does not depend on ``k``."""
    base = None
    for k in range(kmax + 1):
        ext = vk_extend(marking, k)
        cur = numerator_series(ext.model, ext.marked, box)
        if base is None:
            base = cur
        elif cur != base:
            return CheckReport("tower_numerator", False, first_discrepancy(cur, base), {"k": k, "box": list(box)})
    return CheckReport("tower_numerator", True, None, {"kmax": kmax, "box": list(box)})


@dataclass(frozen=True)
class LimitProfile:
    counts: dict[int, int]
    k0: int | None

    @property
    def converged(self) -> bool:
        return self.k0 is not None

    @property
    def monotone(self) -> bool:
        vals = [self.counts[k] for k in sorted(self.counts)]
        return all(a >= b for a, b in zip(vals, vals[1:]))


def limit_profile(marking: CurveMarking, box: Sequence[int], kmax: int) -> LimitProfile:
    """Number of coefficients on ``box`` where ``P_{V^(k)}`` and ``P_C`` disagree, per ``k``."""
    target = expand(alexander_general_curve(marking), box)
    counts: dict[int, int] = {}
    k0 = None
    for k in range(kmax + 1):
        ext = vk_extend(marking, k)
        counts[k] = count_discrepancies(expand(poincare_acampo(ext.model, ext.marked), box), target)
        if counts[k] == 0 and k0 is None:
            k0 = k
    return LimitProfile(counts, k0)


@dataclass(frozen=True)
class PolynomialityReport:
    polynomial: bool
    degree: tuple[int, ...] | None
    box: tuple[int, ...]


def detect_polynomial(f: FactoredSeries, box: Sequence[int], margin: int = 1) -> PolynomialityReport:
    """Expand on ``box`` and call ``f`` polynomial when no term lies within ``margin`` of the boundary."""
    box = tuple(box)
    s = expand(f, box)
    supp = s.support()
    if not supp:
        return PolynomialityReport(True, None, box)
    degree = tuple(max(m[i] for m in supp) for i in range(len(box)))
    inside = all(d <= b - margin for d, b in zip(degree, box))
    return PolynomialityReport(inside, degree if inside else None, box)

