"""Named identity checks over one model and marking, used by ``valsem verify``."""
from __future__ import annotations

import math
import random
import warnings
from typing import Sequence

from .dualgraph import h_set
from .errors import BoxTooLarge, NotMinimalWarning
from .poincare import (CheckReport, CurveMarking, check_tower_numerator, check_curve_numerator, exponent_excess,
                       limit_profile, poincare_acampo)
from .resolution import ResolutionModel, validate_minimality
from .semigroup import SemigroupHandle, cell_cap
from .series import SparseSeries, expand, first_discrepancy, recover_dims


def check_exponents(model: ResolutionModel) -> CheckReport:
    excess = exponent_excess(model)
    return CheckReport("exponent_accounting", excess == -2, None, {"sum": excess})


def check_indecomposables(handle: SemigroupHandle) -> CheckReport:
    box = [2 * sum(B[c] for B in handle.markedB) for c in range(handle.r)]
    if handle.r == 1:
        return CheckReport("indecomposables", True, None, {"skipped": "needs at least two valuations"})
    if math.prod(b + 1 for b in box) > cell_cap():
        return CheckReport("indecomposables", True, None, {"skipped": f"box {box} above cell cap"})
    got = handle.indecomposables_bruteforce(box)
    want = set(handle.h_values().values())
    detail = {"box": box, "count": len(got)}
    if got != want:
        detail["missing"] = sorted(map(list, want - got))
        detail["extra"] = sorted(map(list, got - want))
    return CheckReport("indecomposables", got == want, None, detail)


def _members(handle: SemigroupHandle, box: Sequence[int], count: int, seed: int = 0):
    return handle.sample(random.Random(seed), count, box)


def check_unique_decomposition(handle: SemigroupHandle, box: Sequence[int], count: int = 50) -> CheckReport:
    for m in _members(handle, box, count):
        dec = handle.decompose(m)
        total = tuple(n + sum(a * B[c] for a, B in zip(dec.a, handle.markedB)) for c, n in enumerate(dec.n))
        if total != m:
            return CheckReport("unique_decomposition", False, None, {"m": list(m), "decomposition": dec.to_json()})
    return CheckReport("unique_decomposition", True, None, {"samples": count})


def check_lemmas(handle: SemigroupHandle, box: Sequence[int], count: int = 30) -> CheckReport:
    """``d_i(m) >= 2`` iff ``m - B^i`` is a member; ``d_i(m + B^j) = d_i(m) + [i == j]``."""
    handle.reachable([b + max(B[c] for B in handle.markedB) for c, b in enumerate(box)])
    for m in _members(handle, box, count, seed=1):
        for i, Bi in enumerate(handle.markedB):
            di = handle.dim_di(m, i)
            below = tuple(x - b for x, b in zip(m, Bi))
            if (di >= 2) != handle.contains(below):
                return CheckReport("di_lemmas", False, None, {"m": list(m), "i": i, "lemma": "threshold"})
            for j, Bj in enumerate(handle.markedB):
                up = tuple(x + b for x, b in zip(m, Bj))
                if handle.dim_di(up, i) != di + (i == j):
                    return CheckReport("di_lemmas", False, None,
                                       {"m": list(m), "i": i, "j": j, "lemma": "shift"})
    return CheckReport("di_lemmas", True, None, {"samples": count})


def check_support(handle: SemigroupHandle, pv: SparseSeries) -> CheckReport:
    for m, _ in pv.items():
        if not handle.contains(m):
            return CheckReport("series_support", False, (m, pv[m], 0), {})
    return CheckReport("series_support", True, None, {"terms": pv.nnz()})


def check_dims(model: ResolutionModel, marked: Sequence[int], box: Sequence[int]) -> list[CheckReport]:
    """``d(B^i) = 2`` and the round trip ``L~ * prod(t_i - 1) = P'`` away from the axes."""
    pv = poincare_acampo(model, marked)
    table = recover_dims(pv, box)
    bvals = [model.projected_row(a, marked) for a in marked]
    inside = [B for B in bvals if all(x <= b for x, b in zip(B, box))]
    dB = [table(B) for B in inside]
    reports = [CheckReport("d_at_B", all(d == 2 for d in dB), None, {"d": dB})]

    lhs = table.series
    for i in range(len(box)):
        e = [0] * len(box)
        e[i] = 1
        lhs = -lhs.times_one_minus(e)
    rhs = expand(pv, box)
    rhs = rhs.times_monomial([1] * len(box)) - rhs
    for s in (lhs, rhs):
        for m, _ in list(s.items()):
            if min(m) == 0:
                s.arr[m] = 0
    reports.append(CheckReport("dims_roundtrip", lhs == rhs, first_discrepancy(lhs, rhs), {}))
    return reports


def run_suite(model: ResolutionModel, marked: Sequence[int], box: Sequence[int], kmax: int = 3) -> list[CheckReport]:
    marked = tuple(marked)
    box = tuple(box)
    reports = [CheckReport("minimality", validate_minimality(model, marked).ok, None, {}),
               check_exponents(model)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NotMinimalWarning)
        handle = SemigroupHandle(model, marked)
        try:
            reports.append(check_indecomposables(handle))
        except BoxTooLarge as exc:
            reports.append(CheckReport("indecomposables", True, None, {"skipped": str(exc)}))
        reports.append(check_unique_decomposition(handle, box))
        reports.append(check_lemmas(handle, box))
        reports.append(check_support(handle, expand(poincare_acampo(model, marked), box)))
        reports.extend(check_dims(model, marked, box))
        marking = CurveMarking(model, marked)
        reports.append(check_curve_numerator(marking, box))
        reports.append(check_tower_numerator(marking, kmax, box))
        profile = limit_profile(marking, box, kmax)
        reports.append(CheckReport("limit_monotone", profile.monotone, None,
                                   {"counts": {str(k): v for k, v in profile.counts.items()}, "k0": profile.k0}))
    return reports


def hset_summary(model: ResolutionModel, marked: Sequence[int]) -> dict:
    hs = h_set(model, marked)
    return {"H": sorted(hs.H), "omega": sorted(hs.omega), "gamma": sorted(hs.gamma),
            "beta": {str(k): v for k, v in sorted(hs.beta_of.items())}}
