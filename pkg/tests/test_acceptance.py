"""Numbered acceptance criteria; ``pytest`` prints one PASS/FAIL line per criterion."""
import io
import json
import random
import time

import pytest

from oracles import conductor_literal, d_oracle, di_oracle, members, random_minimal
from valsem.cli import run
from valsem.dualgraph import classify, h_set
from valsem.poincare import CurveMarking, check_tower_numerator, check_curve_numerator, limit_profile, poincare_acampo
from valsem.resolution import build_model, centers_from_json, restrict
from valsem.semigroup import SemigroupHandle, maximal_contact
from valsem.series import expand, recover_dims

EXAMPLE_ROWS = [(1, 4, 4), (2, 6, 6), (3, 6, 6), (3, 12, 12), (3, 13, 13), (6, 26, 26), (6, 27, 26)]
EXAMPLE_FACTORS = sorted([((3, 12, 12), 1), ((6, 26, 26), 1),
                        ((1, 4, 4), -1), ((3, 6, 6), -1), ((3, 13, 13), -1), ((6, 27, 26), -1)])
SEMI_CELLS = 2 * 10 ** 7


def random_models(seed, count, **kw):
    rng = random.Random(seed)
    return [random_minimal(rng, **kw) for _ in range(count)]


@pytest.mark.acceptance(1, "worked example: value triples, dead ends, rational Poincare series")
def test_worked_example_end_to_end(example_model, example_marked):
    from conftest import example_doc
    t0 = time.perf_counter()
    model = build_model(centers_from_json(example_doc()["centers"]))
    assert [model.projected_row(v, example_marked) for v in model.vertices] == EXAMPLE_ROWS
    assert classify(model).dead_ends == {1, 3, 5, 7}
    buf = io.StringIO()
    assert run(["poincare", "examples/paper_example.json", "--rational"], out=buf) == 0
    factors = sorted((tuple(f["v"]), f["e"]) for f in json.loads(buf.getvalue())["results"]["factors"])
    assert factors == EXAMPLE_FACTORS
    assert time.perf_counter() - t0 < 1.0


@pytest.mark.acceptance(2, "P_V * prod(1 - t^B) == P_C on box (12,54,52)")
def test_curve_numerator_identity(example_model, example_marked):
    t0 = time.perf_counter()
    rep = check_curve_numerator(CurveMarking(example_model, example_marked), (12, 54, 52))
    assert rep.ok, rep.first_discrepancy
    assert time.perf_counter() - t0 < 10.0


@pytest.mark.acceptance(3, "brute-force indecomposables equal the H-set values on 25 random models")
def test_indecomposables_oracle_equivalence():
    models = random_models(3, 25, smax=9, arities=(2, 3), max_cells=SEMI_CELLS)
    for model, marked in models:
        h = SemigroupHandle(model, marked)
        box = [2 * sum(B[c] for B in h.markedB) for c in range(h.r)]
        want = {h.projB[v - 1] for v in h_set(model, marked).H}
        assert h.indecomposables_bruteforce(box) == want, (model.centers, marked)


def _brute_max(S, m, B):
    k = 0
    while tuple(x - (k + 1) * b for x, b in zip(m, B)) in S:
        k += 1
    return k


@pytest.mark.acceptance(4, "unique decomposition on 50 random members per model")
def test_unique_decomposition(example_model, example_marked):
    cases = [(example_model, example_marked)] + random_models(4, 8, smax=8, arities=(2, 3))
    rng = random.Random(44)
    for model, marked in cases:
        h = SemigroupHandle(model, marked)
        box = [3 * max(B[c] for B in h.markedB) for c in range(h.r)]
        S = members(h.projB, box)
        for m in rng.sample(sorted(S), min(50, len(S))):
            dec = h.decompose(m)
            assert tuple(n + sum(a * B[c] for a, B in zip(dec.a, h.markedB)) for c, n in enumerate(dec.n)) == m
            assert dec.n in S
            for i, B in enumerate(h.markedB):
                assert tuple(x - b for x, b in zip(dec.n, B)) not in S
                assert dec.a[i] == _brute_max(S, m, B)


@pytest.mark.acceptance(5, "support of expand(P_V) on box 20 lies in the semigroup")
def test_series_support(example_model, example_marked):
    cases = [(example_model, example_marked)] + random_models(5, 5, smax=8)
    for model, marked in cases:
        box = (20,) * len(marked)
        pv = expand(poincare_acampo(model, marked), box)
        S = members([model.projected_row(v, marked) for v in model.vertices], box)
        assert pv.nnz() > 0
        for m, _ in pv.items():
            assert m in S


@pytest.mark.acceptance(6, "tower numerators agree for k = 0..3")
def test_tower_numerator(example_model, example_marked):
    assert check_tower_numerator(CurveMarking(example_model, example_marked), 3, (12, 40, 40)).ok
    for model, marked in random_models(6, 5, smax=8):
        box = (12, 40, 40)[: len(marked)]
        rep = check_tower_numerator(CurveMarking(model, marked), 3, box)
        assert rep.ok, rep.first_discrepancy


@pytest.mark.acceptance(7, "P_V(k) approaches P_C on box (6,13,13), non-increasing disagreement")
def test_limit(example_model, example_marked, capsys):
    prof = limit_profile(CurveMarking(example_model, example_marked), (6, 13, 13), 6)
    with capsys.disabled():
        print(f"\n  disagreement counts {prof.counts}; k0 = {prof.k0}")
    assert prof.monotone
    assert prof.k0 is not None and prof.k0 <= 6


@pytest.mark.acceptance(8, "d(B^i) = 2 from the recovered dimension table")
def test_d_at_B(example_model, example_marked):
    table = recover_dims(poincare_acampo(example_model, example_marked), (7, 28, 28))
    M = [list(r) for r in example_model.M]
    for a in example_marked:
        B = example_model.projected_row(a, example_marked)
        assert table(B) == 2
        assert d_oracle(M, example_marked, B) == 2


@pytest.mark.acceptance(9, "maximal contact values (4,6,13), 27 = 2*13 + 1, conductor")
def test_maximal_contact(example_model):
    sub, relabel = restrict(example_model, [7])
    data = maximal_contact(sub, relabel[7])
    assert data.beta_bar[:3] == (4, 6, 13)
    assert data.beta_bar[3] == 27
    assert data.e[1] == 2 and 27 == data.e[1] * 13 + 1
    assert data.conductor == conductor_literal([4, 6, 13])
    h = SemigroupHandle(sub, [relabel[7]])
    reach = h.reachable((80,))
    S = members([(4,), (6,), (13,), (27,)], (80,))
    assert {(int(i),) for i in reach.nonzero()[0]} == S
    assert all((x,) in S for x in range(data.conductor, 81))
    assert (data.conductor - 1,) not in S


@pytest.mark.acceptance(10, "d_i lemmas on every member of the test box")
def test_lemmas(example_model, example_marked):
    cases = [(example_model, example_marked, (6, 27, 27))]
    cases += [(m, L, tuple(2 * max(B) for B in zip(*[m.projected_row(a, L) for a in L])))
              for m, L in random_models(10, 5, smax=7, arities=(2, 3))]
    for model, marked, box in cases:
        h = SemigroupHandle(model, marked)
        M = [list(r) for r in model.M]
        big = [b + 2 * max(B[c] for B in h.markedB) for c, b in enumerate(box)]
        h.reachable(big)
        pts = sorted(members(h.projB, box))
        for m in pts:
            for i, Bi in enumerate(h.markedB):
                di = h.dim_di(m, i)
                assert (di >= 2) == h.contains(tuple(x - b for x, b in zip(m, Bi)))
                for j, Bj in enumerate(h.markedB):
                    up = tuple(x + b for x, b in zip(m, Bj))
                    assert h.dim_di(up, i) == di + (i == j)
        # the combinatorial d_i agrees with the colength of valuation ideals
        for m in pts[:: max(1, len(pts) // 25)]:
            for i in range(len(marked)):
                assert h.dim_di(m, i) == di_oracle(M, marked, m, i)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
