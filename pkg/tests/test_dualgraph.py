import random
import warnings

import pytest

from oracles import random_minimal
from valsem.dualgraph import classify, h_set, path, to_dot
from valsem.errors import NotMinimalWarning
from valsem.resolution import Center, build_model


def test_example_classification(example_model):
    g = classify(example_model)
    assert g.dead_ends == {1, 3, 5, 7}
    assert g.stars == {4, 6}


def test_paths(example_model):
    g = classify(example_model)
    assert path(g, 1, 3) == [1, 4, 2, 3]
    assert path(g, 1, 7) == [1, 4, 6, 7]
    assert path(g, 3, 5) == [3, 2, 4, 6, 5]
    assert path(g, 6, 6) == [6]


def test_example_h_set(example_model, example_marked):
    hs = h_set(example_model, example_marked)
    assert hs.H == {1, 2, 3, 5, 7}
    assert hs.gamma == {1, 4}
    assert hs.omega == {1, 2, 3, 4, 6, 7}


def test_lone_vertex_is_dead_end():
    g = classify(build_model([Center.origin()]))
    assert g.dead_ends == {1} and not g.stars


def test_non_minimal_warns(example_model):
    with pytest.warns(NotMinimalWarning):
        h_set(example_model, [7])


@pytest.mark.parametrize("seed", range(15))
def test_paths_are_simple_and_adjacent(seed):
    model, _ = random_minimal(random.Random(seed))
    g = classify(model)
    for u in g.vertices:
        for v in g.vertices:
            p = path(g, u, v)
            assert p[0] == u and p[-1] == v and len(set(p)) == len(p)
            assert all(b in g.adjacency[a] for a, b in zip(p, p[1:]))
            assert path(g, v, u) == p[::-1]


@pytest.mark.parametrize("seed", range(15))
def test_h_set_contains_dead_ends(seed):
    model, marked = random_minimal(random.Random(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        hs = h_set(model, marked)
    assert classify(model).dead_ends | {1} <= hs.H


def test_dot_output(example_model, example_marked):
    dot = to_dot(classify(example_model), example_marked, {3: 1})
    assert dot.startswith("graph dual {") and dot.rstrip().endswith("}")
    assert "7 [" in dot and "doublecircle" in dot and "1 -- 4;" in dot and "arrow_3_1" in dot
