"""Dual graph of a resolution: dead ends, star vertices, tree paths, and the
index set of indecomposable curvette values."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Sequence

from .errors import NotMinimalWarning
from .resolution import ResolutionModel, validate_minimality


@dataclass(frozen=True)
class DualGraph:
    s: int
    adjacency: Mapping[int, tuple[int, ...]]

    @property
    def vertices(self) -> range:
        return range(1, self.s + 1)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @cached_property
    def dead_ends(self) -> frozenset:
        # a lone vertex counts as a dead end so that vertex 1 is always one
        return frozenset(v for v in self.vertices if self.degree(v) <= 1)

    @cached_property
    def stars(self) -> frozenset:
        return frozenset(v for v in self.vertices if self.degree(v) >= 3)

    @cached_property
    def _parent(self) -> dict[int, int | None]:
        parent: dict[int, int | None] = {1: None}
        stack = [1]
        while stack:
            u = stack.pop()
            for w in self.adjacency[u]:
                if w not in parent:
                    parent[w] = u
                    stack.append(w)
        return parent

    def root_path(self, v: int) -> list[int]:
        """Path from vertex 1 to ``v``."""
        out = [v]
        while (p := self._parent[out[-1]]) is not None:
            out.append(p)
        return out[::-1]

    def components_without(self, alpha: int) -> list[frozenset]:
        """Connected components of the graph with ``alpha`` removed, ordered by least vertex."""
        seen = {alpha}
        comps = []
        for start in self.vertices:
            if start in seen:
                continue
            comp, stack = {start}, [start]
            seen.add(start)
            while stack:
                for w in self.adjacency[stack.pop()]:
                    if w not in seen:
                        seen.add(w)
                        comp.add(w)
                        stack.append(w)
            comps.append(frozenset(comp))
        return comps


def classify(model: ResolutionModel) -> DualGraph:
    adj: dict[int, list[int]] = {v: [] for v in model.vertices}
    for e in model.edges:
        u, v = sorted(e)
        adj[u].append(v)
        adj[v].append(u)
    return DualGraph(model.s, {v: tuple(sorted(ns)) for v, ns in adj.items()})


def path(graph: DualGraph, u: int, v: int) -> list[int]:
    """Unique simple path from ``u`` to ``v``, endpoints included."""
    pu, pv = graph.root_path(u), graph.root_path(v)
    k = 0
    while k < min(len(pu), len(pv)) and pu[k] == pv[k]:
        k += 1
    # pu[k-1] is the lowest common ancestor
    return pu[k - 1:][::-1] + pv[k:]


@dataclass(frozen=True)
class HSet:
    omega: frozenset
    gamma: frozenset
    beta_of: Mapping[int, int]
    H: frozenset
    dead_ends: frozenset


def h_set(model: ResolutionModel, marked: Sequence[int],
          dead_ends: frozenset | None = None) -> HSet:
    """Vertices whose curvette values are the indecomposables of the value semigroup.

    ``H = {1} | E | (Omega - (Gamma | {beta_rho}))`` where ``Omega`` is the
    union and ``Gamma`` the intersection of the paths ``[1, alpha(i)]``, and
    ``beta_rho`` is the vertex of ``Omega`` on ``[1, rho]`` farthest from 1.

    Pass ``dead_ends`` to override ``E`` (the arrowed graph of a curve has
    fewer dead ends than the bare graph).
    """
    report = validate_minimality(model, marked)
    if not report.ok:
        warnings.warn(
            f"model is not the minimal resolution of {list(marked)}: "
            f"unmarked leaves {list(report.offending)}",
            NotMinimalWarning,
            stacklevel=2,
        )
    graph = classify(model)
    ends = graph.dead_ends if dead_ends is None else frozenset(dead_ends)
    paths = [set(graph.root_path(a)) for a in marked]
    omega = frozenset(set().union(*paths))
    gamma = frozenset(set.intersection(*paths))
    beta_of = {}
    for rho in sorted(ends):
        on_omega = [v for v in graph.root_path(rho) if v in omega]
        beta_of[rho] = on_omega[-1]
    H = frozenset({1} | ends | (omega - (gamma | set(beta_of.values()))))
    return HSet(omega, gamma, beta_of, H, ends)


def to_dot(graph: DualGraph, marked: Sequence[int] = (),
           arrows: Mapping[int, int] | None = None, name: str = "dual") -> str:
    """Graphviz source; marked vertices are double circles, dead ends are boxes."""
    marked = set(marked)
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for v in graph.vertices:
        attrs = []
        if v in graph.dead_ends:
            attrs.append('xlabel="dead end"')
        if v in marked:
            attrs.append("shape=doublecircle")
        elif v in graph.dead_ends:
            attrs.append("shape=box")
        if v in graph.stars:
            attrs.append("style=bold")
        lines.append(f"  {v}" + (f" [{', '.join(attrs)}];" if attrs else ";"))
    for u in graph.vertices:
        for w in graph.adjacency[u]:
            if u < w:
                lines.append(f"  {u} -- {w};")
    for v, count in sorted((arrows or {}).items()):
        for k in range(count):
            tip = f"arrow_{v}_{k + 1}"
            lines.append(f'  {tip} [shape=point, label=""];')
            lines.append(f"  {v} -- {tip} [dir=forward, arrowhead=normal];")
    lines.append("}")
    return "\n".join(lines) + "\n"
