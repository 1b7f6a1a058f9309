"""Hybrid hypergraph over a via layout.

Two edge families are derived from geometry:

* conflict edges between every via pair closer than min_pitch_same_mask
  (origin "native"); the cover pass may later add more ("added_by_cover")
* grouping hyper-edges: every contiguous subsequence, of length 2..max_g,
  of every maximal collinear run whose consecutive gaps lie inside
  [min_group_pitch, max_dsa_pitch]

forced_groups holds grouping hyper-edges promoted to hard constraints by
the cover pass. Connected components are taken over the union of all
three edge families. Both families are computed independently from
geometry; neither implies the other.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property
from collections.abc import Iterable

from .geometry import close_pairs
from .layout import Layout, validate_layout
from .tech import TechParams

NATIVE = "native"
ADDED_BY_COVER = "added_by_cover"

# via ids ordered by coordinate along the run axis
GroupEdge = tuple[int, ...]


class GraphError(ValueError):
    """Raised for graph construction or update problems."""


class UnionFind:
    """Union-find with path halving, used for connected components."""

    __slots__ = ("parent",)

    def __init__(self, size: int) -> None:
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class LayoutGraph:
    layout: Layout
    tech: TechParams
    conflict_edges: dict[tuple[int, int], str]  # (a, b) with a < b -> origin
    group_edges: frozenset[GroupEdge]
    forced_groups: frozenset[GroupEdge]
    components: tuple[tuple[int, ...], ...]

    def has_conflict(self, a: int, b: int) -> bool:
        return ((a, b) if a < b else (b, a)) in self.conflict_edges

    @cached_property
    def groups_by_via(self) -> dict[int, tuple[GroupEdge, ...]]:
        by: dict[int, list[GroupEdge]] = {}
        for g in sorted(self.group_edges):
            for v in g:
                by.setdefault(v, []).append(g)
        return {v: tuple(gs) for v, gs in by.items()}

    @cached_property
    def component_of(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for ci, comp in enumerate(self.components):
            for v in comp:
                out[v] = ci
        return out

    @cached_property
    def conflict_adjacency(self) -> dict[int, tuple[int, ...]]:
        adj: dict[int, list[int]] = {v.id: [] for v in self.layout.vias}
        for a, b in self.conflict_edges:
            adj[a].append(b)
            adj[b].append(a)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def forced_by_via(self) -> dict[int, GroupEdge]:
        out: dict[int, GroupEdge] = {}
        for f in self.forced_groups:
            for v in f:
                out[v] = f
        return out

    def to_json_dict(self) -> dict:
        return {
            "n_vias": len(self.layout),
            "vias": [{"id": v.id, "x": v.x, "y": v.y} for v in self.layout.vias],
            "conflict_edges": [[a, b, origin]
                               for (a, b), origin in sorted(self.conflict_edges.items())],
            "group_edges": [list(g) for g in sorted(self.group_edges)],
            "forced_groups": [list(g) for g in sorted(self.forced_groups)],
            "components": [list(c) for c in self.components],
        }


def _components_from_edges(n: int, conflict_pairs: Iterable[tuple[int, int]],
                           group_edges: Iterable[GroupEdge],
                           forced_groups: Iterable[GroupEdge]) -> tuple[tuple[int, ...], ...]:
    uf = UnionFind(n)
    for a, b in conflict_pairs:
        uf.union(a, b)
    for edge_set in (group_edges, forced_groups):
        for g in edge_set:
            for u, v in zip(g, g[1:]):
                uf.union(u, v)
    members: dict[int, list[int]] = {}
    for v in range(n):
        members.setdefault(uf.find(v), []).append(v)
    comps = sorted((tuple(sorted(vs)) for vs in members.values()), key=lambda c: c[0])
    return tuple(comps)


def _collinear_run_edges(layout: Layout, tech: TechParams) -> set[GroupEdge]:
    lo, hi = tech.min_group_pitch, tech.max_dsa_pitch
    edges: set[GroupEdge] = set()

    def emit(run: list[int]) -> None:
        n = len(run)
        for size in range(2, min(tech.max_g, n) + 1):
            for i in range(n - size + 1):
                edges.add(tuple(run[i:i + size]))

    def scan(lines: dict[int, list[tuple[int, int]]]) -> None:
        # lines: fixed coordinate -> [(moving coordinate, via id)]
        for key in sorted(lines):
            items = sorted(lines[key])
            run = [items[0][1]]
            for (c0, _), (c1, vid) in zip(items, items[1:]):
                gap = c1 - c0
                if lo <= gap <= hi:
                    run.append(vid)
                else:
                    emit(run)
                    run = [vid]
            emit(run)

    cols: dict[int, list[tuple[int, int]]] = {}
    rows: dict[int, list[tuple[int, int]]] = {}
    for v in layout.vias:
        cols.setdefault(v.x, []).append((v.y, v.id))
        rows.setdefault(v.y, []).append((v.x, v.id))
    scan(cols)
    scan(rows)
    return edges


def build_graph(layout: Layout, tech: TechParams) -> LayoutGraph:
    """Build the hybrid hypergraph for a validated layout."""
    violations = validate_layout(layout, tech)
    if violations:
        raise GraphError(
            f"layout fails spacing validation ({len(violations)} pair(s) below "
            f"{tech.min_pitch_diff_mask} nm; first: {violations[0]})")
    conflicts: dict[tuple[int, int], str] = {}
    for a, b, _ in close_pairs(layout.id_points(), tech.min_pitch_same_mask):
        conflicts[(a, b)] = NATIVE
    group_edges = frozenset(_collinear_run_edges(layout, tech))
    components = _components_from_edges(len(layout), conflicts, group_edges, ())
    return LayoutGraph(layout=layout, tech=tech, conflict_edges=conflicts,
                       group_edges=group_edges, forced_groups=frozenset(),
                       components=components)


def is_groupable(via_ids: Iterable[int], graph: LayoutGraph) -> bool:
    """True iff some grouping hyper-edge contains every given via."""
    ids = set(via_ids)
    if not ids:
        return False
    n = len(graph.layout)
    for v in ids:
        if not 0 <= v < n:
            raise GraphError(f"unknown via id {v}")
    anchor = next(iter(ids))
    for g in graph.groups_by_via.get(anchor, ()):
        if ids.issubset(g):
            return True
    return False


def connected_components(graph: LayoutGraph) -> tuple[tuple[int, ...], ...]:
    """Recompute components over conflict + group + forced edges."""
    return _components_from_edges(len(graph.layout), graph.conflict_edges,
                                  graph.group_edges, graph.forced_groups)


def with_recomputed_components(graph: LayoutGraph) -> LayoutGraph:
    return replace(graph, components=connected_components(graph))
