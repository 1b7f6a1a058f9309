"""Simultaneous DSA grouping and mask assignment per connected component.

Every component is solved independently: exactly, by depth-first branch
and bound over (partition into legal groups) x (mask per group), when the
component fits mode.exact_limit; otherwise by a deterministic greedy
fallback. Forced groups are hard constraints either way.

The solver objective for a component is

    (# conflict-edge violations: same mask, not co-grouped)
  + (if hotspot_aware: # realized hotspot windows lying fully inside)

Conflict edges of both origins count, so edges added by the cover pass
steer the solver exactly like native ones; the final report instead comes
from the verifier, which recounts conflicts from geometry alone.

Mask labels inside a component are arbitrary, so the merged result
rotates each component's labels by its component index. That spreads
labels across unrelated components instead of leaning on mask 0, without
changing any per-component objective.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from collections.abc import Iterable, Mapping

from .graph import GroupEdge, LayoutGraph
from .hotspots import HotspotLibrary
from .matcher import PotentialHotspot, find_potential_hotspots
from .tech import TechParams


class DecomposeError(ValueError):
    """Raised for infeasible or out-of-contract solve requests."""


@dataclass(frozen=True)
class SolveMode:
    hotspot_aware: bool = False
    exact_limit: int = 14

    def __post_init__(self) -> None:
        if self.exact_limit < 1:
            raise ValueError("exact_limit must be >= 1")


@dataclass(frozen=True)
class Decomposition:
    """A via partition into groups plus a mask per group."""

    groups: tuple[tuple[int, ...], ...]
    mask_of_group: tuple[int, ...]
    exact_components: int = 0
    fallback_components: int = 0

    @cached_property
    def via_to_group(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for gi, group in enumerate(self.groups):
            for v in group:
                out[v] = gi
        return out

    def mask_of_via(self, v: int) -> int:
        return self.mask_of_group[self.via_to_group[v]]

    def group_members(self, v: int) -> tuple[int, ...]:
        return self.groups[self.via_to_group[v]]

    def to_json_dict(self) -> dict:
        return {
            "groups": [{"id": gi, "vias": list(group), "mask": self.mask_of_group[gi]}
                       for gi, group in enumerate(self.groups)],
            "meta": {"exact_components": self.exact_components,
                     "fallback_components": self.fallback_components},
        }


def save_decomposition(decomposition: Decomposition, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(decomposition.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_decomposition(path: str | Path) -> Decomposition:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    entries = sorted(data["groups"], key=lambda g: g["id"])
    meta = data.get("meta", {})
    return Decomposition(
        groups=tuple(tuple(g["vias"]) for g in entries),
        mask_of_group=tuple(g["mask"] for g in entries),
        exact_components=meta.get("exact_components", 0),
        fallback_components=meta.get("fallback_components", 0))


@dataclass(frozen=True)
class _Window:
    """A potential hotspot flattened to via ids for solver scoring."""

    constituents: tuple[int, ...]
    non_constituents: tuple[int, ...]
    segments: tuple[tuple[int, ...], ...]
    nodes: tuple[int, ...]

    @cached_property
    def vias(self) -> frozenset[int]:
        return frozenset(self.constituents) | frozenset(self.non_constituents)


def _flatten_window(ph: PotentialHotspot, library: HotspotLibrary) -> _Window:
    pattern = library.pattern_by_id(ph.pattern_id)
    segments = tuple(tuple(ph.constituents[i] for i in seg) for seg in pattern.segments)
    nodes = tuple(ph.constituents[i] for i in pattern.nodes)
    return _Window(ph.constituents, ph.non_constituents, segments, nodes)


def _component_inputs(comp: tuple[int, ...], graph: LayoutGraph):
    comp_set = set(comp)
    conflict_adj = graph.conflict_adjacency
    adj: dict[int, tuple[int, ...]] = {v: conflict_adj.get(v, ()) for v in comp}
    edges = [(v, u) for v in comp for u in adj[v] if v < u]
    forced_by_via = graph.forced_by_via
    forced_of = {v: forced_by_via[v] for v in comp if v in forced_by_via}
    return comp_set, adj, edges, forced_of


def _evaluate(blocks: list[tuple[int, ...]], masks: list[int],
              edges: list[tuple[int, int]], windows: list[_Window]) -> int:
    block_of: dict[int, int] = {}
    for bi, block in enumerate(blocks):
        for v in block:
            block_of[v] = bi
    cost = 0
    for a, b in edges:
        if block_of[a] != block_of[b] and masks[block_of[a]] == masks[block_of[b]]:
            cost += 1
    for w in windows:
        if _window_realized(w, block_of, blocks, masks):
            cost += 1
    return cost


def _window_realized(w: _Window, block_of: Mapping[int, int],
                     blocks: list[tuple[int, ...]], masks: list[int]) -> bool:
    m = masks[block_of[w.constituents[0]]]
    for v in w.constituents[1:]:
        if masks[block_of[v]] != m:
            return False
    for v in w.non_constituents:
        if masks[block_of[v]] == m:
            return False
    for seg in w.segments:
        bi = block_of[seg[0]]
        if len(blocks[bi]) != len(seg):
            return False
        if any(block_of[v] != bi for v in seg[1:]):
            return False
    for v in w.nodes:
        if len(blocks[block_of[v]]) != 1:
            return False
    return True


def solve_component_heuristic(component: Iterable[int], graph: LayoutGraph,
                              tech: TechParams,
                              mode: SolveMode | None = None) -> tuple[list[tuple[int, ...]], list[int]]:
    """Deterministic greedy: forced groups, then maximal legal groups along
    runs, then smallest-index mask minimizing new conflicts per group."""
    comp = tuple(sorted(component))
    comp_set, adj, _, forced_of = _component_inputs(comp, graph)
    assigned: set[int] = set()
    blocks: list[tuple[int, ...]] = []
    for f in sorted(set(forced_of.values())):
        blocks.append(f)
        assigned.update(f)
    for v in comp:
        if v in assigned:
            continue
        best: GroupEdge | None = None
        for g in graph.groups_by_via.get(v, ()):
            if any(u in assigned for u in g):
                continue
            if best is None or len(g) > len(best):
                best = g
        block = best if best is not None else (v,)
        blocks.append(block)
        assigned.update(block)
    blocks.sort(key=lambda b: min(b))
    block_of = {v: bi for bi, block in enumerate(blocks) for v in block}
    masks: list[int] = [-1] * len(blocks)
    k = tech.num_masks
    for bi, block in enumerate(blocks):
        penalty = [0] * k
        for v in block:
            for u in adj[v]:
                ub = block_of.get(u)
                if ub is not None and ub != bi and masks[ub] >= 0:
                    penalty[masks[ub]] += 1
        masks[bi] = min(range(k), key=lambda m: (penalty[m], m))
    return blocks, masks


def _solve_exact(comp: tuple[int, ...], graph: LayoutGraph, tech: TechParams,
                 windows: list[_Window]) -> tuple[list[tuple[int, ...]], list[int], int]:
    comp_set, adj, edges, forced_of = _component_inputs(comp, graph)
    k = tech.num_masks
    n = len(comp)

    forced_vias = set(forced_of)
    group_opts = {v: tuple(g for g in graph.groups_by_via.get(v, ())
                           if not forced_vias.intersection(g)) for v in comp}
    win_by_via: dict[int, list[int]] = {v: [] for v in comp}
    for wi, w in enumerate(windows):
        for v in sorted(w.vias):
            win_by_via[v].append(wi)
    pending = [len(w.vias) for w in windows]

    # warm start keeps worst-case search shallow on 10+ via components
    heur_blocks, heur_masks = solve_component_heuristic(comp, graph, tech)
    heur_cost = _evaluate(heur_blocks, heur_masks, edges, windows)

    block_of: dict[int, int] = {}
    blocks: list[tuple[int, ...]] = []
    masks: list[int] = []
    best_cost = heur_cost
    best: tuple[list[tuple[int, ...]], list[int]] | None = None

    def place(block: tuple[int, ...], mask: int) -> int:
        delta = 0
        for v in block:
            for u in adj[v]:
                bu = block_of.get(u)
                if bu is not None and masks[bu] == mask:
                    delta += 1
        bi = len(blocks)
        blocks.append(block)
        masks.append(mask)
        for v in block:
            block_of[v] = bi
        for v in block:
            for wi in win_by_via[v]:
                pending[wi] -= 1
                if pending[wi] == 0 and _window_realized(windows[wi], block_of, blocks, masks):
                    delta += 1
        return delta

    def unplace(block: tuple[int, ...]) -> None:
        for v in block:
            for wi in win_by_via[v]:
                pending[wi] += 1
            del block_of[v]
        blocks.pop()
        masks.pop()

    def rec(cost: int, start: int, max_used: int) -> None:
        nonlocal best_cost, best
        i = start
        while i < n and comp[i] in block_of:
            i += 1
        if i == n:
            # strict improvement only: the first optimum in canonical
            # branching order wins among ties
            if cost < best_cost:
                best_cost = cost
                best = ([*blocks], [*masks])
            return
        v = comp[i]
        if v in forced_of:
            choices: tuple[GroupEdge, ...] = (forced_of[v],)
        else:
            usable = tuple(g for g in group_opts[v]
                           if all(u not in block_of for u in g))
            choices = usable + ((v,),)
        mask_cap = min(max_used + 1, k - 1)
        for block in choices:
            for mask in range(mask_cap + 1):
                delta = place(block, mask)
                c2 = cost + delta
                if c2 < best_cost:
                    rec(c2, i + 1, max(max_used, mask))
                unplace(block)

    rec(0, 0, -1)
    if best is None:
        # the heuristic solution already achieves the optimum
        return heur_blocks, heur_masks, heur_cost
    return best[0], best[1], best_cost


def solve_component_exact(component: Iterable[int], graph: LayoutGraph, tech: TechParams,
                          library: HotspotLibrary | None, mode: SolveMode,
                          windows: list[_Window] | None = None,
                          ) -> tuple[list[tuple[int, ...]], list[int], int]:
    """Optimal (partition, coloring) for one component; deterministic.

    Returns (blocks, mask per block, objective value). Hotspot terms count
    only windows whose vias all lie inside the component; windows may be
    passed precomputed, otherwise they are derived from the library.
    """
    comp = tuple(sorted(component))
    if len(comp) > mode.exact_limit:
        raise DecomposeError(
            f"component of {len(comp)} vias exceeds exact_limit {mode.exact_limit}")
    if windows is None:
        windows = []
        if mode.hotspot_aware:
            if library is None:
                raise DecomposeError("hotspot-aware solve needs a hotspot library")
            comp_set = set(comp)
            for ph in find_potential_hotspots(graph.layout, library, graph):
                if ph.all_vias <= comp_set:
                    windows.append(_flatten_window(ph, library))
    return _solve_exact(comp, graph, tech, windows)


def objective_value(decomposition: Decomposition, graph: LayoutGraph,
                    library: HotspotLibrary | None = None,
                    mode: SolveMode = SolveMode(),
                    scope: Iterable[int] | None = None) -> int:
    """Violations of an assignment under the solver's objective semantics.

    Conflicts are counted over the graph's conflict edges (both origins);
    hotspot terms, in aware mode, over realized windows whose vias fall
    inside the scope (default: the whole layout).
    """
    scope_set = set(scope) if scope is not None else {v.id for v in graph.layout.vias}
    cost = 0
    for a, b in graph.conflict_edges:
        if a in scope_set and b in scope_set:
            if (decomposition.via_to_group[a] != decomposition.via_to_group[b]
                    and decomposition.mask_of_via(a) == decomposition.mask_of_via(b)):
                cost += 1
    if mode.hotspot_aware:
        if library is None:
            raise DecomposeError("hotspot-aware objective needs a hotspot library")
        blocks = list(decomposition.groups)
        masks = list(decomposition.mask_of_group)
        block_of = decomposition.via_to_group
        for ph in find_potential_hotspots(graph.layout, library, graph):
            if ph.all_vias <= scope_set:
                w = _flatten_window(ph, library)
                if _window_realized(w, block_of, blocks, masks):
                    cost += 1
    return cost


def decompose(graph: LayoutGraph, tech: TechParams,
              library: HotspotLibrary | None = None,
              mode: SolveMode = SolveMode(), threads: int = 1) -> Decomposition:
    """Solve every component and merge deterministically.

    Components are solved independently (in parallel when threads > 1; the
    merged result is invariant to the thread count), exactly when they fit
    mode.exact_limit and greedily otherwise. Forced groups always appear
    verbatim. Each component's mask labels are rotated by its index.
    """
    windows_by_comp: dict[int, list[_Window]] = {}
    if mode.hotspot_aware:
        if library is None:
            raise DecomposeError("hotspot-aware decomposition needs a hotspot library")
        comp_of = graph.component_of
        for ph in find_potential_hotspots(graph.layout, library, graph, threads=threads):
            comps = {comp_of[v] for v in ph.all_vias}
            if len(comps) == 1:
                windows_by_comp.setdefault(comps.pop(), []).append(_flatten_window(ph, library))

    def solve(item: tuple[int, tuple[int, ...]]):
        ci, comp = item
        if len(comp) <= mode.exact_limit:
            blocks, masks, _ = _solve_exact(comp, graph, tech, windows_by_comp.get(ci, []))
            return blocks, masks, True
        return (*solve_component_heuristic(comp, graph, tech, mode), False)

    items = list(enumerate(graph.components))
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(solve, items))
    else:
        solved = [solve(item) for item in items]

    groups: list[tuple[int, ...]] = []
    group_masks: list[int] = []
    exact_count = 0
    fallback_count = 0
    k = tech.num_masks
    for (ci, _), (blocks, masks, was_exact) in zip(items, solved):
        if was_exact:
            exact_count += 1
        else:
            fallback_count += 1
        order = sorted(range(len(blocks)), key=lambda bi: min(blocks[bi]))
        for bi in order:
            groups.append(blocks[bi])
            group_masks.append((masks[bi] + ci) % k)
    return Decomposition(groups=tuple(groups), mask_of_group=tuple(group_masks),
                         exact_components=exact_count, fallback_components=fallback_count)
