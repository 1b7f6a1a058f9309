"""Independent brute-force oracles for property and acceptance tests.

These reimplement every checked operation from its bare definition:
quadratic scans, exhaustive subset/translation/partition enumeration, and
naive rescanning greedy. They share only core data types with the
production code, never its algorithms, and are far too slow for anything
but test-sized inputs.
"""

from __future__ import annotations

import math
from itertools import combinations, product

from dsamp.hotspots import HotspotLibrary
from dsamp.layout import Layout
from dsamp.tech import TechParams

# ---------------------------------------------------------------------------
# geometry


def brute_close_pairs(layout: Layout, limit: int) -> set[tuple[int, int]]:
    """All pairs strictly closer than limit, by full quadratic scan."""
    out = set()
    vias = layout.vias
    for i in range(len(vias)):
        for j in range(i + 1, len(vias)):
            a, b = vias[i], vias[j]
            if (a.x - b.x) ** 2 + (a.y - b.y) ** 2 < limit * limit:
                out.add((min(a.id, b.id), max(a.id, b.id)))
    return out


def _is_legal_group(coords: list[tuple[int, int]], all_coords: set[tuple[int, int]],
                    tech: TechParams) -> bool:
    """Definitional group legality: collinear, consecutive gaps in bounds,
    size bounds, and no other via strictly between members on the line."""
    if not 2 <= len(coords) <= tech.max_g:
        return False
    xs = {c[0] for c in coords}
    ys = {c[1] for c in coords}
    if len(xs) == 1:
        fixed, axis = coords[0][0], 1
    elif len(ys) == 1:
        fixed, axis = coords[0][1], 0
    else:
        return False
    line = sorted(c[axis] for c in coords)
    for c0, c1 in zip(line, line[1:]):
        gap = c1 - c0
        if not tech.min_group_pitch <= gap <= tech.max_dsa_pitch:
            return False
    for other in all_coords:
        if other in coords:
            continue
        if axis == 1 and other[0] == fixed and line[0] < other[1] < line[-1]:
            return False
        if axis == 0 and other[1] == fixed and line[0] < other[0] < line[-1]:
            return False
    return True


def brute_group_edges(layout: Layout, tech: TechParams) -> set[tuple[int, ...]]:
    """All legal group edges by enumerating every via subset of size <= max_g.

    Member ids are ordered by coordinate along the run axis, matching the
    production representation.
    """
    all_coords = {(v.x, v.y) for v in layout.vias}
    out = set()
    vias = list(layout.vias)
    for size in range(2, tech.max_g + 1):
        for combo in combinations(vias, size):
            coords = [(v.x, v.y) for v in combo]
            if _is_legal_group(coords, all_coords, tech):
                axis = 1 if len({c[0] for c in coords}) == 1 else 0
                ordered = sorted(combo, key=lambda v: (v.x, v.y)[axis])
                out.add(tuple(v.id for v in ordered))
    return out


def bfs_components(n: int, pair_edges, hyper_edges=()) -> list[tuple[int, ...]]:
    """Connected components by BFS over an explicit adjacency list."""
    adj: dict[int, set[int]] = {v: set() for v in range(n)}
    for a, b in pair_edges:
        adj[a].add(b)
        adj[b].add(a)
    for edge in hyper_edges:
        for a, b in zip(edge, edge[1:]):
            adj[a].add(b)
            adj[b].add(a)
    seen: set[int] = set()
    comps = []
    for start in range(n):
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        comp = []
        while queue:
            v = queue.pop()
            comp.append(v)
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    queue.append(u)
        comps.append(tuple(sorted(comp)))
    return sorted(comps, key=lambda c: c[0])


# ---------------------------------------------------------------------------
# pattern matching

MatchKey = tuple[str, tuple[int, int], tuple[int, ...], tuple[int, ...]]


def oracle_match(layout: Layout, library: HotspotLibrary, pitch_x: int, pitch_y: int,
                 prune_unrealizable: bool = False) -> set[MatchKey]:
    """Exhaustive translation scan over the full grid lattice.

    Enumerates every window origin on the (pitch_x, pitch_y) lattice that
    could intersect the layout and applies the definitional predicate:
    every pattern offset must land exactly on a via; everything else in
    the closed window is a non-constituent. With prune_unrealizable, drops
    matches whose segments are not legal groups by the geometric oracle.
    """
    coord = {(v.x, v.y): v.id for v in layout.vias}
    all_coords = set(coord)
    if not layout.vias:
        return set()
    x0, y0, x1, y1 = layout.bbox
    out: set[MatchKey] = set()
    for pattern in library.patterns:
        ox_lo = math.ceil((x0 - pattern.window_w) / pitch_x) * pitch_x
        oy_lo = math.ceil((y0 - pattern.window_h) / pitch_y) * pitch_y
        for ox in range(ox_lo, x1 + 1, pitch_x):
            for oy in range(oy_lo, y1 + 1, pitch_y):
                ids = []
                for dx, dy in pattern.offsets:
                    vid = coord.get((ox + dx, oy + dy))
                    if vid is None:
                        break
                    ids.append(vid)
                else:
                    if prune_unrealizable:
                        bad = False
                        for seg in pattern.segments:
                            segc = [(layout.vias[ids[i]].x, layout.vias[ids[i]].y)
                                    for i in seg]
                            if not _is_legal_group(segc, all_coords, library.tech):
                                bad = True
                                break
                        if bad:
                            continue
                    cset = set(ids)
                    non = tuple(sorted(
                        v.id for v in layout.vias
                        if v.id not in cset
                        and ox <= v.x <= ox + pattern.window_w
                        and oy <= v.y <= oy + pattern.window_h))
                    out.add((pattern.id, (ox, oy), tuple(ids), non))
    return out


# ---------------------------------------------------------------------------
# set cover


def oracle_setcover(universe, sets: list[set]) -> list[int]:
    """Naive greedy by full rescan; ties go to the smallest set index."""
    uncovered = set(universe)
    remaining = set(range(len(sets)))
    chosen = []
    while True:
        best_i = None
        best_gain = 0
        for i in sorted(remaining):
            gain = len(sets[i] & uncovered)
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_i is None:
            break
        chosen.append(best_i)
        remaining.discard(best_i)
        uncovered -= sets[best_i]
    return chosen


_KIND_RANK = {"conflict": 0, "affinity": 1}


def oracle_greedy_eliminators(universe, candidates) -> list[tuple[str, tuple[int, ...]]]:
    """Naive rescanning greedy over (kind, vias, covers) triples, with the
    same pick-time invalidation rules as the production cover:

    * a picked conflict (a, b) invalidates affinities containing both
    * a picked affinity g invalidates conflicts inside g and every
      affinity sharing a via with g
    """
    cands = sorted(((kind, tuple(vias), frozenset(covers))
                    for kind, vias, covers in candidates),
                   key=lambda c: (_KIND_RANK[c[0]], c[1]))
    live = [True] * len(cands)
    uncovered = set(universe)
    seq = []
    while True:
        best_i = None
        best_gain = 0
        for i, (kind, vias, covers) in enumerate(cands):
            if not live[i]:
                continue
            gain = len(covers & uncovered)
            if gain > best_gain:
                best_i, best_gain = i, gain
        if best_i is None:
            break
        kind, vias, covers = cands[best_i]
        seq.append((kind, vias))
        live[best_i] = False
        uncovered -= covers
        if kind == "conflict":
            a, b = vias
            for j, (k2, v2, _) in enumerate(cands):
                if live[j] and k2 == "affinity" and a in v2 and b in v2:
                    live[j] = False
        else:
            members = set(vias)
            for j, (k2, v2, _) in enumerate(cands):
                if not live[j]:
                    continue
                if k2 == "conflict" and set(v2) <= members:
                    live[j] = False
                elif k2 == "affinity" and members & set(v2):
                    live[j] = False
    return seq


# ---------------------------------------------------------------------------
# decomposition

OracleWindow = tuple[tuple[int, ...], tuple[int, ...],
                     tuple[tuple[int, ...], ...], tuple[int, ...]]
# (constituents, non_constituents, segments as via tuples, node vias)


def _oracle_realized(window: OracleWindow, mask_of: dict[int, int],
                     group_of: dict[int, frozenset[int]]) -> bool:
    constituents, non_constituents, segments, nodes = window
    mask = mask_of[constituents[0]]
    if any(mask_of[v] != mask for v in constituents[1:]):
        return False
    if any(mask_of[v] == mask for v in non_constituents):
        return False
    for seg in segments:
        if group_of[seg[0]] != frozenset(seg):
            return False
    for v in nodes:
        if group_of[v] != frozenset((v,)):
            return False
    return True


def oracle_objective(blocks: list[tuple[int, ...]], masks: list[int],
                     conflict_edges, windows: list[OracleWindow]) -> int:
    mask_of: dict[int, int] = {}
    group_of: dict[int, frozenset[int]] = {}
    for block, mask in zip(blocks, masks):
        fs = frozenset(block)
        for v in block:
            mask_of[v] = mask
            group_of[v] = fs
    cost = 0
    for a, b in conflict_edges:
        if a in mask_of and b in mask_of:
            if group_of[a] != group_of[b] and mask_of[a] == mask_of[b]:
                cost += 1
    for w in windows:
        if _oracle_realized(w, mask_of, group_of):
            cost += 1
    return cost


def _oracle_partitions(unassigned: frozenset[int], allowed: dict[int, list[tuple[int, ...]]],
                       forced_of: dict[int, tuple[int, ...]]):
    if not unassigned:
        yield []
        return
    v = min(unassigned)
    if v in forced_of:
        block_choices = [forced_of[v]]
    else:
        block_choices = [g for g in allowed[v] if frozenset(g) <= unassigned]
        block_choices.append((v,))
    for block in block_choices:
        rest = unassigned - frozenset(block)
        for tail in _oracle_partitions(rest, allowed, forced_of):
            yield [block] + tail


def oracle_decompose(component, conflict_edges, group_edges, forced_groups,
                     num_masks: int, windows: list[OracleWindow] = ()) -> int:
    """Global minimum objective by enumerating every (partition, coloring).

    Blocks are singletons or whole group edges; forced groups are fixed
    blocks. No pruning, no symmetry breaking.
    """
    comp = frozenset(component)
    forced_of = {}
    for f in forced_groups:
        if set(f) <= comp:
            for v in f:
                forced_of[v] = tuple(f)
    forced_vias = set(forced_of)
    allowed: dict[int, list[tuple[int, ...]]] = {v: [] for v in comp}
    for g in sorted(group_edges):
        if set(g) <= comp and not forced_vias.intersection(g):
            for v in g:
                allowed[v].append(tuple(g))
    edges = [(a, b) for a, b in conflict_edges if a in comp and b in comp]
    windows = [w for w in windows
               if set(w[0]) <= comp and set(w[1]) <= comp]
    best = None
    for blocks in _oracle_partitions(comp, allowed, forced_of):
        for masks in product(range(num_masks), repeat=len(blocks)):
            cost = oracle_objective(blocks, list(masks), edges, windows)
            if best is None or cost < best:
                best = cost
    return best
