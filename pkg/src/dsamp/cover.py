"""Greedy Set Cover over potential hotspots.

The universe is the set of detected potential-hotspot windows; each
candidate eliminator covers the windows it can kill. Selection follows
the classic greedy rule: repeatedly take the candidate covering the most
still-uncovered windows. A frequency bucket structure makes every pick
O(1) and bounds the total relocation work by the sum of cover sizes.

Candidates interact even though plain Set Cover treats them as
independent, so a pick invalidates candidates it contradicts:

* picking conflict(a, b) invalidates affinity candidates whose group
  contains both a and b (a group cannot contain a conflicting pair)
* picking affinity(g) invalidates conflict candidates with both
  endpoints inside g, and every affinity candidate sharing a via with g
  (forced groups stay pairwise disjoint)

Invalidation never decrements frequencies; hotspots whose last live
candidate disappears end up residual and are left to the verifier.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, replace
from collections.abc import Iterable, Sequence

from .graph import (ADDED_BY_COVER, GraphError, LayoutGraph, _components_from_edges)
from .matcher import AFFINITY, CHOSEN, CONFLICT, INVALIDATED, LIVE, Eliminator, PotentialHotspot


class BucketList:
    """Frequency-indexed buckets with lazily deleted min-heaps.

    Each bucket keeps candidate indices in a heap so the pick at the
    highest frequency is always the canonically smallest index. The
    locator maps a live index to its current frequency; heap entries that
    disagree with it are stale and skipped on pop.
    """

    def __init__(self) -> None:
        self._buckets: dict[int, list[int]] = {}
        self._loc: dict[int, int] = {}
        self._max = 0

    def insert(self, idx: int, freq: int) -> None:
        self._loc[idx] = freq
        if freq > 0:
            heapq.heappush(self._buckets.setdefault(freq, []), idx)
            if freq > self._max:
                self._max = freq

    def move(self, idx: int, freq: int) -> None:
        self._loc[idx] = freq
        if freq > 0:
            heapq.heappush(self._buckets.setdefault(freq, []), idx)

    def discard(self, idx: int) -> None:
        self._loc.pop(idx, None)

    def frequency(self, idx: int) -> int | None:
        return self._loc.get(idx)

    def pop_max(self) -> int | None:
        """Remove and return the smallest live index at the highest frequency."""
        while self._max > 0:
            heap = self._buckets.get(self._max)
            while heap:
                top = heap[0]
                if self._loc.get(top) == self._max:
                    heapq.heappop(heap)
                    del self._loc[top]
                    return top
                heapq.heappop(heap)  # stale entry
            self._buckets.pop(self._max, None)
            self._max -= 1
        return None


@dataclass(frozen=True)
class CoverStats:
    iterations: int
    invalidations: int
    relocations: int
    sum_covers: int


@dataclass(frozen=True)
class CoverResult:
    chosen: tuple[Eliminator, ...]
    covered: frozenset[int]
    residual: frozenset[int]
    stats: CoverStats

    def to_json_dict(self) -> dict:
        return {
            "chosen": [{"id": e.id, "kind": e.kind, "vias": list(e.vias),
                        "n_covers": len(e.covers)} for e in self.chosen],
            "covered": sorted(self.covered),
            "residual": sorted(self.residual),
            "stats": {"iterations": self.stats.iterations,
                      "invalidations": self.stats.invalidations,
                      "relocations": self.stats.relocations,
                      "sum_covers": self.stats.sum_covers},
        }


def _universe_ids(phs: Iterable) -> set:
    """Hotspot ids; plain hashable ids pass through for abstract instances."""
    return {ph.id if isinstance(ph, PotentialHotspot) else ph for ph in phs}


def greedy_cover(phs: Sequence[PotentialHotspot | int], candidates: Sequence[Eliminator],
                 debug: bool = False) -> CoverResult:
    """Run the greedy cover; deterministic for any candidate input order.

    Candidates are first sorted canonically (conflicts before affinities,
    then by via tuple); ties at equal frequency resolve to the canonically
    smallest candidate. With debug=True every pick is checked against a
    naive rescan of live candidate frequencies.
    """
    universe = _universe_ids(phs)
    cands = sorted(candidates, key=Eliminator.sort_key)
    for e in cands:
        if not e.covers <= universe:
            raise ValueError(
                f"candidate {e.kind}{e.vias} covers unknown hotspot ids "
                f"{sorted(e.covers - universe)}")
        e.state = LIVE

    uncovered = set(universe)
    cover_sets = [set(e.covers) for e in cands]
    by_hotspot: dict[int, list[int]] = {}
    affinity_by_via: dict[int, list[int]] = {}
    conflict_by_via: dict[int, list[int]] = {}
    for i, e in enumerate(cands):
        for h in e.covers:
            by_hotspot.setdefault(h, []).append(i)
        index = affinity_by_via if e.kind == AFFINITY else conflict_by_via
        for v in e.vias:
            index.setdefault(v, []).append(i)

    freq = [len(s) for s in cover_sets]
    alive = [True] * len(cands)
    bl = BucketList()
    for i, f in enumerate(freq):
        bl.insert(i, f)

    chosen: list[int] = []
    relocations = 0
    invalidations = 0

    def kill(j: int) -> None:
        nonlocal invalidations
        alive[j] = False
        cands[j].state = INVALIDATED
        bl.discard(j)
        invalidations += 1

    while True:
        if debug:
            live_max = max((len(cover_sets[j] & uncovered)
                            for j in range(len(cands)) if alive[j]), default=0)
        i = bl.pop_max()
        if i is None:
            break
        newly = cover_sets[i] & uncovered
        if debug:
            assert freq[i] == live_max == len(newly), \
                f"bucket pick freq {freq[i]} != live max {live_max}"
        alive[i] = False
        cands[i].state = CHOSEN
        chosen.append(i)
        uncovered -= newly
        for h in sorted(newly):
            for j in by_hotspot.get(h, ()):
                if alive[j]:
                    freq[j] -= 1
                    bl.move(j, freq[j])
                    relocations += 1
        picked = cands[i]
        if picked.kind == CONFLICT:
            a, b = picked.vias
            for j in affinity_by_via.get(a, ()):
                if alive[j] and b in cands[j].vias:
                    kill(j)
        else:
            members = set(picked.vias)
            hit: set[int] = set()
            for v in picked.vias:
                hit.update(j for j in affinity_by_via.get(v, ()) if alive[j])
                hit.update(j for j in conflict_by_via.get(v, ())
                           if alive[j] and set(cands[j].vias) <= members)
            for j in sorted(hit):
                kill(j)

    stats = CoverStats(iterations=len(chosen), invalidations=invalidations,
                       relocations=relocations, sum_covers=sum(len(s) for s in cover_sets))
    return CoverResult(chosen=tuple(cands[i] for i in chosen),
                       covered=frozenset(universe - uncovered),
                       residual=frozenset(uncovered), stats=stats)


def apply_eliminators(graph: LayoutGraph, result: CoverResult) -> LayoutGraph:
    """Fold chosen eliminators into the graph and recompute components.

    Conflict choices become added conflict edges. Affinity choices move
    their grouping hyper-edge into forced_groups; any other grouping
    hyper-edge sharing a via with a forced group without being contained
    in it is dropped, since a via joins exactly one group.
    """
    conflicts = dict(graph.conflict_edges)
    forced = set(graph.forced_groups)
    forced_of: dict[int, GroupEdge] = {}
    for f in forced:
        for v in f:
            forced_of[v] = f
    for e in result.chosen:
        if e.kind == CONFLICT:
            a, b = e.vias
            key = (a, b) if a < b else (b, a)
            assert key not in conflicts, f"conflict {key} already present"
            conflicts[key] = ADDED_BY_COVER
        elif e.kind == AFFINITY:
            if e.vias not in graph.group_edges:
                raise GraphError(f"affinity {e.vias} is not a grouping hyper-edge")
            for v in e.vias:
                assert v not in forced_of, \
                    f"forced groups overlap: {e.vias} vs {forced_of[v]}"
            forced.add(e.vias)
            for v in e.vias:
                forced_of[v] = e.vias
        else:
            raise GraphError(f"unknown eliminator kind {e.kind!r}")
    if forced:
        kept = set()
        for g in graph.group_edges:
            for v in g:
                f = forced_of.get(v)
                if f is not None and not set(g) <= set(f):
                    break
            else:
                kept.add(g)
        group_edges = frozenset(kept)
    else:
        group_edges = graph.group_edges
    components = _components_from_edges(len(graph.layout), conflicts, group_edges, forced)
    return replace(graph, conflict_edges=conflicts, group_edges=group_edges,
                   forced_groups=frozenset(forced), components=components)
