"""Sliding-window detection of potential hotspots and their eliminators.

Matching is translation-only and exact: a pattern matches a window when
every pattern offset lands on a via at exactly the corresponding
coordinate. Every other via inside the closed window rectangle is a
non-constituent. Matching is anchored on vias, which is exhaustive for
exact matching because every match places a via at the pattern's first
offset.

An eliminator is a graph change that kills a potential hotspot before
decomposition:

* conflict(a, b): a new conflict edge between two constituent vias that
  are neither groupable nor already conflicting
* affinity(g): an existing grouping hyper-edge spanning at least one
  constituent and one non-constituent, promoted to a forced group

Candidates are deduplicated across hotspots; the covers set of each
candidate lists every potential hotspot it eliminates.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .graph import GroupEdge, LayoutGraph, is_groupable
from .hotspots import HotspotLibrary, HotspotPattern
from .layout import Layout

CONFLICT = "conflict"
AFFINITY = "affinity"
_KIND_RANK = {CONFLICT: 0, AFFINITY: 1}

LIVE = "live"
CHOSEN = "chosen"
INVALIDATED = "invalidated"


@dataclass(frozen=True)
class PotentialHotspot:
    """A window where a library hotspot can materialize.

    constituents[i] is the via matching pattern offset i; non_constituents
    are the remaining vias inside the window rectangle, sorted by id.
    """

    id: int
    pattern_id: str
    origin: tuple[int, int]
    constituents: tuple[int, ...]
    non_constituents: tuple[int, ...]

    @property
    def all_vias(self) -> frozenset[int]:
        return frozenset(self.constituents) | frozenset(self.non_constituents)


@dataclass
class Eliminator:
    id: int
    kind: str                # "conflict" or "affinity"
    vias: tuple[int, ...]    # sorted pair, or group edge in run order
    covers: frozenset[int]   # potential-hotspot ids
    state: str = LIVE

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (_KIND_RANK[self.kind], self.vias)


def _scan_pattern(layout: Layout, pattern: HotspotPattern):
    coord = layout.coord_to_id
    ax, ay = pattern.offsets[0]
    rest = pattern.offsets[1:]
    w, h = pattern.window_w, pattern.window_h
    out = []
    for v in layout.vias:
        ox, oy = v.x - ax, v.y - ay
        ids = [v.id]
        for dx, dy in rest:
            vid = coord.get((ox + dx, oy + dy))
            if vid is None:
                break
            ids.append(vid)
        else:
            cset = set(ids)
            non = tuple(sorted(i for i in layout.vias_in_rect(ox, oy, ox + w, oy + h)
                               if i not in cset))
            out.append((pattern.id, (ox, oy), tuple(ids), non))
    return out


def _segments_realizable(match_constituents: tuple[int, ...], pattern: HotspotPattern,
                         graph: LayoutGraph) -> bool:
    for seg in pattern.segments:
        via_ids = tuple(match_constituents[i] for i in seg)
        if via_ids not in graph.group_edges:
            return False
    return True


def find_potential_hotspots(layout: Layout, library: HotspotLibrary,
                            graph: LayoutGraph | None = None,
                            threads: int = 1) -> list[PotentialHotspot]:
    """Every (pattern, window) match, deduplicated and canonically sorted.

    When a graph is supplied, matches whose pattern segments have no
    corresponding grouping hyper-edge are pruned as unrealizable. The
    verifier calls this without a graph and gets the raw window set.
    """
    if threads > 1 and len(library.patterns) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda p: _scan_pattern(layout, p), library.patterns))
    else:
        chunks = [_scan_pattern(layout, p) for p in library.patterns]
    by_pattern = {p.id: p for p in library.patterns}
    matches: dict[tuple[str, tuple[int, int]], tuple] = {}
    for chunk in chunks:
        for pid, origin, consts, non in chunk:
            if graph is not None and not _segments_realizable(consts, by_pattern[pid], graph):
                continue
            matches.setdefault((pid, origin), (pid, origin, consts, non))
    out = []
    for key in sorted(matches):
        pid, origin, consts, non = matches[key]
        out.append(PotentialHotspot(len(out), pid, origin, consts, non))
    return out


def enumerate_eliminators(phs: list[PotentialHotspot], graph: LayoutGraph) -> list[Eliminator]:
    """One candidate per distinct conflict pair / grouping hyper-edge.

    conflict(a, b) covers a hotspot iff both a and b are constituents and
    the pair is neither groupable nor already a conflict edge; affinity(g)
    covers a hotspot iff g holds at least one constituent and one
    non-constituent of it. Output is canonically ordered: conflicts first,
    then affinities, each sorted by via tuple.
    """
    covers: dict[tuple[str, tuple[int, ...]], set[int]] = {}
    for ph in phs:
        consts = sorted(ph.constituents)
        non_set = set(ph.non_constituents)
        for i, a in enumerate(consts):
            for b in consts[i + 1:]:
                if graph.has_conflict(a, b):
                    continue
                if is_groupable((a, b), graph):
                    continue
                covers.setdefault((CONFLICT, (a, b)), set()).add(ph.id)
        seen: set[GroupEdge] = set()
        for v in ph.constituents:
            for g in graph.groups_by_via.get(v, ()):
                if g in seen:
                    continue
                seen.add(g)
                if g in graph.forced_groups:
                    continue
                if any(u in non_set for u in g):
                    covers.setdefault((AFFINITY, g), set()).add(ph.id)
    ordered = sorted(covers, key=lambda k: (_KIND_RANK[k[0]], k[1]))
    return [Eliminator(i, kind, vias, frozenset(covers[(kind, vias)]))
            for i, (kind, vias) in enumerate(ordered)]


def matches_to_json_dict(phs: list[PotentialHotspot],
                         eliminators: list[Eliminator] | None = None) -> dict:
    data: dict = {
        "potential_hotspots": [
            {"id": ph.id, "pattern_id": ph.pattern_id,
             "origin": list(ph.origin),
             "constituents": list(ph.constituents),
             "non_constituents": list(ph.non_constituents)}
            for ph in phs
        ],
    }
    if eliminators is not None:
        data["eliminators"] = [
            {"id": e.id, "kind": e.kind, "vias": list(e.vias),
             "n_covers": len(e.covers), "covers": sorted(e.covers)}
            for e in eliminators
        ]
    return data
