"""Hotspot pattern model, library I/O, validation, and random generation.

A pattern is a window of relative via positions plus its mask-level
structure: segments are the multi-via DSA groups in the pattern, nodes
are the singleton positions. Segments and nodes together partition the
via positions. Library JSON:

    {"tech": {...},
     "patterns": [{"id": "h1",
                   "window": {"w": 70, "h": 135},
                   "vias": [{"dx": 0, "dy": 0}, {"dx": 0, "dy": 45}],
                   "segments": [[0, 1]],
                   "nodes": []}]}

Offsets are stored sorted lexicographically, so the anchor (first) offset
is always the smallest; loaders normalize the order and remap indices.

The random generator stands in for a lithography-mined library: it draws
patterns on a small cell grid (4 rows x 2 columns by default), merges
vertically adjacent occupied cells into segments, and leaves the rest as
nodes. Defaults (cell pitches 70 x 45 nm) make vertical neighbors
groupable and cross-column neighbors conflicting under the default
technology, so generated patterns exercise both eliminator kinds.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .tech import TechParams


class LibraryError(ValueError):
    """Raised for malformed hotspot patterns or library files."""


@dataclass(frozen=True)
class HotspotPattern:
    id: str
    window_w: int
    window_h: int
    offsets: tuple[tuple[int, int], ...]
    segments: tuple[tuple[int, ...], ...]
    nodes: tuple[int, ...]


@dataclass(frozen=True)
class HotspotLibrary:
    patterns: tuple[HotspotPattern, ...]
    tech: TechParams

    def pattern_by_id(self, pid: str) -> HotspotPattern:
        for p in self.patterns:
            if p.id == pid:
                return p
        raise KeyError(pid)


def _check_segment_geometry(pat_id: str, offsets: tuple[tuple[int, int], ...],
                            segment: tuple[int, ...], tech: TechParams) -> None:
    if len(segment) < 2:
        raise LibraryError(f"pattern {pat_id}: segment {list(segment)} has fewer than 2 vias")
    if len(segment) > tech.max_g:
        raise LibraryError(
            f"pattern {pat_id}: segment {list(segment)} exceeds max group size {tech.max_g}")
    pts = [offsets[i] for i in segment]
    xs = {p[0] for p in pts}
    ys = {p[1] for p in pts}
    if len(xs) == 1:
        coords = sorted(p[1] for p in pts)
    elif len(ys) == 1:
        coords = sorted(p[0] for p in pts)
    else:
        raise LibraryError(f"pattern {pat_id}: segment {list(segment)} is not collinear")
    for c0, c1 in zip(coords, coords[1:]):
        gap = c1 - c0
        if not tech.min_group_pitch <= gap <= tech.max_dsa_pitch:
            raise LibraryError(
                f"pattern {pat_id}: segment gap {gap} nm outside "
                f"[{tech.min_group_pitch}, {tech.max_dsa_pitch}]")


def validate_pattern(pattern: HotspotPattern, tech: TechParams) -> None:
    """Raise LibraryError naming the pattern and the violated rule."""
    pid = pattern.id
    n = len(pattern.offsets)
    if n == 0:
        raise LibraryError(f"pattern {pid}: has no vias")
    if pattern.window_w < 0 or pattern.window_h < 0:
        raise LibraryError(f"pattern {pid}: negative window extent")
    seen: set[tuple[int, int]] = set()
    for dx, dy in pattern.offsets:
        if not (isinstance(dx, int) and isinstance(dy, int)):
            raise LibraryError(f"pattern {pid}: non-integer offset ({dx!r}, {dy!r})")
        if not (0 <= dx <= pattern.window_w and 0 <= dy <= pattern.window_h):
            raise LibraryError(f"pattern {pid}: offset ({dx}, {dy}) outside window")
        if (dx, dy) in seen:
            raise LibraryError(f"pattern {pid}: duplicate offset ({dx}, {dy})")
        seen.add((dx, dy))
    used: list[int] = []
    for seg in pattern.segments:
        used.extend(seg)
    used.extend(pattern.nodes)
    if sorted(used) != list(range(n)):
        raise LibraryError(
            f"pattern {pid}: segments and nodes must partition all {n} via indices")
    for seg in pattern.segments:
        _check_segment_geometry(pid, pattern.offsets, seg, tech)


def normalize_pattern(pattern: HotspotPattern) -> HotspotPattern:
    """Sort offsets lexicographically and remap segment/node indices."""
    order = sorted(range(len(pattern.offsets)), key=lambda i: pattern.offsets[i])
    remap = {old: new for new, old in enumerate(order)}
    offsets = tuple(pattern.offsets[i] for i in order)
    segments = tuple(sorted(tuple(sorted(remap[i] for i in seg)) for seg in pattern.segments))
    nodes = tuple(sorted(remap[i] for i in pattern.nodes))
    return HotspotPattern(pattern.id, pattern.window_w, pattern.window_h,
                          offsets, segments, nodes)


def load_library(path: str | Path, tech: TechParams | None = None) -> HotspotLibrary:
    """Load and validate a library; tech overrides the file's embedded one."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise LibraryError(f"{path}: malformed JSON: {exc}") from exc
    if not isinstance(data, dict) or "patterns" not in data:
        raise LibraryError(f"{path}: expected an object with a 'patterns' array")
    if tech is None:
        if "tech" not in data:
            raise LibraryError(f"{path}: no tech parameters given or embedded")
        tech = TechParams.from_dict(data["tech"])
    patterns = []
    ids: set[str] = set()
    for i, entry in enumerate(data["patterns"]):
        try:
            window = entry["window"]
            pat = HotspotPattern(
                id=str(entry["id"]),
                window_w=window["w"],
                window_h=window["h"],
                offsets=tuple((via["dx"], via["dy"]) for via in entry["vias"]),
                segments=tuple(tuple(seg) for seg in entry.get("segments", [])),
                nodes=tuple(entry.get("nodes", [])),
            )
        except (KeyError, TypeError) as exc:
            raise LibraryError(f"{path}: pattern entry {i} is malformed: {exc}") from exc
        if pat.id in ids:
            raise LibraryError(f"{path}: duplicate pattern id {pat.id!r}")
        ids.add(pat.id)
        pat = normalize_pattern(pat)
        validate_pattern(pat, tech)
        patterns.append(pat)
    return HotspotLibrary(tuple(patterns), tech)


def save_library(library: HotspotLibrary, path: str | Path) -> None:
    data = {
        "tech": library.tech.to_dict(),
        "patterns": [
            {
                "id": p.id,
                "window": {"w": p.window_w, "h": p.window_h},
                "vias": [{"dx": dx, "dy": dy} for dx, dy in p.offsets],
                "segments": [list(seg) for seg in p.segments],
                "nodes": list(p.nodes),
            }
            for p in library.patterns
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _pattern_from_cells(pid: str, occupied: list[tuple[int, int]], rows: int, cols: int,
                        cell_pitch_x: int, cell_pitch_y: int, tech: TechParams) -> HotspotPattern:
    # occupied: sorted (row, col) cells; offsets sorted lexicographically by (dx, dy)
    cells = sorted(occupied, key=lambda rc: (rc[1] * cell_pitch_x, rc[0] * cell_pitch_y))
    offsets = tuple((c * cell_pitch_x, r * cell_pitch_y) for r, c in cells)
    index_of = {rc: i for i, rc in enumerate(cells)}
    occupied_set = set(occupied)
    segments: list[tuple[int, ...]] = []
    nodes: list[int] = []
    seen: set[tuple[int, int]] = set()
    for r, c in sorted(occupied_set):
        if (r, c) in seen or (r - 1, c) in occupied_set:
            continue
        # top of a maximal vertical chain
        chain = []
        rr = r
        while (rr, c) in occupied_set:
            chain.append((rr, c))
            seen.add((rr, c))
            rr += 1
        i = 0
        while i < len(chain):
            size = min(tech.max_g, len(chain) - i)
            piece = [index_of[rc] for rc in chain[i:i + size]]
            if size >= 2:
                segments.append(tuple(sorted(piece)))
            else:
                nodes.append(piece[0])
            i += size
    pattern = HotspotPattern(pid, (cols - 1) * cell_pitch_x, (rows - 1) * cell_pitch_y,
                             offsets, tuple(sorted(segments)), tuple(sorted(nodes)))
    return normalize_pattern(pattern)


def gen_random_patterns(seed: int, rows: int = 4, cols: int = 2,
                        cell_pitch_x: int = 70, cell_pitch_y: int = 45,
                        count: int = 36, tech: TechParams | None = None,
                        occupancy: float = 0.5, min_structures: int = 1) -> HotspotLibrary:
    """Generate `count` distinct non-empty patterns on a rows x cols cell grid.

    Each cell is occupied independently with probability `occupancy`;
    all-empty and repeated draws are rejected and redrawn. Deterministic
    per seed.

    min_structures rejects draws with fewer segments plus nodes; 2 keeps
    only neighborhood patterns (at least two templates interacting), the
    kind the elimination model can always act on.
    """
    tech = tech or TechParams()
    if not tech.min_group_pitch <= cell_pitch_y <= tech.max_dsa_pitch:
        raise LibraryError(
            f"cell_pitch_y {cell_pitch_y} must lie in [{tech.min_group_pitch}, "
            f"{tech.max_dsa_pitch}] so vertically adjacent cells can form segments")
    if cell_pitch_x < tech.min_pitch_diff_mask:
        raise LibraryError(f"cell_pitch_x {cell_pitch_x} below the hard spacing floor")
    if rows < 1 or cols < 1:
        raise LibraryError(f"cell grid must be at least 1x1, got {rows}x{cols}")
    if not 0.0 < occupancy <= 1.0:
        raise LibraryError(f"occupancy must lie in (0, 1], got {occupancy}")
    max_distinct = 2 ** (rows * cols) - 1
    if count > max_distinct:
        raise LibraryError(f"cannot draw {count} distinct patterns from a {rows}x{cols} grid")
    rng = random.Random(seed)
    seen: set[frozenset[tuple[int, int]]] = set()
    patterns: list[HotspotPattern] = []
    attempts = 0
    limit = 1000 * count
    while len(patterns) < count:
        attempts += 1
        if attempts > limit:
            raise LibraryError(
                f"gave up after {limit} draws while generating {count} distinct patterns")
        occupied = [(r, c) for r in range(rows) for c in range(cols)
                    if rng.random() < occupancy]
        key = frozenset(occupied)
        if not occupied or key in seen:
            continue
        seen.add(key)
        pat = _pattern_from_cells(f"h{len(patterns) + 1}", occupied, rows, cols,
                                  cell_pitch_x, cell_pitch_y, tech)
        if len(pat.segments) + len(pat.nodes) < min_structures:
            continue
        validate_pattern(pat, tech)
        patterns.append(pat)
    return HotspotLibrary(tuple(patterns), tech)
