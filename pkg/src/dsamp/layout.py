"""Via layout model, file I/O, spacing validation, and synthetic generation.

A layout is a flat set of point vias in integer nanometers. File formats:

* JSON: ``{"units": "nm", "vias": [{"x": 10, "y": 20}, ...]}``
* CSV:  one ``x,y`` pair per line, optional ``x,y`` header

Via ids are dense 0..n-1 in file (or generation) order.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .geometry import close_pairs
from .tech import TechParams

# 1 meter in nm; any coordinate beyond this is a corrupt input
MAX_COORD = 1_000_000_000


class LayoutError(ValueError):
    """Raised when a layout file or its contents are unusable."""


@dataclass(frozen=True)
class Via:
    id: int
    x: int
    y: int


@dataclass(frozen=True)
class Layout:
    """Immutable collection of point vias; safe to share across threads."""

    vias: tuple[Via, ...]

    def __len__(self) -> int:
        return len(self.vias)

    @cached_property
    def bbox(self) -> tuple[int, int, int, int]:
        """(min_x, min_y, max_x, max_y); all zeros for an empty layout."""
        if not self.vias:
            return (0, 0, 0, 0)
        xs = [v.x for v in self.vias]
        ys = [v.y for v in self.vias]
        return (min(xs), min(ys), max(xs), max(ys))

    @cached_property
    def coord_to_id(self) -> dict[tuple[int, int], int]:
        return {(v.x, v.y): v.id for v in self.vias}

    @cached_property
    def _rows(self) -> tuple[list[int], dict[int, list[tuple[int, int]]]]:
        rows: dict[int, list[tuple[int, int]]] = {}
        for v in self.vias:
            rows.setdefault(v.y, []).append((v.x, v.id))
        for items in rows.values():
            items.sort()
        return sorted(rows), rows

    def vias_in_rect(self, x0: int, y0: int, x1: int, y1: int) -> list[int]:
        """Ids of vias with x0 <= x <= x1 and y0 <= y <= y1 (closed box)."""
        ys, rows = self._rows
        out: list[int] = []
        for yi in range(bisect.bisect_left(ys, y0), bisect.bisect_right(ys, y1)):
            items = rows[ys[yi]]
            lo = bisect.bisect_left(items, (x0, -1))
            hi = bisect.bisect_right(items, (x1, MAX_COORD))
            out.extend(vid for _, vid in items[lo:hi])
        return out

    def id_points(self) -> list[tuple[int, int, int]]:
        return [(v.id, v.x, v.y) for v in self.vias]


@dataclass(frozen=True)
class SpacingViolation:
    """Two vias closer than the hard different-mask floor."""

    a: int
    b: int
    dist_sq: int

    @property
    def distance(self) -> float:
        return math.sqrt(self.dist_sq)

    def __str__(self) -> str:
        return f"vias {self.a} and {self.b} are {self.distance:.3f} nm apart"


def _make_layout(coords: list[tuple[int, int]], source: str) -> Layout:
    seen: dict[tuple[int, int], int] = {}
    vias = []
    for i, (x, y) in enumerate(coords):
        if not (isinstance(x, int) and isinstance(y, int)):
            raise LayoutError(f"{source}: via {i} has non-integer coordinates ({x!r}, {y!r})")
        if x < 0 or y < 0:
            raise LayoutError(f"{source}: via {i} has negative coordinates ({x}, {y})")
        if x > MAX_COORD or y > MAX_COORD:
            raise LayoutError(f"{source}: via {i} coordinate exceeds {MAX_COORD} nm")
        if (x, y) in seen:
            raise LayoutError(
                f"{source}: via {i} duplicates coordinates ({x}, {y}) of via {seen[(x, y)]}")
        seen[(x, y)] = i
        vias.append(Via(i, x, y))
    return Layout(tuple(vias))


def _detect_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in ("json", "csv"):
            raise LayoutError(f"unknown layout format {fmt!r}")
        return fmt
    return "csv" if path.suffix.lower() == ".csv" else "json"


def load_layout(path: str | Path, fmt: str | None = None) -> Layout:
    """Load a layout file; ids are assigned densely in file order."""
    path = Path(path)
    fmt = _detect_format(path, fmt)
    if fmt == "json":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise LayoutError(f"{path}: malformed JSON: {exc}") from exc
        if not isinstance(data, dict) or "vias" not in data:
            raise LayoutError(f"{path}: expected an object with a 'vias' array")
        units = data.get("units", "nm")
        if units != "nm":
            raise LayoutError(f"{path}: unsupported units {units!r} (only 'nm')")
        coords = []
        for i, entry in enumerate(data["vias"]):
            if not isinstance(entry, dict) or "x" not in entry or "y" not in entry:
                raise LayoutError(f"{path}: via {i} must be an object with 'x' and 'y'")
            coords.append((entry["x"], entry["y"]))
        return _make_layout(coords, str(path))
    # csv
    coords = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if lineno == 1 and parts[:2] == ["x", "y"]:
                continue
            if len(parts) != 2:
                raise LayoutError(f"{path}:{lineno}: expected 'x,y', got {line!r}")
            try:
                coords.append((int(parts[0]), int(parts[1])))
            except ValueError as exc:
                raise LayoutError(f"{path}:{lineno}: non-integer coordinate in {line!r}") from exc
    return _make_layout(coords, str(path))


def save_layout(layout: Layout, path: str | Path, fmt: str | None = None) -> None:
    path = Path(path)
    fmt = _detect_format(path, fmt)
    if fmt == "json":
        data = {"units": "nm", "vias": [{"x": v.x, "y": v.y} for v in layout.vias]}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("x,y\n")
            for v in layout.vias:
                fh.write(f"{v.x},{v.y}\n")


def validate_layout(layout: Layout, tech: TechParams) -> list[SpacingViolation]:
    """Pairs closer than min_pitch_diff_mask; empty list means valid.

    Distance exactly equal to the floor is legal.
    """
    found = [SpacingViolation(a, b, d2)
             for a, b, d2 in close_pairs(layout.id_points(), tech.min_pitch_diff_mask)]
    found.sort(key=lambda s: (s.a, s.b))
    return found


def gen_random_layout(seed: int, rows: int, cols: int, pitch_x: int, pitch_y: int,
                      density: float, tech: TechParams | None = None) -> Layout:
    """Place vias on a rows x cols grid, each cell kept with probability density.

    Deterministic per seed. Grid cell (r, c) sits at (c * pitch_x, r * pitch_y).
    """
    if rows < 1 or cols < 1:
        raise LayoutError(f"grid must be at least 1x1, got {rows}x{cols}")
    if not (isinstance(pitch_x, int) and isinstance(pitch_y, int)) or pitch_x < 1 or pitch_y < 1:
        raise LayoutError(f"pitches must be positive integers, got ({pitch_x!r}, {pitch_y!r})")
    if tech is not None and (pitch_x < tech.min_pitch_diff_mask or pitch_y < tech.min_pitch_diff_mask):
        raise LayoutError(
            f"grid pitches ({pitch_x}, {pitch_y}) below the hard spacing floor "
            f"{tech.min_pitch_diff_mask} nm")
    if not 0.0 < density <= 1.0:
        raise LayoutError(f"density must lie in (0, 1], got {density}")
    rng = random.Random(seed)
    vias = []
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                vias.append(Via(len(vias), c * pitch_x, r * pitch_y))
    return Layout(tuple(vias))
