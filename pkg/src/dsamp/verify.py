"""Solver-independent audit of a decomposition.

The report counts the two violation families of the quality metric:

* unresolved conflicts: via pairs closer than min_pitch_same_mask on the
  same mask without sharing a group, recomputed from geometry so the
  audit never trusts the solver's graph
* realized hotspots: a matched window materializes on mask m when all
  constituents sit on m, no non-constituent does, and the decomposition
  groups mirror the pattern structure exactly (each segment is a whole
  group, each node a whole singleton); a constituent whose group extends
  beyond the pattern shape prints a different template and does not
  realize the hotspot

n_violations is always n_conflicts + n_hotspots; a window that is both an
unresolved conflict and a realized hotspot contributes to both counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .decompose import Decomposition
from .geometry import close_pairs
from .hotspots import HotspotLibrary
from .layout import Layout
from .matcher import PotentialHotspot, find_potential_hotspots
from .tech import TechParams


class VerifyError(ValueError):
    """Raised when the audited inputs are inconsistent."""


@dataclass(frozen=True)
class ConflictViolation:
    a: int
    b: int
    dist_sq: int

    @property
    def distance(self) -> float:
        return math.sqrt(self.dist_sq)


@dataclass(frozen=True)
class HotspotViolation:
    pattern_id: str
    origin: tuple[int, int]
    mask: int


@dataclass(frozen=True)
class ViolationReport:
    conflicts: tuple[ConflictViolation, ...]
    hotspots: tuple[HotspotViolation, ...]
    meta: dict = field(default_factory=dict)

    @property
    def n_conflicts(self) -> int:
        return len(self.conflicts)

    @property
    def n_hotspots(self) -> int:
        return len(self.hotspots)

    @property
    def n_violations(self) -> int:
        return self.n_conflicts + self.n_hotspots

    def to_json_dict(self) -> dict:
        return {
            "n_conflicts": self.n_conflicts,
            "n_hotspots": self.n_hotspots,
            "n_violations": self.n_violations,
            "conflicts": [{"a": c.a, "b": c.b, "distance": c.distance}
                          for c in self.conflicts],
            "hotspots": [{"pattern_id": h.pattern_id, "origin": list(h.origin),
                          "mask": h.mask} for h in self.hotspots],
            "meta": self.meta,
        }

    def summary(self) -> str:
        lines = [f"violations: {self.n_violations} "
                 f"({self.n_conflicts} conflicts, {self.n_hotspots} hotspots)"]
        for c in self.conflicts:
            lines.append(f"  conflict: vias {c.a} and {c.b}, {c.distance:.3f} nm apart")
        for h in self.hotspots:
            lines.append(f"  hotspot: pattern {h.pattern_id} at "
                         f"({h.origin[0]}, {h.origin[1]}) on mask {h.mask}")
        return "\n".join(lines)


def save_report(report: ViolationReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _check_complete(layout: Layout, decomposition: Decomposition) -> None:
    covered = decomposition.via_to_group
    missing = [v.id for v in layout.vias if v.id not in covered]
    if missing:
        raise VerifyError(f"decomposition misses {len(missing)} via(s), first {missing[:5]}")


def count_conflicts(layout: Layout, decomposition: Decomposition,
                    tech: TechParams) -> list[ConflictViolation]:
    """Same-mask, not co-grouped pairs closer than min_pitch_same_mask."""
    _check_complete(layout, decomposition)
    found = []
    for a, b, d2 in close_pairs(layout.id_points(), tech.min_pitch_same_mask):
        if decomposition.via_to_group[a] == decomposition.via_to_group[b]:
            continue
        if decomposition.mask_of_via(a) == decomposition.mask_of_via(b):
            found.append(ConflictViolation(a, b, d2))
    found.sort(key=lambda c: (c.a, c.b))
    return found


def realized_hotspot_mask(ph: PotentialHotspot, library: HotspotLibrary,
                          decomposition: Decomposition) -> int | None:
    """Mask on which the window materializes, or None if it does not."""
    pattern = library.pattern_by_id(ph.pattern_id)
    mask = decomposition.mask_of_via(ph.constituents[0])
    for v in ph.constituents[1:]:
        if decomposition.mask_of_via(v) != mask:
            return None
    for v in ph.non_constituents:
        if decomposition.mask_of_via(v) == mask:
            return None
    for seg in pattern.segments:
        via_ids = [ph.constituents[i] for i in seg]
        members = decomposition.group_members(via_ids[0])
        if len(members) != len(via_ids) or set(members) != set(via_ids):
            return None
    for idx in pattern.nodes:
        if len(decomposition.group_members(ph.constituents[idx])) != 1:
            return None
    return mask


def find_realized_hotspots(layout: Layout, decomposition: Decomposition,
                           library: HotspotLibrary) -> list[HotspotViolation]:
    """Windows recomputed from scratch, then checked against the masks."""
    _check_complete(layout, decomposition)
    found = []
    for ph in find_potential_hotspots(layout, library):
        mask = realized_hotspot_mask(ph, library, decomposition)
        if mask is not None:
            found.append(HotspotViolation(ph.pattern_id, ph.origin, mask))
    found.sort(key=lambda h: (h.pattern_id, h.origin))
    return found


def verify(layout: Layout, decomposition: Decomposition, tech: TechParams,
           library: HotspotLibrary | None = None,
           meta: dict | None = None) -> ViolationReport:
    """Assemble the full audit; pure function of its inputs."""
    conflicts = count_conflicts(layout, decomposition, tech)
    hotspots = (find_realized_hotspots(layout, decomposition, library)
                if library is not None else [])
    return ViolationReport(conflicts=tuple(conflicts), hotspots=tuple(hotspots),
                           meta=dict(meta or {}))
