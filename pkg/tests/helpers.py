"""Shared builders for test layouts, patterns, and the two-template
window scenario (group pair + singleton + one spare via) used across
modules."""

from __future__ import annotations

from dsamp.hotspots import HotspotLibrary, HotspotPattern, normalize_pattern, validate_pattern
from dsamp.layout import Layout, Via
from dsamp.tech import TechParams


def make_layout(coords) -> Layout:
    return Layout(tuple(Via(i, x, y) for i, (x, y) in enumerate(coords)))


def make_pattern(pid: str, window: tuple[int, int], offsets, segments=(), nodes=(),
                 tech: TechParams | None = None) -> HotspotPattern:
    pat = normalize_pattern(HotspotPattern(
        pid, window[0], window[1], tuple(tuple(o) for o in offsets),
        tuple(tuple(s) for s in segments), tuple(nodes)))
    validate_pattern(pat, tech or TechParams())
    return pat


def pair_singleton_scenario(tech: TechParams | None = None):
    """The archetypal elimination window: a groupable pair (a, b), a far
    singleton d, and a spare via c that can be grouped with d.

    Returns (layout, library, ids) with ids = {"a": 0, "b": 1, "c": 2, "d": 3}.
    The single pattern has segment {a, b} and node d; via c sits inside the
    window at an unoccupied position. Eligible eliminators are exactly
    conflict(a, d), conflict(b, d), and affinity({c, d}): the (a, b) pair is
    groupable so no conflict edge may be added there, and grouping {c, d}
    pulls a non-constituent onto d's mask.
    """
    tech = tech or TechParams(max_g=2)
    layout = make_layout([(0, 0), (0, 45), (90, 90), (90, 135)])
    pattern = make_pattern("pair+node", (90, 135),
                           offsets=[(0, 0), (0, 45), (90, 135)],
                           segments=[(0, 1)], nodes=[2], tech=tech)
    library = HotspotLibrary((pattern,), tech)
    return layout, library, {"a": 0, "b": 1, "c": 2, "d": 3}
