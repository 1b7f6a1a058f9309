"""Technology parameters shared by every legality predicate."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path


@dataclass(frozen=True)
class TechParams:
    """Process constants, all pitches center-to-center in integer nanometers.

    Defaults match a projected 5nm DSA + triple-patterning via process:
    grouping is legal up to max_dsa_pitch, two ungrouped vias on one mask
    need min_pitch_same_mask, and min_pitch_diff_mask is the hard floor
    below which two vias are a malformed input.

    l0 is the natural pitch of the block copolymer. It is carried for
    completeness and exposed to future legality predicates, but no current
    rule consumes it; grouping legality is bounded by max_dsa_pitch alone.

    min_group_pitch (lower bound on neighbor spacing inside one group)
    defaults to via_width, the tightest spacing at which two via holes do
    not physically overlap.
    """

    l0: int = 30
    max_dsa_pitch: int = 51
    max_g: int = 2
    min_pitch_same_mask: int = 75
    min_pitch_diff_mask: int = 10
    via_width: int = 15
    num_masks: int = 3
    min_group_pitch: int | None = None

    def __post_init__(self) -> None:
        if self.min_group_pitch is None:
            object.__setattr__(self, "min_group_pitch", self.via_width)
        if self.num_masks < 1:
            raise ValueError("num_masks must be >= 1")
        if self.max_g < 1:
            raise ValueError("max_g must be >= 1")
        for name in ("l0", "max_dsa_pitch", "min_pitch_same_mask",
                     "min_pitch_diff_mask", "via_width", "min_group_pitch"):
            value = getattr(self, name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        chain = (self.min_pitch_diff_mask, self.via_width,
                 self.min_group_pitch, self.max_dsa_pitch)
        if not (chain[0] <= chain[1] <= chain[2] <= chain[3]):
            raise ValueError(
                "expected min_pitch_diff_mask <= via_width <= min_group_pitch"
                f" <= max_dsa_pitch, got {chain}")
        if not self.max_dsa_pitch < self.min_pitch_same_mask:
            raise ValueError("max_dsa_pitch must be < min_pitch_same_mask")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> TechParams:
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown tech parameter(s): {sorted(unknown)}")
        return cls(**data)


def load_tech(path: str | Path) -> TechParams:
    """Read TechParams from a flat JSON object."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: tech file must hold a JSON object")
    return TechParams.from_dict(data)


def save_tech(tech: TechParams, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tech.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
