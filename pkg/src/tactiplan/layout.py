"""Sensor-site universe: named sites, anatomical groups, per-site costs.

A layout is the ordered list of candidate sensor positions that every
binary configuration indexes into. Site order is the canonical bit order
for all configuration vectors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import DimensionMismatch, InvariantError, ParseError


class Finger(str, Enum):
    THUMB = "thumb"
    INDEX = "index"
    MIDDLE = "middle"
    RING = "ring"
    LITTLE = "little"
    PALM = "palm"


class Region(str, Enum):
    K1 = "K1"
    K2 = "K2"
    K3 = "K3"
    FINGERTIP = "fingertip"
    PALM = "palm"


FINGER_ORDER = (Finger.THUMB, Finger.INDEX, Finger.MIDDLE, Finger.RING, Finger.LITTLE)
FINGER_REGIONS = (Region.K1, Region.K2, Region.K3, Region.FINGERTIP)


@dataclass(frozen=True)
class SensorSite:
    """One candidate sensor position.

    Attributes:
        id: zero-based index, contiguous within a layout.
        name: human-readable label, e.g. "thumb.K2".
        finger: anatomical group the site belongs to.
        region: position within the finger (or palm).
        cost: nonnegative per-sensor cost in arbitrary currency units.
    """

    id: int
    name: str
    finger: Finger
    region: Region
    cost: float = 1.0

    def __post_init__(self):
        if self.cost < 0:
            raise InvariantError(f"site {self.name!r}: cost must be >= 0, got {self.cost}")


@dataclass(frozen=True)
class SensorLayout:
    """Ordered universe of sensor sites; order defines configuration bit order."""

    name: str
    sites: tuple[SensorSite, ...]

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(self.sites))
        ids = [s.id for s in self.sites]
        if ids != list(range(len(self.sites))):
            raise InvariantError(
                f"layout {self.name!r}: site ids must be 0..{len(self.sites) - 1} in order, got {ids}"
            )
        placements = [(s.finger, s.region) for s in self.sites]
        if len(set(placements)) != len(placements):
            raise InvariantError(f"layout {self.name!r}: duplicate (finger, region) placement")

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def __len__(self) -> int:
        return len(self.sites)

    def site_names(self) -> list[str]:
        return [s.name for s in self.sites]

    def costs(self) -> list[float]:
        return [s.cost for s in self.sites]


def builtin_shadow21(cost: float = 1.0) -> SensorLayout:
    """Canonical 21-site hand layout: 5 fingers x {K1, K2, K3, fingertip} + palm.

    Sites are ordered thumb first, palm last, with unit cost by default.
    """
    sites = []
    for finger in FINGER_ORDER:
        for region in FINGER_REGIONS:
            sites.append(
                SensorSite(
                    id=len(sites),
                    name=f"{finger.value}.{region.value}",
                    finger=finger,
                    region=region,
                    cost=cost,
                )
            )
    sites.append(SensorSite(id=len(sites), name="palm", finger=Finger.PALM, region=Region.PALM, cost=cost))
    return SensorLayout(name="shadow21", sites=tuple(sites))


def total_cost(layout: SensorLayout, config) -> float:
    """Sum of the costs of all sites present in `config`."""
    bits = config.bits
    if len(bits) != layout.n_sites:
        raise DimensionMismatch(
            f"configuration has {len(bits)} bits, layout {layout.name!r} has {layout.n_sites} sites"
        )
    return float(sum(site.cost for site, bit in zip(layout.sites, bits) if bit))


def layout_to_json_dict(layout: SensorLayout) -> dict:
    return {
        "name": layout.name,
        "sites": [
            {
                "id": s.id,
                "name": s.name,
                "finger": s.finger.value,
                "region": s.region.value,
                "cost": s.cost,
            }
            for s in layout.sites
        ],
    }


def layout_from_json_dict(data: dict) -> SensorLayout:
    try:
        raw_sites = data["sites"]
        name = data["name"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"layout JSON is missing required field: {exc}") from exc
    if not isinstance(raw_sites, list) or not raw_sites:
        raise ParseError("layout JSON must contain a nonempty 'sites' list")
    sites = []
    previous_id = -1
    for raw in raw_sites:
        try:
            site_id = int(raw["id"])
            site = SensorSite(
                id=site_id,
                name=str(raw["name"]),
                finger=Finger(raw["finger"]),
                region=Region(raw["region"]),
                cost=float(raw["cost"]),
            )
        except InvariantError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed site entry {raw!r}: {exc}") from exc
        if site_id <= previous_id:
            raise InvariantError(f"site ids must appear in ascending order (saw {site_id} after {previous_id})")
        previous_id = site_id
        sites.append(site)
    return SensorLayout(name=str(name), sites=tuple(sites))


def load_layout(path) -> SensorLayout:
    """Load a layout from a JSON file (see README for the schema)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: not valid JSON: {exc}") from exc
    return layout_from_json_dict(data)


def save_layout(layout: SensorLayout, path) -> None:
    """Write a layout as JSON; load_layout(save_layout(L)) == L."""
    Path(path).write_text(
        json.dumps(layout_to_json_dict(layout), indent=2) + "\n", encoding="utf-8"
    )
