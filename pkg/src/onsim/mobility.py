"""Random waypoint motion for the intermediate terminals.

Static nodes (the AP, and by default the application consumers) keep their
configured position for the whole run.
"""

from __future__ import annotations

import bisect
import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

DEFAULT_LEVEL_SPEEDS = (0.0, 0.5, 1.5, 3.0, 6.0, 10.0, 15.0)


class UnknownNode(KeyError):
    pass


class Position(NamedTuple):
    x: float
    y: float

    def distance(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Rect:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate domain {self}")

    @classmethod
    def centered(cls, width: float, height: float, cx: float = 0.0, cy: float = 0.0) -> "Rect":
        return cls(cx - width / 2, cy - height / 2, cx + width / 2, cy + height / 2)

    def contains(self, p: Position, eps: float = 1e-9) -> bool:
        return (self.xmin - eps <= p.x <= self.xmax + eps
                and self.ymin - eps <= p.y <= self.ymax + eps)

    def clamp(self, p: Position) -> Position:
        return Position(min(max(p.x, self.xmin), self.xmax), min(max(p.y, self.ymin), self.ymax))

    def sample(self, rng: random.Random) -> Position:
        return Position(rng.uniform(self.xmin, self.xmax), rng.uniform(self.ymin, self.ymax))


@dataclass
class MobilityConfig:
    domain: Rect = field(default_factory=lambda: Rect.centered(300.0, 300.0))
    level_speeds: tuple = DEFAULT_LEVEL_SPEEDS
    pause_s: float = 1.0

    def __post_init__(self):
        speeds = tuple(float(s) for s in self.level_speeds)
        if len(speeds) != 7:
            raise ValueError("exactly 7 mobility levels are expected")
        if any(s < 0 for s in speeds) or list(speeds) != sorted(speeds):
            raise ValueError("level speeds must be non-negative and ascending")
        if self.pause_s < 0:
            raise ValueError("pause_s must be non-negative")
        self.level_speeds = speeds

    def speed(self, level: int) -> float:
        return self.level_speeds[level]


@dataclass(frozen=True)
class WaypointLeg:
    origin: Position
    target: Position
    speed: float
    depart_at: float
    arrive_at: float

    def position(self, t: float) -> Position:
        if t <= self.depart_at or self.arrive_at <= self.depart_at:
            return self.origin if t <= self.depart_at else self.target
        if t >= self.arrive_at:
            return self.target
        f = (t - self.depart_at) / (self.arrive_at - self.depart_at)
        return Position(self.origin.x + f * (self.target.x - self.origin.x),
                        self.origin.y + f * (self.target.y - self.origin.y))


def next_leg(origin: Position, now: float, v_max: float, domain: Rect,
             rng: random.Random) -> WaypointLeg:
    if v_max <= 0:
        return WaypointLeg(origin, origin, 0.0, now, now)
    target = domain.sample(rng)
    # 1 - random() lies in (0, 1], so the speed never hits zero
    speed = v_max * (1.0 - rng.random())
    return WaypointLeg(origin, target, speed, now, now + origin.distance(target) / speed)


class _Track:
    def __init__(self, start: Position, v_max: float, cfg: MobilityConfig, rng: random.Random,
                 area: Rect):
        self.v_max = v_max
        self.cfg = cfg
        self.rng = rng
        self.area = area
        self.legs: list[WaypointLeg] = [next_leg(start, 0.0, v_max, area, rng)]
        self.departs: list[float] = [0.0]

    def _extend(self, t: float):
        if self.v_max <= 0:
            return
        while self.legs[-1].arrive_at + self.cfg.pause_s <= t:
            last = self.legs[-1]
            leg = next_leg(last.target, last.arrive_at + self.cfg.pause_s, self.v_max,
                           self.area, self.rng)
            self.legs.append(leg)
            self.departs.append(leg.depart_at)

    def position(self, t: float) -> Position:
        self._extend(t)
        i = bisect.bisect_right(self.departs, t) - 1
        return self.legs[max(i, 0)].position(t)

    def legs_until(self, t: float) -> list[WaypointLeg]:
        self._extend(t)
        return [leg for leg in self.legs if leg.depart_at <= t]


class MobilityModel:
    """Positions of every node over time.

    Each mobile node draws from its own stream so adding a node never shifts
    the trajectories of the others.
    """

    def __init__(self, cfg: MobilityConfig, level: int = 0):
        self.cfg = cfg
        self.level = level
        self._static: dict[str, Position] = {}
        self._tracks: dict[str, _Track] = {}

    @property
    def v_max(self) -> float:
        return self.cfg.speed(self.level)

    def add_static(self, node: str, pos) -> None:
        self._static[node] = Position(*pos)

    def add_mobile(self, node: str, start, rng: random.Random, area: Optional[Rect] = None) -> None:
        """``area`` confines the node to a sub-rectangle of the domain."""
        start = Position(*start)
        dom = self.cfg.domain
        if area is None:
            area = dom
        elif not (dom.contains(Position(area.xmin, area.ymin))
                and dom.contains(Position(area.xmax, area.ymax))):
            raise ValueError(f"{node}: roaming area must lie inside the mobility domain")
        if not area.contains(start):
            raise ValueError(f"{node} starts outside its mobility area")
        self._tracks[node] = _Track(start, self.v_max, self.cfg, rng, area)

    def is_mobile(self, node: str) -> bool:
        return node in self._tracks

    def nodes(self) -> list[str]:
        return sorted(list(self._static) + list(self._tracks))

    def position_at(self, node: str, t: float) -> Position:
        if node in self._static:
            return self._static[node]
        track = self._tracks.get(node)
        if track is None:
            raise UnknownNode(node)
        return track.position(t)

    def legs(self, node: str, until: float) -> list[WaypointLeg]:
        if node not in self._tracks:
            raise UnknownNode(node)
        return self._tracks[node].legs_until(until)
