"""Radio interfaces, power phases, disc coverage and transmit-power accounting."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .mobility import MobilityModel, UnknownNode

DEFAULT_ALPHA = 3.0
WLAN_G_MAX_RATE = 54e6


class ZeroRate(ValueError):
    pass


class InterfaceKind(str, enum.Enum):
    WLAN_G = "WLAN_G"
    CELL_3G = "CELL_3G"


class Role(str, enum.Enum):
    AP = "ap"
    CONSUMER = "consumer"
    RELAY = "relay"
    TERMINAL = "terminal"


@dataclass
class RadioInterface:
    kind: InterfaceKind
    nominal_power_w: float
    rate_bps: float
    nominal_range_m: float
    power_fraction: float = 1.0
    active: bool = True

    def __post_init__(self):
        self.kind = InterfaceKind(self.kind)
        if not 0 < self.power_fraction <= 1:
            raise ValueError("power_fraction must lie in (0, 1]")
        if self.nominal_power_w <= 0 or self.rate_bps <= 0 or self.nominal_range_m <= 0:
            raise ValueError("power, rate and range must be positive")
        if self.kind is InterfaceKind.WLAN_G and self.rate_bps > WLAN_G_MAX_RATE:
            raise ValueError("802.11g tops out at 54 Mbps")

    @property
    def effective_power_w(self) -> float:
        return self.nominal_power_w * self.power_fraction


def coverage_range(iface: RadioInterface, alpha: float = DEFAULT_ALPHA) -> float:
    """Disc radius after scaling transmit power: received power falls as d**-alpha,
    so holding the receiver threshold fixed gives r = r0 * fraction**(1/alpha)."""
    if alpha <= 0:
        raise ValueError("path-loss exponent must be positive")
    return iface.nominal_range_m * iface.power_fraction ** (1.0 / alpha)


def transfer_time(nbytes: float, rate_bps: float) -> float:
    if rate_bps <= 0:
        raise ZeroRate(f"rate must be positive, got {rate_bps}")
    return 8.0 * nbytes / rate_bps


@dataclass
class Node:
    node_id: str
    role: Role
    interfaces: dict = field(default_factory=dict)

    def __post_init__(self):
        self.role = Role(self.role)

    @property
    def is_ap(self) -> bool:
        return self.role is Role.AP

    def iface(self, kind) -> Optional[RadioInterface]:
        return self.interfaces.get(InterfaceKind(kind))

    def active_iface(self, kind) -> Optional[RadioInterface]:
        i = self.iface(kind)
        return i if i is not None and i.active else None

    @property
    def infra_kind(self) -> InterfaceKind:
        # an AP serves on its first configured interface
        return next(iter(self.interfaces))


@dataclass(frozen=True)
class PowerPhase:
    phase_index: int
    ap_fraction: float
    mt_fraction: float

    @property
    def ap_range_label(self) -> str:
        return {1.0: "R0", 0.8: "R1", 0.6: "R2"}[self.ap_fraction]

    @property
    def mt_range_label(self) -> str:
        return {1.0: "T0", 0.6: "T1"}[self.mt_fraction]


PHASES = (
    PowerPhase(1, 1.0, 1.0),
    PowerPhase(2, 0.8, 1.0),
    PowerPhase(3, 0.6, 1.0),
    PowerPhase(4, 0.6, 0.6),
)


def phase(index: int) -> PowerPhase:
    if not 1 <= index <= len(PHASES):
        raise ValueError(f"no power phase {index}")
    return PHASES[index - 1]


def apply_power_phase(nodes: Iterable[Node], ph: PowerPhase) -> None:
    """Set WLAN power fractions on the AP and every terminal. Ranges follow
    from coverage_range, so nothing else needs updating."""
    for n in nodes:
        i = n.iface(InterfaceKind.WLAN_G)
        if i is None:
            continue
        i.power_fraction = ph.ap_fraction if n.is_ap else ph.mt_fraction


@dataclass
class PowerReport:
    total_power_mw: float
    per_node_mw: dict
    baseline_mw: Optional[float] = None

    @property
    def reduction_pct(self) -> Optional[float]:
        if not self.baseline_mw:
            return None
        return 100.0 * (self.baseline_mw - self.total_power_mw) / self.baseline_mw


def total_power(nodes: Iterable[Node], ph: Optional[PowerPhase] = None,
                baseline_mw: Optional[float] = None) -> PowerReport:
    """Sum of effective transmit power over active interfaces, in mW.

    With ``ph`` the phase's WLAN fractions are used instead of the ones stored
    on the interfaces (the nodes are not modified).
    """
    per_node = {}
    for n in nodes:
        mw = 0.0
        for i in n.interfaces.values():
            if not i.active:
                continue
            frac = i.power_fraction
            if ph is not None and i.kind is InterfaceKind.WLAN_G:
                frac = ph.ap_fraction if n.is_ap else ph.mt_fraction
            mw += 1000.0 * i.nominal_power_w * frac
        per_node[n.node_id] = mw
    return PowerReport(math.fsum(per_node.values()), per_node, baseline_mw)


class RadioEnvironment:
    """Link feasibility over the disc model.

    Terminal-to-terminal links need both ends to reach each other, so the
    shorter of the two ranges applies. A link to the AP is governed by the
    AP's own coverage disc.
    """

    def __init__(self, nodes: dict, mobility: MobilityModel, alpha: float = DEFAULT_ALPHA):
        if alpha <= 0:
            raise ValueError("path-loss exponent must be positive")
        self.nodes = nodes
        self.mobility = mobility
        self.alpha = alpha

    def node(self, node_id: str) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def range_of(self, node_id: str, kind) -> float:
        i = self.node(node_id).active_iface(kind)
        return coverage_range(i, self.alpha) if i is not None else 0.0

    def distance(self, a: str, b: str, t: float) -> float:
        return self.mobility.position_at(a, t).distance(self.mobility.position_at(b, t))

    def link_range(self, a: str, b: str, kind, potential: bool = False) -> float:
        """``potential`` ignores whether the interfaces are switched on, which is
        what the CMS needs when it plans links an ON would activate."""
        na, nb = self.node(a), self.node(b)
        if potential:
            ia, ib = na.iface(kind), nb.iface(kind)
        else:
            ia, ib = na.active_iface(kind), nb.active_iface(kind)
        if ia is None or ib is None:
            return 0.0
        if na.is_ap != nb.is_ap:
            return coverage_range(ia if na.is_ap else ib, self.alpha)
        return min(coverage_range(ia, self.alpha), coverage_range(ib, self.alpha))

    def link_feasible(self, a: str, b: str, kind, t: float, potential: bool = False) -> bool:
        if a == b:
            self.node(a)
            return True
        r = self.link_range(a, b, kind, potential)
        return r > 0 and self.distance(a, b, t) <= r

    def hop_kind(self, a: str, b: str) -> InterfaceKind:
        na, nb = self.node(a), self.node(b)
        if na.is_ap:
            return na.infra_kind
        if nb.is_ap:
            return nb.infra_kind
        return InterfaceKind.WLAN_G

    def hop_rate(self, a: str, b: str) -> float:
        kind = self.hop_kind(a, b)
        ia, ib = self.node(a).iface(kind), self.node(b).iface(kind)
        return min(ia.rate_bps, ib.rate_bps)

    def in_coverage(self, node_id: str, ap_id: str, t: float, potential: bool = False) -> bool:
        kind = self.node(ap_id).infra_kind
        return self.link_feasible(node_id, ap_id, kind, t, potential)
