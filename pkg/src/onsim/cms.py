"""Cognitive management: context acquisition, policy evaluation, profiles,
the knowledge base, and the CPC/CCR control channels."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional

from .radio import InterfaceKind, RadioEnvironment

CONTROL_LATENCY_S = 0.010
VOIP_MAX_DELAY_S = 0.150


class MissingProfile(KeyError):
    pass


class ControlUnreachable(RuntimeError):
    pass


class TriggerKind(str, enum.Enum):
    COVERAGE_GAP = "CoverageGap"
    POOR_CHANNEL = "PoorChannel"
    # identifiers kept for the remaining ON scenarios; no predicate fires them
    CONGESTION = "Congestion"
    COMMON_INTEREST = "CommonInterest"
    BACKHAUL_LIMIT = "BackhaulLimit"


RESERVED_TRIGGERS = {TriggerKind.CONGESTION, TriggerKind.COMMON_INTEREST,
                     TriggerKind.BACKHAUL_LIMIT}


@dataclass(frozen=True)
class Trigger:
    kind: TriggerKind
    subjects: tuple
    detected_at: float
    policy: str = ""


# -- context ---------------------------------------------------------------

@dataclass
class NodeContext:
    in_coverage: bool
    serving_rate_bps: float
    neighbors: dict
    offered_load_bps: float = 0.0
    mobility_level: int = 0
    is_ap: bool = False


@dataclass
class ContextSnapshot:
    timestamp: float
    phase_index: int
    mobility_level: int
    ap: Optional[str]
    nodes: dict = field(default_factory=dict)

    def terminals(self) -> list[str]:
        return sorted(n for n, c in self.nodes.items() if not c.is_ap)

    def loaded(self) -> list[str]:
        return [n for n in self.terminals() if self.nodes[n].offered_load_bps > 0]


def acquire_context(radio: RadioEnvironment, ap: Optional[str], t: float, loads: dict = None,
                    phase_index: int = 1, mobility_level: int = 0) -> ContextSnapshot:
    loads = loads or {}
    snap = ContextSnapshot(t, phase_index, mobility_level, ap)
    if not radio.nodes:
        return snap
    terminals = sorted(n for n, node in radio.nodes.items() if not node.is_ap)
    for n in terminals:
        node = radio.nodes[n]
        covered = ap is not None and radio.in_coverage(n, ap, t, potential=True)
        rate = 0.0
        if covered:
            kind = radio.nodes[ap].infra_kind
            rate = radio.hop_rate(n, ap) if node.iface(kind) is not None else 0.0
        neigh = {}
        if node.iface(InterfaceKind.WLAN_G) is not None:
            for m in terminals:
                if m != n and radio.nodes[m].iface(InterfaceKind.WLAN_G) is not None \
                        and radio.link_feasible(n, m, InterfaceKind.WLAN_G, t, potential=True):
                    neigh[m] = radio.hop_rate(n, m)
        snap.nodes[n] = NodeContext(covered, rate, neigh, loads.get(n, 0.0), mobility_level)
    if ap is not None:
        snap.nodes[ap] = NodeContext(True, 0.0, {}, 0.0, 0, is_ap=True)
    return snap


# -- policies --------------------------------------------------------------

@dataclass
class Policy:
    name: str
    trigger: TriggerKind
    rate_threshold_bps: Optional[float] = None
    qos_weight: float = 1.0
    power_weight: float = 0.0
    max_hops: int = 8
    max_participants: int = 12

    def __post_init__(self):
        self.trigger = TriggerKind(self.trigger)
        if self.qos_weight < 0 or self.power_weight < 0:
            raise ValueError("objective weights must be non-negative")
        if self.qos_weight == 0 and self.power_weight == 0:
            raise ValueError("at least one objective weight must be positive")
        if self.trigger is TriggerKind.POOR_CHANNEL and not self.rate_threshold_bps:
            raise ValueError("a poor-channel policy needs rate_threshold_bps")

    def subjects(self, snap: ContextSnapshot) -> tuple:
        if self.trigger is TriggerKind.COVERAGE_GAP:
            return tuple(n for n in snap.loaded() if not snap.nodes[n].in_coverage)
        if self.trigger is TriggerKind.POOR_CHANNEL:
            return tuple(n for n in snap.loaded()
                         if snap.nodes[n].in_coverage
                         and snap.nodes[n].serving_rate_bps < self.rate_threshold_bps)
        return ()


def evaluate_policies(snap: ContextSnapshot, policies: list) -> list:
    if not policies:
        raise ValueError("no policies to evaluate")
    out = []
    for p in policies:
        subj = p.subjects(snap)
        if subj:
            out.append(Trigger(p.trigger, subj, snap.timestamp, p.name))
    return out


# -- profiles --------------------------------------------------------------

@dataclass(frozen=True)
class AppProfile:
    max_delay_s: float
    min_rate_bps: float = 0.0

    def __post_init__(self):
        if self.max_delay_s <= 0:
            raise ValueError("max delay must be positive")


@dataclass(frozen=True)
class UserProfile:
    willing_to_relay: bool = True
    accepts_invitations: bool = True


@dataclass(frozen=True)
class DeviceProfile:
    interfaces: tuple
    battery_class: str = "normal"

    def __post_init__(self):
        if not self.interfaces:
            raise ValueError("a device needs at least one interface")


@dataclass(frozen=True)
class Requirements:
    max_delay_s: float
    min_rate_bps: float
    willing_to_relay: bool
    relay_over_wlan: bool
    accepts_invitations: bool = True


DEFAULT_APPS = {
    "voip": AppProfile(VOIP_MAX_DELAY_S, 64_000.0),
    "bulk": AppProfile(60.0, 0.0),
}


class ProfileRegistry:
    def __init__(self, apps: dict = None):
        self.apps = dict(DEFAULT_APPS if apps is None else apps)
        self.users: dict = {}
        self.devices: dict = {}

    def register(self, node: str, device: DeviceProfile, user: UserProfile = None) -> None:
        self.devices[node] = device
        self.users[node] = user or UserProfile()

    def match_profile(self, node: str, app: str) -> Requirements:
        if app not in self.apps:
            raise MissingProfile(f"no application profile {app!r}")
        if node not in self.devices:
            raise MissingProfile(f"no device profile for {node!r}")
        a, u, d = self.apps[app], self.users[node], self.devices[node]
        wlan = InterfaceKind.WLAN_G in tuple(InterfaceKind(k) for k in d.interfaces)
        return Requirements(a.max_delay_s, a.min_rate_bps, u.willing_to_relay,
                            u.willing_to_relay and wlan, u.accepts_invitations)


# -- knowledge -------------------------------------------------------------

@dataclass(frozen=True)
class Outcome:
    delay_s: Optional[float]
    power_mw: Optional[float]
    success: bool


@dataclass
class KnowledgeRecord:
    signature: tuple
    decision: dict
    outcome: Outcome
    hit_count: int = 0


def context_signature(snap: ContextSnapshot, rate_threshold_bps: float = 1e6) -> tuple:
    loaded = snap.loaded()
    gaps = sum(1 for n in loaded if not snap.nodes[n].in_coverage)
    poor = sum(1 for n in loaded if snap.nodes[n].in_coverage
               and snap.nodes[n].serving_rate_bps < rate_threshold_bps)
    return (snap.phase_index, gaps, poor, snap.mobility_level)


class KnowledgeBase:
    """Signature-keyed decision cache; the latest outcome for a signature wins."""

    def __init__(self):
        self.records: dict = {}

    def learn(self, record: KnowledgeRecord) -> None:
        old = self.records.get(record.signature)
        if old is not None:
            record = replace(record, hit_count=old.hit_count)
        self.records[record.signature] = record

    def lookup(self, signature: tuple) -> Optional[KnowledgeRecord]:
        rec = self.records.get(signature)
        if rec is not None:
            rec.hit_count += 1
        return rec

    def rows(self) -> list[dict]:
        rows = []
        for sig in sorted(self.records):
            r = self.records[sig]
            rows.append({
                "signature": "/".join(str(s) for s in sig),
                "decision": f"gw={r.decision.get('gateway')};"
                            f"participants={'+'.join(r.decision.get('participants', ()))}",
                "outcome": "success" if r.outcome.success else "failure",
                "delay_s": "" if r.outcome.delay_s is None else f"{r.outcome.delay_s:.6f}",
                "power_mw": "" if r.outcome.power_mw is None else f"{r.outcome.power_mw:.3f}",
                "hit_count": r.hit_count,
            })
        return rows


# -- control channels ------------------------------------------------------

@dataclass(frozen=True)
class CpcInfo:
    policies: tuple
    allowed_kinds: tuple
    phase_index: int


@dataclass(frozen=True)
class CcrMsg:
    kind: str  # context | invite | accept | reject
    on_id: int = -1
    payload: tuple = ()


class ControlChannel:
    """Logical, lossless control plane with a fixed one-way latency.

    CPC is a broadcast from the AP to every terminal in its coverage. CCR is
    terminal to terminal, over a direct WLAN link or relayed by the
    infrastructure when both ends are covered.
    """

    def __init__(self, kernel, radio: RadioEnvironment, ap: Optional[str],
                 latency_s: float = CONTROL_LATENCY_S):
        self.kernel = kernel
        self.radio = radio
        self.ap = ap
        self.latency_s = latency_s
        self.log: list = []
        self.inbox: dict = {}

    def _deliver(self, ev):
        to, msg = ev.data["to"], ev.data["msg"]
        self.inbox.setdefault(to, []).append((ev.fire_at, ev.data["sender"], msg))
        cb = ev.data.get("callback")
        if cb is not None:
            cb(ev)

    def cpc_broadcast(self, sender: str, info: CpcInfo, t: float, callback=None) -> list:
        if sender != self.ap or not self.radio.node(sender).is_ap:
            raise ValueError("CPC information originates only at the AP")
        receivers = [n for n in sorted(self.radio.nodes)
                     if n != sender and self.radio.in_coverage(n, sender, t)]
        self.log.append((t, "CPC", sender, tuple(receivers), info))
        for n in receivers:
            self.kernel.schedule(t + self.latency_s, "cpc", self._deliver,
                                 label=f"{sender}>{n} phase={info.phase_index}",
                                 to=n, sender=sender, msg=info, callback=callback)
        return receivers

    def reachable(self, frm: str, to: str, t: float) -> bool:
        if self.radio.link_feasible(frm, to, InterfaceKind.WLAN_G, t, potential=True):
            return True
        return self.ap is not None and self.radio.in_coverage(frm, self.ap, t) \
            and self.radio.in_coverage(to, self.ap, t)

    def ccr_send(self, frm: str, to: str, msg: CcrMsg, t: float, callback=None):
        if self.radio.node(frm).is_ap or self.radio.node(to).is_ap:
            raise ValueError("CCR runs between terminals only")
        if not self.reachable(frm, to, t):
            raise ControlUnreachable(f"{frm} cannot reach {to} at t={t}")
        self.log.append((t, "CCR", frm, (to,), msg))
        return self.kernel.schedule(t + self.latency_s, "ccr", self._deliver,
                                    label=f"{frm}>{to} {msg.kind} on={msg.on_id}",
                                    to=to, sender=frm, msg=msg, callback=callback)
