"""Scenario configuration: YAML on disk, validated against a JSON schema that
rejects unknown keys, then turned into plain dataclasses."""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import yaml

from .cms import AppProfile, Policy
from .mobility import DEFAULT_LEVEL_SPEEDS, MobilityConfig, Rect
from .radio import DEFAULT_ALPHA, InterfaceKind, Node, RadioInterface, Role
from .routing import Protocol, RoutingTimers, parse_protocol
from .traffic import FlowKind, FlowSpec, MEGABYTE

CORE = "core"


class ConfigInvalid(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name", "horizon_s", "nodes", "flows"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "description": {"type": "string"},
        "horizon_s": _pos,
        "drain_s": {"type": "number", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "replications": {"type": "integer", "minimum": 1},
        "alpha": _pos,
        "protocol": {"type": "string"},
        "compare_direct": {"type": "boolean"},
        "report_phases": {"type": "array", "minItems": 1,
                          "items": {"type": "integer", "minimum": 1, "maximum": 4}},
        "delay_threshold_s": _pos,
        "phases": {
            "type": "array", "minItems": 1,
            "items": {"type": "array", "minItems": 2, "maxItems": 2,
                      "prefixItems": [{"type": "number", "minimum": 0},
                                      {"type": "integer", "minimum": 1, "maximum": 4}]},
        },
        "nodes": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object", "additionalProperties": False,
                "required": ["id", "role", "position", "interfaces"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "role": {"enum": [r.value for r in Role]},
                    "position": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                    "mobile": {"type": "boolean"},
                    "area": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4},
                    "willing_to_relay": {"type": "boolean"},
                    "accepts_invitations": {"type": "boolean"},
                    "battery_class": {"type": "string"},
                    "interfaces": {
                        "type": "array", "minItems": 1,
                        "items": {
                            "type": "object", "additionalProperties": False,
                            "required": ["kind", "power_w", "rate_bps", "range_m"],
                            "properties": {
                                "kind": {"enum": [k.value for k in InterfaceKind]},
                                "power_w": _pos, "rate_bps": _pos, "range_m": _pos,
                                "active": {"type": "boolean"},
                            },
                        },
                    },
                },
            },
        },
        "mobility": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "domain": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4},
                "level_speeds": {"type": "array", "items": {"type": "number", "minimum": 0},
                                 "minItems": 7, "maxItems": 7},
                "pause_s": {"type": "number", "minimum": 0},
                "level": {"type": "integer", "minimum": 0, "maximum": 6},
            },
        },
        "routing": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "hello_interval_s": _pos, "topology_interval_s": _pos,
                "discovery_rtt_s_per_hop": _pos, "break_detect_s": _pos,
                "per_hop_overhead_s": _pos, "buffer_timeout_s": _pos,
                "buffer_packets": {"type": "integer", "minimum": 1},
            },
        },
        "flows": {
            "type": "array",
            "items": {
                "type": "object", "additionalProperties": False,
                "required": ["kind", "src", "dst"],
                "properties": {
                    "kind": {"enum": [k.value for k in FlowKind]},
                    "src": {"type": "string"}, "dst": {"type": "string"},
                    "message_bytes": {"type": "integer", "minimum": 1},
                    "message_count": {"type": "integer", "minimum": 0},
                    "app": {"type": "string"},
                },
            },
        },
        "cms": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "enabled": {"type": "boolean"},
                "maintenance_interval_s": _pos,
                "control_latency_s": _pos,
                "apps": {
                    "type": "object",
                    "additionalProperties": {
                        "type": "object", "additionalProperties": False,
                        "required": ["max_delay_s"],
                        "properties": {"max_delay_s": _pos,
                                       "min_rate_bps": {"type": "number", "minimum": 0}},
                    },
                },
                "policies": {
                    "type": "array", "minItems": 1,
                    "items": {
                        "type": "object", "additionalProperties": False,
                        "required": ["name", "trigger"],
                        "properties": {
                            "name": {"type": "string"},
                            "trigger": {"enum": ["CoverageGap", "PoorChannel", "Congestion",
                                                 "CommonInterest", "BackhaulLimit"]},
                            "rate_threshold_bps": _pos,
                            "qos_weight": {"type": "number", "minimum": 0},
                            "power_weight": {"type": "number", "minimum": 0},
                            "max_hops": {"type": "integer", "minimum": 1},
                            "max_participants": {"type": "integer", "minimum": 2},
                        },
                    },
                },
            },
        },
        "reference": {"type": "object"},
    },
}


@dataclass
class NodeSpec:
    id: str
    role: Role
    position: tuple
    interfaces: list
    mobile: bool = False
    willing_to_relay: bool = True
    accepts_invitations: bool = True
    battery_class: str = "normal"
    area: Optional[tuple] = None

    def build(self) -> Node:
        ifaces = {}
        for i in self.interfaces:
            iface = RadioInterface(InterfaceKind(i["kind"]), float(i["power_w"]),
                                   float(i["rate_bps"]), float(i["range_m"]),
                                   active=bool(i.get("active", True)))
            ifaces[iface.kind] = iface
        return Node(self.id, self.role, ifaces)


@dataclass
class CmsConfig:
    enabled: bool = True
    maintenance_interval_s: float = 0.5
    control_latency_s: float = 0.010
    apps: dict = field(default_factory=dict)
    policies: list = field(default_factory=list)


@dataclass
class ScenarioConfig:
    name: str
    horizon_s: float
    nodes: list
    flows: list
    flow_apps: list = field(default_factory=list)
    drain_s: float = 1.0
    seed: int = 1
    replications: int = 10
    alpha: float = DEFAULT_ALPHA
    protocol: Protocol = Protocol.REACTIVE
    compare_direct: bool = False
    delay_threshold_s: float = 0.150
    phases: list = field(default_factory=lambda: [(0.0, 1)])
    # phases `run` simulates one after another, each held fixed from t=0
    report_phases: list = field(default_factory=list)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    level: int = 0
    timers: RoutingTimers = field(default_factory=RoutingTimers)
    buffer_timeout_s: float = 30.0
    buffer_packets: int = 64
    cms: CmsConfig = field(default_factory=CmsConfig)
    reference: dict = field(default_factory=dict)
    source: Optional[str] = None

    def with_overrides(self, **kw) -> "ScenarioConfig":
        """Copy with fields replaced. ``phase`` fixes a single phase from t=0."""
        cfg = copy.deepcopy(self)
        if "phase" in kw:
            cfg.phases = [(0.0, int(kw.pop("phase")))]
        if "protocol" in kw and isinstance(kw["protocol"], str):
            kw["protocol"] = parse_protocol(kw["protocol"])
        if "cms_enabled" in kw:
            cfg.cms.enabled = bool(kw.pop("cms_enabled"))
        return dataclasses.replace(cfg, **kw)

    @property
    def level_speed(self) -> float:
        return self.mobility.speed(self.level)

    @property
    def ap(self) -> Optional[str]:
        aps = [n.id for n in self.nodes if n.role is Role.AP]
        return aps[0] if aps else None

    @property
    def consumers(self) -> list:
        return sorted({f.src if f.dst == CORE else f.dst for f in self.flows
                       if f.kind is FlowKind.VOIP_G711})

    def level_index(self, speed: float) -> int:
        for i, s in enumerate(self.mobility.level_speeds):
            if abs(s - speed) < 1e-9:
                return i
        raise ValueError(f"{speed} m/s is not one of the mobility levels "
                         f"{list(self.mobility.level_speeds)}")


def _semantic_errors(raw: dict) -> list:
    errs = []
    ids = [n["id"] for n in raw["nodes"]]
    if len(ids) != len(set(ids)):
        errs.append("nodes: duplicate node id")
    if CORE in ids:
        errs.append(f"nodes: id {CORE!r} is reserved for the core-network endpoint")
    aps = [n["id"] for n in raw["nodes"] if n["role"] == "ap"]
    if len(aps) != 1:
        errs.append(f"nodes: exactly one ap is required, found {len(aps)}")
    known = set(ids)
    for k, f in enumerate(raw["flows"]):
        for end in ("src", "dst"):
            if f[end] != CORE and f[end] not in known:
                errs.append(f"flows[{k}].{end}: unknown node {f[end]!r}")
        if (f["src"] == CORE) == (f["dst"] == CORE):
            errs.append(f"flows[{k}]: exactly one endpoint must be {CORE!r}")
    for k, n in enumerate(raw["nodes"]):
        kinds = [i["kind"] for i in n["interfaces"]]
        if len(kinds) != len(set(kinds)):
            errs.append(f"nodes[{k}].interfaces: duplicate interface kind")
    dom = raw.get("mobility", {}).get("domain")
    dom = dom or [-150.0, -150.0, 150.0, 150.0]
    for k, n in enumerate(raw["nodes"]):
        box = n.get("area", dom)
        inside = dom[0] <= box[0] < box[2] <= dom[2] and dom[1] <= box[1] < box[3] <= dom[3]
        if not inside:
            errs.append(f"nodes[{k}].area: must be a non-empty rectangle inside the mobility domain")
        elif n.get("mobile") and not (box[0] <= n["position"][0] <= box[2]
                                      and box[1] <= n["position"][1] <= box[3]):
            errs.append(f"nodes[{k}].position: a mobile node must start inside its area")
    if "phases" in raw:
        times = [p[0] for p in raw["phases"]]
        if times != sorted(times):
            errs.append("phases: times must be non-decreasing")
    pol = raw.get("cms", {}).get("policies", [])
    for k, p in enumerate(pol):
        if p["trigger"] == "PoorChannel" and "rate_threshold_bps" not in p:
            errs.append(f"cms.policies[{k}]: PoorChannel needs rate_threshold_bps")
        if p.get("qos_weight", 1.0) == 0 and p.get("power_weight", 0.0) == 0:
            errs.append(f"cms.policies[{k}]: at least one objective weight must be positive")
    if "protocol" in raw:
        try:
            parse_protocol(raw["protocol"])
        except ValueError as e:
            errs.append(f"protocol: {e}")
    return errs


def validate(raw) -> list:
    """Field-level diagnostics; empty list when the document is valid."""
    if not isinstance(raw, dict):
        return ["<root>: expected a mapping"]
    v = jsonschema.Draft202012Validator(SCHEMA)
    errs = []
    for e in sorted(v.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path))):
        where = ".".join(str(p) for p in e.absolute_path) or "<root>"
        errs.append(f"{where}: {e.message}")
    if errs:
        return errs
    errs = _semantic_errors(raw)
    if errs:
        return errs
    try:
        from_dict(raw, check=False)
    except (ValueError, TypeError) as e:
        errs.append(str(e))
    return errs


def from_dict(raw: dict, source: Optional[str] = None, check: bool = True) -> ScenarioConfig:
    if check:
        errs = validate(raw)
        if errs:
            raise ConfigInvalid(errs)
    nodes = [NodeSpec(n["id"], Role(n["role"]), tuple(n["position"]), list(n["interfaces"]),
                      n.get("mobile", False), n.get("willing_to_relay", True),
                      n.get("accepts_invitations", True), n.get("battery_class", "normal"),
                      tuple(n["area"]) if "area" in n else None)
             for n in raw["nodes"]]
    flows, apps = [], []
    for f in raw["flows"]:
        flows.append(FlowSpec(FlowKind(f["kind"]), f["src"], f["dst"],
                              f.get("message_bytes", MEGABYTE), f.get("message_count", 1)))
        apps.append(f.get("app", "voip" if f["kind"] == "VOIP_G711" else "bulk"))
    m = raw.get("mobility", {})
    dom = m.get("domain")
    mob = MobilityConfig(Rect(*dom) if dom else Rect.centered(300.0, 300.0),
                         tuple(m.get("level_speeds", DEFAULT_LEVEL_SPEEDS)),
                         float(m.get("pause_s", 1.0)))
    r = dict(raw.get("routing", {}))
    buf_t = r.pop("buffer_timeout_s", 30.0)
    buf_n = r.pop("buffer_packets", 64)
    c = raw.get("cms", {})
    cms = CmsConfig(
        c.get("enabled", True), c.get("maintenance_interval_s", 0.5),
        c.get("control_latency_s", 0.010),
        {k: AppProfile(v["max_delay_s"], v.get("min_rate_bps", 0.0))
         for k, v in c.get("apps", {}).items()},
        [Policy(p["name"], p["trigger"], p.get("rate_threshold_bps"),
                p.get("qos_weight", 1.0), p.get("power_weight", 0.0),
                p.get("max_hops", 8), p.get("max_participants", 12))
         for p in c.get("policies", [])],
    )
    return ScenarioConfig(
        name=raw["name"], horizon_s=float(raw["horizon_s"]), nodes=nodes, flows=flows,
        flow_apps=apps, drain_s=float(raw.get("drain_s", 1.0)), seed=int(raw.get("seed", 1)),
        replications=int(raw.get("replications", 10)), alpha=float(raw.get("alpha", DEFAULT_ALPHA)),
        protocol=parse_protocol(raw.get("protocol", "reactive")),
        compare_direct=bool(raw.get("compare_direct", False)),
        delay_threshold_s=float(raw.get("delay_threshold_s", 0.150)),
        phases=[(float(t), int(p)) for t, p in raw.get("phases", [[0.0, 1]])],
        report_phases=[int(p) for p in raw.get("report_phases", [])],
        mobility=mob, level=int(m.get("level", 0)), timers=RoutingTimers(**r),
        buffer_timeout_s=float(buf_t), buffer_packets=int(buf_n), cms=cms,
        reference=dict(raw.get("reference", {})), source=source,
    )


def load(path) -> ScenarioConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigInvalid([f"<yaml>: {e}"]) from None
    return from_dict(raw, source=str(path))


def bundled(name: str) -> ScenarioConfig:
    """Load one of the configs shipped with the package, e.g. ``scenario2``."""
    ref = resources.files("onsim") / "data" / f"{name}.yaml"
    with resources.as_file(ref) as p:
        return load(p)


def bundled_names() -> list:
    return sorted(p.name[:-5] for p in (resources.files("onsim") / "data").iterdir()
                  if p.name.endswith(".yaml"))
