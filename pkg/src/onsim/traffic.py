"""Application sources: G.711 VoIP calls and bulk message transfers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

MEGABYTE = 1 << 20

VOIP_INTERVAL_S = 0.020
VOIP_PAYLOAD_B = 160  # 64 kbps G.711 over 20 ms frames
VOIP_HEADER_B = 40    # RTP/UDP/IPv4


class FlowKind(str, enum.Enum):
    VOIP_G711 = "VOIP_G711"
    BULK = "BULK"


@dataclass
class FlowSpec:
    kind: FlowKind
    src: str
    dst: str
    message_bytes: int = MEGABYTE
    message_count: int = 1
    name: str = ""

    def __post_init__(self):
        self.kind = FlowKind(self.kind)
        if self.kind is FlowKind.BULK and self.message_bytes <= 0:
            raise ValueError("bulk messages need a positive size")
        if self.message_count < 0:
            raise ValueError("message_count must be non-negative")
        if not self.name:
            self.name = f"{self.kind.value.lower()}:{self.src}-{self.dst}"

    @property
    def packet_bytes(self) -> int:
        if self.kind is FlowKind.VOIP_G711:
            return VOIP_PAYLOAD_B + VOIP_HEADER_B
        return self.message_bytes

    @property
    def wire_rate_bps(self) -> float:
        if self.kind is FlowKind.VOIP_G711:
            return 8 * self.packet_bytes / VOIP_INTERVAL_S
        return 0.0


@dataclass
class PacketRecord:
    flow: str
    seq: int
    src: str
    dst: str
    size_b: int
    created_at: float
    delivered_at: Optional[float] = None
    path: list = field(default_factory=list)
    fate: str = "pending"
    drop_reason: str = ""
    retries: int = 0

    @property
    def delay_s(self) -> Optional[float]:
        if self.delivered_at is None:
            return None
        return self.delivered_at - self.created_at

    @property
    def hops(self) -> int:
        return max(len(self.path) - 1, 0)

    def deliver(self, t: float) -> None:
        if t < self.created_at:
            raise ValueError("delivery before creation")
        self.delivered_at = t
        self.fate = "delivered"

    def drop(self, reason: str) -> None:
        self.fate = "dropped"
        self.drop_reason = reason


def voip_send_times(horizon: float) -> list[float]:
    if horizon <= 0:
        return []
    n = math.ceil(horizon / VOIP_INTERVAL_S - 1e-9)
    return [k * VOIP_INTERVAL_S for k in range(n)]


def emit_voip(flow: FlowSpec, horizon: float) -> list[PacketRecord]:
    """Both directions of one call: src -> dst and dst -> src, one 200 B
    packet every 20 ms on [0, horizon)."""
    if flow.kind is not FlowKind.VOIP_G711:
        raise ValueError("emit_voip needs a VOIP_G711 flow")
    pkts = []
    for direction, (a, b) in (("up", (flow.src, flow.dst)), ("down", (flow.dst, flow.src))):
        name = f"{flow.name}/{direction}"
        for seq, t in enumerate(voip_send_times(horizon)):
            pkts.append(PacketRecord(name, seq, a, b, flow.packet_bytes, t))
    pkts.sort(key=lambda p: (p.created_at, p.flow))
    return pkts


def emit_bulk(flow: FlowSpec) -> list[PacketRecord]:
    if flow.kind is not FlowKind.BULK:
        raise ValueError("emit_bulk needs a BULK flow")
    return [PacketRecord(flow.name, seq, flow.src, flow.dst, flow.message_bytes, 0.0)
            for seq in range(flow.message_count)]


def emit(flow: FlowSpec, horizon: float) -> list[PacketRecord]:
    return emit_voip(flow, horizon) if flow.kind is FlowKind.VOIP_G711 else emit_bulk(flow)


def flow_accounting(records) -> dict:
    """Per-flow sent/delivered/dropped counts and byte totals."""
    out: dict = {}
    for r in records:
        row = out.setdefault(r.flow, {"sent": 0, "delivered": 0, "dropped": 0,
                                      "sent_bytes": 0, "delivered_bytes": 0})
        row["sent"] += 1
        row["sent_bytes"] += r.size_b
        if r.fate == "delivered":
            row["delivered"] += 1
            row["delivered_bytes"] += r.size_b
        elif r.fate == "dropped":
            row["dropped"] += 1
    return out
