import pytest
from hypothesis import given, settings, strategies as st

from onsim.traffic import (MEGABYTE, FlowKind, FlowSpec, PacketRecord, emit, emit_bulk, emit_voip,
                           flow_accounting, voip_send_times)


def test_voip_packet_size_and_rate():
    f = FlowSpec(FlowKind.VOIP_G711, "c1", "core")
    assert f.packet_bytes == 200
    # 200 B every 20 ms is 80 kbps on the wire, per direction
    assert f.wire_rate_bps == pytest.approx(80_000.0)


def test_voip_call_has_both_directions_every_20ms():
    pkts = emit_voip(FlowSpec(FlowKind.VOIP_G711, "c1", "core"), 1.0)
    up = [p for p in pkts if p.flow.endswith("/up")]
    down = [p for p in pkts if p.flow.endswith("/down")]
    assert len(up) == len(down) == 50
    assert all(p.src == "c1" and p.dst == "core" for p in up)
    assert all(p.src == "core" and p.dst == "c1" for p in down)
    gaps = [b.created_at - a.created_at for a, b in zip(up, up[1:])]
    assert gaps == pytest.approx([0.020] * 49)
    assert up[0].created_at == 0.0 and up[-1].created_at < 1.0


def test_bulk_messages():
    f = FlowSpec(FlowKind.BULK, "n1", "core", message_count=2)
    pkts = emit_bulk(f)
    assert [p.size_b for p in pkts] == [MEGABYTE, MEGABYTE]
    assert [p.seq for p in pkts] == [0, 1]
    with pytest.raises(ValueError):
        emit_voip(f, 1.0)
    with pytest.raises(ValueError):
        FlowSpec(FlowKind.BULK, "n1", "core", message_bytes=0)


def test_zero_horizon_emits_nothing():
    assert voip_send_times(0.0) == []
    assert emit(FlowSpec(FlowKind.VOIP_G711, "a", "core"), 0.0) == []


def test_record_fates():
    p = PacketRecord("f", 0, "a", "b", 200, 1.0)
    assert p.delay_s is None and p.fate == "pending"
    p.path = ["a", "x", "b"]
    p.deliver(1.25)
    assert p.delay_s == pytest.approx(0.25) and p.hops == 2
    q = PacketRecord("f", 1, "a", "b", 200, 1.0)
    with pytest.raises(ValueError):
        q.deliver(0.5)
    q.drop("stale_route")
    assert q.fate == "dropped" and q.drop_reason == "stale_route"


@settings(max_examples=50, deadline=None)
@given(st.floats(0.001, 30.0), st.lists(st.sampled_from(["delivered", "dropped", "pending"]),
                                        max_size=200))
def test_accounting_conserves_packets(horizon, fates):
    pkts = emit_voip(FlowSpec(FlowKind.VOIP_G711, "c", "core"), horizon)
    for p, fate in zip(pkts, fates):
        if fate == "delivered":
            p.deliver(p.created_at + 0.01)
        elif fate == "dropped":
            p.drop("x")
    acc = flow_accounting(pkts)
    for row in acc.values():
        assert row["delivered"] + row["dropped"] <= row["sent"]
        assert row["sent_bytes"] == 200 * row["sent"]
    assert sum(r["sent"] for r in acc.values()) == len(pkts)
