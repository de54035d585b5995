import pytest

from onsim.config import bundled, from_dict
from onsim.engine import Simulation, simulate
from onsim.radio import transfer_time
from onsim.traffic import MEGABYTE, flow_accounting

from conftest import small_raw


def _relocate(sim, node, pos, at):
    sim.kernel.schedule(at, "script", lambda ev: sim.mobility.add_static(node, pos),
                        label=f"move {node}")


def test_direct_delivery_when_covered():
    r = simulate(from_dict(small_raw(phases=[[0.0, 1]])), seed=1)
    assert r.ons == []
    d = [p.delay_s for p in r.records]
    # one hop at 54 Mbps plus 0.5 ms overhead
    assert d[0] == pytest.approx(0.0005 + transfer_time(200, 54e6))
    assert all(p.fate == "delivered" and p.hops == 1 for p in r.records)


def test_coverage_gap_forms_a_relay_on(small_cfg):
    r = simulate(small_cfg, seed=1)
    assert len(r.ons) == 1
    on = r.ons[0]
    assert on.gateway == "ma" and on.participants == ("c1", "ma")
    # CPC 10 ms, then invite + accept for c1
    assert on.created_at == pytest.approx(0.030)
    assert {p.hops for p in r.records if p.fate == "delivered"} == {2}
    first = min((p for p in r.records if p.fate == "delivered"), key=lambda p: p.created_at)
    # buffered until activation, then a two-hop discovery
    assert first.delivered_at >= 0.030 + 2 * 0.030


def test_every_packet_is_accounted_for(small_cfg):
    r = simulate(small_cfg, seed=3)
    for row in flow_accounting(r.records).values():
        assert row["delivered"] + row["dropped"] == row["sent"]


def test_reactive_break_is_repaired_and_packet_still_delivered(small_cfg):
    sim = Simulation(small_cfg, seed=1)
    _relocate(sim, "ma", (-140.0, 0.0), 1.0)
    r = sim.run()
    kinds = r.trace.kinds()
    assert "rerr" in kinds
    hit = [p for p in r.records if p.retries > 0]
    assert hit and all(p.fate == "delivered" for p in hit)
    assert min(p.delay_s for p in hit) >= small_cfg.timers.break_detect_s
    assert any(o.gateway == "mb" for o in r.ons)
    assert all(p.fate == "delivered" for p in r.records)


def test_proactive_break_drops_until_tables_refresh():
    cfg = from_dict(small_raw(protocol="proactive"))
    sim = Simulation(cfg, seed=1)
    _relocate(sim, "ma", (-140.0, 0.0), 1.0)
    r = sim.run()
    stale = [p for p in r.records if p.drop_reason == "stale_route"]
    assert stale
    assert all(p.created_at >= 1.0 - 0.01 for p in stale)
    assert sum(p.fate == "delivered" for p in r.records) > len(r.records) // 2


def test_cpc_messages_only_come_from_the_ap(small_cfg):
    r = simulate(small_cfg, seed=1)
    senders = {e[2] for e in r.control_log if e[1] == "CPC"}
    assert senders == {"ap"}
    ccr = [e for e in r.control_log if e[1] == "CCR"]
    assert ccr and all(e[2] != "ap" for e in ccr)


def test_same_context_twice_reuses_the_knowledge_base():
    cfg = from_dict(small_raw(horizon_s=30.0, phases=[[0.0, 3], [10.0, 1], [20.0, 3]]))
    r = simulate(cfg, seed=1)
    forms = [d for d in r.decisions if d[2] == "form"]
    assert len(forms) == 2
    assert forms[0][3] > 0 and not forms[0][4]
    assert forms[1][3] == 0 and forms[1][4]
    first, second = r.ons
    assert second.same_decision(first)
    assert r.knowledge.rows()[0]["hit_count"] >= 1


def test_maintenance_checks_hold_on_static_topology():
    cfg = from_dict(small_raw(horizon_s=10.0))
    r = simulate(cfg, seed=1)
    assert r.maintenance_checks and all(ok for _, _, ok in r.maintenance_checks)


def test_unwilling_relays_block_formation():
    raw = small_raw()
    for n in raw["nodes"][2:]:
        n["willing_to_relay"] = False
    r = simulate(from_dict(raw), seed=1)
    assert r.ons == []
    assert {d[2] for d in r.decisions} == {"no_candidate"}
    assert all(p.fate == "dropped" for p in r.records)


def test_refused_invitation_fails_formation():
    raw = small_raw()
    raw["nodes"][1]["accepts_invitations"] = False
    r = simulate(from_dict(raw), seed=1)
    assert r.ons and all(o.created_at is None for o in r.ons)
    assert {o.outcome for o in r.ons} <= {"formation_failed", "end_of_run"}
    assert r.ons[0].outcome == "formation_failed"


def test_bulk_aggregation_latencies():
    cfg = bundled("scenario2")
    direct = simulate(cfg.with_overrides(cms_enabled=False), seed=1)
    lat = sorted(p.delay_s for p in direct.records)
    slow, fast = transfer_time(MEGABYTE, 0.5e6), transfer_time(MEGABYTE, 5e6)
    assert lat[0] == pytest.approx(fast, abs=1e-3)
    assert lat[1:] == pytest.approx([slow] * 3, abs=1e-3)
    on = simulate(cfg, seed=1)
    assert len(on.ons) == 1 and on.ons[0].gateway == "n4"
    assert sum(p.delay_s for p in on.records) / 4 < 4.5


def test_power_timeline_follows_interface_changes():
    cfg = bundled("scenario2")
    r = simulate(cfg, seed=1)
    powers = [p for _, p in r.power_timeline]
    assert powers[0] == pytest.approx(530.0)
    # subjects drop their cellular uplink, everyone brings up WLAN
    assert min(powers) == pytest.approx(125.0 + 30.0 + 4 * 20.0)
    assert r.avg_power_mw < 530.0
