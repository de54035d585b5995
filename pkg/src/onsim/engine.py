"""One simulation run: wires kernel, mobility, radio, routing, traffic and the
CMS together and records packets, ON events, power and knowledge."""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from . import lifecycle as lc
from .cms import (CcrMsg, ContextSnapshot, ControlChannel, ControlUnreachable, CpcInfo,
                  DeviceProfile, KnowledgeBase, ProfileRegistry, Trigger, TriggerKind,
                  UserProfile, acquire_context, context_signature, evaluate_policies)
from .config import CORE, ScenarioConfig
from .kernel import Kernel
from .mobility import MobilityModel, Rect
from .radio import InterfaceKind, RadioEnvironment, apply_power_phase, phase, total_power, transfer_time
from .routing import NoRoute, ProactiveRouter, Protocol, ReactiveRouter, build_graph
from .traffic import FlowKind, PacketRecord, emit

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    config: ScenarioConfig
    seed: int
    records: list
    on_log: list
    ons: list
    power_timeline: list
    power_window: tuple
    knowledge: KnowledgeBase
    decisions: list
    digest: str
    trace: object
    control_log: list
    airtime: dict
    overhead_msgs: int
    maintenance_checks: list = field(default_factory=list)
    positions: list = field(default_factory=list)

    @property
    def avg_power_mw(self) -> float:
        t0, t1 = self.power_window
        tl = self.power_timeline
        if t1 <= t0:
            return tl[-1][1]
        acc = 0.0
        for k, (t, p) in enumerate(tl):
            end = tl[k + 1][0] if k + 1 < len(tl) else t1
            a, b = max(t, t0), min(end, t1)
            if b > a:
                acc += p * (b - a)
        return acc / (t1 - t0)


class Simulation:
    def __init__(self, cfg: ScenarioConfig, seed: Optional[int] = None, verbose: bool = False,
                 keep_trace: bool = True):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else int(seed)
        self.verbose = verbose
        self.kernel = Kernel(self.seed, keep_trace=keep_trace)
        self.nodes = {n.id: n.build() for n in cfg.nodes}
        self.ap = cfg.ap
        self.mobility = MobilityModel(cfg.mobility, cfg.level)
        for n in cfg.nodes:
            if n.mobile:
                self.mobility.add_mobile(n.id, n.position, self.kernel.stream(f"mobility/{n.id}"),
                                         Rect(*n.area) if n.area else None)
            else:
                self.mobility.add_static(n.id, n.position)
        self.radio = RadioEnvironment(self.nodes, self.mobility, cfg.alpha)
        self.timers = cfg.timers
        self.protocol = cfg.protocol
        self.reactive = ReactiveRouter(cfg.timers)
        self.proactive: dict = {}
        self.channel = ControlChannel(self.kernel, self.radio, self.ap, cfg.cms.control_latency_s)
        self.profiles = ProfileRegistry({**ProfileRegistry().apps, **cfg.cms.apps})
        for n in cfg.nodes:
            if n.role.value != "ap":
                self.profiles.register(n.id, DeviceProfile(tuple(i["kind"] for i in n.interfaces),
                                                           n.battery_class),
                                       UserProfile(n.willing_to_relay, n.accepts_invitations))
        self.kb = KnowledgeBase()
        self.policies = list(cfg.cms.policies)
        self.phase_index = cfg.phases[0][1]
        self.baseline = {(nid, k): i.active for nid, n in self.nodes.items()
                         for k, i in n.interfaces.items()}

        self.records: list = []
        self.ons: list = []
        self.on_log: list = []
        self.decisions: list = []
        self.served: dict = {}
        self.pending: dict = {}
        self.busy: dict = {}
        self.power_timeline: list = []
        self.airtime: dict = {}
        self.maintenance_checks: list = []
        self.positions: list = []
        self.app_of: dict = {}
        self.flow_of: dict = {}
        self._next_on = 1
        self._proactive_overhead = 0
        self._bulk_records: list = []
        self._bulk_only = False
        self._traffic_end = cfg.horizon_s

    # -- setup ---------------------------------------------------------------

    def _terminal(self, pkt: PacketRecord) -> str:
        return pkt.src if pkt.dst == CORE else pkt.dst

    def _ep(self, x: str) -> str:
        return self.ap if x == CORE else x

    def _schedule_traffic(self):
        bulk_only = True
        for flow, app in zip(self.cfg.flows, self.cfg.flow_apps):
            pkts = emit(flow, self.cfg.horizon_s)
            if flow.kind is FlowKind.VOIP_G711:
                bulk_only = False
            for p in pkts:
                self.app_of[p.flow] = app
                self.flow_of[p.flow] = flow
                self.records.append(p)
                if flow.kind is FlowKind.BULK:
                    self._bulk_records.append(p)
                self.kernel.schedule(p.created_at, "send", self._on_send,
                                     label=f"{p.flow}#{p.seq}", pkt=p)
        self._bulk_only = bulk_only

    def _schedule_phases(self):
        for t, idx in self.cfg.phases:
            self.kernel.schedule(t, "phase", self._on_phase, label=f"phase={idx}", index=idx)

    # -- power ---------------------------------------------------------------

    def _record_power(self, t):
        p = total_power(self.nodes.values()).total_power_mw
        if self.power_timeline and self.power_timeline[-1][0] == t:
            self.power_timeline[-1] = (t, p)
        elif not self.power_timeline or self.power_timeline[-1][1] != p:
            self.power_timeline.append((t, p))

    def _refresh_interfaces(self, t):
        """Interfaces follow the baseline plus whatever live ONs require: every
        participant's WLAN is on, and a subject's own infrastructure interface
        is off when it is not WLAN (its traffic goes through the gateway)."""
        wlan_on, infra_off = set(), set()
        ap_kind = self.nodes[self.ap].infra_kind if self.ap else None
        for on in self.ons:
            if on.state in (lc.ONState.ACTIVE, lc.ONState.RECONFIGURING):
                wlan_on.update(on.participants)
                if ap_kind is not InterfaceKind.WLAN_G:
                    infra_off.update(on.subjects)
        for (nid, kind), base in self.baseline.items():
            iface = self.nodes[nid].interfaces[kind]
            active = base
            if kind is InterfaceKind.WLAN_G and nid in wlan_on:
                active = True
            if kind is ap_kind and nid in infra_off:
                active = False
            iface.active = active
        self._record_power(t)

    # -- phases and CPC ------------------------------------------------------

    def _on_phase(self, ev):
        self.phase_index = ev.data["index"]
        apply_power_phase(self.nodes.values(), phase(self.phase_index))
        self._record_power(ev.fire_at)
        self.reactive.invalidate()
        if self.ap is not None:
            info = CpcInfo(tuple(p.name for p in self.policies),
                           tuple(k.value for k in InterfaceKind), self.phase_index)
            self.channel.cpc_broadcast(self.ap, info, ev.fire_at)

    # -- offered load and context -------------------------------------------

    def _loads(self, t) -> dict:
        loads: dict = {}
        # frames still buffered keep a terminal in need of coverage after its flow ends
        backlog = {self._terminal(q[0]) for q in self.pending.values() if q}
        for flow in self.cfg.flows:
            term = flow.src if flow.dst == CORE else flow.dst
            if flow.kind is FlowKind.VOIP_G711:
                if t < self.cfg.horizon_s or term in backlog:
                    loads[term] = loads.get(term, 0.0) + 2 * flow.wire_rate_bps
        for p in self._bulk_records:
            if p.fate == "pending":
                term = self._terminal(p)
                loads[term] = loads.get(term, 0.0) + 8.0 * p.size_b / self.cfg.horizon_s
        return loads

    def snapshot(self, t) -> ContextSnapshot:
        return acquire_context(self.radio, self.ap, t, self._loads(t), self.phase_index,
                               self.cfg.level)

    def _threshold(self) -> float:
        for p in self.policies:
            if p.trigger is TriggerKind.POOR_CHANNEL:
                return p.rate_threshold_bps
        return 1e6

    # -- maintenance tick ----------------------------------------------------

    def _on_tick(self, ev):
        t = ev.fire_at
        snap = self.snapshot(t)
        if self.verbose:
            for n in self.mobility.nodes():
                p = self.mobility.position_at(n, t)
                self.positions.append((t, n, p.x, p.y))
        if self.cfg.cms.enabled and self.policies:
            self._manage(snap, t)
        self._flush(t)
        nxt = t + self.cfg.cms.maintenance_interval_s
        if nxt <= self.cfg.horizon_s + self.cfg.drain_s:
            self.kernel.schedule(nxt, "tick", self._on_tick, label="cms")

    def _policy(self, name):
        for p in self.policies:
            if p.name == name:
                return p
        return self.policies[0]

    def _manage(self, snap: ContextSnapshot, t: float):
        triggers = evaluate_policies(snap, self.policies)
        needed: dict = {}
        for trig in triggers:
            needed.setdefault(trig.kind, set()).update(trig.subjects)

        for on in [o for o in self.ons if o.live]:
            still = needed.get(on.trigger.kind, set())
            if on.state is lc.ONState.ACTIVE:
                decision, routes = lc.maintain(on, snap, still)
                if decision == "keep":
                    self._release(on, [s for s in on.subjects if s not in routes], t)
                    on.routes = routes
                elif decision == "terminate":
                    self._terminate(on, t, "trigger_cleared")
                else:
                    on.transition(lc.ONState.RECONFIGURING, t)
                    on.reconfigurations += 1
                    self._log_on(on, t, "reconfiguring")
                    self._invalidate_routes(on)
                    self._reselect(on, snap, still, t)
            elif on.state is lc.ONState.RECONFIGURING and not on.handshaking:
                self._reselect(on, snap, still, t)
            if on.state is lc.ONState.ACTIVE:
                ok = lc.routes_valid(snap, on.participants, on.gateway, on.subjects) is not None
                self.maintenance_checks.append((t, on.on_id, ok))

        served = {s for o in self.ons if o.live for s in o.subjects}
        for group in lc.detect(snap, triggers, served):
            self._form(group, snap, t)

    def _release(self, on, subjects, t):
        if not subjects:
            return
        on.subjects = tuple(s for s in on.subjects if s not in subjects)
        for s in subjects:
            self.served.pop(s, None)
        self._invalidate_routes(on, subjects)
        self._refresh_interfaces(t)

    def _reselect(self, on, snap, still, t):
        remaining = tuple(s for s in on.subjects if s in still)
        if not remaining:
            self._terminate(on, t, "trigger_cleared")
            return
        trig = Trigger(on.trigger.kind, remaining, t, on.trigger.policy)
        sig = context_signature(snap, self._threshold())
        try:
            plan = lc.select_participants(trig, snap, self.profiles, self._policy(trig.policy),
                                          self._app_for(remaining), on.on_id, self.kb, sig,
                                          self.timers.per_hop_overhead_s)
        except lc.NoCandidate:
            self.decisions.append((t, on.on_id, "reselect", None, False))
            return
        self.decisions.append((t, on.on_id, "reselect", plan.eval_steps, plan.from_knowledge))
        new = [p for p in plan.participants if p not in on.participants]
        on.handshaking = True

        def done(accepted):
            on.handshaking = False
            if on.state is not lc.ONState.RECONFIGURING:
                return
            if not all(p in accepted for p in new):
                self._log_on(on, self.kernel.now, "reconfigure_failed")
                return
            on.participants, on.gateway, on.routes = plan.participants, plan.gateway, plan.routes
            on.subjects = remaining
            on.transition(lc.ONState.ACTIVE, self.kernel.now)
            self._log_on(on, self.kernel.now, "reconfigured")
            self._after_activation(on, self.kernel.now)

        # a new gateway is told through the CPC, as at formation
        self._handshake(on, plan, new, t, done, cpc=plan.gateway != on.gateway)

    def _app_for(self, subjects) -> str:
        for flow, app in zip(self.cfg.flows, self.cfg.flow_apps):
            if flow.src in subjects or flow.dst in subjects:
                return app
        return "voip"

    def _form(self, trig: Trigger, snap: ContextSnapshot, t: float):
        sig = context_signature(snap, self._threshold())
        on_id = self._next_on
        try:
            desc = lc.select_participants(trig, snap, self.profiles, self._policy(trig.policy),
                                          self._app_for(trig.subjects), on_id, self.kb, sig,
                                          self.timers.per_hop_overhead_s)
        except lc.NoCandidate as e:
            self.decisions.append((t, None, "no_candidate", None, False))
            log.debug("no ON for %s: %s", trig.subjects, e)
            return
        self._next_on += 1
        desc.handshaking = True
        self.ons.append(desc)
        for s in desc.subjects:
            self.served[s] = desc
        self.decisions.append((t, on_id, "form", desc.eval_steps, desc.from_knowledge))
        self._log_on(desc, t, "forming")

        def done(accepted):
            desc.handshaking = False
            try:
                lc.create(desc, accepted, self.kernel.now)
            except lc.FormationFailed:
                for s in desc.subjects:
                    self.served.pop(s, None)
                self.kb.learn(lc.knowledge_record(desc, False))
                self._log_on(desc, self.kernel.now, "formation_failed")
                return
            self._log_on(desc, self.kernel.now, "active")
            self.kb.learn(lc.knowledge_record(desc, True, None,
                                              total_power(self.nodes.values()).total_power_mw))
            self._after_activation(desc, self.kernel.now)

        self._handshake(desc, desc, [p for p in desc.participants], t, done, cpc=True)

    def _handshake(self, on, plan, invitees, t, done, cpc: bool):
        """One CPC notification (formation only) then one CCR invite/accept
        round trip per invited participant, run back to back. The gateway is
        reached through the CPC and is not invited over CCR."""
        order = self._invite_order(plan, invitees)
        accepted = set(on.participants) if not cpc else {plan.gateway}
        L = self.channel.latency_s

        def step(k, now):
            if k == len(order):
                done(accepted)
                return
            inviter, p = order[k]
            try:
                self.channel.ccr_send(inviter, p, CcrMsg("invite", on.on_id), now,
                                      callback=lambda ev: reply(k, ev.fire_at))
            except ControlUnreachable:
                done(accepted)

        def reply(k, now):
            inviter, p = order[k]
            ok = self.profiles.users[p].accepts_invitations if p in self.profiles.users else False
            try:
                self.channel.ccr_send(p, inviter, CcrMsg("accept" if ok else "reject", on.on_id),
                                      now, callback=lambda ev: after(k, ok, ev.fire_at))
            except ControlUnreachable:
                done(accepted)

        def after(k, ok, now):
            if ok:
                accepted.add(order[k][1])
            step(k + 1, now)

        if cpc and self.ap is not None:
            info = CpcInfo(tuple(p.name for p in self.policies),
                           tuple(k.value for k in InterfaceKind), self.phase_index)
            self.channel.cpc_broadcast(self.ap, info, t)
            self.kernel.schedule(t + L, "handshake", lambda ev: step(0, ev.fire_at),
                                 label=f"on={on.on_id}")
        else:
            self.kernel.schedule(t, "handshake", lambda ev: step(0, ev.fire_at),
                                 label=f"on={on.on_id}")

    def _invite_order(self, plan, invitees):
        """(inviter, invitee) pairs, nearest to the gateway first; each node is
        invited by its next hop toward the gateway."""
        upstream, depth = {}, {plan.gateway: 0}
        for path in plan.routes.values():
            for k in range(len(path) - 1):
                a, b = path[k], path[k + 1]
                if a not in upstream:
                    upstream[a] = b
            for k, n in enumerate(reversed(path)):
                depth[n] = min(depth.get(n, k), k)
        pairs = []
        for p in invitees:
            if p == plan.gateway or p not in upstream:
                continue
            pairs.append((depth.get(p, 99), p, upstream[p]))
        return [(inv, p) for _, p, inv in sorted(pairs)]

    def _after_activation(self, on, t):
        for s in on.subjects:
            self.served[s] = on
        self._invalidate_routes(on)
        self._refresh_interfaces(t)
        if self.protocol is Protocol.PROACTIVE:
            self._proactive_refresh(on, t)
        self._flush(t, only=set(on.subjects))

    def _terminate(self, on, t, outcome):
        if on.state is lc.ONState.TERMINATED:
            return
        lc.terminate(on, t, outcome)
        for s in on.subjects:
            if self.served.get(s) is on:
                self.served.pop(s)
        self._invalidate_routes(on)
        r = self.proactive.pop(on.on_id, None)
        if r is not None:
            self._proactive_overhead += r.overhead_msgs
        self._refresh_interfaces(t)
        delays = [p.delay_s for p in self.records if p.delivered_at is not None
                  and self._terminal(p) in on.subjects and on.created_at is not None
                  and on.created_at <= p.created_at <= t]
        mean = sum(delays) / len(delays) if delays else None
        if on.signature is not None and on.created_at is not None:
            self.kb.learn(lc.knowledge_record(on, True, mean,
                                              total_power(self.nodes.values()).total_power_mw))
        self._log_on(on, t, outcome)

    def _log_on(self, on, t, event):
        self.on_log.append({
            "t": t, "on_id": on.on_id, "event": event, "trigger": on.trigger.kind.value,
            "participants": "+".join(on.participants), "gateway": on.gateway,
            "subjects": "+".join(on.subjects), "state": on.state.value,
            "created_at": on.created_at, "terminated_at": on.terminated_at,
            "outcome": on.outcome,
        })

    # -- routing -------------------------------------------------------------

    def _on_graph(self, on, t):
        members = set(on.participants) | {self.ap}
        ap_kind = self.nodes[self.ap].infra_kind

        def feasible(a, b):
            if self.ap in (a, b):
                other = b if a == self.ap else a
                return other == on.gateway and self.radio.link_feasible(other, self.ap, ap_kind, t)
            return self.radio.link_feasible(a, b, InterfaceKind.WLAN_G, t)

        return build_graph(members, feasible)

    def _invalidate_routes(self, on, subjects=None):
        for s in (on.subjects if subjects is None else subjects):
            self.reactive.invalidate(src=s)
            self.reactive.invalidate(dst=s)

    def _proactive_refresh(self, on, t):
        r = self.proactive.get(on.on_id)
        if r is None:
            r = self.proactive[on.on_id] = ProactiveRouter(self.timers)
        r.proactive_tick(self._on_graph(on, t), t)

    def _on_topology(self, ev):
        for on in self.ons:
            if on.state is lc.ONState.ACTIVE:
                self._proactive_refresh(on, ev.fire_at)
        nxt = ev.fire_at + self.timers.topology_interval_s
        if nxt <= self.cfg.horizon_s + self.cfg.drain_s:
            self.kernel.schedule(nxt, "topology", self._on_topology, label="tc")

    def _direct_ok(self, term, t) -> bool:
        node = self.nodes[term]
        kind = self.nodes[self.ap].infra_kind
        return node.active_iface(kind) is not None and self.radio.in_coverage(term, self.ap, t)

    def _route(self, pkt, at: str, t: float):
        """(route, ready_at) from ``at`` toward the packet's destination, or None."""
        term = self._terminal(pkt)
        dst = self._ep(pkt.dst)
        on = self.served.get(term)
        if on is not None:
            if on.state is not lc.ONState.ACTIVE:
                return None
            if self.protocol is Protocol.PROACTIVE:
                r = self.proactive.get(on.on_id)
                if r is None:
                    return None
                try:
                    return r.route(at, dst, t).nodes, t
                except NoRoute:
                    return None
            hit = self.reactive.cached(at, dst)
            if hit is not None:
                return hit[0].nodes, hit[1]
            try:
                route, lat = self.reactive.discover_route(self._on_graph(on, t), at, dst, t)
            except NoRoute:
                return None
            self.reactive.install(route, t + lat)
            return route.nodes, t + lat
        if at in (term, self.ap) and self._direct_ok(term, t):
            return (at, dst), t
        return None

    # -- packets -------------------------------------------------------------

    def _on_send(self, ev):
        pkt = ev.data["pkt"]
        self._dispatch(pkt, ev.fire_at)

    def _dispatch(self, pkt, t):
        origin = self._ep(pkt.src)
        r = self._route(pkt, origin, t)
        if r is None:
            self._buffer(pkt, t)
            return
        route, ready = r
        pkt.path = [origin]
        self.kernel.schedule(max(t, ready), "hop", self._on_hop, label=f"{pkt.flow}#{pkt.seq}@{origin}",
                             pkt=pkt, route=route, idx=0)

    def _buffer(self, pkt, t):
        q = self.pending.setdefault(pkt.flow, deque())
        q.append(pkt)
        while len(q) > self.cfg.buffer_packets:
            old = q.popleft()
            old.drop("buffer_overflow")

    def _flush(self, t, only=None):
        for name in sorted(self.pending):
            q = self.pending[name]
            if not q:
                continue
            if only is not None and self._terminal(q[0]) not in only:
                continue
            waiting = list(q)
            q.clear()
            for pkt in waiting:
                if t - pkt.created_at > self.cfg.buffer_timeout_s:
                    pkt.drop("buffer_timeout")
                    continue
                self._dispatch(pkt, t)

    def _on_hop(self, ev):
        t = ev.fire_at
        pkt, route, idx = ev.data["pkt"], ev.data["route"], ev.data["idx"]
        u, v = route[idx], route[idx + 1]
        kind = self.radio.hop_kind(u, v)
        if not self.radio.link_feasible(u, v, kind, t):
            self._on_break(pkt, route, idx, t)
            return
        ser = transfer_time(pkt.size_b, self.radio.hop_rate(u, v))
        start = max(t, self.busy.get((u, kind), 0.0))
        self.busy[(u, kind)] = start + ser
        self.airtime[(u, kind)] = self.airtime.get((u, kind), 0.0) + ser
        arrive = start + ser + self.timers.per_hop_overhead_s
        pkt.path.append(v)
        if idx + 2 == len(route):
            self.kernel.schedule(arrive, "deliver", self._on_deliver,
                                 label=f"{pkt.flow}#{pkt.seq}@{v}", pkt=pkt)
        else:
            self.kernel.schedule(arrive, "hop", self._on_hop, label=f"{pkt.flow}#{pkt.seq}@{v}",
                                 pkt=pkt, route=route, idx=idx + 1)

    def _on_break(self, pkt, route, idx, t):
        if self.protocol is Protocol.PROACTIVE:
            pkt.drop("stale_route")
            return
        self.kernel.schedule(t + self.timers.break_detect_s, "rerr", self._on_rerr,
                             label=f"{pkt.flow}#{pkt.seq}@{route[idx]}>{route[idx + 1]}",
                             pkt=pkt, route=route, idx=idx)

    def _on_rerr(self, ev):
        t = ev.fire_at
        pkt, route, idx = ev.data["pkt"], ev.data["route"], ev.data["idx"]
        u = route[idx]
        self.reactive.invalidate(src=route[0], dst=route[-1])
        pkt.retries += 1
        term = self._terminal(pkt)
        on = self.served.get(term)
        if on is None or on.state is not lc.ONState.ACTIVE:
            self._buffer(pkt, t)
            return
        try:
            g = self._on_graph(on, t)
            new, lat = self.reactive.discover_route(g, u, route[-1], t)
        except (NoRoute, ValueError):
            self._buffer(pkt, t)
            return
        self.kernel.schedule(t + lat, "hop", self._on_hop, label=f"{pkt.flow}#{pkt.seq}@{u}",
                             pkt=pkt, route=new.nodes, idx=0)

    def _on_deliver(self, ev):
        pkt = ev.data["pkt"]
        pkt.deliver(ev.fire_at)
        if self._bulk_only and all(p.fate != "pending" for p in self.records):
            self._traffic_end = ev.fire_at

    # -- run -----------------------------------------------------------------

    def run(self) -> RunResult:
        k = self.kernel
        self._record_power(0.0)
        self._schedule_phases()
        k.schedule(0.0, "tick", self._on_tick, label="cms")
        if self.protocol is Protocol.PROACTIVE:
            k.schedule(0.0, "topology", self._on_topology, label="tc")
        self._schedule_traffic()
        end = self.cfg.horizon_s + self.cfg.drain_s
        k.run_until(end)
        for on in self.ons:
            if on.live:
                if on.state is lc.ONState.FORMING:
                    on.transition(lc.ONState.TERMINATED, end)
                    on.terminated_at = end
                    on.outcome = "end_of_run"
                    self._log_on(on, end, "end_of_run")
                else:
                    self._terminate(on, end, "end_of_run")
        for p in self.records:
            if p.fate == "pending":
                p.drop("unfinished")
        window_end = self._traffic_end if self._bulk_only else self.cfg.horizon_s
        overhead = self.reactive.overhead_msgs + self._proactive_overhead + \
            sum(r.overhead_msgs for r in self.proactive.values())
        return RunResult(self.cfg, self.seed, self.records, self.on_log, self.ons,
                         self.power_timeline, (0.0, window_end), self.kb, self.decisions,
                         k.trace.digest, k.trace, self.channel.log, dict(self.airtime), overhead,
                         self.maintenance_checks, self.positions)


def simulate(cfg: ScenarioConfig, seed: Optional[int] = None, **kw) -> RunResult:
    return Simulation(cfg, seed, **kw).run()


def mean(xs) -> float:
    xs = list(xs)
    return math.fsum(xs) / len(xs) if xs else float("nan")
