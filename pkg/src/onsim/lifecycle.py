"""Opportunistic-network lifecycle: detect, select, create, maintain, terminate."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .cms import (ContextSnapshot, KnowledgeBase, KnowledgeRecord, MissingProfile,
                  Outcome, Policy, ProfileRegistry, Trigger, TriggerKind)
from .routing import NoRoute, build_graph, shortest_path


class NoCandidate(LookupError):
    pass


class FormationFailed(RuntimeError):
    pass


class IllegalTransition(RuntimeError):
    pass


class ONState(str, enum.Enum):
    FORMING = "Forming"
    ACTIVE = "Active"
    RECONFIGURING = "Reconfiguring"
    TERMINATED = "Terminated"


TRANSITIONS = {
    (ONState.FORMING, ONState.ACTIVE),
    (ONState.FORMING, ONState.TERMINATED),
    (ONState.ACTIVE, ONState.RECONFIGURING),
    (ONState.RECONFIGURING, ONState.ACTIVE),
    (ONState.ACTIVE, ONState.TERMINATED),
    (ONState.RECONFIGURING, ONState.TERMINATED),
}


@dataclass
class ONDescriptor:
    on_id: int
    trigger: Trigger
    participants: tuple
    gateway: str
    routes: dict
    subjects: tuple = ()
    state: ONState = ONState.FORMING
    created_at: Optional[float] = None
    terminated_at: Optional[float] = None
    history: list = field(default_factory=list)
    eval_steps: int = 0
    from_knowledge: bool = False
    signature: Optional[tuple] = None
    outcome: str = ""
    reconfigurations: int = 0
    handshaking: bool = False

    def __post_init__(self):
        if not self.subjects:
            self.subjects = tuple(self.trigger.subjects)
        if self.gateway not in self.participants:
            raise ValueError("gateway must be a participant")

    def transition(self, new: ONState, t: float) -> None:
        if (self.state, new) not in TRANSITIONS:
            raise IllegalTransition(f"ON {self.on_id}: {self.state.value} -> {new.value}")
        self.history.append((t, self.state, new))
        self.state = new

    @property
    def live(self) -> bool:
        return self.state is not ONState.TERMINATED

    def summary(self) -> dict:
        return {"gateway": self.gateway, "participants": tuple(self.participants),
                "subjects": tuple(self.subjects)}

    def same_decision(self, other: "ONDescriptor") -> bool:
        return (self.gateway, tuple(self.participants), dict(self.routes)) == \
            (other.gateway, tuple(other.participants), dict(other.routes))


def _relay_graph(snap: ContextSnapshot, members) -> dict:
    members = set(members)
    return build_graph(members, lambda a, b: b in snap.nodes[a].neighbors)


def detect(snap: ContextSnapshot, triggers: list, served: set = frozenset()) -> list:
    """Split each trigger into one forming decision per connected group of
    unserved subjects. Two subjects share a group when they are WLAN
    neighbours or have a common neighbour."""
    out = []
    for trig in triggers:
        if trig.kind not in (TriggerKind.COVERAGE_GAP, TriggerKind.POOR_CHANNEL):
            continue
        subjects = [s for s in trig.subjects if s not in served]
        parent = {s: s for s in subjects}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, a in enumerate(subjects):
            na = snap.nodes[a].neighbors
            for b in subjects[i + 1:]:
                nb = snap.nodes[b].neighbors
                if b in na or set(na) & set(nb):
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)
        groups: dict = {}
        for s in subjects:
            groups.setdefault(find(s), []).append(s)
        for root in sorted(groups):
            out.append(Trigger(trig.kind, tuple(sorted(groups[root])), trig.detected_at,
                               trig.policy))
    return out


def _candidates(snap: ContextSnapshot, subjects, profiles: ProfileRegistry, app: str):
    out = []
    for n in snap.terminals():
        if n in subjects:
            continue
        ctx = snap.nodes[n]
        if not ctx.in_coverage or ctx.serving_rate_bps <= 0:
            continue
        try:
            req = profiles.match_profile(n, app)
        except MissingProfile:
            continue
        if req.relay_over_wlan:
            out.append(n)
    return out


def _relays(snap, subjects, profiles, app):
    relays = []
    for n in snap.terminals():
        if n in subjects:
            relays.append(n)
            continue
        try:
            if profiles.match_profile(n, app).relay_over_wlan:
                relays.append(n)
        except MissingProfile:
            pass
    return relays


def _plan(g, subjects, gateway, policy: Policy):
    """Routes from every subject to ``gateway``; None if constraints fail."""
    routes = {}
    for s in subjects:
        try:
            p = shortest_path(g, s, gateway)
        except NoRoute:
            return None
        # + 1 for the gateway's infrastructure hop
        if len(p) - 1 + 1 > policy.max_hops:
            return None
        routes[s] = p
    parts = sorted({n for p in routes.values() for n in p} | {gateway})
    if len(parts) > policy.max_participants:
        return None
    return routes, tuple(parts)


def routes_valid(snap: ContextSnapshot, participants, gateway, subjects) -> Optional[dict]:
    """Repair within the participant set: min-hop routes from each subject to
    the gateway, or None if the gateway lost coverage or a subject is cut off."""
    gw = snap.nodes.get(gateway)
    if gw is None or not gw.in_coverage:
        return None
    g = _relay_graph(snap, participants)
    routes = {}
    for s in subjects:
        try:
            routes[s] = shortest_path(g, s, gateway)
        except NoRoute:
            return None
    return routes


def select_participants(trigger: Trigger, snap: ContextSnapshot, profiles: ProfileRegistry,
                        policy: Policy, app: str = "voip", on_id: int = 0,
                        knowledge: Optional[KnowledgeBase] = None,
                        signature: Optional[tuple] = None,
                        per_hop_s: float = 0.0005, exclude: frozenset = frozenset()) -> ONDescriptor:
    subjects = tuple(sorted(trigger.subjects))

    excluded = set(exclude)
    if knowledge is not None and signature is not None:
        rec = knowledge.lookup(signature)
        if rec is not None:
            dec = rec.decision
            if rec.outcome.success and set(dec.get("subjects", ())) == set(subjects):
                routes = routes_valid(snap, dec["participants"], dec["gateway"], subjects)
                if routes is not None:
                    return ONDescriptor(on_id, trigger, tuple(dec["participants"]),
                                        dec["gateway"], routes, subjects, eval_steps=0,
                                        from_knowledge=True, signature=signature)
            elif not rec.outcome.success:
                # negative cache: do not retry the gateway that failed last time
                excluded.add(dec.get("gateway"))

    cands = [c for c in _candidates(snap, subjects, profiles, app) if c not in excluded]
    if not cands:
        raise NoCandidate(f"no willing in-coverage relay for {subjects}")
    g = _relay_graph(snap, _relays(snap, subjects, profiles, app))

    plans = []
    steps = 0
    for c in cands:
        steps += 1
        plan = _plan(g, subjects, c, policy)
        if plan is None:
            continue
        routes, parts = plan
        # subject -> gateway hops plus the gateway's own uplink hop
        delay = sum(len(p) for p in routes.values()) / len(subjects) * per_hop_s
        power = float(len(parts))
        plans.append((c, routes, parts, delay, power, snap.nodes[c].serving_rate_bps))
    if not plans:
        raise NoCandidate(f"no feasible relay configuration for {subjects}")

    dmax = max(p[3] for p in plans) or 1.0
    pmax = max(p[4] for p in plans) or 1.0

    def rank(p):
        score = policy.qos_weight * (-p[3] / dmax) + policy.power_weight * (-p[4] / pmax)
        return (-p[5], -score, p[0])

    gw, routes, parts, _, _, _ = min(plans, key=rank)
    return ONDescriptor(on_id, trigger, parts, gw, routes, subjects, eval_steps=steps,
                        signature=signature)


def create(on: ONDescriptor, accepted: set, t: float) -> ONDescriptor:
    """Forming -> Active once every participant accepted, else Terminated with
    FormationFailed raised."""
    missing = [p for p in on.participants if p not in accepted]
    if missing:
        on.transition(ONState.TERMINATED, t)
        on.terminated_at = t
        on.outcome = "formation_failed"
        raise FormationFailed(f"ON {on.on_id}: no accept from {missing}")
    on.transition(ONState.ACTIVE, t)
    on.created_at = t
    return on


def maintain(on: ONDescriptor, snap: ContextSnapshot, still_needed) -> tuple[str, Optional[dict]]:
    """Decide keep / reconfigure / terminate for an active ON.

    ``still_needed`` is the set of nodes for which the ON's trigger currently
    holds. Subjects that recovered are released; when none remain the ON is
    terminated. Returns the decision and, for keep, the repaired routes.
    """
    remaining = tuple(s for s in on.subjects if s in still_needed)
    if not remaining:
        return "terminate", None
    routes = routes_valid(snap, on.participants, on.gateway, remaining)
    if routes is None:
        return "reconfigure", None
    return "keep", routes


def terminate(on: ONDescriptor, t: float, outcome: str = "completed") -> ONDescriptor:
    if on.state is ONState.TERMINATED:
        return on
    on.transition(ONState.TERMINATED, t)
    on.terminated_at = t
    on.outcome = outcome
    return on


def knowledge_record(on: ONDescriptor, success: bool, delay_s=None, power_mw=None) -> KnowledgeRecord:
    return KnowledgeRecord(on.signature, on.summary(), Outcome(delay_s, power_mw, success))
