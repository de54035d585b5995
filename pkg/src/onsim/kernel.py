"""Discrete-event kernel: virtual clock, ordered event queue, labelled RNG streams
and a hashed dispatch trace."""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional


class SchedulingInPast(ValueError):
    pass


@dataclass(order=True)
class Event:
    fire_at: float
    seq: int
    kind: str = field(compare=False)
    label: str = field(default="", compare=False)
    action: Optional[Callable[["Event"], Any]] = field(default=None, compare=False, repr=False)
    data: dict = field(default_factory=dict, compare=False, repr=False)


class EventTrace:
    """Append-only record of dispatched events.

    The digest is a running SHA-256 over one serialized line per event, so two
    runs with the same configuration and seed produce the same hex string.
    """

    def __init__(self, keep=True):
        self.keep = keep
        self.entries: list[tuple[float, int, str, str]] = []
        self._hash = hashlib.sha256()
        self.count = 0

    def append(self, event: Event):
        line = f"{event.fire_at!r}|{event.seq}|{event.kind}|{event.label}\n"
        self._hash.update(line.encode())
        self.count += 1
        if self.keep:
            self.entries.append((event.fire_at, event.seq, event.kind, event.label))

    @property
    def digest(self) -> str:
        return self._hash.hexdigest()

    def __len__(self):
        return self.count

    def kinds(self) -> list[str]:
        return [e[2] for e in self.entries]


def derive_seed(master_seed: int, label: str) -> int:
    h = hashlib.sha256(f"{int(master_seed)}/{label}".encode()).digest()
    return int.from_bytes(h[:8], "big")


class Kernel:
    def __init__(self, master_seed: int = 0, keep_trace: bool = True):
        self.master_seed = int(master_seed)
        self.clock = 0.0
        self.trace = EventTrace(keep=keep_trace)
        self._queue: list[Event] = []
        self._seq = 0
        self._streams: dict[str, random.Random] = {}

    @property
    def now(self) -> float:
        return self.clock

    def schedule(self, fire_at: float, kind: str, action=None, label: str = "", **data) -> Event:
        if fire_at < self.clock:
            raise SchedulingInPast(f"event {kind!r} at t={fire_at} but clock is {self.clock}")
        ev = Event(float(fire_at), self._seq, kind, label, action, data)
        self._seq += 1
        heapq.heappush(self._queue, ev)
        return ev

    def schedule_in(self, delay: float, kind: str, action=None, label: str = "", **data) -> Event:
        return self.schedule(self.clock + delay, kind, action, label, **data)

    def pending(self) -> int:
        return len(self._queue)

    def peek_time(self) -> Optional[float]:
        return self._queue[0].fire_at if self._queue else None

    def run_until(self, t_end: float) -> EventTrace:
        if t_end < self.clock:
            raise SchedulingInPast(f"run_until({t_end}) with clock at {self.clock}")
        q = self._queue
        while q and q[0].fire_at <= t_end:
            ev = heapq.heappop(q)
            self.clock = ev.fire_at
            self.trace.append(ev)
            if ev.action is not None:
                ev.action(ev)
        self.clock = float(t_end)
        return self.trace

    def stream(self, label: str) -> random.Random:
        if not label:
            raise ValueError("stream label must be non-empty")
        rng = self._streams.get(label)
        if rng is None:
            rng = random.Random(derive_seed(self.master_seed, label))
            self._streams[label] = rng
        return rng
