"""Deterministic discrete-event core: virtual clock, event queue, seeded RNG streams.

All simulation state advances through :class:`Simulator`. Events firing at the
same instant execute in insertion order (sequence-number tie-break), so runs
are reproducible regardless of how handlers were registered.
"""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass
from enum import Enum


class SchedulingInPast(Exception):
    """An event was scheduled before the current simulation time."""


class InvariantViolation(Exception):
    """An internal consistency check failed; indicates a simulator bug."""


class EventKind(Enum):
    HELLO_TIMER = "HelloTimer"
    TC_TIMER = "TcTimer"
    PROBE_TIMER = "ProbeTimer"
    FRAME_ARRIVAL = "FrameArrival"
    QUEUE_SERVICE = "QueueService"
    FLOW_TICK = "FlowTick"
    ROUTE_RECOMPUTE = "RouteRecompute"
    STATS_SAMPLE = "StatsSample"
    END = "End"


class SimEvent:
    """A scheduled callback; (fire_at, seq) is a strict total order."""

    __slots__ = ("fire_at", "seq", "kind", "fn", "args")

    def __init__(self, fire_at, seq, kind, fn, args):
        self.fire_at = fire_at
        self.seq = seq
        self.kind = kind
        self.fn = fn
        self.args = args

    def __repr__(self):
        return f"SimEvent(fire_at={self.fire_at!r}, seq={self.seq}, kind={self.kind.value})"


@dataclass(frozen=True)
class RunOutcome:
    events_executed: int
    final_time: float


class Simulator:
    """Single-threaded event loop owning the virtual clock.

    One instance per simulation run; distinct runs share nothing and may
    execute in parallel processes.
    """

    def __init__(self):
        self._clock = 0.0
        self._heap: list[tuple[float, int, SimEvent]] = []
        self._seq = 0
        self.events_executed = 0

    def now(self) -> float:
        return self._clock

    def schedule(self, fire_at: float, kind: EventKind, fn, *args) -> SimEvent:
        # `not (x >= clock)` also rejects NaN, which would otherwise slip
        # through a plain `<` comparison.
        if not fire_at >= self._clock:
            raise SchedulingInPast(
                f"cannot schedule {kind.value} at {fire_at!r}; clock is {self._clock!r}"
            )
        event = SimEvent(fire_at, self._seq, kind, fn, args)
        self._seq += 1
        heapq.heappush(self._heap, (fire_at, event.seq, event))
        return event

    def run_until(self, t_end: float) -> RunOutcome:
        """Execute every event with fire_at <= t_end, then advance the clock to t_end."""
        if not t_end > 0:
            raise ValueError(f"t_end must be positive, got {t_end!r}")
        if t_end < self._clock:
            raise ValueError(f"t_end {t_end!r} is before current clock {self._clock!r}")
        executed = 0
        heap = self._heap
        while heap and heap[0][0] <= t_end:
            fire_at, _, event = heapq.heappop(heap)
            if fire_at < self._clock:
                raise InvariantViolation("executed event timestamps went backwards")
            self._clock = fire_at
            event.fn(*event.args)
            executed += 1
        self._clock = t_end
        self.events_executed += executed
        return RunOutcome(executed, self._clock)

    def pending(self) -> int:
        return len(self._heap)


class RngStream:
    """Deterministic random stream derived from (seed, stream_id).

    Streams with distinct roles (topology, loss, traffic, jitter) are
    independent: the underlying generator is seeded from a hash of both
    fields, so draws on one stream never perturb another.
    """

    __slots__ = ("seed", "stream_id", "_rng")

    def __init__(self, seed: int, stream_id: str):
        self.seed = seed
        self.stream_id = stream_id
        digest = hashlib.sha256(f"{seed}:{stream_id}".encode("utf-8")).digest()
        self._rng = random.Random(int.from_bytes(digest[:16], "big"))

    def uniform(self) -> float:
        """Next value in [0, 1)."""
        return self._rng.random()

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self._rng.random()

    def bernoulli(self, p: float) -> bool:
        return self._rng.random() < p

    def randrange(self, n: int) -> int:
        return self._rng.randrange(n)
