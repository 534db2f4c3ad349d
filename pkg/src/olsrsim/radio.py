"""Static node placement, link loss model, and frame transmission.

Each node owns a drop-tail FIFO transmit queue served at the channel bitrate;
per-receiver Bernoulli draws decide delivery. There is no MAC contention or
link-layer retransmission: congestion shows up as queueing delay and queue
drops, loss as end-to-end packet loss.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum

from .engine import EventKind, RngStream, Simulator

BROADCAST = -1

PROPAGATION_SPEED_MPS = 3e8


@dataclass(frozen=True)
class Position:
    x: float
    y: float


def place_nodes(n: int, arena_side: float, rng: RngStream) -> list[Position]:
    """Independent uniform placements in an arena_side x arena_side square."""
    if n < 2:
        raise ValueError(f"need at least two nodes, got {n}")
    return [Position(rng.uniform() * arena_side, rng.uniform() * arena_side) for _ in range(n)]


@dataclass(frozen=True)
class LossModel:
    """Two-segment distance model: full quality up to d0_m, linear decay to p_edge
    at range_m, zero beyond. The model itself is symmetric; asymmetric measured
    ratios arise from independent per-direction loss draws."""

    range_m: float = 250.0
    d0_m: float = 100.0
    p_near: float = 1.0
    p_edge: float = 0.6

    def __post_init__(self):
        if not 0.0 <= self.p_edge <= self.p_near <= 1.0:
            raise ValueError("need 0 <= p_edge <= p_near <= 1")
        if not 0.0 <= self.d0_m <= self.range_m:
            raise ValueError("need 0 <= d0_m <= range_m")


def link_success_probability(a: Position, b: Position, model: LossModel) -> float:
    dist = math.hypot(a.x - b.x, a.y - b.y)
    if dist <= model.d0_m:
        return model.p_near
    if dist > model.range_m:
        return 0.0
    frac = (dist - model.d0_m) / (model.range_m - model.d0_m)
    return model.p_near + (model.p_edge - model.p_near) * frac


class PayloadKind(Enum):
    HELLO = "hello"
    TC = "tc"
    PROBE = "probe"
    DATA = "data"


CONTROL_KINDS = (PayloadKind.HELLO, PayloadKind.TC, PayloadKind.PROBE)


@dataclass(slots=True)
class Frame:
    src: int
    dst: int  # BROADCAST or a node id (the next hop, not the final destination)
    size_bytes: int
    payload_kind: PayloadKind
    carried_message: object
    enqueue_time: float


class Medium:
    """Shared static radio: pairwise success probabilities plus per-node queues.

    Reception lists, probabilities and propagation delays are precomputed once
    (the network is static). Delivery hands frames to ``on_deliver(receiver,
    frame)``; the optional hooks report serviced frames, queue drops and lost
    unicasts to the stats layer.
    """

    def __init__(
        self,
        sim: Simulator,
        positions: list[Position],
        loss_model: LossModel,
        loss_rng: RngStream,
        bitrate_bps: float = 1_000_000.0,
        queue_capacity: int = 50,
    ):
        self.sim = sim
        self.positions = positions
        self.loss_model = loss_model
        self.loss_rng = loss_rng
        self.bitrate_bps = float(bitrate_bps)
        self.queue_capacity = queue_capacity
        n = len(positions)
        # in_range[i]: (j, p_link, prop_delay) ascending in j, for p_link > 0
        self.in_range: list[list[tuple[int, float, float]]] = [[] for _ in range(n)]
        self.p_link: list[dict[int, float]] = [{} for _ in range(n)]
        self.prop_delay: list[dict[int, float]] = [{} for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                p = link_success_probability(positions[i], positions[j], loss_model)
                if p <= 0.0:
                    continue
                dist = math.hypot(
                    positions[i].x - positions[j].x, positions[i].y - positions[j].y
                )
                delay = dist / PROPAGATION_SPEED_MPS
                self.in_range[i].append((j, p, delay))
                self.p_link[i][j] = p
                self.prop_delay[i][j] = delay
        self._queues: list[deque[Frame]] = [deque() for _ in range(n)]
        self._busy = [False] * n
        self.queue_drops = 0
        self.on_deliver = None  # fn(receiver_id, frame)
        self.on_frame_sent = None  # fn(frame) at service completion
        self.on_queue_drop = None  # fn(frame)
        self.on_unicast_lost = None  # fn(frame)

    def queue_length(self, node: int) -> int:
        return len(self._queues[node])

    def transmit(self, sender: int, frame: Frame) -> bool:
        """Enqueue a frame; False means a drop-tail queue drop (counted, not raised)."""
        queue = self._queues[sender]
        if len(queue) >= self.queue_capacity:
            self.queue_drops += 1
            if self.on_queue_drop is not None:
                self.on_queue_drop(frame)
            return False
        queue.append(frame)
        if not self._busy[sender]:
            self._begin_service(sender)
        return True

    def _begin_service(self, sender: int) -> None:
        self._busy[sender] = True
        frame = self._queues[sender][0]
        service_time = frame.size_bytes * 8.0 / self.bitrate_bps
        self.sim.schedule(
            self.sim.now() + service_time, EventKind.QUEUE_SERVICE, self._finish_service, sender
        )

    def _finish_service(self, sender: int) -> None:
        frame = self._queues[sender].popleft()
        if self.on_frame_sent is not None:
            self.on_frame_sent(frame)
        now = self.sim.now()
        if frame.dst == BROADCAST:
            for j, p, delay in self.in_range[sender]:
                if self.loss_rng.uniform() < p:
                    self.sim.schedule(
                        now + delay, EventKind.FRAME_ARRIVAL, self.on_deliver, j, frame
                    )
        else:
            p = self.p_link[sender].get(frame.dst, 0.0)
            if self.loss_rng.uniform() < p:
                delay = self.prop_delay[sender][frame.dst]
                self.sim.schedule(
                    now + delay, EventKind.FRAME_ARRIVAL, self.on_deliver, frame.dst, frame
                )
            elif self.on_unicast_lost is not None:
                self.on_unicast_lost(frame)
        if self._queues[sender]:
            self._begin_service(sender)
        else:
            self._busy[sender] = False
