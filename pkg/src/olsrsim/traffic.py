"""CBR traffic generation and hop-by-hop data forwarding over routing tables."""

from __future__ import annotations

from dataclasses import dataclass

from .engine import EventKind, RngStream, Simulator
from .olsr import OlsrNode
from .radio import Frame, Medium, PayloadKind
from .stats import DropCause, RunStats


class InvalidFlow(Exception):
    """A flow specification is unusable (e.g. src == dst)."""


@dataclass(frozen=True)
class FlowSpec:
    flow_id: int
    src: int
    dst: int
    rate_pps: float
    payload_bytes: int = 64
    start_s: float = 0.0
    stop_s: float = float("inf")


@dataclass(slots=True)
class DataPacket:
    flow_id: int
    seq: int
    src: int
    dst: int
    payload_bytes: int
    ttl: int
    sent_at: float


class TrafficManager:
    """Emits CBR packets and forwards them hop by hop.

    Every drop is attributed to exactly one cause (no route, queue drop, link
    loss, TTL expiry); packets neither delivered nor dropped by the end of the
    run are counted as in flight, so the conservation identity holds exactly.
    """

    def __init__(
        self,
        sim: Simulator,
        medium: Medium,
        nodes: list[OlsrNode],
        stats: RunStats,
        rng: RngStream,
        data_ttl: int = 32,
        header_bytes: int = 20,
    ):
        self.sim = sim
        self.medium = medium
        self.nodes = nodes
        self.stats = stats
        self.rng = rng
        self.data_ttl = data_ttl
        self.header_bytes = header_bytes

    def start_flows(self, specs: list[FlowSpec]) -> None:
        """Schedule each flow's ticks: one packet every 1/rate seconds from a
        random start offset within the first interval."""
        for spec in specs:
            if spec.src == spec.dst:
                raise InvalidFlow(f"flow {spec.flow_id}: src == dst == {spec.src}")
            if spec.rate_pps < 1:
                raise InvalidFlow(f"flow {spec.flow_id}: rate must be >= 1 pps")
            interval = 1.0 / spec.rate_pps
            first = spec.start_s + self.rng.uniform() * interval
            if first < spec.stop_s:
                self.sim.schedule(first, EventKind.FLOW_TICK, self._flow_tick, spec, first, 0)

    def _flow_tick(self, spec: FlowSpec, first_t: float, seq: int) -> None:
        now = self.sim.now()
        packet = DataPacket(
            spec.flow_id, seq, spec.src, spec.dst, spec.payload_bytes, self.data_ttl, now
        )
        self.stats.on_data_sent(packet)
        self.forward(spec.src, packet)
        next_t = first_t + (seq + 1) / spec.rate_pps
        if next_t < spec.stop_s:
            self.sim.schedule(next_t, EventKind.FLOW_TICK, self._flow_tick, spec, first_t, seq + 1)

    def forward(self, node_id: int, packet: DataPacket) -> None:
        """Deliver locally, or look up the next hop and transmit one link."""
        now = self.sim.now()
        if node_id == packet.dst:
            self.stats.on_delivered(packet, now)
            return
        if packet.ttl <= 0:
            self.stats.on_drop(packet, DropCause.TTL_EXPIRED)
            return
        entry = self.nodes[node_id].routes.get(packet.dst)
        if entry is None:
            self.stats.on_drop(packet, DropCause.NO_ROUTE)
            return
        packet.ttl -= 1
        frame = Frame(
            node_id,
            entry.next_hop,
            self.header_bytes + packet.payload_bytes,
            PayloadKind.DATA,
            packet,
            now,
        )
        # Queue drops and link losses are reported through the medium hooks.
        self.medium.transmit(node_id, frame)

    def on_data_frame(self, receiver: int, frame: Frame) -> None:
        self.forward(receiver, frame.carried_message)
