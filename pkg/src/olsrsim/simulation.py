"""Assembles one simulation run: radio, protocol, traffic and stats wiring."""

from __future__ import annotations

from .config import RunConfig
from .engine import EventKind, RngStream, Simulator
from .metrics import OpCounter
from .olsr import OlsrNode
from .radio import LossModel, Medium, PayloadKind, Position
from .stats import RunStats, finalize
from .traffic import FlowSpec, TrafficManager


def loss_model_from_config(cfg: RunConfig) -> LossModel:
    return LossModel(
        range_m=cfg.radio.range_m,
        d0_m=cfg.radio.d0_m,
        p_near=cfg.radio.p_near,
        p_edge=cfg.radio.p_edge,
    )


def _noop() -> None:
    pass


class SimulationRun:
    """One fully wired run over fixed positions and flow pairs.

    Placement and flow-pair screening happen upstream (they share RNG streams
    with this object), so callers pass positions, the screened pairs and the
    already-advanced traffic stream.
    """

    def __init__(
        self,
        cfg: RunConfig,
        positions: list[Position],
        pairs: list[tuple[int, int]],
        rng_traffic: RngStream,
    ):
        self.cfg = cfg
        self.sim = Simulator()
        self.rng_loss = RngStream(cfg.seed, "loss")
        self.rng_jitter = RngStream(cfg.seed, "jitter")
        self.rng_traffic = rng_traffic
        self.stats = RunStats(payload_bytes=cfg.traffic.payload_bytes)
        self.medium = Medium(
            self.sim,
            positions,
            loss_model_from_config(cfg),
            self.rng_loss,
            bitrate_bps=cfg.radio.bitrate_bps,
            queue_capacity=cfg.radio.queue_capacity,
        )
        self.nodes = [
            OlsrNode(
                i,
                self.sim,
                self.medium,
                cfg.protocol,
                cfg.metric,
                self.rng_jitter,
                control_bytes=cfg.radio.control_bytes,
            )
            for i in range(cfg.node_count)
        ]
        self.traffic = TrafficManager(
            self.sim,
            self.medium,
            self.nodes,
            self.stats,
            self.rng_traffic,
            data_ttl=cfg.traffic.data_ttl,
            header_bytes=cfg.radio.header_bytes,
        )
        self.flows = [
            FlowSpec(
                flow_id=i,
                src=src,
                dst=dst,
                rate_pps=cfg.rate_pps,
                payload_bytes=cfg.traffic.payload_bytes,
                start_s=cfg.traffic.warmup_s,
                stop_s=cfg.duration_s,
            )
            for i, (src, dst) in enumerate(pairs)
        ]
        self.medium.on_deliver = self._deliver
        self.medium.on_frame_sent = self.stats.on_frame_sent
        self.medium.on_queue_drop = self.stats.on_data_queue_drop
        self.medium.on_unicast_lost = self.stats.on_data_link_loss

    def _deliver(self, receiver: int, frame) -> None:
        kind = frame.payload_kind
        now = self.sim.now()
        if kind is PayloadKind.HELLO:
            self.nodes[receiver].on_hello(frame.carried_message, now)
        elif kind is PayloadKind.TC:
            self.nodes[receiver].on_tc(frame.carried_message, frame.src, now)
        elif kind is PayloadKind.PROBE:
            self.nodes[receiver].on_probe(frame.carried_message, now)
        else:
            self.traffic.on_data_frame(receiver, frame)

    def execute(self) -> dict:
        cfg = self.cfg
        for node in self.nodes:
            node.start()
        self.traffic.start_flows(self.flows)
        self.sim.schedule(
            cfg.traffic.warmup_s, EventKind.STATS_SAMPLE, self.stats.begin_measurement
        )
        self.sim.schedule(cfg.duration_s, EventKind.END, _noop)
        self.sim.run_until(cfg.duration_s)
        op_total = OpCounter()
        for node in self.nodes:
            op_total.merge(node.route_ctr)
        return finalize(
            self.stats,
            seed=cfg.seed,
            metric=cfg.metric,
            rate_pps=cfg.rate_pps,
            duration_s=cfg.duration_s,
            warmup_s=cfg.traffic.warmup_s,
            op_counter=op_total,
            cost_weights=cfg.cost,
        )
