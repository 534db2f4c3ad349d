"""Per-node OLSR control plane.

Each node broadcasts HELLOs carrying, for every neighbor, the count of that
neighbor's HELLOs received in the last `w` seconds; receivers derive the
reverse delivery ratio from their own reception window and the forward ratio
from the report about themselves. HELLOs also carry the sender's MPR choice,
which is how nodes learn their MPR selectors. TC messages advertise the
originator's MPR-selector links together with their measured (d_f, d_r, owd)
and are flooded through MPRs only. Probe messages (delay-metric runs only)
sample one-way delay, smoothed with an EWMA.

A link whose reception window is empty has reverse ratio 0 and is excluded
from routing under every metric. Route recomputation is event-driven and
debounced to at most once per second of simulated time per node.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace

from .config import ProtocolConfig
from .engine import EventKind, RngStream, Simulator
from .metrics import LinkState, MetricKind, OpCounter, PathWeight, compute_paths
from .radio import BROADCAST, Frame, Medium, PayloadKind


class ReceptionWindow:
    """Sliding record of HELLO reception times over the last `w` seconds.

    Before a full window has elapsed the expected count is pro-rated by
    elapsed time, so links are not penalized at startup.
    """

    __slots__ = ("window_s", "interval_s", "start_s", "_times")

    def __init__(self, window_s: float, interval_s: float, start_s: float = 0.0):
        self.window_s = window_s
        self.interval_s = interval_s
        self.start_s = start_s
        self._times: deque[float] = deque()

    def mark(self, now: float) -> None:
        self._times.append(now)
        self._prune(now)

    def _prune(self, now: float) -> None:
        cutoff = now - self.window_s
        times = self._times
        while times and times[0] <= cutoff:
            times.popleft()

    def count(self, now: float) -> int:
        self._prune(now)
        return len(self._times)

    def expected(self, now: float) -> float:
        elapsed = max(self.interval_s, now - self.start_s)
        return min(self.window_s, elapsed) / self.interval_s

    def ratio(self, now: float) -> float:
        return min(1.0, self.count(now) / self.expected(now))


def delivery_ratio(window: ReceptionWindow, now: float) -> float:
    """Received / expected HELLOs over the window, clamped to [0, 1]."""
    return window.ratio(now)


@dataclass
class LinkQualityRecord:
    neighbor: int
    window: ReceptionWindow
    d_f: float = 0.0  # fraction of our HELLOs the neighbor reports receiving
    owd_ms: float | None = None  # smoothed probe one-way delay, ms
    last_heard: float = float("-inf")

    def d_r(self, now: float) -> float:
        return self.window.ratio(now)

    def q(self, now: float) -> float:
        return self.d_f * self.window.ratio(now)


@dataclass(frozen=True)
class HelloMessage:
    originator: int
    neighbor_reports: tuple  # (neighbor_id, hellos_received_in_window)
    mprs: frozenset  # neighbors the originator selected as MPR
    seq: int


@dataclass(frozen=True)
class TcMessage:
    originator: int
    advertised: tuple  # (neighbor_id, d_f, d_r, owd_ms)
    seq: int
    ttl: int


@dataclass(frozen=True)
class ProbeMessage:
    originator: int
    sent_at: float
    seq: int


@dataclass(frozen=True)
class TopologyEntry:
    d_f: float
    d_r: float
    owd_ms: float | None
    freshness: float


class TopologyBase:
    """Learned remote link state: (from_node, to_node) -> TopologyEntry."""

    def __init__(self):
        self.entries: dict[tuple[int, int], TopologyEntry] = {}

    def update(self, from_node: int, to_node: int, d_f: float, d_r: float,
               owd_ms: float | None, now: float) -> None:
        self.entries[(from_node, to_node)] = TopologyEntry(d_f, d_r, owd_ms, now)

    def purge(self, now: float, hold_s: float) -> None:
        cutoff = now - hold_s
        stale = [key for key, entry in self.entries.items() if entry.freshness < cutoff]
        for key in stale:
            del self.entries[key]


@dataclass(frozen=True)
class RouteEntry:
    next_hop: int
    path_weight: PathWeight
    hop_count: int


class OlsrNode:
    def __init__(
        self,
        node_id: int,
        sim: Simulator,
        medium: Medium | None,
        protocol: ProtocolConfig,
        metric: MetricKind,
        jitter_rng: RngStream,
        control_bytes: int = 134,
    ):
        self.id = node_id
        self.sim = sim
        self.medium = medium
        self.protocol = protocol
        self.metric = metric
        self.jitter_rng = jitter_rng
        self.control_bytes = control_bytes
        self.records: dict[int, LinkQualityRecord] = {}
        self.last_hello: dict[int, HelloMessage] = {}
        self.topology = TopologyBase()
        self.mprs: set[int] = set()
        self.mpr_selectors: set[int] = set()
        self.routes: dict[int, RouteEntry] = {}
        self.route_ctr = OpCounter()
        self.route_recomputes = 0
        self.hellos_emitted = 0
        self._hello_seq = 0
        self._tc_seq = 0
        self._probe_seq = 0
        self._seen_tc: set[tuple[int, int]] = set()
        self._recompute_pending = False
        self._last_recompute = float("-inf")

    # -- timers ------------------------------------------------------------

    def start(self) -> None:
        """Schedule the periodic emitters, each phase-staggered within its interval."""
        p = self.protocol
        hello_grid = self.jitter_rng.uniform() * p.hello_interval_s
        self._schedule_hello(hello_grid)
        tc_grid = self.jitter_rng.uniform() * p.tc_interval_s
        self._schedule_tc(tc_grid)
        if self.metric is MetricKind.MD:
            probe_grid = self.jitter_rng.uniform() * p.probe_interval_s
            self._schedule_probe(probe_grid)

    def _schedule_hello(self, grid_t: float) -> None:
        fire = grid_t + self.jitter_rng.uniform() * self.protocol.jitter_s
        self.sim.schedule(fire, EventKind.HELLO_TIMER, self._hello_timer, grid_t)

    def _hello_timer(self, grid_t: float) -> None:
        self._emit_hello()
        self._schedule_hello(grid_t + self.protocol.hello_interval_s)

    def _schedule_tc(self, grid_t: float) -> None:
        fire = grid_t + self.jitter_rng.uniform() * self.protocol.jitter_s
        self.sim.schedule(fire, EventKind.TC_TIMER, self._tc_timer, grid_t)

    def _tc_timer(self, grid_t: float) -> None:
        self._emit_tc()
        self._schedule_tc(grid_t + self.protocol.tc_interval_s)

    def _schedule_probe(self, grid_t: float) -> None:
        fire = grid_t + self.jitter_rng.uniform() * self.protocol.jitter_s
        self.sim.schedule(fire, EventKind.PROBE_TIMER, self._probe_timer, grid_t)

    def _probe_timer(self, grid_t: float) -> None:
        self._emit_probe()
        self._schedule_probe(grid_t + self.protocol.probe_interval_s)

    # -- emission ----------------------------------------------------------

    def _emit_hello(self) -> None:
        now = self.sim.now()
        self.mprs = self.select_mprs(now)
        reports = []
        for nbr in sorted(self.records):
            count = self.records[nbr].window.count(now)
            if count > 0:
                reports.append((nbr, count))
        msg = HelloMessage(self.id, tuple(reports), frozenset(self.mprs), self._hello_seq)
        self._hello_seq += 1
        self.hellos_emitted += 1
        self._broadcast(PayloadKind.HELLO, msg, now)

    def _emit_tc(self) -> None:
        # Advertise every symmetric neighbor with its measured link state, so
        # remote nodes see a complete quality map rather than only the MPR
        # backbone; TCs are still suppressed while nobody selected us.
        now = self.sim.now()
        if not self.mpr_selectors & set(self.symmetric_neighbors(now)):
            return
        advertised = []
        for s in self.symmetric_neighbors(now):
            rec = self.records[s]
            advertised.append((s, rec.d_f, rec.window.ratio(now), rec.owd_ms))
        msg = TcMessage(self.id, tuple(advertised), self._tc_seq, self.protocol.tc_ttl)
        self._tc_seq += 1
        self._broadcast(PayloadKind.TC, msg, now)

    def _emit_probe(self) -> None:
        now = self.sim.now()
        msg = ProbeMessage(self.id, now, self._probe_seq)
        self._probe_seq += 1
        self._broadcast(PayloadKind.PROBE, msg, now)

    def _broadcast(self, kind: PayloadKind, msg, now: float) -> None:
        frame = Frame(self.id, BROADCAST, self.control_bytes, kind, msg, now)
        self.medium.transmit(self.id, frame)

    # -- reception ---------------------------------------------------------

    def on_hello(self, msg: HelloMessage, rx_time: float) -> None:
        sender = msg.originator
        rec = self.records.get(sender)
        if rec is None:
            rec = LinkQualityRecord(
                sender,
                ReceptionWindow(self.protocol.window_s, self.protocol.hello_interval_s),
            )
            self.records[sender] = rec
        rec.window.mark(rx_time)
        rec.last_heard = rx_time
        d_f = 0.0
        for nbr, count in msg.neighbor_reports:
            if nbr == self.id:
                d_f = min(1.0, count / rec.window.expected(rx_time))
                break
        rec.d_f = d_f
        self.last_hello[sender] = msg
        if self.id in msg.mprs:
            self.mpr_selectors.add(sender)
        else:
            self.mpr_selectors.discard(sender)
        self._mark_dirty()

    def on_tc(self, msg: TcMessage, sender: int, rx_time: float) -> None:
        if msg.originator == self.id:
            return
        key = (msg.originator, msg.seq)
        if key in self._seen_tc:
            return
        self._seen_tc.add(key)
        for nbr, d_f, d_r, owd_ms in msg.advertised:
            self.topology.update(msg.originator, nbr, d_f, d_r, owd_ms, rx_time)
        self._mark_dirty()
        forward = self.protocol.tc_flooding == "full" or sender in self.mpr_selectors
        if forward and msg.ttl > 1:
            self._broadcast(PayloadKind.TC, replace(msg, ttl=msg.ttl - 1), rx_time)

    def on_probe(self, msg: ProbeMessage, rx_time: float) -> None:
        sender = msg.originator
        rec = self.records.get(sender)
        if rec is None:
            rec = LinkQualityRecord(
                sender,
                ReceptionWindow(self.protocol.window_s, self.protocol.hello_interval_s),
            )
            self.records[sender] = rec
        sample_ms = (rx_time - msg.sent_at) * 1000.0
        alpha = self.protocol.owd_alpha
        if rec.owd_ms is None:
            rec.owd_ms = sample_ms
        else:
            rec.owd_ms = (1.0 - alpha) * rec.owd_ms + alpha * sample_ms
        self._mark_dirty()

    # -- neighborhood ------------------------------------------------------

    def symmetric_neighbors(self, now: float) -> list[int]:
        """Neighbors heard within the hold time with d_f > 0 and d_r > 0, id-ordered."""
        hold = self.protocol.neighbor_hold_mult * self.protocol.hello_interval_s
        cutoff = now - hold
        out = []
        for nbr in sorted(self.records):
            rec = self.records[nbr]
            if rec.last_heard < cutoff or rec.d_f <= 0.0:
                continue
            if rec.window.ratio(now) <= 0.0:
                continue
            out.append(nbr)
        return out

    def select_mprs(self, now: float) -> set[int]:
        """Greedy 2-hop cover: first the sole reachers of some 2-hop node, then
        repeatedly the neighbor covering the most uncovered nodes (ties: higher
        link quality toward the candidate, then lower id). Metric values do not
        otherwise influence the choice."""
        sym = self.symmetric_neighbors(now)
        sym_set = set(sym)
        coverage: dict[int, set[int]] = {}
        for b in sym:
            hello = self.last_hello.get(b)
            if hello is None:
                continue
            two = {nbr for nbr, count in hello.neighbor_reports if count > 0}
            two.discard(self.id)
            two -= sym_set
            coverage[b] = two
        uncovered: set[int] = set()
        for two in coverage.values():
            uncovered |= two
        chosen: set[int] = set()
        for c in sorted(uncovered):
            reachers = [b for b in sym if c in coverage.get(b, ())]
            if len(reachers) == 1:
                chosen.add(reachers[0])
        for b in chosen:
            uncovered -= coverage[b]
        while uncovered:
            best_b = None
            best_key = None
            for b in sym:
                if b in chosen:
                    continue
                gain = len(coverage.get(b, set()) & uncovered)
                if gain == 0:
                    continue
                key = (gain, self.records[b].q(now), -b)
                if best_key is None or key > best_key:
                    best_key = key
                    best_b = b
            if best_b is None:
                break
            chosen.add(best_b)
            uncovered -= coverage[best_b]
        return chosen

    # -- routing -----------------------------------------------------------

    def _mark_dirty(self) -> None:
        if self._recompute_pending:
            return
        self._recompute_pending = True
        now = self.sim.now()
        fire = max(now, self._last_recompute + self.protocol.recompute_min_interval_s)
        self.sim.schedule(fire, EventKind.ROUTE_RECOMPUTE, self._recompute_routes)

    def topology_snapshot(self, now: float) -> dict[tuple[int, int], LinkState]:
        """Undirected link map for route computation.

        Own symmetric links come from live records (authoritative), remote
        links from TC entries; when both endpoints advertised a remote link
        the fresher entry wins. q == 0 links never enter the snapshot, and the
        delay metric additionally requires a probe sample.
        """
        need_owd = self.metric is MetricKind.MD
        edges: dict[tuple[int, int], LinkState] = {}
        freshness: dict[tuple[int, int], float] = {}
        for b in self.symmetric_neighbors(now):
            rec = self.records[b]
            d_r = rec.window.ratio(now)
            if rec.d_f * d_r <= 0.0:
                continue
            if need_owd and rec.owd_ms is None:
                continue
            key = (self.id, b) if self.id < b else (b, self.id)
            edges[key] = LinkState(rec.d_f, d_r, rec.owd_ms)
            freshness[key] = float("inf")
        self.topology.purge(now, self.protocol.topology_hold_mult * self.protocol.tc_interval_s)
        for a, c in sorted(self.topology.entries):
            if a == self.id or c == self.id:
                continue  # own links are covered by live records
            entry = self.topology.entries[(a, c)]
            if entry.d_f * entry.d_r <= 0.0:
                continue
            if need_owd and entry.owd_ms is None:
                continue
            key = (a, c) if a < c else (c, a)
            if key in edges and freshness[key] >= entry.freshness:
                continue
            edges[key] = LinkState(entry.d_f, entry.d_r, entry.owd_ms)
            freshness[key] = entry.freshness
        return edges

    def _recompute_routes(self) -> None:
        now = self.sim.now()
        self._recompute_pending = False
        self._last_recompute = now
        self.recompute_routes(now)

    def recompute_routes(self, now: float) -> dict[int, RouteEntry]:
        snapshot = self.topology_snapshot(now)
        result = compute_paths(self.metric, snapshot, self.id, self.route_ctr)
        self.routes = {
            dest: RouteEntry(next_hop, pw, pw.hops) for dest, (next_hop, pw) in result.items()
        }
        self.route_recomputes += 1
        return self.routes
