"""Run statistics, CSV export, sweep summaries and figure tables.

Measurement window: data and control counters are reported for [warmup, end]
(flows only start after warmup); route-computation op cost covers the whole
run, since protocol work starts at t = 0. NRL with zero delivered packets is
reported as the `inf` sentinel, never 0.
"""

from __future__ import annotations

import csv
import math
import statistics
from enum import Enum
from pathlib import Path

from .engine import InvariantViolation
from .metrics import CostWeights, MetricKind, OpCounter
from .radio import CONTROL_KINDS, Frame, PayloadKind


class DropCause(Enum):
    NO_ROUTE = "noroute"
    QUEUE_DROP = "queuedrop"
    LINK_LOSS = "linkloss"
    TTL_EXPIRED = "ttlexpired"


RUN_COLUMNS = [
    "seed",
    "metric",
    "rate_pps",
    "data_sent",
    "data_delivered",
    "throughput_bps",
    "pdr",
    "e2ed_ms_mean",
    "e2ed_ms_p95",
    "nrl",
    "control_tx",
    "op_cost_total",
    "drops_noroute",
    "drops_queuedrop",
    "drops_linkloss",
    "drops_ttlexpired",
    "in_flight",
]

SUMMARY_FIELDS = [
    "throughput_bps",
    "pdr",
    "e2ed_ms_mean",
    "e2ed_ms_p95",
    "nrl",
    "control_tx",
    "op_cost_total",
]


class RunStats:
    def __init__(self, payload_bytes: int = 64):
        self.payload_bytes = payload_bytes
        self.data_sent = 0
        self.data_delivered = 0
        self.drops = {cause: 0 for cause in DropCause}
        self.delays_s: list[float] = []
        self.in_flight: set[tuple[int, int]] = set()
        self._control_all = 0
        self._control_baseline = 0

    # -- hooks wired into the medium / traffic layers ------------------------

    def on_frame_sent(self, frame: Frame) -> None:
        if frame.payload_kind in CONTROL_KINDS:
            self._control_all += 1

    def on_data_sent(self, packet) -> None:
        self.data_sent += 1
        self.in_flight.add((packet.flow_id, packet.seq))

    def on_delivered(self, packet, now: float) -> None:
        self.data_delivered += 1
        self.in_flight.discard((packet.flow_id, packet.seq))
        self.delays_s.append(now - packet.sent_at)

    def on_drop(self, packet, cause: DropCause) -> None:
        self.drops[cause] += 1
        self.in_flight.discard((packet.flow_id, packet.seq))

    def on_data_queue_drop(self, frame: Frame) -> None:
        if frame.payload_kind is PayloadKind.DATA:
            self.on_drop(frame.carried_message, DropCause.QUEUE_DROP)

    def on_data_link_loss(self, frame: Frame) -> None:
        if frame.payload_kind is PayloadKind.DATA:
            self.on_drop(frame.carried_message, DropCause.LINK_LOSS)

    def begin_measurement(self) -> None:
        """Mark the start of the measurement window (control sent so far is warm-up)."""
        self._control_baseline = self._control_all

    @property
    def control_tx(self) -> int:
        return self._control_all - self._control_baseline


def _percentile_ms(delays_s: list[float], fraction: float) -> float:
    if not delays_s:
        return math.nan
    ordered = sorted(delays_s)
    rank = max(1, math.ceil(fraction * len(ordered)))
    return ordered[rank - 1] * 1000.0


def finalize(
    stats: RunStats,
    *,
    seed: int,
    metric: MetricKind,
    rate_pps: int,
    duration_s: float,
    warmup_s: float,
    op_counter: OpCounter,
    cost_weights: CostWeights,
) -> dict:
    """One CSV row for a finished run; checks the conservation identity."""
    dropped = sum(stats.drops.values())
    if stats.data_sent != stats.data_delivered + dropped + len(stats.in_flight):
        raise InvariantViolation(
            f"packet conservation violated: sent={stats.data_sent} "
            f"delivered={stats.data_delivered} dropped={dropped} "
            f"in_flight={len(stats.in_flight)}"
        )
    window_s = duration_s - warmup_s
    throughput_bps = stats.data_delivered * stats.payload_bytes * 8.0 / window_s
    pdr = stats.data_delivered / stats.data_sent if stats.data_sent else math.nan
    if stats.delays_s:
        e2ed_mean = sum(stats.delays_s) / len(stats.delays_s) * 1000.0
    else:
        e2ed_mean = math.nan
    nrl = stats.control_tx / stats.data_delivered if stats.data_delivered else math.inf
    return {
        "seed": seed,
        "metric": metric.value,
        "rate_pps": rate_pps,
        "data_sent": stats.data_sent,
        "data_delivered": stats.data_delivered,
        "throughput_bps": throughput_bps,
        "pdr": pdr,
        "e2ed_ms_mean": e2ed_mean,
        "e2ed_ms_p95": _percentile_ms(stats.delays_s, 0.95),
        "nrl": nrl,
        "control_tx": stats.control_tx,
        "op_cost_total": op_counter.weighted_cost(cost_weights),
        "drops_noroute": stats.drops[DropCause.NO_ROUTE],
        "drops_queuedrop": stats.drops[DropCause.QUEUE_DROP],
        "drops_linkloss": stats.drops[DropCause.LINK_LOSS],
        "drops_ttlexpired": stats.drops[DropCause.TTL_EXPIRED],
        "in_flight": len(stats.in_flight),
    }


def write_runs_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=RUN_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def _group_mean(values: list[float]) -> float:
    return sum(values) / len(values)


def _group_std(values: list[float]) -> float:
    if len(values) < 2 or not all(math.isfinite(v) for v in values):
        return math.nan
    return statistics.stdev(values)


def summarize(rows: list[dict], metric_order: list[str]) -> list[dict]:
    """Mean and sample standard deviation per (metric, rate) group."""
    groups: dict[tuple[str, int], list[dict]] = {}
    for row in rows:
        groups.setdefault((row["metric"], row["rate_pps"]), []).append(row)
    rates = sorted({rate for _, rate in groups})
    out = []
    for metric in metric_order:
        for rate in rates:
            members = groups.get((metric, rate))
            if not members:
                continue
            summary: dict = {
                "metric": metric,
                "rate_pps": rate,
                "replications": len(members),
            }
            for column in SUMMARY_FIELDS:
                values = [float(row[column]) for row in members]
                summary[f"{column}_mean"] = _group_mean(values)
                summary[f"{column}_std"] = _group_std(values)
            out.append(summary)
    return out


def write_summary_csv(summary_rows: list[dict], path) -> None:
    columns = ["metric", "rate_pps", "replications"]
    for column in SUMMARY_FIELDS:
        columns.append(f"{column}_mean")
        columns.append(f"{column}_std")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(summary_rows)


_FIG_TABLES = [
    ("fig_throughput.dat", "throughput_bps_mean"),
    ("fig_e2ed.dat", "e2ed_ms_mean_mean"),
    ("fig_nrl.dat", "nrl_mean"),
    ("fig_opcost.dat", "op_cost_total_mean"),
]


def write_fig_tables(summary_rows: list[dict], out_dir, metric_order: list[str]) -> None:
    """Gnuplot-style whitespace tables: rate_pps in column 1, one column per metric."""
    out_dir = Path(out_dir)
    rates = sorted({row["rate_pps"] for row in summary_rows})
    by_key = {(row["metric"], row["rate_pps"]): row for row in summary_rows}
    for filename, field in _FIG_TABLES:
        lines = ["# rate_pps " + " ".join(metric_order)]
        for rate in rates:
            cells = [str(rate)]
            for metric in metric_order:
                row = by_key.get((metric, rate))
                cells.append(repr(row[field]) if row is not None else "nan")
            lines.append(" ".join(cells))
        (out_dir / filename).write_text("\n".join(lines) + "\n", encoding="utf-8")
