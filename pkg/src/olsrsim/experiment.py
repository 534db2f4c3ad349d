"""Experiment orchestration: connectivity screening, single runs, sweeps.

Sweep replication r uses seed = base_seed + r for every metric, so node
placement and link probabilities are identical across metrics and only the
protocol behavior differs. Sweep cells are independent and may run in
parallel worker processes; result rows are always merged in (metric, rate,
replication) order, so output files are byte-identical regardless of worker
count or completion order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from multiprocessing import get_context
from pathlib import Path

from .config import RunConfig, SweepConfig
from .engine import RngStream
from .radio import LossModel, Position, link_success_probability, place_nodes
from .simulation import SimulationRun, loss_model_from_config
from .stats import summarize, write_fig_tables, write_runs_csv, write_summary_csv


class DegenerateTopology(Exception):
    """The placement has no connected pair of nodes to route between."""


@dataclass(frozen=True)
class ConnectivityReport:
    node_count: int
    component_count: int
    giant_size: int
    connected: bool
    pairs: tuple[tuple[int, int], ...]
    resampled_pairs: int


def connected_components(positions: list[Position], model: LossModel) -> list[list[int]]:
    """Components of the (p > 0) adjacency graph, each id-sorted; largest first."""
    n = len(positions)
    seen = [False] * n
    components = []
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [root]
        members = []
        while stack:
            u = stack.pop()
            members.append(u)
            for v in range(n):
                if not seen[v] and link_success_probability(positions[u], positions[v], model) > 0:
                    seen[v] = True
                    stack.append(v)
        components.append(sorted(members))
    components.sort(key=lambda comp: (-len(comp), comp[0]))
    return components


def draw_flow_pairs(rng: RngStream, node_count: int, pair_count: int) -> list[tuple[int, int]]:
    pairs = []
    for _ in range(pair_count):
        src = rng.randrange(node_count)
        dst = rng.randrange(node_count)
        while dst == src:
            dst = rng.randrange(node_count)
        pairs.append((src, dst))
    return pairs


def screen_topology(
    positions: list[Position],
    model: LossModel,
    pairs: list[tuple[int, int]] | None = None,
    rng: RngStream | None = None,
) -> ConnectivityReport:
    """Report connectivity; re-draw any disconnected flow pair inside the giant
    component (the topology itself is kept)."""
    components = connected_components(positions, model)
    giant = components[0]
    if len(giant) < 2:
        raise DegenerateTopology(
            f"largest component has {len(giant)} node(s); nothing can be routed"
        )
    component_of = {}
    for idx, comp in enumerate(components):
        for node in comp:
            component_of[node] = idx
    final_pairs = []
    resampled = 0
    for src, dst in pairs or []:
        if component_of[src] == component_of[dst]:
            final_pairs.append((src, dst))
            continue
        if rng is None:
            raise ValueError("disconnected pair found but no RNG given for resampling")
        resampled += 1
        new_src = giant[rng.randrange(len(giant))]
        new_dst = giant[rng.randrange(len(giant))]
        while new_dst == new_src:
            new_dst = giant[rng.randrange(len(giant))]
        final_pairs.append((new_src, new_dst))
    return ConnectivityReport(
        node_count=len(positions),
        component_count=len(components),
        giant_size=len(giant),
        connected=len(components) == 1,
        pairs=tuple(final_pairs),
        resampled_pairs=resampled,
    )


def run_single(cfg: RunConfig) -> dict:
    """Execute one run and return its stats row."""
    rng_topology = RngStream(cfg.seed, "topology")
    rng_traffic = RngStream(cfg.seed, "traffic")
    positions = place_nodes(cfg.node_count, cfg.arena_side_m, rng_topology)
    model = loss_model_from_config(cfg)
    pairs = draw_flow_pairs(rng_traffic, cfg.node_count, cfg.flow_pairs)
    report = screen_topology(positions, model, pairs=pairs, rng=rng_traffic)
    run = SimulationRun(cfg, positions, list(report.pairs), rng_traffic)
    return run.execute()


def sweep_cells(sweep: SweepConfig) -> list[RunConfig]:
    """Run configs in deterministic (metric, rate, replication) order."""
    cells = []
    for metric in sweep.metrics:
        for rate in sweep.rates:
            for rep in range(sweep.replications):
                cells.append(
                    replace(sweep.base, metric=metric, rate_pps=rate, seed=sweep.base_seed + rep)
                )
    return cells


def run_sweep(
    sweep: SweepConfig, out_dir, workers: int = 1
) -> tuple[list[dict], list[dict]]:
    """Execute every sweep cell, write runs.csv / summary.csv / fig_*.dat."""
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    cells = sweep_cells(sweep)
    if workers > 1:
        context = get_context("spawn")
        with ProcessPoolExecutor(max_workers=workers, mp_context=context) as pool:
            rows = list(pool.map(run_single, cells))
    else:
        rows = [run_single(cell) for cell in cells]
    metric_order = [metric.value for metric in sweep.metrics]
    summary_rows = summarize(rows, metric_order)
    write_runs_csv(rows, out_path / "runs.csv")
    write_summary_csv(summary_rows, out_path / "summary.csv")
    write_fig_tables(summary_rows, out_path, metric_order)
    return rows, summary_rows
