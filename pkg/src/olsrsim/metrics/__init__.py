"""Routing-metric algebras and metric-generic path computation.

Five metrics share one interface: a per-link weight, a path combine rule, a
comparison ("is path a better than b?"), and an identity element.

    HOP     weight 1,            combine +,  minimize
    ETX     weight 1/(d_f*d_r),  combine +,  minimize
    INVETX  weight d_f*d_r,      combine +,  fewest hops, then maximize sum
    ML      weight d_f*d_r,      combine *,  maximize (end-to-end delivery prob)
    MD      weight owd_ms,       combine +,  minimize

Every arithmetic step is routed through an :class:`OpCounter` so the relative
computational overhead of the metrics can be measured.

``compute_paths`` dispatches to a compiled kernel when the extension built,
falling back to a pure-Python twin with identical semantics (same traversal
order, same arithmetic order, same operation counts). Set OLSRSIM_PURE=1 to
force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from . import _pathcore_py

if os.environ.get("OLSRSIM_PURE"):
    _kernel = _pathcore_py
    BACKEND = "pure"
else:
    try:
        from . import _pathcore as _kernel  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _kernel = _pathcore_py
        BACKEND = "pure"


class MetricKind(Enum):
    HOP = "hop"
    ETX = "etx"
    INVETX = "invetx"
    ML = "ml"
    MD = "md"


_KIND_CODE = {
    MetricKind.HOP: 0,
    MetricKind.ETX: 1,
    MetricKind.INVETX: 2,
    MetricKind.ML: 3,
    MetricKind.MD: 4,
}


class ExcludedLink(Exception):
    """A link with zero delivery probability reached weight evaluation.

    Callers must filter q == 0 links before path computation; this error is
    defensive, not a control-flow mechanism.
    """


@dataclass(frozen=True)
class CostWeights:
    """Relative cost of one addition / multiplication / division.

    The default 1/3/8 model is declared, not measured; the overhead-ordering
    guarantees hold for any weights with div > mult > add.
    """

    add: float = 1.0
    mult: float = 3.0
    div: float = 8.0


DEFAULT_COST_WEIGHTS = CostWeights()


@dataclass
class OpCounter:
    adds: int = 0
    mults: int = 0
    divs: int = 0
    compares: int = 0

    def add_counts(self, adds: int, mults: int, divs: int, compares: int) -> None:
        self.adds += adds
        self.mults += mults
        self.divs += divs
        self.compares += compares

    def merge(self, other: "OpCounter") -> None:
        self.add_counts(other.adds, other.mults, other.divs, other.compares)

    def weighted_cost(self, weights: CostWeights = DEFAULT_COST_WEIGHTS) -> float:
        return weights.add * self.adds + weights.mult * self.mults + weights.div * self.divs


@dataclass(frozen=True)
class PathWeight:
    value: float
    hops: int


class LinkState(NamedTuple):
    """Per-link quality sample used in topology snapshots."""

    d_f: float
    d_r: float
    owd_ms: float | None = None


def identity(kind: MetricKind) -> PathWeight:
    """The empty-path weight: 1 for the multiplicative metric, 0 otherwise."""
    return PathWeight(1.0 if kind is MetricKind.ML else 0.0, 0)


def link_weight(kind: MetricKind, rec, ctr: OpCounter) -> float:
    """Weight of one link under `kind`; `rec` needs d_f / d_r / owd_ms fields."""
    if kind is MetricKind.HOP:
        return 1.0
    if kind is MetricKind.MD:
        if rec.owd_ms is None:
            raise ExcludedLink("delay metric needs at least one probe sample")
        if rec.d_f * rec.d_r <= 0.0:
            raise ExcludedLink("link has zero delivery probability")
        return rec.owd_ms
    q = rec.d_f * rec.d_r
    if q <= 0.0:
        raise ExcludedLink("link has zero delivery probability")
    ctr.mults += 1
    if kind is MetricKind.ETX:
        ctr.divs += 1
        return 1.0 / q
    # INVETX and ML both use the raw success product as the link weight.
    return q


def combine(kind: MetricKind, pw: PathWeight, lw: float, ctr: OpCounter) -> PathWeight:
    """Extend a path weight by one link."""
    if kind is MetricKind.ML:
        ctr.mults += 1
        return PathWeight(pw.value * lw, pw.hops + 1)
    ctr.adds += 1
    return PathWeight(pw.value + lw, pw.hops + 1)


def better(kind: MetricKind, a: PathWeight, b: PathWeight, ctr: OpCounter) -> bool:
    """True when path weight `a` is strictly preferable to `b` under `kind`."""
    ctr.compares += 1
    if kind is MetricKind.ML:
        return a.value > b.value or (a.value == b.value and a.hops < b.hops)
    if kind is MetricKind.INVETX:
        return a.hops < b.hops or (a.hops == b.hops and a.value > b.value)
    return a.value < b.value or (a.value == b.value and a.hops < b.hops)


def path_weight(kind: MetricKind, links, ctr: OpCounter | None = None) -> PathWeight:
    """Fold link_weight/combine over an explicit path (a list of link records)."""
    if ctr is None:
        ctr = OpCounter()
    pw = identity(kind)
    for rec in links:
        pw = combine(kind, pw, link_weight(kind, rec, ctr), ctr)
    return pw


def route_cost_profile(kind: MetricKind, n_links: int) -> OpCounter:
    """Closed-form operation profile of evaluating one n-link path weight.

    Counts exactly what the fold performs: one link weight per link plus one
    combine per link, starting from the identity element. Under any cost
    weights with div > mult > add this yields the strict overhead ordering
    INVETX < ML < ETX for every n >= 1.
    """
    if n_links < 1:
        raise ValueError("a path has at least one link")
    n = n_links
    if kind is MetricKind.HOP or kind is MetricKind.MD:
        return OpCounter(adds=n)
    if kind is MetricKind.ETX:
        return OpCounter(adds=n, mults=n, divs=n)
    if kind is MetricKind.INVETX:
        return OpCounter(adds=n, mults=n)
    return OpCounter(mults=2 * n)  # ML: n link products + n path multiplications


def compute_paths(
    kind: MetricKind,
    graph: dict,
    src,
    ctr: OpCounter,
    backend=None,
) -> dict:
    """Single-source best paths over a topology snapshot.

    `graph` maps node-id pairs to :class:`LinkState`; each undirected link must
    appear under exactly one orientation and must have d_f*d_r > 0 (the q == 0
    exclusion happens upstream). Returns {dest: (next_hop, PathWeight)} for
    every reachable destination other than `src`.

    HOP/ETX/MD run Dijkstra on the additive weight with hop-count tie-breaks;
    ML runs the same search maximizing the delivery-probability product;
    INVETX minimizes hop count and then maximizes the summed link products
    over the minimum-hop layering. Neighbor iteration is id-ordered, so the
    result is independent of dict insertion order.
    """
    kernel = backend if backend is not None else _kernel

    nodes = {src}
    for a, b in graph:
        nodes.add(a)
        nodes.add(b)
    order = sorted(nodes)
    index = {nid: i for i, nid in enumerate(order)}
    if src not in index:
        raise ValueError("source not in graph")

    seen_pairs = set()
    eu: list[int] = []
    ev: list[int] = []
    edf: list[float] = []
    edr: list[float] = []
    eowd: list[float] = []
    need_owd = kind is MetricKind.MD
    for a, b in sorted(graph):
        if a == b:
            raise ValueError(f"self-link {a!r}")
        pair = (a, b) if a < b else (b, a)
        if pair in seen_pairs:
            raise ValueError(f"link {pair!r} appears under both orientations")
        seen_pairs.add(pair)
        state = graph[(a, b)]
        if state.d_f * state.d_r <= 0.0:
            raise ExcludedLink(f"link {pair!r} has zero delivery probability")
        owd = state.owd_ms
        if need_owd and owd is None:
            raise ExcludedLink(f"link {pair!r} has no delay sample")
        eu.append(index[a])
        ev.append(index[b])
        edf.append(state.d_f)
        edr.append(state.d_r)
        eowd.append(0.0 if owd is None else owd)

    next_hop, value, hops, counts = kernel.compute_paths_kernel(
        _KIND_CODE[kind], len(order), eu, ev, edf, edr, eowd, index[src]
    )
    ctr.add_counts(*counts)

    result = {}
    for i, nid in enumerate(order):
        if nid == src or next_hop[i] < 0:
            continue
        result[nid] = (order[next_hop[i]], PathWeight(value[i], hops[i]))
    return result


def available_backends() -> dict:
    """Kernel modules by name; 'compiled' is present only if the extension built."""
    backends = {"pure": _pathcore_py}
    try:
        from . import _pathcore  # type: ignore[attr-defined]

        backends["compiled"] = _pathcore
    except ImportError:
        pass
    return backends


__all__ = [
    "BACKEND",
    "CostWeights",
    "DEFAULT_COST_WEIGHTS",
    "ExcludedLink",
    "LinkState",
    "MetricKind",
    "OpCounter",
    "PathWeight",
    "available_backends",
    "better",
    "combine",
    "compute_paths",
    "identity",
    "link_weight",
    "path_weight",
    "route_cost_profile",
]
