"""Run and sweep configuration: defaults, plain-text config parsing, validation.

The config file is a flat key = value document; nested sections use dotted
keys (``radio.bitrate_bps = 2000000``). Unknown keys are rejected. An empty
file yields the default scenario: 50 nodes in a 1000 m square, 20 CBR pairs
of 64-byte packets, 900 s horizon.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .metrics import CostWeights, MetricKind


class ConfigError(Exception):
    """Invalid configuration; the message names the offending key."""


@dataclass
class RadioConfig:
    bitrate_bps: float = 1_000_000.0
    queue_capacity: int = 50
    range_m: float = 250.0
    d0_m: float = 100.0
    p_near: float = 1.0
    p_edge: float = 0.6
    control_bytes: int = 134  # HELLO / TC / probe frame size
    header_bytes: int = 20  # added to the data payload on the air


@dataclass
class ProtocolConfig:
    hello_interval_s: float = 2.0
    window_s: float = 20.0
    tc_interval_s: float = 5.0
    probe_interval_s: float = 2.0
    owd_alpha: float = 0.25
    neighbor_hold_mult: float = 3.0
    topology_hold_mult: float = 3.0
    jitter_s: float = 0.1
    tc_ttl: int = 16
    recompute_min_interval_s: float = 1.0
    tc_flooding: str = "mpr"  # "mpr" or "full" (full flooding kept as a baseline)


@dataclass
class TrafficConfig:
    warmup_s: float = 60.0
    data_ttl: int = 32
    payload_bytes: int = 64


@dataclass
class RunConfig:
    arena_side_m: float = 1000.0
    node_count: int = 50
    metric: MetricKind = MetricKind.ETX
    rate_pps: int = 1
    flow_pairs: int = 20
    duration_s: float = 900.0
    seed: int = 1
    radio: RadioConfig = field(default_factory=RadioConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    traffic: TrafficConfig = field(default_factory=TrafficConfig)
    cost: CostWeights = field(default_factory=CostWeights)


DEFAULT_SWEEP_METRICS = (MetricKind.ETX, MetricKind.INVETX, MetricKind.ML, MetricKind.MD)


@dataclass
class SweepConfig:
    base: RunConfig = field(default_factory=RunConfig)
    metrics: tuple[MetricKind, ...] = DEFAULT_SWEEP_METRICS
    rates: tuple[int, ...] = tuple(range(1, 17))
    replications: int = 5
    base_seed: int = 1


def apply_desk_scale(sweep: SweepConfig) -> SweepConfig:
    """CI-speed preset: 300 s runs, 3 replications, rates {1, 4, 8, 12, 16}."""
    return replace(
        sweep,
        base=replace(sweep.base, duration_s=300.0),
        replications=3,
        rates=(1, 4, 8, 12, 16),
    )


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def _parse_metric(key: str, raw: str) -> MetricKind:
    try:
        return MetricKind(raw.strip().lower())
    except ValueError:
        names = ", ".join(k.value for k in MetricKind)
        raise ConfigError(f"{key}: unknown metric {raw!r} (choose from {names})") from None


def _parse_metric_list(key: str, raw: str) -> tuple[MetricKind, ...]:
    return tuple(_parse_metric(key, part) for part in raw.split(",") if part.strip())


def _parse_int_list(key: str, raw: str) -> tuple[int, ...]:
    return tuple(_parse_int(key, part.strip()) for part in raw.split(",") if part.strip())


def _parse_flooding(key: str, raw: str) -> str:
    value = raw.strip().lower()
    if value not in ("mpr", "full"):
        raise ConfigError(f"{key}: expected 'mpr' or 'full', got {raw!r}")
    return value


# key -> (sub-config attribute or "" for top level, field name, parser)
_RUN_KEYS = {
    "arena_side_m": ("", "arena_side_m", _parse_float),
    "node_count": ("", "node_count", _parse_int),
    "metric": ("", "metric", _parse_metric),
    "rate_pps": ("", "rate_pps", _parse_int),
    "flow_pairs": ("", "flow_pairs", _parse_int),
    "duration_s": ("", "duration_s", _parse_float),
    "seed": ("", "seed", _parse_int),
    "radio.bitrate_bps": ("radio", "bitrate_bps", _parse_float),
    "radio.queue_capacity": ("radio", "queue_capacity", _parse_int),
    "radio.range_m": ("radio", "range_m", _parse_float),
    "radio.d0_m": ("radio", "d0_m", _parse_float),
    "radio.p_near": ("radio", "p_near", _parse_float),
    "radio.p_edge": ("radio", "p_edge", _parse_float),
    "radio.control_bytes": ("radio", "control_bytes", _parse_int),
    "radio.header_bytes": ("radio", "header_bytes", _parse_int),
    "protocol.hello_interval_s": ("protocol", "hello_interval_s", _parse_float),
    "protocol.window_s": ("protocol", "window_s", _parse_float),
    "protocol.tc_interval_s": ("protocol", "tc_interval_s", _parse_float),
    "protocol.probe_interval_s": ("protocol", "probe_interval_s", _parse_float),
    "protocol.owd_alpha": ("protocol", "owd_alpha", _parse_float),
    "protocol.neighbor_hold_mult": ("protocol", "neighbor_hold_mult", _parse_float),
    "protocol.topology_hold_mult": ("protocol", "topology_hold_mult", _parse_float),
    "protocol.jitter_s": ("protocol", "jitter_s", _parse_float),
    "protocol.tc_ttl": ("protocol", "tc_ttl", _parse_int),
    "protocol.recompute_min_interval_s": ("protocol", "recompute_min_interval_s", _parse_float),
    "protocol.tc_flooding": ("protocol", "tc_flooding", _parse_flooding),
    "traffic.warmup_s": ("traffic", "warmup_s", _parse_float),
    "traffic.data_ttl": ("traffic", "data_ttl", _parse_int),
    "traffic.payload_bytes": ("traffic", "payload_bytes", _parse_int),
    "cost.add": ("cost", "add", _parse_float),
    "cost.mult": ("cost", "mult", _parse_float),
    "cost.div": ("cost", "div", _parse_float),
}

_SWEEP_KEYS = {
    "sweep.metrics": ("metrics", _parse_metric_list),
    "sweep.rates": ("rates", _parse_int_list),
    "sweep.replications": ("replications", _parse_int),
    "sweep.base_seed": ("base_seed", _parse_int),
}


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines; '#' starts a comment."""
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key in pairs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = raw.strip()
    return pairs


def config_from_pairs(pairs: dict[str, str]) -> RunConfig | SweepConfig:
    run = RunConfig()
    cost_overrides: dict[str, float] = {}
    sweep_fields: dict[str, object] = {}
    for key, raw in pairs.items():
        if key in _SWEEP_KEYS:
            name, parser = _SWEEP_KEYS[key]
            sweep_fields[name] = parser(key, raw)
        elif key in _RUN_KEYS:
            section, name, parser = _RUN_KEYS[key]
            value = parser(key, raw)
            if section == "cost":
                cost_overrides[name] = value
            elif section:
                setattr(getattr(run, section), name, value)
            else:
                setattr(run, name, value)
        else:
            raise ConfigError(f"unknown key {key!r}")
    if cost_overrides:
        run.cost = replace(run.cost, **cost_overrides)
    validate_run_config(run)
    if sweep_fields:
        sweep_fields.setdefault("base_seed", run.seed)
        sweep = SweepConfig(base=run, **sweep_fields)
        validate_sweep_config(sweep)
        return sweep
    return run


def load_config(path) -> RunConfig | SweepConfig:
    """Parse, default and validate a config file; raises ConfigError."""
    text = Path(path).read_text(encoding="utf-8")
    return config_from_pairs(parse_kv_text(text))


def validate_run_config(cfg: RunConfig) -> None:
    if cfg.node_count < 2:
        raise ConfigError(f"node_count: need at least 2 nodes, got {cfg.node_count}")
    if cfg.arena_side_m < 0:
        raise ConfigError(f"arena_side_m: must be non-negative, got {cfg.arena_side_m}")
    if not 1 <= cfg.rate_pps <= 16:
        raise ConfigError(f"rate_pps: must be in 1..16, got {cfg.rate_pps}")
    if cfg.flow_pairs < 0:
        raise ConfigError(f"flow_pairs: must be non-negative, got {cfg.flow_pairs}")
    if cfg.duration_s <= 0:
        raise ConfigError(f"duration_s: must be positive, got {cfg.duration_s}")
    radio = cfg.radio
    if radio.bitrate_bps <= 0:
        raise ConfigError(f"radio.bitrate_bps: must be positive, got {radio.bitrate_bps}")
    if radio.queue_capacity < 1:
        raise ConfigError(f"radio.queue_capacity: must be >= 1, got {radio.queue_capacity}")
    if not 0.0 <= radio.p_edge <= radio.p_near <= 1.0:
        raise ConfigError("radio.p_near/p_edge: need 0 <= p_edge <= p_near <= 1")
    if not 0.0 <= radio.d0_m <= radio.range_m:
        raise ConfigError("radio.d0_m: need 0 <= d0_m <= range_m")
    if radio.control_bytes < 1 or radio.header_bytes < 0:
        raise ConfigError("radio.control_bytes/header_bytes: invalid frame sizing")
    proto = cfg.protocol
    for name in ("hello_interval_s", "window_s", "tc_interval_s", "probe_interval_s"):
        if getattr(proto, name) <= 0:
            raise ConfigError(f"protocol.{name}: must be positive")
    if not 0.0 < proto.owd_alpha <= 1.0:
        raise ConfigError(f"protocol.owd_alpha: must be in (0, 1], got {proto.owd_alpha}")
    if proto.neighbor_hold_mult < 1 or proto.topology_hold_mult < 1:
        raise ConfigError("protocol.*_hold_mult: must be >= 1")
    if not 0.0 <= proto.jitter_s < min(proto.hello_interval_s, proto.tc_interval_s):
        raise ConfigError("protocol.jitter_s: must be >= 0 and below the timer intervals")
    if proto.tc_ttl < 1:
        raise ConfigError(f"protocol.tc_ttl: must be >= 1, got {proto.tc_ttl}")
    if proto.recompute_min_interval_s < 0:
        raise ConfigError("protocol.recompute_min_interval_s: must be non-negative")
    traffic = cfg.traffic
    if traffic.warmup_s < 0 or traffic.warmup_s >= cfg.duration_s:
        raise ConfigError(
            f"traffic.warmup_s: must be in [0, duration_s), got {traffic.warmup_s}"
        )
    if traffic.data_ttl < 1:
        raise ConfigError(f"traffic.data_ttl: must be >= 1, got {traffic.data_ttl}")
    if traffic.payload_bytes < 1:
        raise ConfigError(f"traffic.payload_bytes: must be >= 1, got {traffic.payload_bytes}")


def validate_sweep_config(sweep: SweepConfig) -> None:
    if not sweep.metrics:
        raise ConfigError("sweep.metrics: need at least one metric")
    if not sweep.rates:
        raise ConfigError("sweep.rates: need at least one rate")
    for rate in sweep.rates:
        if not 1 <= rate <= 16:
            raise ConfigError(f"sweep.rates: rates must be in 1..16, got {rate}")
    if sweep.replications < 1:
        raise ConfigError(f"sweep.replications: must be >= 1, got {sweep.replications}")
