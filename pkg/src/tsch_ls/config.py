"""YAML scenario files.

Every section is optional and missing keys fall back to the OpenMote B
defaults, but ``schema_version`` is mandatory and unknown keys are rejected.
Errors carry the line of the offending key when it is known.

Example::

    schema_version: 1
    strategy: extended
    horizon_slotframes: 100000
    traffic: {kind: periodic, period_s: 600, deadline_s: 30}
    channel: {data_loss: 0.05, ack_loss: 0.05, seed: 7}
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml

from .model import (
    ConfigError,
    EnergyModel,
    FrameSpec,
    SlotframeConfig,
    TrafficKind,
    TrafficSpec,
    parse_strategy,
)
from .sim import ChannelSpec, Scenario

SCHEMA_VERSION = 1

SECTIONS: Dict[str, Tuple[str, ...]] = {
    "slotframe": ("slot_ms", "slots", "retry_limit"),
    "energy": tuple(EnergyModel.__dataclass_fields__),
    "frames": tuple(FrameSpec.__dataclass_fields__),
    "traffic": ("kind", "period_s", "deadline_s", "jitter", "mean_s", "min_s", "phase_s"),
    "channel": ("data_loss", "ack_loss", "seed"),
    "link": ("slot_offset", "queue_capacity", "receiver_ls", "desync_slotframes"),
}
SCALARS = ("schema_version", "strategy", "horizon_slotframes")


class ScenarioError(ConfigError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _key_lines(node, prefix=()) -> Dict[Tuple[str, ...], int]:
    lines = {}
    if isinstance(node, yaml.MappingNode):
        for key, value in node.value:
            path = prefix + (str(key.value),)
            lines[path] = key.start_mark.line + 1
            lines.update(_key_lines(value, path))
    return lines


def parse_scenario(text: str) -> Scenario:
    try:
        data = yaml.safe_load(text)
        lines = _key_lines(yaml.compose(text))
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError(f"malformed YAML: {exc}", mark.line + 1 if mark else None) from None
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping")
    return scenario_from_dict(data, lines)


def load_scenario(path: str | Path) -> Scenario:
    return parse_scenario(Path(path).read_text())


def _section(data: dict, name: str, lines) -> dict:
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise ScenarioError(f"section '{name}' must be a mapping", lines.get((name,)))
    for key in section:
        if key not in SECTIONS[name]:
            raise ScenarioError(f"unknown key '{name}.{key}'", lines.get((name, str(key))))
    return section


def scenario_from_dict(data: Dict[str, Any], lines: Optional[dict] = None) -> Scenario:
    lines = lines or {}
    for key in data:
        if key not in SECTIONS and key not in SCALARS:
            raise ScenarioError(f"unknown key '{key}'", lines.get((str(key),)))
    if "schema_version" not in data:
        raise ScenarioError("missing mandatory key 'schema_version'")
    if data["schema_version"] != SCHEMA_VERSION:
        raise ScenarioError(
            f"unsupported schema_version {data['schema_version']!r}",
            lines.get(("schema_version",)),
        )

    sf = _section(data, "slotframe", lines)
    en = _section(data, "energy", lines)
    fr = _section(data, "frames", lines)
    tr = _section(data, "traffic", lines)
    ch = _section(data, "channel", lines)
    ln = _section(data, "link", lines)

    def build(section: str, fn):
        try:
            return fn()
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{section}: {exc}", lines.get((section,))) from None

    cfg = build(
        "slotframe",
        lambda: SlotframeConfig(
            slot_duration=float(Fraction(str(sf.get("slot_ms", 20))) / 1000),
            slots_per_slotframe=int(sf.get("slots", 101)),
            retry_limit=int(sf.get("retry_limit", 15)),
        ),
    )
    energy = build("energy", lambda: EnergyModel(**{k: float(v) for k, v in en.items()}))
    frames = build("frames", lambda: FrameSpec(**{k: int(v) for k, v in fr.items()}))

    def traffic():
        kind = TrafficKind(str(tr.get("kind", "periodic")).lower())
        default_period = None if kind is TrafficKind.SPORADIC else 30.0
        return TrafficSpec(
            kind=kind,
            period=_opt_float(tr.get("period_s", default_period)),
            jitter_fraction=float(tr.get("jitter", 0.0)),
            mean_interarrival=_opt_float(tr.get("mean_s")),
            min_interarrival=float(tr.get("min_s", 0.0)),
            relative_deadline=_opt_float(tr.get("deadline_s")),
            phase=float(tr.get("phase_s", 0.0)),
        )

    traffic_spec = build("traffic", traffic)
    channel = build(
        "channel",
        lambda: ChannelSpec(
            data_loss_prob=float(ch.get("data_loss", 0.0)),
            ack_loss_prob=float(ch.get("ack_loss", 0.0)),
            seed=int(ch.get("seed", 0)),
        ),
    )
    strategy = build("strategy", lambda: parse_strategy(str(data.get("strategy", "tsch"))))
    scenario = build(
        "link",
        lambda: Scenario(
            cfg=cfg,
            energy=energy,
            frames=frames,
            traffic=traffic_spec,
            strategy=strategy,
            channel=channel,
            horizon_slotframes=int(data.get("horizon_slotframes", 100_000)),
            allocated_slot_offset=int(ln.get("slot_offset", 0)),
            queue_capacity=int(ln.get("queue_capacity", 16)),
            receiver_ls_enabled=bool(ln.get("receiver_ls", True)),
            desync_slotframes=tuple(int(x) for x in ln.get("desync_slotframes", ())),
        ),
    )
    try:
        scenario.validate()
    except ConfigError as exc:
        raise ScenarioError(str(exc)) from None
    return scenario


def scenario_to_dict(scenario: Scenario) -> Dict[str, Any]:
    """Inverse of :func:`scenario_from_dict` (all keys spelled out)."""
    t = scenario.traffic
    return {
        "schema_version": SCHEMA_VERSION,
        "strategy": scenario.strategy.value,
        "horizon_slotframes": scenario.horizon_slotframes,
        "slotframe": {
            "slot_ms": float(Fraction(str(scenario.cfg.slot_duration)) * 1000),
            "slots": scenario.cfg.slots_per_slotframe,
            "retry_limit": scenario.cfg.retry_limit,
        },
        "energy": dict(vars(scenario.energy)),
        "frames": dict(vars(scenario.frames)),
        "traffic": {
            "kind": t.kind.value,
            "period_s": t.period,
            "deadline_s": t.relative_deadline,
            "jitter": t.jitter_fraction,
            "mean_s": t.mean_interarrival,
            "min_s": t.min_interarrival,
            "phase_s": t.phase,
        },
        "channel": {
            "data_loss": scenario.channel.data_loss_prob,
            "ack_loss": scenario.channel.ack_loss_prob,
            "seed": scenario.channel.seed,
        },
        "link": {
            "slot_offset": scenario.allocated_slot_offset,
            "queue_capacity": scenario.queue_capacity,
            "receiver_ls": scenario.receiver_ls_enabled,
            "desync_slotframes": list(scenario.desync_slotframes),
        },
    }


def _opt_float(value) -> Optional[float]:
    return None if value is None else float(value)
