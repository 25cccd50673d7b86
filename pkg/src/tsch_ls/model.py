"""Shared domain types and frame-energy primitives.

Units throughout: energies in microjoules, powers in microwatts, times in
seconds. All types are frozen dataclasses.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional


class ConfigError(ValueError):
    """Raised for invalid scenario or strategy parameters."""


def exact(value: float | int | Fraction) -> Fraction:
    """Decimal-exact rational view of a configuration number (``0.02`` -> 1/50)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(str(value))


@dataclass(frozen=True)
class SlotframeConfig:
    slot_duration: float = 0.020
    slots_per_slotframe: int = 101
    retry_limit: int = 15

    def __post_init__(self):
        if not self.slot_duration > 0:
            raise ConfigError("slot_duration must be positive")
        if self.slots_per_slotframe < 1:
            raise ConfigError("slots_per_slotframe must be >= 1")
        if self.retry_limit < 0:
            raise ConfigError("retry_limit must be >= 0")

    @property
    def slotframe_duration(self) -> float:
        return float(self.slotframe_duration_exact)

    @property
    def slotframe_duration_exact(self) -> Fraction:
        return exact(self.slot_duration) * self.slots_per_slotframe

    @property
    def slotframe_rate(self) -> float:
        return 1.0 / self.slotframe_duration

    @property
    def slot_us(self) -> int:
        us = exact(self.slot_duration) * 1_000_000
        if us.denominator != 1:
            raise ConfigError("slot_duration must be a whole number of microseconds")
        return int(us)


@dataclass(frozen=True)
class EnergyModel:
    """Per-event radio energies (µJ) of an OpenMote B running OpenWSN."""

    e_tx0: float = 7.0
    e_tx_per_byte: float = 2.0
    e_rx0: float = 65.0
    e_rx_per_byte: float = 1.3
    e_ack_tx: float = 106.0
    e_ack_rx: float = 79.0
    e_idle_listen: float = 138.0
    # platform drain in µW; never part of the communication figures
    baseline_power: float = 31400.0

    def __post_init__(self):
        for name, value in vars(self).items():
            if value < 0:
                raise ConfigError(f"energy.{name} must be >= 0")


@dataclass(frozen=True)
class FrameSpec:
    payload_frame_bytes: int = 90
    sleep_ie_bytes: int = 3
    xsleep_ie_bytes: int = 5
    empty_sleep_frame_bytes: int = 40

    def __post_init__(self):
        for name, value in vars(self).items():
            if value < 0:
                raise ConfigError(f"frames.{name} must be >= 0")
        if self.xsleep_ie_bytes <= self.sleep_ie_bytes:
            raise ConfigError("xsleep_ie_bytes must exceed sleep_ie_bytes")


class CommandKind(enum.Enum):
    BASIC = "basic"
    EXTENDED = "extended"


BASIC_MAX_SLP = 63
EXTENDED_MAX_SLP = 4095
EXTENDED_MAX_SNZ = 63


@dataclass(frozen=True)
class SleepCommand:
    kind: CommandKind
    n_slp: int
    n_snz: int = 0

    def __post_init__(self):
        if self.kind is CommandKind.BASIC:
            if not 0 <= self.n_slp <= BASIC_MAX_SLP:
                raise ValueError(f"basic n_slp out of range: {self.n_slp}")
            if self.n_snz != 0:
                raise ValueError("basic sleep command has no snooze field")
        else:
            if not 0 <= self.n_slp <= EXTENDED_MAX_SLP:
                raise ValueError(f"xsleep n_slp out of range: {self.n_slp}")
            if not 0 <= self.n_snz <= EXTENDED_MAX_SNZ:
                raise ValueError(f"xsleep n_snz out of range: {self.n_snz}")
            if not (self.n_snz < self.n_slp or self.n_slp == self.n_snz == 0):
                raise ValueError("xsleep requires n_snz < n_slp (or the 0/0 reset)")

    @classmethod
    def basic(cls, n_slp: int) -> "SleepCommand":
        return cls(CommandKind.BASIC, n_slp)

    @classmethod
    def extended(cls, n_slp: int, n_snz: int) -> "SleepCommand":
        return cls(CommandKind.EXTENDED, n_slp, n_snz)

    @property
    def is_reset(self) -> bool:
        return self.kind is CommandKind.EXTENDED and self.n_slp == 0 and self.n_snz == 0

    @property
    def snooze_modulus(self) -> int:
        return self.n_snz + 1


class TrafficKind(enum.Enum):
    PERIODIC = "periodic"
    QUASI_PERIODIC = "quasi_periodic"
    SPORADIC = "sporadic"


@dataclass(frozen=True)
class TrafficSpec:
    """Packet stream offered to the link.

    ``period`` is the nominal period T_c used by the LS strategies. For a
    ``SPORADIC`` stream it is optional and defaults to ``mean_interarrival``.
    Setting ``mean_interarrival`` on a periodic or quasi-periodic stream
    superposes a sporadic stream on it.
    """

    kind: TrafficKind = TrafficKind.PERIODIC
    period: Optional[float] = 30.0
    jitter_fraction: float = 0.0
    mean_interarrival: Optional[float] = None
    min_interarrival: float = 0.0
    relative_deadline: Optional[float] = None
    phase: float = 0.0

    def __post_init__(self):
        if self.kind is TrafficKind.SPORADIC:
            if self.mean_interarrival is None or self.mean_interarrival <= 0:
                raise ConfigError("sporadic traffic needs mean_interarrival > 0")
        elif self.period is None or self.period <= 0:
            raise ConfigError("periodic traffic needs period > 0")
        if self.period is not None and self.period <= 0:
            raise ConfigError("period must be positive")
        if not 0.0 <= self.jitter_fraction < 1.0:
            raise ConfigError("jitter_fraction must lie in [0, 1)")
        if self.mean_interarrival is not None:
            if self.mean_interarrival <= 0:
                raise ConfigError("mean_interarrival must be positive")
            if self.min_interarrival > self.mean_interarrival:
                raise ConfigError("min_interarrival must not exceed mean_interarrival")
        if self.min_interarrival < 0:
            raise ConfigError("min_interarrival must be >= 0")
        if self.relative_deadline is not None and self.relative_deadline <= 0:
            raise ConfigError("relative_deadline must be positive")
        if self.phase < 0:
            raise ConfigError("phase must be >= 0")

    @property
    def nominal_period(self) -> float:
        if self.period is not None:
            return self.period
        return self.mean_interarrival

    @property
    def has_periodic_stream(self) -> bool:
        return self.kind is not TrafficKind.SPORADIC

    @property
    def has_sporadic_stream(self) -> bool:
        return self.kind is TrafficKind.SPORADIC or self.mean_interarrival is not None


class StrategyKind(enum.Enum):
    CONVENTIONAL_TSCH = "tsch"
    ORACLE = "oracle"
    PERIODIC_LS = "basic"
    SLOW_PERIODIC_LS = "basic_slow"
    EXTENDED_PERIODIC_LS = "extended"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def uses_ls(self) -> bool:
        return self in (
            StrategyKind.PERIODIC_LS,
            StrategyKind.SLOW_PERIODIC_LS,
            StrategyKind.EXTENDED_PERIODIC_LS,
        )


_LABELS = {
    StrategyKind.ORACLE: "Oracle",
    StrategyKind.CONVENTIONAL_TSCH: "TSCH",
    StrategyKind.PERIODIC_LS: "Basic",
    StrategyKind.SLOW_PERIODIC_LS: "Basic (slow)",
    StrategyKind.EXTENDED_PERIODIC_LS: "eXtended",
}


def parse_strategy(name: str | StrategyKind) -> StrategyKind:
    if isinstance(name, StrategyKind):
        return name
    key = name.strip().lower().replace("-", "_").replace(" ", "_")
    aliases = {
        "tsch": StrategyKind.CONVENTIONAL_TSCH,
        "conventional_tsch": StrategyKind.CONVENTIONAL_TSCH,
        "oracle": StrategyKind.ORACLE,
        "basic": StrategyKind.PERIODIC_LS,
        "periodic_ls": StrategyKind.PERIODIC_LS,
        "basic_slow": StrategyKind.SLOW_PERIODIC_LS,
        "basic_(slow)": StrategyKind.SLOW_PERIODIC_LS,
        "slow_periodic_ls": StrategyKind.SLOW_PERIODIC_LS,
        "extended": StrategyKind.EXTENDED_PERIODIC_LS,
        "extended_periodic_ls": StrategyKind.EXTENDED_PERIODIC_LS,
    }
    try:
        return aliases[key]
    except KeyError:
        raise ConfigError(f"unknown strategy {name!r}") from None


def frame_tx_energy(model: EnergyModel, length_bytes: int) -> float:
    """Energy of one transmission attempt of a ``length_bytes`` frame (µJ)."""
    return model.e_tx0 + model.e_tx_per_byte * length_bytes


def frame_rx_energy(model: EnergyModel, length_bytes: int) -> float:
    """Energy of receiving one ``length_bytes`` frame (µJ)."""
    return model.e_rx0 + model.e_rx_per_byte * length_bytes


def normalized_period(period: float, cfg: SlotframeConfig) -> float:
    """Period expressed in slotframes."""
    if not period > 0:
        raise ValueError("period must be positive")
    return float(normalized_exact(period, cfg))


def normalized_exact(period: float, cfg: SlotframeConfig) -> Fraction:
    return exact(period) / cfg.slotframe_duration_exact


def floor_slotframes(period: float, cfg: SlotframeConfig) -> int:
    """Exact floor of the normalized period (no float rounding at multiples)."""
    return math.floor(normalized_exact(period, cfg))

