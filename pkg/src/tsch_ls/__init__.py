"""Listening suspension for TSCH links: wire codec, protocol state machines,
slot-level simulator and closed-form power model."""

from .analytic import PowerFigures, analytic_power, deadline_max_nslp, oracle_gap_periodic
from .codec import decode_ie, encode_sleep, encode_xsleep
from .lse import compute_strategy_params, n_wup, wake_slotframes
from .model import (
    EnergyModel,
    FrameSpec,
    SleepCommand,
    SlotframeConfig,
    StrategyKind,
    TrafficKind,
    TrafficSpec,
    frame_rx_energy,
    frame_tx_energy,
    normalized_period,
)
from .sim import ChannelSpec, Scenario, SimReport, measure_latency, run

__all__ = [
    "ChannelSpec",
    "EnergyModel",
    "FrameSpec",
    "PowerFigures",
    "Scenario",
    "SimReport",
    "SleepCommand",
    "SlotframeConfig",
    "StrategyKind",
    "TrafficKind",
    "TrafficSpec",
    "analytic_power",
    "compute_strategy_params",
    "deadline_max_nslp",
    "decode_ie",
    "encode_sleep",
    "encode_xsleep",
    "frame_rx_energy",
    "frame_tx_energy",
    "measure_latency",
    "n_wup",
    "normalized_period",
    "oracle_gap_periodic",
    "run",
    "wake_slotframes",
]
