"""Closed-form power and worst-case latency of each strategy (error-free link).

Floors and ceilings on normalized periods are taken on exact rationals, so a
period that is an exact multiple of the slotframe never rounds the wrong way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .lse import compute_strategy_params, n_wup
from .model import (
    ConfigError,
    EnergyModel,
    FrameSpec,
    SlotframeConfig,
    StrategyKind,
    TrafficSpec,
    frame_rx_energy,
    frame_tx_energy,
    normalized_exact,
)

SLOW_TWC_SLOTFRAMES = 64


@dataclass(frozen=True)
class PowerFigures:
    strategy: StrategyKind
    p_tx: float
    p_rx: float
    p_rz_oracle: float
    t_wc: float
    n_slp: Optional[int] = None
    n_snz: Optional[int] = None
    n_emp: Optional[int] = None
    n_wup: Optional[int] = None


def analytic_power(
    strategy: StrategyKind,
    traffic: TrafficSpec,
    cfg: SlotframeConfig = SlotframeConfig(),
    energy: EnergyModel = EnergyModel(),
    frames: FrameSpec = FrameSpec(),
) -> PowerFigures:
    if traffic.period is None:
        raise ConfigError("closed-form power needs a periodic stream")
    if normalized_exact(traffic.period, cfg) <= 1:
        raise ConfigError("the period must exceed one slotframe")
    params = compute_strategy_params(strategy, traffic, cfg)

    t_sf = cfg.slotframe_duration
    lam_sf = 1.0 / t_sf
    lam_c = 1.0 / traffic.period
    e_txd = frame_tx_energy(energy, frames.payload_frame_bytes)
    e_rxd = frame_rx_energy(energy, frames.payload_frame_bytes)

    p_tx_tsch = (e_txd + energy.e_ack_rx) * lam_c
    p_rz = (e_rxd + energy.e_ack_tx) * lam_c
    e_il = energy.e_idle_listen

    if strategy is StrategyKind.ORACLE:
        return PowerFigures(strategy, p_tx_tsch, p_rz, p_rz, t_sf)

    if strategy is StrategyKind.CONVENTIONAL_TSCH:
        return PowerFigures(strategy, p_tx_tsch, p_rz + e_il * (lam_sf - lam_c), p_rz, t_sf)

    floor_tau = params.frame_counter
    n_slp = params.n_slp

    if strategy in (StrategyKind.PERIODIC_LS, StrategyKind.SLOW_PERIODIC_LS):
        ie = frames.sleep_ie_bytes
        p_tx = p_tx_tsch + ie * energy.e_tx_per_byte * lam_c
        p_rx = p_rz + ie * energy.e_rx_per_byte * lam_c + e_il * (lam_sf - floor_tau * lam_c)
        if strategy is StrategyKind.PERIODIC_LS:
            return PowerFigures(strategy, p_tx, p_rx, p_rz, (n_slp + 1) * t_sf, n_slp=n_slp)
        n_emp = params.n_emp
        p_tx += frame_tx_energy(energy, frames.empty_sleep_frame_bytes) * n_emp * lam_c
        p_rx += frame_rx_energy(energy, frames.empty_sleep_frame_bytes) * n_emp * lam_c
        return PowerFigures(
            strategy,
            p_tx,
            p_rx,
            p_rz,
            SLOW_TWC_SLOTFRAMES * t_sf,
            n_slp=n_slp,
            n_emp=n_emp,
        )

    n_snz = params.n_snz
    wakes = n_wup(n_slp, n_snz)
    ie = frames.xsleep_ie_bytes
    p_tx = p_tx_tsch + ie * energy.e_tx_per_byte * lam_c
    p_rx = (
        p_rz
        + ie * energy.e_rx_per_byte * lam_c
        + e_il * (lam_sf - (floor_tau - wakes) * lam_c)
    )
    return PowerFigures(
        strategy, p_tx, p_rx, p_rz, (n_snz + 1) * t_sf, n_slp=n_slp, n_snz=n_snz, n_wup=wakes
    )


def oracle_gap_periodic(
    traffic: TrafficSpec,
    cfg: SlotframeConfig = SlotframeConfig(),
    energy: EnergyModel = EnergyModel(),
    frames: FrameSpec = FrameSpec(),
) -> float:
    """Total excess (both sides) of periodic LS over the oracle, in µW.

    Only defined when the period is a whole number of slotframes, where the
    idle-listening term vanishes and the sleep IE bytes are the only cost.
    """
    tau = normalized_exact(traffic.period, cfg)
    if tau.denominator != 1:
        raise ConfigError("period is not a whole number of slotframes")
    return (
        frames.sleep_ie_bytes
        * (energy.e_tx_per_byte + energy.e_rx_per_byte)
        / traffic.period
    )


def deadline_max_nslp(deadline: float, cfg: SlotframeConfig = SlotframeConfig()) -> int:
    """Largest n_slp that keeps the worst-case latency within ``deadline``."""
    tau_d = normalized_exact(deadline, cfg)
    if tau_d <= 1:
        raise ConfigError("no sleep command fits a deadline of one slotframe or less")
    return math.floor(tau_d) - 1
