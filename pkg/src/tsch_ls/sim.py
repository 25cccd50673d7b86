"""Slot-by-slot simulation of one TSCH link (transmitter mote, receiver mote).

Only the cell allocated to the link is simulated: one per slotframe. Time is
kept as integer microseconds so long horizons do not drift.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, List, Optional, Tuple

import numpy as np

from .lse import (
    LinkLsState,
    QueuedFrame,
    Side,
    StrategyParams,
    compute_strategy_params,
    on_desync,
    rx_on_frame,
    slot_end,
    tx_on_ack,
    tx_on_failure,
    tx_on_transmission_request,
    tx_select_frame,
    tx_slot_begin,
)
from .model import (
    CommandKind,
    ConfigError,
    EnergyModel,
    FrameSpec,
    SlotframeConfig,
    StrategyKind,
    TrafficKind,
    TrafficSpec,
    exact,
    frame_rx_energy,
    frame_tx_energy,
    normalized_exact,
)

TraceSink = Callable[[dict], None]
# called after every simulated cell with (slotframe, tx state, rx state, queue)
Observer = Callable[[int, LinkLsState, LinkLsState, Deque[QueuedFrame]], None]

TX_EVENTS = ("data_tx", "empty_tx", "ack_rx")
RX_EVENTS = ("data_rx", "empty_rx", "ack_tx", "idle_listen")


@dataclass(frozen=True)
class ChannelSpec:
    data_loss_prob: float = 0.0
    ack_loss_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("data_loss_prob", "ack_loss_prob"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise ConfigError(f"channel.{name} must lie in [0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("channel.seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class Scenario:
    cfg: SlotframeConfig = field(default_factory=SlotframeConfig)
    energy: EnergyModel = field(default_factory=EnergyModel)
    frames: FrameSpec = field(default_factory=FrameSpec)
    traffic: TrafficSpec = field(default_factory=TrafficSpec)
    strategy: StrategyKind = StrategyKind.CONVENTIONAL_TSCH
    channel: ChannelSpec = field(default_factory=ChannelSpec)
    horizon_slotframes: int = 100_000
    allocated_slot_offset: int = 0
    queue_capacity: int = 16
    receiver_ls_enabled: bool = True
    # slotframes at which both motes lose synchronization
    desync_slotframes: Tuple[int, ...] = ()

    def validate(self) -> StrategyParams:
        if self.horizon_slotframes < 1:
            raise ConfigError("horizon_slotframes must be >= 1")
        if not 0 <= self.allocated_slot_offset < self.cfg.slots_per_slotframe:
            raise ConfigError("allocated_slot_offset outside the slotframe")
        if self.queue_capacity < 1:
            raise ConfigError("queue_capacity must be >= 1")
        if self.warmup_slotframes >= self.horizon_slotframes:
            raise ConfigError("horizon does not extend past the warm-up period")
        return compute_strategy_params(self.strategy, self.traffic, self.cfg)

    @property
    def warmup_slotframes(self) -> int:
        return math.ceil(normalized_exact(self.traffic.nominal_period, self.cfg))


@dataclass
class SideTotals:
    energy_uj: float = 0.0
    counts: Dict[str, int] = field(default_factory=dict)
    bytes: Dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class SimReport:
    strategy: StrategyKind
    horizon_slotframes: int
    warmup_slotframes: int
    measured_seconds: float
    tx_energy_uj: float
    rx_energy_uj: float
    tx_power_uw: float
    rx_power_uw: float
    tx_counts: Dict[str, int]
    rx_counts: Dict[str, int]
    tx_bytes: Dict[str, int]
    rx_bytes: Dict[str, int]
    # link-level events: drops, queue_overflows, duplicates, ...
    link_counts: Dict[str, int]
    access_delays: Tuple[float, ...]
    latencies: Tuple[float, ...]
    sporadic_access_delays: Tuple[float, ...]
    access_delay_histogram: Dict[int, int]
    mean_queue_depth: float
    max_queue_depth: int
    slotframe_duration: float

    @property
    def mean_access_delay(self) -> float:
        return float(np.mean(self.access_delays)) if self.access_delays else math.nan

    @property
    def max_access_delay(self) -> float:
        return max(self.access_delays, default=math.nan)

    def summary(self) -> dict:
        lat = measure_latency(self)
        return {
            "strategy": self.strategy.label,
            "horizon_slotframes": self.horizon_slotframes,
            "warmup_slotframes": self.warmup_slotframes,
            "p_tx_uw": self.tx_power_uw,
            "p_rx_uw": self.rx_power_uw,
            "e_tx_uj": self.tx_energy_uj,
            "e_rx_uj": self.rx_energy_uj,
            **{f"tx_{k}": v for k, v in sorted(self.tx_counts.items())},
            **{f"rx_{k}": v for k, v in sorted(self.rx_counts.items())},
            **{k: v for k, v in sorted(self.link_counts.items())},
            "packets": lat.count,
            "mean_access_delay_s": lat.mean_access_delay,
            "max_access_delay_s": lat.max_access_delay,
            "mean_latency_s": lat.mean_latency,
            "max_latency_s": lat.max_latency,
            "mean_queue_depth": self.mean_queue_depth,
            "max_queue_depth": self.max_queue_depth,
        }


@dataclass(frozen=True)
class LatencySummary:
    count: int
    mean_access_delay: float
    max_access_delay: float
    mean_latency: float
    max_latency: float


def measure_latency(report: SimReport) -> LatencySummary:
    """Per-packet access delay and latency statistics of a run.

    The in-slot transmission time is neglected, so latency is measured up to
    the start of the acknowledged slot.
    """
    d = report.access_delays
    lat = report.latencies
    return LatencySummary(
        count=len(lat),
        mean_access_delay=float(np.mean(d)) if d else math.nan,
        max_access_delay=max(d, default=math.nan),
        mean_latency=float(np.mean(lat)) if lat else math.nan,
        max_latency=max(lat, default=math.nan),
    )


def _us(seconds: float) -> int:
    return round(exact(seconds) * 1_000_000)


def _gap_us(traffic: TrafficSpec, rng: np.random.Generator, sporadic: bool) -> int:
    if sporadic:
        gap = max(traffic.min_interarrival, rng.exponential(traffic.mean_interarrival))
        return max(1, round(gap * 1e6))
    period_us = _us(traffic.period)
    if traffic.kind is TrafficKind.QUASI_PERIODIC and traffic.jitter_fraction > 0:
        j = traffic.jitter_fraction * period_us
        return max(1, period_us + round(rng.uniform(-j, j)))
    return period_us


def next_release(
    traffic: TrafficSpec, rng: np.random.Generator, previous_release: float
) -> float:
    """Release time of the packet following one released at ``previous_release``."""
    if previous_release < 0:
        raise ValueError("previous_release must be >= 0")
    sporadic = traffic.kind is TrafficKind.SPORADIC
    return previous_release + _gap_us(traffic, rng, sporadic) / 1e6


class TrafficSource:
    """Merged release stream: the periodic part and an optional sporadic part."""

    def __init__(self, traffic: TrafficSpec, seed_seq: np.random.SeedSequence):
        periodic_ss, sporadic_ss = seed_seq.spawn(2)
        self.traffic = traffic
        self._rng_periodic = np.random.default_rng(periodic_ss)
        self._rng_sporadic = np.random.default_rng(sporadic_ss)
        phase = _us(traffic.phase)
        self._next_periodic = phase if traffic.has_periodic_stream else None
        self._next_sporadic = None
        if traffic.has_sporadic_stream:
            self._next_sporadic = phase + _gap_us(traffic, self._rng_sporadic, True)

    def peek(self) -> int:
        candidates = [t for t in (self._next_periodic, self._next_sporadic) if t is not None]
        return min(candidates)

    def pop(self) -> Tuple[int, bool]:
        p, s = self._next_periodic, self._next_sporadic
        if s is None or (p is not None and p <= s):
            self._next_periodic = p + _gap_us(self.traffic, self._rng_periodic, False)
            return p, False
        self._next_sporadic = s + _gap_us(self.traffic, self._rng_sporadic, True)
        return s, True


def _frame_length(frames: FrameSpec, sent) -> int:
    if sent.frame.is_empty_sleep_frame:
        return frames.empty_sleep_frame_bytes
    if sent.command is None:
        return frames.payload_frame_bytes
    if sent.command.kind is CommandKind.BASIC:
        return frames.payload_frame_bytes + frames.sleep_ie_bytes
    return frames.payload_frame_bytes + frames.xsleep_ie_bytes


def run(
    scenario: Scenario,
    trace: Optional[TraceSink] = None,
    observer: Optional[Observer] = None,
) -> SimReport:
    """Simulate ``scenario.horizon_slotframes`` slotframes of the link."""
    params = scenario.validate()
    cfg, energy, frames = scenario.cfg, scenario.energy, scenario.frames
    strategy = scenario.strategy
    oracle = strategy is StrategyKind.ORACLE
    retry_limit = max(cfg.retry_limit, 1)
    loss_data = scenario.channel.data_loss_prob
    loss_ack = scenario.channel.ack_loss_prob

    traffic_ss, channel_ss = np.random.SeedSequence(scenario.channel.seed).spawn(2)
    source = TrafficSource(scenario.traffic, traffic_ss)
    chan = np.random.default_rng(channel_ss)

    slot_us = cfg.slot_us
    sf_us = slot_us * cfg.slots_per_slotframe
    offset_us = scenario.allocated_slot_offset * slot_us
    warmup = scenario.warmup_slotframes
    desync_at = set(scenario.desync_slotframes)

    tx = LinkLsState(Side.TX, strategy)
    rx = LinkLsState(Side.RX, strategy, ls_enabled=scenario.receiver_ls_enabled)
    queue: Deque[QueuedFrame] = deque()

    txt = SideTotals(counts=dict.fromkeys(TX_EVENTS, 0), bytes={"data_tx": 0, "empty_tx": 0})
    rxt = SideTotals(
        counts=dict.fromkeys(RX_EVENTS, 0), bytes={"data_rx": 0, "empty_rx": 0}
    )
    link = dict.fromkeys(
        ("drops", "queue_overflows", "duplicates", "rx_asleep_misses", "data_lost", "acks_lost"),
        0,
    )
    access_delays: List[float] = []
    latencies: List[float] = []
    sporadic_delays: List[float] = []
    histogram: Dict[int, int] = {}
    depth_sum = 0
    depth_max = 0
    seq = 0
    last_rx_seq = -1
    e_ack_tx, e_ack_rx, e_il = energy.e_ack_tx, energy.e_ack_rx, energy.e_idle_listen

    slot = 0

    def emit(kind: str, side: str, e: float = 0.0) -> None:
        trace({
            "slot": slot,
            "kind": kind,
            "side": side,
            "energy_uj": e,
            "c_tx": tx.c_tx,
            "c_rx": rx.c_rx,
        })

    for f in range(scenario.horizon_slotframes):
        slot = f * cfg.slots_per_slotframe + scenario.allocated_slot_offset
        start_us = f * sf_us + offset_us
        live = f >= warmup

        if f in desync_at:
            on_desync(tx)
            on_desync(rx)
            if trace:
                emit("desync", "link")

        while source.peek() <= start_us:
            release, sporadic = source.pop()
            queued = tx_on_transmission_request(
                tx, queue, params, release, scenario.queue_capacity, sporadic, seq
            )
            seq += 1
            if queued is None and live:
                link["queue_overflows"] += 1
            if queued is None and trace:
                emit("queue_overflow", "tx")

        if live:
            depth_sum += len(queue)
            depth_max = max(depth_max, len(queue))

        tx_slot_begin(tx, queue)
        sent = tx_select_frame(tx, queue, params)
        listening = (sent is not None) if oracle else rx.enabled

        if sent is not None:
            length = _frame_length(frames, sent)
            empty = sent.frame.is_empty_sleep_frame
            kind = "empty_tx" if empty else "data_tx"
            e = frame_tx_energy(energy, length)
            if live:
                txt.energy_uj += e
                txt.counts[kind] += 1
                txt.bytes[kind] += length
            if trace:
                emit(kind, "tx", e)
            if not empty and sent.frame.retries_used == 0 and sent.frame.release_us >= warmup * sf_us:
                d = (start_us - sent.frame.release_us) / 1e6
                access_delays.append(d)
                if sent.frame.sporadic:
                    sporadic_delays.append(d)
                bucket = (start_us - sent.frame.release_us) // sf_us
                histogram[bucket] = histogram.get(bucket, 0) + 1

            data_ok = chan.random() >= loss_data
            if not data_ok and live:
                link["data_lost"] += 1
            acked = False
            if listening and data_ok:
                kind = "empty_rx" if empty else "data_rx"
                e = frame_rx_energy(energy, length)
                if live:
                    rxt.energy_uj += e
                    rxt.counts[kind] += 1
                    rxt.bytes[kind] += length
                if not empty and sent.frame.seq <= last_rx_seq and live:
                    link["duplicates"] += 1
                if not empty:
                    last_rx_seq = max(last_rx_seq, sent.frame.seq)
                if trace:
                    emit(kind, "rx", e)
                if rx_on_frame(rx, sent.command, empty):
                    if live:
                        rxt.energy_uj += e_ack_tx
                        rxt.counts["ack_tx"] += 1
                    if trace:
                        emit("ack_tx", "rx", e_ack_tx)
                    acked = chan.random() >= loss_ack
                    if not acked and live:
                        link["acks_lost"] += 1
            elif listening:
                if live:
                    rxt.energy_uj += e_il
                    rxt.counts["idle_listen"] += 1
                if trace:
                    emit("idle_listen", "rx", e_il)
            else:
                if live:
                    link["rx_asleep_misses"] += 1
                if trace:
                    emit("rx_asleep", "rx")

            if empty:
                tx_on_ack(tx, queue, sent)
            elif acked:
                if live:
                    txt.energy_uj += e_ack_rx
                    txt.counts["ack_rx"] += 1
                if trace:
                    emit("ack_rx", "tx", e_ack_rx)
                if sent.frame.release_us >= warmup * sf_us:
                    latencies.append((start_us - sent.frame.release_us) / 1e6)
                tx_on_ack(tx, queue, sent)
            elif tx_on_failure(sent, retry_limit):
                queue.popleft()
                if live:
                    link["drops"] += 1
                if trace:
                    emit("drop", "tx")
        elif listening:
            if live:
                rxt.energy_uj += e_il
                rxt.counts["idle_listen"] += 1
            if trace:
                emit("idle_listen", "rx", e_il)

        slot_end(tx)
        slot_end(rx)
        if observer:
            observer(f, tx, rx, queue)

    measured_sf = scenario.horizon_slotframes - warmup
    seconds = measured_sf * sf_us / 1e6
    return SimReport(
        strategy=strategy,
        horizon_slotframes=scenario.horizon_slotframes,
        warmup_slotframes=warmup,
        measured_seconds=seconds,
        tx_energy_uj=txt.energy_uj,
        rx_energy_uj=rxt.energy_uj,
        tx_power_uw=txt.energy_uj / seconds,
        rx_power_uw=rxt.energy_uj / seconds,
        tx_counts=txt.counts,
        rx_counts=rxt.counts,
        tx_bytes=txt.bytes,
        rx_bytes=rxt.bytes,
        link_counts=link,
        access_delays=tuple(access_delays),
        latencies=tuple(latencies),
        sporadic_access_delays=tuple(sporadic_delays),
        access_delay_histogram=dict(sorted(histogram.items())),
        mean_queue_depth=depth_sum / measured_sf,
        max_queue_depth=depth_max,
        slotframe_duration=sf_us / 1e6,
    )
