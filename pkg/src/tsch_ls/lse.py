"""Listening Suspension Entity: per-link counters and strategy policies.

Each link has two ``LinkLsState`` objects, one per side. Within every cell
allocated to the link the simulator drives them in a fixed order:

    tx_slot_begin  ->  tx_select_frame / rx_on_frame / tx_on_ack  ->  slot_end

A side is enabled when its counter is zero. While an xsleep command is in
force it is also enabled whenever the counter is a multiple of the snooze
modulus ``n_snz + 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Deque, List, Optional, Tuple

from .model import (
    BASIC_MAX_SLP,
    EXTENDED_MAX_SLP,
    CommandKind,
    ConfigError,
    SleepCommand,
    SlotframeConfig,
    StrategyKind,
    TrafficSpec,
    floor_slotframes,
    normalized_exact,
)

RESET = SleepCommand.extended(0, 0)


class Side(enum.Enum):
    TX = "tx"
    RX = "rx"


@dataclass
class QueuedFrame:
    release_us: int
    c_fr: int
    retries_used: int = 0
    is_empty_sleep_frame: bool = False
    sporadic: bool = False
    seq: int = 0

    @property
    def release_time(self) -> float:
        return self.release_us / 1e6


@dataclass(frozen=True)
class StrategyParams:
    strategy: StrategyKind
    n_slp: int = 0
    n_snz: int = 0
    n_emp: int = 0
    slow_sequence: Tuple[int, ...] = ()
    # value loaded into C_fr when a frame is queued
    frame_counter: int = 0


@dataclass
class LinkLsState:
    side: Side
    strategy: StrategyKind = StrategyKind.CONVENTIONAL_TSCH
    c_tx: int = 0
    c_rx: int = 0
    snooze_modulus: int = 1
    # True while an xsleep command with a snooze period is in force
    snoozing: bool = False
    counter_set_this_slot: bool = False
    slow_sequence_remaining: List[int] = field(default_factory=list)
    # receiver-side local decision to honour sleep commands
    ls_enabled: bool = True

    @property
    def counter(self) -> int:
        return self.c_tx if self.side is Side.TX else self.c_rx

    @property
    def enabled(self) -> bool:
        counter = self.counter
        return counter == 0 or (self.snoozing and counter % self.snooze_modulus == 0)

    def snapshot(self) -> dict:
        return {
            "side": self.side.value,
            "c_tx": self.c_tx,
            "c_rx": self.c_rx,
            "snooze_modulus": self.snooze_modulus,
            "snoozing": self.snoozing,
            "slow_sequence_remaining": list(self.slow_sequence_remaining),
        }


@dataclass(frozen=True)
class Transmission:
    """What the transmitter puts on air in one cell."""

    frame: QueuedFrame
    command: Optional[SleepCommand] = None
    # empty sleep frames still to be sent if this one is acknowledged
    follow_up: Tuple[int, ...] = ()


def slow_sequence(n_total: int) -> List[int]:
    """Chain of basic commands whose suspensions add up to ``n_total + 1`` slotframes.

    All commands but the last carry 63; the last one carries the remainder.
    """
    if n_total < 0:
        raise ValueError("n_total must be non-negative")
    span = BASIC_MAX_SLP + 1
    return [BASIC_MAX_SLP] * (n_total // span) + [n_total % span]


def compute_strategy_params(
    strategy: StrategyKind, traffic: TrafficSpec, cfg: SlotframeConfig
) -> StrategyParams:
    if not strategy.uses_ls:
        return StrategyParams(strategy)

    period = traffic.nominal_period
    if normalized_exact(period, cfg) <= 1:
        raise ConfigError("listening suspension needs a period longer than one slotframe")
    floor_tau = floor_slotframes(period, cfg)
    n_slp = floor_tau - 1

    if strategy is StrategyKind.PERIODIC_LS:
        if n_slp > BASIC_MAX_SLP:
            raise ConfigError(
                f"n_slp={n_slp} exceeds the basic command range; use the slow strategy"
            )
        return StrategyParams(strategy, n_slp=n_slp, frame_counter=floor_tau)

    if strategy is StrategyKind.SLOW_PERIODIC_LS:
        seq = tuple(slow_sequence(n_slp))
        return StrategyParams(
            strategy,
            n_slp=n_slp,
            n_emp=len(seq) - 1,
            slow_sequence=seq,
            frame_counter=floor_tau,
        )

    # extended
    if traffic.relative_deadline is None:
        raise ConfigError("the extended strategy needs a relative deadline")
    if normalized_exact(period, cfg) > EXTENDED_MAX_SLP + 1:
        raise ConfigError("periods above 4096 slotframes are not supported")
    floor_tau_d = floor_slotframes(traffic.relative_deadline, cfg)
    if floor_tau_d < 1:
        raise ConfigError("relative deadline shorter than one slotframe")
    n_snz = floor_tau_d - 1
    if n_snz > 63:
        raise ConfigError(f"n_snz={n_snz} exceeds the 6-bit snooze field")
    if n_snz >= n_slp:
        raise ConfigError("the deadline must be shorter than the period")
    return StrategyParams(strategy, n_slp=n_slp, n_snz=n_snz, frame_counter=floor_tau)


def wake_slotframes(n_slp: int, n_snz: int) -> set[int]:
    """Offsets (in slotframes after the command) at which the link is enabled.

    The largest element, ``n_slp + 1``, is the full re-enable.
    """
    SleepCommand.extended(n_slp, n_snz)
    if n_slp < 1:
        raise ValueError("n_slp must be >= 1")
    m = n_snz + 1
    wakes = {k for k in range(1, n_slp + 1) if (n_slp - k + 1) % m == 0}
    wakes.add(n_slp + 1)
    return wakes


def n_wup(n_slp: int, n_snz: int) -> int:
    """Temporary wake-ups during one nominal sleeping period."""
    return -(-(n_slp + 1) // (n_snz + 1)) - 1


def tx_on_transmission_request(
    state: LinkLsState,
    queue: Deque[QueuedFrame],
    params: StrategyParams,
    release_us: int,
    capacity: int = 16,
    sporadic: bool = False,
    seq: int = 0,
) -> Optional[QueuedFrame]:
    """Queue a new data frame. Returns ``None`` when the queue is full."""
    state.slow_sequence_remaining.clear()
    if len(queue) >= capacity:
        return None
    frame = QueuedFrame(release_us, params.frame_counter, sporadic=sporadic, seq=seq)
    queue.append(frame)
    return frame


def tx_slot_begin(state: LinkLsState, queue: Deque[QueuedFrame]) -> None:
    for frame in queue:
        if frame.c_fr > 0:
            frame.c_fr -= 1


def _extended_for(c_fr: int, n_snz: int) -> SleepCommand:
    n_slp = min(c_fr, EXTENDED_MAX_SLP)
    if n_snz >= n_slp:
        # a suspension no longer than the snooze period has no wake-ups
        return SleepCommand.basic(min(n_slp, BASIC_MAX_SLP))
    return SleepCommand.extended(n_slp, n_snz)


def tx_select_frame(
    state: LinkLsState, queue: Deque[QueuedFrame], params: StrategyParams
) -> Optional[Transmission]:
    if not state.enabled:
        return None
    strategy = state.strategy

    if not queue:
        if (
            strategy is StrategyKind.SLOW_PERIODIC_LS
            and state.slow_sequence_remaining
            and state.c_tx == 0
        ):
            n = state.slow_sequence_remaining[0]
            empty = QueuedFrame(0, n, is_empty_sleep_frame=True)
            return Transmission(
                empty,
                SleepCommand.basic(n),
                tuple(state.slow_sequence_remaining[1:]),
            )
        return None

    frame = queue[0]
    depth = len(queue)

    if strategy is StrategyKind.PERIODIC_LS:
        if depth == 1 and frame.c_fr > 0:
            return Transmission(frame, SleepCommand.basic(min(frame.c_fr, BASIC_MAX_SLP)))
        return Transmission(frame)

    if strategy is StrategyKind.SLOW_PERIODIC_LS:
        if depth == 1 and frame.c_fr > 0:
            seq = slow_sequence(frame.c_fr)
            return Transmission(frame, SleepCommand.basic(seq[0]), tuple(seq[1:]))
        return Transmission(frame)

    if strategy is StrategyKind.EXTENDED_PERIODIC_LS:
        # c_tx > 0 here means a wake-up inside a nominal sleeping period
        if depth > 1:
            return Transmission(frame, RESET if state.c_tx > 0 else None)
        if frame.c_fr > 0:
            return Transmission(frame, _extended_for(frame.c_fr, params.n_snz))
        return Transmission(frame, RESET if state.c_tx > 0 else None)

    return Transmission(frame)


def _apply(state: LinkLsState, cmd: SleepCommand) -> None:
    if state.side is Side.TX:
        state.c_tx = cmd.n_slp
    else:
        state.c_rx = cmd.n_slp
    state.snooze_modulus = cmd.snooze_modulus
    state.snoozing = cmd.kind is CommandKind.EXTENDED and not cmd.is_reset
    state.counter_set_this_slot = True


def tx_on_ack(state: LinkLsState, queue: Deque[QueuedFrame], sent: Transmission) -> None:
    """Apply an acknowledged data frame, or an empty sleep frame once it is on air.

    Empty sleep frames are not acknowledged, so the simulator calls this right
    after transmitting them.
    """
    if sent.frame.is_empty_sleep_frame:
        _apply(state, sent.command)
        state.slow_sequence_remaining = list(sent.follow_up)
        return
    if queue and queue[0] is sent.frame:
        queue.popleft()
    if sent.command is not None:
        _apply(state, sent.command)
        state.slow_sequence_remaining = list(sent.follow_up)


def tx_on_failure(sent: Transmission, retry_limit: int) -> bool:
    """Book a missing ack. Returns True when the frame must be dropped."""
    if sent.frame.is_empty_sleep_frame:
        return False
    sent.frame.retries_used += 1
    return sent.frame.retries_used >= retry_limit


def rx_on_frame(
    state: LinkLsState, command: Optional[SleepCommand], is_empty_sleep_frame: bool = False
) -> bool:
    """Apply a received frame. Returns whether an ack is sent."""
    if command is not None and state.ls_enabled:
        _apply(state, command)
    return not is_empty_sleep_frame


def slot_end(state: LinkLsState) -> None:
    if not state.counter_set_this_slot:
        if state.side is Side.TX:
            if state.c_tx > 0:
                state.c_tx -= 1
        elif state.c_rx > 0:
            state.c_rx -= 1
    state.counter_set_this_slot = False


def on_desync(state: LinkLsState) -> None:
    state.c_tx = 0
    state.c_rx = 0
    state.snooze_modulus = 1
    state.snoozing = False
    state.counter_set_this_slot = False
    state.slow_sequence_remaining.clear()


def n_emp(period: float, cfg: SlotframeConfig) -> int:
    """Empty sleep frames following each data frame under the slow strategy."""
    return math.ceil(floor_slotframes(period, cfg) / (BASIC_MAX_SLP + 1)) - 1

