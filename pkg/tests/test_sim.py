import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsch_ls.model import (
    ConfigError,
    EnergyModel,
    FrameSpec,
    SlotframeConfig,
    StrategyKind,
    TrafficKind,
    TrafficSpec,
)
from tsch_ls.sim import ChannelSpec, Scenario, measure_latency, next_release, run

S = StrategyKind
LS_STRATEGIES = (S.PERIODIC_LS, S.SLOW_PERIODIC_LS, S.EXTENDED_PERIODIC_LS)


def scenario(strategy=S.CONVENTIONAL_TSCH, period=30.0, deadline=None, horizon=3000, **kw):
    traffic = kw.pop("traffic", TrafficSpec(period=period, relative_deadline=deadline))
    return Scenario(strategy=strategy, traffic=traffic, horizon_slotframes=horizon, **kw)


# -- release process ---------------------------------------------------------

def test_next_release_periodic():
    rng = np.random.default_rng(0)
    assert next_release(TrafficSpec(period=30), rng, 60.0) == pytest.approx(90.0)


def test_next_release_zero_jitter_is_periodic():
    rng = np.random.default_rng(0)
    t = TrafficSpec(kind=TrafficKind.QUASI_PERIODIC, period=30, jitter_fraction=0.0)
    assert next_release(t, rng, 60.0) == pytest.approx(90.0)


def test_next_release_jitter_bounds():
    rng = np.random.default_rng(1)
    t = TrafficSpec(kind=TrafficKind.QUASI_PERIODIC, period=30, jitter_fraction=0.2)
    gaps = [next_release(t, rng, 0.0) for _ in range(2000)]
    assert min(gaps) >= 24.0 and max(gaps) <= 36.0
    assert np.mean(gaps) == pytest.approx(30.0, abs=0.2)


def test_next_release_sporadic_statistics():
    rng = np.random.default_rng(2)
    t = TrafficSpec(kind=TrafficKind.SPORADIC, period=None, mean_interarrival=120, min_interarrival=10)
    gaps = np.array([next_release(t, rng, 0.0) for _ in range(40000)])
    assert gaps.min() >= 10.0
    # E[max(m, X)] for X ~ Exp(mean) is m + mean * exp(-m / mean)
    expected = 10 + 120 * math.exp(-10 / 120)
    assert gaps.mean() == pytest.approx(expected, rel=0.02)


def test_next_release_rejects_negative():
    with pytest.raises(ValueError):
        next_release(TrafficSpec(), np.random.default_rng(), -1.0)


# -- scenario validation -----------------------------------------------------

@pytest.mark.parametrize(
    "kw",
    [
        dict(horizon=0),
        dict(horizon=10),
        dict(allocated_slot_offset=101),
        dict(queue_capacity=0),
    ],
)
def test_scenario_rejects(kw):
    with pytest.raises(ConfigError):
        run(scenario(**kw))


def test_channel_rejects_bad_probability():
    with pytest.raises(ConfigError):
        ChannelSpec(data_loss_prob=1.0)
    with pytest.raises(ConfigError):
        ChannelSpec(ack_loss_prob=-0.1)


# -- determinism and bookkeeping ---------------------------------------------

def test_determinism():
    sc = scenario(
        S.EXTENDED_PERIODIC_LS, 120, 30,
        channel=ChannelSpec(0.1, 0.05, seed=11),
        traffic=TrafficSpec(kind=TrafficKind.QUASI_PERIODIC, period=120, jitter_fraction=0.1,
                            relative_deadline=30),
    )
    assert run(sc) == run(sc)
    other = dataclasses.replace(sc, channel=ChannelSpec(0.1, 0.05, seed=12))
    assert run(other) != run(sc)


@pytest.mark.parametrize("strategy", list(S))
def test_energy_closure(strategy):
    sc = scenario(strategy, 600 if strategy is S.SLOW_PERIODIC_LS else 120, 30,
                  horizon=5000, channel=ChannelSpec(0.1, 0.1, seed=3))
    r = run(sc)
    en = EnergyModel()
    e_tx = (
        en.e_tx0 * (r.tx_counts["data_tx"] + r.tx_counts["empty_tx"])
        + en.e_tx_per_byte * (r.tx_bytes["data_tx"] + r.tx_bytes["empty_tx"])
        + en.e_ack_rx * r.tx_counts["ack_rx"]
    )
    e_rx = (
        en.e_rx0 * (r.rx_counts["data_rx"] + r.rx_counts["empty_rx"])
        + en.e_rx_per_byte * (r.rx_bytes["data_rx"] + r.rx_bytes["empty_rx"])
        + en.e_ack_tx * r.rx_counts["ack_tx"]
        + en.e_idle_listen * r.rx_counts["idle_listen"]
    )
    assert r.tx_energy_uj == pytest.approx(e_tx, rel=1e-12)
    assert r.rx_energy_uj == pytest.approx(e_rx, rel=1e-12)
    assert r.tx_power_uw == pytest.approx(r.tx_energy_uj / r.measured_seconds)


def test_trace_energy_matches_report():
    sc = scenario(S.PERIODIC_LS, 30, horizon=2000, channel=ChannelSpec(0.1, 0.1, seed=5))
    records = []
    r = run(sc, trace=records.append)
    first_live = r.warmup_slotframes * sc.cfg.slots_per_slotframe
    tx = sum(x["energy_uj"] for x in records if x["side"] == "tx" and x["slot"] >= first_live)
    rx = sum(x["energy_uj"] for x in records if x["side"] == "rx" and x["slot"] >= first_live)
    assert tx == pytest.approx(r.tx_energy_uj)
    assert rx == pytest.approx(r.rx_energy_uj)
    assert all(x["slot"] % 101 == sc.allocated_slot_offset for x in records)


@pytest.mark.parametrize("strategy", list(S))
@pytest.mark.parametrize("loss", [0.0, 0.2])
def test_no_phantom_receptions(strategy, loss):
    period = 600 if strategy is S.SLOW_PERIODIC_LS else 120
    r = run(scenario(strategy, period, 30, horizon=5000, channel=ChannelSpec(loss, loss, seed=9)))
    assert r.rx_counts["data_rx"] <= r.tx_counts["data_tx"]
    assert r.rx_counts["empty_rx"] <= r.tx_counts["empty_tx"]
    assert r.tx_counts["ack_rx"] <= r.rx_counts["ack_tx"]
    if loss == 0.0:
        assert r.rx_counts["data_rx"] == r.tx_counts["data_tx"]
        assert r.link_counts["rx_asleep_misses"] == 0
        assert r.link_counts["duplicates"] == 0


# -- strategy behaviour ------------------------------------------------------

def reference_tsch(period_us, sf_us, offset_us, horizon, warmup):
    """Count data slots and idle slots of lossless conventional TSCH."""
    backlog, next_release_us = 0, 0
    sent = idle = 0
    for f in range(horizon):
        start = f * sf_us + offset_us
        while next_release_us <= start:
            backlog += 1
            next_release_us += period_us
        transmitting = backlog > 0
        backlog -= transmitting
        if f >= warmup:
            sent += transmitting
            idle += not transmitting
    return sent, idle


@pytest.mark.parametrize("period, offset", [(30, 0), (7.5, 13), (600, 100), (30.3, 5)])
def test_tsch_matches_reference(period, offset):
    sc = scenario(S.CONVENTIONAL_TSCH, period, horizon=4000, allocated_slot_offset=offset)
    r = run(sc)
    sent, idle = reference_tsch(round(period * 1e6), 2_020_000, offset * 20_000, 4000,
                                r.warmup_slotframes)
    assert r.tx_counts["data_tx"] == sent
    assert r.rx_counts["idle_listen"] == idle


def test_oracle_never_idles():
    r = run(scenario(S.ORACLE, 30, channel=ChannelSpec(0.0, 0.2, seed=1)))
    assert r.rx_counts["idle_listen"] == 0
    assert r.tx_counts["data_tx"] > 0


@pytest.mark.parametrize("strategy, period", [(S.PERIODIC_LS, 30.3), (S.SLOW_PERIODIC_LS, 606.0)])
def test_exact_multiple_period_has_no_idle_listening(strategy, period):
    r = run(scenario(strategy, period, horizon=6000))
    assert r.rx_counts["idle_listen"] == 0
    assert set(r.latencies) == {0.0}


def test_receiver_without_ls_listens_every_slotframe():
    sc = scenario(S.PERIODIC_LS, 30, receiver_ls_enabled=False)
    r = run(sc)
    tsch = run(scenario(S.CONVENTIONAL_TSCH, 30))
    assert r.rx_counts["idle_listen"] == tsch.rx_counts["idle_listen"]
    assert r.rx_counts["data_rx"] == tsch.rx_counts["data_rx"]


def test_queue_overflow():
    r = run(scenario(S.CONVENTIONAL_TSCH, 1.0, queue_capacity=2))
    assert r.link_counts["queue_overflows"] > 0
    assert r.max_queue_depth <= 2


def test_retry_limit_drops():
    cfg = SlotframeConfig(retry_limit=2)
    r = run(scenario(S.CONVENTIONAL_TSCH, 30, cfg=cfg, channel=ChannelSpec(0.7, 0.0, seed=4)))
    assert r.link_counts["drops"] > 0
    never = run(scenario(S.CONVENTIONAL_TSCH, 30, cfg=cfg))
    assert never.link_counts["drops"] == 0


def test_desync_resets_both_sides():
    states = {}

    def observe(f, tx, rx, queue):
        states[f] = (tx.c_tx, rx.c_rx)

    records = []
    sc = scenario(S.PERIODIC_LS, 120, horizon=1000, desync_slotframes=(500,))
    run(sc, trace=records.append, observer=observe)
    assert any(x["kind"] == "desync" and x["slot"] == 500 * 101 for x in records)
    before = next(x for x in records if x["slot"] == 500 * 101)
    assert (before["c_tx"], before["c_rx"]) == (0, 0)
    assert sum(1 for c in states.values() if c[0] > 0) > 0


PERIOD_RANGES = {
    S.PERIODIC_LS: (2.5, 129.0),
    S.SLOW_PERIODIC_LS: (131.0, 900.0),
    S.EXTENDED_PERIODIC_LS: (6.5, 900.0),
}


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(LS_STRATEGIES),
    st.floats(0.0, 1.0),
    st.integers(0, 100),
    st.integers(0, 2**32),
)
def test_counters_stay_coherent_without_loss(strategy, u, offset, seed):
    lo, hi = PERIOD_RANGES[strategy]
    period = lo + u * (hi - lo)
    traffic = TrafficSpec(
        kind=TrafficKind.QUASI_PERIODIC, period=period, jitter_fraction=0.3,
        relative_deadline=min(period / 2, 30.0),
    )
    sc = Scenario(strategy=strategy, traffic=traffic, allocated_slot_offset=offset,
                  horizon_slotframes=1500, channel=ChannelSpec(seed=seed))

    def observe(f, tx, rx, queue):
        assert tx.c_tx == rx.c_rx
        assert tx.snooze_modulus == rx.snooze_modulus
        assert tx.enabled == rx.enabled

    r = run(sc, observer=observe)
    assert r.link_counts["rx_asleep_misses"] == 0


def test_sporadic_overlay_recorded_separately():
    traffic = TrafficSpec(period=120, mean_interarrival=300, min_interarrival=10, relative_deadline=30)
    r = run(scenario(S.EXTENDED_PERIODIC_LS, traffic=traffic, horizon=20000, channel=ChannelSpec(seed=8)))
    assert 0 < len(r.sporadic_access_delays) < len(r.access_delays)
    assert max(r.sporadic_access_delays) <= 30.0


def test_measure_latency():
    r = run(scenario(S.PERIODIC_LS, 30, horizon=3000))
    lat = measure_latency(r)
    assert lat.count == len(r.latencies) > 0
    assert lat.max_access_delay <= (13 + 1) * 2.02
    assert lat.mean_latency >= 0.0
    assert sum(r.access_delay_histogram.values()) == len(r.access_delays)


def test_frame_spec_changes_bytes():
    r = run(scenario(S.PERIODIC_LS, 30, frames=FrameSpec(payload_frame_bytes=50)))
    assert r.tx_bytes["data_tx"] == r.tx_counts["data_tx"] * 53


def test_slow_strategy_latency_bound():
    traffic = TrafficSpec(kind=TrafficKind.QUASI_PERIODIC, period=600, jitter_fraction=0.3)
    r = run(scenario(S.SLOW_PERIODIC_LS, traffic=traffic, horizon=60000, channel=ChannelSpec(seed=6)))
    assert len(r.access_delays) > 100
    assert r.max_access_delay <= 65 * 2.02
