#!/usr/bin/env python3
"""Power, delay and drops of each strategy as the frame loss probability grows.

Losses are not covered by the closed-form model, so this is purely empirical.
"""

import argparse

import numpy as np

from tsch_ls.model import StrategyKind, TrafficSpec
from tsch_ls.sim import ChannelSpec, Scenario, run

CASES = (
    (StrategyKind.CONVENTIONAL_TSCH, TrafficSpec(period=120)),
    (StrategyKind.PERIODIC_LS, TrafficSpec(period=120)),
    (StrategyKind.EXTENDED_PERIODIC_LS, TrafficSpec(period=120, relative_deadline=30)),
    (StrategyKind.SLOW_PERIODIC_LS, TrafficSpec(period=600)),
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-loss", type=float, default=0.3)
    parser.add_argument("--steps", type=int, default=7)
    parser.add_argument("--horizon", type=int, default=50_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'strategy':<12} {'loss':>5} {'P_tx':>8} {'P_rx':>8} {'mean d':>7} {'max d':>7} "
          f"{'drops':>6} {'asleep':>7}")
    for strategy, traffic in CASES:
        for p in np.linspace(0.0, args.max_loss, args.steps):
            r = run(Scenario(strategy=strategy, traffic=traffic, horizon_slotframes=args.horizon,
                             channel=ChannelSpec(p, p, seed=args.seed)))
            print(f"{strategy.label:<12} {p:>5.2f} {r.tx_power_uw:>8.4f} {r.rx_power_uw:>8.4f} "
                  f"{r.mean_access_delay:>7.2f} {r.max_access_delay:>7.2f} "
                  f"{r.link_counts['drops']:>6} {r.link_counts['rx_asleep_misses']:>7}")


if __name__ == "__main__":
    main()
