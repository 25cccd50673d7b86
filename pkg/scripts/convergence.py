#!/usr/bin/env python3
"""Simulate every table configuration and compare with the closed-form power."""

import argparse
import time

from tsch_ls.analytic import analytic_power
from tsch_ls.sim import ChannelSpec, Scenario, run
from tsch_ls.table1 import GOLDEN, traffic_for


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=100_000, help="slotframes per run")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print(f"{'config':<24} {'sim P_tx':>9} {'ana P_tx':>9} {'err':>7} "
          f"{'sim P_rx':>9} {'ana P_rx':>9} {'err':>7}")
    start = time.perf_counter()
    worst = 0.0
    for row in GOLDEN:
        traffic = traffic_for(row)
        report = run(Scenario(strategy=row.strategy, traffic=traffic,
                              horizon_slotframes=args.horizon, channel=ChannelSpec(seed=args.seed)))
        fig = analytic_power(row.strategy, traffic)
        e_tx = abs(report.tx_power_uw - fig.p_tx) / fig.p_tx
        e_rx = abs(report.rx_power_uw - fig.p_rx) / fig.p_rx
        worst = max(worst, e_tx, e_rx)
        name = f"{row.strategy.label} {row.period:g}/{row.deadline or '-'}"
        print(f"{name:<24} {report.tx_power_uw:>9.4f} {fig.p_tx:>9.4f} {e_tx:>7.3%} "
              f"{report.rx_power_uw:>9.4f} {fig.p_rx:>9.4f} {e_rx:>7.3%}")
    print(f"worst relative error {worst:.3%} in {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
