#!/usr/bin/env python3
"""Print the 14-row power comparison next to the embedded reference values."""

import argparse

from tsch_ls.table1 import evaluate


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.parse_args()
    print(f"{'T_c':>5} {'T_d':>5} {'strategy':<12} {'N_slp':>5} {'N_snz':>5} "
          f"{'T_wc':>7} {'P_tx':>8} {'P_rx':>8}  status")
    failures = 0
    for row in evaluate():
        g, f = row.golden, row.figures
        status = "ok" if not row.mismatches else "; ".join(row.mismatches)
        failures += bool(row.mismatches)
        print(
            f"{g.period:>5g} {'-' if g.deadline is None else f'{g.deadline:g}':>5} "
            f"{g.strategy.label:<12} {f.n_slp if f.n_slp is not None else '-':>5} "
            f"{f.n_snz if f.n_snz is not None else '-':>5} {f.t_wc:>7.2f} "
            f"{f.p_tx:>8.4f} {f.p_rx:>8.4f}  {status}"
        )
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
