"""The 14-row reference comparison: expected values and their re-evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .analytic import PowerFigures, analytic_power
from .model import SlotframeConfig, StrategyKind, TrafficSpec

POWER_TOL = 0.0005
TIME_TOL = 0.005

S = StrategyKind


@dataclass(frozen=True)
class GoldenRow:
    period: float
    deadline: Optional[float]
    strategy: StrategyKind
    n_slp: Optional[int]
    n_snz: Optional[int]
    t_wc: float
    p_tx: float
    p_rx: float


# OpenMote B / OpenWSN defaults, 90 B frames
GOLDEN = (
    GoldenRow(30, None, S.ORACLE, None, None, 2.02, 8.8667, 9.6000),
    GoldenRow(30, None, S.CONVENTIONAL_TSCH, None, None, 2.02, 8.8667, 73.3168),
    GoldenRow(30, None, S.PERIODIC_LS, 13, None, 28.28, 9.0667, 13.6468),
    GoldenRow(120, None, S.ORACLE, None, None, 2.02, 2.2167, 2.4000),
    GoldenRow(120, None, S.CONVENTIONAL_TSCH, None, None, 2.02, 2.2167, 69.5668),
    GoldenRow(120, None, S.PERIODIC_LS, 58, None, 119.18, 2.2667, 2.8993),
    GoldenRow(120, 10, S.EXTENDED_PERIODIC_LS, 58, 3, 8.08, 2.3000, 19.0210),
    GoldenRow(120, 30, S.EXTENDED_PERIODIC_LS, 58, 13, 28.28, 2.3000, 7.5210),
    GoldenRow(600, None, S.ORACLE, None, None, 2.02, 0.4433, 0.4800),
    GoldenRow(600, None, S.CONVENTIONAL_TSCH, None, None, 2.02, 0.4433, 68.5668),
    GoldenRow(600, None, S.SLOW_PERIODIC_LS, 296, None, 129.28, 1.0333, 1.2733),
    GoldenRow(600, 10, S.EXTENDED_PERIODIC_LS, 296, 3, 8.08, 0.4600, 17.5177),
    GoldenRow(600, 30, S.EXTENDED_PERIODIC_LS, 296, 13, 28.28, 0.4600, 5.3277),
    GoldenRow(600, 120, S.EXTENDED_PERIODIC_LS, 296, 58, 119.18, 0.4600, 1.6477),
)


@dataclass(frozen=True)
class Table1Row:
    golden: GoldenRow
    figures: PowerFigures

    @property
    def mismatches(self) -> List[str]:
        g, f = self.golden, self.figures
        out = []
        if f.n_slp != g.n_slp:
            out.append(f"n_slp {f.n_slp} != {g.n_slp}")
        if f.n_snz != g.n_snz:
            out.append(f"n_snz {f.n_snz} != {g.n_snz}")
        if abs(f.t_wc - g.t_wc) > TIME_TOL:
            out.append(f"t_wc {f.t_wc:.4f} != {g.t_wc}")
        if abs(f.p_tx - g.p_tx) > POWER_TOL:
            out.append(f"p_tx {f.p_tx:.5f} != {g.p_tx}")
        if abs(f.p_rx - g.p_rx) > POWER_TOL:
            out.append(f"p_rx {f.p_rx:.5f} != {g.p_rx}")
        return out


def traffic_for(row: GoldenRow) -> TrafficSpec:
    return TrafficSpec(period=row.period, relative_deadline=row.deadline)


def evaluate(cfg: SlotframeConfig = SlotframeConfig()) -> List[Table1Row]:
    return [
        Table1Row(row, analytic_power(row.strategy, traffic_for(row), cfg)) for row in GOLDEN
    ]
