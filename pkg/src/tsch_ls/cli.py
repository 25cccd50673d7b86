"""Command line front end: ``tsch-ls {table1,run,sweep}``.

Exit codes: 0 success, 1 invalid input, 2 golden-value mismatch.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence

from . import table1
from .analytic import PowerFigures, analytic_power
from .config import ScenarioError, load_scenario
from .model import ConfigError, exact
from .sim import Scenario, run

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_GOLDEN = 2

TABLE1_COLUMNS = ("T_c", "T_d", "strategy", "N_slp", "N_snz", "T_wc", "P_tx", "P_rx")
SWEEP_PARAMETERS = ("period_s", "deadline_s", "data_loss", "n_snz_override")
SWEEP_COLUMNS = (
    "parameter",
    "value",
    "strategy",
    "n_slp",
    "n_snz",
    "analytic_t_wc_s",
    "analytic_p_tx_uw",
    "analytic_p_rx_uw",
    "sim_p_tx_uw",
    "sim_p_rx_uw",
    "sim_mean_access_delay_s",
    "sim_max_access_delay_s",
    "sim_drops",
)


def fmt_uw(x: Optional[float]) -> str:
    return "" if x is None or math.isnan(x) else f"{x:.4f}"


def fmt_s(x: Optional[float]) -> str:
    return "" if x is None or math.isnan(x) else f"{x:.2f}"


def fmt_num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else f"{x:.4f}"
    return str(x)


def render(columns: Sequence[str], rows: List[Dict[str, str]], fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        lines.append("| " + " | ".join(row[c] or "--" for c in columns) + " |")
    return "\n".join(lines) + "\n"


def table1_rows() -> tuple[List[Dict[str, str]], List[str]]:
    rows, problems = [], []
    for entry in table1.evaluate():
        g, f = entry.golden, entry.figures
        rows.append({
            "T_c": f"{g.period:g}",
            "T_d": "" if g.deadline is None else f"{g.deadline:g}",
            "strategy": g.strategy.label,
            "N_slp": "" if f.n_slp is None else str(f.n_slp),
            "N_snz": "" if f.n_snz is None else str(f.n_snz),
            "T_wc": fmt_s(f.t_wc),
            "P_tx": fmt_uw(f.p_tx),
            "P_rx": fmt_uw(f.p_rx),
        })
        problems += [f"{g.period:g}/{g.deadline} {g.strategy.label}: {m}" for m in entry.mismatches]
    return rows, problems


def cmd_table1(args) -> int:
    rows, problems = table1_rows()
    _emit(render(TABLE1_COLUMNS, rows, args.format), args.output)
    for p in problems:
        print(f"golden mismatch: {p}", file=sys.stderr)
    return EXIT_GOLDEN if problems else EXIT_OK


def _analytic_or_none(scenario: Scenario) -> Optional[PowerFigures]:
    if scenario.traffic.period is None:
        return None
    try:
        return analytic_power(
            scenario.strategy, scenario.traffic, scenario.cfg, scenario.energy, scenario.frames
        )
    except ConfigError:
        return None


def _rel(sim: float, ref: float) -> float:
    return abs(sim - ref) / ref if ref else math.nan


def run_rows(scenario: Scenario, compare: bool, include_baseline: bool, trace=None) -> List[Dict[str, str]]:
    report = run(scenario, trace)
    items = []
    for key, value in report.summary().items():
        if key.endswith("_uw"):
            text = fmt_uw(value)
        elif key.endswith("_s"):
            text = fmt_s(value)
        else:
            text = fmt_num(value)
        items.append((key, text))
    if include_baseline:
        base = scenario.energy.baseline_power
        items.append(("p_tx_incl_baseline_uw", fmt_uw(report.tx_power_uw + base)))
        items.append(("p_rx_incl_baseline_uw", fmt_uw(report.rx_power_uw + base)))
    if compare:
        fig = _analytic_or_none(scenario)
        if fig is None:
            items.append(("analytic", "n/a"))
        else:
            items += [
                ("analytic_p_tx_uw", fmt_uw(fig.p_tx)),
                ("analytic_p_rx_uw", fmt_uw(fig.p_rx)),
                ("analytic_t_wc_s", fmt_s(fig.t_wc)),
                ("rel_err_tx", f"{_rel(report.tx_power_uw, fig.p_tx):.6f}"),
                ("rel_err_rx", f"{_rel(report.rx_power_uw, fig.p_rx):.6f}"),
            ]
    return [{"metric": k, "value": v} for k, v in items]


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(
            scenario, channel=dataclasses.replace(scenario.channel, seed=args.seed)
        )
    if args.trace:
        with open(args.trace, "w") as fh:
            rows = run_rows(scenario, args.compare, args.include_baseline, _jsonl_writer(fh))
    else:
        rows = run_rows(scenario, args.compare, args.include_baseline)
    _emit(render(("metric", "value"), rows, args.format), args.output)
    return EXIT_OK


def _jsonl_writer(fh) -> Callable[[dict], None]:
    def write(record: dict) -> None:
        fh.write(json.dumps(record) + "\n")

    return write


def apply_parameter(scenario: Scenario, parameter: str, value: float) -> Scenario:
    t = scenario.traffic
    if parameter == "period_s":
        return dataclasses.replace(scenario, traffic=dataclasses.replace(t, period=value))
    if parameter == "deadline_s":
        return dataclasses.replace(
            scenario, traffic=dataclasses.replace(t, relative_deadline=value)
        )
    if parameter == "data_loss":
        return dataclasses.replace(
            scenario, channel=dataclasses.replace(scenario.channel, data_loss_prob=value)
        )
    if parameter == "n_snz_override":
        n = int(value)
        if n != value or n < 0:
            raise ConfigError("n_snz_override takes non-negative integers")
        # deadline of exactly n + 1 slotframes yields n_snz = n
        deadline = float(exact(scenario.cfg.slot_duration) * scenario.cfg.slots_per_slotframe * (n + 1))
        return dataclasses.replace(
            scenario, traffic=dataclasses.replace(t, relative_deadline=deadline)
        )
    raise ConfigError(f"unknown sweep parameter {parameter!r}")


def sweep_row(job) -> Dict[str, str]:
    scenario, parameter, value, simulate = job
    fig = _analytic_or_none(scenario)
    row = dict.fromkeys(SWEEP_COLUMNS, "")
    row.update(parameter=parameter, value=f"{value:g}", strategy=scenario.strategy.label)
    if fig is not None:
        row.update(
            n_slp="" if fig.n_slp is None else str(fig.n_slp),
            n_snz="" if fig.n_snz is None else str(fig.n_snz),
            analytic_t_wc_s=fmt_s(fig.t_wc),
            analytic_p_tx_uw=fmt_uw(fig.p_tx),
            analytic_p_rx_uw=fmt_uw(fig.p_rx),
        )
    if simulate:
        report = run(scenario)
        row.update(
            sim_p_tx_uw=fmt_uw(report.tx_power_uw),
            sim_p_rx_uw=fmt_uw(report.rx_power_uw),
            sim_mean_access_delay_s=fmt_s(report.mean_access_delay),
            sim_max_access_delay_s=fmt_s(report.max_access_delay),
            sim_drops=str(report.link_counts["drops"]),
        )
    return row


def sweep(
    base: Scenario,
    parameter: str,
    values: Sequence[float],
    simulate: bool = True,
    jobs: int = 1,
) -> List[Dict[str, str]]:
    if parameter not in SWEEP_PARAMETERS:
        raise ConfigError(f"unknown sweep parameter {parameter!r}")
    work = []
    for v in values:
        scenario = apply_parameter(base, parameter, v)
        scenario.validate()
        work.append((scenario, parameter, v, simulate))
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(sweep_row, work))
    return [sweep_row(job) for job in work]


def cmd_sweep(args) -> int:
    base = load_scenario(args.scenario)
    if args.seed is not None:
        base = dataclasses.replace(base, channel=dataclasses.replace(base.channel, seed=args.seed))
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse sweep values {args.values!r}") from None
    rows = sweep(base, args.parameter, values, not args.analytic_only, args.jobs)
    _emit(render(SWEEP_COLUMNS, rows, args.format), args.output)
    return EXIT_OK


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsch-ls", description="TSCH listening suspension: analytic model and simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "md"), default="md")
        p.add_argument("-o", "--output", help="write the table here instead of stdout")

    p = sub.add_parser("table1", help="re-evaluate the 14-row reference comparison")
    common(p)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("run", help="simulate one scenario file")
    p.add_argument("scenario")
    p.add_argument("--trace", help="write a per-slot JSON-lines trace to this path")
    p.add_argument("--compare", action="store_true", help="append the analytic prediction")
    p.add_argument("--include-baseline", action="store_true", help="add the platform drain")
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="vary one parameter of a scenario")
    p.add_argument("scenario")
    p.add_argument("--parameter", required=True)
    p.add_argument("--values", required=True, help="comma separated list")
    p.add_argument("--analytic-only", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
