"""Metric aggregation, parameter sweeps and CSV / plot-table emission."""

from __future__ import annotations

import csv
import logging
import math
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .config import CORE, ScenarioConfig
from .engine import RunResult, simulate
from .radio import PHASES, phase, total_power
from .traffic import FlowKind

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["phase", "level", "protocol", "seed", "total_power_mw", "reduction_pct",
                   "mean_delay_s", "acceptable", "mean_latency_s", "trace_digest"]
PACKET_COLUMNS = ["flow", "seq", "created_at", "delivered_at", "delay_s", "hops", "path",
                  "fate", "drop_reason"]
ON_LOG_COLUMNS = ["t", "on_id", "event", "trigger", "participants", "gateway", "subjects",
                  "state", "created_at", "terminated_at", "outcome"]
POWER_COLUMNS = ["phase", "ap_range", "mt_range", "total_power_mw", "reduction_pct_vs_phase1"]
KNOWLEDGE_COLUMNS = ["signature", "decision", "outcome", "delay_s", "power_mw", "hit_count"]
CELL_COLUMNS = ["phase", "level", "protocol", "runs", "mean_delay_s", "ci95_delay_s",
                "total_power_mw", "reduction_pct", "acceptable", "threshold_s"]

Z95 = 1.959963984540054


def classify_acceptable(delays, threshold_s: float) -> bool:
    """True iff the mean over the given per-node mean delays is within the threshold."""
    delays = list(delays.values()) if isinstance(delays, dict) else list(delays)
    if not delays:
        raise ValueError("no delays to classify")
    return math.fsum(delays) / len(delays) <= threshold_s


def application_terminals(cfg: ScenarioConfig) -> list:
    """VoIP consumers when there are any, otherwise every terminal with a flow."""
    if cfg.consumers:
        return cfg.consumers
    return sorted({f.src if f.dst == CORE else f.dst for f in cfg.flows})


def per_node_delay(result: RunResult, nodes=None) -> dict:
    """Mean end-to-end delay of delivered packets per terminal, both directions.
    A terminal with nothing delivered gets an infinite delay."""
    nodes = application_terminals(result.config) if nodes is None else nodes
    acc = {n: [] for n in nodes}
    for p in result.records:
        term = p.src if p.dst == CORE else p.dst
        if term in acc and p.delay_s is not None:
            acc[term].append(p.delay_s)
    return {n: (math.fsum(v) / len(v) if v else math.inf) for n, v in acc.items()}


def mean_latency(result: RunResult) -> Optional[float]:
    """Mean delivery latency of bulk messages; None when the run has none."""
    kinds = {f.name: f.kind for f in result.config.flows}
    lat = [p.delay_s for p in result.records
           if kinds.get(p.flow) is FlowKind.BULK and p.delay_s is not None]
    return math.fsum(lat) / len(lat) if lat else None


def phase_power(cfg: ScenarioConfig, index: int) -> float:
    """Static sum of transmit powers at a phase with the configured interface states."""
    nodes = [n.build() for n in cfg.nodes]
    return total_power(nodes, phase(index)).total_power_mw


def power_table(cfg: ScenarioConfig) -> list[dict]:
    base = phase_power(cfg, 1)
    rows = []
    for ph in PHASES:
        p = phase_power(cfg, ph.phase_index)
        rows.append({"phase": ph.phase_index, "ap_range": ph.ap_range_label,
                     "mt_range": ph.mt_range_label, "total_power_mw": p,
                     "reduction_pct_vs_phase1": 100.0 * (base - p) / base})
    return rows


def airtime_energy_mj(result: RunResult) -> float:
    """Transmit energy spent on data frames: airtime times effective power."""
    nodes = {n.id: n.build() for n in result.config.nodes}
    e = 0.0
    for (nid, kind), secs in result.airtime.items():
        iface = nodes[nid].iface(kind)
        frac = iface.power_fraction
        if kind.value == "WLAN_G":
            ph = phase(result.config.phases[-1][1])
            frac = ph.ap_fraction if nodes[nid].is_ap else ph.mt_fraction
        e += secs * iface.nominal_power_w * frac * 1000.0
    return e


@dataclass
class RunRow:
    phase: int
    level: float
    protocol: str
    seed: int
    total_power_mw: float
    reduction_pct: float
    mean_delay_s: Optional[float]
    acceptable: Optional[bool]
    mean_latency_s: Optional[float]
    trace_digest: str
    per_node_delay: dict = field(default_factory=dict)
    ons_formed: int = 0

    def csv_row(self) -> dict:
        return {
            "phase": self.phase, "level": _num(self.level), "protocol": self.protocol,
            "seed": self.seed, "total_power_mw": _num(self.total_power_mw),
            "reduction_pct": _num(self.reduction_pct), "mean_delay_s": _num(self.mean_delay_s),
            "acceptable": "" if self.acceptable is None else str(self.acceptable).lower(),
            "mean_latency_s": _num(self.mean_latency_s), "trace_digest": self.trace_digest,
        }


def summarize(result: RunResult) -> RunRow:
    cfg = result.config
    ph = cfg.phases[-1][1]
    base = phase_power(cfg, 1)
    power = result.avg_power_mw
    delays = per_node_delay(result) if cfg.consumers else {}
    mean_delay = math.fsum(delays.values()) / len(delays) if delays else None
    acceptable = classify_acceptable(delays, cfg.delay_threshold_s) if delays else None
    return RunRow(ph, cfg.level_speed, cfg.protocol.value, result.seed, power,
                  100.0 * (base - power) / base, mean_delay, acceptable, mean_latency(result),
                  result.digest, delays, sum(1 for o in result.ons if o.created_at is not None))


@dataclass
class MetricReport:
    scenario: str
    threshold_s: float
    rows: list
    power: list
    comparison: list = field(default_factory=list)
    reference: dict = field(default_factory=dict)
    results: list = field(default_factory=list)

    def row(self, phase_index: int) -> RunRow:
        for r in self.rows:
            if r.phase == phase_index:
                return r
        raise KeyError(phase_index)


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(round(x, 9))
    return str(x)


def write_csv(path, columns, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=columns, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (_num(v) if isinstance(v, float) or v is None else v)
                        for k, v in r.items() if k in columns})


def _packet_rows(result: RunResult):
    for p in result.records:
        yield {"flow": p.flow, "seq": p.seq, "created_at": p.created_at,
               "delivered_at": p.delivered_at, "delay_s": p.delay_s, "hops": p.hops,
               "path": ">".join(p.path), "fate": p.fate, "drop_reason": p.drop_reason}


def comparison_rows(direct: RunResult, on: RunResult, reference: dict) -> list[dict]:
    rows = []
    for mode, res, ref_lat in (("direct", direct, reference.get("published_direct_latency_s")),
                               ("on", on, reference.get("published_on_latency_s"))):
        rows.append({"mode": mode, "mean_latency_s": mean_latency(res),
                     "total_power_mw": res.avg_power_mw, "airtime_energy_mj": airtime_energy_mj(res),
                     "window_end_s": res.power_window[1], "reference_latency_s": ref_lat})
    d, o = rows[0]["total_power_mw"], rows[1]["total_power_mw"]
    for r in rows:
        r["power_reduction_pct"] = 100.0 * (d - r["total_power_mw"]) / d
        r["reference_reduction_pct"] = reference.get("published_power_reduction_pct") \
            if r["mode"] == "on" else None
    return rows


COMPARISON_COLUMNS = ["mode", "mean_latency_s", "total_power_mw", "power_reduction_pct",
                      "airtime_energy_mj", "window_end_s", "reference_latency_s",
                      "reference_reduction_pct"]


def run_scenario(cfg: ScenarioConfig, seed: Optional[int] = None, out_dir=None,
                 verbose: bool = False) -> MetricReport:
    """Run every reporting phase of ``cfg`` (or its own phase schedule) once,
    plus a CMS-off twin when compare_direct is set, and write the CSVs."""
    seed = cfg.seed if seed is None else seed
    configs = [cfg.with_overrides(phase=p) for p in cfg.report_phases] or [cfg]
    results = [simulate(c, seed, verbose=verbose) for c in configs]
    report = MetricReport(cfg.name, cfg.delay_threshold_s, [summarize(r) for r in results],
                          power_table(cfg), reference=dict(cfg.reference), results=results)
    direct = None
    if cfg.compare_direct:
        direct = simulate(cfg.with_overrides(cms_enabled=False), seed)
        report.comparison = comparison_rows(direct, results[0], cfg.reference)
    if out_dir is not None:
        write_report(report, out_dir, verbose)
    return report


def write_report(report: MetricReport, out_dir, verbose: bool = False) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, [r.csv_row() for r in report.rows])
    write_csv(out / "power.csv", POWER_COLUMNS, report.power)
    multi = len(report.results) > 1
    packets, on_log, knowledge, positions = [], [], [], []
    for row, res in zip(report.rows, report.results):
        tag = {"phase": row.phase} if multi else {}
        packets += [{**tag, **r} for r in _packet_rows(res)]
        on_log += [{**tag, **e} for e in res.on_log]
        knowledge += [{**tag, **k} for k in res.knowledge.rows()]
        positions += [{**tag, "t": t, "node": n, "x": x, "y": y} for t, n, x, y in res.positions]
    lead = ["phase"] if multi else []
    write_csv(out / "packets.csv", lead + PACKET_COLUMNS, packets)
    write_csv(out / "on_log.csv", lead + ON_LOG_COLUMNS, on_log)
    write_csv(out / "knowledge.csv", lead + KNOWLEDGE_COLUMNS, knowledge)
    if verbose:
        write_csv(out / "positions.csv", lead + ["t", "node", "x", "y"], positions)
    if report.comparison:
        write_csv(out / "comparison.csv", COMPARISON_COLUMNS, report.comparison)
    emit_plotdata(report, out)


# -- sweeps ----------------------------------------------------------------

@dataclass
class Cell:
    phase: int
    level: float
    protocol: str
    runs: list

    @property
    def key(self) -> tuple:
        return (self.phase, self.level, self.protocol)

    def mean_delay(self) -> Optional[float]:
        xs = [r.mean_delay_s for r in self.runs if r.mean_delay_s is not None]
        return statistics.fmean(xs) if xs else None

    def ci95_delay(self) -> Optional[float]:
        xs = [r.mean_delay_s for r in self.runs if r.mean_delay_s is not None]
        if len(xs) < 2 or any(math.isinf(x) for x in xs):
            return None
        return Z95 * statistics.stdev(xs) / math.sqrt(len(xs))

    def per_node_delay(self) -> dict:
        nodes = sorted({n for r in self.runs for n in r.per_node_delay})
        return {n: statistics.fmean(r.per_node_delay[n] for r in self.runs
                                    if n in r.per_node_delay) for n in nodes}

    def acceptable(self, threshold_s: float) -> Optional[bool]:
        delays = self.per_node_delay()
        return classify_acceptable(delays, threshold_s) if delays else None

    def csv_row(self, threshold_s: float) -> dict:
        acc = self.acceptable(threshold_s)
        return {"phase": self.phase, "level": _num(self.level), "protocol": self.protocol,
                "runs": len(self.runs), "mean_delay_s": _num(self.mean_delay()),
                "ci95_delay_s": _num(self.ci95_delay()),
                "total_power_mw": _num(statistics.fmean(r.total_power_mw for r in self.runs)),
                "reduction_pct": _num(statistics.fmean(r.reduction_pct for r in self.runs)),
                "acceptable": "" if acc is None else str(acc).lower(),
                "threshold_s": _num(threshold_s)}


@dataclass
class SweepResult:
    scenario: str
    threshold_s: float
    rows: list
    cells: list
    power: list

    def cell(self, phase_index: int, level: float, protocol: str = "reactive") -> Cell:
        for c in self.cells:
            if c.key == (phase_index, level, protocol):
                return c
        raise KeyError((phase_index, level, protocol))

    def acceptability(self, protocol: str = "reactive") -> dict:
        return {(c.phase, c.level): c.acceptable(self.threshold_s)
                for c in self.cells if c.protocol == protocol}


def _run_cell(job) -> RunRow:
    cfg, seed = job
    return summarize(simulate(cfg, seed, keep_trace=False))


def sweep_jobs(cfg: ScenarioConfig, phases, levels, protocols, reps: int) -> list:
    if reps < 1:
        raise ValueError("at least one replication is needed")
    jobs = []
    for ph in phases:
        for speed in levels:
            lv = cfg.level_index(speed)
            for proto in protocols:
                c = cfg.with_overrides(phase=ph, level=lv, protocol=proto)
                for r in range(reps):
                    jobs.append((c, cfg.seed + r))
    return jobs


def sweep(cfg: ScenarioConfig, phases=(1, 2, 3, 4), levels=None, protocols=("reactive",),
          reps: Optional[int] = None, jobs: int = 1, out_dir=None) -> SweepResult:
    """Every phase x level x protocol cell, ``reps`` seeds each (seed, seed+1, ...)."""
    levels = list(cfg.mobility.level_speeds if levels is None else levels)
    reps = cfg.replications if reps is None else reps
    work = sweep_jobs(cfg, phases, levels, protocols, reps)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_run_cell, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        rows = [_run_cell(j) for j in work]
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.phase, r.level, r.protocol), []).append(r)
    cells = [Cell(*k, sorted(v, key=lambda r: r.seed)) for k, v in sorted(groups.items())]
    rows = sorted(rows, key=lambda r: (r.phase, r.level, r.protocol, r.seed))
    res = SweepResult(cfg.name, cfg.delay_threshold_s, rows, cells, power_table(cfg))
    if out_dir is not None:
        write_sweep(res, out_dir)
    return res


def write_sweep(res: SweepResult, out_dir) -> None:
    out = Path(out_dir)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, [r.csv_row() for r in res.rows])
    write_csv(out / "cells.csv", CELL_COLUMNS, [c.csv_row(res.threshold_s) for c in res.cells])
    write_csv(out / "power.csv", POWER_COLUMNS, res.power)
    emit_plotdata(res, out)


# -- plot tables -----------------------------------------------------------

def emit_plotdata(report, out_dir) -> dict:
    """One table per figure analogue; returns {file name: rows}."""
    out = Path(out_dir)
    tables = {}
    power = [{"phase": r["phase"], "total_power_mw": r["total_power_mw"],
              "reduction_pct": r["reduction_pct_vs_phase1"]} for r in report.power]
    tables["plot_power_by_phase.csv"] = (["phase", "total_power_mw", "reduction_pct"], power)
    if isinstance(report, SweepResult):
        rows = []
        for c in report.cells:
            acc = c.acceptable(report.threshold_s)
            rows.append({"phase": c.phase, "level": c.level, "protocol": c.protocol,
                         "mean_delay_s": c.mean_delay(), "ci95_delay_s": c.ci95_delay(),
                         "threshold_s": report.threshold_s,
                         "acceptable": "" if acc is None else str(acc).lower()})
        tables["plot_delay_by_mobility.csv"] = (
            ["phase", "level", "protocol", "mean_delay_s", "ci95_delay_s", "threshold_s",
             "acceptable"], rows)
    elif report.comparison:
        tables["plot_latency.csv"] = (
            ["mode", "mean_latency_s", "reference_latency_s"], report.comparison)
        tables["plot_power_comparison.csv"] = (
            ["mode", "total_power_mw", "power_reduction_pct", "airtime_energy_mj",
             "reference_reduction_pct"], report.comparison)
    for name, (cols, rows) in tables.items():
        write_csv(out / name, cols, rows)
    return {k: v[1] for k, v in tables.items()}


def default_jobs() -> int:
    return max(1, min(8, os.cpu_count() or 1))
