"""Experiment harness.

Runs ordered demand sequences through the learner, placing each routed
demand's traffic before the next demand starts, and turns the traces into
machine-readable reports: a JSON summary plus CSV series for link loads,
temp-path lengths per episode, and convergence episodes.

Three study shapes are supported: a plain sequence run, a gamma study (a
control run without global-table reuse next to one run per gamma value that
reuses a shared global table, the gamma applied to global updates only), and
a comparison against a breadth-first min-hop baseline router.

All randomness flows from the config seed, and reports contain no
wall-clock data, so identical configs produce byte-identical report.json.
"""

from __future__ import annotations

import csv
import json
import random
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from .dataplane import DataPlane, LossModel
from .engine import (
    DEFAULT_HYPERPARAMETERS,
    Hyperparameters,
    QTable,
    UnroutableDemandError,
    detect_convergence,
    find_route,
)
from .network import NetworkGraph, RoutePath, TrafficDemand, place_traffic
from .rewards import DEFAULT_WEIGHTS, QoSWeights
from .topologies import resolve_topology

DEFAULT_SEED = 1


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one run depends on. topology is a builtin id or a file
    path; demands are handled strictly in the given order."""

    topology: str
    demands: Sequence[TrafficDemand]
    weights: QoSWeights = DEFAULT_WEIGHTS
    hyper: Hyperparameters = DEFAULT_HYPERPARAMETERS
    use_global: bool = False
    global_gamma: Optional[float] = None
    seed: int = DEFAULT_SEED
    loss_mode: str = "off"


@dataclass(frozen=True)
class DemandOutcome:
    """One demand's results: whether it was routed, on which path, when the
    learner converged (None if it never settled), and the episode series."""

    demand_index: int
    demand: TrafficDemand
    routed: bool
    final_path: Optional[RoutePath]
    converged_episode: Optional[int]
    episodes_run: int
    temp_path_lengths: tuple[int, ...]
    messages_with_aggregation: int
    messages_without_aggregation: int

    # Unconverged demands cost their whole episode budget, so totals charge
    # episodes_run when converged_episode is absent.
    @property
    def convergence_cost(self) -> int:
        return self.converged_episode if self.converged_episode is not None else self.episodes_run

    def to_dict(self) -> dict:
        return {
            "index": self.demand_index,
            "src": self.demand.src,
            "dst": self.demand.dst,
            "traffic_bps": self.demand.traffic,
            "routed": self.routed,
            "final_path": list(self.final_path.nodes) if self.final_path is not None else None,
            "converged_episode": self.converged_episode,
            "episodes_run": self.episodes_run,
            "temp_path_lengths": list(self.temp_path_lengths),
            "messages_with_aggregation": self.messages_with_aggregation,
            "messages_without_aggregation": self.messages_without_aggregation,
        }


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    outcomes: list[DemandOutcome]
    graph: NetworkGraph

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def max_link_utilization(self) -> float:
        return self.graph.max_link_utilization()

    @property
    def total_convergence_episodes(self) -> int:
        return sum(o.convergence_cost for o in self.outcomes)

    @property
    def all_converged(self) -> bool:
        return all(o.converged_episode is not None for o in self.outcomes)

    @property
    def total_messages_with_aggregation(self) -> int:
        return sum(o.messages_with_aggregation for o in self.outcomes)

    @property
    def total_messages_without_aggregation(self) -> int:
        return sum(o.messages_without_aggregation for o in self.outcomes)

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "topology": cfg.topology,
            "seed": cfg.seed,
            "loss_mode": cfg.loss_mode,
            "use_global": cfg.use_global,
            "global_gamma": cfg.global_gamma,
            "weights": {
                "hop_count": cfg.weights.hop_count,
                "transmission": cfg.weights.transmission,
                "reliability": cfg.weights.reliability,
                "intensity": cfg.weights.intensity,
                "utilization": cfg.weights.utilization,
            },
            "hyperparameters": {
                "epsilon": cfg.hyper.epsilon,
                "alpha": cfg.hyper.alpha,
                "gamma": cfg.hyper.gamma,
                "ttl": cfg.hyper.ttl,
                "episodes": cfg.hyper.episodes,
                "terminal_q": cfg.hyper.terminal_q,
            },
            "demands": [o.to_dict() for o in self.outcomes],
            "totals": {
                "routed_demands": sum(1 for o in self.outcomes if o.routed),
                "convergence_episodes": self.total_convergence_episodes,
                "all_converged": self.all_converged,
                "messages_with_aggregation": self.total_messages_with_aggregation,
                "messages_without_aggregation": self.total_messages_without_aggregation,
            },
            "links": _links_dict(self.graph),
            "max_link_utilization": self.max_link_utilization,
        }


def _links_dict(graph: NetworkGraph) -> list[dict]:
    return [
        {
            "src": link.src,
            "dst": link.dst,
            "max_bandwidth_bps": link.max_bandwidth,
            "used_bandwidth_bps": link.used_bandwidth,
            "utilization": link.utilization,
        }
        for link in graph.iter_links()
    ]


def run_sequence(config: ExperimentConfig) -> ExperimentReport:
    """Route every demand in order, placing traffic after each success.

    One data plane, one RNG, and one global table live for the whole
    sequence; each demand gets its own local table (seeded from the global
    one when config.use_global). A demand whose source has no outgoing links
    is recorded as unrouted and the run continues.
    """
    graph = resolve_topology(config.topology)
    env = DataPlane(graph, LossModel(config.loss_mode, seed=config.seed))
    global_table = QTable.for_graph(graph)
    rng = random.Random(config.seed)
    global_hyper = (
        replace(DEFAULT_HYPERPARAMETERS, gamma=config.global_gamma)
        if config.global_gamma is not None
        else None
    )
    outcomes: list[DemandOutcome] = []
    for index, demand in enumerate(config.demands, start=1):
        try:
            result = find_route(
                demand,
                env,
                global_table,
                weights=config.weights,
                hyper=config.hyper,
                use_global=config.use_global,
                rng=rng,
                global_hyper=global_hyper,
            )
        except UnroutableDemandError:
            outcomes.append(
                DemandOutcome(
                    demand_index=index,
                    demand=demand,
                    routed=False,
                    final_path=None,
                    converged_episode=None,
                    episodes_run=0,
                    temp_path_lengths=(),
                    messages_with_aggregation=0,
                    messages_without_aggregation=0,
                )
            )
            continue
        routed = result.final_path.reached_destination
        if routed:
            place_traffic(graph, result.final_path, demand)
        outcomes.append(
            DemandOutcome(
                demand_index=index,
                demand=demand,
                routed=routed,
                final_path=result.final_path,
                converged_episode=detect_convergence(result.traces),
                episodes_run=len(result.traces),
                temp_path_lengths=tuple(t.path_length for t in result.traces),
                messages_with_aggregation=sum(t.messages_with_aggregation for t in result.traces),
                messages_without_aggregation=sum(
                    t.messages_without_aggregation for t in result.traces
                ),
            )
        )
    return ExperimentReport(config=config, outcomes=outcomes, graph=graph)


@dataclass
class GammaStudyReport:
    """Control run (no global-table reuse) beside one run per gamma value."""

    control: ExperimentReport
    runs: list[tuple[float, ExperimentReport]]

    def group_labels(self) -> list[str]:
        return ["control"] + [f"gamma={g}" for g, _ in self.runs]

    def group_reports(self) -> list[ExperimentReport]:
        return [self.control] + [r for _, r in self.runs]

    def to_dict(self) -> dict:
        return {
            "topology": self.control.config.topology,
            "seed": self.control.config.seed,
            "control": self.control.to_dict(),
            "runs": [{"gamma": g, "report": r.to_dict()} for g, r in self.runs],
            "totals": [
                {"group": label, "convergence_episodes": report.total_convergence_episodes}
                for label, report in zip(self.group_labels(), self.group_reports())
            ],
        }


def run_gamma_study(base: ExperimentConfig, gammas: Sequence[float]) -> GammaStudyReport:
    """Same topology, demands, and seed for every group; test groups turn on
    global-table reuse and apply their gamma to global updates only."""
    control = run_sequence(replace(base, use_global=False, global_gamma=None))
    runs = [
        (gamma, run_sequence(replace(base, use_global=True, global_gamma=gamma)))
        for gamma in gammas
    ]
    return GammaStudyReport(control=control, runs=runs)


def baseline_min_hop(graph: NetworkGraph, demand: TrafficDemand) -> RoutePath:
    """Breadth-first shortest path by hop count, every tie broken toward the
    lowest node id. Unreachable destination yields a zero-hop unfinished
    path, mirroring the learner's unroutable shape."""
    dist = {demand.dst: 0}
    reverse: dict[int, list[int]] = {}
    for link in graph.iter_links():
        reverse.setdefault(link.dst, []).append(link.src)
    queue = deque([demand.dst])
    while queue:
        node = queue.popleft()
        for prev in reverse.get(node, []):
            if prev not in dist:
                dist[prev] = dist[node] + 1
                queue.append(prev)
    if demand.src not in dist:
        return RoutePath((demand.src,), False)
    nodes = [demand.src]
    current = demand.src
    while current != demand.dst:
        current = next(
            v for v in graph.out_neighbors(current) if dist.get(v) == dist[current] - 1
        )
        nodes.append(current)
    return RoutePath(tuple(nodes), True)


@dataclass
class ComparisonReport:
    """The learner and the min-hop baseline routing the same sequence on
    separate copies of the same starting network."""

    learned: ExperimentReport
    baseline_graph: NetworkGraph
    baseline_paths: list[tuple[TrafficDemand, RoutePath]]

    @property
    def baseline_max_link_utilization(self) -> float:
        return self.baseline_graph.max_link_utilization()

    def to_dict(self) -> dict:
        return {
            "learned": self.learned.to_dict(),
            "baseline": {
                "paths": [
                    {
                        "src": demand.src,
                        "dst": demand.dst,
                        "traffic_bps": demand.traffic,
                        "routed": path.reached_destination,
                        "final_path": list(path.nodes) if path.reached_destination else None,
                    }
                    for demand, path in self.baseline_paths
                ],
                "links": _links_dict(self.baseline_graph),
                "max_link_utilization": self.baseline_max_link_utilization,
            },
            "max_link_utilization": {
                "learned": self.learned.max_link_utilization,
                "baseline": self.baseline_max_link_utilization,
            },
        }


def compare_baseline(config: ExperimentConfig) -> ComparisonReport:
    learned = run_sequence(config)
    graph = resolve_topology(config.topology)
    paths: list[tuple[TrafficDemand, RoutePath]] = []
    for demand in config.demands:
        path = baseline_min_hop(graph, demand)
        if path.reached_destination:
            place_traffic(graph, path, demand)
        paths.append((demand, path))
    return ComparisonReport(learned=learned, baseline_graph=graph, baseline_paths=paths)


def _write_json(payload: dict, path: Path) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_links_csv(graph: NetworkGraph, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["src", "dst", "max_bandwidth_bps", "used_bandwidth_bps", "utilization"])
        for link in graph.iter_links():
            writer.writerow(
                [link.src, link.dst, link.max_bandwidth, link.used_bandwidth, link.utilization]
            )


def emit_reports(report: ExperimentReport, out_dir: str | Path) -> list[Path]:
    """Write report.json, links.csv, temp_path_lengths.csv, convergence.csv.

    An empty run still produces all four files, CSVs as header rows only.
    Returns the written paths.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    _write_json(report.to_dict(), report_path)

    links_path = out / "links.csv"
    _write_links_csv(report.graph, links_path)

    lengths_path = out / "temp_path_lengths.csv"
    with open(lengths_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["demand_index", "src", "dst", "episode", "length"])
        for outcome in report.outcomes:
            for episode, length in enumerate(outcome.temp_path_lengths, start=1):
                writer.writerow(
                    [outcome.demand_index, outcome.demand.src, outcome.demand.dst, episode, length]
                )

    convergence_path = out / "convergence.csv"
    with open(convergence_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["demand_index", "src", "dst", "converged_episode", "episodes_run"])
        for outcome in report.outcomes:
            converged = "" if outcome.converged_episode is None else outcome.converged_episode
            writer.writerow(
                [
                    outcome.demand_index,
                    outcome.demand.src,
                    outcome.demand.dst,
                    converged,
                    outcome.episodes_run,
                ]
            )
    return [report_path, links_path, lengths_path, convergence_path]


def emit_gamma_reports(study: GammaStudyReport, out_dir: str | Path) -> list[Path]:
    """Write report.json plus a wide convergence.csv: one column per group,
    one row per demand, and a Total row where an unconverged demand is
    charged its full episode budget."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    _write_json(study.to_dict(), report_path)

    convergence_path = out / "convergence.csv"
    labels = study.group_labels()
    reports = study.group_reports()
    with open(convergence_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["demand_index", "src", "dst"] + labels)
        for i, outcome in enumerate(study.control.outcomes):
            cells = []
            for report in reports:
                episode = report.outcomes[i].converged_episode
                cells.append("" if episode is None else episode)
            writer.writerow(
                [outcome.demand_index, outcome.demand.src, outcome.demand.dst] + cells
            )
        writer.writerow(
            ["total", "", ""] + [report.total_convergence_episodes for report in reports]
        )
    return [report_path, convergence_path]


def emit_comparison_reports(comparison: ComparisonReport, out_dir: str | Path) -> list[Path]:
    """Write report.json plus per-link load tables for both routers."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    _write_json(comparison.to_dict(), report_path)
    learned_path = out / "links.csv"
    _write_links_csv(comparison.learned.graph, learned_path)
    baseline_path = out / "links_baseline.csv"
    _write_links_csv(comparison.baseline_graph, baseline_path)
    return [report_path, learned_path, baseline_path]
