"""Experiment orchestration, baseline routing, report emission, CLI."""

import csv
import json

import pytest

from rlroute.cli import main
from rlroute.harness import (
    ComparisonReport,
    ExperimentConfig,
    ExperimentReport,
    baseline_min_hop,
    compare_baseline,
    emit_comparison_reports,
    emit_gamma_reports,
    emit_reports,
    run_gamma_study,
    run_sequence,
)
from rlroute.network import TrafficDemand, build_graph
from rlroute.rewards import make_weights
from rlroute.topologies import load_builtin, resolve_topology

UTIL_ONLY = make_weights(0, 0, 0, 0, 1)


def t3_config(**overrides):
    settings = {
        "topology": "t3",
        "demands": [TrafficDemand(0, 2, 1e5)],
        "weights": UTIL_ONLY,
    }
    settings.update(overrides)
    return ExperimentConfig(**settings)


class TestRunSequence:
    def test_empty_demand_list_touches_nothing(self):
        report = run_sequence(t3_config(demands=[]))
        assert report.outcomes == []
        assert report.graph == resolve_topology("t3")
        assert report.total_convergence_episodes == 0
        assert report.all_converged

    def test_single_demand_places_traffic(self):
        report = run_sequence(t3_config())
        outcome = report.outcomes[0]
        assert outcome.routed
        assert outcome.final_path.nodes == (0, 1, 2)
        assert report.graph.link(0, 1).used_bandwidth == 1e5
        assert report.graph.link(1, 2).used_bandwidth == 1e5
        assert report.graph.link(0, 2).used_bandwidth == 9.9e6

    def test_placement_conservation(self):
        # Each link's final used bandwidth is its initial value plus the
        # traffic of every demand whose final path crosses it.
        demands = [TrafficDemand(0, 3, 2e5), TrafficDemand(0, 4, 3e5), TrafficDemand(1, 4, 5e5)]
        config = ExperimentConfig(topology="t2", demands=demands)
        report = run_sequence(config)
        initial = resolve_topology("t2")
        for link in report.graph.iter_links():
            expected = initial.link(link.src, link.dst).used_bandwidth
            for outcome in report.outcomes:
                if outcome.routed and (link.src, link.dst) in outcome.final_path.links():
                    expected += outcome.demand.traffic
            assert link.used_bandwidth == pytest.approx(expected)

    def test_unroutable_demand_recorded_and_run_continues(self, tmp_path):
        # Node 3 only has an inbound link, so 3->0 is unroutable.
        from rlroute.network import save_topology

        graph = build_graph(4, [(0, 1, 1e7), (1, 2, 1e7), (2, 0, 1e7), (2, 3, 1e7)])
        graph_path = tmp_path / "net.json"
        save_topology(graph, graph_path)
        config = ExperimentConfig(
            topology=str(graph_path),
            demands=[TrafficDemand(3, 0, 1e5), TrafficDemand(0, 2, 1e5)],
        )
        report = run_sequence(config)
        assert not report.outcomes[0].routed
        assert report.outcomes[0].final_path is None
        assert report.outcomes[0].episodes_run == 0
        assert report.outcomes[1].routed

    def test_identical_configs_identical_reports(self):
        a = run_sequence(t3_config())
        b = run_sequence(t3_config())
        assert a.to_dict() == b.to_dict()

    def test_unconverged_demand_charges_full_budget(self):
        report = run_sequence(t3_config())
        outcome = report.outcomes[0]
        assert outcome.converged_episode is not None
        assert report.total_convergence_episodes == outcome.converged_episode


class TestGammaStudy:
    def test_control_plus_one_run_per_gamma(self):
        study = run_gamma_study(t3_config(), [0.3, 0.9])
        assert study.group_labels() == ["control", "gamma=0.3", "gamma=0.9"]
        assert not study.control.config.use_global
        assert all(r.config.use_global for _, r in study.runs)
        assert [g for g, _ in study.runs] == [0.3, 0.9]

    def test_single_gamma_gives_two_groups(self):
        study = run_gamma_study(t3_config(), [0.9])
        assert len(study.group_reports()) == 2


class TestBaselineMinHop:
    def test_t1_unique_path(self):
        path = baseline_min_hop(load_builtin("t1"), TrafficDemand(0, 4, 1e5))
        assert path.nodes == (0, 1, 2, 3, 4)
        assert path.reached_destination

    def test_t3_ignores_utilization(self):
        path = baseline_min_hop(load_builtin("t3"), TrafficDemand(0, 2, 1e5))
        assert path.nodes == (0, 2)

    def test_ties_break_to_lowest_id(self):
        # 0-1-3 and 0-2-3 are both two hops on t2.
        path = baseline_min_hop(load_builtin("t2"), TrafficDemand(0, 3, 1e5))
        assert path.nodes == (0, 1, 3)

    def test_unreachable_destination(self):
        graph = build_graph(3, [(0, 1, 1e7)])
        path = baseline_min_hop(graph, TrafficDemand(0, 2, 1e5))
        assert path.nodes == (0,)
        assert not path.reached_destination


class TestCompareBaseline:
    def test_t3_learner_spreads_load(self):
        comparison = compare_baseline(t3_config())
        assert comparison.learned.outcomes[0].final_path.nodes == (0, 1, 2)
        assert comparison.baseline_paths[0][1].nodes == (0, 2)
        # Baseline pushes the hot link to saturation; the learner leaves it.
        assert comparison.baseline_max_link_utilization == 1.0
        assert comparison.learned.max_link_utilization == 0.99
        summary = comparison.to_dict()["max_link_utilization"]
        assert summary["learned"] <= summary["baseline"]


class TestEmitReports:
    def run_t3(self):
        return run_sequence(t3_config())

    def test_writes_all_four_files(self, tmp_path):
        files = emit_reports(self.run_t3(), tmp_path)
        names = sorted(p.name for p in files)
        assert names == ["convergence.csv", "links.csv", "report.json", "temp_path_lengths.csv"]
        assert all(p.exists() for p in files)

    def test_report_json_matches_links_csv(self, tmp_path):
        report = self.run_t3()
        emit_reports(report, tmp_path)
        payload = json.loads((tmp_path / "report.json").read_text())
        with open(tmp_path / "links.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        max_util_csv = max(float(r["utilization"]) for r in rows)
        assert payload["max_link_utilization"] == max_util_csv
        assert len(rows) == len(payload["links"])

    def test_temp_path_lengths_rows(self, tmp_path):
        report = self.run_t3()
        emit_reports(report, tmp_path)
        with open(tmp_path / "temp_path_lengths.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == sum(o.episodes_run for o in report.outcomes)
        assert all(int(r["length"]) <= report.config.hyper.ttl for r in rows)

    def test_convergence_rows(self, tmp_path):
        report = self.run_t3()
        emit_reports(report, tmp_path)
        with open(tmp_path / "convergence.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == len(report.outcomes)
        assert int(rows[0]["converged_episode"]) == report.outcomes[0].converged_episode

    def test_empty_run_emits_headers_only(self, tmp_path):
        emit_reports(run_sequence(t3_config(demands=[])), tmp_path)
        for name in ("links.csv", "temp_path_lengths.csv", "convergence.csv"):
            with open(tmp_path / name, newline="") as fh:
                rows = list(csv.reader(fh))
            if name == "links.csv":
                assert len(rows) == 4  # header + the three t3 links
            else:
                assert len(rows) == 1

    def test_gamma_reports_shape(self, tmp_path):
        study = run_gamma_study(t3_config(), [0.3, 0.9])
        emit_gamma_reports(study, tmp_path)
        with open(tmp_path / "convergence.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["demand_index", "src", "dst", "control", "gamma=0.3", "gamma=0.9"]
        assert rows[-1][0] == "total"
        assert int(rows[-1][3]) == study.control.total_convergence_episodes
        payload = json.loads((tmp_path / "report.json").read_text())
        assert {t["group"] for t in payload["totals"]} == {"control", "gamma=0.3", "gamma=0.9"}

    def test_comparison_reports_shape(self, tmp_path):
        comparison = compare_baseline(t3_config())
        emit_comparison_reports(comparison, tmp_path)
        assert (tmp_path / "links_baseline.csv").exists()
        payload = json.loads((tmp_path / "report.json").read_text())
        assert payload["max_link_utilization"]["baseline"] == 1.0


class TestCli:
    def test_run_subcommand(self, tmp_path, capsys):
        out_dir = tmp_path / "out"
        code = main([
            "run", "--topology", "t3", "--demands", self.demand_file(tmp_path),
            "--weights", "0,0,0,0,1", "--out", str(out_dir),
        ])
        assert code == 0
        captured = capsys.readouterr().out
        assert "0->1->2" in captured
        assert (out_dir / "report.json").exists()

    def demand_file(self, tmp_path):
        path = tmp_path / "demands.json"
        path.write_text(json.dumps([{"src": 0, "dst": 2, "traffic_bps": 1e5}]))
        return str(path)

    def test_run_uses_bundled_demands_for_t8(self, capsys):
        code = main(["run", "--topology", "t8", "--weights", "0,0,0,1,1", "--episodes", "75"])
        assert code == 0
        assert "max link utilization" in capsys.readouterr().out

    def test_run_requires_demands_for_custom_topology(self, tmp_path):
        from rlroute.network import save_topology

        topo = tmp_path / "net.json"
        save_topology(load_builtin("t1"), topo)
        with pytest.raises(SystemExit):
            main(["run", "--topology", str(topo)])

    def test_gamma_study_subcommand(self, tmp_path, capsys):
        out_dir = tmp_path / "study"
        code = main([
            "gamma-study", "--topology", "t3", "--demands", self.demand_file(tmp_path),
            "--weights", "0,0,0,0,1", "--gammas", "0.5,0.9", "--out", str(out_dir),
        ])
        assert code == 0
        assert "control" in capsys.readouterr().out
        assert (out_dir / "convergence.csv").exists()

    def test_compare_baseline_subcommand(self, tmp_path, capsys):
        code = main([
            "compare-baseline", "--topology", "t3", "--demands", self.demand_file(tmp_path),
            "--weights", "0,0,0,0,1",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert "learned max link utilization" in out
        assert "baseline max link utilization" in out

    def test_validate_topology_ok(self, capsys):
        assert main(["validate-topology", "--topology", "t7"]) == 0
        assert "16 nodes, 52 links" in capsys.readouterr().out

    def test_validate_topology_bad_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"nodes": [], "links": [{"src": 0, "dst": 1}]}')
        assert main(["validate-topology", "--topology", str(bad)]) == 1
        assert "invalid topology" in capsys.readouterr().err

    def test_bad_weights_rejected(self):
        with pytest.raises(SystemExit):
            main(["run", "--topology", "t3", "--weights", "1,2,3"])

    def test_missing_topology_file(self, capsys):
        code = main(["run", "--topology", "nosuch.json", "--demands", "also_missing.json"])
        assert code == 1
