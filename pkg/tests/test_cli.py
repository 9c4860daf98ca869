import csv
import statistics

import numpy as np
import pytest

from linkrank.bench import PlanError, SUMMARY_FIELDS, parse_plan, run_plan
from linkrank.cli import main
from linkrank.ranking import AlgorithmKind, read_scores_csv


@pytest.fixture
def g1_file(tmp_path):
    path = tmp_path / "g1.tsv"
    path.write_text("1\t0\n2\t0\n")
    return path


@pytest.fixture
def cycle_file(tmp_path):
    path = tmp_path / "cycle.tsv"
    path.write_text("0\t1\n1\t0\n")
    return path


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


class TestStats:
    def test_g1(self, g1_file, capsys):
        assert main(["stats", str(g1_file)]) == 0
        assert capsys.readouterr().out.splitlines()[0] == "%DP 33.3, AD 0.67"

    def test_back_button(self, g1_file, capsys):
        assert main(["stats", str(g1_file), "--back-button"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "%DP 0.0, AD 1.33"

    def test_empty_file(self, tmp_path, capsys):
        empty = tmp_path / "empty.tsv"
        empty.write_text("")
        assert main(["stats", str(empty)]) != 0
        assert "empty" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["stats", str(tmp_path / "nope.tsv")]) != 0
        assert capsys.readouterr().err


class TestRank:
    def test_hits(self, g1_file, tmp_path):
        out = tmp_path / "out"
        assert main(["--quiet", "--output-dir", str(out), "rank", str(g1_file), "hits"]) == 0
        auth = _rows(out / "hits_authority.csv")
        assert auth[0] == {"id": "0", "score": "1.0"}
        assert read_scores_csv(out / "hits_hub.csv").tolist() == [0.0, 0.5, 0.5]
        trace = _rows(out / "hits_trace.csv")
        assert list(trace[0]) == ["iter", "residual", "mults", "adds", "elapsed_ms"]

    def test_pagerank_back_button(self, g1_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["rank", str(g1_file), "pagerank", "--back-button", "--output-dir", str(out)]) == 0
        rows = _rows(out / "pagerank_scores.csv")
        assert rows[0]["id"] == "0"
        assert float(rows[0]["score"]) == pytest.approx(0.4865, abs=1e-4)
        printed = capsys.readouterr().out
        assert "termination converged" in printed

    def test_ahits_two_cycle(self, cycle_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["rank", str(cycle_file), "ahits", "--eps", "1e-10", "--output-dir", str(out)]) == 0
        assert "K 1" in capsys.readouterr().out
        np.testing.assert_allclose(read_scores_csv(out / "ahits_authority.csv"), [0.5, 0.5])

    def test_positive_with_weights_dump(self, g1_file, tmp_path):
        out = tmp_path / "out"
        args = ["rank", str(g1_file), "ahits-pos", "--zeta", "0.9", "--weights-csv", "--output-dir", str(out)]
        assert main(args) == 0
        assert _rows(out / "ahits-pos_weights.csv")[0] == {"id": "0", "ca": "2.0", "ch": "0.0"}

    def test_labels_in_top_listing(self, g1_file, tmp_path, capsys):
        labels = tmp_path / "labels.tsv"
        labels.write_text("0\tMain_Page\n1\tA\n2\tB\n")
        main(["rank", str(g1_file), "hits", "--labels", str(labels), "--top", "1", "--output-dir", str(tmp_path)])
        assert "Main_Page" in capsys.readouterr().out

    @pytest.mark.parametrize(
        "extra",
        [["hits", "--alpha", "0.5"], ["ahits", "--zeta", "0.9"], ["pagerank", "--weights-csv"],
         ["pagerank", "--alpha", "1.5"], ["bogus"]],
    )
    def test_usage_errors(self, g1_file, extra, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["rank", str(g1_file)] + extra)
        assert exc.value.code == 2

    def test_degenerate_graph(self, tmp_path, capsys):
        path = tmp_path / "edgeless.tsv"
        path.write_text("# nodes: 3\n")
        assert main(["rank", str(path), "hits", "--output-dir", str(tmp_path)]) == 1
        assert "degenerate" in capsys.readouterr().err


class TestCompare:
    def test_two_cycle(self, cycle_file, tmp_path):
        assert main(["--quiet", "compare", str(cycle_file), "--output-dir", str(tmp_path)]) == 0
        rows = _rows(tmp_path / "compare.csv")
        assert [r["pair"] for r in rows] == [
            "authority hits-ahits", "hub hits-ahits", "authority-indegree", "hub-outdegree",
        ]
        assert all(float(r["cosine"]) == pytest.approx(1) for r in rows)
        assert all(r["spearman"] == "n/a" for r in rows)

    def test_g1(self, g1_file, tmp_path):
        assert main(["--quiet", "compare", str(g1_file), "--output-dir", str(tmp_path)]) == 0
        rows = {r["pair"]: r for r in _rows(tmp_path / "compare.csv")}
        assert float(rows["authority hits-ahits"]["cosine"]) == pytest.approx(1, abs=1e-12)

    def test_synthetic_smoke(self, tmp_path):
        graph = tmp_path / "s.tsv"
        assert main(["--quiet", "gen", str(graph), "--n", "1000", "--seed", "1"]) == 0
        assert main(["--quiet", "compare", str(graph), "--output-dir", str(tmp_path)]) == 0
        rows = _rows(tmp_path / "compare.csv")
        numbers = [float(r[k]) for r in rows for k in ("cosine", "spearman")]
        assert len(numbers) == 8
        assert all(np.isfinite(numbers))


class TestGen:
    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.tsv", tmp_path / "b.tsv"
        assert main(["--quiet", "gen", str(a), "--n", "100", "--seed", "7"]) == 0
        assert main(["--quiet", "gen", str(b), "--n", "100", "--seed", "7"]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_summary_matches_stats(self, tmp_path, capsys):
        path = tmp_path / "g.tsv"
        main(["gen", str(path), "--n", "200", "--seed", "2", "--dangling", "0.3"])
        gen_out = capsys.readouterr().out
        main(["stats", str(path)])
        stats_out = capsys.readouterr().out
        assert gen_out.startswith(stats_out.rstrip("\n"))

    def test_heavy_dangling_then_pagerank(self, tmp_path):
        path = tmp_path / "g.tsv"
        assert main(["--quiet", "gen", str(path), "--n", "500", "--dangling", "0.9", "--seed", "4"]) == 0
        assert main(["--quiet", "rank", str(path), "pagerank", "--output-dir", str(tmp_path)]) == 0

    def test_infeasible_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["gen", str(tmp_path / "x.tsv"), "--n", "10", "--avg-degree", "5", "--dangling", "0.9"])
        assert exc.value.code == 2


PLAN = """
[plan]
algorithms = hits, pagerank
repetitions = 3
back_button = true

[graph]
synth_n = 300
synth_dangling = 0.5
synth_seed = 5
"""


class TestBench:
    def test_bookkeeping(self, tmp_path):
        plan_file = tmp_path / "plan.ini"
        plan_file.write_text(PLAN)
        out = tmp_path / "run"
        assert main(["--quiet", "bench", str(plan_file), "--output-dir", str(out)]) == 0
        assert len(list((out / "traces").glob("*.csv"))) == 6
        rows = _rows(out / "summary.csv")
        assert len(rows) == 2
        assert list(rows[0]) == SUMMARY_FIELDS
        assert {r["status"] for r in rows} == {"ok"}
        for r in rows:
            assert int(r["total_mults"]) > 0 and r["termination"] == "converged"

    def test_deterministic_iteration_counts(self, tmp_path):
        plan = parse_plan(PLAN)
        first = run_plan(plan, tmp_path / "a")
        second = run_plan(plan, tmp_path / "b", jobs=2)
        assert [r.K for r in first] == [r.K for r in second]

    def test_failed_cell_recorded_and_run_continues(self, tmp_path):
        plan_file = tmp_path / "plan.ini"
        plan_file.write_text(
            "[missing]\npath = nope.tsv\n\n[ok]\nsynth_n = 50\nalgorithms = hits\n"
        )
        assert main(["--quiet", "bench", str(plan_file), "--output-dir", str(tmp_path / "o")]) == 1
        rows = {r["graph"]: r for r in _rows(tmp_path / "o" / "summary.csv")}
        assert rows["missing"]["status"].startswith("error")
        assert rows["ok"]["status"] == "ok"

    def test_output_dir_from_plan(self, tmp_path, g1_file):
        plan_file = tmp_path / "plan.ini"
        plan_file.write_text(f"[plan]\noutput_dir = {tmp_path / 'planned'}\n\n[g1]\npath = {g1_file.name}\nalgorithms = hits\n")
        assert main(["--quiet", "bench", str(plan_file)]) == 0
        assert (tmp_path / "planned" / "summary.csv").exists()

    def test_seeds_expand(self):
        plan = parse_plan("[s]\nsynth_n = 100\nseeds = 1, 2, 3\nalgorithms = ahits\n")
        assert [c.graph_name for c in plan.cells] == ["s-s1", "s-s2", "s-s3"]
        assert plan.cells[0].algorithms == [AlgorithmKind.AHITS]

    @pytest.mark.parametrize(
        "text",
        [
            "[plan]\nalgorithms = hits\n",
            "[g]\npath = x.tsv\nsynth_n = 10\n",
            "[g]\npath = x.tsv\nalgorithms = foo\n",
            "[g]\npath = x.tsv\nrepetitions = 0\n",
            "[g]\npath = x.tsv\nwat = 1\n",
            "[g]\npath = x.tsv\nalpha = 2\n",
            "not an ini file",
        ],
    )
    def test_bad_plans(self, text):
        with pytest.raises(PlanError):
            parse_plan(text)

    def test_back_button_plan_weighted_hits_needs_fewer_iterations(self, tmp_path):
        plan = parse_plan(
            "[plan]\nalgorithms = hits, ahits\nback_button = true\n\n"
            "[s]\nsynth_n = 2000\nsynth_dangling = 0.8\nseeds = 1, 2, 3, 4, 5\n"
        )
        rows = run_plan(plan, tmp_path)
        k = {algo: [r.K for r in rows if r.algorithm == algo] for algo in ("hits", "ahits")}
        assert statistics.median(k["ahits"]) <= statistics.median(k["hits"])
