"""CLI surface: exit codes, file handling, determinism, report formats."""

import json
import xml.etree.ElementTree as ET

import pytest

from planesep import cli, repository

SVG_NS = "{http://www.w3.org/2000/svg}"


def run_cli(*argv):
    return cli.main(list(argv))


@pytest.fixture
def primes_repo_path(tmp_path):
    out = tmp_path / "repo.txt"
    rc = run_cli("build", "--source", "primes:100", "--out", str(out),
                 "--dims", "2", "--seed", "4")
    assert rc == 0
    return out


class TestBuild:
    def test_primes_100(self, primes_repo_path, capsys):
        repo = repository.load(primes_repo_path)
        assert repo.count == 25

    def test_empty_source_builds_empty_repo(self, tmp_path):
        src = tmp_path / "vals.txt"
        src.write_text("# nothing here\n\n")
        out = tmp_path / "empty.txt"
        assert run_cli("build", "--source", str(src), "--out", str(out)) == 0
        assert repository.load(out).count == 0

    def test_duplicate_lines_reported_not_fatal(self, tmp_path, capsys):
        src = tmp_path / "vals.txt"
        src.write_text("7\n11\n7\n13\n")
        out = tmp_path / "dups.txt"
        assert run_cli("build", "--source", str(src), "--out", str(out)) == 0
        assert "duplicates_skipped 1" in capsys.readouterr().out
        assert repository.load(out).count == 3

    def test_missing_source_file(self, tmp_path):
        out = tmp_path / "x.txt"
        assert run_cli("build", "--source", str(tmp_path / "nope.txt"),
                       "--out", str(out)) == 2
        assert not out.exists()

    def test_bad_line_in_source(self, tmp_path):
        src = tmp_path / "vals.txt"
        src.write_text("7\nbanana\n")
        assert run_cli("build", "--source", str(src),
                       "--out", str(tmp_path / "y.txt")) == 2

    def test_unwritable_out_leaves_no_partial_file(self, tmp_path):
        missing_dir = tmp_path / "no" / "such" / "dir" / "repo.txt"
        assert run_cli("build", "--source", "primes:50",
                       "--out", str(missing_dir)) == 2
        assert not missing_dir.exists()

    def test_random_source(self, tmp_path):
        out = tmp_path / "rand.txt"
        assert run_cli("build", "--source", "random:30:100000:5",
                       "--out", str(out)) == 0
        assert repository.load(out).count == 30

    def test_jsonl_report(self, tmp_path, capsys):
        out = tmp_path / "r.txt"
        assert run_cli("--format", "jsonl", "build", "--source", "primes:50",
                       "--out", str(out)) == 0
        payload = json.loads(capsys.readouterr().out.strip())
        assert payload["N_f"] == 15
        assert payload["verified"] is True

    def test_deterministic_repository_bytes(self, tmp_path):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        for path in (a, b):
            assert run_cli("build", "--source", "primes:500", "--out", str(path),
                           "--dims", "3", "--seed", "17") == 0
        assert a.read_bytes() == b.read_bytes()


class TestQuery:
    def test_found_exit_0(self, primes_repo_path, capsys):
        assert run_cli("query", str(primes_repo_path), "97") == 0
        out = capsys.readouterr().out
        assert "found" in out
        assert "multiplications" in out

    def test_absent_exit_1(self, primes_repo_path, capsys):
        assert run_cli("query", str(primes_repo_path), "91") == 1
        assert "absent" in capsys.readouterr().out

    def test_malformed_repo_exit_2(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a repository\n")
        assert run_cli("query", str(bad), "7") == 2

    def test_missing_repo_exit_2(self, tmp_path):
        assert run_cli("query", str(tmp_path / "nope.txt"), "7") == 2

    def test_overflowing_value_exit_2(self, primes_repo_path):
        assert run_cli("query", str(primes_repo_path), "100") == 2


class TestInsert:
    def test_insert_updates_file(self, primes_repo_path, capsys):
        src_vals = primes_repo_path.parent / "more.txt"
        src_vals.write_text("97\n89\n")  # both already stored
        assert run_cli("insert", str(primes_repo_path),
                       "--source", str(src_vals)) == 0
        assert "skipped_duplicates 2" in capsys.readouterr().out

    def test_insert_new_values_queryable(self, tmp_path):
        out = tmp_path / "repo.txt"
        assert run_cli("build", "--source", "primes:50", "--out", str(out),
                       "--dims", "2") == 0
        assert run_cli("insert", str(out), "--source", "primes:100") == 0
        assert run_cli("query", str(out), "97") == 0

    def test_value_too_wide_exit_2(self, primes_repo_path):
        src = primes_repo_path.parent / "wide.txt"
        src.write_text("101\n")
        assert run_cli("insert", str(primes_repo_path), "--source", str(src)) == 2


class TestStats:
    def test_reports_bounds(self, primes_repo_path, capsys):
        assert run_cli("stats", str(primes_repo_path)) == 0
        out = capsys.readouterr().out
        assert "bound_quoted_q_le_10n 20" in out
        assert "N_f 25" in out
        assert "ov_mult_floor" in out

    def test_load_failure_exit_2(self, tmp_path):
        assert run_cli("stats", str(tmp_path / "none.txt")) == 2

    def test_counters_self_consistent(self, primes_repo_path):
        repo = repository.load(primes_repo_path)
        floor = repo.count * repo.state.n * repo.q
        assert repo.counters.multiplications >= floor


class TestBench:
    def test_cube_scenario(self, capsys):
        assert run_cli("bench", "cube:200:8:3") == 0
        out = capsys.readouterr().out
        assert "q_total" in out
        assert "verified yes" in out

    def test_primes_scenario_reports_bound(self, capsys):
        assert run_cli("--format", "jsonl", "bench", "primes:100:2", "--seed", "1") == 0
        payload = json.loads(capsys.readouterr().out.strip().splitlines()[0])
        assert payload["mult_bound"] == 2 * 10**3
        assert payload["verified"] is True

    def test_compare_backends(self, capsys):
        assert run_cli("bench", "cube:100:5:2", "--compare-backends") == 0
        out = capsys.readouterr().out
        assert out.count("scenario cube:100:5:2") >= 2

    def test_unknown_scenario_exit_2(self):
        assert run_cli("bench", "torus:1:2:3") == 2


class TestPlot:
    def test_svg_marker_and_line_counts(self, primes_repo_path, tmp_path, capsys):
        out = tmp_path / "fig.svg"
        assert run_cli("plot", str(primes_repo_path), str(out)) == 0
        repo = repository.load(primes_repo_path)
        root = ET.parse(out).getroot()
        circles = root.findall(f".//{SVG_NS}circle")
        lines = root.findall(f".//{SVG_NS}line")
        assert len(circles) == 25
        assert len(lines) == repo.q

    def test_empty_repo_axes_only(self, tmp_path):
        repo_path = tmp_path / "empty.txt"
        src = tmp_path / "none.txt"
        src.write_text("")
        assert run_cli("build", "--source", str(src), "--out", str(repo_path),
                       "--dims", "2") == 0
        out = tmp_path / "fig.svg"
        assert run_cli("plot", str(repo_path), str(out)) == 0
        root = ET.parse(out).getroot()
        assert not root.findall(f".//{SVG_NS}circle")
        assert root.findall(f".//{SVG_NS}text")

    def test_non_2d_repo_exit_4(self, tmp_path):
        repo_path = tmp_path / "r3.txt"
        assert run_cli("build", "--source", "primes:500", "--out", str(repo_path),
                       "--dims", "3") == 0
        assert run_cli("plot", str(repo_path), str(tmp_path / "f.svg")) == 4

    def test_deterministic_svg_bytes(self, primes_repo_path, tmp_path):
        a = tmp_path / "a.svg"
        b = tmp_path / "b.svg"
        for out in (a, b):
            assert run_cli("plot", str(primes_repo_path), str(out)) == 0
        assert a.read_bytes() == b.read_bytes()
