import json

import pytest

from qracsim.cli import main, run_reproduction


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestTeleportCommand:
    def test_table_output(self, capsys):
        code, out = run_cli(capsys, "teleport", "--d", "2", "--k", "3")
        assert code == 0
        assert "3/4" in out
        assert "0.750000" in out

    def test_perfect_cases(self, capsys):
        for d, k in ((2, 4), (3, 9)):
            _, out = run_cli(capsys, "teleport", "--d", str(d), "--k", str(k))
            assert "= 1/1 = 1.000000" in out

    def test_json_matches_table_precision(self, capsys):
        code, out = run_cli(capsys, "teleport", "--d", "2", "--k", "3", "--format", "json")
        payload = json.loads(out)
        assert payload["exact"] == {"numerator": 3, "denominator": 4}
        assert round(payload["entanglement_fidelity_F"], 6) == 0.75


class TestQracseCommand:
    def test_d2_row(self, capsys):
        code, out = run_cli(capsys, "qracse", "--d", "2")
        assert code == 0
        assert "0.728553" in out and "0.250000" in out and "0.625000" in out

    def test_d4_minimum(self, capsys):
        _, out = run_cli(capsys, "qracse", "--d", "4")
        assert "0.260757" in out

    def test_pairs_variant(self, capsys):
        _, out = run_cli(capsys, "qracse", "--d", "2", "--variant", "pairs")
        assert "0.364277" in out and "0.607128" in out

    def test_boolean_variant(self, capsys):
        _, out = run_cli(capsys, "qracse", "--d", "2", "--variant", "f", "--truth-table", "00010111")
        assert "0.728553" in out

    def test_generated_table_source(self, capsys):
        code, out = run_cli(capsys, "qracse", "--d", "5", "--table", "generated")
        assert code == 0

    def test_csv_format(self, capsys):
        _, out = run_cli(capsys, "qracse", "--d", "2", "--format", "csv")
        assert out.splitlines()[0] == "choice,value,probability"

    def test_json_format(self, capsys):
        _, out = run_cli(capsys, "qracse", "--d", "2", "--format", "json")
        payload = json.loads(out)
        assert payload["protocol"]["p_min"] == pytest.approx(0.7285533905932737, abs=1e-9)
        assert payload["trivial"]["p_min"] == 0.25


class TestBoundsCommand:
    def test_symmetric(self, capsys):
        _, out = run_cli(capsys, "bounds", "symmetric", "--d", "2", "--N", "2")
        assert "3/4" in out

    def test_werner(self, capsys):
        _, out = run_cli(capsys, "bounds", "werner", "--n1", "1", "--n2", "2", "--d", "2")
        assert "5/6" in out

    def test_asym(self, capsys):
        code, out = run_cli(capsys, "bounds", "asym", "--d", "2", "--p", "0.3", "0.7")
        assert code == 0
        lines = out.splitlines()
        value = float(lines[0].split("=")[-1])
        closed = float(lines[1].split("=")[-1])
        assert value == pytest.approx(closed, abs=1e-6)

    def test_asym_json(self, capsys):
        _, out = run_cli(capsys, "bounds", "asym", "--d", "2", "--p", "0.5", "0.5", "--format", "json")
        payload = json.loads(out)
        assert payload["value"] == pytest.approx(0.75, abs=1e-6)


class TestOutputFile:
    def test_writes_file(self, tmp_path, capsys):
        target = tmp_path / "result.json"
        code, out = run_cli(capsys, "teleport", "--d", "2", "--k", "2", "--format", "json", "--output", str(target))
        assert code == 0
        assert out == ""
        assert json.loads(target.read_text())["exact"] == {"numerator": 1, "denominator": 2}


@pytest.fixture(scope="module")
def outcome(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("reports")
    checks, summary = run_reproduction(seed=20220314, out_dir=out_dir)
    return out_dir, checks, summary


class TestReproduceAll:
    def test_no_hard_failures(self, outcome):
        _, checks, summary = outcome
        assert summary["hard_failures"] == 0

    def test_known_annotations_present(self, outcome):
        _, _, summary = outcome
        assert "per_choice_c0(d=3)" in summary["annotations"]
        assert "per_choice_c1(d=3)" in summary["annotations"]

    def test_artifacts_written(self, outcome):
        out_dir, _, summary = outcome
        for name in ("summary.json", "table4.json", "table4.csv", "teleport_sweep.csv", "monogamy_scan.json"):
            assert (out_dir / name).exists()
        payload = json.loads((out_dir / "summary.json").read_text())
        assert payload["hard_failures"] == 0

    def test_table4_csv_shape(self, outcome):
        out_dir, _, _ = outcome
        lines = (out_dir / "table4.csv").read_text().splitlines()
        assert lines[0] == "d,P_min,trivial_P_min,P_avg,trivial_P_avg"
        assert len(lines) == 4

    def test_cli_exit_code(self, tmp_path, capsys):
        code = main(["reproduce-all", "--seed", "20220314", "--out", str(tmp_path / "r")])
        capsys.readouterr()
        assert code == 0

    def test_env_var_default_directory(self, tmp_path, capsys, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("QRACSIM_OUTPUT_DIR", str(target))
        code = main(["reproduce-all", "--seed", "20220314"])
        capsys.readouterr()
        assert code == 0
        assert (target / "summary.json").exists()
