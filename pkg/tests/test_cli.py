"""Exit codes, pinned outputs, determinism, and config resolution."""

import json

import pytest

from altfrob import cli
from altfrob.deform import problem_to_json, trivial_deformation_problem
from altfrob.presaito import loads_family
from altfrob.projective import build_pn


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_unknown_flag_is_usage_error(self, capsys):
        code, _, err = run(["grassmann", "--r", "2", "--n", "3", "--bogus"], capsys)
        assert code == 2
        assert "usage:" in err

    def test_missing_subcommand_is_usage_error(self, capsys):
        code, _, err = run([], capsys)
        assert code == 2
        assert "usage:" in err

    def test_unknown_subcommand_is_usage_error(self, capsys):
        code, _, _ = run(["frobnicate"], capsys)
        assert code == 2

    def test_out_of_range_arguments(self, capsys):
        code, _, err = run(["grassmann", "--r", "5", "--n", "3"], capsys)
        assert code == 2
        assert "1 <= r <= n" in err
        code, _, _ = run(["pn", "--n", "0"], capsys)
        assert code == 2
        code, _, _ = run(["gw", "--dmax", "0"], capsys)
        assert code == 2

    def test_missing_input_file(self, capsys, tmp_path):
        code, _, err = run(["verify", "--family", str(tmp_path / "nope.json")], capsys)
        assert code == 2
        assert "not found" in err


class TestPinnedOutputs:
    def test_gw_dmax_3(self, capsys):
        code, out, _ = run(["gw", "--dmax", "3"], capsys)
        assert code == 0
        assert out == "N=[1,1,12]\n"

    def test_grassmann_oracle_2_3(self, capsys):
        code, out, _ = run(["grassmann", "--r", "2", "--n", "3", "--oracle"], capsys)
        assert code == 0
        assert out == "tables agree (20 products)\n"

    def test_grassmann_oracle_accepts_seed(self, capsys):
        code, out, _ = run(["grassmann", "--r", "1", "--n", "2",
                            "--oracle", "--seed", "5"], capsys)
        assert code == 0
        assert "tables agree" in out

    def test_gw_mismatch_exits_1(self, capsys, monkeypatch):
        monkeypatch.setattr(cli, "wdvv_oracle", lambda dmax: [0] * dmax)
        code, _, err = run(["gw", "--dmax", "2"], capsys)
        assert code == 1
        assert "check failed" in err


class TestDeterminism:
    @pytest.mark.parametrize("argv", [
        ["grassmann", "--r", "2", "--n", "3"],
        ["grassmann", "--r", "2", "--n", "3", "--format", "csv"],
        ["grassmann", "--r", "2", "--n", "3", "--metric"],
        ["mirror", "--n", "2"],
        ["pn", "--n", "2"],
    ])
    def test_repeated_runs_are_byte_identical(self, argv, capsys):
        code1, out1, _ = run(argv, capsys)
        code2, out2, _ = run(argv, capsys)
        assert code1 == code2 == 0
        assert out1 == out2
        assert out1.endswith("\n")

    def test_json_keys_are_sorted(self, capsys):
        _, out, _ = run(["mirror", "--n", "1"], capsys)
        doc = json.loads(out)
        assert list(doc) == sorted(doc)


class TestFormats:
    def test_csv_header(self, capsys):
        code, out, _ = run(["grassmann", "--r", "2", "--n", "2",
                            "--format", "csv"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "lambda,mu,nu,qpow,coef"

    def test_pretty_lists_products(self, capsys):
        code, out, _ = run(["grassmann", "--r", "2", "--n", "2",
                            "--format", "pretty"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "alternate product on G(2, 3)"
        assert "(1) . (1 1) = (-) * [q]" in out

    def test_metric_payload_shape(self, capsys):
        code, out, _ = run(["grassmann", "--r", "2", "--n", "3", "--metric"], capsys)
        assert code == 0
        doc = json.loads(out)
        assert doc["r"] == 2 and doc["n"] == 3
        assert len(doc["partitions"]) == 6
        assert len(doc["entries"]) == 6

    def test_out_flag_writes_file_and_keeps_stdout_quiet(self, capsys, tmp_path):
        target = tmp_path / "table.json"
        code, out, _ = run(["grassmann", "--r", "2", "--n", "3",
                            "--out", str(target)], capsys)
        assert code == 0
        assert out == ""
        doc = json.loads(target.read_text())
        assert doc["r"] == 2


class TestPnAndVerify:
    def test_pn_emits_loadable_family(self, capsys):
        code, out, _ = run(["pn", "--n", "2"], capsys)
        assert code == 0
        fam = loads_family(out)
        assert fam.d == 3

    def test_pn_check_passes(self, capsys):
        code, out, _ = run(["pn", "--n", "3", "--check"], capsys)
        assert code == 0
        assert "FAIL" not in out
        assert "pre-Saito relations" in out
        assert "metric relations" in out

    def test_verify_round_trip(self, capsys, tmp_path):
        fam_path = tmp_path / "p2.json"
        code, _, _ = run(["pn", "--n", "2", "--out", str(fam_path)], capsys)
        assert code == 0
        code, out, _ = run(["verify", "--family", str(fam_path)], capsys)
        assert code == 0
        assert "FAIL" not in out

    def test_verify_flags_a_corrupted_family(self, capsys, tmp_path):
        fam_path = tmp_path / "p2.json"
        run(["pn", "--n", "2", "--out", str(fam_path)], capsys)
        doc = json.loads(fam_path.read_text())
        doc["w"] = "5"
        fam_path.write_text(json.dumps(doc))
        code, out, _ = run(["verify", "--family", str(fam_path)], capsys)
        assert code == 1
        assert "FAIL" in out

    def test_verify_rejects_malformed_family(self, capsys, tmp_path):
        fam_path = tmp_path / "bad.json"
        fam_path.write_text("{not json")
        code, _, err = run(["verify", "--family", str(fam_path)], capsys)
        assert code == 2
        assert "could not parse" in err


class TestHm:
    @pytest.fixture()
    def inputs(self, capsys, tmp_path):
        fam_path = tmp_path / "p1.json"
        assert run(["pn", "--n", "1", "--out", str(fam_path)], capsys)[0] == 0
        problem = trivial_deformation_problem(build_pn(1), order=4)
        psi_path = tmp_path / "psi.json"
        psi_path.write_text(json.dumps(problem_to_json(problem)))
        return fam_path, psi_path

    def test_extension_round_trip(self, capsys, tmp_path, inputs):
        fam_path, psi_path = inputs
        out_path = tmp_path / "extended.json"
        code, _, _ = run(["hm", "--family", str(fam_path), "--psi", str(psi_path),
                          "--out", str(out_path)], capsys)
        assert code == 0
        extended = loads_family(out_path.read_text())
        assert "y" in [v.name for v in extended.base]
        code, out, _ = run(["verify", "--family", str(out_path)], capsys)
        assert code == 0
        assert "FAIL" not in out

    def test_order_flag_lowers_truncation(self, capsys, inputs):
        fam_path, psi_path = inputs
        code, out, _ = run(["hm", "--family", str(fam_path), "--psi", str(psi_path),
                            "--order", "2"], capsys)
        assert code == 0
        assert json.loads(out)["order"] == 2

    def test_order_above_problem_data_is_rejected(self, capsys, inputs):
        fam_path, psi_path = inputs
        code, _, err = run(["hm", "--family", str(fam_path), "--psi", str(psi_path),
                            "--order", "9"], capsys)
        assert code == 2
        assert "exceeds" in err


class TestConfigFile:
    def test_config_sets_format_and_flag_overrides(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "altfrob.json").write_text('{"format": "csv"}')
        _, out, _ = run(["grassmann", "--r", "2", "--n", "2"], capsys)
        assert out.startswith("lambda,mu,nu,")
        _, out, _ = run(["grassmann", "--r", "2", "--n", "2",
                         "--format", "json"], capsys)
        assert out.startswith("{")

    def test_unknown_config_key_is_rejected(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "altfrob.json").write_text('{"formatt": "csv"}')
        code, _, err = run(["grassmann", "--r", "2", "--n", "2"], capsys)
        assert code == 2
        assert "unknown config" in err

    def test_malformed_config_is_rejected(self, capsys, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "altfrob.json").write_text("[1, 2]")
        code, _, err = run(["gw", "--dmax", "1"], capsys)
        assert code == 2
        assert "JSON object" in err

    def test_explicit_config_path(self, capsys, tmp_path):
        cfg = tmp_path / "other.json"
        cfg.write_text('{"format": "csv"}')
        _, out, _ = run(["grassmann", "--r", "2", "--n", "2",
                         "--config", str(cfg)], capsys)
        assert out.startswith("lambda,mu,nu,")


class TestMirrorPayloads:
    def test_algebra_payload(self, capsys):
        _, out, _ = run(["mirror", "--n", "1"], capsys)
        doc = json.loads(out)
        assert doc["dim"] == 2
        assert doc["basis"] == ["1", "q*u^(-1)"]
        assert doc["matrix"][0][1] == [[1, "2"]]
        assert doc["matrix"][1][0] == [[0, "2"]]

    def test_wedge_payload(self, capsys):
        _, out, _ = run(["mirror", "--n", "2", "--wedge", "2"], capsys)
        doc = json.loads(out)
        assert doc["rank"] == 3
        assert doc["charpoly"] == [[[0, "1"]], [], [], [[1, "27"]]]

    def test_compare_reports_pass(self, capsys):
        code, out, _ = run(["mirror", "--n", "2", "--compare"], capsys)
        assert code == 0
        assert out.count("== quantum vs Gauss-Manin") == 2
        assert "FAIL" not in out

    def test_compare_single_wedge_degree(self, capsys):
        code, out, _ = run(["mirror", "--n", "3", "--compare", "--wedge", "2"], capsys)
        assert code == 0
        assert out.count("== quantum vs Gauss-Manin") == 1

    def test_wedge_out_of_range(self, capsys):
        code, _, _ = run(["mirror", "--n", "2", "--wedge", "3"], capsys)
        assert code == 2
