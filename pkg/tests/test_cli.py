import json

import pytest
from click.testing import CliRunner

from crackqc.cli import main


@pytest.fixture
def runner():
    return CliRunner()


class TestValidate:
    def test_ok(self, runner):
        result = runner.invoke(main, ["validate"])
        assert result.exit_code == 0
        assert "OK" in result.output
        assert "z0 = -0.08392021690038397" in result.output

    def test_invalid_exits_2(self, runner):
        result = runner.invoke(main, ["validate", "--k1", "-3"])
        assert result.exit_code == 2
        assert "kappa1" in result.output

    def test_oscillatory_regime_exits_2(self, runner):
        result = runner.invoke(main, ["validate", "--k2", "-0.5"])
        assert result.exit_code == 2


class TestCoefficients:
    def test_formula_oracle_agreement(self, runner):
        result = runner.invoke(main, ["coefficients", "--oracle"])
        assert result.exit_code == 0

    def test_json_shape(self, runner):
        result = runner.invoke(main, ["coefficients", "--json",
                                      "--model", "qqc"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert set(data["models"]) == {"qqc"}
        entry = data["models"]["qqc"]
        assert entry["kappa"] == pytest.approx(-4.363407363353104, abs=1e-10)
        assert entry["eta"] == pytest.approx(0.929611137867217, abs=1e-11)
        assert data["limits"]["eta0"] == pytest.approx(0.9296111378660926)
        assert len(entry["expansions"]) == 2

    def test_deterministic(self, runner):
        a = runner.invoke(main, ["coefficients", "--json", "--oracle"])
        b = runner.invoke(main, ["coefficients", "--json", "--oracle"])
        assert a.output == b.output


class TestLimits:
    def test_values(self, runner):
        result = runner.invoke(main, ["limits", "--json"])
        data = json.loads(result.output)
        assert data["eta0_qc"] == pytest.approx(1.6948085235358459)
        assert data["gap"] == pytest.approx(-0.7651973856697533)


class TestTrace:
    def test_csv_header_and_start_row(self, runner):
        result = runner.invoke(main, ["trace", "--smax", "0.002"])
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0] == "s,u,P,residual"
        assert lines[1] == "0.0,0.0,0.0,0.0"
        assert len(lines) == 4

    def test_zero_length_single_row(self, runner):
        result = runner.invoke(main, ["trace", "--smax", "0"])
        assert result.exit_code == 0
        assert result.output.strip().splitlines() == ["s,u,P,residual",
                                                      "0.0,0.0,0.0,0.0"]

    def test_byte_identical_reruns(self, runner):
        args = ["trace", "--smax", "0.5", "--step", "0.01"]
        assert runner.invoke(main, args).output \
            == runner.invoke(main, args).output

    def test_all_models_need_out(self, runner):
        result = runner.invoke(main, ["trace", "--model", "all"])
        assert result.exit_code == 2

    def test_all_models_writes_files(self, runner, tmp_path):
        out = tmp_path / "curve.csv"
        result = runner.invoke(main, ["trace", "--model", "all",
                                      "--smax", "0.002",
                                      "--out", str(out)])
        assert result.exit_code == 0
        for tag in ("exact", "qc", "qqc", "fqc"):
            text = (tmp_path / f"curve_{tag}.csv").read_text()
            assert text.startswith("s,u,P,residual\n")

    def test_config_file_defaults_and_flag_override(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k1": 5.0, "smax": 0.002}))
        with_cfg = runner.invoke(main, ["trace", "--config", str(cfg)])
        plain = runner.invoke(main, ["trace", "--smax", "0.002"])
        override = runner.invoke(main, ["trace", "--config", str(cfg),
                                        "--k1", "4.0"])
        assert with_cfg.exit_code == 0
        assert with_cfg.output != plain.output
        assert override.output == plain.output


class TestFolds:
    def test_two_folds_every_model(self, runner):
        result = runner.invoke(main, ["folds", "--json"])
        data = json.loads(result.output)
        assert set(data) == {"exact", "qc", "qqc", "fqc"}
        for folds in data.values():
            assert len(folds) == 2
        assert data["exact"][0]["u"] == pytest.approx(0.23536949427100265)
        assert data["exact"][0]["P"] == pytest.approx(2.5232420834734177)


class TestCompare:
    def test_qqc_within_bound(self, runner):
        result = runner.invoke(main, ["compare", "--model", "qqc",
                                      "--smax", "1.0", "--json"])
        assert result.exit_code == 0
        data = json.loads(result.output)
        assert data["sup_distance"] < 1e-10
        assert data["sup_distance"] <= data["lipschitz_bound"]
        assert "exp" in data["derivation"]


class TestReproduceTables:
    def test_honest_failure(self, runner):
        # The embedded reference tables are not reproduced by the stated
        # parameter set; the command reports per-entry errors and exits 1.
        result = runner.invoke(main, ["reproduce-tables"])
        assert result.exit_code == 1
        assert "FAIL" in result.output
        assert result.output.count("err") >= 16

    def test_json_report(self, runner):
        result = runner.invoke(main, ["reproduce-tables", "--json"])
        assert result.exit_code == 1
        data = json.loads(result.output)
        assert data["pass"] is False
        assert len(data["rows"]) == 8
        assert data["rows"][0]["ref_kappa"] == -4.782062040603841

    def test_perturbation_diagnostic(self, runner):
        a = runner.invoke(main, ["reproduce-tables", "--json"])
        b = runner.invoke(main, ["reproduce-tables", "--json",
                                 "--perturb-k1", "0.01"])
        assert b.exit_code == 1
        assert json.loads(b.output)["max_error"] \
            != json.loads(a.output)["max_error"]


class TestCheck:
    def test_all_suites_pass(self, runner):
        result = runner.invoke(main, ["check"])
        assert result.exit_code == 0
        for name in ("identities", "energy-force", "oracle-equivalence",
                     "expansion-orders"):
            assert f"{name}: PASS" in result.output

    def test_seed_determinism(self, runner):
        a = runner.invoke(main, ["check", "--seed", "7"])
        b = runner.invoke(main, ["check", "--seed", "7"])
        assert a.output == b.output
