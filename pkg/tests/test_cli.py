import csv
import io
import json

import pytest

from src.main import main

LASING = ["--gh", "1", "--gc", "1", "--gamma-h", "1.5", "--gamma-c", "3"]
HEATING = ["--gh", "1", "--gc", "0.5", "--gamma-h", "1.5", "--gamma-c", "1"]


class TestCommands:
    """Тесты подкоманд CLI"""

    def test_steady_report(self, capsys):
        assert main(["steady", *LASING, "--nmax", "20"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["schema_version"] == "1.0"
        assert payload["phase"] == "Lasing"
        assert payload["truncation_ok"] is True

    def test_meanfield_csv(self, capsys):
        assert main(["meanfield", *LASING, "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "key,value"
        assert "phase,Lasing" in lines
        assert "iss_ld1.value,0.5625" in lines

    def test_sweep_to_file(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(["sweep", *LASING, "--axis1", "g_h:0.8:1.2:2", "--axis2", "gamma_h:1.2:1.5:2",
                     "--out", str(out)])
        assert code == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "axis1,axis2,nbar_mf,phase,status"
        assert len(lines) == 5
        assert all(line.endswith(",Lasing,ok") for line in lines[1:])

    def test_sweep_jobs_are_deterministic(self, tmp_path):
        texts = []
        for jobs in ("1", "2"):
            out = tmp_path / f"sweep_{jobs}.csv"
            assert main(["sweep", *LASING, "--axis1", "g_h:0.5:1.5:3:lin", "--axis2", "gamma_c:2:4:2",
                         "--jobs", jobs, "--out", str(out)]) == 0
            texts.append(out.read_text(encoding="utf-8"))
        assert texts[0] == texts[1]

    def test_wigner_grid(self, capsys):
        assert main(["wigner", *LASING, "--nmax", "20", "--resolution", "3"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "re,im,w"
        assert len(lines) == 10

    def test_sensing_table(self, capsys):
        assert main(["sensing", *LASING, "--r-values", "0,1.45,2.9"]) == 0
        rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert [row["ld_limit_reached"] for row in rows] == ["false", "false", "true"]
        assert rows[0]["note"] == ""
        assert "enhancement ~80" in rows[1]["note"]
        assert "Lamb-Dicke limit" in rows[2]["note"]
        assert float(rows[0]["force_sensitivity_yn_per_sqrt_i"]) == 53.0


class TestConfiguration:
    """Тесты файла конфигурации и выгрузки метрик"""

    def test_config_file_with_override(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"gh": 1.0, "gc": 1.0, "gamma_h": 1.5, "gamma_c": 3.0}), encoding="utf-8")
        assert main(["meanfield", "--config", str(path), "--gh", "0.5"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["phase"] == "Dark"

    def test_unknown_config_key(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"gh": 1.0, "temperature": 4.0}), encoding="utf-8")
        assert main(["meanfield", "--config", str(path)]) == 2
        assert "invalid configuration" in capsys.readouterr().err

    def test_metrics_out(self, tmp_path):
        metrics = tmp_path / "metrics.prom"
        assert main(["steady", *LASING, "--nmax", "20", "--out", str(tmp_path / "r.json"),
                     "--metrics-out", str(metrics)]) == 0
        assert 'phonon_steady_state_solves_total{model="two-ion"} 1.0' in metrics.read_text(encoding="utf-8")


class TestExitCodes:
    """Тесты кодов возврата"""

    def test_missing_parameter(self, capsys):
        assert main(["steady", "--gh", "1"]) == 2
        err = capsys.readouterr().err
        assert "usage" in err
        assert "--gamma-h" in err

    def test_invalid_parameter(self, capsys):
        assert main(["meanfield", "--gh", "1", "--gc", "1", "--gamma-h", "-1", "--gamma-c", "3"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_malformed_axis(self):
        assert main(["sweep", *LASING, "--axis1", "g_h:1:2", "--axis2", "g_c:1:2:2"]) == 2

    def test_heating_phase(self, capsys):
        assert main(["steady", *HEATING, "--nmax", "8"]) == 3
        assert "error:" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path, capsys):
        """ Ошибка записи результата дает код 3 и попадает в метрики """
        metrics = tmp_path / "metrics.prom"
        out = tmp_path / "missing" / "report.json"
        assert main(["meanfield", *LASING, "--out", str(out), "--metrics-out", str(metrics)]) == 3
        assert "error:" in capsys.readouterr().err
        assert 'phonon_errors_total{error_type="unexpected_error"} 1.0' in metrics.read_text(encoding="utf-8")

    def test_unwritable_metrics(self, tmp_path, capsys):
        assert main(["meanfield", *LASING, "--metrics-out", str(tmp_path / "missing" / "m.prom")]) == 3
        assert "cannot write metrics" in capsys.readouterr().err

    @pytest.mark.parametrize("argv", [["steady"], ["unknown"], []])
    def test_usage_errors(self, argv):
        assert main(argv) == 2
