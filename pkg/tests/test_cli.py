import json

import numpy as np

from proxmf import EnergyModel
from proxmf.cli import main
from proxmf.fileio import read_model, write_model

from oracles import global_min_2var


def write_zero_model(tmp_path, n=2):
    m = EnergyModel(n=n, terms=[], priors=[0.5] * n)
    path = tmp_path / "zero.model.json"
    write_model(m, path)
    return path


def write_ising_model(tmp_path, j=1.0):
    m = EnergyModel(n=2, terms=[((0, 1), j)], priors=[0.5, 0.5])
    path = tmp_path / "ising2.model.json"
    write_model(m, path)
    return path


class TestGenerate:
    def test_deterministic_output(self, tmp_path):
        out1 = tmp_path / "a.model.json"
        out2 = tmp_path / "b.model.json"
        assert main(["generate", "ising_grid", "4", "--seed", "7",
                     "--out", str(out1)]) == 0
        assert main(["generate", "ising_grid", "4", "--seed", "7",
                     "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        m1 = (tmp_path / "a.model.json.manifest.json").read_bytes()
        m2 = (tmp_path / "b.model.json.manifest.json").read_bytes()
        assert m1.replace(b"a.model", b"b.model") == m2

    def test_generated_models_validate(self, tmp_path):
        for kind in ("ising_grid", "random_poly"):
            for n in (1, 4, 9):
                out = tmp_path / f"{kind}_{n}.model.json"
                assert main(["generate", kind, str(n), "--seed", "3",
                             "--out", str(out)]) == 0
                read_model(out).validate()

    def test_different_seeds_differ(self, tmp_path):
        out1 = tmp_path / "s1.model.json"
        out2 = tmp_path / "s2.model.json"
        main(["generate", "random_poly", "6", "--seed", "1", "--out", str(out1)])
        main(["generate", "random_poly", "6", "--seed", "2", "--out", str(out2)])
        assert out1.read_bytes() != out2.read_bytes()

    def test_unknown_kind_is_input_error(self, tmp_path, capsys):
        rc = main(["generate", "mystery", "4", "--out", str(tmp_path / "x")])
        assert rc == 1
        assert "unknown kind" in capsys.readouterr().err

    def test_generate_then_solve_converges(self, tmp_path):
        model = tmp_path / "poly.model.json"
        assert main(["generate", "random_poly", "10", "--seed", "1",
                     "--out", str(model)]) == 0
        rc = main(["solve", str(model), "--lambda", "0.1",
                   "--out", str(tmp_path / "poly.trace.csv")])
        assert rc == 0  # converged within the default budget


class TestSolveCommand:
    def test_zero_energy_converges_exit_zero(self, tmp_path, capsys):
        model = write_zero_model(tmp_path)
        out = tmp_path / "run.trace.csv"
        rc = main(["solve", str(model), "--lambda", "0.1", "--out", str(out)])
        captured = capsys.readouterr().out
        assert rc == 0
        assert "sweeps: 1" in captured
        assert "termination: converged" in captured
        assert out.exists()
        manifest = json.loads((tmp_path / "run.trace.csv.manifest.json").read_text())
        assert manifest["config"]["lambda"] == 0.1
        assert manifest["variant"] == "proximal"
        assert manifest["result"]["termination"] == "converged"

    def test_budget_exhaustion_exit_two(self, tmp_path):
        model = write_ising_model(tmp_path)
        out = tmp_path / "run.trace.csv"
        rc = main(["solve", str(model), "--lambda", "0", "--max-sweeps", "2",
                   "--out", str(out)])
        assert rc == 2
        rows = out.read_text().splitlines()
        assert len(rows) == 1 + 3  # header + init + 2 sweeps

    def test_final_state_matches_grid_oracle(self, tmp_path):
        model = write_ising_model(tmp_path)
        out = tmp_path / "run.trace.csv"
        rc = main(["solve", str(model), "--lambda", "0.1",
                   "--epsilon", "1e-8", "--out", str(out)])
        assert rc == 0
        manifest = json.loads((tmp_path / "run.trace.csv.manifest.json").read_text())
        final_q = np.array(manifest["result"]["final_q"])
        expected = global_min_2var(read_model(model))
        assert np.max(np.abs(final_q - expected)) < 1e-5

    def test_deterministic_outputs(self, tmp_path):
        model = write_ising_model(tmp_path)
        out1 = tmp_path / "r1.trace.csv"
        out2 = tmp_path / "r2.trace.csv"
        main(["solve", str(model), "--lambda", "0.1", "--out", str(out1)])
        main(["solve", str(model), "--lambda", "0.1", "--out", str(out2)])
        assert out1.read_bytes() == out2.read_bytes()
        m1 = (tmp_path / "r1.trace.csv.manifest.json").read_bytes()
        m2 = (tmp_path / "r2.trace.csv.manifest.json").read_bytes()
        assert m1.replace(b"r1.trace", b"r2.trace") == m2

    def test_classic_variant_recorded(self, tmp_path):
        model = write_zero_model(tmp_path)
        out = tmp_path / "c.trace.csv"
        main(["solve", str(model), "--lambda", "0", "--out", str(out)])
        manifest = json.loads((tmp_path / "c.trace.csv.manifest.json").read_text())
        assert manifest["variant"] == "classic"

    def test_order_flag(self, tmp_path):
        model = write_ising_model(tmp_path)
        out = tmp_path / "o.trace.csv"
        assert main(["solve", str(model), "--order", "1,0",
                     "--out", str(out)]) == 0
        assert main(["solve", str(model), "--order", "2,1",
                     "--out", str(out)]) == 1

    def test_missing_model_file(self, tmp_path, capsys):
        rc = main(["solve", str(tmp_path / "absent.model.json")])
        assert rc == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_model_file(self, tmp_path, capsys):
        path = tmp_path / "bad.model.json"
        path.write_text('{"n": 1, "priors": [0.0], "terms": []}')
        rc = main(["solve", str(path)])
        assert rc == 1
        assert "prior not interior" in capsys.readouterr().err


class TestDiagnoseCommand:
    def solve_then_diagnose(self, tmp_path, model_path, lam="0.1",
                            extra_solve=(), expect_solve=0):
        out = tmp_path / "run.trace.csv"
        rc = main(["solve", str(model_path), "--lambda", lam,
                   "--out", str(out), *extra_solve])
        assert rc == expect_solve
        report = tmp_path / "report.json"
        rc = main(["diagnose", str(out), str(model_path),
                   "--out", str(report)])
        return rc, json.loads(report.read_text())

    def test_healthy_run_passes(self, tmp_path):
        model = write_ising_model(tmp_path)
        rc, report = self.solve_then_diagnose(tmp_path, model)
        assert rc == 0
        assert report["verdict"] == "pass"
        assert report["checks"]["sufficient_decrease"]["passed"]
        assert report["checks"]["gradient_bound"]["passed"]
        assert report["checks"]["box_membership"]["passed"]
        assert report["rate_fit"]["regime"] == "linear"
        assert report["second_order"]["positive_definite"]

    def test_one_sweep_trace_not_applicable(self, tmp_path):
        model = write_zero_model(tmp_path)
        rc, report = self.solve_then_diagnose(tmp_path, model)
        assert rc == 0
        assert report["checks"]["sufficient_decrease"]["applicable"] is False
        assert report["checks"]["gradient_bound"]["applicable"] is False
        assert report["rate_fit"]["applicable"] is False

    def test_fabricated_violating_trace_exit_three(self, tmp_path):
        model = write_ising_model(tmp_path)
        trace = tmp_path / "fake.trace.csv"
        trace.write_text(
            "sweep,g,grad_norm,step_norm,q_0,q_1\n"
            "0,0.5,0.1,0,0.5,0.5\n"
            "1,0.4,0.05,0.07,0.45,0.45\n"
            "2,0.4,1,0,0.45,0.45\n"
        )
        manifest = {
            "config": {"lambda": 0.1},
            "result": {"termination": "budget_exhausted",
                       "init_within_box": True},
        }
        (tmp_path / "fake.trace.csv.manifest.json").write_text(
            json.dumps(manifest)
        )
        report = tmp_path / "report.json"
        rc = main(["diagnose", str(trace), str(model), "--out", str(report)])
        assert rc == 3
        doc = json.loads(report.read_text())
        assert doc["verdict"] == "fail"
        assert 2 in doc["checks"]["gradient_bound"]["failing_sweeps"]

    def test_trace_model_mismatch(self, tmp_path, capsys):
        model2 = write_ising_model(tmp_path)
        model3 = tmp_path / "three.model.json"
        write_model(EnergyModel(n=3, terms=[], priors=[0.5] * 3), model3)
        out = tmp_path / "run.trace.csv"
        main(["solve", str(model2), "--out", str(out)])
        rc = main(["diagnose", str(out), str(model3)])
        assert rc == 1
        assert "coordinates" in capsys.readouterr().err


class TestCompareCommand:
    def test_zero_energy_closeness_is_zero(self, tmp_path):
        model = write_zero_model(tmp_path)
        prefix = tmp_path / "cmp"
        rc = main(["compare", str(model), "--lambdas", "1,0.1,0.01",
                   "--out", str(prefix)])
        assert rc == 0
        table = (tmp_path / "cmp.closeness.csv").read_text().splitlines()
        assert table[0] == "lambda,closeness"
        for row in table[1:]:
            assert float(row.split(",")[1]) == 0.0

    def test_single_zero_lambda_degenerate(self, tmp_path):
        model = write_ising_model(tmp_path)
        prefix = tmp_path / "cmp"
        rc = main(["compare", str(model), "--lambdas", "0",
                   "--out", str(prefix)])
        assert rc == 0
        rows = (tmp_path / "cmp.closeness.csv").read_text().splitlines()[1:]
        assert len(rows) == 1
        assert float(rows[0].split(",")[1]) == 0.0

    def test_ising_closeness_shrinks_with_damping(self, tmp_path):
        model = write_ising_model(tmp_path)
        prefix = tmp_path / "cmp"
        rc = main(["compare", str(model), "--lambdas", "1,0.1,0.01,0.001",
                   "--epsilon", "1e-300", "--max-sweeps", "20",
                   "--out", str(prefix)])
        assert rc == 0
        rows = (tmp_path / "cmp.closeness.csv").read_text().splitlines()[1:]
        closeness = [float(r.split(",")[1]) for r in rows]
        assert all(b <= a for a, b in zip(closeness, closeness[1:]))
        assert (tmp_path / "cmp.lambda_0.trace.csv").exists()
        assert (tmp_path / "cmp.lambda_0.001.trace.csv").exists()

    def test_empty_lambda_list_rejected(self, tmp_path, capsys):
        model = write_zero_model(tmp_path)
        rc = main(["compare", str(model), "--lambdas", ",",
                   "--out", str(tmp_path / "x")])
        assert rc == 1


class TestOracleCheckCommand:
    def test_zero_energy_passes(self, tmp_path, capsys):
        model = write_zero_model(tmp_path)
        rc = main(["oracle-check", str(model), "--samples", "100"])
        assert rc == 0
        assert "all samples satisfy" in capsys.readouterr().out

    def test_mixed_sign_model_passes(self, tmp_path):
        m = EnergyModel(
            n=3, terms=[((0, 1), 2.0), ((2,), -1.0), ((0, 1, 2), 0.7)],
            priors=[0.3, 0.5, 0.8],
        )
        path = tmp_path / "mixed.model.json"
        write_model(m, path)
        assert main(["oracle-check", str(path), "--samples", "1000"]) == 0

    def test_large_model_refused(self, tmp_path, capsys):
        m = EnergyModel(n=13, terms=[((0,), 1.0)], priors=[0.5] * 13)
        path = tmp_path / "wide.model.json"
        write_model(m, path)
        rc = main(["oracle-check", str(path)])
        assert rc == 1
        assert "limited to 12" in capsys.readouterr().err

    def test_seeded_determinism(self, tmp_path, capsys):
        model = write_ising_model(tmp_path)
        main(["oracle-check", str(model), "--samples", "50", "--seed", "9"])
        first = capsys.readouterr().out
        main(["oracle-check", str(model), "--samples", "50", "--seed", "9"])
        second = capsys.readouterr().out
        assert first == second
