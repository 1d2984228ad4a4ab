import json
from pathlib import Path

import pytest

from tlrefl.cli import TASK_ORDER, load_schema, main, parse_config, run, strip_timing
from tlrefl.errors import ConfigInvalidError
from tlrefl.model import fourier_model

JOBS = Path(__file__).resolve().parents[1] / "demos" / "jobs"


def model_cfg(n, **extra):
    spec = fourier_model(n)
    cfg = {"n": n, "lambdas": [[z.real, z.imag] for z in spec.lambdas], "exponents": list(spec.exponents)}
    cfg.update(extra)
    return cfg


def job(n=3, plan=None, tasks=None, seeds=(0, 1), **model_extra):
    cfg = {"model": model_cfg(n, **model_extra), "seeds": list(seeds)}
    if plan is not None:
        cfg["plan"] = plan
    if tasks is not None:
        cfg["tasks"] = tasks
    return cfg


TWO_EIGEN3 = {"classes": [{"d": [1.0, 0.0], "subblocks": [{"kind": "TwoEigen", "s": 3, "m_prime": 1}]}]}


def write(tmp_path, cfg, name="job.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


class TestRun:
    def test_n2_validate_tl_ybe(self):
        report = run(job(2, tasks=["validate", "tl", "ybe"]))
        assert report["passed"]
        assert set(report["tasks"]) == {"validate", "tl", "ybe"}

    def test_central_pipeline(self):
        report = run(job(3, TWO_EIGEN3))
        assert report["passed"]
        assert list(report["tasks"]) == list(TASK_ORDER)
        assert [e["seed"] for e in report["tasks"]["reflect"]] == [0, 1]
        assert float(report["tasks"]["reflect"][0]["residual"]) <= 1e-8

    def test_non_hadamard_fails(self):
        cfg = {"model": {"n": 2, "lambdas": [[1, 0], [2, 0]], "exponents": [0, 1]}, "tasks": ["validate", "tl"]}
        report = run(cfg)
        assert not report["passed"] and not report["tasks"]["validate"]["passes"]

    def test_residual_strings(self):
        report = run(job(2, tasks=["validate"]))
        text = report["tasks"]["validate"]["residual"]
        assert isinstance(text, str) and len(text.split("e")[0].replace(".", "").lstrip("-")) == 17

    def test_conventions_echoed(self):
        conv = run(job(2, tasks=["validate"], branch="minus"))["conventions"]
        assert conv["branch"] == "minus"
        for key in ("qprime_equation", "mu_normalization", "dimension_counting", "class_scaling"):
            assert key in conv

    def test_n4_two_eigen_reports_failure(self):
        plan = {"classes": [{"d": [1, 0], "subblocks": [{"kind": "TwoEigen", "s": 4, "m_prime": 1}]}]}
        report = run(job(4, plan, tasks=["reflect"]))
        assert not report["passed"]
        assert report["tasks"]["reflect"][0]["error"].startswith("DegenerateCoefficientError")

    def test_moduli_task(self):
        plan = {"classes": [{"d": [0, 0], "subblocks": [{"kind": "Nilpotent", "t": 2, "m": 1}]},
                            {"subblocks": [{"kind": "TwoEigen", "s": 3, "m_prime": 1}]}]}
        report = run(job(5, plan, tasks=["moduli"], seeds=[4]))
        checks = report["tasks"]["moduli"][0]["checks"]
        assert [c["expected_complex"] for c in checks] == [1, 2]
        assert report["passed"]

    def test_tolerance_override(self):
        plan = {"classes": [{"d": [1, 0], "subblocks": [{"kind": "Zero", "size": 3}]}]}
        report = run(job(3, plan, tasks=["reflect"]), eps_rel=1e-6)
        assert report["tolerances"]["eps_rel"] == 1e-6

    def test_seed_override(self):
        report = run(job(3, TWO_EIGEN3, tasks=["sample"]), seeds=[42])
        assert report["seeds"] == [42] and len(report["tasks"]["sample"]) == 1


class TestDeterminism:
    def test_same_seed_same_report(self):
        cfg = job(3, TWO_EIGEN3, seeds=[5, 6])
        a, b = run(cfg), run(cfg)
        assert json.dumps(strip_timing(a), sort_keys=True) == json.dumps(strip_timing(b), sort_keys=True)

    def test_parallel_matches_serial(self):
        cfg = job(3, TWO_EIGEN3, seeds=[3, 1, 2])
        serial, par = run(cfg), run(cfg, parallel=3)
        assert strip_timing(serial) == strip_timing(par)

    def test_different_seeds_differ(self):
        cfg = job(3, TWO_EIGEN3, tasks=["sample"])
        assert run(cfg, seeds=[1])["tasks"]["sample"][0]["k_master"] != run(cfg, seeds=[2])["tasks"]["sample"][0]["k_master"]


class TestConfigErrors:
    @pytest.mark.parametrize("cfg", [
        {},
        {"model": {"n": 2, "lambdas": [[1, 0]], "exponents": [0, 1]}, "bogus": 1},
        {"model": {"n": 2, "lambdas": [[1, 0], [-1, 0]], "exponents": [0, 1], "branch": "sideways"}},
        job(2, tasks=["reflect"]),
        job(3, {"classes": [{"d": [1, 0], "subblocks": [{"kind": "Zero", "size": 2}]}]}),
        job(2, tasks=["flying"]),
        job(2, h=[[1, 0]] * 3),
        {"model": {"n": 2, "lambdas": [[1, 0], [1, 0]], "exponents": [0, 1]}},
    ])
    def test_invalid(self, cfg):
        with pytest.raises(ConfigInvalidError):
            parse_config(cfg)

    def test_schema_ships(self):
        schema = load_schema()
        assert set(schema["properties"]) >= {"model", "plan", "seeds", "tolerances", "tasks"}


class TestMain:
    def test_exit_zero_and_stdout(self, tmp_path, capsys):
        code = main(["--config", str(write(tmp_path, job(2, tasks=["validate", "tl", "ybe"])))])
        out = capsys.readouterr()
        assert code == 0
        assert json.loads(out.out)["passed"]
        assert "PASS" in out.err

    def test_json_only(self, tmp_path, capsys):
        main(["--config", str(write(tmp_path, job(2, tasks=["validate"]))), "--json-only"])
        assert capsys.readouterr().err == ""

    def test_exit_one(self, capsys):
        assert main(["--config", str(JOBS / "non_hadamard.json"), "--json-only"]) == 1
        assert not json.loads(capsys.readouterr().out)["passed"]

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "nope.json")]) == 2
        assert "usage" in capsys.readouterr().err

    def test_missing_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_unknown_flag(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            main(["--config", str(write(tmp_path, job(2))), "--frobnicate"])
        assert exc.value.code == 2

    def test_bad_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        assert main(["--config", str(path)]) == 2

    def test_out_and_seed(self, tmp_path):
        out = tmp_path / "report.json"
        code = main(["--config", str(write(tmp_path, job(3, TWO_EIGEN3))), "--out", str(out), "--seed", "42",
                     "--json-only"])
        assert code == 0
        assert json.loads(out.read_text())["seeds"] == [42]

    def test_tol_flag(self, tmp_path):
        out = tmp_path / "report.json"
        main(["--config", str(write(tmp_path, job(2, tasks=["ybe"]))), "--out", str(out), "--tol", "1e-6",
              "--json-only"])
        assert json.loads(out.read_text())["tolerances"]["eps_rel"] == 1e-6

    def test_byte_identical_reruns(self, tmp_path):
        path = write(tmp_path, job(3, TWO_EIGEN3, seeds=[7]))
        texts = []
        for i in range(2):
            out = tmp_path / f"r{i}.json"
            main(["--config", str(path), "--out", str(out), "--json-only", "--parallel", "2"])
            texts.append(json.dumps(strip_timing(json.loads(out.read_text())), sort_keys=True))
        assert texts[0] == texts[1]

    @pytest.mark.parametrize("name,code", [("fourier2_tl.json", 0), ("fourier3_two_eigen.json", 0),
                                           ("fourier6_mixed.json", 0), ("non_hadamard.json", 1)])
    def test_demo_jobs(self, name, code):
        assert main(["--config", str(JOBS / name), "--json-only", "--out", "/dev/null"]) == code
