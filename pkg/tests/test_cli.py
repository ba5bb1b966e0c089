import json

import numpy as np
import pytest

from mingraph import cli
from mingraph import families as fm

CATENOID = ["--family", "catenoid", "--param", "lambda=1", "--param", "c1=0,0",
            "--param", "C2=0", "--param", "eps0=1"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    lines = [json.loads(ln) for ln in out.splitlines()]
    return code, lines, err


class TestParse:
    def test_defaults(self):
        cfg = cli.parse_args(["suite"])
        assert cfg.command == "suite" and cfg.seed == 0 and cfg.tol is None

    def test_param_values(self):
        cfg = cli.parse_args(["eval", "--param", "a=1.5", "--param", "c0=2,-1"])
        assert cfg.params == {"a": 1.5, "c0": complex(2, -1)}

    @pytest.mark.parametrize("argv,flag", [
        (["eval", "--param", "a"], "--param"),
        (["eval", "--param", "a=x"], "--param"),
        (["eval", "--param", "a=1,2,3"], "--param"),
        (["mesh", "--window", "0,0,1"], "--window"),
        (["mesh", "--res", "1"], "--res"),
        (["verify", "--tol", "-1"], "--tol"),
        (["eval", "--point", "1"], "--point"),
    ])
    def test_usage_errors_name_flag(self, argv, flag):
        with pytest.raises(cli.UsageError, match=flag):
            cli.parse_args(argv)

    def test_config_then_flags(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"family": "catenoid", "seed": 3, "count": 50,
                                 "params": {"lam": 1.0, "c1": [0.5, 0.25], "C2": 0, "eps0": 1},
                                 "window": [-1, -1, 1, 1]}))
        cfg = cli.parse_args(["verify", "--config", str(p), "--seed", "9", "--param", "C2=0.5"])
        assert cfg.seed == 9 and cfg.count == 50 and cfg.window == (-1, -1, 1, 1)
        assert cfg.params == {"lam": 1.0, "c1": 0.5 + 0.25j, "C2": 0.5, "eps0": 1}

    def test_config_unknown_field(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text('{"colour": 1}')
        with pytest.raises(cli.UsageError, match="--config"):
            cli.parse_args(["list", "--config", str(p)])


class TestExitCodes:
    def test_list(self, capsys):
        code, lines, _ = run(capsys, "list")
        assert code == 0 and len(lines) == 8
        assert {ln["family"] for ln in lines} == set(fm.FAMILIES)
        assert lines[3]["params"]["c1"].startswith("complex")

    def test_verify_catenoid(self, capsys):
        code, (rep,), err = run(capsys, "verify", *CATENOID, "--seed", "7")
        assert code == 0 and rep["passed"] and rep["sampleCount"] == 2000
        assert "pass" in err

    def test_verify_failure_exit(self, capsys):
        code, (rep,), _ = run(capsys, "verify", *CATENOID, "--tol", "1e-30", "--count", "50")
        assert code == 1 and not rep["passed"]

    def test_validation(self, capsys):
        code, lines, err = run(capsys, "verify", "--family", "catenoid", "--param", "lambda=-1",
                               "--param", "c1=0,0", "--param", "C2=0", "--param", "eps0=1")
        assert code == 3 and lines == [] and "lambda" in err

    def test_missing_parameter(self, capsys):
        code, _, _ = run(capsys, "verify", "--family", "scherk", "--param", "a=1,0")
        assert code == 3

    def test_usage(self, capsys):
        assert run(capsys, "nope")[0] == 2
        assert run(capsys, "verify")[0] == 2  # no --family

    def test_io(self, capsys, tmp_path):
        code, _, err = run(capsys, "mesh", "--family", "great_wall", "--format", "obj",
                           "--out", str(tmp_path / "no" / "m.obj"))
        assert code == 4 and "I/O" in err

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "list", "--config", str(tmp_path / "none.json"))[0] == 4

    def test_help(self, capsys):
        assert cli.main(["--help"]) == 0


class TestCommands:
    def test_eval(self, capsys):
        code, lines, _ = run(capsys, "eval", "--family", "plane", "--param", "alpha=1",
                             "--param", "beta=2", "--param", "gamma=3", "--point", "1,1", "--point", "0,-1")
        assert code == 0 and [ln["height"] for ln in lines] == [6.0, 1.0]

    def test_eval_outside(self, capsys):
        code, (ln,), _ = run(capsys, "eval", "--family", "sharp_wall", "--point", "0,1.2")
        assert code == 0 and ln["inDomain"] is False and ln["height"] is None

    def test_mesh_obj(self, capsys, tmp_path):
        out = tmp_path / "wall.obj"
        code, (s,), _ = run(capsys, "mesh", "--family", "sharp_wall", "--param", "c0=2,0",
                            "--param", "c1=0,0", "--param", "C2=0", "--param", "eps2=1",
                            "--param", "gamma=0.8", "--res", "64", "--format", "obj", "--out", str(out))
        assert code == 0 and s["nodes"] == 64 * 64 and 0 < s["holes"] < s["nodes"]
        text = out.read_text()
        assert text.count("\nf ") + text.startswith("f ") == s["faces"]

    def test_mesh_csv_needs_out(self, capsys):
        assert run(capsys, "mesh", "--family", "great_wall", "--format", "csv")[0] == 2

    def test_mesh_json(self, capsys, tmp_path):
        out = tmp_path / "m.json"
        code, _, _ = run(capsys, "mesh", "--family", "great_wall", "--res", "8", "--out", str(out))
        data = json.loads(out.read_text())
        assert code == 0 and np.array(data["heights"], dtype=float).shape == (8, 8)

    def test_singular(self, capsys, tmp_path):
        out = tmp_path / "c.csv"
        code, lines, _ = run(capsys, "singular", "--family", "great_wall", "--probes", "10",
                             "--format", "csv", "--out", str(out))
        assert len(lines) == 2 and all(ln["polylines"] for ln in lines)
        assert code == (0 if all(ln["passed"] for ln in lines) else 1)
        assert out.read_text().startswith("curve,label")

    def test_transform(self, capsys):
        code, (rep,), _ = run(capsys, "transform", *CATENOID,
                              "--const", "sign=1", "--const", "mu=2", "--const", "D=0", "--count", "200")
        assert code == 0 and rep["passed"]

    def test_transform_trivial(self, capsys):
        code, (rep,), _ = run(capsys, "transform", "--family", "great_wall", "--case", "trivial",
                              "--const", "epsilon=-1", "--const", "C=2", "--count", "200")
        assert code == 0 and rep["passed"]

    def test_pipeline(self, capsys, tmp_path):
        out = tmp_path / "h.csv"
        code, (rep,), _ = run(capsys, "pipeline", "--family", "scherk", "--param", "a=1,0",
                              "--param", "b=0,0", "--param", "C2=0", "--param", "C3sq=1",
                              "--format", "csv", "--out", str(out))
        assert code == 0 and rep["maxResidual"] <= 1e-5
        assert out.read_text().startswith("s,H,dH")

    def test_pipeline_harmonic(self, capsys):
        code, _, _ = run(capsys, "pipeline", "--family", "plane", "--param", "alpha=1",
                         "--param", "beta=0", "--param", "gamma=0")
        assert code == 3

    def test_suite_filter(self, capsys):
        code, lines, err = run(capsys, "suite", "--family", "scherk", "--count", "100")
        assert lines and all("scherk" in ln["suite"] for ln in lines)
        assert code == (0 if all(ln["passed"] for ln in lines) else 1)
        assert "suites passed" in err

    def test_suite_tiny_tol(self, capsys):
        code, lines, _ = run(capsys, "suite", "--family", "catenoid", "--count", "100", "--tol", "1e-30")
        assert code == 1
        pde = [ln for ln in lines if ln["criterion"] in (2, 4, 5, 7)]
        assert pde and not any(ln["passed"] for ln in pde)

    def test_suite_repeatable(self, capsys):
        a = run(capsys, "suite", "--family", "great_wall", "--count", "100", "--seed", "7")[1]
        b = run(capsys, "suite", "--family", "great_wall", "--count", "100", "--seed", "7")[1]
        assert a == b
