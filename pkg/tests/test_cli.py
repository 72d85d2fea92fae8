import csv
import io
import json
import math
import subprocess
import sys
from importlib.resources import files
from pathlib import Path

import jsonschema
import pytest

from bgls.cli import build_parser, main

GOLDEN = Path(__file__).parent / "golden"
SCHEMA = json.loads(files("bgls").joinpath("schemas/report.schema.json").read_text())

GOLDEN_CASES = {
    "sharpness_bounded.csv": ["sharpness", "--count", "6"],
    "sharpness_bounded.json": ["sharpness", "--count", "6", "--format", "json"],
    "nu.json": ["nu", "--q", "1.5", "--q", "2", "--q", "3", "--format", "json"],
    "norm_core.csv": ["norm", "--f", "u-delta", "--Delta", "2", "--d", "2", "--p", "1", "--p", "1.5", "--core-only"],
}


def run(args, **kw):
    return subprocess.run([sys.executable, "-m", "bgls", *args], capture_output=True, text=True, **kw)


def run_main(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_files(name):
    res = run(GOLDEN_CASES[name])
    assert res.returncode == 0, res.stderr
    assert res.stdout == (GOLDEN / name).read_text()


def test_threads_not_echoed(capsys):
    _, out, _ = run_main(["nu", "--q", "2", "--threads", "3", "--format", "json"], capsys)
    assert "threads" not in json.loads(out)["config"]


def test_sharpness_threads_byte_identical():
    base = ["sharpness", "--count", "6"]
    one = run([*base, "--threads", "1"])
    four = run([*base, "--threads", "4"])
    assert one.returncode == four.returncode == 0
    assert one.stdout == four.stdout


def test_norm_const_example(capsys):
    code, out, _ = run_main(["norm", "--f", "const", "--d", "3", "--p", "2", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["rows"][0]["norm"] == pytest.approx(2.046653, rel=1e-6)


def test_norm_core_example(capsys):
    code, out, _ = run_main(["norm", "--f", "u-delta", "--Delta", "2", "--d", "2", "--p", "1", "--core-only"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["p", "norm", "psi", "ratio"]
    assert float(rows[1][1]) == pytest.approx(2.5 * math.pi * math.exp(-2.0), rel=1e-9)


def test_invalid_delta_exits_1(capsys):
    code, out, err = run_main(["norm", "--f", "u-delta", "--Delta", "0.5", "--p", "1"], capsys)
    assert code == 1
    assert "Delta > 1" in err and out == ""


def test_config_error_is_json_in_json_mode():
    res = run(["norm", "--f", "u-delta", "--Delta", "0.5", "--p", "1", "--format", "json"])
    assert res.returncode == 1
    err = json.loads(res.stderr)
    assert err["exit_code"] == 1 and "Delta" in err["error"]["message"]


def test_unknown_flag_exits_1():
    res = run(["sharpness", "--no-such-flag"])
    assert res.returncode == 1


def test_divergence_exits_2(capsys):
    code, _, err = run_main(["norm", "--f", "v-delta", "--domain", "exterior", "--weight-exp", "1", "--p", "1.5"], capsys)
    assert code == 2
    assert err


def test_sharpness_csv_layout(capsys):
    code, out, _ = run_main(["sharpness", "--count", "4"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["p", "eps", "num_norm", "den_norm", "V"]
    assert rows[-2][0] == "slope" and rows[-1][0] == "residual"
    assert len(rows) == 1 + 4 + 2


def test_sharpness_reports(capsys):
    slopes = {}
    for rep in ("V", "numerator-slope", "denominator-slope"):
        code, out, _ = run_main(["sharpness", "--report", rep], capsys)
        assert code == 0
        slopes[rep] = float(out.strip().splitlines()[-2].split(",")[1])
    assert abs(slopes["V"]) <= 0.15
    assert slopes["numerator-slope"] == pytest.approx(-2.5, abs=0.1)
    assert slopes["denominator-slope"] == pytest.approx(-1.5, abs=0.1)


def test_theorem1_constant(capsys):
    code, out, _ = run_main(["theorem1", "--f", "const", "--grid-n", "16", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["estimatedC"] == 0.0


def test_nu_example(capsys):
    code, out, _ = run_main(["nu", "--q", "2", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["rows"][0]["nu"] == pytest.approx(1.0, abs=1e-6)


def test_oracle_check_default(capsys):
    code, out, _ = run_main(["oracle-check", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["passed"] and doc["max_rel_err"] <= 1e-6
    assert len(doc["rows"]) == 48


@pytest.mark.parametrize(
    "args",
    [
        ["norm", "--f", "u-delta", "--p-min", "1", "--p-max", "1.9", "--p-count", "4", "--psi", "power", "--psi-b", "2"],
        ["norm", "--f", "v-delta", "--domain", "exterior", "--weight-exp", "1", "--p", "3", "--psi", "tail", "--psi-a", "2", "--beta", "1", "--gamma", "-1"],
        ["sharpness", "--count", "3"],
        ["sharpness", "--case", "infinity", "--count", "3"],
        ["theorem1", "--grid-n", "16"],
        ["nu", "--q-min", "1.5", "--q-max", "3", "--q-count", "3"],
        ["oracle-check", "--s-count", "2", "--m-count", "2"],
    ],
)
def test_json_validates_against_schema(args, capsys):
    code, out, _ = run_main([*args, "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    assert doc["command"] == args[0]


def test_schema_rejects_malformed_sharpness():
    doc = json.loads((GOLDEN / "sharpness_bounded.json").read_text())
    jsonschema.validate(doc, SCHEMA)
    doc["rows"][0]["extra"] = 1.0
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(doc, SCHEMA)


def _argv_from_config(cfg):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[cfg["command"]]
    argv = [cfg["command"]]
    for action in sub._actions:
        if not action.option_strings or action.dest not in cfg:
            continue
        value = cfg[action.dest]
        flag = action.option_strings[0]
        if value is None or value is False:
            continue
        if value is True:
            argv.append(flag)
        elif isinstance(value, list):
            for v in value:
                argv += [flag, str(v)]
        else:
            argv += [flag, str(value)]
    return argv


@pytest.mark.parametrize("name", ["sharpness_bounded.json", "nu.json"])
def test_config_echo_round_trips(name, capsys):
    doc = json.loads((GOLDEN / name).read_text())
    argv = _argv_from_config(doc["config"])
    code, out, _ = run_main(argv, capsys)
    assert code == 0
    assert out == (GOLDEN / name).read_text()


def test_output_and_plot_files(tmp_path, capsys):
    table = tmp_path / "scan.csv"
    plot = tmp_path / "scan.svg"
    code, out, _ = run_main(["sharpness", "--count", "4", "--output", str(table), "--plot", str(plot)], capsys)
    assert code == 0 and out == ""
    assert table.read_text().startswith("p,eps,num_norm,den_norm,V\n")
    svg = plot.read_text()
    assert svg.startswith("<svg") and "polyline" in svg
    code, _, _ = run_main(["sharpness", "--count", "4", "--plot", str(tmp_path / "again.svg")], capsys)
    assert (tmp_path / "again.svg").read_text() == svg


def test_version_flag():
    res = run(["--version"])
    assert res.returncode == 0 and "bgls" in res.stdout
