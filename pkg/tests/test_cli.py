import io
import json

import pandas as pd
import pytest

from src.cli import app
from src.cli.app import RunConfig, create_parser, format_number, main, parse_number

F = "1/(exp(z)+z)"


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_parse_number():
    assert parse_number("0.04") == 0.04
    assert parse_number("-1e-6") == -1e-6
    assert parse_number("0.3+0.2i") == 0.3 + 0.2j
    assert format_number(0.3 - 0.2j) == "0.3-0.2i"


def test_analyze_real_line(capsys):
    assert main(["analyze", "--map", F, "--real-line"]) == 0
    (artifact,) = _stdout_json(capsys)
    assert artifact["operation"] == "real_line_summary"
    assert artifact["payload"]["pole"] == pytest.approx(-0.5671432904, abs=1e-9)


def test_analyze_interval_and_seed(capsys, tmp_path):
    out = tmp_path / "analyze.json"
    code = main(["analyze", "--map", "lambda/(exp(z)+z)", "--param", "lambda=0.04",
                 "--interval=0,1", "--seed", "0.04", "--out", str(out)])
    assert code == 0
    artifacts = _stdout_json(capsys)
    assert [a["operation"] for a in artifacts] == [
        "analyze_fixed_point", "real_fixed_points", "analyze_fixed_point",
    ]
    assert artifacts[-1]["payload"]["class"] == "Attracting"
    assert main(["replay", str(out)]) == 0


def test_analyze_needs_an_option():
    assert main(["analyze", "--map", F]) == 2


def test_orbit_escape(capsys):
    assert main(["orbit", "--map", "z^2", "--seed", "10", "--json"]) == 0
    result = _stdout_json(capsys)
    assert result["fate"] == "Escaped"
    assert result["index"] == 3
    assert result["prefix"][:2] == [[10.0, 0.0], [100.0, 0.0]]


def test_orbit_prints_csv_with_fate_row(capsys):
    assert main(["orbit", "--map", "z/2", "--seed", "1", "--prefix", "3"]) == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert list(frame.columns) == ["kind", "n", "re", "im", "abs", "fate", "period"]
    assert list(frame["kind"]) == ["z", "z", "z", "z", "fate"]
    assert list(frame["re"][:4]) == [1.0, 0.5, 0.25, 0.125]
    fate = frame.iloc[-1]
    assert fate["fate"] == "ConvergedToCycle"
    assert fate["period"] == 1
    assert abs(fate["re"]) < 1e-6


def test_orbit_csv_file_matches_stdout(tmp_path, capsys):
    path = tmp_path / "orbit.csv"
    assert main(["orbit", "--map", "z/2", "--seed", "1", "--prefix", "3", "--csv", str(path)]) == 0
    assert path.read_text() == capsys.readouterr().out

    with pytest.raises(SystemExit) as info:
        main(["orbit", "--seed", "1"])
    assert info.value.code == 2


def test_param_accepts_real_and_imaginary_parts(capsys):
    argv = ["orbit", "--map", "lambda/(exp(z)+z)", "--param", "lambda=0.04,0", "--seed", "0.2", "--json"]
    assert main(argv) == 0
    assert _stdout_json(capsys)["fate"] == "ConvergedToCycle"

    args = create_parser().parse_args(["orbit", "--map", "a*z", "--param", "a=0.5,-0.25", "--seed", "1"])
    assert args.param == [("a", 0.5 - 0.25j)]
    with pytest.raises(SystemExit):
        create_parser().parse_args(["orbit", "--map", "a*z", "--param", "a=1,2,3", "--seed", "1"])
    with pytest.raises(SystemExit):
        create_parser().parse_args(["orbit", "--map", "a*z", "--param", "a=1,2i", "--seed", "1"])


@pytest.mark.parametrize("argv", [
    ["orbit", "--map", "lambda/(exp(z)+z)", "--param", "lambda=0.04", "--seed=-0.5+0.25i", "--prefix", "4"],
    ["verify", "--map", "z^2+1", "--interval=-0.792,-0.72", "--cascade", "2"],
    ["check", "siegel", "--param", "max_iter=100"],
    ["orbit", "--map", "a*z", "--param", "a=0.5,-0.25", "--seed", "1", "--json"],
    ["probe", "--map", "0.3", "--window=-1,0,2,2", "--res", "8", "16"],
    ["render", "--map", "z^2", "--res", "8", "--tol", "1e-08"],
    ["repro", "ex43", "--no-render"],
])
def test_run_config_reparses_to_same_namespace(argv):
    parser = create_parser()
    args = parser.parse_args(argv)
    config = RunConfig.from_namespace(args)
    assert vars(parser.parse_args(config.to_argv())) == vars(args)
    assert str(config).startswith("python bovdyn.py " + argv[0])


def test_render_bundle_replay(tmp_path, capsys):
    ppm, stats, bundle = tmp_path / "b.ppm", tmp_path / "b.csv", tmp_path / "b.json"
    code = main(["render", "--map", "0.3", "--window=0,0,1,1", "--res", "4",
                 "--out", str(ppm), "--stats", str(stats), "--bundle", str(bundle)])
    assert code == 0
    summary = _stdout_json(capsys)
    assert summary["stats"] == {"0": 1.0}
    assert ppm.read_bytes().startswith(b"P6\n4 4\n255\n")
    assert main(["replay", str(bundle)]) == 0


def test_repro_then_replay(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    path = tmp_path / "parabolic.json"
    assert main(["repro", "ex44-parabolic", "--no-render", "--out", str(path)]) == 0
    assert main(["replay", str(path)]) == 0
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["created_at"] == "1970-01-01T00:00:00Z"


def test_replay_of_missing_file():
    assert main(["replay", "no/such/bundle.json"]) == 2


def test_bad_argument_exits_as_usage_error():
    assert main(["verify", "--map", "z^2+1", "--interval=-1,1", "--max-depth", "0"]) == 2


def test_stray_value_error_exits_as_numeric_abort(monkeypatch):
    def broken(args):
        raise ValueError("math domain error")

    monkeypatch.setitem(app.COMMANDS, "verify", broken)
    assert main(["verify", "--map", "z^2+1", "--interval=-1,1"]) == 3
