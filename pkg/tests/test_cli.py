import io
import json
import math

import pandas as pd
import pytest

from cli import EXIT_INVALID, EXIT_OK, GridSpec, RunSpec, SteinBoundsRunner, parse_function, render_csv, run_verify
from main import main
from numerics import InvalidParameter, ValidationError
from stein_factors import factor_R


class TestFunctionVocabulary:
    @pytest.mark.parametrize("text,x,expected", [
        ("id", 2.0, 2.0),
        ("x^3", 2.0, 8.0),
        ("poly:1,0,2", 2.0, 9.0),
        ("exp(-x)", 1.0, math.exp(-1.0)),
        ("exp(2*x)", 0.5, math.e),
        ("sin", 0.5, math.sin(0.5)),
        ("ind<=1.5", 2.0, 0.0),
        ("min(x,1)", 3.0, 1.0),
        ("2^-x", 2.0, 0.25),
        ("3", 7.0, 3.0),
    ])
    def test_parse(self, text, x, expected):
        assert float(parse_function(text)(x)) == pytest.approx(expected)

    def test_smoothed_indicator_width(self):
        f = parse_function("smooth<=0,0.25")
        assert f(0.0) == pytest.approx(0.5)
        assert f(2.0) < 1e-3

    def test_table(self, tmp_path):
        path = tmp_path / "f.csv"
        pd.DataFrame({'x': [0.0, 1.0, 2.0], 'f': [0.0, 1.0, 4.0]}).to_csv(path, index=False)
        assert parse_function(f"table:{path}")(1.5) == pytest.approx(2.5)

    def test_unknown(self):
        with pytest.raises(InvalidParameter):
            parse_function("tan")


class TestRunSpec:
    def test_grid(self):
        grid = GridSpec.parse("-1:1:0.5")
        assert grid.points() == [-1.0, -0.5, 0.0, 0.5, 1.0]

    @pytest.mark.parametrize("text", ["1:0:0.1", "0:1", "0:1:0", "0:1e9:1e-3"])
    def test_bad_grid(self, text):
        with pytest.raises(ValidationError):
            RunSpec.build(command="factors", distribution="normal:0,1", grid=text)

    def test_needs_distribution(self):
        with pytest.raises(ValidationError):
            RunSpec.build(command="bounds")

    def test_verify_needs_no_distribution(self):
        assert RunSpec.build(command="verify", quick=True).quick

    def test_order_is_positive(self):
        with pytest.raises(ValidationError):
            RunSpec.build(command="expand", distribution="normal:0,1", order=0)

    def test_at_list(self):
        spec = RunSpec.build(command="kernel", distribution="poisson:3", at="1,4")
        assert spec.at == [1.0, 4.0]


class TestCommands:
    def test_bounds_json(self, capsys):
        assert main(["bounds", "--dist", "poisson:lambda=3", "--f", "id", "--ell", "-1"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report['lower'] == pytest.approx(3.0, rel=1e-9)
        assert report['upper'] == pytest.approx(3.0, rel=1e-9)
        assert report['equality']

    def test_expand_csv(self, capsys):
        assert main(["expand", "--dist", "normal:0,1", "--g", "x^4", "--n", "4", "--output", "csv"]) == EXIT_OK
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(frame['partial_sum']) == pytest.approx([240.0, 24.0, 120.0, 96.0], rel=1e-8)
        assert list(frame['bound']) == ["upper", "lower", "upper", "lower"]

    def test_expand_pattern(self, capsys):
        assert main(["expand", "--dist", "poisson:3", "--g", "x^2", "--n", "2", "--ell=-+"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report['ells'] == [-1, 1]
        assert all(report['sandwich_ok'])

    def test_factors_csv(self, capsys):
        code = main(["factors", "--dist", "normal:0,1", "--grid=-1:1:0.5", "--output", "csv"])
        assert code == EXIT_OK
        frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert len(frame) == 5
        assert frame.loc[frame['x'] == 0.0, 'R'].iloc[0] == pytest.approx(0.25 * math.sqrt(2 * math.pi))

    def test_kernel_profile(self, capsys, binomial20):
        code = main(["kernel", "--dist", "binomial:20,0.2", "--ell", "1", "--at", "4", "--grid", "0:8:1"])
        assert code == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert report['columns'] == ["x", "x_prime", "k", "k_over_p"]
        assert len(report['rows']) == 9
        diagonal = [row for row in report['rows'] if row[1] == 4.0][0]
        assert diagonal[3] == pytest.approx(factor_R(binomial20, 1, 4), rel=1e-12)

    def test_invalid_distribution(self, capsys):
        assert main(["bounds", "--dist", "normal:0,-1"]) == EXIT_INVALID
        entry = json.loads(capsys.readouterr().out)
        assert entry['error_type'] == "InvalidParameter"
        assert entry['command'] == "bounds"

    def test_continuous_shift_on_lattice(self, capsys):
        assert main(["bounds", "--dist", "binomial:10,0.5", "--ell", "0"]) == EXIT_INVALID
        assert json.loads(capsys.readouterr().out)['error_type'] == "UnsupportedSupport"

    def test_invalid_grid_exit_code(self, capsys):
        assert main(["factors", "--dist", "normal:0,1", "--grid", "0:1"]) == EXIT_INVALID
        assert "Invalid arguments" in capsys.readouterr().err

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "report.json"
        assert main(["bounds", "--dist", "normal:0,1", "--f", "x^2", "--out", str(path)]) == EXIT_OK
        assert capsys.readouterr().out == ""
        assert json.loads(path.read_text())['upper'] == pytest.approx(4.0)

    def test_exact_bounds(self, capsys):
        assert main(["bounds", "--dist", "binomial:10,0.5", "--f", "x^2", "--ell", "1", "--exact"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)['lower'] == pytest.approx(250.0)


class TestRunnerAndVerify:
    def test_runner_report(self):
        spec = RunSpec.build(command="factors", distribution="poisson:3", grid="0:4:1")
        report = SteinBoundsRunner(spec).factors_cli()
        assert [row[0] for row in report.rows] == [0.0, 1.0, 2.0, 3.0, 4.0]
        assert report.summary['sup'] == max(row[1] for row in report.rows)
        assert render_csv(report).splitlines()[0] == "x,R"

    def test_subset(self):
        report = run_verify(quick=True, only=["closed_form_inverse", "kernel_psd"])
        assert [p.name for p in report.properties] == ["closed_form_inverse", "kernel_psd"]
        assert report.passed

    @pytest.mark.slow
    def test_quick_suite(self, capsys):
        assert main(["verify", "--quick"]) == EXIT_OK
        report = json.loads(capsys.readouterr().out)
        assert all(p['passed'] for p in report['properties'])
