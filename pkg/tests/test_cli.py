"""Command-line contract: subcommands, exit codes, output shapes, determinism."""

import json

import pytest

from radpi.cli import run_command


def run(capsys, *argv):
    code = run_command(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCompute:
    def test_method1_prints_value_error_digits(self, capsys):
        code, out, err = run(
            capsys, "compute", "--method", "method1", "--m", "2", "--s", "2",
            "--sign", "+", "--k", "20", "--bits", "128",
        )
        assert code == 0
        assert "3.14159265358" in out
        assert "abs_error" in out or "index" in out
        assert err == ""

    def test_sign_flag_space_separated(self, capsys):
        code, out, _ = run(
            capsys, "compute", "--method", "method1", "--m", "2", "--s", "3",
            "--sign", "-", "--k", "4",
        )
        assert code == 0
        assert out.splitlines()[-1].split()[1].startswith("3.1275930891")

    def test_as_printed_emits_misprint_on_stderr(self, capsys):
        code, out, err = run(
            capsys, "compute", "--method", "method2", "--variant", "as-printed",
            "--m", "10000", "--d", "1",
        )
        assert code == 0
        assert "MISPRINT" in err
        assert "0.00044428829" in out

    def test_unity(self, capsys):
        code, out, _ = run(capsys, "compute", "--method", "unity", "--x0", "0", "--k", "1")
        assert code == 0
        assert "0.9003163161" in out

    def test_taylor(self, capsys):
        code, out, _ = run(
            capsys, "compute", "--method", "taylor", "--m", "5", "--d", "3", "--terms", "40"
        )
        assert code == 0
        assert "0.79999999" in out or "0.8000000" in out

    def test_x0_forces_self_ratio(self, capsys):
        code, out, _ = run(
            capsys, "compute", "--method", "method1", "--x0", "0.8", "--k", "6",
            "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["meta"]["params"]["ratio_mode"] == "self"


class TestExitCodes:
    def test_unknown_flag_is_64(self, capsys):
        code, _, err = run(capsys, "compute", "--method", "method1", "--frobnicate")
        assert code == 64
        assert "usage" in err.lower() or "error" in err.lower()

    def test_unknown_subcommand_is_64(self, capsys):
        code, _, _ = run(capsys, "transmogrify")
        assert code == 64

    def test_domain_error_is_2(self, capsys):
        code, _, err = run(
            capsys, "compute", "--method", "method1", "--m", "2", "--s", "5", "--k", "3"
        )
        assert code == 2
        assert "error" in err

    def test_catalog_miss_is_2(self, capsys):
        code, _, _ = run(
            capsys, "compute", "--method", "method1", "--m", "5", "--s", "16",
            "--k", "3", "--ratio-mode", "exact",
        )
        assert code == 2

    def test_precision_budget_is_3(self, capsys):
        code, _, _ = run(
            capsys, "compute", "--method", "method1", "--m", "2", "--s", "2",
            "--k", "20", "--guard-bits", "70",
        )
        assert code == 3

    def test_missing_seed_is_64(self, capsys):
        code, _, _ = run(capsys, "compute", "--method", "method1", "--k", "3")
        assert code == 64

    def test_unwritable_out_is_74(self, capsys, tmp_path):
        code, _, _ = run(
            capsys, "compute", "--method", "viete", "--k", "2",
            "--out", str(tmp_path / "missing" / "report.csv"),
        )
        assert code == 74


class TestRenderShapes:
    def test_csv_one_row_is_two_lines(self, capsys):
        code, out, _ = run(
            capsys, "compute", "--method", "viete", "--k", "3", "--format", "csv"
        )
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 2
        assert lines[0] == "index,approximant,abs_error,correct_digits,error_ratio"
        assert out.endswith("\n")

    def test_csv_table_header_and_rows(self, capsys):
        code, out, _ = run(
            capsys, "table", "--method", "method1", "--m", "2", "--s", "2",
            "--k-range", "1:3", "--format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "1"
        assert first[4] == ""  # no ratio on the first row
        assert lines[2].split(",")[4] != ""

    def test_json_round_trip(self, capsys):
        code, out, _ = run(
            capsys, "table", "--method", "method1", "--m", "2", "--s", "2",
            "--k-range", "2:4", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert set(payload) == {"meta", "rows"}
        assert len(payload["rows"]) == 3
        for row in payload["rows"]:
            assert set(row) == {"index", "approximant", "abs_error", "correct_digits", "error_ratio"}
        assert json.dumps(payload, indent=2, sort_keys=True) + "\n" == out

    def test_determinism(self, capsys):
        argv = ["table", "--method", "method2", "--m-range", "100,1000", "--d", "1",
                "--format", "csv"]
        code1, out1, _ = run(capsys, *argv)
        code2, out2, _ = run(capsys, *argv)
        assert (code1, code2) == (0, 0)
        assert out1 == out2

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "rows.csv"
        code, out, _ = run(
            capsys, "compute", "--method", "viete", "--k", "2", "--format", "csv",
            "--out", str(target),
        )
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("index,")

    def test_no_exponent_notation_in_output(self, capsys):
        _, out, _ = run(
            capsys, "table", "--method", "method1", "--m", "2", "--s", "2",
            "--k-range", "18:20", "--format", "csv",
        )
        body = "\n".join(line for line in out.splitlines()[1:])
        assert "e-" not in body and "E-" not in body


class TestSubcommands:
    def test_arccos_x0(self, capsys):
        code, out, _ = run(capsys, "arccos", "--x0", "0.8", "--bits", "128")
        assert code == 0
        assert "0.6435011087932843868" in out

    def test_arccos_negative_one(self, capsys):
        code, out, _ = run(capsys, "arccos", "--m", "1", "--s", "1", "--sign", "-")
        assert code == 0
        assert "3.14159265358979323846" in out

    def test_reproduce_prints_four_pass_lines(self, capsys):
        code, out, _ = run(capsys, "reproduce")
        assert code == 0
        assert sum(1 for line in out.splitlines() if line.startswith("PASS")) == 4

    def test_verify_passes(self, capsys):
        code, out, _ = run(capsys, "verify")
        assert code == 0
        assert "FAIL" not in out

    def test_audit_shape(self, capsys):
        code, out, _ = run(
            capsys, "audit", "--k", "6", "--audited-bits", "53", "--bits", "256",
            "--format", "csv",
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "k,naive_error,stable_error,digits_lost"
        assert len(lines) == 7

    def test_table_m_range_as_printed(self, capsys):
        code, out, _ = run(
            capsys, "table", "--method", "method2", "--variant", "as-printed",
            "--m-range", "1000,10000", "--format", "csv",
        )
        assert code == 0
        last = out.splitlines()[-1].split(",")
        assert float(last[1]) < 0.2  # nowhere near pi


MATRIX = [
    ["compute", "--method", "method1", "--m", "2", "--s", "2", "--k", "6"],
    ["compute", "--method", "method1", "--m", "2", "--s", "2", "--k", "6", "--variant", "naive"],
    ["compute", "--method", "method2", "--m", "50", "--d", "1"],
    ["compute", "--method", "combined", "--m", "50", "--d", "1", "--k", "4"],
    ["compute", "--method", "unity", "--m", "5", "--d", "3", "--k", "6"],
    ["compute", "--method", "viete", "--k", "6"],
    ["compute", "--method", "taylor", "--m", "5", "--d", "3", "--terms", "12"],
    ["table", "--method", "method1", "--m", "2", "--s", "3", "--sign", "-", "--k-range", "1:4"],
    ["table", "--method", "unity", "--x0", "0", "--k-range", "1:3"],
    ["table", "--method", "viete", "--k-range", "1:4"],
    ["table", "--method", "combined", "--m", "64", "--k-range", "2:4"],
    ["table", "--method", "method2", "--m-range", "100,1000"],
    ["arccos", "--x0", "0.25"],
    ["arccos", "--m", "2", "--s", "2"],
    ["audit", "--k", "5"],
    ["reproduce"],
    ["verify"],
]


@pytest.mark.parametrize("argv", MATRIX, ids=[" ".join(a) for a in MATRIX])
@pytest.mark.parametrize("fmt", ["text", "csv", "json"])
def test_every_subcommand_in_every_format(argv, fmt, capsys):
    code = run_command(argv + ["--format", fmt])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out
    if fmt == "json":
        payload = json.loads(captured.out)
        assert "rows" in payload


def test_empty_report_renders_header_only_csv():
    from radpi.analysis import ConvergenceReport
    from radpi.cli import render_report

    empty = ConvergenceReport(rows=[], meta={"method": "method1", "bits": 128})
    assert render_report(empty, "csv") == "index,approximant,abs_error,correct_digits,error_ratio\n"


def test_help_exits_zero(capsys):
    assert run_command(["--help"]) == 0
    capsys.readouterr()
