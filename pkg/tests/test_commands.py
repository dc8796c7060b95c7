import pytest

from app.config import settings
from app.exceptions import DomainError
from app.schemas.command import RunConfig
from app.utils.helper import load_lambda_list, parse_complex, read_lambda_lines
from main import main


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, monkeypatch):
    monkeypatch.setattr(settings.storage, "output_dir", str(tmp_path))
    return tmp_path


def _records(out: str):
    lines = [line for line in out.splitlines() if line and not line.startswith("#")]
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


def test_classify_quasicircle_parameter(capsys):
    assert main(["--workers", "1", "classify", "-d", "2", "--lambda", "4,0"]) == 0
    captured = capsys.readouterr()
    rows = _records(captured.out)
    assert rows[0]["verdict"] == "CaptureDepth(0)"
    assert rows[0]["quasicircle"] == "true"
    assert "CaptureDepth(0), quasicircle=true" in captured.err


def test_classify_several_parameters(capsys):
    code = main(["--workers", "1", "classify", "--lambda", "1.319448,1.633170", "--lambda=0,0"])
    assert code == 0
    rows = _records(capsys.readouterr().out)
    assert [r["verdict"] for r in rows] == ["CaptureDepth(3)", "Degenerate"]
    assert rows[1]["quasicircle"] == "undetermined"


def test_classify_non_escaping_exits_indeterminate(capsys):
    assert main(["--workers", "1", "classify", "--lambda", "1.5,0.866025", "--max-iter", "2000"]) == 2
    assert _records(capsys.readouterr().out)[0]["verdict"] == "NonEscapingWithinBudget"


def test_classify_writes_records_file(isolated_output, capsys):
    assert main(["--workers", "1", "--output-dir", str(isolated_output), "classify", "--lambda", "4", "--records", "run"]) == 0
    text = (isolated_output / "records" / "run.tsv").read_text()
    assert text.startswith("# format-version: 1\nd\tlambda_re")
    assert capsys.readouterr().out == ""


def test_lambda_file(tmp_path, capsys):
    lambdas = tmp_path / "lambdas.txt"
    lambdas.write_text("# quasicircle\n4,0\n\n30  # far out\n")
    assert main(["--workers", "1", "classify", "--lambda-file", str(lambdas)]) == 0
    assert len(_records(capsys.readouterr().out)) == 2


def test_empty_lambda_list_is_a_usage_error(capsys):
    assert main(["classify"]) == 1
    assert "lambda" in capsys.readouterr().err


def test_unknown_flag_is_a_usage_error(capsys):
    assert main(["classify", "--lambda", "4,0", "--bogus"]) == 1


def test_malformed_lambda_is_a_usage_error(capsys):
    assert main(["classify", "--lambda", "4,x"]) == 1
    assert "--lambda" in capsys.readouterr().err


def test_render_julia_needs_one_nonzero_lambda(capsys):
    assert main(["render-julia", "--lambda", "0,0"]) == 1
    assert main(["render-julia", "--lambda", "4,0", "--lambda", "5,0"]) == 1


def test_render_julia_writes_pixmap(isolated_output):
    code = main(
        ["--workers", "1", "--output-dir", str(isolated_output), "render-julia", "--lambda", "4,0",
         "--width", "16", "--height", "16", "--name", "small"]
    )
    assert code == 0
    assert (isolated_output / "images" / "small.ppm").read_bytes().startswith(b"P6\n16 16\n255\n")
    assert (isolated_output / "metadata" / "small.meta").exists()


def test_series_check_passes(capsys):
    assert main(["series-check", "-d", "3", "--n-list", "3"]) == 0
    rows = _records(capsys.readouterr().out)
    assert rows
    assert all(r["status"] == "pass" for r in rows)


def test_series_check_reports_the_alpha_sweep(capsys):
    main(["--workers", "1", "series-check", "-d", "2", "--n-list", "4", "--alpha", "0.01,0.02,0.04"])
    rows = [r for r in _records(capsys.readouterr().out) if r["group"] == "second-order-sweep"]
    names = [r["name"] for r in rows]
    assert names == [
        "discrepancy slope (fixed points)",
        "discrepancy slope (motion)",
        "fitted constant c in discrepancy <= c |alpha|^3",
        "|alpha|^2 coefficient (sweep)",
    ]
    assert float(rows[3]["expected_re"]) == pytest.approx(1.0)
    assert rows[1]["status"] == "pass"


def test_series_check_rejects_large_alpha(capsys):
    assert main(["series-check", "--alpha", "0.2"]) == 1


def test_dimension_table(capsys):
    assert main(["--workers", "1", "dimension", "--lambda", "1000,0", "--n", "10"]) == 0
    captured = capsys.readouterr()
    row = _records(captured.out)[0]
    assert float(row["D_formula"]) == pytest.approx(1.003607, abs=1e-6)
    assert abs(float(row["difference"])) < 3.0 * 1000 ** -1.0
    assert "fitted error constant" in captured.err


def test_dimension_skips_parameters_outside_the_regime(capsys):
    assert main(["--workers", "1", "dimension", "--lambda", "10,0", "--n", "6"]) == 1
    assert "skipped" in capsys.readouterr().err


def test_centers_from_a_seed(capsys):
    assert main(["centers", "--n", "1", "--seed", "1.5,0"]) == 0
    row = _records(capsys.readouterr().out)[0]
    assert float(row["lambda_re"]) == pytest.approx(2.0, abs=1e-9)


def test_centers_need_seed_or_window():
    assert main(["centers", "--n", "2"]) == 1


def test_real_fixed_needs_a_real_lambda():
    assert main(["real-fixed", "--lambda", "1,1"]) == 1


def test_parse_complex():
    assert parse_complex("1.5,-2") == 1.5 - 2j
    assert parse_complex(" 4 ") == 4 + 0j
    with pytest.raises(DomainError):
        parse_complex("1,2,3", "--seed")
    with pytest.raises(DomainError):
        parse_complex("nan,0")


def test_lambda_lines_skip_comments():
    assert read_lambda_lines(["# header", "", "1,2  # note", "3"]) == [1 + 2j, 3 + 0j]


def test_missing_lambda_file():
    with pytest.raises(DomainError):
        load_lambda_list([], "/nonexistent/lambdas.txt")


def test_run_config_derived_values():
    config = RunConfig.build(command="verify-asymptotic", d=3)
    assert config.ladder == [1e4, 1e6]
    assert config.period == settings.periodic.n_max(3)
    with pytest.raises(DomainError):
        RunConfig.build(command="verify-asymptotic", d=5)
