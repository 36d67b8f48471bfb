import orjson
from pytest import mark, raises

from trig_inverse.main import EXIT_CHECK_FAILED, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main
from trig_inverse.model import OutputDocument


def run(capsysbinary, *argv):
    code = main(list(argv))
    captured = capsysbinary.readouterr()
    return code, captured.out, captured.err.decode("utf-8")


def test_build_json(capsysbinary):
    code, out, _ = run(capsysbinary, "build", "--n", "15", "--kind", "sine")
    assert code == EXIT_OK
    document = OutputDocument.model_validate(orjson.loads(out))
    assert document.command == "build"
    assert document.parameters == {"n": 15, "kind": "sine"}
    assert document.payload["representatives"] == [1, 2, 4, 7]
    first_row = document.payload["entries"][0]
    assert [(e["sign"], e["index"]) for e in first_row] == [(1, 1), (-1, 7), (1, 4), (-1, 2)]


def test_build_rejects_small_modulus(capsysbinary, caplog):
    code, out, _ = run(capsysbinary, "build", "--n", "2", "--kind", "sine")
    assert code == EXIT_DOMAIN
    assert out == b""
    assert "at least 3" in caplog.text


def test_invert_singular_names_the_square(capsysbinary, caplog):
    code, out, _ = run(capsysbinary, "invert", "--n", "9", "--kind", "sine")
    assert code == EXIT_DOMAIN
    assert out == b""
    assert "9 is divisible by 3²" in caplog.text


def test_invert_symbolic_is_integral(capsysbinary):
    code, out, _ = run(capsysbinary, "invert", "--n", "15", "--kind", "sine", "--symbolic")
    assert code == EXIT_OK
    payload = orjson.loads(out)["payload"]
    assert payload["denominator"] == 15
    assert payload["basis"] == ["s_1", "s_2", "s_4", "s_7"]
    assert payload["coefficients"][0] == {"index": 1, "numerators": [3, -1, 0, 1]}
    for row in payload["coefficients"]:
        assert all(isinstance(x, int) for x in row["numerators"])


def test_invert_numeric_reports_residual(capsysbinary):
    code, out, _ = run(capsysbinary, "invert", "--n", "30", "--kind", "cosine")
    assert code == EXIT_OK
    payload = orjson.loads(out)["payload"]
    assert payload["dimension"] == 4
    assert payload["reconstruction_residual"] < 1e-10


def test_eigen(capsysbinary):
    code, out, _ = run(capsysbinary, "eigen", "--n", "9", "--kind", "sine")
    assert code == EXIT_OK
    payload = orjson.loads(out)["payload"]
    assert len(payload["eigenvalues"]) == 3
    assert payload["zero_eigenvalues"] >= 1
    assert payload["abs_determinant"] == 0.0


def test_eigen_mod_4(capsysbinary):
    _, out, _ = run(capsysbinary, "eigen", "--n", "4", "--kind", "sine")
    payload = orjson.loads(out)["payload"]
    assert payload["eigenvalues"][0]["conductor"] == 4
    re, im = payload["eigenvalues"][0]["value"]
    assert abs(re - 2) < 1e-12 and abs(im) < 1e-12


def test_verify_passes(capsysbinary):
    code, out, _ = run(capsysbinary, "verify", "--from", "3", "--to", "20")
    assert code == EXIT_OK
    document = orjson.loads(out)
    assert document["payload"]["summary"]["failed"] == 0
    assert all("elapsed_seconds" not in r for r in document["payload"]["reports"])


def test_verify_timings(capsysbinary):
    _, out, _ = run(capsysbinary, "verify", "--from", "5", "--to", "5", "--checks", "gauss", "--timings")
    assert "elapsed_seconds" in orjson.loads(out)["payload"]["reports"][0]


def test_verify_exit_code_on_failure(capsysbinary, monkeypatch):
    monkeypatch.setattr("trig_inverse.verify.gauss_sum_reduced", lambda chi: 100.0)
    code, out, _ = run(capsysbinary, "verify", "--from", "5", "--to", "6", "--checks", "gauss")
    assert code == EXIT_CHECK_FAILED
    assert orjson.loads(out)["payload"]["summary"]["failed"] == 2


def test_verify_is_byte_identical_across_runs(capsysbinary):
    argv = ("verify", "--from", "3", "--to", "25", "--checks", "invertibility,inverse,gauss")
    _, first, _ = run(capsysbinary, *argv)
    _, second, _ = run(capsysbinary, *argv, "--workers", "1")
    assert first == second


def test_build_is_byte_identical_across_runs(capsysbinary):
    _, first, _ = run(capsysbinary, "build", "--n", "35", "--kind", "cosine")
    _, second, _ = run(capsysbinary, "build", "--n", "35", "--kind", "cosine")
    assert first == second


@mark.parametrize(
    "argv",
    [
        ("verify", "--from", "10", "--to", "5"),
        ("verify", "--from", "1", "--to", "5"),
        ("verify", "--from", "3", "--to", "5", "--checks", "nonsense"),
        ("verify", "--from", "3", "--to", "5", "--tol", "matrix"),
        ("verify", "--from", "3", "--to", "5", "--tol", "bogus=1e-3"),
        ("verify", "--from", "3", "--to", "5", "--tol", "matrix=-1"),
        ("verify", "--from", "3", "--to", "5", "--workers", "0"),
    ],
)
def test_usage_errors(capsysbinary, argv):
    code, out, _ = run(capsysbinary, *argv)
    assert code == EXIT_USAGE
    assert out == b""


def test_argparse_errors_exit_with_usage_code(capsysbinary):
    with raises(SystemExit) as e:
        main(["build", "--n", "7"])
    assert e.value.code == EXIT_USAGE


def test_tolerance_override(capsysbinary):
    code, out, _ = run(
        capsysbinary, "verify", "--from", "105", "--to", "105", "--checks", "inverse", "--tol", "matrix=1e-300"
    )
    assert code == EXIT_CHECK_FAILED
    reports = orjson.loads(out)["payload"]["reports"]
    assert reports[0]["tolerance"] == 1e-300


def test_table_format(capsysbinary):
    code, out, _ = run(capsysbinary, "build", "--n", "15", "--kind", "sine", "--format", "table")
    assert code == EXIT_OK
    text = out.decode("utf-8")
    assert "# symbols" in text and "# values" in text
    assert "-s_7" in text


def test_symbolic_table_format(capsysbinary):
    _, out, _ = run(capsysbinary, "invert", "--n", "7", "--kind", "cosine", "--symbolic", "--format", "table")
    text = out.decode("utf-8")
    assert "numerators over 7" in text
    assert "ĉ_1" in text


def test_csv_format(capsysbinary):
    code, out, _ = run(capsysbinary, "verify", "--from", "3", "--to", "4", "--checks", "gauss", "--format", "csv")
    assert code == EXIT_OK
    lines = out.decode("utf-8").strip().splitlines()
    assert lines[0].split(",")[:3] == ["check", "modulus", "variant"]
    assert len(lines) == 3
