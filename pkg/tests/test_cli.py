import json

import pytest

from jetframes.cli import (
    ReportValidationError,
    RunConfig,
    SUITES,
    main,
    render_text,
    run,
    validate_report,
)


def run_json(capsys, args):
    code = main(args + ["--output", "json"])
    out = capsys.readouterr()
    return code, json.loads(out.out), out.err


def test_wronskian_suite_reports_closed_form(capsys):
    code = main(["--n", "2", "--d", "3", "--suites", "wronskian"])
    out = capsys.readouterr().out
    assert code == 0
    assert "2 * z1'^3" in out
    assert "[PASS] wronskian" in out


def test_usage_error_when_degree_not_larger(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--n", "2", "--d", "2"])
    assert exc.value.code == 2


def test_usage_error_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["--suites", "nonsense"])
    assert exc.value.code == 2


def test_pole_orders_json_contains_recovered_constant(capsys):
    code, report, _ = run_json(capsys, ["--n", "2", "--d", "3", "--suites", "pole-orders"])
    assert code == 0
    suite = report["suites"][0]
    assert suite["c_variant2"] == 7
    assert suite["c_variant1"] == 8
    assert suite["classical_wronskian_alternate_matches"] is False


def test_full_run_passes_and_validates(capsys):
    code, report, _ = run_json(capsys, ["--n", "2", "--d", "3", "--trials", "2"])
    assert code == 0
    assert report["ok"] is True
    validate_report(report)
    assert report["version"]
    assert report["schema_version"] == "1"
    assert [s["name"] for s in report["suites"]] == [
        "equations",
        "wronskian",
        "frames",
        "pole-orders",
        "span",
        "invariance",
        "appendix",
    ]


def _strip_timing(report):
    clone = json.loads(json.dumps(report))
    for suite in clone["suites"]:
        suite.pop("elapsed_ms", None)
    return clone


def test_determinism_same_config_same_report():
    config = RunConfig(n=2, d=3, trials=2, seed=9, suites=("equations", "span", "pole-orders"))
    first = run(config)
    second = run(config)
    assert json.dumps(_strip_timing(first), sort_keys=True) == json.dumps(
        _strip_timing(second), sort_keys=True
    )


def test_truncated_report_fails_validation(capsys):
    code, report, _ = run_json(capsys, ["--n", "2", "--d", "3", "--suites", "appendix"])
    del report["suites"][0]["items"]
    with pytest.raises(ReportValidationError):
        validate_report(report)
    report2 = {"schema_version": "1"}
    with pytest.raises(ReportValidationError):
        validate_report(report2)


def test_schema_flag_prints_schema(capsys):
    code = main(["--schema"])
    out = capsys.readouterr().out
    assert code == 0
    schema = json.loads(out)
    assert schema["version"] == "1"
    assert "suites" in schema["properties"]


def test_failing_suite_yields_nonzero_exit_and_diagnostic(capsys, monkeypatch):
    def broken(cfg):
        return [{"name": "forced failure", "claimed": "0", "computed": "1", "ok": False}], {}

    monkeypatch.setitem(SUITES, "appendix", broken)
    code = main(["--n", "2", "--d", "3", "--suites", "appendix"])
    captured = capsys.readouterr()
    assert code == 1
    assert "FAIL appendix: forced failure" in captured.err


def test_render_text_marks_failures():
    report = {
        "version": "x",
        "parameters": {"n": 2, "d": 3, "chart": 1, "seed": 0},
        "suites": [
            {
                "name": "demo",
                "ok": False,
                "elapsed_ms": 1.0,
                "items": [{"name": "it", "claimed": "a", "computed": "b", "ok": False}],
            }
        ],
        "ok": False,
    }
    text = render_text(report)
    assert "[FAIL] demo" in text
    assert "result: FAIL" in text
