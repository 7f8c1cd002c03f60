import json

import jsonschema
import pytest

from anomalycert.cli import RunConfig, build_parser, config_from_args, main
from anomalycert.report import CERTIFICATE_FIELDS, build_report, to_markdown, validate_report, write_report
from anomalycert.verifier import Certificate, verify_theorem


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_roots_json(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T2.3-1", "--backend", "roots", "--format", "json")
    assert code == 0
    report = json.loads(out)
    validate_report(report)
    cert = report["certificates"][0]
    assert list(cert)[: len(CERTIFICATE_FIELDS)] == list(CERTIFICATE_FIELDS)
    assert list(report) == ["version", "engine_options", "certificates"]
    assert cert["constants"] == {"expected": [480, 61920], "computed": [480, 61920]}
    assert cert["ms"] is None


def test_unknown_theorem_exit_1(capsys):
    code, _, err = run(capsys, "verify", "--theorem", "T9.9-9")
    assert code == 1 and "T9.9-9" in err


def test_bad_flags_exit_1(capsys):
    assert run(capsys, "verify", "--backend", "numeric")[0] == 1
    assert run(capsys, "verify", "--q-order", "0")[0] == 1
    assert run(capsys, "verify", "--theorem", "T2.3-3", "--q-order", "1")[0] == 1
    assert run(capsys, "verify", "--theorem", "T2.3-1", "--dimension", "10")[0] == 1
    assert run(capsys, "verify", "--theorem", "all,T2.3-1")[0] == 1
    assert run(capsys, "bogus")[0] == 1


def test_failing_run_exit_2(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T2.3-2", "--lemmas")
    assert code == 2
    report = json.loads(out)
    failed = [c for c in report["certificates"] if c["verdict"] == "fail"]
    assert [c["id"] for c in failed] == ["L-Q1-l1"]
    assert failed[0]["residual"] != "zero"


def test_output_file_and_io_error(tmp_path, capsys):
    path = tmp_path / "r.md"
    code, out, _ = run(capsys, "verify", "--theorem", "T2.3-2,T3.2-1", "--format", "markdown", "-o", str(path))
    assert code == 0 and out == ""
    text = path.read_text()
    assert "## T2.3-2" in text and "## T3.2-1" in text
    code, _, err = run(capsys, "verify", "--theorem", "T2.3-2", "-o", str(tmp_path / "missing" / "r.json"))
    assert code == 2 and "cannot write" in err


def test_reports_are_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert run(capsys, "verify", "--theorem", "T2.3-4,T2.8-1", "--seed", "7", "-o", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_timing_flag(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T2.3-2", "--timing")
    assert json.loads(out)["certificates"][0]["ms"] >= 0


def test_override_geometry(capsys):
    code, out, _ = run(capsys, "verify", "--theorem", "T2.3-1", "--l", "3", "--dimension", "16")
    assert code == 0
    cert = json.loads(out)["certificates"][0]
    assert cert["id"] == "T2.3-1@Q-even-16-l3"
    assert cert["constants"]["computed"] == cert["constants"]["expected"]


def test_runconfig_roundtrip():
    cfg = RunConfig(["T2.3-1", "T2.5"], backend="powersum", q_order=2, seed=4, format="markdown", lemmas=True)
    assert RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    parsed = config_from_args(build_parser().parse_args(cfg.to_argv()))
    assert parsed == cfg


def test_empty_report_is_valid():
    report = build_report([])
    validate_report(report)
    assert report["certificates"] == []
    assert b"0/0 certificates pass" in to_markdown(report)


def test_schema_rejects_bad_verdict():
    cert = Certificate(id="X", kind="theorem", verdict="maybe", residual="zero")
    with pytest.raises(jsonschema.ValidationError):
        validate_report(build_report([cert]))


def test_markdown_contains_every_json_id():
    certs = [verify_theorem("T2.3-2"), verify_theorem("T3.2-6")]
    ids = [c["id"] for c in json.loads(write_report(certs, "json"))["certificates"]]
    md = write_report(certs, "markdown").decode()
    assert all(f"## {i}" in md for i in ids)


def test_list_and_expand(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and "T3.2-10" in out and "196560/-24" in out
    code, out, _ = run(capsys, "expand", "--side", "qe", "--q-order", "1")
    assert code == 0 and out.splitlines()[0] == "q^0: DE"
    code, out, _ = run(capsys, "expand", "--side", "bundles", "--normalization", "stated", "--q-order", "1")
    assert out.splitlines()[0] == "q^0: 1"
    code, out, _ = run(capsys, "expand", "--side", "theta", "--q-order", "1")
    assert code == 0 and out.startswith("q^0: ")
    assert run(capsys, "expand", "--dimension", "9")[0] == 1
