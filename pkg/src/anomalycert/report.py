"""Certificate serialization: JSON (stable field order) and markdown."""
from __future__ import annotations

import json

from . import __version__
from .verifier import Certificate

CERTIFICATE_FIELDS = (
    "id", "dimension", "l", "variant", "weight", "basis", "constants", "orders_checked",
    "backend", "seeds", "assumptions", "verdict", "residual", "ms",
)

_nullable_int = {"type": ["integer", "null"]}
_constant = {"type": ["integer", "string", "null"]}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["version", "engine_options", "certificates"],
    "properties": {
        "version": {"type": "string"},
        "engine_options": {"type": "object"},
        "certificates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(CERTIFICATE_FIELDS),
                "properties": {
                    "id": {"type": "string"},
                    "dimension": _nullable_int,
                    "l": _nullable_int,
                    "variant": {"type": ["string", "null"]},
                    "weight": _nullable_int,
                    "basis": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
                    "constants": {
                        "type": "object",
                        "required": ["expected", "computed"],
                        "properties": {
                            "expected": {"type": "array", "items": _constant},
                            "computed": {"type": ["array", "null"], "items": _constant},
                        },
                    },
                    "orders_checked": {"type": "array", "items": {"type": "integer"}},
                    "backend": {"type": "string"},
                    "seeds": {"type": "array", "items": {"type": "integer"}},
                    "assumptions": {"type": "array", "items": {"type": "string"}},
                    "verdict": {"enum": ["pass", "fail"]},
                    "residual": {"type": "string", "minLength": 1},
                    "ms": {"type": ["number", "null"]},
                    "kind": {"type": "string"},
                    "reading": {"type": ["string", "null"]},
                    "statement": {"type": "string"},
                    "details": {"type": "object"},
                },
            },
        },
    },
}


def certificate_dict(cert: Certificate, timing: bool = False) -> dict:
    out = {
        "id": cert.id,
        "dimension": cert.dimension,
        "l": cert.l,
        "variant": cert.variant,
        "weight": cert.weight,
        "basis": [list(p) for p in cert.basis],
        "constants": {"expected": list(cert.expected), "computed": cert.computed},
        "orders_checked": list(cert.orders_checked),
        "backend": cert.backend,
        "seeds": list(cert.seeds),
        "assumptions": list(cert.assumptions),
        "verdict": cert.verdict,
        "residual": cert.residual or "zero",
        "ms": cert.ms if timing else None,
        "kind": cert.kind,
        "reading": cert.reading,
        "statement": cert.statement,
        "details": cert.details,
    }
    return out


def build_report(certs: list, engine_options: dict | None = None, timing: bool = False) -> dict:
    return {
        "version": __version__,
        "engine_options": dict(engine_options or {}),
        "certificates": [certificate_dict(c, timing) for c in certs],
    }


def validate_report(report: dict) -> None:
    """Raise jsonschema.ValidationError if the report does not match the schema."""
    import jsonschema

    jsonschema.validate(report, REPORT_SCHEMA)


def to_json(report: dict) -> bytes:
    return (json.dumps(report, indent=2, ensure_ascii=False) + "\n").encode()


def _cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, (list, tuple)):
        return ", ".join(_cell(v) for v in value) or "-"
    return str(value).replace("|", "\\|")


def to_markdown(report: dict) -> bytes:
    certs = report["certificates"]
    passed = sum(c["verdict"] == "pass" for c in certs)
    lines = [
        "# Certificate report",
        "",
        f"version {report['version']}; {passed}/{len(certs)} certificates pass",
        "",
    ]
    if report["engine_options"]:
        opts = ", ".join(f"{k}={_cell(v)}" for k, v in report["engine_options"].items())
        lines += [f"options: {opts}", ""]
    for c in certs:
        lines += [f"## {c['id']} — {c['verdict'].upper()}", ""]
        if c.get("statement"):
            lines += [f"Statement: `{c['statement']}`", ""]
        lines += ["| field | value |", "|---|---|"]
        for key in ("dimension", "l", "variant", "reading", "weight", "basis", "orders_checked", "backend", "seeds"):
            if key == "basis":
                val = ", ".join(f"E4^{a} E6^{b}" for a, b in c["basis"]) or "-"
            else:
                val = _cell(c.get(key))
            lines.append(f"| {key} | {val} |")
        lines.append(f"| expected | {_cell(c['constants']['expected'])} |")
        lines.append(f"| computed | {_cell(c['constants']['computed'])} |")
        lines.append(f"| residual | {_cell(c['residual'])} |")
        if c["ms"] is not None:
            lines.append(f"| ms | {c['ms']} |")
        lines.append("")
        if c["assumptions"]:
            lines += ["Assumptions:", ""] + [f"- {a}" for a in c["assumptions"]] + [""]
        if c.get("details"):
            lines += ["Details:", "", "```json", json.dumps(c["details"], indent=2, ensure_ascii=False), "```", ""]
    return ("\n".join(lines).rstrip() + "\n").encode()


def write_report(certs: list, fmt: str = "json", engine_options: dict | None = None, timing: bool = False) -> bytes:
    report = build_report(certs, engine_options, timing)
    if fmt == "json":
        return to_json(report)
    if fmt == "markdown":
        return to_markdown(report)
    raise ValueError(f"unknown report format {fmt!r}")
