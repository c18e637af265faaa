"""One structured output schema for every command.

Reports are deterministic: collections are sorted by canonical forms and no
timing data enters the structured payload, so a report re-runs to the same
bytes (the `verify` command relies on this).  Human-readable text is derived
from the structured form, never the reverse.
"""

from __future__ import annotations

import json
from typing import Any

SCHEMA = "groupeq.report/1"


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def make_report(command: str, args: dict, script: str, status: str, result: dict, error: dict | None = None) -> dict:
    report = {
        "schema": SCHEMA,
        "command": command,
        "args": {k: v for k, v in sorted(args.items())},
        "script": script,
        "status": status,
        "result": result,
    }
    if error is not None:
        report["error"] = error
    return report


def fmt_elem(e) -> str:
    return e.group.format_element(e)


def fmt_elems(es) -> list[str]:
    return [fmt_elem(e) for e in es]


def render_text(report: dict) -> str:
    """Human text derived from the structured report."""
    lines = [f"[{report['command']}] status: {report['status']}"]
    if "error" in report:
        err = report["error"]
        lines.append(f"error: {err.get('type', 'Error')}: {err.get('message', '')}")
        return "\n".join(lines) + "\n"
    lines.extend(_render_value("result", report["result"], 0))
    return "\n".join(lines) + "\n"


def _render_value(key: str, value, depth: int) -> list[str]:
    pad = "  " * depth
    if isinstance(value, dict):
        out = [f"{pad}{key}:"]
        for k in value:
            out.extend(_render_value(k, value[k], depth + 1))
        return out
    if isinstance(value, list):
        if all(not isinstance(v, (dict, list)) for v in value):
            return [f"{pad}{key}: [" + ", ".join(str(v) for v in value) + "]"]
        out = [f"{pad}{key}:"]
        for i, v in enumerate(value):
            out.extend(_render_value(f"- {i}", v, depth + 1))
        return out
    return [f"{pad}{key}: {value}"]
