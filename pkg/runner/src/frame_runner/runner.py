"""Subprocess execution of emitted analysis scripts, never linked in-process.

The child process is `python <script> <out.json>`; the script's epilogue
writes nodal displacements and reactions keyed by node tag, in the same JSON
shape the pipeline's internal solver emits, so the two engines can be
compared field by field.
"""

from __future__ import annotations

import json
import subprocess
import sys
from dataclasses import dataclass
from pathlib import Path


class RunnerError(Exception):
    """Base error; carries a machine-readable failure record."""

    def __init__(self, message: str, record: dict | None = None):
        super().__init__(message)
        self.record = record or {"error": type(self).__name__, "detail": message}


class EngineMissing(RunnerError):
    pass


class ScriptError(RunnerError):
    pass


class Timeout(RunnerError):
    pass


@dataclass(frozen=True)
class RunRequest:
    script: Path
    output: Path
    timeout_s: float = 120.0

    def validate(self) -> None:
        if not Path(self.script).is_file():
            raise ScriptError(f"script not found: {self.script}")
        if self.timeout_s <= 0:
            raise ValueError("timeout must be positive")


def engine_available(python: str = sys.executable) -> bool:
    probe = subprocess.run([python, "-c", "import openseespy.opensees"],
                           capture_output=True, timeout=60)
    return probe.returncode == 0


def validate_result_schema(doc) -> list[str]:
    """Shape check for the shared result JSON (displacements + reactions)."""
    problems = []
    if not isinstance(doc, dict):
        return ["document is not an object"]
    for section in ("displacements", "reactions"):
        block = doc.get(section)
        if not isinstance(block, dict):
            problems.append(f"missing or non-object section {section!r}")
            continue
        for tag, triple in block.items():
            if not tag.lstrip("-").isdigit():
                problems.append(f"{section}: key {tag!r} is not a node tag")
            if not (isinstance(triple, list) and len(triple) == 3
                    and all(isinstance(v, (int, float)) for v in triple)):
                problems.append(f"{section}[{tag}]: expected three numbers")
    return problems


def execute_script(req: RunRequest, python: str = sys.executable) -> dict:
    """Run the script in an isolated process and return its result document."""
    req.validate()
    out_path = Path(req.output)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        proc = subprocess.run(
            [python, str(req.script), str(out_path)],
            capture_output=True, text=True, timeout=req.timeout_s)
    except subprocess.TimeoutExpired as exc:
        raise Timeout(f"no result within {req.timeout_s}s",
                      record={"error": "Timeout", "timeout_s": req.timeout_s,
                              "script": str(req.script)}) from exc
    if proc.returncode != 0:
        excerpt = (proc.stderr or proc.stdout or "").strip()[-2000:]
        record = {"error": "ScriptError", "returncode": proc.returncode,
                  "script": str(req.script), "stderr": excerpt}
        if "No module named 'openseespy'" in excerpt:
            record["error"] = "EngineMissing"
            raise EngineMissing("openseespy is not installed in the engine "
                                "interpreter", record=record)
        raise ScriptError(f"script exited with {proc.returncode}", record=record)
    try:
        doc = json.loads(out_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScriptError(f"script wrote no readable result JSON: {exc}",
                          record={"error": "ScriptError", "detail": str(exc),
                                  "script": str(req.script)}) from exc
    problems = validate_result_schema(doc)
    if problems:
        raise ScriptError("result JSON failed schema check: "
                          + "; ".join(problems[:5]),
                          record={"error": "ScriptError", "schema": problems})
    return doc


def compare_displacements(result: dict, reference: dict,
                          rel_tol: float = 1e-6,
                          abs_tol: float = 1e-12) -> tuple[bool, float]:
    """Field-by-field displacement comparison; returns (agree, worst_rel)."""
    mine = result["displacements"]
    theirs = reference["displacements"]
    if set(mine) != set(theirs):
        raise ScriptError("displacement node sets differ")
    agree, worst = True, 0.0
    for tag, want in theirs.items():
        for g, w in zip(mine[tag], want):
            err = abs(g - w)
            denom = max(abs(w), abs_tol)
            worst = max(worst, err / denom)
            if err > max(abs_tol, rel_tol * abs(w)):
                agree = False
    return agree, worst
