import json
import sys
from pathlib import Path

import pytest

from frame_runner import (EngineMissing, RunRequest, ScriptError, Timeout,
                          engine_available, execute_script,
                          validate_result_schema)
from frame_runner.cli import EXIT_OK, EXIT_SCRIPT_ERROR, main

from conftest import STUB_ENGINE

HAVE_ENGINE = engine_available()


def write_script(tmp_path, body: str) -> Path:
    path = tmp_path / "script.py"
    path.write_text(body)
    return path


GOOD_SYNTHETIC = """\
import json, sys
result = {
    'displacements': {'1': [0.0, 0.0, 0.0], '2': [0.001, -0.002, 0.0003]},
    'reactions': {'1': [1.5, 2.5, -0.5]},
}
with open(sys.argv[1], 'w') as fh:
    json.dump(result, fh)
"""


def test_request_validation(tmp_path):
    with pytest.raises(ScriptError):
        execute_script(RunRequest(script=tmp_path / "absent.py",
                                  output=tmp_path / "out.json"))
    real = write_script(tmp_path, GOOD_SYNTHETIC)
    with pytest.raises(ValueError):
        execute_script(RunRequest(script=real, output=tmp_path / "out.json",
                                  timeout_s=0))


def test_synthetic_success(tmp_path):
    script = write_script(tmp_path, GOOD_SYNTHETIC)
    doc = execute_script(RunRequest(script=script, output=tmp_path / "out.json"))
    assert doc["displacements"]["2"] == [0.001, -0.002, 0.0003]
    assert validate_result_schema(doc) == []


def test_zero_displacements_within_tolerance(tmp_path):
    body = GOOD_SYNTHETIC.replace("[0.001, -0.002, 0.0003]", "[1e-13, 0.0, -1e-14]")
    script = write_script(tmp_path, body)
    doc = execute_script(RunRequest(script=script, output=tmp_path / "out.json"))
    assert all(abs(v) < 1e-12 for v in doc["displacements"]["2"])


def test_script_error_carries_stderr(tmp_path):
    script = write_script(tmp_path, "raise RuntimeError('analysis went sideways')")
    with pytest.raises(ScriptError) as err:
        execute_script(RunRequest(script=script, output=tmp_path / "out.json"))
    assert "analysis went sideways" in err.value.record["stderr"]


def test_timeout(tmp_path):
    script = write_script(tmp_path, "import time; time.sleep(30)")
    with pytest.raises(Timeout):
        execute_script(RunRequest(script=script, output=tmp_path / "out.json",
                                  timeout_s=0.5))


def test_malformed_result_rejected(tmp_path):
    script = write_script(
        tmp_path,
        "import sys, json\n"
        "json.dump({'displacements': {'x': [1, 2]}}, open(sys.argv[1], 'w'))\n")
    with pytest.raises(ScriptError) as err:
        execute_script(RunRequest(script=script, output=tmp_path / "out.json"))
    assert "schema" in str(err.value)


@pytest.mark.skipif(HAVE_ENGINE, reason="native engine installed")
def test_engine_missing_classification(tmp_path, emitted_script):
    with pytest.raises(EngineMissing):
        execute_script(RunRequest(script=emitted_script,
                                  output=tmp_path / "out.json"))


def test_cli_success_and_failure(tmp_path, capsys):
    script = write_script(tmp_path, GOOD_SYNTHETIC)
    out = tmp_path / "ok.json"
    assert main([str(script), str(out)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["nodes"] == 2

    bad = tmp_path / "bad.py"
    bad.write_text("raise SystemExit(7)")
    out2 = tmp_path / "fail.json"
    assert main([str(bad), str(out2), "--timeout", "30"]) == EXIT_SCRIPT_ERROR
    record = json.loads(out2.read_text())
    assert record["error"] == "ScriptError"
    assert record["returncode"] == 7


def test_emitted_script_runs_under_stub_engine(tmp_path, emitted_script,
                                               monkeypatch):
    """Mechanics check with a command-recording engine stand-in: the script
    executes top to bottom, every tag resolves, and the epilogue writes the
    shared result schema with one entry per node."""
    monkeypatch.setenv("PYTHONPATH", str(STUB_ENGINE))
    out = tmp_path / "stub.json"
    doc = execute_script(RunRequest(script=emitted_script, output=out))
    assert validate_result_schema(doc) == []
    assert len(doc["displacements"]) == 16  # counting oracle for 3-2-3
    assert len(doc["reactions"]) == 4
    assert set(doc["reactions"]) <= set(doc["displacements"])


def test_script_with_undefined_node_fails_under_stub(tmp_path, emitted_script,
                                                     monkeypatch):
    monkeypatch.setenv("PYTHONPATH", str(STUB_ENGINE))
    broken = tmp_path / "broken.ops.py"
    text = emitted_script.read_text().replace(
        "element('elasticBeamColumn', 1, 1, 3,",
        "element('elasticBeamColumn', 1, 1, 99,")
    broken.write_text(text)
    with pytest.raises(ScriptError) as err:
        execute_script(RunRequest(script=broken, output=tmp_path / "out.json"))
    assert "undefined node 99" in err.value.record["stderr"]
