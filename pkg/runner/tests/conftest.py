import subprocess
import sys
from pathlib import Path

import pytest

STUB_ENGINE = Path(__file__).parent / "stub_engine"

# Template for the 3-2-3 benchmark frame, in the pipeline's documented
# four-section text format (the runner only talks to the pipeline through
# its external interfaces: this text, the emitted script, result JSON).
TEMPLATE_323 = """\
Geometry:
  Total bays: 3
  Total stories: 8
  Bay 1: span 6.0 m, 3 stories, heights 3.0, 3.0, 3.0 m
  Bay 2: span 6.0 m, 2 stories, heights 3.0, 3.0 m
  Bay 3: span 6.0 m, 3 stories, heights 3.0, 3.0, 3.0 m

Boundary conditions:
  Supports: fixed at all base nodes

Load patterns:
  Load 1: distributed, 10.0 kN/m, down, each girder
  Load 2: point, 50.0 kN, right, the top node of each story at the leftmost bay

Material properties:
  Young's modulus E: 2e8 kPa
  Column area A_col: 0.02 m^2
  Girder area A_gir: 0.015 m^2
  Column inertia I_col: 2e-4 m^4
  Girder inertia I_gir: 1.5e-4 m^4
"""


def pipeline_cli(*args) -> subprocess.CompletedProcess:
    """Invoke the model pipeline's CLI in a separate process."""
    return subprocess.run([sys.executable, "-m", "frameforge.cli", *args],
                          capture_output=True, text=True, timeout=300)


@pytest.fixture(scope="session")
def emitted_script(tmp_path_factory) -> Path:
    """A real emitted analysis script for the 3-2-3 frame."""
    work = tmp_path_factory.mktemp("emitted")
    problem = work / "problem.txt"
    problem.write_text(TEMPLATE_323)
    proc = pipeline_cli("codegen", str(problem), "--out", str(work))
    assert proc.returncode == 0, proc.stderr
    return work / "problem.ops.py"
