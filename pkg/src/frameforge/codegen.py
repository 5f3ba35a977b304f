"""Two-stage translation of a compiled model into an executable analysis script.

Stage one (the geometry translator) emits three ordered code blocks: nodes
with supports, the geometric transformation, and the elements. Stage two (the
complete generator) wraps them with the model header, load pattern, static
analysis configuration and a result-dump epilogue. Keeping the stages split
mirrors the pipeline's two translation roles and lets fault injection target
each one.

Numbers are written with Python's shortest round-trip repr so identical
models yield byte-identical scripts.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass

from .geometry import COLUMN
from .loads import LoadedModel

TRANSF_TAG = 1


@dataclass(frozen=True)
class ScriptArtifact:
    geometry_blocks: tuple[str, str, str]
    full_script: str
    digest: str


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_geometry_code(model: LoadedModel) -> tuple[str, str, str]:
    """Nodes + supports, transformation, and element command blocks."""
    lines = ["# nodes and supports"]
    for n in model.graph.nodes:
        lines.append(f"node({n.id}, {_fmt(n.x)}, {_fmt(n.y)})")
    for n in model.graph.nodes:
        if n.fixed:
            lines.append(f"fix({n.id}, 1, 1, 1)")
    nodes_block = "\n".join(lines)

    transf_block = "# geometric transformation\n" \
                   f"geomTransf('Linear', {TRANSF_TAG})"

    lines = ["# elements"]
    for el in model.graph.elements:
        if el.kind == COLUMN:
            A, I = model.material.A_col, model.material.I_col
        else:
            A, I = model.material.A_gir, model.material.I_gir
        lines.append(
            f"element('elasticBeamColumn', {el.id}, {el.node_i}, {el.node_j}, "
            f"{_fmt(A)}, {_fmt(model.material.E)}, {_fmt(I)}, {TRANSF_TAG})")
    elements_block = "\n".join(lines)
    return nodes_block, transf_block, elements_block


def emit_full_script(model: LoadedModel,
                     geometry_blocks: tuple[str, str, str]) -> ScriptArtifact:
    """Assemble the complete executable script around the geometry blocks."""
    node_tags = [n.id for n in model.graph.nodes]
    fixed_tags = [n.id for n in model.graph.nodes if n.fixed]

    parts = [
        "import json",
        "import sys",
        "",
        "from openseespy.opensees import *",
        "",
        "wipe()",
        "model('basic', '-ndm', 2, '-ndf', 3)",
        "",
        geometry_blocks[0],
        "",
        geometry_blocks[1],
        "",
        geometry_blocks[2],
        "",
        "# loads",
        "timeSeries('Linear', 1)",
        "pattern('Plain', 1, 1)",
    ]
    for nl in model.loads.nodal:
        parts.append(f"load({nl.node_id}, {_fmt(nl.fx)}, {_fmt(nl.fy)}, {_fmt(nl.mz)})")
    for ml in model.loads.member:
        parts.append(f"eleLoad('-ele', {ml.element_id}, '-type', '-beamUniform', "
                     f"{_fmt(ml.w)})")
    parts += [
        "",
        "# static analysis",
        "system('BandGeneral')",
        "numberer('RCM')",
        "constraints('Plain')",
        "integrator('LoadControl', 1.0)",
        "algorithm('Linear')",
        "analysis('Static')",
        "analyze(1)",
        "",
        "# dump displacements and reactions",
        "reactions()",
        "out_path = sys.argv[1] if len(sys.argv) > 1 else 'results.json'",
        f"node_tags = {node_tags}",
        f"fixed_tags = {fixed_tags}",
        "result = {",
        "    'displacements': {str(t): [nodeDisp(t, 1), nodeDisp(t, 2), nodeDisp(t, 3)]",
        "                      for t in node_tags},",
        "    'reactions': {str(t): [nodeReaction(t, 1), nodeReaction(t, 2), nodeReaction(t, 3)]",
        "                  for t in fixed_tags},",
        "}",
        "with open(out_path, 'w') as fh:",
        "    json.dump(result, fh, indent=2, sort_keys=True)",
        "",
    ]
    full = "\n".join(parts)
    for block in geometry_blocks:
        assert block in full
    return ScriptArtifact(
        geometry_blocks=tuple(geometry_blocks),
        full_script=full,
        digest=hashlib.sha256(full.encode("utf-8")).hexdigest(),
    )


# ---------------------------------------------------------------------------
# Script linter: referential closure and tag uniqueness
# ---------------------------------------------------------------------------

_NODE = re.compile(r"^node\((\d+),")
_FIX = re.compile(r"^fix\((\d+),")
_ELEMENT = re.compile(r"^element\('elasticBeamColumn', (\d+), (\d+), (\d+),")
_LOAD = re.compile(r"^load\((\d+),")
_ELELOAD = re.compile(r"^eleLoad\('-ele', (\d+),")


def lint_script(text: str) -> list[str]:
    """Check that every referenced tag is defined earlier; empty == clean."""
    issues: list[str] = []
    nodes: set[int] = set()
    elements: set[int] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if m := _NODE.match(line):
            tag = int(m.group(1))
            if tag in nodes:
                issues.append(f"line {lineno}: node tag {tag} redefined")
            nodes.add(tag)
        elif m := _FIX.match(line):
            if int(m.group(1)) not in nodes:
                issues.append(f"line {lineno}: fix references undefined node {m.group(1)}")
        elif m := _ELEMENT.match(line):
            tag, i, j = (int(g) for g in m.groups())
            if tag in elements:
                issues.append(f"line {lineno}: element tag {tag} duplicated")
            elements.add(tag)
            for end in (i, j):
                if end not in nodes:
                    issues.append(f"line {lineno}: element {tag} references "
                                  f"undefined node {end}")
        elif m := _LOAD.match(line):
            if int(m.group(1)) not in nodes:
                issues.append(f"line {lineno}: load references undefined node "
                              f"{m.group(1)}")
        elif m := _ELELOAD.match(line):
            if int(m.group(1)) not in elements:
                issues.append(f"line {lineno}: eleLoad references undefined element "
                              f"{m.group(1)}")
    return issues
