"""Node and element rulebooks, connectivity mapping and the geometric checkpoint.

The node and element generators are independent pure functions over the same
(spec, plan) inputs so the orchestrator can run them in parallel; both walk
the plan step by step and apply the rule for the step's type.

Rule coordinates, for step (bay b, story s):
  x_b    = sum of spans of bays 1..b (x_0 = 0)
  y_bot  = sum of bay b's heights below story s
  y_top  = y_bot + height of story s
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .checkpoint import CheckFailure, CheckpointReport, report
from .errors import (AmbiguousMatch, SharedElevationMismatch, UnmatchedEndpoint,
                     UnresolvableSelector)
from .planner import ConstructionPlan, ConstructionStep
from .problem import ProblemSpec

COORD_TOL = 1e-9  # m, absolute; mapping, duplicate detection, elevation snap

COLUMN = "column"
GIRDER = "girder"

# nodes / elements added by each step type (rule sizes are fixed)
NODES_PER_TYPE = {1: 4, 2: 2, 3: 2, 4: 1, 5: 2}
ELEMENTS_PER_TYPE = {1: 3, 2: 3, 3: 2, 4: 2, 5: 3}

_NODE_SLOTS = {
    1: ("left base", "right base", "left top", "right top"),
    2: ("left top", "right top"),
    3: ("right base", "right top"),
    4: ("right top",),
    5: ("left top", "right top"),
}
_ELEMENT_SLOTS = {
    1: ("left column", "right column", "girder"),
    2: ("left column", "right column", "girder"),
    3: ("right column", "girder"),
    4: ("right column", "girder"),
    5: ("left column", "right column", "girder"),
}


@dataclass(frozen=True)
class NodeRecord:
    id: int
    x: float     # m
    y: float     # m
    fixed: bool  # fully fixed support (benchmark scope: only at y == 0)


@dataclass(frozen=True)
class ElementRecord:
    id: int
    kind: str                       # column | girder, set by orientation
    coord_i: tuple[float, float]    # m
    coord_j: tuple[float, float]    # m
    node_i: int | None = None       # resolved by map_connectivity
    node_j: int | None = None


@dataclass(frozen=True)
class FrameGraph:
    nodes: tuple[NodeRecord, ...]
    elements: tuple[ElementRecord, ...]   # connectivity resolved

    def node_by_id(self, node_id: int) -> NodeRecord:
        return self._index()[node_id]

    def _index(self) -> dict[int, NodeRecord]:
        idx = getattr(self, "_idx", None)
        if idx is None:
            idx = {n.id: n for n in self.nodes}
            object.__setattr__(self, "_idx", idx)
        return idx


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= COORD_TOL


def _step_frame(spec: ProblemSpec, step: ConstructionStep):
    """(x_left, x_right, y_bot, y_top) for a construction step."""
    b, s = step.bay_number, step.story_number
    x_left = sum(bay.span for bay in spec.bays[: b - 1])
    x_right = x_left + spec.bays[b - 1].span
    heights = spec.bays[b - 1].heights
    y_bot = sum(heights[: s - 1])
    y_top = y_bot + heights[s - 1]
    return x_left, x_right, y_bot, y_top


# Support phrasings the rulebook handles itself; anything else is free text
# for the chat backend to interpret.
_BASE_SUPPORT_PHRASES = frozenset({
    "all base nodes", "all bases", "all base", "the base", "base",
    "at the base", "all supports at the base",
})


def generate_nodes(spec: ProblemSpec, plan: ConstructionPlan) -> list[NodeRecord]:
    """Apply the node rulebook step by step; ids in creation order from 1.

    Raises SharedElevationMismatch when a type-3/4 girder's left end has no
    node on the shared column line within tolerance (misaligned elevations
    are rejected, never bridged with an inserted node). Support descriptions
    beyond fully fixed bases are not this rulebook's job and are rejected.
    """
    if spec.support.type != "fixed" or \
            " ".join(spec.support.location.lower().split()) not in _BASE_SUPPORT_PHRASES:
        raise UnresolvableSelector(
            f"{spec.support.type} at {spec.support.location}")
    nodes: list[NodeRecord] = []

    def exists(x: float, y: float) -> bool:
        return any(_near(n.x, x) and _near(n.y, y) for n in nodes)

    def add(x: float, y: float):
        nodes.append(NodeRecord(id=len(nodes) + 1, x=x, y=y, fixed=(y == 0.0)))

    for step in plan.steps:
        x_left, x_right, y_bot, y_top = _step_frame(spec, step)
        t = step.step_type
        if t == 1:
            add(x_left, 0.0)
            add(x_right, 0.0)
            add(x_left, y_top)
            add(x_right, y_top)
        elif t == 2:
            add(x_left, y_top)
            add(x_right, y_top)
        elif t == 3:
            if not exists(x_left, y_top):
                raise SharedElevationMismatch(step.bay_number, step.story_number)
            add(x_right, 0.0)
            add(x_right, y_top)
        elif t == 4:
            if not exists(x_left, y_top):
                raise SharedElevationMismatch(step.bay_number, step.story_number)
            add(x_right, y_top)
        else:  # type 5 extends the left line upward
            add(x_left, y_top)
            add(x_right, y_top)
    return nodes


def generate_elements(spec: ProblemSpec, plan: ConstructionPlan) -> list[ElementRecord]:
    """Apply the element rulebook; coordinate pairs only, validation deferred."""
    elements: list[ElementRecord] = []

    def add(ci: tuple[float, float], cj: tuple[float, float]):
        kind = COLUMN if _near(ci[0], cj[0]) else GIRDER
        elements.append(ElementRecord(id=len(elements) + 1, kind=kind,
                                      coord_i=ci, coord_j=cj))

    for step in plan.steps:
        x_left, x_right, y_bot, y_top = _step_frame(spec, step)
        t = step.step_type
        if t in (1, 2, 5):                       # both columns; y_bot is 0 for type 1
            add((x_left, y_bot), (x_left, y_top))
            add((x_right, y_bot), (x_right, y_top))
        else:                                    # types 3 and 4: right column only
            add((x_right, y_bot), (x_right, y_top))
        add((x_left, y_top), (x_right, y_top))   # the step's girder
    return elements


def map_connectivity(nodes: list[NodeRecord],
                     elements: list[ElementRecord]) -> list[ElementRecord]:
    """Resolve endpoint coordinates to node tags; deterministic, no agent."""
    resolved = []
    for el in elements:
        tags = []
        for coord in (el.coord_i, el.coord_j):
            hits = [n.id for n in nodes if _near(n.x, coord[0]) and _near(n.y, coord[1])]
            if not hits:
                raise UnmatchedEndpoint(el.id, coord)
            if len(hits) > 1:
                raise AmbiguousMatch(el.id)
            tags.append(hits[0])
        resolved.append(replace(el, node_i=tags[0], node_j=tags[1]))
    return resolved


def check_geometry(nodes: list[NodeRecord],
                   elements: list[ElementRecord]) -> CheckpointReport:
    """Checkpoint B: duplicate nodes/elements, unmatched endpoints, orphan nodes."""
    failures: list[CheckFailure] = []

    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if _near(a.x, b.x) and _near(a.y, b.y):
                failures.append(CheckFailure(
                    "DuplicateNode",
                    f"nodes {a.id} and {b.id} coincide at ({a.x}, {a.y})"))

    def endpoint_key(el: ElementRecord):
        return frozenset((el.coord_i, el.coord_j))

    seen: dict = {}
    for el in elements:
        key = endpoint_key(el)
        if key in seen:
            failures.append(CheckFailure(
                "DuplicateElement",
                f"elements {seen[key]} and {el.id} share endpoints "
                f"{el.coord_i} - {el.coord_j}"))
        else:
            seen[key] = el.id

    referenced: set[int] = set()
    for el in elements:
        for coord in (el.coord_i, el.coord_j):
            hits = [n.id for n in nodes if _near(n.x, coord[0]) and _near(n.y, coord[1])]
            if len(hits) != 1:
                failures.append(CheckFailure(
                    "UnmatchedEndpoint",
                    f"element {el.id} endpoint {coord} matches {len(hits)} nodes"))
            else:
                referenced.add(hits[0])

    for n in nodes:
        if n.id not in referenced:
            failures.append(CheckFailure(
                "OrphanNode", f"node {n.id} at ({n.x}, {n.y}) is unreferenced"))
    return report(failures)


def build_graph(nodes: list[NodeRecord], elements: list[ElementRecord]) -> FrameGraph:
    """Assemble the validated graph; elements must already be resolved."""
    return FrameGraph(nodes=tuple(nodes), elements=tuple(elements))


# ---------------------------------------------------------------------------
# Wire formats (node-agent / element-agent JSON, grouped per construction step)
# ---------------------------------------------------------------------------

def _step_slices(plan: ConstructionPlan, sizes: dict[int, int]):
    start = 0
    for step in plan.steps:
        n = sizes[step.step_type]
        yield step, start, start + n
        start += n


def nodes_to_json(plan: ConstructionPlan, nodes: list[NodeRecord]) -> dict:
    steps = []
    for step, lo, hi in _step_slices(plan, NODES_PER_TYPE):
        batch = nodes[lo:hi]
        slots = _NODE_SLOTS[step.step_type]
        steps.append({
            "Step_number": step.step_number,
            "Bay_number": step.bay_number,
            "Story_number": step.story_number,
            "Step_type": str(step.step_type),
            "Nodes": [
                {"ID": n.id, "x": n.x, "y": n.y, "Description": slots[k]}
                for k, n in enumerate(batch)
            ],
            "Boundary_conditions": [
                {"Node_ID": n.id, "Constraints": "fixed"} for n in batch if n.fixed
            ],
        })
    return {"Construction_steps": steps}


def nodes_from_json(doc: dict) -> list[NodeRecord]:
    fixed_ids = set()
    raw = []
    for step in doc["Construction_steps"]:
        for bc in step.get("Boundary_conditions", []):
            if "fix" in bc.get("Constraints", "").lower():
                fixed_ids.add(int(bc["Node_ID"]))
        for nd in step.get("Nodes", []):
            raw.append((int(nd["ID"]), float(nd["x"]), float(nd["y"])))
    return [NodeRecord(id=i, x=x, y=y, fixed=(i in fixed_ids)) for i, x, y in raw]


def elements_to_json(plan: ConstructionPlan, elements: list[ElementRecord]) -> dict:
    steps = []
    for step, lo, hi in _step_slices(plan, ELEMENTS_PER_TYPE):
        batch = elements[lo:hi]
        slots = _ELEMENT_SLOTS[step.step_type]
        steps.append({
            "Step_number": step.step_number,
            "Bay_number": step.bay_number,
            "Story_number": step.story_number,
            "Step_type": str(step.step_type),
            "Elements": [
                {"ID": el.id, "Coord_i": list(el.coord_i), "Coord_j": list(el.coord_j),
                 "Description": slots[k]}
                for k, el in enumerate(batch)
            ],
        })
    return {"Construction_steps": steps}


def elements_from_json(doc: dict) -> list[ElementRecord]:
    out = []
    for step in doc["Construction_steps"]:
        for el in step.get("Elements", []):
            ci = (float(el["Coord_i"][0]), float(el["Coord_i"][1]))
            cj = (float(el["Coord_j"][0]), float(el["Coord_j"][1]))
            kind = COLUMN if _near(ci[0], cj[0]) else GIRDER
            out.append(ElementRecord(id=int(el["ID"]), kind=kind,
                                     coord_i=ci, coord_j=cj))
    return out


def graph_to_json(graph: FrameGraph) -> dict:
    """Flat form used inside the compiled model document."""
    return {
        "nodes": [{"ID": n.id, "x": n.x, "y": n.y} for n in graph.nodes],
        "supports": [{"Node_ID": n.id, "Constraints": "fixed"}
                     for n in graph.nodes if n.fixed],
        "elements": [
            {"ID": e.id, "Kind": e.kind, "Node_i": e.node_i, "Node_j": e.node_j,
             "Coord_i": list(e.coord_i), "Coord_j": list(e.coord_j)}
            for e in graph.elements
        ],
    }


def graph_from_json(doc: dict) -> FrameGraph:
    fixed = {int(s["Node_ID"]) for s in doc["supports"]}
    nodes = tuple(NodeRecord(id=int(n["ID"]), x=float(n["x"]), y=float(n["y"]),
                             fixed=int(n["ID"]) in fixed)
                  for n in doc["nodes"])
    elements = tuple(
        ElementRecord(id=int(e["ID"]), kind=e["Kind"],
                      coord_i=(float(e["Coord_i"][0]), float(e["Coord_i"][1])),
                      coord_j=(float(e["Coord_j"][0]), float(e["Coord_j"][1])),
                      node_i=int(e["Node_i"]), node_j=int(e["Node_j"]))
        for e in doc["elements"])
    return FrameGraph(nodes=nodes, elements=elements)
