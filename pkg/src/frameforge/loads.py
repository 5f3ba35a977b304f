"""Load selector resolution and the compiled model bundle.

Sign conventions (global axes x right, y up): a member load w is the
transverse intensity along the element's local y axis, where local x runs
i -> j and local y is its counter-clockwise perpendicular. Downward loads on
girders and rightward wind on upward-pointing columns therefore resolve to
negative w. Point loads resolve to global (Fx, Fy); direction carries sign.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DanglingReference, EmptySelection, UnresolvableSelector
from .geometry import COORD_TOL, GIRDER, FrameGraph, graph_from_json, graph_to_json
from .problem import MaterialSpec, ProblemSpec, spec_to_json
from .wire import digest

_DIR_VECTORS = {"up": (0.0, 1.0), "down": (0.0, -1.0),
                "left": (-1.0, 0.0), "right": (1.0, 0.0)}


# --- selectors (closed grammar for the deterministic path) -------------------

@dataclass(frozen=True)
class AllGirders:
    pass


@dataclass(frozen=True)
class GirdersAtStory:
    story: int


@dataclass(frozen=True)
class TopNodesLeftmostBay:
    """One node per story level of bay 1, on the leftmost column line."""


@dataclass(frozen=True)
class LeftmostColumns:
    pass


@dataclass(frozen=True)
class NodesAt:
    bay: int
    story: int
    side: str  # left | right


@dataclass(frozen=True)
class Custom:
    text: str  # only resolvable by the agent backend


_GIRDERS_AT_STORY = re.compile(r"girders? (?:at|of|on) story (\d+)", re.IGNORECASE)
_NODES_AT = re.compile(r"bay (\d+) story (\d+) (left|right)", re.IGNORECASE)


def parse_selector(text: str):
    low = " ".join(text.lower().split())
    m = _GIRDERS_AT_STORY.search(low)
    if m:
        return GirdersAtStory(int(m.group(1)))
    if "girder" in low and any(q in low for q in ("each", "all", "every")):
        return AllGirders()
    if "top node" in low and "each story" in low and "leftmost bay" in low:
        return TopNodesLeftmostBay()
    if "leftmost column" in low:
        return LeftmostColumns()
    m = _NODES_AT.search(low)
    if m:
        return NodesAt(int(m.group(1)), int(m.group(2)), m.group(3))
    return Custom(text)


# --- resolved loads -----------------------------------------------------------

@dataclass(frozen=True)
class NodalLoad:
    node_id: int
    fx: float  # kN
    fy: float  # kN
    mz: float  # kN*m (in the data model; benchmark selectors never produce it)


@dataclass(frozen=True)
class MemberLoad:
    element_id: int
    w: float   # kN/m, uniform, along local y


@dataclass(frozen=True)
class ResolvedLoads:
    nodal: tuple[NodalLoad, ...]
    member: tuple[MemberLoad, ...]


@dataclass(frozen=True)
class LoadedModel:
    graph: FrameGraph
    material: MaterialSpec
    loads: ResolvedLoads
    provenance: dict  # digests of the upstream artifacts


def _near(a: float, b: float) -> bool:
    return abs(a - b) <= COORD_TOL


def _local_y(el) -> tuple[float, float]:
    dx = el.coord_j[0] - el.coord_i[0]
    dy = el.coord_j[1] - el.coord_i[1]
    length = (dx * dx + dy * dy) ** 0.5
    return (-dy / length, dx / length)  # CCW perpendicular of local x


def _story_elevations(spec: ProblemSpec, bay_index: int) -> list[float]:
    heights = spec.bays[bay_index - 1].heights
    return [sum(heights[: s + 1]) for s in range(len(heights))]


def _bay_bounds(spec: ProblemSpec, bay_index: int) -> tuple[float, float]:
    x_left = sum(b.span for b in spec.bays[: bay_index - 1])
    return x_left, x_left + spec.bays[bay_index - 1].span


def _find_node(graph: FrameGraph, x: float, y: float):
    for n in graph.nodes:
        if _near(n.x, x) and _near(n.y, y):
            return n
    return None


def _select_girders(spec: ProblemSpec, graph: FrameGraph, selector):
    girders = [e for e in graph.elements if e.kind == GIRDER]
    if isinstance(selector, AllGirders):
        return girders
    # GirdersAtStory: one girder per bay with at least `story` stories
    chosen = []
    for bay in spec.bays:
        if selector.story > bay.story_count:
            continue
        x_left, x_right = _bay_bounds(spec, bay.index)
        y = _story_elevations(spec, bay.index)[selector.story - 1]
        for e in girders:
            xs = sorted((e.coord_i[0], e.coord_j[0]))
            if _near(e.coord_i[1], y) and _near(xs[0], x_left) and _near(xs[1], x_right):
                chosen.append(e)
    return chosen


def assign_loads(spec: ProblemSpec, graph: FrameGraph) -> ResolvedLoads:
    """Resolve each abstract load onto concrete nodes or members.

    Deterministic for the closed selector grammar; Custom selectors are the
    agent backend's job and raise UnresolvableSelector here.
    """
    nodal: list[NodalLoad] = []
    member: list[MemberLoad] = []
    for load in spec.loads:
        selector = parse_selector(load.location)
        if isinstance(selector, Custom):
            raise UnresolvableSelector(load.location)
        direction = _DIR_VECTORS[load.direction]

        if load.type == "distributed":
            if isinstance(selector, (AllGirders, GirdersAtStory)):
                targets = _select_girders(spec, graph, selector)
            elif isinstance(selector, LeftmostColumns):
                targets = [e for e in graph.elements
                           if e.kind == "column"
                           and _near(e.coord_i[0], 0.0) and _near(e.coord_j[0], 0.0)]
            else:
                raise UnresolvableSelector(load.location)
            if not targets:
                raise EmptySelection(selector)
            for el in targets:
                ly = _local_y(el)
                w = load.magnitude * (direction[0] * ly[0] + direction[1] * ly[1])
                if w == 0.0:
                    raise UnresolvableSelector(load.location)  # axial member load
                member.append(MemberLoad(element_id=el.id, w=w))

        else:  # point
            if isinstance(selector, TopNodesLeftmostBay):
                coords = [(0.0, y) for y in _story_elevations(spec, 1)]
            elif isinstance(selector, NodesAt):
                x = _bay_bounds(spec, selector.bay)[0 if selector.side == "left" else 1]
                y = _story_elevations(spec, selector.bay)[selector.story - 1]
                coords = [(x, y)]
            else:
                raise UnresolvableSelector(load.location)
            hits = [_find_node(graph, x, y) for x, y in coords]
            hits = [n for n in hits if n is not None]
            if not hits:
                raise EmptySelection(selector)
            for n in hits:
                nodal.append(NodalLoad(node_id=n.id,
                                       fx=direction[0] * load.magnitude,
                                       fy=direction[1] * load.magnitude,
                                       mz=0.0))
    return ResolvedLoads(nodal=tuple(nodal), member=tuple(member))


def compile_model(spec: ProblemSpec, graph: FrameGraph,
                  loads: ResolvedLoads) -> LoadedModel:
    """Merge graph, material and resolved loads into one validated bundle."""
    node_ids = {n.id for n in graph.nodes}
    element_ids = {e.id for e in graph.elements}
    for nl in loads.nodal:
        if nl.node_id not in node_ids:
            raise DanglingReference("node", nl.node_id)
    for ml in loads.member:
        if ml.element_id not in element_ids:
            raise DanglingReference("element", ml.element_id)
    provenance = {
        "problem": digest(spec_to_json(spec)),
        "graph": digest(graph_to_json(graph)),
        "loads": digest(loads_to_json(loads)),
    }
    return LoadedModel(graph=graph, material=spec.material,
                       loads=loads, provenance=provenance)


# ---------------------------------------------------------------------------
# Wire formats
# ---------------------------------------------------------------------------

def loads_to_json(loads: ResolvedLoads) -> dict:
    return {
        "nodal_loads": [{"Node_ID": nl.node_id, "Fx": nl.fx, "Fy": nl.fy, "Mz": nl.mz}
                        for nl in loads.nodal],
        "member_loads": [{"Element_ID": ml.element_id, "w": ml.w}
                         for ml in loads.member],
    }


def loads_from_json(doc: dict) -> ResolvedLoads:
    return ResolvedLoads(
        nodal=tuple(NodalLoad(node_id=int(d["Node_ID"]), fx=float(d["Fx"]),
                              fy=float(d["Fy"]), mz=float(d.get("Mz", 0.0)))
                    for d in doc["nodal_loads"]),
        member=tuple(MemberLoad(element_id=int(d["Element_ID"]), w=float(d["w"]))
                     for d in doc["member_loads"]),
    )


def model_to_json(model: LoadedModel) -> dict:
    doc = graph_to_json(model.graph)
    doc["material"] = {"E": model.material.E, "A_col": model.material.A_col,
                       "A_gir": model.material.A_gir, "I_col": model.material.I_col,
                       "I_gir": model.material.I_gir}
    doc.update(loads_to_json(model.loads))
    doc["provenance"] = dict(model.provenance)
    return doc


def model_from_json(doc: dict) -> LoadedModel:
    mat = doc["material"]
    return LoadedModel(
        graph=graph_from_json(doc),
        material=MaterialSpec(E=float(mat["E"]), A_col=float(mat["A_col"]),
                              A_gir=float(mat["A_gir"]), I_col=float(mat["I_col"]),
                              I_gir=float(mat["I_gir"])),
        loads=loads_from_json(doc),
        provenance=dict(doc.get("provenance", {})),
    )


def model_digest(model: LoadedModel) -> str:
    return digest(model_to_json(model))
