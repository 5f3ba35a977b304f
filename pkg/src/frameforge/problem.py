"""Canonical frame problem representation and the structured-template parser.

Units are fixed throughout the pipeline: kN, m, kPa, m^2, m^4. The template
parser performs no unit conversion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvariantViolation, MalformedValue, MissingSection
from .wire import digest

SUPPORT_TYPES = ("fixed", "pinned", "roller")
LOAD_TYPES = ("point", "distributed")
DIRECTIONS = ("up", "down", "left", "right")

SECTION_GEOMETRY = "Geometry"
SECTION_BOUNDARY = "Boundary conditions"
SECTION_LOADS = "Load patterns"
SECTION_MATERIAL = "Material properties"
SECTIONS = (SECTION_GEOMETRY, SECTION_BOUNDARY, SECTION_LOADS, SECTION_MATERIAL)


@dataclass(frozen=True)
class BaySpec:
    index: int                    # 1-based
    span: float                   # m
    story_count: int
    heights: tuple[float, ...]    # m, one per story


@dataclass(frozen=True)
class SupportSpec:
    type: str       # fixed | pinned | roller
    location: str   # verbatim text, e.g. "all base nodes"


@dataclass(frozen=True)
class MaterialSpec:
    E: float        # kPa
    A_col: float    # m^2
    A_gir: float    # m^2
    I_col: float    # m^4
    I_gir: float    # m^4


@dataclass(frozen=True)
class LoadSpec:
    type: str        # point | distributed
    location: str    # selector text, verbatim
    direction: str   # up | down | left | right
    magnitude: float  # kN (point) or kN/m (distributed); direction carries sign


@dataclass(frozen=True)
class ProblemSpec:
    total_bays: int
    total_stories: int
    bays: tuple[BaySpec, ...]
    support: SupportSpec
    material: MaterialSpec
    loads: tuple[LoadSpec, ...]


# Bench-harness defaults; configuration values only, not ground truth.
DEFAULT_MATERIAL = MaterialSpec(E=2.0e8, A_col=0.02, A_gir=0.015, I_col=2.0e-4, I_gir=1.5e-4)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


def validate_problem(spec: ProblemSpec) -> list[Violation]:
    """Every invariant violation, as data. Empty list == valid."""
    out: list[Violation] = []

    def bad(code, message):
        out.append(Violation(code, message))

    if spec.total_bays != len(spec.bays):
        bad("BayCountMismatch",
            f"Total_bays={spec.total_bays} but {len(spec.bays)} bays listed")
    for pos, bay in enumerate(spec.bays, start=1):
        if bay.index != pos:
            bad("BayIndexNonContiguous",
                f"bay at position {pos} carries index {bay.index}")
        if bay.span <= 0:
            bad("NonPositiveSpan", f"bay {bay.index}: span {bay.span}")
        if bay.story_count < 1:
            bad("NonPositiveStoryCount", f"bay {bay.index}: {bay.story_count} stories")
        if len(bay.heights) != bay.story_count:
            bad("HeightsLengthMismatch",
                f"bay {bay.index}: {len(bay.heights)} heights for {bay.story_count} stories")
        for h in bay.heights:
            if h <= 0:
                bad("NonPositiveHeight", f"bay {bay.index}: height {h}")
    story_sum = sum(b.story_count for b in spec.bays)
    if spec.total_stories != story_sum:
        bad("StoryCountMismatch",
            f"Total_stories={spec.total_stories} but story counts sum to {story_sum}")

    if spec.support.type not in SUPPORT_TYPES:
        bad("UnknownSupportType", f"support type {spec.support.type!r}")
    for name in ("E", "A_col", "A_gir", "I_col", "I_gir"):
        if getattr(spec.material, name) <= 0:
            bad("NonPositiveMaterial", f"{name} = {getattr(spec.material, name)}")
    for i, load in enumerate(spec.loads, start=1):
        if load.type not in LOAD_TYPES:
            bad("UnknownLoadType", f"load {i}: type {load.type!r}")
        if load.direction not in DIRECTIONS:
            bad("UnknownDirection", f"load {i}: direction {load.direction!r}")
        if load.magnitude <= 0:
            bad("NonPositiveMagnitude", f"load {i}: magnitude {load.magnitude}")
    return out


# ---------------------------------------------------------------------------
# Template text <-> ProblemSpec
# ---------------------------------------------------------------------------

_BAY_KEY = re.compile(r"^bay\s+(\d+)$", re.IGNORECASE)
_BAY_VALUE = re.compile(
    r"^span\s+(?P<span>[^\s,]+)\s*m\s*,\s*(?P<count>\d+)\s+stor(?:y|ies)\s*,"
    r"\s*heights\s+(?P<heights>.+?)\s*m$",
    re.IGNORECASE,
)
_SUPPORT_VALUE = re.compile(r"^(?P<type>\w+)\s+at\s+(?P<loc>.+)$", re.IGNORECASE)
_LOAD_VALUE = re.compile(
    r"^(?P<type>\w+)\s*,\s*(?P<mag>[^\s,]+)\s*(?P<unit>kN(?:/m)?)\s*,"
    r"\s*(?P<dir>\w+)\s*,\s*(?P<loc>.+)$"
)


def _split_sections(text: str) -> dict[str, list[str]]:
    headers = {name.lower(): name for name in SECTIONS}
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        key = line.rstrip(":").strip().lower()
        if key in headers:
            current = sections.setdefault(headers[key], [])
            continue
        if current is not None:
            current.append(line)
    for name in SECTIONS:
        if name not in sections:
            raise MissingSection(name)
    return sections


def _kv(line: str, field: str) -> tuple[str, str]:
    body = line.lstrip("-").strip()
    if ":" not in body:
        raise MalformedValue(field, line)
    key, value = body.split(":", 1)
    return key.strip(), value.strip()


def _num(text: str, field: str, line: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise MalformedValue(field, line) from None


def parse_problem_template(text: str) -> ProblemSpec:
    """Parse the four-section textual template into a validated ProblemSpec.

    Raises MissingSection / MalformedValue on structural problems and
    InvariantViolation when the parsed values contradict each other.
    """
    sections = _split_sections(text)

    total_bays = total_stories = None
    bays: list[BaySpec] = []
    for line in sections[SECTION_GEOMETRY]:
        key, value = _kv(line, "geometry")
        lk = key.lower()
        if lk == "total bays":
            total_bays = int(_num(value, "total bays", line))
        elif lk == "total stories":
            total_stories = int(_num(value, "total stories", line))
        elif _BAY_KEY.match(key):
            idx = int(_BAY_KEY.match(key).group(1))
            m = _BAY_VALUE.match(value)
            if not m:
                raise MalformedValue(f"bay {idx}", line)
            heights = tuple(
                _num(part.strip(), f"bay {idx} heights", line)
                for part in m.group("heights").split(",")
            )
            bays.append(BaySpec(index=idx,
                                span=_num(m.group("span"), f"bay {idx} span", line),
                                story_count=int(m.group("count")),
                                heights=heights))
        else:
            raise MalformedValue("geometry", line)
    if total_bays is None:
        raise MalformedValue("total bays", "line absent from Geometry section")
    if total_stories is None:
        raise MalformedValue("total stories", "line absent from Geometry section")

    support = None
    for line in sections[SECTION_BOUNDARY]:
        key, value = _kv(line, "supports")
        if key.lower() != "supports":
            raise MalformedValue("supports", line)
        m = _SUPPORT_VALUE.match(value)
        if not m:
            raise MalformedValue("supports", line)
        support = SupportSpec(type=m.group("type").lower(), location=m.group("loc"))
    if support is None:
        raise MalformedValue("supports", "line absent from Boundary conditions section")

    loads: list[LoadSpec] = []
    for line in sections[SECTION_LOADS]:
        key, value = _kv(line, "load")
        m = _LOAD_VALUE.match(value)
        if not m:
            raise MalformedValue(key.lower(), line)
        kind = m.group("type").lower()
        unit = m.group("unit")
        if (kind == "point" and unit != "kN") or (kind == "distributed" and unit != "kN/m"):
            raise MalformedValue(key.lower(), line)
        loads.append(LoadSpec(type=kind,
                              location=m.group("loc").strip(),
                              direction=m.group("dir").lower(),
                              magnitude=_num(m.group("mag"), key.lower(), line)))

    mat: dict[str, float] = {}
    for line in sections[SECTION_MATERIAL]:
        key, value = _kv(line, "material")
        symbol = key.split()[-1]
        if symbol not in ("E", "A_col", "A_gir", "I_col", "I_gir"):
            raise MalformedValue("material", line)
        value = value.split()[0] if value else value  # strip trailing unit
        mat[symbol] = _num(value, symbol, line)
    missing = [s for s in ("E", "A_col", "A_gir", "I_col", "I_gir") if s not in mat]
    if missing:
        raise MalformedValue("material", f"missing entries: {', '.join(missing)}")

    spec = ProblemSpec(total_bays=total_bays,
                       total_stories=total_stories,
                       bays=tuple(bays),
                       support=support,
                       material=MaterialSpec(**mat),
                       loads=tuple(loads))
    violations = validate_problem(spec)
    if violations:
        raise InvariantViolation("; ".join(f"{v.code}: {v.message}" for v in violations))
    return spec


_MATERIAL_LINES = (
    ("Young's modulus E", "E", "kPa"),
    ("Column area A_col", "A_col", "m^2"),
    ("Girder area A_gir", "A_gir", "m^2"),
    ("Column inertia I_col", "I_col", "m^4"),
    ("Girder inertia I_gir", "I_gir", "m^4"),
)


def render_problem_template(spec: ProblemSpec) -> str:
    """Inverse of parse_problem_template (round-trips on valid specs)."""
    lines = [f"{SECTION_GEOMETRY}:"]
    lines.append(f"  Total bays: {spec.total_bays}")
    lines.append(f"  Total stories: {spec.total_stories}")
    for bay in spec.bays:
        heights = ", ".join(repr(h) for h in bay.heights)
        lines.append(f"  Bay {bay.index}: span {bay.span!r} m, {bay.story_count} "
                     f"{'story' if bay.story_count == 1 else 'stories'}, heights {heights} m")
    lines.append("")
    lines.append(f"{SECTION_BOUNDARY}:")
    lines.append(f"  Supports: {spec.support.type} at {spec.support.location}")
    lines.append("")
    lines.append(f"{SECTION_LOADS}:")
    for i, load in enumerate(spec.loads, start=1):
        unit = "kN" if load.type == "point" else "kN/m"
        lines.append(f"  Load {i}: {load.type}, {load.magnitude!r} {unit}, "
                     f"{load.direction}, {load.location}")
    lines.append("")
    lines.append(f"{SECTION_MATERIAL}:")
    for label, symbol, unit in _MATERIAL_LINES:
        lines.append(f"  {label}: {getattr(spec.material, symbol)!r} {unit}")
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Wire format (problem-analysis JSON, field names verbatim)
# ---------------------------------------------------------------------------

def spec_to_json(spec: ProblemSpec) -> dict:
    return {
        "Geometry": {
            "Total_bays": spec.total_bays,
            "Total_stories": spec.total_stories,
            "Bay_data": [
                {"Bay": b.index, "Span": b.span, "Story_count": b.story_count,
                 "Heights": list(b.heights)}
                for b in spec.bays
            ],
        },
        "Supports": {"Type": spec.support.type, "Location": spec.support.location},
        "Material": {"E": spec.material.E, "A_col": spec.material.A_col,
                     "A_gir": spec.material.A_gir, "I_col": spec.material.I_col,
                     "I_gir": spec.material.I_gir},
        "Loads": [
            {"Type": ld.type, "Location": ld.location,
             "Direction": ld.direction, "Magnitude": ld.magnitude}
            for ld in spec.loads
        ],
    }


def spec_from_json(doc: dict) -> ProblemSpec:
    geo = doc["Geometry"]
    bays = tuple(
        BaySpec(index=int(b["Bay"]), span=float(b["Span"]),
                story_count=int(b["Story_count"]),
                heights=tuple(float(h) for h in b["Heights"]))
        for b in geo["Bay_data"]
    )
    mat = doc["Material"]
    return ProblemSpec(
        total_bays=int(geo["Total_bays"]),
        total_stories=int(geo["Total_stories"]),
        bays=bays,
        support=SupportSpec(type=doc["Supports"]["Type"],
                            location=doc["Supports"]["Location"]),
        material=MaterialSpec(E=float(mat["E"]), A_col=float(mat["A_col"]),
                              A_gir=float(mat["A_gir"]), I_col=float(mat["I_col"]),
                              I_gir=float(mat["I_gir"])),
        loads=tuple(
            LoadSpec(type=ld["Type"], location=ld["Location"],
                     direction=ld["Direction"], magnitude=float(ld["Magnitude"]))
            for ld in doc["Loads"]
        ),
    )


def spec_digest(spec: ProblemSpec) -> str:
    return digest(spec_to_json(spec))
