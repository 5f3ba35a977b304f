"""Bay-by-bay, story-by-story construction planning with step types 1-5.

Step types:
  1  first story of the first bay (base frame)
  2  additional story in the first bay
  3  first story of a later bay
  4  later-bay story whose top elevation does not exceed the left bay's height
  5  later-bay story rising above the left bay
"""

from __future__ import annotations

from dataclasses import dataclass

from .checkpoint import CheckFailure, CheckpointReport, report
from .errors import IndexOutOfRange
from .problem import ProblemSpec, spec_digest

ELEVATION_TOL = 1e-9  # m, absolute


@dataclass(frozen=True)
class ConstructionStep:
    step_number: int   # 1-based, contiguous in plan order
    bay_number: int
    story_number: int
    step_type: int     # 1..5


@dataclass(frozen=True)
class ConstructionPlan:
    steps: tuple[ConstructionStep, ...]
    source_spec_digest: str


def classify_step_type(spec: ProblemSpec, bay: int, story: int) -> int:
    if not 1 <= bay <= spec.total_bays:
        raise IndexOutOfRange(f"bay {bay} not in 1..{spec.total_bays}")
    stories = spec.bays[bay - 1].story_count
    if not 1 <= story <= stories:
        raise IndexOutOfRange(f"story {story} not in 1..{stories} for bay {bay}")
    if bay == 1:
        return 1 if story == 1 else 2
    if story == 1:
        return 3
    elevation = sum(spec.bays[bay - 1].heights[:story])
    left_height = sum(spec.bays[bay - 2].heights)
    # ties at exact equality are type 4 ("less than or equal")
    return 4 if elevation <= left_height + ELEVATION_TOL else 5


def plan_construction(spec: ProblemSpec) -> ConstructionPlan:
    steps = []
    number = 0
    for bay in spec.bays:
        for story in range(1, bay.story_count + 1):
            number += 1
            steps.append(ConstructionStep(
                step_number=number,
                bay_number=bay.index,
                story_number=story,
                step_type=classify_step_type(spec, bay.index, story)))
    return ConstructionPlan(steps=tuple(steps), source_spec_digest=spec_digest(spec))


def check_plan(spec: ProblemSpec, plan: ConstructionPlan) -> CheckpointReport:
    """Checkpoint A: max bay number and step count against the problem analysis."""
    failures: list[CheckFailure] = []
    max_bay = max((s.bay_number for s in plan.steps), default=0)
    if max_bay != spec.total_bays:
        failures.append(CheckFailure(
            "MaxBayMismatch",
            f"plan reaches bay {max_bay}, problem has {spec.total_bays} bays"))
    if len(plan.steps) != spec.total_stories:
        failures.append(CheckFailure(
            "StepCountMismatch",
            f"{len(plan.steps)} steps for {spec.total_stories} stories"))
    return report(failures)


# ---------------------------------------------------------------------------
# Wire format (construction-planning JSON)
# ---------------------------------------------------------------------------

def plan_to_json(plan: ConstructionPlan) -> dict:
    return {
        "Construction_steps": [
            {"Step_number": s.step_number, "Bay_number": s.bay_number,
             "Story_number": s.story_number, "Step_type": str(s.step_type)}
            for s in plan.steps
        ]
    }


def plan_from_json(doc: dict, source_spec_digest: str = "") -> ConstructionPlan:
    steps = tuple(
        ConstructionStep(step_number=int(s["Step_number"]),
                         bay_number=int(s["Bay_number"]),
                         story_number=int(s["Story_number"]),
                         step_type=int(s["Step_type"]))
        for s in doc["Construction_steps"]
    )
    return ConstructionPlan(steps=steps, source_spec_digest=source_spec_digest)
