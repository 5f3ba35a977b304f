import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles helper module

from frameforge.problem import (DEFAULT_MATERIAL, BaySpec, LoadSpec, ProblemSpec,
                                SupportSpec)

BENCH_LOADS = (
    LoadSpec(type="distributed", location="each girder",
             direction="down", magnitude=10.0),
    LoadSpec(type="point",
             location="the top node of each story at the leftmost bay",
             direction="right", magnitude=50.0),
)


def make_spec(story_counts, story_heights=None, spans=None, loads=BENCH_LOADS,
              total_stories=None):
    """Spec builder; heights is a global per-story sequence shared by bays."""
    counts = list(story_counts)
    if story_heights is None:
        story_heights = [3.0] * max(counts)
    if spans is None:
        spans = [6.0] * len(counts)
    bays = tuple(
        BaySpec(index=i + 1, span=float(spans[i]), story_count=c,
                heights=tuple(float(h) for h in story_heights[:c]))
        for i, c in enumerate(counts))
    return ProblemSpec(
        total_bays=len(counts),
        total_stories=sum(counts) if total_stories is None else total_stories,
        bays=bays,
        support=SupportSpec(type="fixed", location="all base nodes"),
        material=DEFAULT_MATERIAL,
        loads=tuple(loads))


@pytest.fixture
def spec_323():
    return make_spec([3, 2, 3])


@pytest.fixture
def spec_323_unit():
    return make_spec([3, 2, 3], story_heights=[1.0, 1.0, 1.0])


@pytest.fixture
def spec_23145_unit():
    return make_spec([2, 3, 1, 4, 5], story_heights=[1.0] * 5)


@pytest.fixture
def spec_single_bay():
    return make_spec([1], loads=())
