"""Benchmark presets, trial scoring and the repeated-trials harness.

The paper20 preset carries ten fixed frame configurations plus ten seeded
fill cases sampled by the benchmark rule (story counts and per-story heights
1..5 m, 6 m spans, heights shared across bays), keeping the five 3-bay /
fifteen 5-bay split. Fill cases depend on the seed.

bench.csv holds only deterministic columns so deterministic-backend runs are
byte-reproducible; wall-clock numbers go to bench-runtime.csv and the
Markdown summary.
"""

from __future__ import annotations

import csv
import io
import json
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .agents import PipelineResult, run_pipeline
from .errors import FrameForgeError, TopologyMismatch
from .geometry import COLUMN
from .problem import (DEFAULT_MATERIAL, BaySpec, LoadSpec, ProblemSpec,
                      SupportSpec, render_problem_template)
from .solver import AnalysisResult, result_to_json, solve_static

BENCH_SPAN = 6.0          # m
BENCH_UDL = 10.0          # kN/m down on each girder
BENCH_POINT = 50.0        # kN right at each story level of the leftmost bay
UNIFORM_HEIGHT = 3.0      # m, used where the source names no heights

# Fixed benchmark configurations (story counts per bay); seeded fill cases
# complete the set of 20.
NAMED_CASE_COUNTS = (
    (2, 3, 1, 4, 5),
    (3, 4, 5, 4, 3),
    (1, 2, 3, 1, 5),
    (2, 4, 3, 2, 5),
    (2, 4, 3, 5, 1),
    (3, 5, 2, 3, 5),
    (5, 3, 2, 4, 1),
    (2, 2, 3, 1, 2),
    (3, 2, 3, 2, 3),
    (3, 2, 3),
)

SCALABILITY_CASES = (
    ("scale1", (5, 5, 6, 7, 6, 5, 5)),
    ("scale2", (7, 5, 6, 4, 7, 3, 5)),
    ("scale3", (7, 7, 8, 8, 10, 10, 8, 8, 7, 7)),
)


@dataclass(frozen=True)
class BenchCase:
    name: str
    story_counts: tuple[int, ...]
    spans: tuple[float, ...]
    story_heights: tuple[float, ...]   # global per-story sequence, shared by bays
    load_pattern: str = "benchmark"    # benchmark | none
    trials: int = 1

    def to_problem_spec(self) -> ProblemSpec:
        bays = tuple(
            BaySpec(index=i + 1, span=self.spans[i], story_count=count,
                    heights=tuple(self.story_heights[:count]))
            for i, count in enumerate(self.story_counts))
        if self.load_pattern == "benchmark":
            loads = (
                LoadSpec(type="distributed", location="each girder",
                         direction="down", magnitude=BENCH_UDL),
                LoadSpec(type="point",
                         location="the top node of each story at the leftmost bay",
                         direction="right", magnitude=BENCH_POINT),
            )
        else:
            loads = ()
        return ProblemSpec(total_bays=len(self.story_counts),
                           total_stories=sum(self.story_counts),
                           bays=bays,
                           support=SupportSpec(type="fixed", location="all base nodes"),
                           material=DEFAULT_MATERIAL,
                           loads=loads)


def _case(name: str, counts: tuple[int, ...],
          heights: tuple[float, ...] | None = None) -> BenchCase:
    max_count = max(counts)
    if heights is None:
        heights = (UNIFORM_HEIGHT,) * max_count
    return BenchCase(name=name, story_counts=tuple(counts),
                     spans=(BENCH_SPAN,) * len(counts),
                     story_heights=tuple(heights))


def paper20_preset(seed: int = 7) -> list[BenchCase]:
    cases = [_case("-".join(map(str, counts)), counts)
             for counts in NAMED_CASE_COUNTS]
    rng = random.Random(seed)
    fill_bays = [3] * 4 + [5] * 6   # keeps the 5/15 bay split over 20 cases
    for i, n_bays in enumerate(fill_bays, start=11):
        counts = tuple(rng.randint(1, 5) for _ in range(n_bays))
        heights = tuple(float(rng.randint(1, 5)) for _ in range(max(counts)))
        cases.append(_case(f"fill{i:02d}-" + "-".join(map(str, counts)),
                           counts, heights))
    return cases


def scalability_preset() -> list[BenchCase]:
    return [_case(name, counts) for name, counts in SCALABILITY_CASES]


def preset(name: str, seed: int = 7) -> list[BenchCase]:
    if name == "paper20":
        return paper20_preset(seed)
    if name == "scalability":
        return scalability_preset()
    raise KeyError(f"unknown preset {name!r}")


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def score_trial(result: AnalysisResult, oracle: AnalysisResult,
                rel_tol: float = 1e-6, abs_tol: float = 1e-12) -> bool:
    """Pass iff every displacement component matches the oracle."""
    if set(result.displacements) != set(oracle.displacements):
        raise TopologyMismatch("displacement node sets differ")
    for node_id, want in oracle.displacements.items():
        got = result.displacements[node_id]
        for g, w in zip(got, want):
            if abs(g - w) > max(abs_tol, rel_tol * abs(w)):
                return False
    return True


def max_relative_error(result: AnalysisResult, oracle: AnalysisResult,
                       abs_floor: float = 1e-12) -> float:
    worst = 0.0
    for node_id, want in oracle.displacements.items():
        got = result.displacements[node_id]
        for g, w in zip(got, want):
            denom = max(abs(w), abs_floor)
            worst = max(worst, abs(g - w) / denom)
    return worst


# ---------------------------------------------------------------------------
# Harness
# ---------------------------------------------------------------------------

@dataclass
class TrialRecord:
    case: str
    trial: int
    passed: bool
    max_rel_error: float
    wall_s: float
    nodes: int
    elements: int
    columns: int
    girders: int
    steps: int
    retries_a: int
    retries_b: int
    tokens_in: int
    tokens_out: int


@dataclass
class BenchReport:
    records: list[TrialRecord] = field(default_factory=list)

    def accuracy(self, case: str) -> float:
        rows = [r for r in self.records if r.case == case]
        return sum(r.passed for r in rows) / len(rows)

    def cases(self) -> list[str]:
        seen: list[str] = []
        for r in self.records:
            if r.case not in seen:
                seen.append(r.case)
        return seen


def oracle_result(spec: ProblemSpec) -> AnalysisResult:
    """Ground truth: build the model by direct rulebook calls and solve it."""
    from .geometry import (build_graph, generate_elements, generate_nodes,
                           map_connectivity)
    from .loads import assign_loads, compile_model
    from .planner import plan_construction
    plan = plan_construction(spec)
    nodes = generate_nodes(spec, plan)
    elements = map_connectivity(nodes, generate_elements(spec, plan))
    graph = build_graph(nodes, elements)
    return solve_static(compile_model(spec, graph, assign_loads(spec, graph)))


def run_case(case: BenchCase, bindings=None, profiles=None,
             transport=None) -> tuple[TrialRecord, PipelineResult | None]:
    """One trial; on pipeline failure returns a failed record and no artifacts."""
    spec = case.to_problem_spec()
    text = render_problem_template(spec)
    oracle = oracle_result(spec)
    started = time.perf_counter()
    try:
        pipe = run_pipeline(text, bindings=bindings, profiles=profiles,
                            transport=transport)
        wall = time.perf_counter() - started
        passed = score_trial(pipe.result, oracle)
        worst = max_relative_error(pipe.result, oracle)
    except TopologyMismatch:
        wall = time.perf_counter() - started
        passed, worst = False, float("inf")
    except FrameForgeError:
        wall = time.perf_counter() - started
        record = TrialRecord(case=case.name, trial=0, passed=False,
                             max_rel_error=float("inf"), wall_s=wall, nodes=0,
                             elements=0, columns=0, girders=0, steps=0,
                             retries_a=0, retries_b=0, tokens_in=0, tokens_out=0)
        return record, None
    tokens_in, tokens_out = pipe.ledger.total_tokens()
    columns = sum(1 for e in pipe.graph.elements if e.kind == COLUMN)
    record = TrialRecord(
        case=case.name, trial=0, passed=passed, max_rel_error=worst,
        wall_s=wall, nodes=len(pipe.graph.nodes), elements=len(pipe.graph.elements),
        columns=columns, girders=len(pipe.graph.elements) - columns,
        steps=len(pipe.plan.steps), retries_a=pipe.retries_a,
        retries_b=pipe.retries_b, tokens_in=tokens_in, tokens_out=tokens_out)
    return record, pipe


_CSV_COLUMNS = ("case", "trial", "passed", "max_rel_error", "nodes", "elements",
                "columns", "girders", "steps", "retries_a", "retries_b",
                "tokens_in", "tokens_out")


def run_bench(cases: list[BenchCase], trials: int, out_dir,
              bindings=None, profiles=None, transport=None) -> BenchReport:
    """Run every case `trials` times; write bench.csv, bench-runtime.csv,
    bench.md, and per case one emitted script (scripts/) plus the internal
    solver's result JSON (results/) for cross-engine comparison."""
    out = Path(out_dir)
    (out / "scripts").mkdir(parents=True, exist_ok=True)
    (out / "results").mkdir(parents=True, exist_ok=True)
    report = BenchReport()

    deterministic_buf = io.StringIO()
    runtime_buf = io.StringIO()
    det_writer = csv.writer(deterministic_buf, lineterminator="\n")
    rt_writer = csv.writer(runtime_buf, lineterminator="\n")
    det_writer.writerow(_CSV_COLUMNS)
    rt_writer.writerow(("case", "trial", "wall_s"))

    for case in sorted(cases, key=lambda c: c.name):
        for trial in range(1, trials + 1):
            record, pipe = run_case(case, bindings=bindings, profiles=profiles,
                                    transport=transport)
            record.trial = trial
            report.records.append(record)
            det_writer.writerow([getattr(record, col) for col in _CSV_COLUMNS])
            rt_writer.writerow([record.case, record.trial, repr(record.wall_s)])
            if trial == 1 and pipe is not None:
                (out / "scripts" / f"{case.name}.ops.py").write_text(
                    pipe.script.full_script)
                (out / "results" / f"{case.name}.result.json").write_text(
                    json.dumps(result_to_json(pipe.result), indent=2,
                               sort_keys=True))

    (out / "bench.csv").write_text(deterministic_buf.getvalue())
    (out / "bench-runtime.csv").write_text(runtime_buf.getvalue())
    (out / "bench.md").write_text(_summary_md(report))
    return report


def _summary_md(report: BenchReport) -> str:
    lines = ["# Bench summary", "",
             "| case | trials | accuracy | elements | mean wall s | max rel err |",
             "|------|--------|----------|----------|-------------|-------------|"]
    for case in report.cases():
        rows = [r for r in report.records if r.case == case]
        mean_wall = statistics.mean(r.wall_s for r in rows)
        worst = max(r.max_rel_error for r in rows)
        lines.append(f"| {case} | {len(rows)} | {report.accuracy(case) * 100:.0f}% "
                     f"| {rows[0].elements} | {mean_wall:.3f} | {worst:.2e} |")
    lines.append("")
    return "\n".join(lines)
