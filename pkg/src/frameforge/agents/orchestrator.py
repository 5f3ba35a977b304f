"""Pipeline orchestration: role invocation, checkpoints A/B, bounded retries.

Stage order follows the architecture: problem analysis -> construction
planning (checkpoint A), node + element roles in parallel -> connectivity
mapping (checkpoint B), load assignment -> model compilation, two-stage code
translation, then the internal static solve. Checkpoint failures regenerate
the stage's roles, at most ``retry_cap`` times, so later stages only ever see
checkpoint-passing artifacts.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..checkpoint import CheckpointReport
from ..codegen import ScriptArtifact, lint_script
from ..errors import (FrameForgeError, GeometryExhausted, PlanningExhausted,
                      SchemaViolation, UnknownModel)
from ..geometry import (FrameGraph, build_graph, check_geometry, elements_from_json,
                        graph_to_json, map_connectivity, nodes_from_json)
from ..loads import LoadedModel, compile_model, loads_from_json, model_to_json
from ..planner import ConstructionPlan, check_plan, plan_from_json
from ..problem import (ProblemSpec, spec_digest, spec_from_json, spec_to_json,
                       validate_problem)
from ..solver import AnalysisResult, solve_static
from .backends import DeterministicBackend, RemoteBackend, parse_role_reply
from .profiles import (DETERMINISTIC, DEFAULT_PROFILES, ModelProfile, RoleBinding,
                       UsageLedger, deterministic_bindings)
from .schemas import validate_role_output
from .transport import HttpTransport

RETRY_CAP = 5  # regenerations per checkpoint, after the initial attempt


@dataclass
class PipelineResult:
    spec: ProblemSpec
    plan: ConstructionPlan
    graph: FrameGraph
    model: LoadedModel
    script: ScriptArtifact
    result: AnalysisResult
    ledger: UsageLedger
    checkpoint_a: CheckpointReport
    checkpoint_b: CheckpointReport
    retries_a: int
    retries_b: int


class _CheckpointFailed(FrameForgeError):
    def __init__(self, report_or_detail):
        self.detail = report_or_detail
        super().__init__(str(report_or_detail))


class Orchestrator:
    def __init__(self, bindings: dict[str, RoleBinding] | None = None,
                 profiles: dict[str, ModelProfile] | None = None,
                 transport=None, retry_cap: int = RETRY_CAP):
        self.bindings = bindings or deterministic_bindings()
        self.profiles = profiles or dict(DEFAULT_PROFILES)
        self.retry_cap = retry_cap
        self.ledger = UsageLedger()
        self._deterministic = DeterministicBackend()
        needs_remote = any(b.backend != DETERMINISTIC for b in self.bindings.values())
        if needs_remote and transport is None:
            transport = HttpTransport.from_env()
        self._remote = RemoteBackend(transport) if transport is not None else None

    # -- role plumbing ------------------------------------------------------

    def _model_of(self, role: str) -> str:
        binding = self.bindings[role]
        return DETERMINISTIC if binding.backend == DETERMINISTIC else binding.model

    def invoke_role(self, role: str, payload: dict) -> dict:
        binding = self.bindings[role]
        started = time.perf_counter()
        if binding.backend == DETERMINISTIC:
            reply = self._deterministic.invoke(role, payload)
        else:
            if binding.model not in self.profiles:
                raise UnknownModel(binding.model or "<unbound>")
            reply = self._remote.invoke(role, payload, self.profiles[binding.model])
        elapsed = time.perf_counter() - started
        self.ledger.add_call(role, reply.model, reply.input_tokens,
                             reply.output_tokens, elapsed)
        doc = parse_role_reply(role, reply)
        validate_role_output(role, doc)
        return doc

    def _count_retry(self, *roles: str) -> None:
        for role in roles:
            self.ledger.add_retry(role, self._model_of(role))

    # -- stages ----------------------------------------------------------------

    def _stage_analysis_planning(self, source):
        from_text = not isinstance(source, ProblemSpec)
        retries = 0
        while True:
            try:
                if from_text:
                    spec_doc = self.invoke_role("problem_analysis", {"text": source})
                    spec = spec_from_json(spec_doc)
                    violations = validate_problem(spec)
                    if violations:
                        raise _CheckpointFailed(
                            "; ".join(f"{v.code}: {v.message}" for v in violations))
                else:
                    spec, spec_doc = source, spec_to_json(source)
                plan_doc = self.invoke_role("construction_planning",
                                            {"problem": spec_doc})
                plan = plan_from_json(plan_doc, spec_digest(spec))
                rep = check_plan(spec, plan)
                if rep.passed:
                    return spec, spec_doc, plan, plan_doc, rep, retries
                failure = "; ".join(f.code for f in rep.failures)
            except (SchemaViolation, _CheckpointFailed) as exc:
                failure = str(exc)
            if retries >= self.retry_cap:
                raise PlanningExhausted(
                    f"checkpoint A failing after {self.retry_cap} retries: {failure}")
            retries += 1
            self._count_retry(*(("problem_analysis", "construction_planning")
                                if from_text else ("construction_planning",)))

    def _stage_geometry(self, spec_doc: dict, plan_doc: dict):
        payload = {"problem": spec_doc, "plan": plan_doc}
        retries = 0
        while True:
            failure = None
            try:
                # node and element roles run concurrently and are joined
                # before mapping; join order is fixed for determinism
                with ThreadPoolExecutor(max_workers=2) as pool:
                    node_future = pool.submit(self.invoke_role, "node", payload)
                    element_future = pool.submit(self.invoke_role, "element", payload)
                    node_doc = node_future.result()
                    element_doc = element_future.result()
                nodes = nodes_from_json(node_doc)
                elements = elements_from_json(element_doc)
                rep = check_geometry(nodes, elements)
                if rep.passed:
                    resolved = map_connectivity(nodes, elements)
                    return build_graph(nodes, resolved), rep, retries
                failure = "; ".join(f.code for f in rep.failures)
            except SchemaViolation as exc:
                failure = str(exc)
            if retries >= self.retry_cap:
                raise GeometryExhausted(
                    f"checkpoint B failing after {self.retry_cap} retries: {failure}")
            retries += 1
            self._count_retry("node", "element")

    def _stage_codegen(self, model: LoadedModel) -> ScriptArtifact:
        model_doc = model_to_json(model)
        geo_doc = self.invoke_role("geometry_translator", {"model": model_doc})
        blocks = tuple(geo_doc["geometry_blocks"])
        script_doc = self.invoke_role("complete_generator",
                                      {"model": model_doc,
                                       "geometry_blocks": list(blocks)})
        script = script_doc["script"]
        at = 0
        for block in blocks:
            found = script.find(block, at)
            if found < 0:
                raise SchemaViolation("complete_generator",
                                      "geometry blocks not embedded verbatim in order")
            at = found + len(block)
        issues = lint_script(script)
        if issues:
            raise SchemaViolation("complete_generator", "; ".join(issues[:5]))
        return ScriptArtifact(
            geometry_blocks=blocks, full_script=script,
            digest=hashlib.sha256(script.encode("utf-8")).hexdigest())

    def run_planning(self, source):
        """Analysis + planning stage only (checkpoint A enforced)."""
        spec, _, plan, _, rep, retries = self._stage_analysis_planning(source)
        return spec, plan, rep, retries

    def run(self, source, stations: int = 21) -> PipelineResult:
        spec, spec_doc, plan, plan_doc, rep_a, retries_a = \
            self._stage_analysis_planning(source)
        graph, rep_b, retries_b = self._stage_geometry(spec_doc, plan_doc)
        load_doc = self.invoke_role("load_assignment",
                                    {"problem": spec_doc,
                                     "graph": graph_to_json(graph)})
        resolved = loads_from_json(load_doc)
        model = compile_model(spec, graph, resolved)
        script = self._stage_codegen(model)
        result = solve_static(model, stations=stations)
        return PipelineResult(spec=spec, plan=plan, graph=graph, model=model,
                              script=script, result=result, ledger=self.ledger,
                              checkpoint_a=rep_a, checkpoint_b=rep_b,
                              retries_a=retries_a, retries_b=retries_b)


def run_pipeline(source, *, bindings=None, profiles=None, transport=None,
                 retry_cap: int = RETRY_CAP, stations: int = 21) -> PipelineResult:
    """Run the full pipeline on template text or an already-parsed spec."""
    orch = Orchestrator(bindings=bindings, profiles=profiles,
                        transport=transport, retry_cap=retry_cap)
    return orch.run(source, stations=stations)
