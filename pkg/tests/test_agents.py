import json
import threading
from decimal import Decimal
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from frameforge.agents import (DeterministicBackend, FixtureTransport,
                               HttpTransport, ModelProfile, Orchestrator,
                               RecordingTransport, RoleBinding, TransportReply,
                               UsageLedger, compute_cost, deterministic_bindings,
                               invoke_remote, load_config, run_pipeline)
from frameforge.agents.prompts import load_template, render_prompt
from frameforge.agents.profiles import ROLES
from frameforge.agents.schemas import validate_role_output
from frameforge.errors import (AuthError, GeometryExhausted, PlanningExhausted,
                               RemoteTimeout, SchemaViolation, TransportError,
                               UnknownModel)
from frameforge.geometry import (check_geometry, elements_from_json,
                                 elements_to_json, nodes_from_json, nodes_to_json)
from frameforge.loads import loads_to_json, model_digest
from frameforge.planner import plan_to_json
from frameforge.problem import render_problem_template, spec_to_json

from conftest import make_spec

GPT = "gpt-oss-120b"
LLAMA = "llama-3.3-70b-instruct-turbo"


# --- cost accounting -----------------------------------------------------------

def ledger_with(gpt=(0, 0), llama=(0, 0)) -> UsageLedger:
    ledger = UsageLedger()
    ledger.add_call("problem_analysis", GPT, gpt[0], gpt[1], 0.0)
    ledger.add_call("load_assignment", LLAMA, llama[0], llama[1], 0.0)
    return ledger


def test_cost_smallest_benchmark_problem():
    ledger = ledger_with(gpt=(6867, 3394), llama=(8323, 3325))
    costs = compute_cost(ledger, {GPT: ModelProfile.make(GPT, "0.15", "0.60"),
                                  LLAMA: ModelProfile.make(LLAMA, "0.88", "0.88")})
    assert costs[GPT] == Decimal("0.00306645")
    assert costs[LLAMA] == Decimal("0.01025024")
    assert abs(costs["total"] - Decimal("0.0133")) <= Decimal("0.0005")


def test_cost_largest_benchmark_problem():
    ledger = ledger_with(gpt=(9645, 8333), llama=(13410, 5778))
    costs = compute_cost(ledger, {GPT: ModelProfile.make(GPT, "0.15", "0.60"),
                                  LLAMA: ModelProfile.make(LLAMA, "0.88", "0.88")})
    assert costs["total"] == Decimal("0.02333199")
    assert abs(costs["total"] - Decimal("0.0233")) <= Decimal("0.0005")


def test_cost_zero_tokens():
    costs = compute_cost(UsageLedger(), {})
    assert costs["total"] == Decimal(0)


def test_cost_unknown_model():
    ledger = UsageLedger()
    ledger.add_call("node", "mystery-model", 10, 10, 0.1)
    with pytest.raises(UnknownModel):
        compute_cost(ledger, {})


def test_ledger_additivity_and_monotonicity():
    ledger = UsageLedger()
    ledger.add_call("node", GPT, 100, 50, 0.1)
    ledger.add_call("element", GPT, 200, 70, 0.2)
    ledger.add_call("load_assignment", LLAMA, 30, 20, 0.1)
    per_role_in = sum(r.input_tokens for r in ledger.rows.values())
    per_role_out = sum(r.output_tokens for r in ledger.rows.values())
    assert ledger.total_tokens() == (per_role_in, per_role_out) == (330, 140)
    with pytest.raises(ValueError):
        ledger.add_call("node", GPT, -1, 0, 0.0)


# --- transports ------------------------------------------------------------------

class _Completions(BaseHTTPRequestHandler):
    def do_POST(self):
        body = json.loads(self.rfile.read(int(self.headers["Content-Length"])))
        model = body["model"]
        if model == "auth-fail":
            self.send_response(401)
            self.end_headers()
            return
        if model == "server-err":
            self.send_response(500)
            self.end_headers()
            self.wfile.write(b"boom")
            return
        reply = {
            "choices": [{"message": {"content": '{"echo": true}'}}],
            "usage": {"prompt_tokens": 42, "completion_tokens": 7},
        }
        data = json.dumps(reply).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture(scope="module")
def http_endpoint():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Completions)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_http_transport_roundtrip(http_endpoint):
    transport = HttpTransport(http_endpoint, api_key="k")
    reply = transport.send("node", "prompt", ModelProfile.make("m", "1", "1"))
    assert reply == TransportReply('{"echo": true}', 42, 7)


def test_http_transport_auth_error(http_endpoint):
    transport = HttpTransport(http_endpoint)
    with pytest.raises(AuthError):
        transport.send("node", "p", ModelProfile.make("auth-fail", "1", "1"))


def test_http_transport_server_error(http_endpoint):
    transport = HttpTransport(http_endpoint)
    with pytest.raises(TransportError):
        transport.send("node", "p", ModelProfile.make("server-err", "1", "1"))


class _FlakyTransport:
    def __init__(self, failures, exc=TransportError):
        self.failures = failures
        self.exc = exc
        self.calls = 0

    def send(self, role, prompt, profile):
        self.calls += 1
        if self.calls <= self.failures:
            raise self.exc("transient")
        return TransportReply("{}", 1, 1)


def test_invoke_remote_retries_transport_errors():
    transport = _FlakyTransport(failures=2)
    reply = invoke_remote(transport, "node", "p", ModelProfile.make("m", "1", "1"),
                          max_attempts=3, backoff_s=0.0)
    assert transport.calls == 3
    assert reply.input_tokens == 1


def test_invoke_remote_gives_up():
    transport = _FlakyTransport(failures=5)
    with pytest.raises(TransportError):
        invoke_remote(transport, "node", "p", ModelProfile.make("m", "1", "1"),
                      max_attempts=3, backoff_s=0.0)
    assert transport.calls == 3


def test_invoke_remote_timeout_not_retried():
    transport = _FlakyTransport(failures=5, exc=RemoteTimeout)
    with pytest.raises(RemoteTimeout):
        invoke_remote(transport, "node", "p", ModelProfile.make("m", "1", "1"),
                      max_attempts=3, backoff_s=0.0)
    assert transport.calls == 1


def test_recording_then_replaying(tmp_path):
    class Stub:
        def send(self, role, prompt, profile):
            return TransportReply('{"k": 1}', 11, 3)

    recorder = RecordingTransport(Stub(), tmp_path)
    first = recorder.send("node", "p", ModelProfile.make("m", "1", "1"))
    replayed = FixtureTransport(tmp_path).send("node", "p",
                                               ModelProfile.make("m", "1", "1"))
    assert first == replayed


def test_fixture_repeats_last_attempt(tmp_path):
    (tmp_path / "node_01.json").write_text(json.dumps({"text": "{}"}))
    transport = FixtureTransport(tmp_path)
    profile = ModelProfile.make("m", "1", "1")
    for _ in range(4):
        assert transport.send("node", "p", profile).text == "{}"


def test_fixture_error_files(tmp_path):
    (tmp_path / "node_01.json").write_text(json.dumps({"error": "timeout"}))
    with pytest.raises(RemoteTimeout):
        FixtureTransport(tmp_path).send("node", "p", ModelProfile.make("m", "1", "1"))


# --- prompts and schemas ----------------------------------------------------------

def test_templates_exist_and_render():
    for role in ROLES:
        template = load_template(role)
        assert "{payload}" in template
        rendered = render_prompt(role, {"probe": 123})
        assert '"probe": 123' in rendered
        assert "{payload}" not in rendered


def test_deterministic_outputs_pass_schemas(spec_323):
    backend = DeterministicBackend()
    text = render_problem_template(spec_323)
    doc = json.loads(backend.invoke("problem_analysis", {"text": text}).text)
    validate_role_output("problem_analysis", doc)
    plan_doc = json.loads(
        backend.invoke("construction_planning", {"problem": doc}).text)
    validate_role_output("construction_planning", plan_doc)
    payload = {"problem": doc, "plan": plan_doc}
    validate_role_output("node", json.loads(backend.invoke("node", payload).text))
    validate_role_output("element",
                         json.loads(backend.invoke("element", payload).text))


def test_schema_rejects_malformed_plan():
    with pytest.raises(SchemaViolation):
        validate_role_output("construction_planning",
                             {"Construction_steps": [{"Step_number": "one"}]})


# --- pipeline with fixtures (fault injection) ---------------------------------------

def remote_role_bindings(*roles):
    bindings = deterministic_bindings()
    for role in roles:
        bindings[role] = RoleBinding(backend="remote", model=GPT)
    return bindings


def pipeline_docs(spec):
    """Wire documents the deterministic backend would produce for `spec`."""
    pipe = run_pipeline(render_problem_template(spec))
    return pipe, {
        "problem_analysis": spec_to_json(pipe.spec),
        "construction_planning": plan_to_json(pipe.plan),
        "node": nodes_to_json(pipe.plan, list(pipe.graph.nodes)),
        "element": elements_to_json(pipe.plan, list(pipe.graph.elements)),
        "load_assignment": loads_to_json(pipe.model.loads),
        "geometry_translator": {"geometry_blocks": list(pipe.script.geometry_blocks)},
        "complete_generator": {"script": pipe.script.full_script},
    }


def write_fixture(tmp_path, role, attempt, doc, tokens=(1200, 800)):
    (tmp_path / f"{role}_{attempt:02d}.json").write_text(json.dumps(
        {"text": json.dumps(doc), "input_tokens": tokens[0],
         "output_tokens": tokens[1]}))


def corrupt_plan_with_extra_step(plan_doc):
    steps = [dict(s) for s in plan_doc["Construction_steps"]]
    extra = dict(steps[-1])
    extra["Step_number"] = len(steps) + 1
    return {"Construction_steps": steps + [extra]}


def corrupt_elements_with_duplicate(element_doc):
    doc = json.loads(json.dumps(element_doc))
    last = doc["Construction_steps"][-1]["Elements"]
    clone = dict(last[-1])
    clone["ID"] = 999
    last.append(clone)
    return doc


def corrupt_nodes_with_reset_x(node_doc):
    doc = json.loads(json.dumps(node_doc))
    for step in doc["Construction_steps"]:
        for node in step["Nodes"]:
            if node["x"] == 6.0 and node["y"] == 1.0:
                node["x"] = 0.0
                return doc
    raise AssertionError("expected a node at (6, 1)")


@pytest.fixture
def spec15():
    return make_spec([2, 3, 1, 4, 5], story_heights=[1.0] * 5)


def test_corrupted_docs_fail_the_right_checkpoint(spec15):
    _, docs = pipeline_docs(spec15)
    nodes = nodes_from_json(corrupt_nodes_with_reset_x(docs["node"]))
    elements = elements_from_json(docs["element"])
    assert "DuplicateNode" in check_geometry(nodes, elements).codes()

    nodes = nodes_from_json(docs["node"])
    elements = elements_from_json(corrupt_elements_with_duplicate(docs["element"]))
    assert "DuplicateElement" in check_geometry(nodes, elements).codes()


def test_duplicated_element_triggers_checkpoint_b_then_recovers(tmp_path, spec15):
    pipe, docs = pipeline_docs(spec15)
    write_fixture(tmp_path, "element", 1,
                  corrupt_elements_with_duplicate(docs["element"]))
    write_fixture(tmp_path, "element", 2, docs["element"])
    result = run_pipeline(render_problem_template(spec15),
                          bindings=remote_role_bindings("element"),
                          transport=FixtureTransport(tmp_path))
    assert result.retries_b == 1
    assert result.retries_a == 0
    assert model_digest(result.model) == model_digest(pipe.model)


def test_reset_x_duplicate_node_triggers_checkpoint_b(tmp_path, spec15):
    pipe, docs = pipeline_docs(spec15)
    write_fixture(tmp_path, "node", 1, corrupt_nodes_with_reset_x(docs["node"]))
    write_fixture(tmp_path, "node", 2, docs["node"])
    result = run_pipeline(render_problem_template(spec15),
                          bindings=remote_role_bindings("node"),
                          transport=FixtureTransport(tmp_path))
    assert result.retries_b == 1
    assert model_digest(result.model) == model_digest(pipe.model)


def test_redundant_plan_steps_recover_after_one_retry(tmp_path, spec15):
    pipe, docs = pipeline_docs(spec15)
    write_fixture(tmp_path, "construction_planning", 1,
                  corrupt_plan_with_extra_step(docs["construction_planning"]))
    write_fixture(tmp_path, "construction_planning", 2,
                  docs["construction_planning"])
    result = run_pipeline(render_problem_template(spec15),
                          bindings=remote_role_bindings("construction_planning"),
                          transport=FixtureTransport(tmp_path))
    assert result.retries_a == 1
    assert model_digest(result.model) == model_digest(pipe.model)


def test_redundant_plan_steps_exhaust_after_five_retries(tmp_path, spec15):
    _, docs = pipeline_docs(spec15)
    write_fixture(tmp_path, "construction_planning", 1,
                  corrupt_plan_with_extra_step(docs["construction_planning"]))
    transport = FixtureTransport(tmp_path)
    with pytest.raises(PlanningExhausted):
        run_pipeline(render_problem_template(spec15),
                     bindings=remote_role_bindings("construction_planning"),
                     transport=transport)
    assert transport._attempts["construction_planning"] == 6  # 1 + 5 retries


def test_geometry_retry_bound(tmp_path, spec15):
    _, docs = pipeline_docs(spec15)
    write_fixture(tmp_path, "node", 1, corrupt_nodes_with_reset_x(docs["node"]))
    transport = FixtureTransport(tmp_path)
    orch = Orchestrator(bindings=remote_role_bindings("node"), transport=transport)
    with pytest.raises(GeometryExhausted):
        orch.run(render_problem_template(spec15))
    assert transport._attempts["node"] == 6  # 1 + 5 regenerations
    # both roles regenerate together, whatever their backend
    assert orch.ledger.rows[("node", GPT)].retries == 5
    assert orch.ledger.rows[("element", "deterministic")].retries == 5


def test_schema_violation_counts_as_checkpoint_failure(tmp_path, spec15):
    pipe, docs = pipeline_docs(spec15)
    (tmp_path / "construction_planning_01.json").write_text(
        json.dumps({"text": "certainly! here is your plan:",
                    "input_tokens": 10, "output_tokens": 10}))
    write_fixture(tmp_path, "construction_planning", 2,
                  docs["construction_planning"])
    result = run_pipeline(render_problem_template(spec15),
                          bindings=remote_role_bindings("construction_planning"),
                          transport=FixtureTransport(tmp_path))
    assert result.retries_a == 1
    assert model_digest(result.model) == model_digest(pipe.model)


def test_schema_violation_downstream_raises(tmp_path, spec15):
    (tmp_path / "load_assignment_01.json").write_text(
        json.dumps({"text": "not json at all"}))
    with pytest.raises(SchemaViolation):
        run_pipeline(render_problem_template(spec15),
                     bindings=remote_role_bindings("load_assignment"),
                     transport=FixtureTransport(tmp_path))


def test_backend_interchangeability_full_replay(tmp_path, spec15):
    pipe, docs = pipeline_docs(spec15)
    for role, doc in docs.items():
        write_fixture(tmp_path, role, 1, doc)
    result = run_pipeline(render_problem_template(spec15),
                          bindings=remote_role_bindings(*ROLES),
                          transport=FixtureTransport(tmp_path))
    assert model_digest(result.model) == model_digest(pipe.model)
    assert result.script.digest == pipe.script.digest
    tokens_in, tokens_out = result.ledger.total_tokens()
    assert tokens_in == 7 * 1200 and tokens_out == 7 * 800
    assert pipe.ledger.total_tokens() == (0, 0)


def test_free_text_load_routes_to_remote_role(tmp_path, spec_323):
    """A load phrase outside the closed grammar fails deterministically but
    succeeds when the load-assignment role is bound to an agent that resolves
    it onto concrete members."""
    import dataclasses
    from frameforge.errors import UnresolvableSelector
    from frameforge.problem import LoadSpec

    free_text = dataclasses.replace(
        spec_323,
        loads=(LoadSpec(type="distributed", location="on every beam please",
                        direction="down", magnitude=10.0),
               spec_323.loads[1]))
    with pytest.raises(UnresolvableSelector):
        run_pipeline(free_text)

    # an equivalent closed-grammar spec yields the loads the agent should emit
    reference = run_pipeline(spec_323)
    write_fixture(tmp_path, "load_assignment", 1,
                  loads_to_json(reference.model.loads))
    routed = run_pipeline(free_text,
                          bindings=remote_role_bindings("load_assignment"),
                          transport=FixtureTransport(tmp_path))
    assert routed.model.loads == reference.model.loads
    assert routed.result.displacements == reference.result.displacements


def test_pipeline_accepts_parsed_spec(spec_323):
    from_text = run_pipeline(render_problem_template(spec_323))
    from_spec = run_pipeline(spec_323)
    assert model_digest(from_spec.model) == model_digest(from_text.model)
    assert from_spec.result.displacements == from_text.result.displacements


def test_remote_backend_requires_credentials(monkeypatch, spec_323):
    monkeypatch.delenv("FRAMEFORGE_API_URL", raising=False)
    bindings = deterministic_bindings()
    bindings["node"] = RoleBinding(backend="remote", model=GPT)
    with pytest.raises(TransportError):
        run_pipeline(spec_323, bindings=bindings)


def test_deterministic_run_zero_retries_zero_tokens(spec_323):
    pipe = run_pipeline(render_problem_template(spec_323))
    assert (pipe.retries_a, pipe.retries_b) == (0, 0)
    assert pipe.ledger.total_tokens() == (0, 0)
    assert pipe.checkpoint_a.passed and pipe.checkpoint_b.passed


def test_unknown_model_binding(spec_323):
    bindings = deterministic_bindings()
    bindings["node"] = RoleBinding(backend="remote", model="not-a-profile")

    class Stub:
        def send(self, role, prompt, profile):
            raise AssertionError("should not be reached")

    with pytest.raises(UnknownModel):
        run_pipeline(render_problem_template(spec_323), bindings=bindings,
                     transport=Stub())


def test_config_round_trip_toml_and_json(tmp_path):
    toml_text = """
retry_cap = 3

[profiles.tiny]
model = "tiny-model"
price_in = 0.1
price_out = 0.2
timeout_s = 60

[bindings.node]
backend = "remote"
model = "tiny"
"""
    toml_path = tmp_path / "pipeline.toml"
    toml_path.write_text(toml_text)
    cfg = load_config(toml_path)
    assert cfg.retry_cap == 3
    assert cfg.profiles["tiny"].model == "tiny-model"
    assert cfg.profiles["tiny"].price_out == Decimal("0.2")
    assert cfg.bindings["node"] == RoleBinding(backend="remote", model="tiny")
    assert cfg.bindings["element"].backend == "deterministic"

    json_path = tmp_path / "pipeline.json"
    json_path.write_text(json.dumps({
        "retry_cap": 3,
        "profiles": {"tiny": {"model": "tiny-model", "price_in": 0.1,
                              "price_out": 0.2, "timeout_s": 60}},
        "bindings": {"node": {"backend": "remote", "model": "tiny"}},
    }))
    cfg2 = load_config(json_path)
    assert cfg2.bindings["node"] == cfg.bindings["node"]
    assert cfg2.profiles["tiny"].price_in == cfg.profiles["tiny"].price_in


def test_pipeline_bitwise_repeatable(spec_23145_unit):
    text = render_problem_template(spec_23145_unit)
    a = run_pipeline(text)
    b = run_pipeline(text)
    assert model_digest(a.model) == model_digest(b.model)
    assert a.script.digest == b.script.digest
    assert a.result.displacements == b.result.displacements
