"""Role backends: the deterministic rulebook and the remote chat-completion.

Both produce the same wire formats, so the orchestrator can bind any role to
either backend (or to a fixture transport replaying recorded outputs) without
downstream stages noticing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .. import codegen, geometry, loads, planner, problem
from ..errors import SchemaViolation
from .profiles import DETERMINISTIC, ModelProfile
from .prompts import render_prompt
from .transport import TransportReply, invoke_remote


@dataclass(frozen=True)
class RoleReply:
    text: str          # raw completion (JSON document)
    input_tokens: int
    output_tokens: int
    model: str


class DeterministicBackend:
    """Rulebook implementation of every role; zero tokens, no transport."""

    def invoke(self, role: str, payload: dict,
               profile: ModelProfile | None = None) -> RoleReply:
        doc = self._compute(role, payload)
        return RoleReply(text=json.dumps(doc), input_tokens=0, output_tokens=0,
                         model=DETERMINISTIC)

    def _compute(self, role: str, payload: dict) -> dict:
        if role == "problem_analysis":
            spec = problem.parse_problem_template(payload["text"])
            return problem.spec_to_json(spec)
        if role == "construction_planning":
            spec = problem.spec_from_json(payload["problem"])
            return planner.plan_to_json(planner.plan_construction(spec))
        if role in ("node", "element"):
            spec = problem.spec_from_json(payload["problem"])
            plan = planner.plan_from_json(payload["plan"],
                                          problem.spec_digest(spec))
            if role == "node":
                return geometry.nodes_to_json(plan, geometry.generate_nodes(spec, plan))
            return geometry.elements_to_json(plan, geometry.generate_elements(spec, plan))
        if role == "load_assignment":
            spec = problem.spec_from_json(payload["problem"])
            graph = geometry.graph_from_json(payload["graph"])
            return loads.loads_to_json(loads.assign_loads(spec, graph))
        if role == "geometry_translator":
            model = loads.model_from_json(payload["model"])
            return {"geometry_blocks": list(codegen.emit_geometry_code(model))}
        if role == "complete_generator":
            model = loads.model_from_json(payload["model"])
            blocks = tuple(payload["geometry_blocks"])
            return {"script": codegen.emit_full_script(model, blocks).full_script}
        raise KeyError(f"unknown role {role!r}")


_FENCED = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)


def extract_json(text: str) -> dict:
    """Parse a completion as JSON, tolerating a fenced code block wrapper."""
    candidate = text.strip()
    m = _FENCED.search(candidate)
    if m:
        candidate = m.group(1).strip()
    return json.loads(candidate)


class RemoteBackend:
    """Renders the role prompt, calls the transport, returns the raw reply."""

    def __init__(self, transport, max_attempts: int = 3, backoff_s: float = 0.5):
        self.transport = transport
        self.max_attempts = max_attempts
        self.backoff_s = backoff_s

    def invoke(self, role: str, payload: dict, profile: ModelProfile) -> RoleReply:
        prompt = render_prompt(role, payload)
        reply: TransportReply = invoke_remote(
            self.transport, role, prompt, profile,
            max_attempts=self.max_attempts, backoff_s=self.backoff_s)
        return RoleReply(text=reply.text, input_tokens=reply.input_tokens,
                         output_tokens=reply.output_tokens, model=profile.model)


def parse_role_reply(role: str, reply: RoleReply) -> dict:
    """JSON-decode a reply; a malformed document is a schema violation."""
    try:
        return extract_json(reply.text)
    except (json.JSONDecodeError, ValueError) as exc:
        raise SchemaViolation(role, f"not valid JSON: {exc}") from exc
