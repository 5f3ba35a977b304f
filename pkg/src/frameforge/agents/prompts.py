"""Prompt template loading and rendering for the remote backend."""

from __future__ import annotations

import json
from importlib import resources

from .profiles import ROLES


def load_template(role: str) -> str:
    if role not in ROLES:
        raise KeyError(f"unknown role {role!r}")
    return (resources.files("frameforge.agents") / "prompts" / f"{role}.md").read_text()


def render_prompt(role: str, payload: dict) -> str:
    """Fill the role template with the serialized stage payload."""
    return load_template(role).replace("{payload}", json.dumps(payload, indent=2))
