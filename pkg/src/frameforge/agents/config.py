"""Pipeline configuration files (TOML or JSON): bindings, profiles, caps."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - version dependent
    import tomli as tomllib

from .orchestrator import RETRY_CAP
from .profiles import (DEFAULT_PROFILES, REASONING_ROLES, ModelProfile,
                       RoleBinding, deterministic_bindings, remote_bindings)


@dataclass
class PipelineConfig:
    bindings: dict[str, RoleBinding] = field(default_factory=deterministic_bindings)
    profiles: dict[str, ModelProfile] = field(default_factory=lambda: dict(DEFAULT_PROFILES))
    retry_cap: int = RETRY_CAP


def _parse(doc: dict) -> PipelineConfig:
    cfg = PipelineConfig()
    if "retry_cap" in doc:
        cfg.retry_cap = int(doc["retry_cap"])
    for key, p in doc.get("profiles", {}).items():
        cfg.profiles[key] = ModelProfile.make(
            p.get("model", key), p["price_in"], p["price_out"],
            float(p.get("timeout_s", 300.0)))
    for role, b in doc.get("bindings", {}).items():
        cfg.bindings[role] = RoleBinding(backend=b["backend"], model=b.get("model"))
    return cfg


def load_config(path) -> PipelineConfig:
    path = Path(path)
    if path.suffix == ".toml":
        doc = tomllib.loads(path.read_text())
    else:
        doc = json.loads(path.read_text())
    return _parse(doc)


def bindings_for(backend: str) -> dict[str, RoleBinding]:
    """CLI shorthand.

    deterministic: every role on the rulebook backend.
    remote: every role on the chat backend with the default two-model split.
    mixed: reasoning roles remote, mapping/translation roles deterministic.
    """
    if backend == "deterministic":
        return deterministic_bindings()
    if backend == "remote":
        return remote_bindings()
    if backend == "mixed":
        bindings = deterministic_bindings()
        bindings.update({role: binding for role, binding in remote_bindings().items()
                         if role in REASONING_ROLES})
        return bindings
    raise ValueError(f"unknown backend {backend!r}")
