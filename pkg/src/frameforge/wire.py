"""Canonical JSON encoding and content digests for pipeline artifacts."""

import hashlib
import json


def canonical_json(obj) -> str:
    """Stable, compact encoding; float repr round-trips exactly in Python."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()
