"""Model profiles, per-role usage accounting and cost computation."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from decimal import Decimal

from ..errors import UnknownModel

DETERMINISTIC = "deterministic"

ROLES = ("problem_analysis", "construction_planning", "node", "element",
         "load_assignment", "geometry_translator", "complete_generator")

# Roles doing semantic reasoning vs information mapping/translation.
REASONING_ROLES = ("problem_analysis", "construction_planning", "node", "element")
MAPPING_ROLES = ("load_assignment", "geometry_translator", "complete_generator")


@dataclass(frozen=True)
class ModelProfile:
    model: str              # remote model identifier
    price_in: Decimal       # USD per 1e6 input tokens
    price_out: Decimal      # USD per 1e6 output tokens
    timeout_s: float = 300.0

    @classmethod
    def make(cls, model: str, price_in, price_out, timeout_s: float = 300.0):
        return cls(model=model, price_in=Decimal(str(price_in)),
                   price_out=Decimal(str(price_out)), timeout_s=timeout_s)


# Together AI list prices used in the runtime/cost analysis.
DEFAULT_PROFILES = {
    "gpt-oss-120b": ModelProfile.make("gpt-oss-120b", "0.15", "0.60"),
    "llama-3.3-70b-instruct-turbo":
        ModelProfile.make("llama-3.3-70b-instruct-turbo", "0.88", "0.88"),
}


@dataclass(frozen=True)
class RoleBinding:
    backend: str            # deterministic | remote
    model: str | None = None  # profile key for the remote backend


@dataclass(frozen=True)
class AgentRole:
    name: str
    binding: RoleBinding


def deterministic_bindings() -> dict[str, RoleBinding]:
    return {role: RoleBinding(backend=DETERMINISTIC) for role in ROLES}


def remote_bindings() -> dict[str, RoleBinding]:
    """Default role-to-model split: reasoning vs instruction-following."""
    out = {}
    for role in REASONING_ROLES:
        out[role] = RoleBinding(backend="remote", model="gpt-oss-120b")
    for role in MAPPING_ROLES:
        out[role] = RoleBinding(backend="remote", model="llama-3.3-70b-instruct-turbo")
    return out


@dataclass
class UsageRow:
    input_tokens: int = 0
    output_tokens: int = 0
    seconds: float = 0.0
    retries: int = 0


@dataclass
class UsageLedger:
    """Monotone per-(role, model) counters; safe under concurrent role calls."""
    rows: dict[tuple[str, str], UsageRow] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def add_call(self, role: str, model: str, input_tokens: int,
                 output_tokens: int, seconds: float) -> None:
        if input_tokens < 0 or output_tokens < 0 or seconds < 0:
            raise ValueError("ledger counters only ever increase")
        with self._lock:
            row = self.rows.setdefault((role, model), UsageRow())
            row.input_tokens += input_tokens
            row.output_tokens += output_tokens
            row.seconds += seconds

    def add_retry(self, role: str, model: str) -> None:
        with self._lock:
            self.rows.setdefault((role, model), UsageRow()).retries += 1

    def per_model(self) -> dict[str, tuple[int, int]]:
        out: dict[str, list[int]] = {}
        for (_, model), row in self.rows.items():
            acc = out.setdefault(model, [0, 0])
            acc[0] += row.input_tokens
            acc[1] += row.output_tokens
        return {m: (a, b) for m, (a, b) in out.items()}

    def total_tokens(self) -> tuple[int, int]:
        per = self.per_model()
        return (sum(v[0] for v in per.values()), sum(v[1] for v in per.values()))

    def total_retries(self) -> int:
        return sum(row.retries for row in self.rows.values())

    def to_json(self) -> dict:
        return {
            "rows": [
                {"role": role, "model": model,
                 "input_tokens": row.input_tokens, "output_tokens": row.output_tokens,
                 "seconds": row.seconds, "retries": row.retries}
                for (role, model), row in sorted(self.rows.items())
            ]
        }


def compute_cost(ledger: UsageLedger,
                 profiles: dict[str, ModelProfile]) -> dict[str, Decimal]:
    """Exact decimal cost per model plus 'total' (USD)."""
    per_million = Decimal(1_000_000)
    costs: dict[str, Decimal] = {}
    total = Decimal(0)
    for model, (tokens_in, tokens_out) in sorted(ledger.per_model().items()):
        if model == DETERMINISTIC:
            continue
        if model not in profiles:
            if tokens_in == 0 and tokens_out == 0:
                continue
            raise UnknownModel(model)
        p = profiles[model]
        cost = (tokens_in * p.price_in + tokens_out * p.price_out) / per_million
        costs[model] = cost
        total += cost
    costs["total"] = total
    return costs
