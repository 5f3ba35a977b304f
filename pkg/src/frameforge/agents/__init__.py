from .backends import DeterministicBackend, RemoteBackend
from .config import PipelineConfig, bindings_for, load_config
from .orchestrator import Orchestrator, PipelineResult, RETRY_CAP, run_pipeline
from .profiles import (AgentRole, DEFAULT_PROFILES, ModelProfile, RoleBinding,
                       UsageLedger, compute_cost, deterministic_bindings,
                       remote_bindings)
from .transport import (FixtureTransport, HttpTransport, RecordingTransport,
                        TransportReply, invoke_remote)

__all__ = [
    "AgentRole", "DEFAULT_PROFILES", "DeterministicBackend", "FixtureTransport",
    "HttpTransport", "ModelProfile", "Orchestrator", "PipelineConfig",
    "PipelineResult", "RETRY_CAP", "RecordingTransport", "RemoteBackend",
    "RoleBinding", "TransportReply", "UsageLedger", "bindings_for",
    "compute_cost", "deterministic_bindings", "invoke_remote", "load_config",
    "remote_bindings", "run_pipeline",
]
