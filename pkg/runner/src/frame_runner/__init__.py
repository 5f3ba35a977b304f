from .runner import (EngineMissing, RunnerError, RunRequest, ScriptError,
                     Timeout, compare_displacements, engine_available,
                     execute_script, validate_result_schema)

__version__ = "0.1.0"

__all__ = [
    "EngineMissing", "RunnerError", "RunRequest", "ScriptError", "Timeout",
    "compare_displacements", "engine_available", "execute_script",
    "validate_result_schema",
]
