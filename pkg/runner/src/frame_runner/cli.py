"""Command contract: frame-runner <script> <out.json> [--timeout S]."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .runner import (EngineMissing, RunnerError, RunRequest, Timeout,
                     execute_script)

EXIT_OK = 0
EXIT_ENGINE_MISSING = 3
EXIT_SCRIPT_ERROR = 4
EXIT_TIMEOUT = 5


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="frame-runner",
        description="Execute an emitted OpenSeesPy analysis script in an "
                    "isolated process and write its result JSON.")
    parser.add_argument("script", type=Path)
    parser.add_argument("output", type=Path)
    parser.add_argument("--timeout", type=float, default=120.0,
                        help="seconds before the engine process is killed")
    args = parser.parse_args(argv)

    request = RunRequest(script=args.script, output=args.output,
                         timeout_s=args.timeout)
    try:
        doc = execute_script(request)
    except RunnerError as exc:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(json.dumps(exc.record, indent=2))
        print(json.dumps(exc.record), file=sys.stderr)
        if isinstance(exc, EngineMissing):
            return EXIT_ENGINE_MISSING
        if isinstance(exc, Timeout):
            return EXIT_TIMEOUT
        return EXIT_SCRIPT_ERROR
    print(json.dumps({"ok": True, "output": str(args.output),
                      "nodes": len(doc["displacements"])}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
