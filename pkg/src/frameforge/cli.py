"""Command-line surface: run, plan, validate, codegen, solve, render, bench."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .agents import Orchestrator, bindings_for, load_config
from .bench import preset, run_bench
from .errors import FrameForgeError
from .loads import model_to_json
from .planner import plan_to_json
from .problem import parse_problem_template, spec_to_json, validate_problem
from .render import render_svg
from .solver import result_to_json


def _add_common(parser):
    parser.add_argument("--backend", choices=("deterministic", "remote", "mixed"),
                        default="deterministic")
    parser.add_argument("--config", type=Path, default=None)
    parser.add_argument("--out", type=Path, default=Path("."))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frameforge",
        description="Text description of a 2D frame in; validated model, "
                    "analysis script, results and diagrams out.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("run", "plan", "validate", "codegen", "solve", "render"):
        p = sub.add_parser(name)
        p.add_argument("input", type=Path, help="problem template text file")
        _add_common(p)

    b = sub.add_parser("bench")
    b.add_argument("--preset", default="paper20",
                   choices=("paper20", "scalability"))
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--seed", type=int, default=7)
    _add_common(b)
    return parser


def _orchestrator(args) -> Orchestrator:
    cfg = load_config(args.config) if args.config else None
    bindings = cfg.bindings if cfg else bindings_for(args.backend)
    profiles = cfg.profiles if cfg else None
    retry_cap = cfg.retry_cap if cfg else 5
    return Orchestrator(bindings=bindings, profiles=profiles, retry_cap=retry_cap)


def _run_pipeline_cmd(args):
    text = args.input.read_text()
    pipe = _orchestrator(args).run(text)
    args.out.mkdir(parents=True, exist_ok=True)
    stem = args.input.stem
    written = []

    def write(name: str, content: str):
        path = args.out / name
        path.write_text(content)
        written.append(str(path))

    if args.command in ("run", "codegen"):
        write(f"{stem}.model.json", json.dumps(model_to_json(pipe.model), indent=2))
        write(f"{stem}.ops.py", pipe.script.full_script)
    if args.command in ("run", "solve"):
        write(f"{stem}.result.json", json.dumps(result_to_json(pipe.result), indent=2))
    if args.command in ("run", "render"):
        for view, doc in render_svg(pipe.model, pipe.result).items():
            write(f"{stem}.{view}.svg", doc)
    print(json.dumps({"ok": True, "files": written,
                      "retries": [pipe.retries_a, pipe.retries_b]}))
    return 0


def _plan_cmd(args):
    spec = parse_problem_template(args.input.read_text())
    _, plan, report, _ = _orchestrator(args).run_planning(spec)
    print(json.dumps(plan_to_json(plan), indent=2))
    return 0 if report.passed else 3


def _validate_cmd(args):
    spec = parse_problem_template(args.input.read_text())
    violations = validate_problem(spec)  # parse already enforces; belt and braces
    print(json.dumps({"valid": not violations,
                      "violations": [{"code": v.code, "message": v.message}
                                     for v in violations],
                      "problem": spec_to_json(spec)}, indent=2))
    return 0 if not violations else 3


def _bench_cmd(args):
    cases = preset(args.preset, seed=args.seed)
    cfg = load_config(args.config) if args.config else None
    bindings = cfg.bindings if cfg else bindings_for(args.backend)
    profiles = cfg.profiles if cfg else None
    args.out.mkdir(parents=True, exist_ok=True)
    report = run_bench(cases, trials=args.trials, out_dir=args.out,
                       bindings=bindings, profiles=profiles)
    ok = all(r.passed for r in report.records)
    print(json.dumps({"ok": ok, "cases": len(report.cases()),
                      "trials": len(report.records),
                      "accuracy": {c: report.accuracy(c) for c in report.cases()}},
                     indent=2))
    return 0 if ok else 4


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            return _bench_cmd(args)
        if args.command == "plan":
            return _plan_cmd(args)
        if args.command == "validate":
            return _validate_cmd(args)
        return _run_pipeline_cmd(args)
    except FrameForgeError as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
