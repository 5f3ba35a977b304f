"""frameforge: textual 2D frame descriptions to validated structural models,
executable analysis scripts, linear-elastic results and response diagrams."""

from .agents import run_pipeline
from .bench import BenchCase, paper20_preset, preset, scalability_preset, score_trial
from .codegen import emit_full_script, emit_geometry_code, lint_script
from .geometry import (check_geometry, generate_elements, generate_nodes,
                       map_connectivity)
from .loads import assign_loads, compile_model
from .planner import check_plan, classify_step_type, plan_construction
from .problem import (ProblemSpec, parse_problem_template,
                      render_problem_template, validate_problem)
from .render import render_svg
from .solver import sample_diagrams, solve_static

__version__ = "0.1.0"

__all__ = [
    "BenchCase", "ProblemSpec", "assign_loads", "check_geometry", "check_plan",
    "classify_step_type", "compile_model", "emit_full_script",
    "emit_geometry_code", "generate_elements", "generate_nodes", "lint_script",
    "map_connectivity", "paper20_preset", "parse_problem_template",
    "plan_construction", "preset", "render_problem_template", "render_svg",
    "run_pipeline", "sample_diagrams", "scalability_preset", "score_trial",
    "solve_static", "validate_problem",
]
