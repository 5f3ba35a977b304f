#!/usr/bin/env python3
"""Render the six response views for one benchmark case.

Example:
    python scripts/render_case.py --case 2-3-1-4-5 --out views/
"""

import argparse
from pathlib import Path

from frameforge.bench import paper20_preset, scalability_preset
from frameforge.problem import render_problem_template
from frameforge.agents import run_pipeline
from frameforge.render import render_svg


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--case", default="2-3-1-4-5")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out", type=Path, default=Path("views"))
    args = parser.parse_args()

    cases = {c.name: c for c in paper20_preset(args.seed) + scalability_preset()}
    case = cases[args.case]
    pipe = run_pipeline(render_problem_template(case.to_problem_spec()))
    args.out.mkdir(parents=True, exist_ok=True)
    for view, doc in render_svg(pipe.model, pipe.result).items():
        path = args.out / f"{case.name}.{view}.svg"
        path.write_text(doc)
        print("wrote", path)


if __name__ == "__main__":
    main()
