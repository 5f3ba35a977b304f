"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside the pytest verdicts.
"""

import random
import time
from contextlib import contextmanager
from decimal import Decimal

import pytest

from frameforge.agents import (FixtureTransport, ModelProfile, UsageLedger,
                               compute_cost, run_pipeline)
from frameforge.bench import paper20_preset, run_case, scalability_preset
from frameforge.cli import main
from frameforge.errors import GeometryExhausted, PlanningExhausted
from frameforge.geometry import (COLUMN, GIRDER, ElementRecord, NodeRecord,
                                 check_geometry, elements_from_json,
                                 generate_elements, generate_nodes,
                                 nodes_from_json)
from frameforge.loads import MemberLoad, NodalLoad, model_digest
from frameforge.planner import check_plan, plan_construction
from frameforge.problem import DEFAULT_MATERIAL, render_problem_template
from frameforge.solver import equilibrium_residual, solve_static

from conftest import make_spec
from oracles import line_sweep_counts, line_sweep_frame
from test_agents import (GPT, corrupt_elements_with_duplicate,
                         corrupt_nodes_with_reset_x, corrupt_plan_with_extra_step,
                         pipeline_docs, remote_role_bindings, write_fixture)
from test_solver import manual_model, split_element


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL")
        raise
    print(f"[ACCEPTANCE] {name}: PASS")


def all_bench_cases():
    return paper20_preset(seed=7) + scalability_preset()


def test_deterministic_end_to_end():
    with criterion("deterministic end-to-end (paper20 + scalability)"):
        started = time.perf_counter()
        for case in all_bench_cases():
            record, pipe = run_case(case)
            assert record.passed, case.name
            assert (pipe.retries_a, pipe.retries_b) == (0, 0), case.name
            assert pipe.checkpoint_a.passed and pipe.checkpoint_b.passed

            # pipeline analysis vs the internal oracle: same code path, exact
            oracle = solve_static(pipe.model)
            assert pipe.result.displacements == oracle.displacements
            assert pipe.result.reactions == oracle.reactions

            # count laws from the line-sweep oracle
            spec = case.to_problem_spec()
            law = line_sweep_counts(spec)
            columns = sum(1 for e in pipe.graph.elements if e.kind == COLUMN)
            girders = sum(1 for e in pipe.graph.elements if e.kind == GIRDER)
            assert len(pipe.graph.nodes) == law["nodes"], case.name
            assert columns == law["columns"], case.name
            assert girders == law["girders"], case.name
            node_set, column_set, girder_set = line_sweep_frame(spec)
            assert {(n.x, n.y) for n in pipe.graph.nodes} == node_set
        elapsed = time.perf_counter() - started
        print(f"  23 cases in {elapsed:.2f}s")
        assert elapsed < 30.0  # expectation is <10s on a laptop


def test_solver_correctness():
    with criterion("solver correctness (analytic + equilibrium + mesh split)"):
        mat = DEFAULT_MATERIAL
        # cantilever tip response within 1e-9 relative of PL^3/3EI
        L, P = 4.0, 12.0
        nodes = [NodeRecord(1, 0.0, 0.0, True), NodeRecord(2, 0.0, L, False)]
        column = ElementRecord(1, COLUMN, (0.0, 0.0), (0.0, L), node_i=1, node_j=2)
        model = manual_model(nodes, [column], nodal=[NodalLoad(2, P, 0.0, 0.0)])
        result = solve_static(model)
        EI = mat.E * mat.I_col
        assert result.displacements[2][0] == pytest.approx(P * L**3 / (3 * EI),
                                                           rel=1e-9)
        assert abs(result.displacements[2][2]) == pytest.approx(
            P * L**2 / (2 * EI), rel=1e-9)

        # fixed-fixed UDL end moment within 1e-9 of wL^2/12
        L, w = 6.0, -10.0
        nodes = [NodeRecord(1, 0.0, 0.0, True), NodeRecord(2, L, 0.0, True)]
        girder = ElementRecord(1, GIRDER, (0.0, 0.0), (L, 0.0), node_i=1, node_j=2)
        beam = manual_model(nodes, [girder], member=[MemberLoad(1, w)])
        forces = solve_static(beam).member_end_forces[1]
        assert abs(forces[2]) == pytest.approx(abs(w) * L**2 / 12, rel=1e-9)
        assert abs(forces[5]) == pytest.approx(abs(w) * L**2 / 12, rel=1e-9)

        # global equilibrium residual < 1e-8 relative on every bench case
        for case in all_bench_cases():
            _, pipe = run_case(case)
            total = sum(abs(nl.fx) + abs(nl.fy) for nl in pipe.model.loads.nodal) \
                + sum(abs(ml.w) * 6.0 for ml in pipe.model.loads.member)
            span = max(n.x for n in pipe.graph.nodes) + \
                max(n.y for n in pipe.graph.nodes)
            fx, fy, mz = equilibrium_residual(pipe.model, pipe.result)
            assert abs(fx) < 1e-8 * total, case.name
            assert abs(fy) < 1e-8 * total, case.name
            assert abs(mz) < 1e-8 * total * span, case.name

        # member-split mesh independence within 1e-9 relative
        _, pipe = run_case(all_bench_cases()[9])  # the 3-2-3 frame
        loaded_girder = pipe.model.loads.member[0].element_id
        refined = solve_static(split_element(pipe.model, loaded_girder))
        for node_id, disp in pipe.result.displacements.items():
            for a, b in zip(disp, refined.displacements[node_id]):
                assert abs(a - b) <= max(1e-9 * abs(a), 1e-12)


def test_cost_accounting_reproduces_reported_totals():
    with criterion("cost accounting ($0.0133 and $0.0233 per problem)"):
        profiles = {GPT: ModelProfile.make(GPT, "0.15", "0.60"),
                    "llama-3.3-70b-instruct-turbo":
                        ModelProfile.make("llama-3.3-70b-instruct-turbo",
                                          "0.88", "0.88")}

        def cost_for(gpt, llama):
            ledger = UsageLedger()
            ledger.add_call("problem_analysis", GPT, gpt[0], gpt[1], 0.0)
            ledger.add_call("load_assignment", "llama-3.3-70b-instruct-turbo",
                            llama[0], llama[1], 0.0)
            return compute_cost(ledger, profiles)["total"]

        low = cost_for((6867, 3394), (8323, 3325))    # the 3-2-3 frame
        high = cost_for((9645, 8333), (13410, 5778))  # the 3-4-5-4-3 frame
        assert abs(low - Decimal("0.0133")) <= Decimal("0.0005")
        assert abs(high - Decimal("0.0233")) <= Decimal("0.0005")
        for total in (low, high):
            rounded = total.quantize(Decimal("0.001"))
            assert Decimal("0.013") <= rounded <= Decimal("0.023")
        print(f"  low={low} high={high}")


def test_checkpoint_fault_injection(tmp_path):
    with criterion("checkpoint fault injection (three hallucination patterns)"):
        spec = make_spec([2, 3, 1, 4, 5], story_heights=[1.0] * 5)
        text = render_problem_template(spec)
        baseline, docs = pipeline_docs(spec)

        # pattern 1: duplicated element -> checkpoint B, recovery on retry 1
        d1 = tmp_path / "dup-element"
        d1.mkdir()
        write_fixture(d1, "element", 1,
                      corrupt_elements_with_duplicate(docs["element"]))
        write_fixture(d1, "element", 2, docs["element"])
        run1 = run_pipeline(text, bindings=remote_role_bindings("element"),
                            transport=FixtureTransport(d1))
        assert run1.retries_b == 1 and run1.retries_a == 0
        assert model_digest(run1.model) == model_digest(baseline.model)
        bad_elements = elements_from_json(
            corrupt_elements_with_duplicate(docs["element"]))
        codes = check_geometry(nodes_from_json(docs["node"]), bad_elements).codes()
        assert "DuplicateElement" in codes

        # pattern 2: redundant planning steps -> checkpoint A; exhaustion at 5
        d2 = tmp_path / "plan-redundant"
        d2.mkdir()
        write_fixture(d2, "construction_planning", 1,
                      corrupt_plan_with_extra_step(docs["construction_planning"]))
        transport = FixtureTransport(d2)
        with pytest.raises(PlanningExhausted):
            run_pipeline(text,
                         bindings=remote_role_bindings("construction_planning"),
                         transport=transport)
        assert transport._attempts["construction_planning"] == 6  # 1 + 5 retries
        write_fixture(d2, "construction_planning", 2,
                      docs["construction_planning"])
        run2 = run_pipeline(text,
                            bindings=remote_role_bindings("construction_planning"),
                            transport=FixtureTransport(d2))
        assert run2.retries_a == 1
        assert model_digest(run2.model) == model_digest(baseline.model)

        # pattern 3: reset x-coordinate duplicating a node -> checkpoint B
        d3 = tmp_path / "reset-x"
        d3.mkdir()
        write_fixture(d3, "node", 1, corrupt_nodes_with_reset_x(docs["node"]))
        write_fixture(d3, "node", 2, docs["node"])
        run3 = run_pipeline(text, bindings=remote_role_bindings("node"),
                            transport=FixtureTransport(d3))
        assert run3.retries_b == 1
        assert model_digest(run3.model) == model_digest(baseline.model)
        bad_nodes = nodes_from_json(corrupt_nodes_with_reset_x(docs["node"]))
        codes = check_geometry(bad_nodes,
                               elements_from_json(docs["element"])).codes()
        assert "DuplicateNode" in codes

        # the retry bound holds for geometry regeneration too
        d4 = tmp_path / "never-right"
        d4.mkdir()
        write_fixture(d4, "node", 1, corrupt_nodes_with_reset_x(docs["node"]))
        transport = FixtureTransport(d4)
        with pytest.raises(GeometryExhausted):
            run_pipeline(text, bindings=remote_role_bindings("node"),
                         transport=transport)
        assert transport._attempts["node"] == 6


def test_bench_determinism(tmp_path):
    with criterion("bench determinism (byte-identical reports and scripts)"):
        outs = []
        for run in ("a", "b"):
            out = tmp_path / run
            code = main(["bench", "--preset", "paper20", "--trials", "1",
                         "--seed", "7", "--backend", "deterministic",
                         "--out", str(out)])
            assert code == 0
            outs.append(out)
        first, second = outs
        assert (first / "bench.csv").read_bytes() == \
            (second / "bench.csv").read_bytes()
        scripts_a = sorted((first / "scripts").iterdir())
        scripts_b = sorted((second / "scripts").iterdir())
        assert [p.name for p in scripts_a] == [p.name for p in scripts_b]
        assert len(scripts_a) == 20
        for pa, pb in zip(scripts_a, scripts_b):
            assert pa.read_bytes() == pb.read_bytes()


def test_plan_and_geometry_properties_thousand_specs():
    with criterion("plan/step-type properties over 1,000 seeded random specs"):
        rng = random.Random(20260810)
        for _ in range(1000):
            n_bays = rng.randint(1, 5)
            counts = [rng.randint(1, 5) for _ in range(n_bays)]
            heights = [float(rng.randint(1, 5)) for _ in range(max(counts))]
            spec = make_spec(counts, story_heights=heights)
            plan = plan_construction(spec)
            assert check_plan(spec, plan).passed
            types = [s.step_type for s in plan.steps]
            assert types.count(1) == 1
            assert types.count(3) == spec.total_bays - 1
            assert len(types) == spec.total_stories
            nodes = generate_nodes(spec, plan)
            elements = generate_elements(spec, plan)
            assert check_geometry(nodes, elements).passed
