"""Direct stiffness analysis of 2D frames (internal ground-truth oracle).

Euler-Bernoulli elastic beam-column elements, 3 DOFs per node (ux, uy, rz)
ordered by node id. Uniform member loads become consistent equivalent nodal
loads (shear wL/2, moments +/- wL^2/12). Assembly runs in element-id order so
results are bitwise stable.

Internal-force diagrams use the sign pairing dM/dx == -V; with end forces
(fx_i, fy_i, m_i, fx_j, fy_j, m_j) in local axes and uniform intensity w:

    N(x) = -fx_i            (tension positive, constant)
    V(x) = -(fy_i + w x)
    M(x) = fy_i x + w x^2 / 2 - m_i   (sagging positive; M(L) == m_j)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalFailure, SingularSystem
from .geometry import COLUMN, ElementRecord
from .loads import LoadedModel

DEFAULT_STATIONS = 21


@dataclass(frozen=True)
class Diagram:
    stations: tuple[float, ...]  # distance along local x, m
    axial: tuple[float, ...]     # kN
    shear: tuple[float, ...]     # kN
    moment: tuple[float, ...]    # kN*m


@dataclass(frozen=True)
class AnalysisResult:
    displacements: dict[int, tuple[float, float, float]]  # ux m, uy m, rz rad
    reactions: dict[int, tuple[float, float, float]]      # fixed nodes only
    member_end_forces: dict[int, tuple[float, ...]]       # local (N,V,M)_i,(N,V,M)_j
    diagrams: dict[int, Diagram]


def _element_length(el: ElementRecord) -> float:
    dx = el.coord_j[0] - el.coord_i[0]
    dy = el.coord_j[1] - el.coord_i[1]
    return float(np.hypot(dx, dy))


def _section(model: LoadedModel, el: ElementRecord) -> tuple[float, float, float]:
    m = model.material
    if el.kind == COLUMN:
        return m.E, m.A_col, m.I_col
    return m.E, m.A_gir, m.I_gir


def _local_stiffness(E: float, A: float, I: float, L: float) -> np.ndarray:
    a = E * A / L
    b = 12.0 * E * I / L**3
    c = 6.0 * E * I / L**2
    d = 4.0 * E * I / L
    e = 2.0 * E * I / L
    return np.array([
        [ a,   0.0,  0.0, -a,   0.0,  0.0],
        [ 0.0,  b,    c,   0.0, -b,    c ],
        [ 0.0,  c,    d,   0.0, -c,    e ],
        [-a,   0.0,  0.0,  a,   0.0,  0.0],
        [ 0.0, -b,   -c,   0.0,  b,   -c ],
        [ 0.0,  c,    e,   0.0, -c,    d ],
    ])


def _transform(el: ElementRecord, L: float) -> np.ndarray:
    c = (el.coord_j[0] - el.coord_i[0]) / L
    s = (el.coord_j[1] - el.coord_i[1]) / L
    T = np.zeros((6, 6))
    for k in (0, 3):
        T[k, k] = c
        T[k, k + 1] = s
        T[k + 1, k] = -s
        T[k + 1, k + 1] = c
        T[k + 2, k + 2] = 1.0
    return T


def _equivalent_load(w: float, L: float) -> np.ndarray:
    """Consistent nodal loads of a uniform transverse load, local axes."""
    return np.array([0.0, w * L / 2.0, w * L**2 / 12.0,
                     0.0, w * L / 2.0, -w * L**2 / 12.0])


def _check_supported(model: LoadedModel) -> None:
    fixed = [n.id for n in model.graph.nodes if n.fixed]
    if not fixed:
        raise SingularSystem("no fixed supports")
    parent = {n.id: n.id for n in model.graph.nodes}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for el in model.graph.elements:
        parent[find(el.node_i)] = find(el.node_j)
    anchored = {find(i) for i in fixed}
    for n in model.graph.nodes:
        if find(n.id) not in anchored:
            raise SingularSystem(f"node {n.id} not connected to any support")


def _assemble(model: LoadedModel):
    nodes = sorted(model.graph.nodes, key=lambda n: n.id)
    pos = {n.id: i for i, n in enumerate(nodes)}
    ndof = 3 * len(nodes)

    member_w: dict[int, float] = {}
    for ml in model.loads.member:
        member_w[ml.element_id] = member_w.get(ml.element_id, 0.0) + ml.w

    K = np.zeros((ndof, ndof))
    F = np.zeros(ndof)
    cached = {}
    for el in model.graph.elements:  # element-id order fixes the summation order
        L = _element_length(el)
        E, A, I = _section(model, el)
        k_local = _local_stiffness(E, A, I, L)
        T = _transform(el, L)
        dofs = [3 * pos[el.node_i], 3 * pos[el.node_i] + 1, 3 * pos[el.node_i] + 2,
                3 * pos[el.node_j], 3 * pos[el.node_j] + 1, 3 * pos[el.node_j] + 2]
        K[np.ix_(dofs, dofs)] += T.T @ k_local @ T
        f_eq = _equivalent_load(member_w.get(el.id, 0.0), L)
        F[dofs] += T.T @ f_eq
        cached[el.id] = (L, k_local, T, f_eq, dofs)

    for nl in model.loads.nodal:
        base = 3 * pos[nl.node_id]
        F[base] += nl.fx
        F[base + 1] += nl.fy
        F[base + 2] += nl.mz
    return nodes, pos, K, F, cached


def assemble_system(model: LoadedModel) -> tuple[np.ndarray, np.ndarray]:
    """Global stiffness and load vector before support elimination."""
    _, _, K, F, _ = _assemble(model)
    return K, F


def solve_static(model: LoadedModel, stations: int = DEFAULT_STATIONS) -> AnalysisResult:
    """Assemble, apply supports, solve, and recover reactions and end forces."""
    _check_supported(model)
    nodes, pos, K, F, cached = _assemble(model)
    ndof = 3 * len(nodes)

    fixed_dofs = []
    for n in nodes:
        if n.fixed:
            fixed_dofs.extend((3 * pos[n.id], 3 * pos[n.id] + 1, 3 * pos[n.id] + 2))
    free = np.setdiff1d(np.arange(ndof), np.array(fixed_dofs, dtype=int))

    u = np.zeros(ndof)
    if free.size:
        try:
            chol = scipy.linalg.cho_factor(K[np.ix_(free, free)], lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise SingularSystem(str(exc)) from exc
        u[free] = scipy.linalg.cho_solve(chol, F[free])
    if not np.all(np.isfinite(u)):
        raise NumericalFailure("non-finite displacement solution")

    residual = K @ u - F
    displacements = {n.id: tuple(float(v) for v in u[3 * pos[n.id]: 3 * pos[n.id] + 3])
                     for n in nodes}
    reactions = {n.id: tuple(float(v) for v in residual[3 * pos[n.id]: 3 * pos[n.id] + 3])
                 for n in nodes if n.fixed}

    end_forces: dict[int, tuple[float, ...]] = {}
    for el in model.graph.elements:
        L, k_local, T, f_eq, dofs = cached[el.id]
        f_local = k_local @ (T @ u[dofs]) - f_eq
        if not np.all(np.isfinite(f_local)):
            raise NumericalFailure(f"non-finite end forces on element {el.id}")
        end_forces[el.id] = tuple(float(v) for v in f_local)

    result = AnalysisResult(displacements=displacements, reactions=reactions,
                            member_end_forces=end_forces, diagrams={})
    return AnalysisResult(displacements=displacements, reactions=reactions,
                          member_end_forces=end_forces,
                          diagrams=sample_diagrams(model, result, stations))


def sample_diagrams(model: LoadedModel, result: AnalysisResult,
                    stations: int = DEFAULT_STATIONS) -> dict[int, Diagram]:
    """Sample axial/shear/moment along each member at evenly spaced stations."""
    if stations < 2:
        raise ValueError("need at least 2 stations")
    member_w: dict[int, float] = {}
    for ml in model.loads.member:
        member_w[ml.element_id] = member_w.get(ml.element_id, 0.0) + ml.w

    out: dict[int, Diagram] = {}
    for el in model.graph.elements:
        L = _element_length(el)
        fx_i, fy_i, m_i = result.member_end_forces[el.id][:3]
        w = member_w.get(el.id, 0.0)
        xs = np.linspace(0.0, L, stations)
        axial = np.full_like(xs, -fx_i)
        shear = -(fy_i + w * xs)
        moment = fy_i * xs + w * xs**2 / 2.0 - m_i
        out[el.id] = Diagram(stations=tuple(float(x) for x in xs),
                             axial=tuple(float(v) for v in axial),
                             shear=tuple(float(v) for v in shear),
                             moment=tuple(float(v) for v in moment))
    return out


def equilibrium_residual(model: LoadedModel,
                         result: AnalysisResult) -> tuple[float, float, float]:
    """Sum of reactions, applied nodal loads and member-load equivalents.

    Returns (sum Fx, sum Fy, sum Mz about the origin); all three vanish for a
    correct solution.
    """
    coords = {n.id: (n.x, n.y) for n in model.graph.nodes}
    fx = fy = mz = 0.0

    def add(node_id, f):
        nonlocal fx, fy, mz
        x, y = coords[node_id]
        fx += f[0]
        fy += f[1]
        mz += f[2] + x * f[1] - y * f[0]

    for node_id, r in result.reactions.items():
        add(node_id, r)
    for nl in model.loads.nodal:
        add(nl.node_id, (nl.fx, nl.fy, nl.mz))
    member_w: dict[int, float] = {}
    for ml in model.loads.member:
        member_w[ml.element_id] = member_w.get(ml.element_id, 0.0) + ml.w
    for el in model.graph.elements:
        if el.id not in member_w:
            continue
        L = _element_length(el)
        f_global = _transform(el, L).T @ _equivalent_load(member_w[el.id], L)
        add(el.node_i, tuple(f_global[:3]))
        add(el.node_j, tuple(f_global[3:]))
    return fx, fy, mz


# ---------------------------------------------------------------------------
# Result wire format (shared with the external script runner)
# ---------------------------------------------------------------------------

def result_to_json(result: AnalysisResult) -> dict:
    return {
        "displacements": {str(k): list(v) for k, v in result.displacements.items()},
        "reactions": {str(k): list(v) for k, v in result.reactions.items()},
        "member_end_forces": {str(k): list(v)
                              for k, v in result.member_end_forces.items()},
        "diagrams": {
            str(k): {"stations": list(d.stations), "axial": list(d.axial),
                     "shear": list(d.shear), "moment": list(d.moment)}
            for k, d in result.diagrams.items()
        },
    }


def result_from_json(doc: dict) -> AnalysisResult:
    return AnalysisResult(
        displacements={int(k): tuple(v) for k, v in doc["displacements"].items()},
        reactions={int(k): tuple(v) for k, v in doc["reactions"].items()},
        member_end_forces={int(k): tuple(v)
                           for k, v in doc.get("member_end_forces", {}).items()},
        diagrams={
            int(k): Diagram(stations=tuple(d["stations"]), axial=tuple(d["axial"]),
                            shear=tuple(d["shear"]), moment=tuple(d["moment"]))
            for k, d in doc.get("diagrams", {}).items()
        },
    )
