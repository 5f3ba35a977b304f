"""SVG views of a model and its response: geometry, loads, deformed shape,
and axial/shear/moment diagrams.

Plotting conventions (also in the README): the bending moment is drawn on the
tension side (sagging moments plot below a girder); axial and shear are drawn
on the local +y side of each member for positive values. The deformed shape
is auto-scaled so the largest nodal displacement renders as 10% of the
bounding-box diagonal; member curves use the element shape functions.
"""

from __future__ import annotations

import math

from .geometry import FrameGraph
from .loads import LoadedModel
from .solver import AnalysisResult

_VIEW_W = 800.0  # px target width of the frame itself


class _Canvas:
    """Collects SVG primitives in pixel space and tracks their extent."""

    def __init__(self):
        self.parts: list[str] = []
        self.min_x = self.min_y = math.inf
        self.max_x = self.max_y = -math.inf

    def _touch(self, x: float, y: float):
        self.min_x = min(self.min_x, x)
        self.max_x = max(self.max_x, x)
        self.min_y = min(self.min_y, y)
        self.max_y = max(self.max_y, y)

    def line(self, x1, y1, x2, y2, cls, width=2.0):
        self._touch(x1, y1)
        self._touch(x2, y2)
        self.parts.append(
            f'<line class="{cls}" x1="{x1:.2f}" y1="{y1:.2f}" '
            f'x2="{x2:.2f}" y2="{y2:.2f}" stroke-width="{width}" />')

    def circle(self, cx, cy, r, cls):
        self._touch(cx - r, cy - r)
        self._touch(cx + r, cy + r)
        self.parts.append(
            f'<circle class="{cls}" cx="{cx:.2f}" cy="{cy:.2f}" r="{r}" />')

    def polyline(self, points, cls, width=1.5):
        for x, y in points:
            self._touch(x, y)
        text = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(
            f'<polyline class="{cls}" points="{text}" fill="none" '
            f'stroke-width="{width}" />')

    def polygon(self, points, cls):
        for x, y in points:
            self._touch(x, y)
        text = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(f'<polygon class="{cls}" points="{text}" />')

    def render(self) -> str:
        margin = 12.0
        x0 = self.min_x - margin
        y0 = self.min_y - margin
        w = (self.max_x - self.min_x) + 2 * margin
        h = (self.max_y - self.min_y) + 2 * margin
        style = ("<style>"
                 ".member{stroke:#333}.node{fill:#1f5fa8}"
                 ".support{fill:#704214}.load-arrow{stroke:#c22}"
                 ".load-arrow-head{fill:#c22}.dist-load{stroke:#c22}"
                 ".deformed{stroke:#1f5fa8}.ghost{stroke:#bbb}"
                 ".diagram-axial{stroke:#2a7}.diagram-shear{stroke:#d81}"
                 ".diagram-moment{stroke:#92c}"
                 "</style>")
        body = "\n".join(self.parts)
        return (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'viewBox="{x0:.2f} {y0:.2f} {w:.2f} {h:.2f}">\n{style}\n{body}\n</svg>\n')


class _Mapper:
    """Model coordinates (m, y up) to pixel coordinates (y down)."""

    def __init__(self, graph: FrameGraph):
        xs = [n.x for n in graph.nodes]
        ys = [n.y for n in graph.nodes]
        self.x0, self.y0 = min(xs), min(ys)
        span_x = max(max(xs) - self.x0, 1e-6)
        span_y = max(max(ys) - self.y0, 1e-6)
        self.scale = _VIEW_W / max(span_x, span_y)
        self.height = span_y * self.scale
        self.diag = math.hypot(span_x, span_y) * self.scale

    def to_px(self, x: float, y: float) -> tuple[float, float]:
        return ((x - self.x0) * self.scale,
                self.height - (y - self.y0) * self.scale)


def _axes(el) -> tuple[float, float, float, float, float]:
    dx = el.coord_j[0] - el.coord_i[0]
    dy = el.coord_j[1] - el.coord_i[1]
    L = math.hypot(dx, dy)
    c, s = dx / L, dy / L
    return c, s, L, -s, c  # local x = (c, s), local y = (-s, c)


def _draw_members(canvas: _Canvas, graph: FrameGraph, mapper: _Mapper,
                  cls: str = "member"):
    for el in graph.elements:
        p1 = mapper.to_px(*el.coord_i)
        p2 = mapper.to_px(*el.coord_j)
        canvas.line(*p1, *p2, cls)


def _draw_nodes(canvas: _Canvas, graph: FrameGraph, mapper: _Mapper):
    for n in graph.nodes:
        cx, cy = mapper.to_px(n.x, n.y)
        canvas.circle(cx, cy, 3.5, "node")
        if n.fixed:
            canvas.polygon([(cx - 8, cy + 12), (cx + 8, cy + 12), (cx, cy)],
                           "support")


def _geometry_view(model: LoadedModel, mapper: _Mapper) -> str:
    canvas = _Canvas()
    _draw_members(canvas, model.graph, mapper)
    _draw_nodes(canvas, model.graph, mapper)
    return canvas.render()


def _loads_view(model: LoadedModel, mapper: _Mapper) -> str:
    canvas = _Canvas()
    _draw_members(canvas, model.graph, mapper, cls="ghost")
    _draw_nodes(canvas, model.graph, mapper)
    arrow = max(0.05 * mapper.diag, 24.0)

    for nl in model.loads.nodal:
        n = model.graph.node_by_id(nl.node_id)
        mag = math.hypot(nl.fx, nl.fy)
        if mag == 0:
            continue
        ux, uy = nl.fx / mag, nl.fy / mag
        tip = mapper.to_px(n.x, n.y)
        tail = (tip[0] - ux * arrow, tip[1] + uy * arrow)  # pixel y is flipped
        canvas.line(*tail, *tip, "load-arrow")
        left = (tip[0] - ux * 8 - uy * 4, tip[1] + uy * 8 - ux * 4)
        right = (tip[0] - ux * 8 + uy * 4, tip[1] + uy * 8 + ux * 4)
        canvas.polygon([tip, left, right], "load-arrow-head")

    loaded = {ml.element_id for ml in model.loads.member}
    for el in model.graph.elements:
        if el.id not in loaded:
            continue
        c, s, L, nx, ny = _axes(el)
        ticks = 7
        h = 0.025 * mapper.diag / mapper.scale  # hatch height in model units
        for k in range(ticks + 1):
            t = k / ticks
            bx = el.coord_i[0] + c * L * t
            by = el.coord_i[1] + s * L * t
            p1 = mapper.to_px(bx, by)
            p2 = mapper.to_px(bx + nx * h, by + ny * h)
            canvas.line(*p1, *p2, "dist-load", width=1.0)
        a = mapper.to_px(el.coord_i[0] + nx * h, el.coord_i[1] + ny * h)
        b = mapper.to_px(el.coord_j[0] + nx * h, el.coord_j[1] + ny * h)
        canvas.line(*a, *b, "dist-load", width=1.0)
    return canvas.render()


def _hermite(xi: float, L: float, v_i, th_i, v_j, th_j) -> float:
    n1 = 1 - 3 * xi**2 + 2 * xi**3
    n2 = L * (xi - 2 * xi**2 + xi**3)
    n3 = 3 * xi**2 - 2 * xi**3
    n4 = L * (xi**3 - xi**2)
    return n1 * v_i + n2 * th_i + n3 * v_j + n4 * th_j


def _deformed_view(model: LoadedModel, result: AnalysisResult,
                   mapper: _Mapper, samples: int = 21) -> str:
    canvas = _Canvas()
    _draw_members(canvas, model.graph, mapper, cls="ghost")
    max_disp = max((math.hypot(d[0], d[1]) for d in result.displacements.values()),
                   default=0.0)
    factor = 0.10 * mapper.diag / mapper.scale / max_disp if max_disp > 0 else 1.0

    for el in model.graph.elements:
        c, s, L, nx, ny = _axes(el)
        di = result.displacements[el.node_i]
        dj = result.displacements[el.node_j]
        # global end displacements to local axial/transverse components
        u_i, v_i = c * di[0] + s * di[1], -s * di[0] + c * di[1]
        u_j, v_j = c * dj[0] + s * dj[1], -s * dj[0] + c * dj[1]
        pts = []
        for k in range(samples):
            xi = k / (samples - 1)
            u_ax = u_i + (u_j - u_i) * xi
            v_tr = _hermite(xi, L, v_i, di[2], v_j, dj[2])
            gx = el.coord_i[0] + c * L * xi + factor * (c * u_ax + nx * v_tr)
            gy = el.coord_i[1] + s * L * xi + factor * (s * u_ax + ny * v_tr)
            pts.append(mapper.to_px(gx, gy))
        canvas.polyline(pts, "deformed")
    return canvas.render()


def _diagram_view(model: LoadedModel, result: AnalysisResult, which: str,
                  mapper: _Mapper) -> str:
    canvas = _Canvas()
    _draw_members(canvas, model.graph, mapper, cls="ghost")
    peak = max((max(abs(v) for v in getattr(d, which))
                for d in result.diagrams.values()), default=0.0)
    height = 0.08 * mapper.diag / mapper.scale  # model units at the peak value
    # moment on the tension side: positive (sagging) values plot along -local y
    sign = -1.0 if which == "moment" else 1.0
    scale = sign * height / peak if peak > 0 else 0.0

    for el in model.graph.elements:
        c, s, L, nx, ny = _axes(el)
        diagram = result.diagrams[el.id]
        values = getattr(diagram, which)
        pts = [mapper.to_px(*el.coord_i)]
        for x, v in zip(diagram.stations, values):
            gx = el.coord_i[0] + c * x + nx * v * scale
            gy = el.coord_i[1] + s * x + ny * v * scale
            pts.append(mapper.to_px(gx, gy))
        pts.append(mapper.to_px(*el.coord_j))
        canvas.polyline(pts, f"diagram-{which}")
    return canvas.render()


def render_svg(model: LoadedModel,
               result: AnalysisResult | None = None) -> dict[str, str]:
    """The named SVG documents; response views require an analysis result."""
    mapper = _Mapper(model.graph)
    views = {
        "geometry": _geometry_view(model, mapper),
        "loads": _loads_view(model, mapper),
    }
    if result is not None:
        views["deformed"] = _deformed_view(model, result, mapper)
        for which in ("axial", "shear", "moment"):
            views[which] = _diagram_view(model, result, which, mapper)
    return views
