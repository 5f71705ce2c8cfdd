"""Compile lowered extrusion records into executable UI action programs.

The compiler mirrors the simulator's observable state (view transform, cursor,
tool, dialog focus) using the *decoded* values of the actions it emits, so
quantization can never push a later click off its target.  Layout constants,
key vocabulary, and dialog tab orders live in uiprotocol and are shared with
the simulator verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .actions import (
    ActionProgram,
    click,
    decode_action,
    encode_action,
    move_to,
    press_key,
    scroll,
    type_value,
)
from .errors import UnsupportedGeometry
from .geometry import ArcGeom, CircleGeom, LineGeom, check_loop_closed
from .kernel import build_region
from .sequences import CadSequence
from . import geometry
from .uiprotocol import (
    EXTRUDE_DIALOG_FIELDS,
    NAV_ARROW_FOR_PLANE,
    PLANE_TOOL_BUTTON,
    TOOL_KEYS,
    VIEWPORT,
    ViewTransform,
    direction_arrow_rect,
    tree_row_rect,
)

SMALL_FEATURE_EXTENT = 0.02   # zoom-in trigger
ZOOM_TARGET_SPAN = 0.08       # wanted on-screen span for the smallest feature
MAX_ZOOM = 6.0


@dataclass
class CompileConfig:
    delays: bool = True
    jitter: bool = True
    zoom: bool = True
    visibility_toggles: bool = True


class _Emitter:
    """Appends actions while tracking the simulator-visible state."""

    def __init__(self, cfg: CompileConfig, rng: np.random.Generator):
        self.prog = ActionProgram()
        self.cfg = cfg
        self.rng = rng
        self.view = ViewTransform()
        self.cursor = (0.5, 0.5)
        self.tool: str | None = None
        self.shift = False
        self.pending_hl: str | None = None

    def _dt(self) -> float:
        return float(self.rng.uniform(0.2, 0.5)) if self.cfg.delays else 0.2

    def _append(self, action, hl: str | None = None) -> None:
        if hl is None and self.pending_hl is not None:
            hl = self.pending_hl
        self.pending_hl = None
        self.prog.append(action, hl)

    def move(self, screen: tuple[float, float], hl: str | None = None) -> None:
        if not (0.0 <= screen[0] <= 1.0 and 0.0 <= screen[1] <= 1.0):
            raise UnsupportedGeometry(f"target {screen} off screen")
        a = move_to(screen[0], screen[1], dt=self._dt())
        d = decode_action(encode_action(a))
        self.cursor = (d.x, d.y)
        self._append(a)

    def click(self, hl: str | None = None) -> None:
        self._append(click(dt=self._dt()), hl)

    def key(self, name: str, count: int = 1, hl: str | None = None) -> None:
        self._append(press_key(name, count=count, dt=self._dt()), hl)
        if name == "shift_down":
            self.shift = True
        elif name == "shift_up":
            self.shift = False

    def combo(self, name: str, hl: str | None = None) -> None:
        self.key("shift_down")
        self.key(name)
        self.key("shift_up", hl=hl)

    def type_val(self, value: float, hl: str | None = None) -> None:
        self._append(type_value(value, dt=self._dt()), hl)

    def scroll_step(self, amount: float) -> None:
        a = scroll(amount, dt=self._dt())
        d = decode_action(encode_action(a))
        self._append(a)
        self.view.scroll_at(self.cursor, d.scroll)

    def canvas_click(self, canvas_pt: tuple[float, float], hl: str | None = None) -> None:
        screen = self.view.canvas_to_screen(canvas_pt)
        if not VIEWPORT.contains(screen):
            raise UnsupportedGeometry(f"canvas point {canvas_pt} outside the viewport")
        self.move(screen)
        self.click(hl)

    def rect_click(self, rect, hl: str | None = None) -> None:
        target = rect.sample(self.rng) if self.cfg.jitter else rect.center
        self.move(target)
        self.click(hl)

    def set_tool(self, kind: str) -> None:
        if self.tool == kind:
            return
        if self.tool is not None:
            self.key("escape")
        self.key(TOOL_KEYS[kind])
        self.tool = kind

    def drop_tool(self) -> None:
        if self.tool is not None:
            self.key("escape")
            self.tool = None


def _primitive_extent(prim) -> float:
    if isinstance(prim, LineGeom):
        return math.dist(prim.start, prim.end)
    if isinstance(prim, CircleGeom):
        return 2.0 * prim.radius
    chord = math.dist(prim.start, prim.end)
    sagitta = prim.radius - math.dist(
        prim.center, ((prim.start[0] + prim.end[0]) / 2, (prim.start[1] + prim.end[1]) / 2))
    return min(chord, max(2.0 * abs(sagitta), 1e-6))


def _loop_bbox(prims) -> tuple[float, float, float, float]:
    xs, ys = [], []
    for p in prims:
        if isinstance(p, CircleGeom):
            xs += [p.center[0] - p.radius, p.center[0] + p.radius]
            ys += [p.center[1] - p.radius, p.center[1] + p.radius]
        else:
            for pt in (p.start, p.end) + ((p.mid,) if isinstance(p, ArcGeom) else ()):
                xs.append(pt[0])
                ys.append(pt[1])
    return min(xs), min(ys), max(xs), max(ys)


def _dist_to_edges(pt: np.ndarray, edges: np.ndarray) -> float:
    a = edges[:, 0:2]
    b = edges[:, 2:4]
    ab = b - a
    denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-30)
    t = np.clip(((pt - a) * ab).sum(axis=1) / denom, 0.0, 1.0)
    proj = a + t[:, None] * ab
    return float(np.min(np.linalg.norm(proj - pt, axis=1)))


def _face_interior_points(geom, rng, jitter: bool) -> list[tuple[float, float]]:
    """One inset interior point per even-depth (material) loop, canvas coords."""
    region = build_region(geom, axis=2, offset=0.0, canvas_shift=0.0)
    edges = region.edges()
    local_rng = rng if jitter else np.random.default_rng(0)
    points = []
    for idx, loop in enumerate(region.loops):
        if loop.depth % 2 != 0:
            continue
        x0, y0 = loop.pts.min(axis=0)
        x1, y1 = loop.pts.max(axis=0)
        inset = 0.1 * min(x1 - x0, y1 - y0)
        best, best_d = None, -1.0
        found = None
        for shrink in (1.0, 0.5, 0.25, 0.0):
            for _ in range(80):
                p = np.array([x0 + local_rng.random() * (x1 - x0),
                              y0 + local_rng.random() * (y1 - y0)])
                if not region.contains_2d(p[None, :])[0]:
                    continue
                d = _dist_to_edges(p, edges)
                if d > best_d:
                    best, best_d = p, d
                if d >= inset * shrink:
                    found = p
                    break
            if found is not None:
                break
        chosen = found if found is not None else best
        if chosen is None:
            raise UnsupportedGeometry(f"no interior point for loop {idx}")
        points.append((float(chosen[0]), float(chosen[1])))
    return points


def _draw_loop(em: _Emitter, prims, loop_index: int) -> None:
    em.pending_hl = "loop_begin"
    is_circle = len(prims) == 1 and isinstance(prims[0], CircleGeom)

    zoom_steps = 0
    anchor_screen = None
    if em.cfg.zoom:
        min_extent = min(_primitive_extent(p) for p in prims)
        x0, y0, x1, y1 = _loop_bbox(prims)
        if min_extent < SMALL_FEATURE_EXTENT:
            anchor = ((x0 + x1) / 2, (y0 + y1) / 2)
            a_sx, a_sy = em.view.canvas_to_screen(anchor)
            margin = 0.01
            # Anchored zoom keeps the anchor fixed; cap the factor so the
            # whole loop bbox stays inside the viewport.
            caps = [MAX_ZOOM, ZOOM_TARGET_SPAN / max(min_extent, 1e-4)]
            vw, vh = VIEWPORT.x1 - VIEWPORT.x0, VIEWPORT.y1 - VIEWPORT.y0
            for half, avail_lo, avail_hi, vsize in (
                ((x1 - x0) / 2, a_sx - VIEWPORT.x0 - margin, VIEWPORT.x1 - margin - a_sx, vw),
                ((y1 - y0) / 2, a_sy - VIEWPORT.y0 - margin, VIEWPORT.y1 - margin - a_sy, vh),
            ):
                if half > 1e-9:
                    caps.append(min(avail_lo, avail_hi) / (vsize * half))
            target = min(caps)
            if target > 1.2:
                step_factor = 0.1 * 0.999  # decoded Scroll(1.0)
                zoom_steps = int(math.ceil(math.log(target) / step_factor))
                em.move((a_sx, a_sy))
                anchor_screen = em.cursor
                for _ in range(zoom_steps):
                    em.scroll_step(1.0)

    if is_circle:
        c = prims[0]
        em.set_tool("circle")
        em.canvas_click(c.center)
        rim = None
        for d in ((c.radius, 0.0), (-c.radius, 0.0), (0.0, c.radius), (0.0, -c.radius)):
            cand = (c.center[0] + d[0], c.center[1] + d[1])
            s = em.view.canvas_to_screen(cand)
            if 0.002 <= s[0] <= 0.998 and 0.002 <= s[1] <= 0.998:
                rim = cand
                break
        if rim is None:
            raise UnsupportedGeometry("circle rim point off screen")
        em.canvas_click(rim, hl="primitive_circle")
    else:
        for i, prim in enumerate(prims):
            want = "arc" if isinstance(prim, ArcGeom) else "line"
            if em.tool != want and em.shift:
                em.key("shift_up")  # tool hotkeys are plain keys, not combos
            em.set_tool(want)
            if not em.shift:
                em.key("shift_down")
            closing = i == len(prims) - 1
            if isinstance(prim, LineGeom):
                em.canvas_click(prim.start)
                if closing:
                    em.key("shift_up")
                em.canvas_click(prim.end, hl="primitive_line")
            else:
                em.canvas_click(prim.start)
                if closing:
                    em.key("shift_up")
                em.canvas_click(prim.end)
                em.canvas_click(prim.mid, hl="primitive_arc")
        if em.shift:
            em.key("shift_up")

    if zoom_steps:
        em.move(anchor_screen)
        for _ in range(zoom_steps):
            em.scroll_step(-1.0)


def _extrude_dialog(em: _Emitter, params) -> None:
    em.combo("e")  # Shift+E opens the dialog; focus starts before the fields
    focus = -1

    def tab_to(field: str) -> None:
        nonlocal focus
        target = EXTRUDE_DIALOG_FIELDS.index(field)
        steps = (target - focus) % len(EXTRUDE_DIALOG_FIELDS)
        if steps:
            em.key("tab", count=steps)
            focus = target

    tab_to("type_selector")
    presses = {"new": 0, "remove": 1, "union": 2}[params.op]
    if presses:
        em.key("space", count=presses)
    tab_to("depth_field")
    em.type_val(params.e1)
    if params.sides == "two_sided":
        tab_to("depth2_field")
        em.type_val(params.e2)
    elif params.sides == "symmetric":
        tab_to("symmetric_box")
        em.key("space")
    if params.op == "remove":
        tab_to("merge_box")
        em.key("space")
    em.key("enter", hl="extrude")


def compile_record(basis, geom, params, em: _Emitter, custom_rows: int) -> int:
    """Emit the full UI bundle for one record; returns updated custom-row count."""
    # (a) plane creation, only for offset planes
    if basis.offset != 0.0:
        em.rect_click(PLANE_TOOL_BUTTON)
        em.rect_click(tree_row_rect(basis.plane_id))
        em.key("tab")  # -> offset field
        em.type_val(abs(basis.offset))
        em.rect_click(direction_arrow_rect(basis.offset > 0))
        em.key("enter", hl="plane_create")
        row = 3 + custom_rows
        custom_rows += 1
    else:
        row = basis.plane_id

    # (b) navigate to the sketch plane's view
    em.key("shift_down")
    em.key("plus")
    em.key(NAV_ARROW_FOR_PLANE[basis.plane_id])
    em.key("shift_up")

    # (c) open a sketch on the plane
    em.combo("s")
    em.rect_click(tree_row_rect(row), hl="sketch_begin")

    # (d) draw the loops
    for li, prims in enumerate(geom.loops):
        _draw_loop(em, prims, li)
    em.drop_tool()

    # (e) select regions and extrude
    for pt in _face_interior_points(geom, em.rng, em.cfg.jitter):
        em.canvas_click(pt)
    _extrude_dialog(em, params)
    return custom_rows


def compile_sequence(seq: CadSequence, cfg: CompileConfig | None = None,
                     seed: int = 0) -> ActionProgram:
    """Lower every record and emit the concatenated program plus the EOS combo."""
    cfg = cfg or CompileConfig()
    rng = np.random.default_rng(seed)
    em = _Emitter(cfg, rng)
    custom_rows = 0
    for ri, rec in enumerate(seq.records):
        basis, geom, params = geometry.lower_record(rec)
        for prims in geom.loops:
            if not (len(prims) == 1 and isinstance(prims[0], CircleGeom)):
                check_loop_closed(list(prims))
        if cfg.visibility_toggles and ri > 0:
            em.key("y")  # hide parts while sketching over them
        custom_rows = compile_record(basis, geom, params, em, custom_rows)
        if cfg.visibility_toggles:
            if ri == 0:
                em.combo("h")  # hide finished sketches
            else:
                em.combo("y")  # show parts again
    if cfg.visibility_toggles:
        em.combo("p")  # hide planes before the final view
    em.combo("seven", hl="eos")
    return em.prog
