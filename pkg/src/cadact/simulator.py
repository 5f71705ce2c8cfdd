"""Deterministic headless stand-in for the browser CAD UI.

Consumes 7-field action vectors, maintains UI state (tool, focus, buffers,
view) plus an event-sourced document, renders one grayscale keyframe per
action, and terminates an episode after three consecutive ineffective actions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernel
from .actions import (
    CMD_CLICK,
    CMD_MOVETO,
    CMD_PRESSKEY,
    CMD_SCROLL,
    CMD_TYPE,
    ActionProgram,
    decode_action,
    encode_action,
)
from .errors import CadactError
from .geometry import ArcGeom, CircleGeom, ExtrudeParams, LineGeom, SketchGeom
from .pgm import pgm_bytes
from .uiprotocol import (
    DIALOG_PANEL,
    EDGE_HIT_RADIUS,
    EXTRUDE_DIALOG_FIELDS,
    KEYS,
    PLANE_DIALOG_FIELDS,
    PLANE_TOOL_BUTTON,
    Rect,
    TOOLBAR,
    TREE_PANEL,
    VIEWPORT,
    ViewTransform,
    dialog_field_rect,
    direction_arrow_rect,
    tree_row_rect,
)

EPS_CHAIN = 1e-6
MAX_CONSECUTIVE_FAILURES = 3

_ARROW_TO_PLANE = {"arrow_right": 0, "arrow_down": 1, "arrow_up": 2}
_TOOL_FOR_KEY = {"l": "line", "c": "circle", "a": "arc"}
_TOOL_ARITY = {"line": 2, "circle": 2, "arc": 3}

_TEXT_FIELDS = {"offset_field", "depth_field", "depth2_field"}


@dataclass
class SimConfig:
    frame_px: int = 224


@dataclass
class Dialog:
    kind: str                       # "plane" | "extrude"
    focus: int = -1                 # index into the field order, -1 = none
    text_buffer: str = ""
    base_plane: int | None = None   # plane dialog
    direction: float = 1.0
    values: dict = field(default_factory=dict)

    @property
    def fields(self) -> tuple[str, ...]:
        return PLANE_DIALOG_FIELDS if self.kind == "plane" else EXTRUDE_DIALOG_FIELDS


@dataclass
class SketchState:
    axis: int
    plane_w: float
    row: int
    loops: list[tuple] = field(default_factory=list)       # completed primitive chains
    polylines: list[np.ndarray] = field(default_factory=list)
    chains: list[list] = field(default_factory=list)        # open chains
    version: int = 0


@dataclass
class DocState:
    features: list = field(default_factory=list)
    solid: kernel.Solid | None = None
    version: int = 0


@dataclass
class SimState:
    cfg: SimConfig
    cursor: tuple[float, float] = (0.5, 0.5)
    view: ViewTransform = field(default_factory=ViewTransform)
    tool: str | None = None
    shift_held: bool = False
    nav_armed: bool = False
    sketch_pending: bool = False
    dialog: Dialog | None = None
    sketch: SketchState | None = None
    pending_clicks: list[tuple[float, float]] = field(default_factory=list)
    selection: set = field(default_factory=set)
    camera: object = "iso"          # "iso" | plane axis int
    planes_visible: bool = True
    sketches_visible: bool = True
    parts_visible: bool = True
    custom_planes: list[tuple[int, float]] = field(default_factory=list)
    retry_count: int = 0
    doc: DocState = field(default_factory=DocState)
    commits: list[tuple[str, bool, bool]] = field(default_factory=list)
    # (kind, shift_held, closed_a_loop) commit log for invariant checks


def initial_state(cfg: SimConfig | None = None) -> SimState:
    return SimState(cfg=cfg or SimConfig())


# --- geometry from clicks ------------------------------------------------------

def _circumcircle(a, b, c):
    d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
    if abs(d) < 1e-12:
        return None
    a2, b2, c2 = a[0] ** 2 + a[1] ** 2, b[0] ** 2 + b[1] ** 2, c[0] ** 2 + c[1] ** 2
    ux = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d
    uy = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d
    return (ux, uy)


def _arc_from_clicks(start, end, mid) -> ArcGeom | None:
    center = _circumcircle(start, end, mid)
    if center is None:
        return None
    r = math.dist(center, start)

    def ang(p):
        return math.atan2(p[1] - center[1], p[0] - center[0])

    d_se = (ang(end) - ang(start)) % (2 * math.pi)
    d_sm = (ang(mid) - ang(start)) % (2 * math.pi)
    sweep = d_se if d_sm <= d_se else 2 * math.pi - d_se
    vx, vy = end[0] - start[0], end[1] - start[1]
    chord = ((start[0] + end[0]) / 2, (start[1] + end[1]) / 2)
    side = (center[0] - chord[0]) * (-vy) + (center[1] - chord[1]) * vx
    return ArcGeom(start=start, end=end, center=center, mid=mid, radius=r,
                   sweep_deg=math.degrees(sweep), flag=1 if side > 0 else 0)


def _commit_primitive(st: SimState, prim) -> list[str]:
    """Attach a committed primitive to the sketch's loop chains."""
    sk = st.sketch
    closed = False
    if isinstance(prim, CircleGeom):
        sk.loops.append((prim,))
        sk.polylines.append(kernel._loop_polyline((prim,), kernel.TAU_TESS))
        closed = True
    else:
        target = None
        for chain in sk.chains:
            if math.dist(chain[-1].end, prim.start) <= EPS_CHAIN:
                target = chain
                break
        if target is None:
            target = []
            sk.chains.append(target)
        target.append(prim)
        if len(target) >= 2 and math.dist(prim.end, target[0].start) <= EPS_CHAIN:
            loop = tuple(target)
            sk.loops.append(loop)
            sk.polylines.append(kernel._loop_polyline(loop, kernel.TAU_TESS))
            sk.chains.remove(target)
            closed = True
    sk.version += 1
    st.commits.append((prim.kind, st.shift_held, closed))
    return ["commit"]


# --- hit testing -----------------------------------------------------------------

def _loop_depths(sk: SketchState) -> list[int]:
    depths = []
    for i, poly in enumerate(sk.polylines):
        d = 0
        for j, other in enumerate(sk.polylines):
            if i == j:
                continue
            edges = np.hstack([other, np.roll(other, -1, axis=0)])
            if kernel._even_odd(poly[:1], edges)[0]:
                d += 1
        depths.append(d)
    return depths


def _face_at(sk: SketchState, pt: np.ndarray) -> int | None:
    containing = []
    for i, poly in enumerate(sk.polylines):
        edges = np.hstack([poly, np.roll(poly, -1, axis=0)])
        if kernel._even_odd(pt[None, :], edges)[0]:
            containing.append(i)
    if len(containing) % 2 == 0:
        return None
    depths = _loop_depths(sk)
    return max(containing, key=lambda i: depths[i])


def _edge_at(sk: SketchState, pt: np.ndarray, radius: float) -> tuple[int, int] | None:
    best = None
    for i, poly in enumerate(sk.polylines):
        nxt = np.roll(poly, -1, axis=0)
        ab = nxt - poly
        denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-30)
        t = np.clip(((pt - poly) * ab).sum(axis=1) / denom, 0.0, 1.0)
        proj = poly + t[:, None] * ab
        dists = np.linalg.norm(proj - pt, axis=1)
        j = int(np.argmin(dists))
        if dists[j] <= radius and (best is None or dists[j] < best[0]):
            best = (float(dists[j]), (i, j))
    return best[1] if best else None


# --- dialog handling ---------------------------------------------------------------

def _commit_buffer(dlg: Dialog) -> None:
    if dlg.focus < 0 or not dlg.text_buffer:
        return
    name = dlg.fields[dlg.focus]
    if name in _TEXT_FIELDS:
        try:
            dlg.values[name] = float(dlg.text_buffer)
        except ValueError:
            pass
    dlg.text_buffer = ""


def _finalize_plane(st: SimState) -> list[str]:
    dlg = st.dialog
    st.dialog = None
    if dlg.base_plane is None or "offset_field" not in dlg.values:
        return ["invalid"]
    offset = dlg.direction * abs(dlg.values["offset_field"])
    st.custom_planes.append((dlg.base_plane, offset))
    st.doc.features.append({"kind": "plane", "base": dlg.base_plane, "offset": offset})
    st.doc.version += 1
    return ["plane_created"]


def _selected_geometry(st: SimState) -> SketchGeom | None:
    sk = st.sketch
    faces = sorted(s[1] for s in st.selection if s[0] == "face")
    if not faces:
        return None
    included = set(faces)
    for j, poly in enumerate(sk.polylines):
        if j in included:
            continue
        for i in faces:
            other = sk.polylines[i]
            edges = np.hstack([other, np.roll(other, -1, axis=0)])
            if kernel._even_odd(poly[:1], edges)[0]:
                included.add(j)
                break
    return SketchGeom(loops=tuple(sk.loops[i] for i in sorted(included)))


def _finalize_extrude(st: SimState) -> list[str]:
    dlg = st.dialog
    st.dialog = None
    sk = st.sketch
    geom = _selected_geometry(st)
    st.selection.clear()
    st.tool = None
    st.pending_clicks.clear()
    if sk is None or geom is None or "depth_field" not in dlg.values:
        st.sketch = None
        return ["invalid"]
    op = dlg.values.get("type_selector", "new")
    if dlg.values.get("symmetric_box"):
        sides = "symmetric"
    elif "depth2_field" in dlg.values:
        sides = "two_sided"
    else:
        sides = "one_sided"
    params = ExtrudeParams(
        e1=dlg.values["depth_field"],
        e2=dlg.values.get("depth2_field", 0.0),
        op=op, sides=sides, scale_s=1.0,
    )
    st.sketch = None
    try:
        region = kernel.build_region(geom, axis=sk.axis, offset=sk.plane_w)
        st.doc.solid = kernel.extrude(st.doc.solid, region, params, sk.plane_w)
    except CadactError:
        return ["invalid"]
    st.doc.features.append({
        "kind": "extrude", "axis": sk.axis, "plane_w": sk.plane_w,
        "op": op, "sides": sides, "e1": params.e1, "e2": params.e2,
        "geom": geom, "merge_all": bool(dlg.values.get("merge_box")),
    })
    st.doc.version += 1
    return ["extruded"]


def rebuild_solid(doc: DocState) -> kernel.Solid | None:
    """Replay the feature list from empty (event-sourcing check)."""
    solid = None
    for feat in doc.features:
        if feat["kind"] != "extrude":
            continue
        params = ExtrudeParams(e1=feat["e1"], e2=feat["e2"], op=feat["op"],
                               sides=feat["sides"], scale_s=1.0)
        region = kernel.build_region(feat["geom"], axis=feat["axis"],
                                     offset=feat["plane_w"])
        solid = kernel.extrude(solid, region, params, feat["plane_w"])
    return solid


# --- key handling ------------------------------------------------------------------

def _apply_key(st: SimState, name: str) -> list[str]:
    if name == "shift_down":
        st.shift_held = True
        return ["ok"]
    if name == "shift_up":
        st.shift_held = False
        st.nav_armed = False
        return ["ok"]
    if name == "plus":
        if st.shift_held:
            st.nav_armed = True
            return ["ok"]
        return ["noop"]
    if name in _ARROW_TO_PLANE or name == "arrow_left":
        if st.shift_held and st.nav_armed and name in _ARROW_TO_PLANE:
            st.camera = _ARROW_TO_PLANE[name]
            return ["ok"]
        return ["noop"]
    if name == "s":
        if st.shift_held:
            st.sketch_pending = True
            return ["ok"]
        return ["noop"]
    if name == "e":
        if st.shift_held:
            if st.sketch is None or not any(s[0] == "face" for s in st.selection):
                return ["invalid"]
            st.dialog = Dialog(kind="extrude")
            st.dialog.values["type_selector"] = "new"
            return ["ok"]
        return ["noop"]
    if name == "p":
        if st.shift_held:
            st.planes_visible = not st.planes_visible
            return ["ok"]
        return ["noop"]
    if name == "h":
        if st.shift_held:
            st.sketches_visible = not st.sketches_visible
            return ["ok"]
        return ["noop"]
    if name == "y":
        st.parts_visible = bool(st.shift_held)
        return ["ok"]
    if name == "seven":
        if st.shift_held:
            st.camera = "iso"
            return ["ok"]
        return ["noop"]
    if name in _TOOL_FOR_KEY:
        if st.shift_held or st.sketch is None:
            return ["noop"]
        st.tool = _TOOL_FOR_KEY[name]
        st.pending_clicks.clear()
        return ["ok"]
    if name == "tab":
        if st.dialog is None:
            return ["noop"]
        _commit_buffer(st.dialog)
        st.dialog.focus = (st.dialog.focus + 1) % len(st.dialog.fields)
        return ["ok"]
    if name == "enter":
        if st.dialog is None:
            return ["invalid"]
        _commit_buffer(st.dialog)
        if st.dialog.kind == "plane":
            return _finalize_plane(st)
        return _finalize_extrude(st)
    if name == "escape":
        if st.dialog is not None:
            st.dialog = None
            return ["ok"]
        if st.tool is not None:
            st.tool = None
            st.pending_clicks.clear()
            return ["ok"]
        return ["noop"]
    if name == "space":
        dlg = st.dialog
        if dlg is None or dlg.focus < 0:
            return ["noop"]
        fname = dlg.fields[dlg.focus]
        if fname == "type_selector":
            order = ("new", "remove", "union")
            cur = order.index(dlg.values.get("type_selector", "new"))
            dlg.values["type_selector"] = order[(cur + 1) % 3]
            return ["ok"]
        if fname in ("symmetric_box", "merge_box"):
            dlg.values[fname] = not dlg.values.get(fname, False)
            return ["ok"]
        return ["noop"]
    return ["noop"]


def _tree_row_at(st: SimState, pt) -> int | None:
    n_rows = 3 + len(st.custom_planes)
    for i in range(n_rows):
        if tree_row_rect(i).contains(pt):
            return i
    return None


def _apply_click(st: SimState) -> list[str]:
    pt = st.cursor
    if st.dialog is not None:
        dlg = st.dialog
        if dlg.kind == "plane":
            row = _tree_row_at(st, pt)
            if row is not None and row < 3:
                dlg.base_plane = row
                return ["ok"]
            if direction_arrow_rect(True).contains(pt):
                dlg.direction = 1.0
                return ["ok"]
            if direction_arrow_rect(False).contains(pt):
                dlg.direction = -1.0
                return ["ok"]
        for i in range(len(dlg.fields)):
            if dialog_field_rect(dlg.kind, i).contains(pt):
                _commit_buffer(dlg)
                dlg.focus = i
                return ["ok"]
        return ["noop"]
    if PLANE_TOOL_BUTTON.contains(pt):
        st.dialog = Dialog(kind="plane")
        return ["ok"]
    if st.sketch_pending:
        row = _tree_row_at(st, pt)
        if row is None:
            return ["noop"]
        if row < 3:
            axis, plane_w = row, 0.0
        else:
            axis, plane_w = st.custom_planes[row - 3]
        st.sketch = SketchState(axis=axis, plane_w=plane_w, row=row)
        st.sketch_pending = False
        st.pending_clicks.clear()
        return ["ok"]
    if st.sketch is not None and st.tool is not None:
        if not VIEWPORT.contains(pt):
            return ["noop"]
        canvas = st.view.screen_to_canvas(pt)
        st.pending_clicks.append(canvas)
        if len(st.pending_clicks) < _TOOL_ARITY[st.tool]:
            return ["ok"]
        clicks = st.pending_clicks
        st.pending_clicks = []
        if st.tool == "line":
            if math.dist(clicks[0], clicks[1]) < 1e-9:
                return ["invalid"]
            return _commit_primitive(st, LineGeom(clicks[0], clicks[1]))
        if st.tool == "circle":
            r = math.dist(clicks[0], clicks[1])
            if r < 1e-9:
                return ["invalid"]
            return _commit_primitive(st, CircleGeom(clicks[0], r))
        arc = _arc_from_clicks(*clicks)
        if arc is None:
            return ["invalid"]
        return _commit_primitive(st, arc)
    if st.sketch is not None and VIEWPORT.contains(pt):
        canvas = np.asarray(st.view.screen_to_canvas(pt))
        face = _face_at(st.sketch, canvas)
        if face is not None:
            st.selection.add(("face", face))
            return ["ok"]
        edge = _edge_at(st.sketch, canvas, EDGE_HIT_RADIUS / st.view.zoom)
        if edge is not None:
            st.selection.add(("edge", edge[0], edge[1]))
            return ["ok"]
        return ["noop"]
    return ["noop"]


def step(st: SimState, vector) -> list[str]:
    """Apply one action vector; returns the transition's event labels."""
    action = decode_action(vector)
    if action.cmd == CMD_MOVETO:
        st.cursor = (action.x, action.y)
        return ["ok"]
    if action.cmd == CMD_SCROLL:
        st.view.scroll_at(st.cursor, action.scroll)
        return ["ok"]
    if action.cmd == CMD_TYPE:
        dlg = st.dialog
        if dlg is None or dlg.focus < 0 or dlg.fields[dlg.focus] not in _TEXT_FIELDS:
            return ["noop"]
        dlg.text_buffer = f"{action.value:.6f}"
        return ["ok"]
    if action.cmd == CMD_PRESSKEY:
        if not 0 <= action.key < len(KEYS) or action.count < 1:
            return ["invalid"]
        events: list[str] = []
        for _ in range(action.count):
            events.extend(_apply_key(st, KEYS[action.key]))
        return events
    if action.cmd == CMD_CLICK:
        return _apply_click(st)
    return ["invalid"]


# --- episode execution ---------------------------------------------------------------

@dataclass
class TraceStep:
    vector: tuple[int, ...]
    frame: np.ndarray
    hl: str | None
    events: list[str]


@dataclass
class EpisodeTrace:
    steps: list[TraceStep]
    final_doc: DocState
    status: str                  # "completed" | "terminated"
    reason: str | None = None
    commits: list[tuple[str, bool, bool]] = field(default_factory=list)

    def vectors(self) -> list[tuple[int, ...]]:
        return [s.vector for s in self.steps]

    def to_bytes(self) -> bytes:
        chunks = []
        for s in self.steps:
            head = f"{list(s.vector)}|{s.hl}|{','.join(s.events)}\n".encode()
            chunks.append(head)
            chunks.append(pgm_bytes(s.frame))
        chunks.append(f"status={self.status}|{self.reason}\n".encode())
        return b"".join(chunks)


def run(prog: ActionProgram, cfg: SimConfig | None = None) -> EpisodeTrace:
    """Execute a program, rendering one frame per action; terminate after
    three consecutive ineffective actions."""
    cfg = cfg or SimConfig()
    st = initial_state(cfg)
    tags = dict(prog.hl_events)
    cache: dict = {}
    steps: list[TraceStep] = []
    status, reason = "completed", None
    for i, action in enumerate(prog.actions):
        vec = encode_action(action)
        events = step(st, vec)
        frame = render_canvas(st, cfg, cache)
        steps.append(TraceStep(vector=vec, frame=frame, hl=tags.get(i), events=events))
        if any(e in ("noop", "invalid") for e in events):
            st.retry_count += 1
        else:
            st.retry_count = 0
        if st.retry_count >= MAX_CONSECUTIVE_FAILURES:
            status, reason = "terminated", "3 consecutive failures"
            break
    if status == "completed" and st.camera != "iso":
        # Completed implies the program ended on the isometric EOS combo.
        status, reason = "terminated", "missing end-of-sequence token"
    return EpisodeTrace(steps=steps, final_doc=st.doc, status=status,
                        reason=reason, commits=list(st.commits))


# --- rendering -------------------------------------------------------------------------

_BG = 235
_PANEL = 215
_TOOLBAR_FILL = 205
_ROW_FILL = 185
_ROW_ACTIVE = 150
_GRID = 222
_STROKE = 30
_PENDING = 60
_CURSOR = 0
_CANON_PX = 256


def _rect_px(rect, w: int, h: int) -> tuple[int, int, int, int]:
    return (max(0, int(rect.x0 * w)), max(0, int(rect.y0 * h)),
            min(w, int(rect.x1 * w) + 1), min(h, int(rect.y1 * h) + 1))


def _fill(img, rect, value) -> None:
    h, w = img.shape
    x0, y0, x1, y1 = _rect_px(rect, w, h)
    img[y0:y1, x0:x1] = value


def _border(img, rect, value) -> None:
    h, w = img.shape
    x0, y0, x1, y1 = _rect_px(rect, w, h)
    img[y0, x0:x1] = value
    img[y1 - 1, x0:x1] = value
    img[y0:y1, x0] = value
    img[y0:y1, x1 - 1] = value


def _stroke_polyline(img, pts_px: np.ndarray, value: int, closed: bool = False) -> None:
    h, w = img.shape
    if closed:
        pts_px = np.vstack([pts_px, pts_px[:1]])
    segs = np.hstack([pts_px[:-1], pts_px[1:]])
    out_x, out_y = [], []
    for x0, y0, x1, y1 in segs:
        n = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
        out_x.append(np.linspace(x0, x1, n + 1))
        out_y.append(np.linspace(y0, y1, n + 1))
    xs = np.concatenate(out_x).round().astype(int)
    ys = np.concatenate(out_y).round().astype(int)
    keep = (xs >= 0) & (xs < w) & (ys >= 0) & (ys < h)
    img[ys[keep], xs[keep]] = value


def _canvas_to_px(st: SimState, pts: np.ndarray, w: int, h: int) -> np.ndarray:
    vx = st.view.zoom * pts[:, 0] + st.view.pan_x
    vy = st.view.zoom * pts[:, 1] + st.view.pan_y
    sx = (VIEWPORT.x0 + (VIEWPORT.x1 - VIEWPORT.x0) * vx) * w
    sy = (VIEWPORT.y0 + (VIEWPORT.y1 - VIEWPORT.y0) * vy) * h
    return np.column_stack([sx, sy])


def _solid_canonical(st: SimState, axis: int, cache: dict) -> np.ndarray:
    key = ("canon", st.doc.version, axis)
    if key not in cache:
        keep = kernel._KEEP[axis]
        right = np.zeros(3)
        right[keep[0]] = 1.0
        up = np.zeros(3)
        up[keep[1]] = -1.0
        view = np.zeros(3)
        view[axis] = 1.0
        cache[key] = kernel.render_ortho(
            st.doc.solid, _CANON_PX, _CANON_PX, right, up, view,
            scale=float(_CANON_PX), center_world=np.zeros(3),
            center_px=(_CANON_PX / 2.0, _CANON_PX / 2.0))
    return cache[key]


def _composite_solid_plane_view(img, st: SimState, cache: dict) -> None:
    h, w = img.shape
    canon = _solid_canonical(st, st.camera, cache)
    x0, y0, x1, y1 = _rect_px(VIEWPORT, w, h)
    xs = (np.arange(x0, x1) + 0.5) / w
    ys = (np.arange(y0, y1) + 0.5) / h
    gx, gy = np.meshgrid(xs, ys)
    vx = (gx - VIEWPORT.x0) / (VIEWPORT.x1 - VIEWPORT.x0)
    vy = (gy - VIEWPORT.y0) / (VIEWPORT.y1 - VIEWPORT.y0)
    cx = (vx - st.view.pan_x) / st.view.zoom
    cy = (vy - st.view.pan_y) / st.view.zoom
    px = np.floor(cx * _CANON_PX).astype(int)
    py = np.floor(cy * _CANON_PX).astype(int)
    ok = (px >= 0) & (px < _CANON_PX) & (py >= 0) & (py < _CANON_PX)
    sub = img[y0:y1, x0:x1]
    vals = np.zeros_like(sub)
    vals[ok] = canon[py[ok], px[ok]]
    lit = vals > 0
    sub[lit] = (100 + vals[lit] // 3).astype(np.uint8)


def _composite_solid_iso(img, st: SimState, cache: dict) -> None:
    h, w = img.shape
    x0, y0, x1, y1 = _rect_px(VIEWPORT, w, h)
    size = min(x1 - x0, y1 - y0)
    key = ("iso", st.doc.version, size)
    if key not in cache:
        cache[key] = kernel.render_isometric(st.doc.solid, res=size)
    tile = cache[key]
    ox = x0 + (x1 - x0 - size) // 2
    oy = y0 + (y1 - y0 - size) // 2
    sub = img[oy:oy + size, ox:ox + size]
    lit = tile > 0
    sub[lit] = (100 + tile[lit] // 3).astype(np.uint8)


def _draw_grid(img, st: SimState) -> None:
    h, w = img.shape
    x0, y0, x1, y1 = _rect_px(VIEWPORT, w, h)
    for t in np.arange(0.0, 1.0001, 0.1):
        px = _canvas_to_px(st, np.array([[t, 0.0], [t, 1.0], [0.0, t], [1.0, t]]), w, h)
        xs = int(round(px[0, 0]))
        if x0 <= xs < x1:
            img[y0:y1, xs] = _GRID
        ys = int(round(px[2, 1]))
        if y0 <= ys < y1:
            img[ys, x0:x1] = _GRID


def _draw_sketch(img, st: SimState) -> None:
    h, w = img.shape
    sk = st.sketch
    if sk is None:
        return
    for poly in sk.polylines:
        _stroke_polyline(img, _canvas_to_px(st, poly, w, h), _STROKE, closed=True)
    for chain in sk.chains:
        for prim in chain:
            if isinstance(prim, ArcGeom):
                pts = kernel._tessellate_arc(prim, kernel.TAU_TESS)
                pts = np.vstack([pts, np.array(prim.end)])
            else:
                pts = np.array([prim.start, prim.end])
            _stroke_polyline(img, _canvas_to_px(st, pts, w, h), _STROKE)
    if st.pending_clicks:
        px = _canvas_to_px(st, np.array(st.pending_clicks), w, h).round().astype(int)
        for x, y in px:
            img[max(0, y - 1):y + 2, max(0, x - 1):x + 2] = _PENDING


def _draw_dialog(img, st: SimState) -> None:
    dlg = st.dialog
    if dlg is None:
        return
    _fill(img, DIALOG_PANEL, 245)
    _border(img, DIALOG_PANEL, 120)
    h, w = img.shape
    for i, name in enumerate(dlg.fields):
        rect = dialog_field_rect(dlg.kind, i)
        if dlg.focus == i:
            _fill(img, rect, 200)
        _border(img, rect, 120)
        x0, y0, x1, y1 = _rect_px(rect, w, h)
        cy = (y0 + y1) // 2
        if name == "type_selector":
            idx = ("new", "remove", "union").index(dlg.values.get("type_selector", "new"))
            for b in range(idx + 1):
                bx = x0 + 2 + b * 6
                img[cy - 2:cy + 2, bx:bx + 4] = 80
        elif name in _TEXT_FIELDS:
            val = dlg.values.get(name)
            if dlg.text_buffer and dlg.focus == i:
                try:
                    val = float(dlg.text_buffer)
                except ValueError:
                    val = None
            if val is not None:
                frac = min(1.0, max(0.0, (val + 1.0) / 2.0))
                img[cy - 2:cy + 2, x0 + 2:x0 + 2 + int(frac * (x1 - x0 - 4))] = 60
        elif name in ("symmetric_box", "merge_box"):
            if dlg.values.get(name):
                img[cy - 3:cy + 3, x0 + 3:x0 + 9] = 40
        elif name == "direction_arrow":
            half = direction_arrow_rect(dlg.direction > 0)
            hx0, hy0, hx1, hy1 = _rect_px(half, w, h)
            img[hy0 + 2:hy1 - 2, hx0 + 2:hx1 - 2] = 150


def render_canvas(st: SimState, cfg: SimConfig | None = None,
                  cache: dict | None = None) -> np.ndarray:
    """Deterministic grayscale raster of the full UI state."""
    cfg = cfg or st.cfg
    cache = cache if cache is not None else {}
    n = cfg.frame_px
    img = np.full((n, n), _BG, dtype=np.uint8)

    _fill(img, TOOLBAR, _TOOLBAR_FILL)
    _fill(img, PLANE_TOOL_BUTTON, 170)
    for i, tname in enumerate(("line", "circle", "arc")):
        r = Rect(0.10 + i * 0.06, 0.01, 0.14 + i * 0.06, 0.05)
        _fill(img, r, 110 if st.tool == tname else 180)

    _fill(img, TREE_PANEL, _PANEL)
    for i in range(3 + len(st.custom_planes)):
        active = st.sketch is not None and st.sketch.row == i
        _fill(img, tree_row_rect(i), _ROW_ACTIVE if active else _ROW_FILL)

    has_solid = st.doc.solid is not None and st.parts_visible
    if st.camera == "iso":
        if has_solid:
            _composite_solid_iso(img, st, cache)
    else:
        if st.planes_visible:
            _draw_grid(img, st)
        if has_solid:
            _composite_solid_plane_view(img, st, cache)
        if st.sketches_visible or st.sketch is not None:
            _draw_sketch(img, st)

    _draw_dialog(img, st)

    cx, cy = int(st.cursor[0] * n), int(st.cursor[1] * n)
    img[max(0, cy - 4):cy + 5, max(0, cx):cx + 1] = _CURSOR
    img[max(0, cy):cy + 1, max(0, cx - 4):cx + 5] = _CURSOR
    return img
