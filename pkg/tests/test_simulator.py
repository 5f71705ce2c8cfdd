import math

import numpy as np
import pytest

from cadact import kernel
from cadact.actions import click, encode_action, move_to, press_key, type_value
from cadact.compiler import CompileConfig, compile_sequence
from cadact.geometry import lower_record
from cadact.metrics import chamfer
from cadact.sequences import parse_sequence
from cadact.simulator import (
    EpisodeTrace,
    SimConfig,
    initial_state,
    rebuild_solid,
    render_canvas,
    run,
    step,
)
from cadact.synth import generate_sequence
from cadact.uiprotocol import VIEWPORT, tree_row_rect


def drive(st, *actions):
    return [step(st, encode_action(a)) for a in actions]


def open_sketch(st, row=2):
    drive(st, press_key("shift_down"), press_key("s"), press_key("shift_up"))
    c = tree_row_rect(row).center
    drive(st, move_to(*c), click())


def canvas_click(st, u, v):
    s = st.view.canvas_to_screen((u, v))
    return drive(st, move_to(*s), click())


def test_circle_commit_at_arity_two():
    st = initial_state()
    open_sketch(st)
    drive(st, press_key("c"))
    canvas_click(st, 0.5, 0.5)
    assert len(st.pending_clicks) == 1
    canvas_click(st, 0.6, 0.5)
    assert st.pending_clicks == []
    assert len(st.sketch.loops) == 1
    circle = st.sketch.loops[0][0]
    assert circle.kind == "circle"
    assert circle.radius == pytest.approx(0.1, abs=2e-3)


def test_extrude_dialog_tab_order():
    st = initial_state()
    open_sketch(st)
    drive(st, press_key("c"))
    canvas_click(st, 0.5, 0.5)
    canvas_click(st, 0.62, 0.5)
    drive(st, press_key("escape"))
    canvas_click(st, 0.5, 0.5)  # select the face
    assert ("face", 0) in st.selection
    drive(st, press_key("shift_down"), press_key("e"), press_key("shift_up"))
    assert st.dialog is not None and st.dialog.kind == "extrude"
    drive(st, press_key("tab"))
    assert st.dialog.fields[st.dialog.focus] == "type_selector"
    drive(st, press_key("tab"))
    assert st.dialog.fields[st.dialog.focus] == "depth_field"
    drive(st, press_key("tab"))
    assert st.dialog.fields[st.dialog.focus] == "depth2_field"
    drive(st, press_key("tab"))
    assert st.dialog.fields[st.dialog.focus] == "symmetric_box"
    drive(st, press_key("tab"))
    assert st.dialog.fields[st.dialog.focus] == "merge_box"


def test_click_nowhere_is_noop():
    st = initial_state()
    mid = VIEWPORT.center
    events = drive(st, move_to(*mid), click())
    assert events[-1] == ["noop"]


def test_enter_without_dialog_invalid():
    st = initial_state()
    assert drive(st, press_key("enter")) == [["invalid"]]


def test_three_bare_clicks_terminate():
    from cadact.actions import ActionProgram

    prog = ActionProgram()
    for _ in range(3):
        prog.append(click())
    trace = run(prog, SimConfig(frame_px=64))
    assert trace.status == "terminated"
    assert trace.reason == "3 consecutive failures"
    assert len(trace.steps) == 3


def test_full_extrude_via_raw_steps():
    st = initial_state()
    open_sketch(st)
    drive(st, press_key("c"))
    canvas_click(st, 0.5, 0.5)
    canvas_click(st, 0.65, 0.5)
    drive(st, press_key("escape"))
    canvas_click(st, 0.5, 0.5)
    drive(st, press_key("shift_down"), press_key("e"), press_key("shift_up"))
    drive(st, press_key("tab", 2))  # type_selector -> depth_field
    drive(st, type_value(0.2))
    events = drive(st, press_key("enter"))
    assert events == [["extruded"]]
    assert st.doc.solid is not None
    assert st.sketch is None and not st.selection
    prisms = st.doc.solid.prisms()
    assert len(prisms) == 1
    assert prisms[0].hi - prisms[0].lo == pytest.approx(0.2, abs=2e-3)


# --- closure with the compiler ----------------------------------------------------

def oracle_solid(seq):
    solid = None
    for rec in seq.records:
        basis, geom, params = lower_record(rec)
        region = kernel.build_region(geom, axis=basis.plane_id, offset=basis.offset)
        solid = kernel.extrude(solid, region, params, basis.offset)
    return solid


@pytest.fixture(scope="module")
def compiled_trace():
    seq = generate_sequence(3)
    prog = compile_sequence(seq, seed=3)
    trace = run(prog, SimConfig(frame_px=96))
    return seq, prog, trace


def test_compiled_programs_run_clean(compiled_trace):
    seq, prog, trace = compiled_trace
    assert trace.status == "completed"
    assert len(trace.steps) == len(prog.actions)
    for s in trace.steps:
        assert not any(e in ("noop", "invalid") for e in s.events)


def test_hl_extrude_count_matches_records(compiled_trace):
    seq, prog, trace = compiled_trace
    tags = [s.hl for s in trace.steps if s.hl]
    assert tags.count("extrude") == len(seq.records)
    assert tags[-1] == "eos"


def test_event_sourcing_rebuild(compiled_trace):
    seq, prog, trace = compiled_trace
    rebuilt = rebuild_solid(trace.final_doc)
    a = kernel.sample_points(trace.final_doc.solid, 1024, seed=9)
    b = kernel.sample_points(rebuilt, 1024, seed=9)
    assert chamfer(a, b) == 0.0


def test_constraint_shift_bookkeeping(compiled_trace):
    # Shift held during ordinary polyline placement, released exactly at the
    # loop-closing commit; circle commits never involve the constraint key.
    seq, prog, trace = compiled_trace
    seen_polyline = False
    for kind, shift_held, closed_loop in trace.commits:
        if kind == "circle":
            assert not shift_held
            assert closed_loop
        else:
            seen_polyline = True
            if closed_loop:
                assert not shift_held
            else:
                assert shift_held
    assert seen_polyline


def test_replay_determinism(compiled_trace):
    seq, prog, trace = compiled_trace
    again = run(prog, SimConfig(frame_px=96))
    assert trace.to_bytes() == again.to_bytes()


def test_rebuilt_matches_oracle(compiled_trace):
    from cadact.metrics import quality_filter

    seq, prog, trace = compiled_trace
    verdict = quality_filter(oracle_solid(seq), trace.final_doc.solid, n_samples=2048)
    assert verdict.kind == "pass"


# --- rendering ---------------------------------------------------------------------

def test_render_empty_plane_view_deterministic():
    st = initial_state()
    st.camera = 2
    f1 = render_canvas(st, SimConfig(frame_px=128))
    f2 = render_canvas(st, SimConfig(frame_px=128))
    assert np.array_equal(f1, f2)
    assert (f1 == 222).sum() > 100  # grid lines
    assert (f1 == 0).sum() >= 9     # crosshair


def test_render_committed_circle_strokes_locus():
    st = initial_state()
    st.camera = 2
    open_sketch(st)
    drive(st, press_key("c"))
    canvas_click(st, 0.5, 0.5)
    canvas_click(st, 0.7, 0.5)
    img = render_canvas(st, SimConfig(frame_px=224))
    ys, xs = np.nonzero(img == 30)
    assert len(xs) > 50
    # Every stroked pixel lies near the circle locus (radius 0.2 canvas).
    n = img.shape[0]
    pts = np.column_stack([(xs + 0.5) / n, (ys + 0.5) / n])
    canvas = np.array([st.view.screen_to_canvas(tuple(p)) for p in pts])
    r = np.linalg.norm(canvas - np.array(st.sketch.loops[0][0].center), axis=1)
    assert np.all(np.abs(r - st.sketch.loops[0][0].radius) < 0.02)


def test_render_iso_bbox_matches_projection_oracle():
    # Drive a cuboid through raw steps, switch to isometric, and compare the
    # composited silhouette bbox against an independent projection of the AABB
    # (extreme cuboid corners realize the projected box exactly).
    st = initial_state()
    open_sketch(st)
    drive(st, press_key("l"))
    corners = [(0.35, 0.35), (0.65, 0.35), (0.65, 0.65), (0.35, 0.65)]
    for i in range(4):
        canvas_click(st, *corners[i])
        canvas_click(st, *corners[(i + 1) % 4])
    drive(st, press_key("escape"))
    canvas_click(st, 0.5, 0.5)
    drive(st, press_key("shift_down"), press_key("e"), press_key("shift_up"))
    drive(st, press_key("tab", 2))
    drive(st, type_value(0.25))
    drive(st, press_key("enter"))
    drive(st, press_key("shift_down"), press_key("seven"), press_key("shift_up"))
    img = render_canvas(st, SimConfig(frame_px=224))
    from cadact.simulator import _rect_px as _rp

    vx0, vy0, vx1, vy1 = _rp(VIEWPORT, img.shape[1], img.shape[0])
    lit = np.zeros_like(img, dtype=bool)
    sub = img[vy0:vy1, vx0:vx1]
    lit[vy0:vy1, vx0:vx1] = (sub >= 100) & (sub <= 190)
    ys, xs = np.nonzero(lit)
    assert len(xs) > 200
    # Projection oracle: the isometric tile is fitted to 90% of the viewport
    # square; recompute the projected AABB of the solid the same way.
    lo, hi = st.doc.solid.aabb()
    corners = np.array([[x, y, z] for x in (lo[0], hi[0])
                        for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
    center = (lo + hi) / 2
    rel = corners - center
    sx = rel @ kernel.ISO_RIGHT
    sy = rel @ kernel.ISO_UP
    n = img.shape[0]
    from cadact.simulator import _rect_px

    x0, y0, x1, y1 = _rect_px(VIEWPORT, n, n)
    size = min(x1 - x0, y1 - y0)
    scale = 0.9 * size / max(np.ptp(sx), np.ptp(sy))
    ox = x0 + (x1 - x0 - size) // 2
    oy = y0 + (y1 - y0 - size) // 2
    ex0 = ox + size / 2 + scale * sx.min()
    ex1 = ox + size / 2 + scale * sx.max()
    ey0 = oy + size / 2 - scale * sy.max()
    ey1 = oy + size / 2 - scale * sy.min()
    assert abs(xs.min() - ex0) <= 1.5
    assert abs(xs.max() - ex1) <= 1.5
    assert abs(ys.min() - ey0) <= 1.5
    assert abs(ys.max() - ey1) <= 1.5
