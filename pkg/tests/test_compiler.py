import numpy as np
import pytest

from cadact.actions import CMD_CLICK, CMD_MOVETO, CMD_PRESSKEY, CMD_TYPE, encode_action
from cadact.compiler import CompileConfig, compile_sequence
from cadact.sequences import parse_sequence
from cadact.synth import generate_sequence
from cadact.uiprotocol import KEY_INDEX, KEYS


def tok(code, **kw):
    names = ("t", "x", "y", "alpha", "f", "r", "theta", "phi", "gamma",
             "px", "py", "pz", "s", "e1", "e2", "u", "b")
    vals = [-1] * 17
    vals[0] = code
    for k, v in kw.items():
        vals[names.index(k)] = v
    return ",".join(str(v) for v in vals)


def extrude_tok(u=0, b=0, e1=176, e2=128, pz=128):
    return tok(5, theta=128, phi=128, gamma=128, px=128, py=128, pz=pz,
               s=128, e1=e1, e2=e2, u=u, b=b)


CIRCLE_ONLY = tok(2, x=128, y=128, r=64) + ";" + extrude_tok()


def key_presses(prog, name):
    idx = KEY_INDEX[name]
    return [a for a in prog.actions if a.cmd == CMD_PRESSKEY and a.key == idx]


def test_single_circle_program_counts():
    prog = compile_sequence(parse_sequence(CIRCLE_ONLY), CompileConfig(zoom=False), seed=1)
    assert len(key_presses(prog, "c")) == 1
    assert len(key_presses(prog, "e")) == 1  # Shift+E
    types = [a for a in prog.actions if a.cmd == CMD_TYPE]
    assert len(types) == 1  # the depth
    assert len(key_presses(prog, "enter")) == 1
    # Circle drawing: center + rim -> 2 MoveTo + 2 Click between the 'c' press
    # and the Escape that drops the tool.
    acts = prog.actions
    c_at = next(i for i, a in enumerate(acts)
                if a.cmd == CMD_PRESSKEY and a.key == KEY_INDEX["c"])
    esc_at = next(i for i, a in enumerate(acts)
                  if i > c_at and a.cmd == CMD_PRESSKEY and a.key == KEY_INDEX["escape"])
    seg = acts[c_at + 1:esc_at]
    assert sum(1 for a in seg if a.cmd == CMD_MOVETO) == 2
    assert sum(1 for a in seg if a.cmd == CMD_CLICK) == 2


def test_offset_plane_requires_creation_dialog():
    with_offset = tok(2, x=128, y=128, r=64) + ";" + extrude_tok(pz=192)
    prog = compile_sequence(parse_sequence(with_offset), seed=0)
    types = [a for a in prog.actions if a.cmd == CMD_TYPE]
    # First typed value is the plane offset 0.5 * N(192) = 0.25.
    assert types[0].value == pytest.approx(0.25)
    assert any(tag == "plane_create" for _, tag in prog.hl_events)
    no_offset = compile_sequence(parse_sequence(CIRCLE_ONLY), seed=0)
    assert not any(tag == "plane_create" for _, tag in no_offset.hl_events)


def test_remove_toggles_merge_box():
    two = ";".join([CIRCLE_ONLY, tok(2, x=128, y=128, r=20), extrude_tok(u=1, b=1)])
    prog = compile_sequence(parse_sequence(two), seed=0)
    # remove record: one space for the type cycle, one for symmetric, one for merge
    spaces = key_presses(prog, "space")
    assert len(spaces) == 3
    new_only = compile_sequence(parse_sequence(CIRCLE_ONLY), seed=0)
    assert len(key_presses(new_only, "space")) == 0


def test_hl_events_cover_records_and_eos():
    seq = generate_sequence(11, n_records=2)
    prog = compile_sequence(seq, seed=3)
    tags = [t for _, t in prog.hl_events]
    assert tags.count("extrude") == 2
    assert tags.count("eos") == 1
    assert tags.count("sketch_begin") == 2
    indices = [i for i, _ in prog.hl_events]
    assert indices == sorted(indices) and len(set(indices)) == len(indices)


def test_program_ends_with_eos_combo():
    prog = compile_sequence(generate_sequence(4), seed=0)
    tail = prog.actions[-3:]
    assert [a.cmd for a in tail] == [CMD_PRESSKEY] * 3
    assert [KEYS[a.key] for a in tail] == ["shift_down", "seven", "shift_up"]


def test_determinism_same_seed():
    seq = generate_sequence(7)
    a = compile_sequence(seq, seed=42)
    b = compile_sequence(seq, seed=42)
    assert a.actions == b.actions
    assert a.hl_events == b.hl_events


def skeleton(prog):
    """Mask dt everywhere and coordinates of jittered clicks (oracle for the
    seed-variation contract): commands, keys, counts, and typed values must
    survive a seed change."""
    out = []
    for a in prog.actions:
        if a.cmd == CMD_MOVETO:
            out.append(("move",))
        elif a.cmd == CMD_PRESSKEY:
            out.append(("key", a.key, a.count))
        elif a.cmd == CMD_TYPE:
            out.append(("type", round(a.value, 9)))
        else:
            out.append((("click",) if a.cmd == CMD_CLICK else ("scroll",)))
    return out


def test_seed_changes_only_dt_and_jitter():
    seq = generate_sequence(9)
    a = compile_sequence(seq, seed=1)
    b = compile_sequence(seq, seed=2)
    assert skeleton(a) == skeleton(b)
    assert a.hl_events == b.hl_events
    assert any(x.dt != y.dt for x, y in zip(a.actions, b.actions))


def test_every_dt_in_heuristic_range():
    for cfg in (CompileConfig(), CompileConfig(delays=False)):
        prog = compile_sequence(generate_sequence(13), cfg, seed=5)
        assert all(0.2 <= a.dt <= 0.5 for a in prog.actions)


def test_click_always_preceded_by_moveto():
    prog = compile_sequence(generate_sequence(21), seed=8)
    armed = False
    for a in prog.actions:
        if a.cmd == CMD_MOVETO:
            armed = True
        elif a.cmd == CMD_CLICK:
            assert armed, "Click without a MoveTo since the last click"
            armed = False


def test_moveto_coordinates_in_unit_square():
    for seed in range(6):
        prog = compile_sequence(generate_sequence(seed), seed=seed)
        for a in prog.actions:
            if a.cmd == CMD_MOVETO:
                assert 0.0 <= a.x <= 1.0 and 0.0 <= a.y <= 1.0


def test_zoom_heuristic_scrolls_on_small_features():
    # A tiny cut circle (r_q small vs scale) must trigger scroll zoom actions.
    small = ";".join([
        tok(0, x=64, y=64), tok(0, x=192, y=64), tok(0, x=192, y=192),
        tok(0, x=64, y=192), extrude_tok(),
        tok(2, x=128, y=128, r=4), extrude_tok(u=1, b=1, e1=200),
    ])
    seq = parse_sequence(small)
    with_zoom = compile_sequence(seq, CompileConfig(zoom=True), seed=0)
    without = compile_sequence(seq, CompileConfig(zoom=False), seed=0)
    n_scroll = sum(1 for a in with_zoom.actions if a.cmd == 2)
    assert n_scroll > 0 and n_scroll % 2 == 0  # zoom in then back out
    assert sum(1 for a in without.actions if a.cmd == 2) == 0
