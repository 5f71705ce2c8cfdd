"""Procedural generator of valid multi-extrusion sequences for tests and demos.

Shapes are built in quantized sketch space so every emitted sequence parses,
validates, lowers on-canvas, and produces a nonempty solid: record 0 is a base
plate (rect, circle, or arc-capped rect), later records either union extra
blocks or punch removal cuts strictly inside the base footprint.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .geometry import ArcGeom, LineGeom, lower_record
from .sequences import CadSequence, ExtrusionRecordRaw, LoopSpec, PrimitiveSpec, serialize_sequence

# Canonical quantized angle triples for the three default planes.
PLANE_ANGLES = {
    2: (128, 128, 128),  # Top    n = (0, 0, 1)
    1: (192, 192, 128),  # Front  n = (0, 1, 0)
    0: (192, 128, 128),  # Right  n = (1, 0, 0)
}


def _depth_q(rng, lo: int = 24, hi: int = 80, signed: bool = True) -> int:
    mag = int(rng.integers(lo, hi))
    if signed and rng.random() < 0.3:
        return 128 - mag
    return 128 + mag


def _rect_loop(cx: int, cy: int, hw: int, hh: int) -> LoopSpec:
    return LoopSpec((
        PrimitiveSpec("line", cx - hw, cy - hh),
        PrimitiveSpec("line", cx + hw, cy - hh),
        PrimitiveSpec("line", cx + hw, cy + hh),
        PrimitiveSpec("line", cx - hw, cy + hh),
    ))


def _arc_rect_loop(cx: int, cy: int, hw: int, hh: int) -> LoopSpec:
    # Three sides straight, the last side an outward semicircular cap.
    # Chain start is the last primitive's endpoint: (cx-hw, cy+hh).
    corners = [(cx - hw, cy - hh), (cx + hw, cy - hh), (cx + hw, cy + hh),
               (cx - hw, cy + hh)]
    # Arc runs corners[2] -> corners[3]; pick the flag whose midpoint bulges
    # away from the rect center (outward, keeps the loop simple).  For a
    # semicircle, f=1 places the midpoint at theta_start + 90 deg, which is
    # the -perp side of the chord (perp = left normal of start->end).
    start, end = corners[2], corners[3]
    vx, vy = end[0] - start[0], end[1] - start[1]
    length = math.hypot(vx, vy)
    chord = ((start[0] + end[0]) / 2, (start[1] + end[1]) / 2)
    perp = (-vy / length, vx / length)
    mid_f1 = (chord[0] - length / 2 * perp[0], chord[1] - length / 2 * perp[1])
    inside = abs(mid_f1[0] - cx) <= hw and abs(mid_f1[1] - cy) <= hh
    flag = 0 if inside else 1
    return LoopSpec((
        PrimitiveSpec("line", *corners[0]),
        PrimitiveSpec("line", *corners[1]),
        PrimitiveSpec("line", *corners[2]),
        PrimitiveSpec("arc", *corners[3], alpha=128, f=flag),
    ))


def _circle_loop(cx: int, cy: int, r: int) -> LoopSpec:
    return LoopSpec((PrimitiveSpec("circle", cx, cy, r=r),))


def _arc_bulges_inward(rec: ExtrusionRecordRaw) -> bool:
    """True when a lowered arc midpoint lands inside its loop's line bbox.

    Inward caps leave the arc tangent to an adjacent edge, which quantized UI
    clicks can tilt into a self-intersection; plane projections that reflect
    the sketch (e.g. Front) silently flip a quant-space outward choice."""
    _, geom, _ = lower_record(rec)
    for prims in geom.loops:
        line_pts = [p for prim in prims if isinstance(prim, LineGeom)
                    for p in (prim.start, prim.end)]
        if not line_pts:
            continue
        xs = [p[0] for p in line_pts]
        ys = [p[1] for p in line_pts]
        for prim in prims:
            if isinstance(prim, ArcGeom):
                if min(xs) < prim.mid[0] < max(xs) and min(ys) < prim.mid[1] < max(ys):
                    return True
    return False


def _orient_arcs_outward(rec: ExtrusionRecordRaw) -> ExtrusionRecordRaw:
    if not _arc_bulges_inward(rec):
        return rec
    flipped = tuple(
        LoopSpec(tuple(replace(p, f=1 - p.f) if p.kind == "arc" else p
                       for p in loop.primitives))
        for loop in rec.loops)
    return replace(rec, loops=flipped)


def generate_sequence(seed: int, n_records: int | None = None) -> CadSequence:
    rng = np.random.default_rng(seed)
    if n_records is None:
        n_records = int(rng.integers(2, 6))
    base_plane = int(rng.choice([0, 1, 2]))
    base_offset_q = int(rng.choice([128, 128, 112, 144, 160]))
    s_q = int(rng.integers(100, 160))
    origins = {0: [base_offset_q, 128, 128],
               1: [128, base_offset_q, 128],
               2: [128, 128, base_offset_q]}[base_plane]

    base_cx, base_cy = int(rng.integers(118, 139)), int(rng.integers(118, 139))
    base_hw, base_hh = int(rng.integers(44, 60)), int(rng.integers(36, 56))
    shape = rng.random()
    if shape < 0.4:
        base_loop = _rect_loop(base_cx, base_cy, base_hw, base_hh)
    elif shape < 0.7:
        base_loop = _circle_loop(base_cx, base_cy, int(rng.integers(40, 56)))
        base_hw = base_hh = int(base_loop.primitives[0].r / math.sqrt(2)) - 2
    else:
        base_loop = _arc_rect_loop(base_cx, base_cy, base_hw, base_hh)

    theta, phi, gamma = PLANE_ANGLES[base_plane]
    base_depth_q = _depth_q(rng, lo=32, hi=88, signed=False)
    records = [_orient_arcs_outward(ExtrusionRecordRaw(
        loops=(base_loop,),
        theta=theta, phi=phi, gamma=gamma,
        px=origins[0], py=origins[1], pz=origins[2],
        s=s_q, e1=base_depth_q, e2=128, u=0,
        b=int(rng.choice([0, 0, 1])),
    ))]

    # Removal cuts must land strictly inside the base footprint.
    cut_slots: list[tuple[int, int]] = []
    margin = 14
    for _ in range(8):
        cx = int(rng.integers(base_cx - base_hw + margin, base_cx + base_hw - margin + 1))
        cy = int(rng.integers(base_cy - base_hh + margin, base_cy + base_hh - margin + 1))
        if all(abs(cx - ox) + abs(cy - oy) > 18 for ox, oy in cut_slots):
            cut_slots.append((cx, cy))

    for _ in range(n_records - 1):
        op = int(rng.choice([1, 2])) if cut_slots else 2
        if op == 1:
            cx, cy = cut_slots.pop(int(rng.integers(0, len(cut_slots))))
            r = int(rng.integers(7, 11))
            loop = _circle_loop(cx, cy, r) if rng.random() < 0.7 else _rect_loop(cx, cy, r, r)
            depth = 128 + (base_depth_q - 128) + int(rng.integers(8, 24))
            records.append(ExtrusionRecordRaw(
                loops=(loop,),
                theta=theta, phi=phi, gamma=gamma,
                px=origins[0], py=origins[1], pz=origins[2],
                s=s_q, e1=min(depth, 255), e2=128, u=1, b=1,
            ))
        else:
            plane = int(rng.choice([0, 1, 2]))
            t2, p2, g2 = PLANE_ANGLES[plane]
            off_q = int(rng.choice([128, 120, 136, 148]))
            o2 = {0: [off_q, 128, 128], 1: [128, off_q, 128], 2: [128, 128, off_q]}[plane]
            cx, cy = int(rng.integers(110, 147)), int(rng.integers(110, 147))
            if rng.random() < 0.5:
                loop = _rect_loop(cx, cy, int(rng.integers(14, 26)), int(rng.integers(12, 22)))
            else:
                loop = _circle_loop(cx, cy, int(rng.integers(14, 24)))
            b = int(rng.choice([0, 1, 2]))
            # Two-sided records keep both extents positive so the interval
            # (offset - e2, offset + e1) can never collapse.
            e1_q = _depth_q(rng, signed=b != 2)
            e2_q = _depth_q(rng, signed=False) if b == 2 else 128
            records.append(ExtrusionRecordRaw(
                loops=(loop,),
                theta=t2, phi=p2, gamma=g2,
                px=o2[0], py=o2[1], pz=o2[2],
                s=s_q, e1=e1_q, e2=e2_q,
                u=2, b=b,
            ))
    return CadSequence(records=tuple(records), source_id=f"synth-{seed:05d}")


def generate_corpus(n: int, base_seed: int = 0) -> list[CadSequence]:
    return [generate_sequence(base_seed + i) for i in range(n)]


def corpus_text(seqs: list[CadSequence]) -> str:
    return "\n".join(serialize_sequence(s) for s in seqs) + "\n"
