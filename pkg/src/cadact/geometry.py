"""Dequantize raw records into canvas-space sketch geometry and extrusion params.

Canvas coordinates are normalized to [0, 1]^2 with the canvas center C at
(0.5, 0.5).  World 3D coordinates are the half-scaled rotated frame (the same
units the canvas uses, without the +C shift), so a canvas point maps to world
as ``canvas - 0.5`` on the two in-plane axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateChord,
    DegenerateNormal,
    OffCanvas,
    OpenLoop,
    OutOfRange,
    ReflexOverflow,
)
from .sequences import ExtrusionRecordRaw

CANVAS_CENTER = (0.5, 0.5)
EPS_CLOSE = 1e-6

PLANE_NAMES = ("Right", "Front", "Top")  # plane_id 0, 1, 2 -> dropped axis x, y, z

OP_NAMES = ("new", "remove", "union")
SIDES_NAMES = ("one_sided", "symmetric", "two_sided")


@dataclass(frozen=True)
class PlaneBasis:
    n: tuple[float, float, float]
    x_axis: tuple[float, float, float]
    y_axis: tuple[float, float, float]
    plane_id: int
    offset: float


@dataclass(frozen=True)
class LineGeom:
    start: tuple[float, float]
    end: tuple[float, float]

    kind = "line"


@dataclass(frozen=True)
class CircleGeom:
    center: tuple[float, float]
    radius: float

    kind = "circle"


@dataclass(frozen=True)
class ArcGeom:
    start: tuple[float, float]
    end: tuple[float, float]
    center: tuple[float, float]
    mid: tuple[float, float]
    radius: float
    sweep_deg: float
    flag: int

    kind = "arc"


@dataclass(frozen=True)
class SketchGeom:
    loops: tuple[tuple[object, ...], ...]  # tuples of LineGeom/CircleGeom/ArcGeom


@dataclass(frozen=True)
class ExtrudeParams:
    e1: float
    e2: float
    op: str      # "new" | "remove" | "union"
    sides: str   # "one_sided" | "symmetric" | "two_sided"
    scale_s: float


def normalize(p: int) -> float:
    """Map a quantized value in [0, 255] to [-1, 127/128]."""
    if not 0 <= p <= 255:
        raise OutOfRange(f"quantized value {p} outside [0, 255]")
    return (p - 128) / 128.0


def _rotate_about(v: np.ndarray, axis: np.ndarray, angle: float) -> np.ndarray:
    # Rodrigues rotation of v about unit axis.
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * float(np.dot(axis, v)) * (1 - c)


def plane_basis(theta_q: int, phi_q: int, gamma_q: int,
                px_q: int, py_q: int, pz_q: int) -> PlaneBasis:
    """Sketch-plane frame from quantized angles, plus plane id and offset."""
    theta = math.pi * normalize(theta_q)
    phi = math.pi * normalize(phi_q)
    gamma = math.pi * normalize(gamma_q)
    n = np.array([
        math.sin(theta) * math.cos(phi),
        math.sin(theta) * math.sin(phi),
        math.cos(theta),
    ])
    if np.linalg.norm(n) < 1e-9:
        raise DegenerateNormal("plane normal below tolerance")
    # Darboux-style completion: derivative frame rotated about n by gamma.
    x0 = np.array([
        math.cos(theta) * math.cos(phi),
        math.cos(theta) * math.sin(phi),
        -math.sin(theta),
    ])
    x_axis = _rotate_about(x0, n, gamma)
    y_axis = np.cross(n, x_axis)
    plane_id = int(np.argmax(np.abs(n)))
    o = np.array([normalize(px_q), normalize(py_q), normalize(pz_q)])
    offset = 0.5 * float(o[plane_id])
    return PlaneBasis(
        n=tuple(float(v) for v in n),
        x_axis=tuple(float(v) for v in x_axis),
        y_axis=tuple(float(v) for v in y_axis),
        plane_id=plane_id,
        offset=offset,
    )


def project_point(x_q: int, y_q: int, basis: PlaneBasis, s: float,
                  o: tuple[float, float, float],
                  c: tuple[float, float] = CANVAS_CENTER) -> tuple[float, float]:
    """Quantized sketch point -> canvas pixel coordinates.

    Rotate/scale into 3D, drop the plane_id axis, then half-scale and shift
    by the canvas center.  Raises OffCanvas rather than clamping.
    """
    if s <= 0:
        raise OutOfRange(f"scale {s} must be positive")
    nx, ny = normalize(x_q), normalize(y_q)
    xa, ya = np.array(basis.x_axis), np.array(basis.y_axis)
    p_rot = xa * (nx * s) + ya * (ny * s) + np.array(o)
    keep = [i for i in range(3) if i != basis.plane_id]
    p_proj = p_rot[keep]
    u = 0.5 * float(p_proj[0]) + c[0]
    v = 0.5 * float(p_proj[1]) + c[1]
    if not (-1e-9 <= u <= 1 + 1e-9 and -1e-9 <= v <= 1 + 1e-9):
        raise OffCanvas(f"projected point ({u:.4f}, {v:.4f}) outside unit canvas")
    return (u, v)


def circle_radius(r_q: int, s: float) -> float:
    """Canvas-units circle radius: r_q/128 * s * 0.5."""
    if not 1 <= r_q <= 255:
        raise OutOfRange(f"circle radius code {r_q} outside [1, 255]")
    if s <= 0:
        raise OutOfRange(f"scale {s} must be positive")
    return r_q / 128.0 * s * 0.5


def arc_geometry(start: tuple[float, float], end: tuple[float, float],
                 alpha_q: int, f: int) -> ArcGeom:
    """Arc through canvas-space endpoints with quantized sweep and side flag.

    The center sits at the chord midpoint offset by h along the chord's left
    normal (f=1) or right normal (f=0).  The midpoint is placed on whichever
    of the two candidate sweeps (CCW or CW) matches alpha, so the inscribed
    start->mid->end sweep always recovers alpha.
    """
    if not 1 <= alpha_q <= 255:
        raise OutOfRange(f"arc sweep code {alpha_q} outside [1, 255]")
    if f not in (0, 1):
        raise OutOfRange(f"arc flag {f} outside {{0, 1}}")
    alpha = 180.0 * alpha_q / 128.0
    if alpha > 360.0:
        raise ReflexOverflow(f"sweep {alpha} exceeds a full turn")
    vx, vy = end[0] - start[0], end[1] - start[1]
    length = math.hypot(vx, vy)
    if length < 1e-9:
        raise DegenerateChord("arc start and end coincide")
    chord_mid = ((start[0] + end[0]) / 2.0, (start[1] + end[1]) / 2.0)
    r = length / (2.0 * math.sin(math.radians(alpha / 2.0)))
    h = math.sqrt(max(0.0, r * r - (length / 2.0) ** 2))
    perp = (-vy / length, vx / length)
    sign = 1.0 if f == 1 else -1.0
    cx = chord_mid[0] + sign * h * perp[0]
    cy = chord_mid[1] + sign * h * perp[1]
    theta_start = math.atan2(start[1] - cy, start[0] - cx)
    theta_end = math.atan2(end[1] - cy, end[0] - cx)
    ccw_delta = math.degrees(theta_end - theta_start) % 360.0
    score_ccw = abs(ccw_delta - alpha)
    score_cw = abs((360.0 - ccw_delta) - alpha)
    if abs(score_ccw - score_cw) < 1e-9:
        # Semicircle: both sweeps equal alpha, so the side flag decides.
        mid_sign = 1.0 if f == 1 else -1.0
    else:
        mid_sign = 1.0 if score_ccw < score_cw else -1.0
    theta_mid = theta_start + mid_sign * math.radians(alpha / 2.0)
    mid = (cx + r * math.cos(theta_mid), cy + r * math.sin(theta_mid))
    return ArcGeom(start=start, end=end, center=(cx, cy), mid=mid,
                   radius=r, sweep_deg=alpha, flag=f)


def extrude_params(e1_q: int, e2_q: int, u: int, b: int, s_q: int) -> ExtrudeParams:
    """Dequantize extrusion extents, op, sides, and sketch scale."""
    if u not in (0, 1, 2):
        raise OutOfRange(f"extrusion op u={u} outside {{0,1,2}}")
    if b not in (0, 1, 2):
        raise OutOfRange(f"extrusion sides b={b} outside {{0,1,2}}")
    return ExtrudeParams(
        e1=0.5 * normalize(e1_q),
        e2=0.5 * normalize(e2_q),
        op=OP_NAMES[u],
        sides=SIDES_NAMES[b],
        scale_s=dequantize_scale(s_q),
    )


def dequantize_scale(s_q: int) -> float:
    """Sketch scale: s_q / 256, giving s in (0, 1) away from s_q = 0."""
    if not 0 <= s_q <= 255:
        raise OutOfRange(f"scale code {s_q} outside [0, 255]")
    return s_q / 256.0


def check_loop_closed(chain: list, eps: float = EPS_CLOSE) -> None:
    """Verify consecutive endpoints coincide and the chain closes on itself."""
    pts = []
    for prim in chain:
        pts.append((prim.start, prim.end))
    for (_, prev_end), (nxt_start, _) in zip(pts, pts[1:]):
        if math.dist(prev_end, nxt_start) > eps:
            raise OpenLoop("consecutive primitive endpoints do not coincide")
    if math.dist(pts[-1][1], pts[0][0]) > eps:
        raise OpenLoop("loop endpoints fail to close")


def lower_record(rec: ExtrusionRecordRaw,
                 c: tuple[float, float] = CANVAS_CENTER,
                 ) -> tuple[PlaneBasis, SketchGeom, ExtrudeParams]:
    """Lower one validated record into canvas geometry + real-valued params."""
    basis = plane_basis(rec.theta, rec.phi, rec.gamma, rec.px, rec.py, rec.pz)
    params = extrude_params(rec.e1, rec.e2, rec.u, rec.b, rec.s)
    s = params.scale_s
    o = (normalize(rec.px), normalize(rec.py), normalize(rec.pz))
    loops: list[tuple[object, ...]] = []
    for loop in rec.loops:
        prims = loop.primitives
        if len(prims) == 1 and prims[0].kind == "circle":
            center = project_point(prims[0].x, prims[0].y, basis, s, o, c)
            loops.append((CircleGeom(center=center, radius=circle_radius(prims[0].r, s)),))
            continue
        endpoints = [project_point(p.x, p.y, basis, s, o, c) for p in prims]
        chain: list = []
        for i, p in enumerate(prims):
            start = endpoints[i - 1]  # chain starts at the last primitive's endpoint
            end = endpoints[i]
            if p.kind == "line":
                chain.append(LineGeom(start=start, end=end))
            elif p.kind == "arc":
                chain.append(arc_geometry(start, end, p.alpha, p.f))
            else:
                raise OutOfRange("circle inside a multi-primitive loop")
        check_loop_closed(chain)
        loops.append(tuple(chain))
    return basis, SketchGeom(loops=tuple(loops)), params


def effective_depth(params: ExtrudeParams) -> float:
    """Total swept depth: |e1| one-sided, 2|e1| symmetric, |e1|+|e2| two-sided."""
    if params.sides == "one_sided":
        return abs(params.e1)
    if params.sides == "symmetric":
        return 2.0 * abs(params.e1)
    return abs(params.e1) + abs(params.e2)
