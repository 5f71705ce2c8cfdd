"""Minimal sketch-extrude CSG kernel.

Closed sketch loops become tessellated planar regions (even-odd), regions
extrude into axis-aligned prisms, and solids are CSG trees of prisms under
union/difference.  Membership tests are vectorized; surface sampling and
rendering work on the tessellated prism faces trimmed by membership tests, so
no exact boolean topology is ever computed.

World frame: the half-scaled sketch frame without the canvas shift, i.e. a
canvas point (u, v) on plane `axis` at plane coordinate w sits at world
coordinates (u - 0.5, v - 0.5) spread over the two kept axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptySolid, OpenLoop, RemoveFromEmpty, SelfIntersecting, ZeroDepth
from .geometry import ArcGeom, CircleGeom, LineGeom, SketchGeom

TAU_TESS = 1e-3   # max tessellation chord length, canvas units
TAU_SURF = 1e-4   # surface membership probe offset

VOXEL_RESOLUTIONS = (64, 96)


# --- planar regions ----------------------------------------------------------

@dataclass
class Loop2D:
    pts: np.ndarray   # (m, 2) closed polyline, implicit closing edge
    depth: int = 0
    area: float = 0.0


@dataclass
class PlanarRegion:
    axis: int                 # dropped/normal axis (plane_id)
    offset: float             # plane coordinate along axis
    loops: list[Loop2D]
    area: float
    bbox: tuple[float, float, float, float]
    _edges: np.ndarray = None  # (E, 4) cached x1,y1,x2,y2

    def edges(self) -> np.ndarray:
        if self._edges is None:
            segs = []
            for loop in self.loops:
                pts = loop.pts
                nxt = np.roll(pts, -1, axis=0)
                segs.append(np.hstack([pts, nxt]))
            self._edges = np.vstack(segs)
        return self._edges

    def contains_2d(self, pts: np.ndarray) -> np.ndarray:
        """Even-odd membership for (n, 2) points over all loops."""
        return _even_odd(pts, self.edges())


def _even_odd(pts: np.ndarray, edges: np.ndarray) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    out = np.zeros(len(pts), dtype=int)
    x1, y1, x2, y2 = edges[:, 0], edges[:, 1], edges[:, 2], edges[:, 3]
    dy = y2 - y1
    safe_dy = np.where(dy == 0, 1.0, dy)
    chunk = max(1, int(4e6) // max(1, len(edges)))
    for i in range(0, len(pts), chunk):
        px = pts[i:i + chunk, 0][:, None]
        py = pts[i:i + chunk, 1][:, None]
        straddle = (y1 > py) != (y2 > py)
        xint = x1 + (py - y1) * (x2 - x1) / safe_dy
        out[i:i + chunk] = np.sum(straddle & (px < xint), axis=1)
    return (out % 2) == 1


def _tessellate_arc(arc: ArcGeom, tau: float) -> np.ndarray:
    # Travel direction comes from the stored midpoint, never from the sweep
    # alone: a semicircle's two candidate sweeps are numerically identical.
    theta_start = math.atan2(arc.start[1] - arc.center[1], arc.start[0] - arc.center[0])
    theta_end = math.atan2(arc.end[1] - arc.center[1], arc.end[0] - arc.center[0])
    theta_mid = math.atan2(arc.mid[1] - arc.center[1], arc.mid[0] - arc.center[0])
    ccw_delta = (theta_end - theta_start) % (2 * math.pi)
    ccw_mid = (theta_mid - theta_start) % (2 * math.pi)
    signed = ccw_delta if ccw_mid <= ccw_delta else ccw_delta - 2 * math.pi
    n = max(2, int(math.ceil(arc.radius * abs(signed) / tau)))
    ts = theta_start + signed * np.arange(n) / n
    return np.column_stack([arc.center[0] + arc.radius * np.cos(ts),
                            arc.center[1] + arc.radius * np.sin(ts)])


def _tessellate_circle(circle: CircleGeom, tau: float) -> np.ndarray:
    n = max(16, int(math.ceil(2 * math.pi * circle.radius / tau)))
    ts = 2 * math.pi * np.arange(n) / n
    return np.column_stack([circle.center[0] + circle.radius * np.cos(ts),
                            circle.center[1] + circle.radius * np.sin(ts)])


def _self_intersects(pts: np.ndarray) -> bool:
    """Proper crossing test over all non-adjacent segment pairs."""
    m = len(pts)
    if m < 4:
        return False
    a = pts
    b = np.roll(pts, -1, axis=0)
    idx_i, idx_j = np.triu_indices(m, k=2)
    wrap = (idx_i == 0) & (idx_j == m - 1)
    idx_i, idx_j = idx_i[~wrap], idx_j[~wrap]
    if len(idx_i) == 0:
        return False
    p, r = a[idx_i], b[idx_i] - a[idx_i]
    q, s = a[idx_j], b[idx_j] - a[idx_j]
    denom = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    qp = q - p
    t_num = qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]
    u_num = qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = t_num / denom
        u = u_num / denom
    eps = 1e-12
    crossing = (np.abs(denom) > eps) & (t > eps) & (t < 1 - eps) & (u > eps) & (u < 1 - eps)
    return bool(np.any(crossing))


def _loop_polyline(loop_prims: tuple, tau: float) -> np.ndarray:
    if len(loop_prims) == 1 and isinstance(loop_prims[0], CircleGeom):
        return _tessellate_circle(loop_prims[0], tau)
    pts: list[np.ndarray] = []
    first = loop_prims[0]
    start = first.start
    last = loop_prims[-1]
    if math.dist(last.end, start) > 1e-6:
        raise OpenLoop("loop endpoints fail to close")
    for prim in loop_prims:
        if isinstance(prim, LineGeom):
            pts.append(np.array([prim.start]))
        elif isinstance(prim, ArcGeom):
            pts.append(_tessellate_arc(prim, tau))
        else:
            raise OpenLoop("circle mixed into a polyline loop")
    return np.vstack(pts)


def build_region(geom: SketchGeom, axis: int = 2, offset: float = 0.0,
                 tau: float = TAU_TESS, canvas_shift: float = 0.5) -> PlanarRegion:
    """Tessellate sketch loops into an even-odd planar region.

    Canvas coordinates are shifted by -canvas_shift into the world frame.
    """
    loops: list[Loop2D] = []
    for prims in geom.loops:
        pts = _loop_polyline(prims, tau) - canvas_shift
        is_circle = len(prims) == 1 and isinstance(prims[0], CircleGeom)
        if not is_circle and _self_intersects(pts):
            raise SelfIntersecting("loop polyline crosses itself")
        area = float(abs(np.sum(pts[:, 0] * np.roll(pts[:, 1], -1)
                                - np.roll(pts[:, 0], -1) * pts[:, 1])) / 2.0)
        loops.append(Loop2D(pts=pts, area=area))
    # Nesting depth via even-odd containment of a representative vertex.
    for i, loop in enumerate(loops):
        depth = 0
        for j, other in enumerate(loops):
            if i != j and _even_odd(loop.pts[:1], PlanarRegion(
                    0, 0.0, [other], 0.0, (0, 0, 0, 0)).edges())[0]:
                depth += 1
        loop.depth = depth
    area = sum(l.area if l.depth % 2 == 0 else -l.area for l in loops)
    allpts = np.vstack([l.pts for l in loops])
    bbox = (float(allpts[:, 0].min()), float(allpts[:, 1].min()),
            float(allpts[:, 0].max()), float(allpts[:, 1].max()))
    return PlanarRegion(axis=axis, offset=offset, loops=loops,
                        area=float(area), bbox=bbox)


# --- CSG solids ---------------------------------------------------------------

_KEEP = {0: (1, 2), 1: (0, 2), 2: (0, 1)}


@dataclass
class Prism:
    region: PlanarRegion
    lo: float
    hi: float


@dataclass
class Solid:
    kind: str                 # "prism" | "union" | "diff"
    prism: Prism | None = None
    left: "Solid | None" = None
    right: "Solid | None" = None

    def contains(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "prism":
            p = self.prism
            keep = _KEEP[p.region.axis]
            w = pts[:, p.region.axis]
            mask = (w >= p.lo) & (w <= p.hi)
            out = np.zeros(len(pts), dtype=bool)
            if np.any(mask):
                out[mask] = p.region.contains_2d(pts[mask][:, keep])
            return out
        if self.kind == "union":
            return self.left.contains(pts) | self.right.contains(pts)
        return self.left.contains(pts) & ~self.right.contains(pts)

    def prisms(self, positive_only: bool = False) -> list[Prism]:
        if self.kind == "prism":
            return [self.prism]
        if self.kind == "union":
            return self.left.prisms(positive_only) + self.right.prisms(positive_only)
        if positive_only:
            return self.left.prisms(positive_only)
        return self.left.prisms(positive_only) + self.right.prisms(positive_only)

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        boxes = []
        for p in self.prisms(positive_only=True):
            keep = _KEEP[p.region.axis]
            lo3, hi3 = np.empty(3), np.empty(3)
            lo3[p.region.axis], hi3[p.region.axis] = p.lo, p.hi
            lo3[keep[0]], hi3[keep[0]] = p.region.bbox[0], p.region.bbox[2]
            lo3[keep[1]], hi3[keep[1]] = p.region.bbox[1], p.region.bbox[3]
            boxes.append((lo3, hi3))
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        return lo, hi


def contains(solid: Solid, point) -> bool:
    """Point membership for a single 3-vector."""
    return bool(solid.contains(np.asarray(point, dtype=float)[None, :])[0])


def extrude(solid: Solid | None, region: PlanarRegion, params,
            plane_offset: float | None = None) -> Solid:
    """Attach one extrusion to the model: union for new/union, cut for remove."""
    base = region.offset if plane_offset is None else plane_offset
    e1, e2 = params.e1, params.e2
    if params.sides == "one_sided":
        lo, hi = base, base + e1
    elif params.sides == "symmetric":
        lo, hi = base - e1, base + e1
    else:
        lo, hi = base - e2, base + e1
    lo, hi = (lo, hi) if lo <= hi else (hi, lo)
    if hi - lo < 1e-12:
        raise ZeroDepth("extrusion interval has no extent")
    leaf = Solid("prism", prism=Prism(region=region, lo=lo, hi=hi))
    if params.op == "remove":
        if solid is None:
            raise RemoveFromEmpty("remove requested with no existing solid")
        return Solid("diff", left=solid, right=leaf)
    if solid is None:
        return leaf
    return Solid("union", left=solid, right=leaf)


# --- faces, sampling, rendering ------------------------------------------------

@dataclass
class Face:
    kind: str             # "cap" | "wall"
    area: float
    normal: np.ndarray    # (3,) unit, orientation sign irrelevant
    # cap:
    region: PlanarRegion | None = None
    w: float = 0.0
    # wall:
    a2d: np.ndarray | None = None
    b2d: np.ndarray | None = None
    lo: float = 0.0
    hi: float = 0.0
    axis: int = 0


def _faces(solid: Solid) -> list[Face]:
    faces: list[Face] = []
    for prism in solid.prisms():
        region = prism.region
        axis = region.axis
        n_cap = np.zeros(3)
        n_cap[axis] = 1.0
        for w in (prism.lo, prism.hi):
            faces.append(Face("cap", area=abs(region.area), normal=n_cap,
                              region=region, w=w, axis=axis))
        height = prism.hi - prism.lo
        keep = _KEEP[axis]
        for loop in region.loops:
            pts = loop.pts
            nxt = np.roll(pts, -1, axis=0)
            lengths = np.linalg.norm(nxt - pts, axis=1)
            for a, b, ln in zip(pts, nxt, lengths):
                if ln < 1e-15:
                    continue
                n3 = np.zeros(3)
                n3[keep[0]] = (b[1] - a[1]) / ln
                n3[keep[1]] = -(b[0] - a[0]) / ln
                faces.append(Face("wall", area=float(ln * height), normal=n3,
                                  a2d=a, b2d=b, lo=prism.lo, hi=prism.hi, axis=axis))
    return faces


def _embed(axis: int, plane2d: np.ndarray, w: np.ndarray) -> np.ndarray:
    keep = _KEEP[axis]
    out = np.empty((len(plane2d), 3))
    out[:, keep[0]] = plane2d[:, 0]
    out[:, keep[1]] = plane2d[:, 1]
    out[:, axis] = w
    return out


def _on_surface(solid: Solid, pts: np.ndarray, normals: np.ndarray,
                eps: float = TAU_SURF) -> np.ndarray:
    inside_neg = solid.contains(pts - eps * normals)
    inside_pos = solid.contains(pts + eps * normals)
    return inside_neg != inside_pos


def sample_points(solid: Solid | None, n: int, seed: int) -> np.ndarray:
    """n surface points via face-area-weighted rejection sampling."""
    if solid is None:
        raise EmptySolid("no solid")
    faces = _faces(solid)
    areas = np.array([f.area for f in faces])
    total = areas.sum()
    if total <= 0:
        raise EmptySolid("solid has no surface area")
    probs = areas / total
    rng = np.random.default_rng(seed)
    collected: list[np.ndarray] = []
    got = 0
    for round_no in range(64):
        batch = max(1024, 2 * (n - got))
        face_ids = rng.choice(len(faces), size=batch, p=probs)
        pts = np.empty((batch, 3))
        nrm = np.empty((batch, 3))
        valid = np.ones(batch, dtype=bool)
        for fid in np.unique(face_ids):
            sel = face_ids == fid
            k = int(sel.sum())
            f = faces[fid]
            if f.kind == "wall":
                t = rng.random(k)
                u = rng.random(k)
                p2 = f.a2d[None, :] + t[:, None] * (f.b2d - f.a2d)[None, :]
                w = f.lo + u * (f.hi - f.lo)
                pts[sel] = _embed(f.axis, p2, w)
            else:
                x0, y0, x1, y1 = f.region.bbox
                cand = np.column_stack([x0 + rng.random(k) * (x1 - x0),
                                        y0 + rng.random(k) * (y1 - y0)])
                ok = f.region.contains_2d(cand)
                pts[sel] = _embed(f.axis, cand, np.full(k, f.w))
                idx = np.flatnonzero(sel)
                valid[idx[~ok]] = False
            nrm[sel] = f.normal
        keep = valid & _on_surface(solid, pts, nrm)
        accepted = pts[keep]
        if len(accepted):
            collected.append(accepted)
            got += len(accepted)
        if got >= n:
            break
        if round_no >= 4 and got == 0:
            raise EmptySolid("no surface points accepted; solid is empty")
    if got < n:
        raise EmptySolid(f"could only sample {got} of {n} surface points")
    return np.vstack(collected)[:n]


def mc_volume(solid: Solid, n: int, seed: int) -> float:
    """Monte-Carlo volume over the padded AABB (test oracle helper)."""
    lo, hi = solid.aabb()
    pad = 0.02 * (hi - lo + 1e-9)
    lo, hi = lo - pad, hi + pad
    rng = np.random.default_rng(seed)
    pts = lo + rng.random((n, 3)) * (hi - lo)
    frac = float(np.mean(solid.contains(pts)))
    return frac * float(np.prod(hi - lo))


# --- rendering ----------------------------------------------------------------

LIGHT_DIR = np.array([1.0, 2.0, 3.0]) / math.sqrt(14.0)
SHADE_BASE = 40.0
SHADE_SPAN = 200.0

ISO_VIEW = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
ISO_RIGHT = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
ISO_UP = np.array([-1.0, -1.0, 2.0]) / math.sqrt(6.0)


def render_ortho(solid: Solid, width: int, height: int,
                 right: np.ndarray, up: np.ndarray, view: np.ndarray,
                 scale: float, center_world: np.ndarray,
                 center_px: tuple[float, float],
                 background: int = 0) -> np.ndarray:
    """Depth-buffered Lambertian orthographic render onto a uint8 raster.

    Screen x = center_px.x + scale * ((p - center_world) . right)
    Screen y = center_px.y - scale * ((p - center_world) . up)
    Larger (p . view) wins the depth test.
    """
    img = np.full((height, width), background, dtype=np.uint8)
    zbuf = np.full((height, width), -np.inf)
    faces = _faces(solid)
    for f in faces:
        shade = int(round(SHADE_BASE + SHADE_SPAN * abs(float(np.dot(f.normal, LIGHT_DIR)))))
        if f.kind == "cap":
            loops2d = [l.pts for l in f.region.loops]
            loops3d = [_embed(f.axis, pts, np.full(len(pts), f.w)) for pts in loops2d]
        else:
            quad2 = np.array([f.a2d, f.b2d, f.b2d, f.a2d])
            wcol = np.array([f.lo, f.lo, f.hi, f.hi])
            loops3d = [_embed(f.axis, quad2, wcol)]
        plane_normal = f.normal
        plane_point = loops3d[0][0]
        denom = float(np.dot(plane_normal, view))
        if abs(denom) < 1e-12:
            continue
        # Project loops to screen space.
        screen_loops = []
        for pts3 in loops3d:
            rel = pts3 - center_world
            sx = center_px[0] + scale * (rel @ right)
            sy = center_px[1] - scale * (rel @ up)
            screen_loops.append(np.column_stack([sx, sy]))
        allpts = np.vstack(screen_loops)
        x_min = max(0, int(math.floor(allpts[:, 0].min())))
        x_max = min(width - 1, int(math.ceil(allpts[:, 0].max())))
        y_min = max(0, int(math.floor(allpts[:, 1].min())))
        y_max = min(height - 1, int(math.ceil(allpts[:, 1].max())))
        if x_min > x_max or y_min > y_max:
            continue
        xs = np.arange(x_min, x_max + 1) + 0.0
        ys = np.arange(y_min, y_max + 1) + 0.0
        gx, gy = np.meshgrid(xs, ys)
        px = np.column_stack([gx.ravel(), gy.ravel()])
        edges = []
        for sl in screen_loops:
            nxt = np.roll(sl, -1, axis=0)
            edges.append(np.hstack([sl, nxt]))
        inside = _even_odd(px, np.vstack(edges))
        if not np.any(inside):
            continue
        pin = px[inside]
        # Back-project pixel centers to the face plane.
        wx = (pin[:, 0] - center_px[0]) / scale
        wy = -(pin[:, 1] - center_px[1]) / scale
        q0 = center_world[None, :] + wx[:, None] * right[None, :] + wy[:, None] * up[None, :]
        t = ((plane_point - q0) @ plane_normal) / denom
        p3 = q0 + t[:, None] * view[None, :]
        on_surf = _on_surface(solid, p3, np.broadcast_to(plane_normal, p3.shape))
        if not np.any(on_surf):
            continue
        depth = p3 @ view
        ix = pin[:, 0].astype(int)
        iy = pin[:, 1].astype(int)
        sel = np.flatnonzero(on_surf)
        for k in sel:
            if depth[k] > zbuf[iy[k], ix[k]]:
                zbuf[iy[k], ix[k]] = depth[k]
                img[iy[k], ix[k]] = shade
    return img


def render_isometric(solid: Solid | None, res: int = 224,
                     extent: float | None = None) -> np.ndarray:
    """Isometric orthographic render, model fitted to 90% of the frame.

    Pass `extent` (world units spanning 90% of the frame) to pin the camera
    scale independent of the model size.
    """
    if solid is None or not solid.prisms():
        raise EmptySolid("nothing to render")
    lo, hi = solid.aabb()
    corners = np.array([[x, y, z] for x in (lo[0], hi[0])
                        for y in (lo[1], hi[1]) for z in (lo[2], hi[2])])
    center_world = (lo + hi) / 2.0
    rel = corners - center_world
    span_x = float(np.ptp(rel @ ISO_RIGHT))
    span_y = float(np.ptp(rel @ ISO_UP))
    span = extent if extent is not None else max(span_x, span_y, 1e-9)
    scale = 0.9 * res / span
    return render_ortho(solid, res, res, ISO_RIGHT, ISO_UP, ISO_VIEW,
                        scale, center_world, (res / 2.0, res / 2.0))


# --- topology queries -----------------------------------------------------------

def _occupancy(solid: Solid, res: int) -> np.ndarray:
    lo, hi = solid.aabb()
    size = hi - lo
    pad = 2.0 * size.max() / res + 1e-9
    lo, hi = lo - pad, hi + pad
    axes = [lo[i] + (np.arange(res) + 0.5) * (hi[i] - lo[i]) / res for i in range(3)]
    return _occupancy_on_grid(solid, axes)


def _occupancy_on_grid(solid: Solid, axes: list[np.ndarray]) -> np.ndarray:
    if solid.kind == "union":
        return _occupancy_on_grid(solid.left, axes) | _occupancy_on_grid(solid.right, axes)
    if solid.kind == "diff":
        return _occupancy_on_grid(solid.left, axes) & ~_occupancy_on_grid(solid.right, axes)
    prism = solid.prism
    axis = prism.region.axis
    keep = _KEEP[axis]
    u, v = np.meshgrid(axes[keep[0]], axes[keep[1]], indexing="ij")
    flat = np.column_stack([u.ravel(), v.ravel()])
    in2d = prism.region.contains_2d(flat).reshape(u.shape)
    wmask = (axes[axis] >= prism.lo) & (axes[axis] <= prism.hi)
    in3d = np.moveaxis(in2d[:, :, None], (0, 1, 2), (keep[0], keep[1], axis))
    w3 = wmask.reshape([len(axes[axis]) if i == axis else 1 for i in range(3)])
    return in3d & w3


def _euler_characteristic(occ: np.ndarray) -> int:
    n0, n1, n2 = occ.shape
    cubes = int(occ.sum())
    verts = np.zeros((n0 + 1, n1 + 1, n2 + 1), dtype=bool)
    for dx in (0, 1):
        for dy in (0, 1):
            for dz in (0, 1):
                verts[dx:dx + n0, dy:dy + n1, dz:dz + n2] |= occ
    edges = 0
    for axis in range(3):
        shp = [n0 + 1, n1 + 1, n2 + 1]
        shp[axis] = occ.shape[axis]
        acc = np.zeros(shp, dtype=bool)
        others = [a for a in range(3) if a != axis]
        for da in (0, 1):
            for db in (0, 1):
                idx = [slice(None)] * 3
                idx[others[0]] = slice(da, da + occ.shape[others[0]])
                idx[others[1]] = slice(db, db + occ.shape[others[1]])
                acc[tuple(idx)] |= occ
        edges += int(acc.sum())
    faces = 0
    for axis in range(3):
        shp = list(occ.shape)
        shp[axis] = occ.shape[axis] + 1
        acc = np.zeros(shp, dtype=bool)
        for d in (0, 1):
            idx = [slice(None)] * 3
            idx[axis] = slice(d, d + occ.shape[axis])
            acc[tuple(idx)] |= occ
        faces += int(acc.sum())
    return int(verts.sum()) - edges + faces - cubes


_CONN26 = np.ones((3, 3, 3), dtype=bool)
_CONN6 = ndimage.generate_binary_structure(3, 1)


def _betti_numbers(occ: np.ndarray) -> tuple[int, int, int]:
    _, b0 = ndimage.label(occ, structure=_CONN26)
    comp, ncomp = ndimage.label(~occ, structure=_CONN6)
    border = np.unique(np.concatenate([
        comp[0, :, :].ravel(), comp[-1, :, :].ravel(),
        comp[:, 0, :].ravel(), comp[:, -1, :].ravel(),
        comp[:, :, 0].ravel(), comp[:, :, -1].ravel(),
    ]))
    cavities = ncomp - len([b for b in border if b != 0])
    chi = _euler_characteristic(occ)
    b2 = cavities
    b1 = b0 + b2 - chi
    return b0, b1, b2


def count_through_holes(solid: Solid | None,
                        resolutions: tuple[int, int] = VOXEL_RESOLUTIONS) -> int | None:
    """First Betti number of the voxelized solid; None when the two
    resolutions disagree (indeterminate)."""
    if solid is None or not solid.prisms():
        raise EmptySolid("no solid")
    counts = []
    for res in resolutions:
        occ = _occupancy(solid, res)
        if not occ.any():
            raise EmptySolid("voxelization is empty")
        counts.append(_betti_numbers(occ)[1])
    if len(set(counts)) != 1:
        return None
    return counts[0]


def symmetry_planes(solid: Solid | None, tol: float = 0.005,
                    n_samples: int = 4096, seed: int = 0) -> set[str]:
    """Axes across whose centroid-plane mirror the sampled cloud maps to
    itself within a Chamfer tolerance."""
    from .metrics import chamfer

    cloud = sample_points(solid, n_samples, seed)
    centered = cloud - cloud.mean(axis=0)
    out = set()
    for i, name in enumerate("xyz"):
        mirrored = centered.copy()
        mirrored[:, i] = -mirrored[:, i]
        if chamfer(centered, mirrored) < tol:
            out.add(name)
    return out
