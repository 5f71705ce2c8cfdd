"""Procedural VQA generation: 11 question families with oracle-computed
answers, plausible distractors, and a closed-loop verify() audit."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernel
from .actions import parse_jsonl
from .dataset import list_episodes, load_manifest, oracle_solid
from .errors import InsufficientEpisodes, PrerequisiteUnmet
from .geometry import PLANE_NAMES, effective_depth, lower_record
from .pgm import pgm_bytes, write_pgm
from .sequences import parse_sequence

FAMILIES = (
    "extrusion_shape_prediction",
    "num_extrusion_estimation",
    "extrusion_difference_prediction",
    "sketch_ordering",
    "sketch_identification",
    "plane_identification",
    "cad_primitive_identification",
    "sequence_prediction",
    "video_frame_sequencing",
    "hole_detection",
    "symmetry_detection",
)

SYMMETRY_TOL = 0.005
SKETCH_RES = 224
VARIANT_RES = 160  # option renders for shape prediction

_PROMPTS = {
    "extrusion_shape_prediction":
        "You are given a completed sketch. If the next command is Extrude, "
        "which image among the following will result from it?",
    "num_extrusion_estimation":
        "How many extrusions were used in the provided CAD image?",
    "extrusion_difference_prediction":
        "You are given two extrusions for the same CAD model and the image of "
        "the CAD model. The second extrusion happens later than the first. "
        "Is the second extrusion deeper than the first?",
    "sketch_ordering":
        "Given these sketches from the video, order them to build the CAD object.",
    "sketch_identification":
        "Given an isometric view of a CAD model, select a sketch that was "
        "used to build this shape.",
    "plane_identification":
        "Given the following sketch and CAD image, which plane are you "
        "currently looking at?",
    "cad_primitive_identification":
        "Which frame best matches the description of the given CAD primitive?",
    "sequence_prediction":
        "What is the next primitive to draw given this CAD image and UI image?",
    "video_frame_sequencing":
        "You are given 3 frames from the same video. What is the order of the frames?",
    "hole_detection":
        "Given this CAD image, is there a hole?",
    "symmetry_detection":
        "You are given an image of a CAD model. Across which planes is this "
        "CAD model symmetric?",
}


@dataclass
class Question:
    family: str
    prompt: str
    assets: list[str]
    choices: list[str]
    answer_index: int
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "prompt": self.prompt,
            "assets": self.assets,
            "choices": self.choices,
            "answer_index": self.answer_index,
            "provenance": self.provenance,
        }


@dataclass
class EpisodeContext:
    ep_dir: Path
    manifest: dict
    _rows: list | None = None
    _solid: object = None
    _record_solids: list | None = None
    _holes: object = "unset"
    _symmetry: set | None = None
    _variants: dict | None = None

    @property
    def episode_id(self) -> str:
        return self.manifest["episode_id"]

    @property
    def seq(self):
        return parse_sequence(self.manifest["source"],
                              source_id=self.manifest["source_id"])

    @property
    def rows(self) -> list:
        if self._rows is None:
            self._rows = parse_jsonl((self.ep_dir / "actions.jsonl").read_text())
        return self._rows

    @property
    def hl(self) -> list[tuple[int, str]]:
        return [(r["i"], r["hl"]) for r in self.rows if "hl" in r]

    @property
    def records(self) -> list[dict]:
        return self.manifest["records"]

    def solid(self):
        if self._solid is None:
            self._solid = oracle_solid(self.seq)
        return self._solid

    def solids_by_record(self) -> list:
        """Solid state after each record, built from the lowered records."""
        if self._record_solids is None:
            solid = None
            out = []
            for rec in self.seq.records:
                basis, geom, params = lower_record(rec)
                region = kernel.build_region(geom, axis=basis.plane_id,
                                             offset=basis.offset)
                solid = kernel.extrude(solid, region, params, basis.offset)
                out.append(solid)
            self._record_solids = out
        return self._record_solids

    def frame_path(self, index: int) -> Path:
        return self.ep_dir / "frames" / f"{index:06d}.pgm"

    def hole_count(self):
        if self._holes == "unset":
            self._holes = kernel.count_through_holes(self.solid())
        return self._holes

    def symmetry(self) -> set[str]:
        if self._symmetry is None:
            self._symmetry = kernel.symmetry_planes(self.solid(), tol=SYMMETRY_TOL)
        return self._symmetry


def load_context(ep_dir: Path) -> EpisodeContext:
    return EpisodeContext(ep_dir=Path(ep_dir), manifest=load_manifest(ep_dir))


def eligible_contexts(dataset_dir: Path) -> list[EpisodeContext]:
    out = []
    for ep in list_episodes(dataset_dir):
        m = load_manifest(ep)
        if m.get("status") == "completed" and m.get("verdict", {}).get("kind") == "pass":
            out.append(EpisodeContext(ep_dir=ep, manifest=m))
    return out


# --- rendering helpers ------------------------------------------------------------

def sketch_image(seq, record_index: int, res: int = SKETCH_RES) -> np.ndarray:
    """Plane-view raster of one record's sketch loops, white background."""
    _, geom, _ = lower_record(seq.records[record_index])
    img = np.full((res, res), 255, dtype=np.uint8)
    for prims in geom.loops:
        pts = kernel._loop_polyline(prims, kernel.TAU_TESS)
        px = np.clip((pts * res), 0, res - 1)
        closed = np.vstack([px, px[:1]])
        for (x0, y0), (x1, y1) in zip(closed[:-1], closed[1:]):
            n = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
            xs = np.linspace(x0, x1, n + 1).round().astype(int)
            ys = np.linspace(y0, y1, n + 1).round().astype(int)
            img[np.clip(ys, 0, res - 1), np.clip(xs, 0, res - 1)] = 20
    return img


def _variant_render(ctx: EpisodeContext, record_index: int, depth_factor: float,
                    flip_op: bool, res: int = VARIANT_RES) -> np.ndarray | None:
    """Render the solid after record_index with a perturbed final extrusion.

    Cached per (record, factor, flip) on the context: questions and their
    verification re-renders repeatedly hit the same variants."""
    if ctx._variants is None:
        ctx._variants = {}
    key = (record_index, depth_factor, flip_op, res)
    if key in ctx._variants:
        return ctx._variants[key]
    seq = ctx.seq
    solid = None if record_index == 0 else ctx.solids_by_record()[record_index - 1]
    basis, geom, params = lower_record(seq.records[record_index])
    op = params.op
    if flip_op:
        op = {"new": "remove", "remove": "new", "union": "remove"}[op]
    result = None
    if not (op == "remove" and solid is None):
        from .geometry import ExtrudeParams

        variant = ExtrudeParams(e1=params.e1 * depth_factor, e2=params.e2 * depth_factor,
                                op=op, sides=params.sides, scale_s=params.scale_s)
        try:
            region = kernel.build_region(geom, axis=basis.plane_id, offset=basis.offset)
            out = kernel.extrude(solid, region, variant, basis.offset)
            result = kernel.render_isometric(out, res=res)
        except Exception:
            result = None
    ctx._variants[key] = result
    return result


def _place(correct: str, distractors: list[str], rng) -> tuple[list[str], int]:
    """Shuffle options; returns (choices, answer_index)."""
    options = [correct] + list(distractors)
    order = rng.permutation(len(options))
    choices = [options[i] for i in order]
    return choices, int(np.flatnonzero(order == 0)[0])


def _save_asset(img: np.ndarray, assets_dir: Path, name: str) -> str:
    assets_dir.mkdir(parents=True, exist_ok=True)
    path = assets_dir / name
    write_pgm(img, path)
    return str(path)


_PERMS3 = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]


def _perm_label(perm: tuple[int, int, int]) -> str:
    return " -> ".join("ABC"[i] for i in perm)


def _subset_label(axes: set[str]) -> str:
    return ",".join(a for a in "xyz" if a in axes) or "none"


# --- family generators ----------------------------------------------------------------

def _gen_shape_prediction(ctx, rng, assets_dir, qid):
    seq = ctx.seq
    k = int(rng.integers(0, len(seq.records)))
    true_img = _variant_render(ctx, k, 1.0, False)
    if true_img is None:
        raise PrerequisiteUnmet("true render failed")
    variants = []
    for factor, flip in ((0.5, False), (2.0, False), (1.0, True), (3.0, False)):
        img = _variant_render(ctx, k, factor, flip)
        if img is not None and pgm_bytes(img) != pgm_bytes(true_img):
            variants.append(img)
        if len(variants) == 3:
            break
    if len(variants) < 3:
        raise PrerequisiteUnmet("could not build 3 distinct distractors")
    prim_idxs = [i for i, t in ctx.hl if t.startswith("primitive_")]
    sketch_frame = str(ctx.frame_path(prim_idxs[-1])) if prim_idxs else ""
    correct = _save_asset(true_img, assets_dir, f"{qid}_true.pgm")
    dis = [_save_asset(img, assets_dir, f"{qid}_d{i}.pgm")
           for i, img in enumerate(variants)]
    choices, answer = _place(correct, dis, rng)
    return Question(
        family="extrusion_shape_prediction", prompt=_PROMPTS["extrusion_shape_prediction"],
        assets=[sketch_frame], choices=choices, answer_index=answer,
        provenance={"record": k})


def _gen_num_extrusions(ctx, rng, assets_dir, qid):
    true = sum(1 for _, t in ctx.hl if t == "extrude")
    candidates = sorted({max(1, true + d) for d in (-2, -1, 0, 1, 2)})
    distractors = [str(c) for c in candidates if c != true]
    choices, answer = _place(str(true), distractors, rng)
    return Question(
        family="num_extrusion_estimation", prompt=_PROMPTS["num_extrusion_estimation"],
        assets=[str(ctx.ep_dir / "target.pgm")], choices=choices, answer_index=answer,
        provenance={"count": true})


def _gen_depth_comparison(ctx, rng, assets_dir, qid):
    recs = ctx.records
    if len(recs) < 2:
        raise PrerequisiteUnmet("needs two records")
    d1, d2 = recs[0]["effective_depth"], recs[1]["effective_depth"]
    if abs(d1 - d2) < 1e-9:
        raise PrerequisiteUnmet("equal depths are ambiguous")
    extrude_idxs = [i for i, t in ctx.hl if t == "extrude"]
    assets = [str(ctx.frame_path(extrude_idxs[0])), str(ctx.frame_path(extrude_idxs[1])),
              str(ctx.ep_dir / "target.pgm")]
    choices, answer = _place("Yes" if d2 > d1 else "No",
                             ["No" if d2 > d1 else "Yes"], rng)
    return Question(
        family="extrusion_difference_prediction",
        prompt=_PROMPTS["extrusion_difference_prediction"],
        assets=assets, choices=choices, answer_index=answer,
        provenance={"d1": d1, "d2": d2})


def _gen_sketch_ordering(ctx, rng, assets_dir, qid):
    seq = ctx.seq
    if len(seq.records) < 3:
        raise PrerequisiteUnmet("needs three records")
    picks = sorted(rng.choice(len(seq.records), size=3, replace=False).tolist())
    presentation = [int(v) for v in rng.permutation(3)]  # presented label -> rank
    assets = []
    for label_pos in range(3):
        rec_idx = picks[presentation[label_pos]]
        img = sketch_image(seq, rec_idx)
        assets.append(_save_asset(img, assets_dir, f"{qid}_{'ABC'[label_pos]}.pgm"))
    correct_perm = tuple(int(np.flatnonzero(np.array(presentation) == rank)[0])
                         for rank in range(3))
    distractors = [_perm_label(p) for p in _PERMS3 if p != correct_perm]
    choices, answer = _place(_perm_label(correct_perm), distractors, rng)
    return Question(
        family="sketch_ordering", prompt=_PROMPTS["sketch_ordering"],
        assets=assets, choices=choices, answer_index=answer,
        provenance={"records": picks, "presentation": presentation})


def _gen_sketch_identification(ctx, rng, assets_dir, qid, pool):
    others = [c for c in pool if c.episode_id != ctx.episode_id]
    if len(others) < 3:
        raise PrerequisiteUnmet("needs three other episodes")
    rec_idx = int(rng.integers(0, len(ctx.records)))
    true_img = sketch_image(ctx.seq, rec_idx)
    true_bytes = pgm_bytes(true_img)
    picked = rng.choice(len(others), size=min(6, len(others)), replace=False)
    dis_imgs = []
    for j in picked:
        other = others[int(j)]
        img = sketch_image(other.seq, int(rng.integers(0, len(other.records))))
        if pgm_bytes(img) != true_bytes:
            dis_imgs.append(img)
        if len(dis_imgs) == 3:
            break
    if len(dis_imgs) < 3:
        raise PrerequisiteUnmet("could not find distinct distractor sketches")
    correct = _save_asset(true_img, assets_dir, f"{qid}_true.pgm")
    dis = [_save_asset(img, assets_dir, f"{qid}_d{i}.pgm")
           for i, img in enumerate(dis_imgs)]
    choices, answer = _place(correct, dis, rng)
    return Question(
        family="sketch_identification", prompt=_PROMPTS["sketch_identification"],
        assets=[str(ctx.ep_dir / "target.pgm")], choices=choices, answer_index=answer,
        provenance={"record": rec_idx})


def _gen_plane_identification(ctx, rng, assets_dir, qid):
    rec_idx = int(rng.integers(0, len(ctx.records)))
    plane = ctx.records[rec_idx]["plane_name"]
    img = sketch_image(ctx.seq, rec_idx)
    asset = _save_asset(img, assets_dir, f"{qid}_sketch.pgm")
    distractors = [p for p in PLANE_NAMES if p != plane]
    choices, answer = _place(plane, distractors, rng)
    return Question(
        family="plane_identification", prompt=_PROMPTS["plane_identification"],
        assets=[asset, str(ctx.ep_dir / "target.pgm")],
        choices=choices, answer_index=answer,
        provenance={"record": rec_idx, "plane": plane})


def _gen_primitive_identification(ctx, rng, assets_dir, qid):
    by_kind: dict[str, list[int]] = {}
    for i, t in ctx.hl:
        if t.startswith("primitive_"):
            by_kind.setdefault(t.removeprefix("primitive_"), []).append(i)
        elif t == "extrude":
            by_kind.setdefault("extrude", []).append(i)
    kinds = sorted(by_kind)
    if len(kinds) < 3:
        raise PrerequisiteUnmet("needs three distinct primitive kinds")
    target_kind = kinds[int(rng.integers(0, len(kinds)))]
    correct_idx = int(rng.choice(by_kind[target_kind]))
    other_kinds = [k for k in kinds if k != target_kind]
    picked = rng.choice(len(other_kinds), size=2, replace=False)
    dis_idx = [int(rng.choice(by_kind[other_kinds[int(j)]])) for j in picked]
    choices, answer = _place(str(ctx.frame_path(correct_idx)),
                             [str(ctx.frame_path(i)) for i in dis_idx], rng)
    return Question(
        family="cad_primitive_identification",
        prompt=_PROMPTS["cad_primitive_identification"] + f" Primitive: {target_kind}.",
        assets=[], choices=choices, answer_index=answer,
        provenance={"kind": target_kind, "frame": correct_idx,
                    "distractor_frames": dis_idx})


_PRIM_CHOICES = ("line", "arc", "circle", "extrude")


def _gen_sequence_prediction(ctx, rng, assets_dir, qid):
    events = [(i, t.removeprefix("primitive_")) for i, t in ctx.hl
              if t.startswith("primitive_") or t == "extrude"]
    if len(events) < 2:
        raise PrerequisiteUnmet("needs two drawing events")
    k = int(rng.integers(1, len(events)))
    context_idx, _ = events[k - 1]
    next_kind = events[k][1]
    distractors = [p for p in _PRIM_CHOICES if p != next_kind]
    choices, answer = _place(next_kind, distractors, rng)
    return Question(
        family="sequence_prediction", prompt=_PROMPTS["sequence_prediction"],
        assets=[str(ctx.ep_dir / "target.pgm"), str(ctx.frame_path(context_idx))],
        choices=choices, answer_index=answer,
        provenance={"event": k, "context_frame": context_idx, "next": next_kind})


def _gen_frame_sequencing(ctx, rng, assets_dir, qid):
    n = ctx.manifest["files"]["frame_count"]
    if n < 6:
        raise PrerequisiteUnmet("too few frames")
    picks = sorted(int(v) for v in rng.choice(n, size=3, replace=False))
    presentation = [int(v) for v in rng.permutation(3)]
    assets = [str(ctx.frame_path(picks[presentation[pos]])) for pos in range(3)]
    correct_perm = tuple(int(np.flatnonzero(np.array(presentation) == rank)[0])
                         for rank in range(3))
    distractors = [_perm_label(p) for p in _PERMS3 if p != correct_perm]
    choices, answer = _place(_perm_label(correct_perm), distractors, rng)
    return Question(
        family="video_frame_sequencing", prompt=_PROMPTS["video_frame_sequencing"],
        assets=assets, choices=choices, answer_index=answer,
        provenance={"frames": picks, "presentation": presentation})


def _gen_hole_detection(ctx, rng, assets_dir, qid):
    holes = ctx.hole_count()
    if holes is None:
        raise PrerequisiteUnmet("indeterminate topology")
    has = "Yes" if holes > 0 else "No"
    choices, answer = _place(has, ["No" if has == "Yes" else "Yes"], rng)
    return Question(
        family="hole_detection", prompt=_PROMPTS["hole_detection"],
        assets=[str(ctx.ep_dir / "target.pgm")], choices=choices, answer_index=answer,
        provenance={"holes": holes})


def _gen_symmetry_detection(ctx, rng, assets_dir, qid):
    axes = ctx.symmetry()
    label = _subset_label(axes)
    all_subsets = [_subset_label(set(c))
                   for r in range(4)
                   for c in itertools.combinations("xyz", r)]
    distractors = [s for s in all_subsets if s != label]
    choices, answer = _place(label, distractors, rng)
    return Question(
        family="symmetry_detection", prompt=_PROMPTS["symmetry_detection"],
        assets=[str(ctx.ep_dir / "target.pgm")], choices=choices, answer_index=answer,
        provenance={"axes": sorted(axes)})


def generate(family: str, ctx: EpisodeContext, rng,
             assets_dir: Path, qid: str = "q",
             pool: list[EpisodeContext] | None = None) -> Question:
    """Generate one question; raises PrerequisiteUnmet when the episode
    cannot host the family."""
    if family == "extrusion_shape_prediction":
        q = _gen_shape_prediction(ctx, rng, assets_dir, qid)
    elif family == "num_extrusion_estimation":
        q = _gen_num_extrusions(ctx, rng, assets_dir, qid)
    elif family == "extrusion_difference_prediction":
        q = _gen_depth_comparison(ctx, rng, assets_dir, qid)
    elif family == "sketch_ordering":
        q = _gen_sketch_ordering(ctx, rng, assets_dir, qid)
    elif family == "sketch_identification":
        q = _gen_sketch_identification(ctx, rng, assets_dir, qid, pool or [])
    elif family == "plane_identification":
        q = _gen_plane_identification(ctx, rng, assets_dir, qid)
    elif family == "cad_primitive_identification":
        q = _gen_primitive_identification(ctx, rng, assets_dir, qid)
    elif family == "sequence_prediction":
        q = _gen_sequence_prediction(ctx, rng, assets_dir, qid)
    elif family == "video_frame_sequencing":
        q = _gen_frame_sequencing(ctx, rng, assets_dir, qid)
    elif family == "hole_detection":
        q = _gen_hole_detection(ctx, rng, assets_dir, qid)
    elif family == "symmetry_detection":
        q = _gen_symmetry_detection(ctx, rng, assets_dir, qid)
    else:
        raise ValueError(f"unknown family {family}")
    q.provenance.update({"episode_id": ctx.episode_id})
    assert len(set(q.choices)) == len(q.choices)
    return q


# --- verification ---------------------------------------------------------------------

def verify(q: Question, ctx: EpisodeContext) -> bool:
    """Recompute the answer through an independent path and check the index."""
    fam = q.family
    try:
        if fam == "num_extrusion_estimation":
            true = len(ctx.records)  # manifests, not hl tags
            return q.choices[q.answer_index] == str(true)
        if fam == "extrusion_difference_prediction":
            seq = ctx.seq
            depths = []
            for rec in seq.records[:2]:
                _, _, params = lower_record(rec)
                depths.append(effective_depth(params))
            expect = "Yes" if depths[1] > depths[0] else "No"
            return q.choices[q.answer_index] == expect
        if fam == "extrusion_shape_prediction":
            k = q.provenance["record"]
            img = _variant_render(ctx, k, 1.0, False)
            return Path(q.choices[q.answer_index]).read_bytes() == pgm_bytes(img)
        if fam == "sketch_ordering":
            presentation = q.provenance["presentation"]
            expect = tuple(int(np.flatnonzero(np.array(presentation) == r)[0])
                           for r in range(3))
            return q.choices[q.answer_index] == _perm_label(expect)
        if fam == "sketch_identification":
            img = sketch_image(ctx.seq, q.provenance["record"])
            return Path(q.choices[q.answer_index]).read_bytes() == pgm_bytes(img)
        if fam == "plane_identification":
            rec = ctx.seq.records[q.provenance["record"]]
            basis, _, _ = lower_record(rec)
            return q.choices[q.answer_index] == PLANE_NAMES[basis.plane_id]
        if fam == "cad_primitive_identification":
            frame = q.provenance["frame"]
            kind = q.provenance["kind"]
            tags = dict(ctx.hl)
            tag = tags.get(frame, "")
            ok = tag == ("extrude" if kind == "extrude" else f"primitive_{kind}")
            return ok and q.choices[q.answer_index] == str(ctx.frame_path(frame))
        if fam == "sequence_prediction":
            events = [(i, t.removeprefix("primitive_")) for i, t in ctx.hl
                      if t.startswith("primitive_") or t == "extrude"]
            expect = events[q.provenance["event"]][1]
            return q.choices[q.answer_index] == expect
        if fam == "video_frame_sequencing":
            presentation = q.provenance["presentation"]
            expect = tuple(int(np.flatnonzero(np.array(presentation) == r)[0])
                           for r in range(3))
            return q.choices[q.answer_index] == _perm_label(expect)
        if fam == "hole_detection":
            holes = kernel.count_through_holes(oracle_solid(ctx.seq))
            expect = "Yes" if holes and holes > 0 else "No"
            return q.choices[q.answer_index] == expect
        if fam == "symmetry_detection":
            axes = kernel.symmetry_planes(oracle_solid(ctx.seq), tol=SYMMETRY_TOL)
            return q.choices[q.answer_index] == _subset_label(axes)
    except Exception:
        return False
    return False


# --- grading ----------------------------------------------------------------------------

def grade(responses: list[int | None], questions: list[Question],
          seed: int = 0) -> dict[str, dict]:
    """Per-family accuracy; absent/invalid responses fall back to a seeded
    uniform random choice.  The nominal chance level is reported alongside."""
    rng = np.random.default_rng(seed)
    per_family: dict[str, dict] = {}
    for resp, q in zip(responses, questions):
        if resp is None or not 0 <= resp < len(q.choices):
            resp = int(rng.integers(0, len(q.choices)))
        stats = per_family.setdefault(q.family, {"n": 0, "correct": 0, "chance": 0.0})
        stats["n"] += 1
        stats["correct"] += int(resp == q.answer_index)
        stats["chance"] += 1.0 / len(q.choices)
    for fam, stats in per_family.items():
        stats["accuracy"] = stats["correct"] / stats["n"]
        stats["chance"] = stats["chance"] / stats["n"]
    return per_family


# --- batch generation -------------------------------------------------------------------

def cmd_vqa(dataset_dir: Path, out_dir: Path, n_per_family: int, seed: int,
            families: tuple[str, ...] = FAMILIES) -> dict[str, list[Question]]:
    """Generate n questions per family from a built dataset; each family's
    questions land in <out>/<family>.json with assets under <out>/assets."""
    pool = eligible_contexts(dataset_dir)
    if not pool:
        raise InsufficientEpisodes(f"no completed+pass episodes in {dataset_dir}")
    out_dir = Path(out_dir)
    assets_dir = out_dir / "assets"
    out: dict[str, list[Question]] = {}
    for fi, family in enumerate(families):
        questions: list[Question] = []
        attempts = 0
        max_attempts = 60 * n_per_family
        while len(questions) < n_per_family:
            if attempts >= max_attempts:
                raise InsufficientEpisodes(
                    f"{family}: {len(questions)}/{n_per_family} after {attempts} attempts")
            rng = np.random.default_rng([seed, fi, attempts])
            ctx = pool[int(rng.integers(0, len(pool)))]
            qid = f"{family}-{len(questions):04d}"
            attempts += 1
            try:
                q = generate(family, ctx, rng, assets_dir, qid=qid, pool=pool)
            except PrerequisiteUnmet:
                continue
            q.provenance["seed"] = [seed, fi, attempts - 1]
            questions.append(q)
        out[family] = questions
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"{family}.json").write_text(
            json.dumps([q.to_dict() for q in questions], indent=2, sort_keys=True) + "\n")
    return out
