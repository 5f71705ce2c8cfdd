"""Episode building, on-disk layout, manifests, stats, and batch evaluation.

Layout: ``out/<episode_id>/{manifest.json, actions.jsonl, target.pgm,
cloud.xyz, frames/%06d.pgm}``.  The manifest carries checksums for every
referenced file and is written last, so a directory without a valid manifest
is treated as incomplete and rebuilt on resume.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernel
from .actions import CMD_NAMES, decode_action, parse_jsonl
from .compiler import CompileConfig, compile_sequence
from .errors import CadactError, EmptyDataset, IdMismatch, LengthMismatch
from .geometry import PLANE_NAMES, effective_depth, lower_record
from .metrics import (
    DEFAULT_SAMPLES,
    SUCCESS_CD,
    EvalReport,
    cmd_accuracy,
    normalized_aligned_cd,
    param_accuracy,
    perfect_sequence_stats,
    quality_filter,
)
from .pgm import write_pgm
from .sequences import CadSequence, parse_sequence, serialize_sequence, validate
from .simulator import SimConfig, run
from .uiprotocol import KEYS


@dataclass
class BuildConfig:
    out_dir: Path
    seed: int = 0
    workers: int = 1
    frame_px: int = 224
    threshold: float = SUCCESS_CD
    n_samples: int = DEFAULT_SAMPLES
    compile: CompileConfig = field(default_factory=CompileConfig)


def episode_id(source_id: str, seed: int) -> str:
    return hashlib.sha256(f"{source_id}|{seed}".encode()).hexdigest()[:16]


def _child_seed(source_id: str, seed: int) -> int:
    return int(hashlib.sha256(f"{seed}|{source_id}".encode()).hexdigest()[:8], 16)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def oracle_solid(seq: CadSequence) -> kernel.Solid | None:
    """Build the target solid straight from the lowered records."""
    solid = None
    for rec in seq.records:
        basis, geom, params = lower_record(rec)
        region = kernel.build_region(geom, axis=basis.plane_id, offset=basis.offset)
        solid = kernel.extrude(solid, region, params, basis.offset)
    return solid


def record_summaries(seq: CadSequence) -> list[dict]:
    out = []
    for rec in seq.records:
        basis, geom, params = lower_record(rec)
        kinds = [p.kind for loop in rec.loops for p in loop.primitives]
        out.append({
            "plane_id": basis.plane_id,
            "plane_name": PLANE_NAMES[basis.plane_id],
            "offset": basis.offset,
            "op": params.op,
            "sides": params.sides,
            "e1": params.e1,
            "e2": params.e2,
            "effective_depth": effective_depth(params),
            "n_loops": len(rec.loops),
            "kinds": kinds,
        })
    return out


def manifest_is_valid(ep_dir: Path) -> bool:
    mpath = ep_dir / "manifest.json"
    if not mpath.exists():
        return False
    try:
        manifest = json.loads(mpath.read_text())
        for rel, digest in manifest.get("checksums", {}).items():
            if _sha256(ep_dir / rel) != digest:
                return False
    except (OSError, ValueError):
        return False
    return True


def build_episode(seq: CadSequence, cfg: BuildConfig) -> dict:
    """Compile, simulate, filter, and persist one episode; errors are
    quarantined into the manifest instead of aborting the batch."""
    ep_id = episode_id(seq.source_id, cfg.seed)
    ep_dir = cfg.out_dir / ep_id
    if manifest_is_valid(ep_dir):
        existing = json.loads((ep_dir / "manifest.json").read_text())
        existing["skipped"] = True
        return existing
    ep_dir.mkdir(parents=True, exist_ok=True)
    manifest: dict = {
        "episode_id": ep_id,
        "source_id": seq.source_id,
        "seed": cfg.seed,
        "source": serialize_sequence(seq),
    }
    try:
        report = validate(seq)
        if not report.ok:
            raise CadactError(f"validation failed: {report.violations[:3]}")
        oracle = oracle_solid(seq)
        prog = compile_sequence(seq, cfg.compile, seed=_child_seed(seq.source_id, cfg.seed))
        trace = run(prog, SimConfig(frame_px=cfg.frame_px))
        verdict = quality_filter(oracle, trace.final_doc.solid,
                                 threshold=cfg.threshold, n_samples=cfg.n_samples)
        cloud = kernel.sample_points(oracle, cfg.n_samples, seed=0)
        target = kernel.render_isometric(oracle, res=cfg.frame_px)

        (ep_dir / "actions.jsonl").write_text(prog.to_jsonl())
        write_pgm(target, ep_dir / "target.pgm")
        with open(ep_dir / "cloud.xyz", "w") as fh:
            for p in cloud:
                fh.write(f"{p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        frames_dir = ep_dir / "frames"
        frames_dir.mkdir(exist_ok=True)
        for i, s in enumerate(trace.steps):
            write_pgm(s.frame, frames_dir / f"{i:06d}.pgm")

        files = {
            "actions": "actions.jsonl",
            "target": "target.pgm",
            "cloud": "cloud.xyz",
            "frames_dir": "frames",
            "frame_count": len(trace.steps),
        }
        checksums = {
            "actions.jsonl": _sha256(ep_dir / "actions.jsonl"),
            "target.pgm": _sha256(ep_dir / "target.pgm"),
            "cloud.xyz": _sha256(ep_dir / "cloud.xyz"),
        }
        for i in range(len(trace.steps)):
            rel = f"frames/{i:06d}.pgm"
            checksums[rel] = _sha256(ep_dir / rel)
        manifest.update({
            "status": trace.status,
            "action_count": len(trace.steps),
            "hl_count": sum(1 for s in trace.steps if s.hl),
            "verdict": {"kind": verdict.kind, "cd": verdict.cd},
            "records": record_summaries(seq),
            "files": files,
            "checksums": checksums,
        })
    except CadactError as exc:
        manifest.update({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
    (ep_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest


def _build_one(args) -> dict:
    seq, cfg = args
    return build_episode(seq, cfg)


def _write_parse_failure(source_id: str, error: str, cfg: BuildConfig) -> dict:
    ep_id = episode_id(source_id, cfg.seed)
    ep_dir = cfg.out_dir / ep_id
    ep_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"episode_id": ep_id, "source_id": source_id, "seed": cfg.seed,
                "status": "error", "error": error}
    (ep_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return manifest


def cmd_build(sequences: list[CadSequence], cfg: BuildConfig,
              parse_failures: list[tuple[str, str]] | None = None) -> dict:
    """Build every episode (optionally in parallel) and summarize."""
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    if cfg.workers <= 1:
        manifests = [build_episode(seq, cfg) for seq in sequences]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            manifests = list(pool.map(_build_one, [(s, cfg) for s in sequences]))
    for source_id, error in parse_failures or []:
        manifests.append(_write_parse_failure(source_id, error, cfg))
    statuses = [m.get("status") for m in manifests]
    verdicts = [m.get("verdict", {}).get("kind") for m in manifests]
    summary = {
        "episodes": len(manifests),
        "completed": statuses.count("completed"),
        "terminated": statuses.count("terminated"),
        "errors": statuses.count("error"),
        "pass": verdicts.count("pass"),
        "fail": verdicts.count("fail"),
        "invalid": verdicts.count("invalid"),
        "success_rate": verdicts.count("pass") / max(1, len(manifests)),
    }
    (cfg.out_dir / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return summary


def build_from_file(input_path: Path, cfg: BuildConfig) -> dict:
    """Parse line by line so one corrupt sequence never aborts the batch."""
    input_path = Path(input_path)
    sequences: list[CadSequence] = []
    failures: list[tuple[str, str]] = []
    for lineno, line in enumerate(input_path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        source_id = f"{input_path.stem}:{lineno:05d}"
        try:
            sequences.append(parse_sequence(stripped, source_id=source_id))
        except CadactError as exc:
            failures.append((source_id, f"{type(exc).__name__}: {exc}"))
    return cmd_build(sequences, cfg, parse_failures=failures)


def list_episodes(dataset_dir: Path) -> list[Path]:
    root = Path(dataset_dir)
    out = sorted(p.parent for p in root.glob("*/manifest.json"))
    return out


def load_manifest(ep_dir: Path) -> dict:
    return json.loads((ep_dir / "manifest.json").read_text())


# --- stats -----------------------------------------------------------------------

def cmd_stats(dataset_dir: Path) -> dict[str, dict]:
    """Histograms over commands, lengths, pointer marginals, typed values,
    scroll directions, key presses, and tab-press counts."""
    episodes = list_episodes(dataset_dir)
    if not episodes:
        raise EmptyDataset(f"no episodes under {dataset_dir}")
    commands: dict[str, int] = {n: 0 for n in CMD_NAMES}
    lengths: dict[int, int] = {}
    move_x = np.zeros(20, dtype=int)
    move_y = np.zeros(20, dtype=int)
    type_vals = np.zeros(20, dtype=int)
    scroll = {"up": 0, "down": 0}
    key_counts: dict[str, int] = {}
    tab_hist: dict[int, int] = {}
    for ep in episodes:
        rows = parse_jsonl((ep / "actions.jsonl").read_text())
        lengths[len(rows)] = lengths.get(len(rows), 0) + 1
        for row in rows:
            a = decode_action(row["a"])
            commands[CMD_NAMES[a.cmd]] += 1
            if a.cmd == 0:
                move_x[min(19, int(a.x * 20))] += 1
                move_y[min(19, int(a.y * 20))] += 1
            elif a.cmd == 1:
                name = KEYS[a.key] if a.key < len(KEYS) else f"key{a.key}"
                key_counts[name] = key_counts.get(name, 0) + a.count
                if name == "tab":
                    tab_hist[a.count] = tab_hist.get(a.count, 0) + 1
            elif a.cmd == 2:
                scroll["up" if a.scroll > 0 else "down"] += 1
            elif a.cmd == 3:
                type_vals[min(19, int((a.value + 1) / 2 * 20))] += 1
    return {
        "commands": commands,
        "lengths": {str(k): v for k, v in sorted(lengths.items())},
        "moveto_x": {f"bin{i:02d}": int(v) for i, v in enumerate(move_x)},
        "moveto_y": {f"bin{i:02d}": int(v) for i, v in enumerate(move_y)},
        "type_values": {f"bin{i:02d}": int(v) for i, v in enumerate(type_vals)},
        "scroll_directions": scroll,
        "key_presses": dict(sorted(key_counts.items(), key=lambda kv: -kv[1])),
        "tab_presses": {str(k): v for k, v in sorted(tab_hist.items())},
    }


def stats_to_csv(stats: dict[str, dict]) -> dict[str, str]:
    out = {}
    for table, hist in stats.items():
        rows = ["key,count"] + [f"{k},{v}" for k, v in hist.items()]
        out[table] = "\n".join(rows) + "\n"
    return out


# --- eval -------------------------------------------------------------------------

def _read_vectors(ep_dir: Path) -> list[list[int]]:
    return [row["a"] for row in parse_jsonl((ep_dir / "actions.jsonl").read_text())]


def _read_cloud(ep_dir: Path) -> np.ndarray | None:
    path = ep_dir / "cloud.xyz"
    if not path.exists():
        return None
    data = np.loadtxt(path, ndmin=2)
    return data if data.size else None


def cmd_eval(pred_dir: Path, gt_dir: Path,
             threshold: float = SUCCESS_CD) -> EvalReport:
    """Compare matched episodes: action metrics plus cloud CD statistics."""
    preds = {p.name: p for p in list_episodes(pred_dir)}
    gts = {p.name: p for p in list_episodes(gt_dir)}
    if not gts:
        raise EmptyDataset(f"no episodes under {gt_dir}")
    if set(preds) != set(gts):
        missing = set(gts) ^ set(preds)
        raise IdMismatch(f"episode ids differ: {sorted(missing)[:5]}")
    pairs = []
    cds: list[float] = []
    invalid = 0
    for ep_id in sorted(gts):
        pv = _read_vectors(preds[ep_id])
        gv = _read_vectors(gts[ep_id])
        if len(pv) != len(gv):
            raise LengthMismatch(f"{ep_id}: {len(pv)} vs {len(gv)} actions")
        pairs.append((pv, gv))
        pc, gc = _read_cloud(preds[ep_id]), _read_cloud(gts[ep_id])
        if pc is None or gc is None:
            invalid += 1
        else:
            cds.append(normalized_aligned_cd(gc, pc))
    flat_pred = [v for pv, _ in pairs for v in pv]
    flat_gt = [v for _, gv in pairs for v in gv]
    report = EvalReport(
        mu_cmd=cmd_accuracy(flat_pred, flat_gt),
        mu_param=param_accuracy(flat_pred, flat_gt),
        perfect=perfect_sequence_stats(pairs),
        cd_values=cds,
        success_rate=(sum(1 for c in cds if c < threshold) / len(cds)) if cds else None,
        invalid_rate=invalid / len(pairs),
    )
    return report
