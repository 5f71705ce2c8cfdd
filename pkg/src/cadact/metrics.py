"""Evaluation metrics: Chamfer distance with 48-way PCA alignment, command and
parameter accuracy, perfect-sequence statistics, and the geometric quality
filter that stands in for the embedding-similarity check.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

try:
    from scipy.spatial import cKDTree
except ImportError:  # pragma: no cover - scipy is a declared dependency
    cKDTree = None

from .errors import DegenerateCloud, EmptyCloud, EmptyInput, LengthMismatch

SUCCESS_CD = 0.02
DEFAULT_SAMPLES = 4096
DEFAULT_SAMPLE_SEED = 0

BIN_EDGES = (120, 200)  # short [0,120), medium [120,200), long [200, inf)


def length_bin(n: int) -> str:
    if n < BIN_EDGES[0]:
        return "short"
    if n < BIN_EDGES[1]:
        return "medium"
    return "long"


def _check_cloud(p: np.ndarray, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[1] != 3 or p.shape[0] == 0:
        raise EmptyCloud(f"{name}: expected nonempty (n, 3) cloud")
    return p


def _min_sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """For each point of a, squared distance to its nearest neighbor in b."""
    if cKDTree is not None:
        d, _ = cKDTree(b).query(a, k=1)
        return d * d
    return _min_sqdist_brute(a, b)


def _min_sqdist_brute(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.empty(len(a))
    chunk = max(1, int(4e6) // max(1, len(b)))
    for i in range(0, len(a), chunk):
        d = a[i:i + chunk, None, :] - b[None, :, :]
        out[i:i + chunk] = np.min(np.einsum("ijk,ijk->ij", d, d), axis=1)
    return out


def chamfer(p: np.ndarray, q: np.ndarray) -> float:
    """Symmetric sum of mean squared nearest-neighbor distances."""
    p, q = _check_cloud(p, "P"), _check_cloud(q, "Q")
    return float(np.mean(_min_sqdist(p, q)) + np.mean(_min_sqdist(q, p)))


def chamfer_bruteforce(p: np.ndarray, q: np.ndarray) -> float:
    """O(n^2) reference path; the accelerated chamfer must match it."""
    p, q = _check_cloud(p, "P"), _check_cloud(q, "Q")
    return float(np.mean(_min_sqdist_brute(p, q)) + np.mean(_min_sqdist_brute(q, p)))


@dataclass(frozen=True)
class SimilarityTransform:
    """Best-of-48 alignment: full orthogonal rotation between PCA frames plus
    the signed axis permutation chosen in the search."""

    rotation: np.ndarray      # (3, 3) orthogonal
    scale: float
    translation: np.ndarray   # (3,)
    axis_map: np.ndarray      # (3, 3) signed permutation matrix
    proper: bool              # det(rotation) == +1

    def apply(self, points: np.ndarray) -> np.ndarray:
        return self.scale * (np.asarray(points, dtype=float) @ self.rotation.T) + self.translation


def _signed_permutations() -> list[np.ndarray]:
    from itertools import permutations, product

    mats = []
    for perm in permutations(range(3)):
        base = np.zeros((3, 3))
        for row, col in enumerate(perm):
            base[row, col] = 1.0
        for signs in product((1.0, -1.0), repeat=3):
            mats.append(base * np.array(signs)[:, None])
    return mats


_SIGNED_PERMS = _signed_permutations()


def _pca_axes(centered: np.ndarray) -> np.ndarray:
    cov = centered.T @ centered / len(centered)
    evals, evecs = np.linalg.eigh(cov)
    if evals[0] < 1e-12 * max(evals[-1], 1e-30):
        raise DegenerateCloud("cloud covariance rank < 3")
    return evecs[:, ::-1]  # columns sorted by descending variance


def align_pca(p_gt: np.ndarray, p_pred: np.ndarray) -> tuple[SimilarityTransform, float]:
    """Search the 48 signed axis permutations between PCA frames for the
    similarity transform minimizing Chamfer distance to the ground truth."""
    p_gt, p_pred = _check_cloud(p_gt, "gt"), _check_cloud(p_pred, "pred")
    if len(p_gt) < 4 or len(p_pred) < 4:
        raise DegenerateCloud("need >= 4 points per cloud")
    mu_gt, mu_pred = p_gt.mean(axis=0), p_pred.mean(axis=0)
    cg, cp = p_gt - mu_gt, p_pred - mu_pred
    u_gt, u_pred = _pca_axes(cg), _pca_axes(cp)
    rms_gt = float(np.sqrt(np.mean(np.sum(cg * cg, axis=1))))
    rms_pred = float(np.sqrt(np.mean(np.sum(cp * cp, axis=1))))
    if rms_pred < 1e-15:
        raise DegenerateCloud("prediction cloud has zero spread")
    s = rms_gt / rms_pred

    tree_gt = cKDTree(p_gt) if cKDTree is not None else None
    best: tuple[float, SimilarityTransform] | None = None
    for pi in _SIGNED_PERMS:
        rot = u_gt @ pi @ u_pred.T
        aligned = s * (cp @ rot.T) + mu_gt
        if tree_gt is not None:
            d1, _ = tree_gt.query(aligned, k=1)
            fwd = float(np.mean(d1 * d1))
        else:
            fwd = float(np.mean(_min_sqdist_brute(aligned, p_gt)))
        bwd = float(np.mean(_min_sqdist(p_gt, aligned)))
        cd = fwd + bwd
        if best is None or cd < best[0]:
            t = mu_gt - s * (rot @ mu_pred)
            best = (cd, SimilarityTransform(
                rotation=rot, scale=s, translation=t, axis_map=pi,
                proper=bool(np.linalg.det(rot) > 0)))
    assert best is not None
    return best[1], best[0]


# --- action-sequence metrics -------------------------------------------------

_PARAM_SLOTS = {0: (1, 2), 1: (3, 4), 2: (5,), 3: (6,), 4: ()}


def _as_matrix(seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=int)
    if arr.ndim != 2 or arr.shape[1] != 7:
        raise LengthMismatch("expected (T, 7) action vectors")
    return arr


def cmd_accuracy(pred, gt) -> float:
    pred, gt = _as_matrix(pred), _as_matrix(gt)
    if len(pred) != len(gt) or len(gt) == 0:
        raise LengthMismatch(f"lengths {len(pred)} vs {len(gt)}")
    return float(np.mean(pred[:, 0] == gt[:, 0]))


def param_accuracy(pred, gt) -> float:
    """Per-step mean fraction of exactly matching parameter bins, conditioned
    on the command matching; zero-parameter commands contribute the command
    indicator itself."""
    pred, gt = _as_matrix(pred), _as_matrix(gt)
    if len(pred) != len(gt) or len(gt) == 0:
        raise LengthMismatch(f"lengths {len(pred)} vs {len(gt)}")
    total = 0.0
    for pv, gv in zip(pred, gt):
        if pv[0] != gv[0]:
            continue
        slots = _PARAM_SLOTS[int(gv[0])]
        if not slots:
            total += 1.0
            continue
        total += sum(1.0 for i in slots if pv[i] == gv[i]) / len(slots)
    return total / len(gt)


def perfect_fraction(pred, gt) -> float:
    pred, gt = _as_matrix(pred), _as_matrix(gt)
    if len(pred) != len(gt) or len(gt) == 0:
        raise LengthMismatch(f"lengths {len(pred)} vs {len(gt)}")
    return float(np.mean(np.all(pred == gt, axis=1)))


@dataclass
class PerfectStats:
    mean: float
    minimum: float
    maximum: float
    per_bin: dict[str, float]
    bin_sizes: dict[str, int]


def perfect_sequence_stats(pairs: list[tuple[object, object]]) -> PerfectStats:
    """Per-episode percentage of exactly matching 7-field vectors, with
    short/medium/long breakdown binned by ground-truth length."""
    if not pairs:
        raise EmptyInput("no episode pairs")
    fractions, bins = [], []
    for pred, gt in pairs:
        gt_m = _as_matrix(gt)
        fractions.append(100.0 * perfect_fraction(pred, gt))
        bins.append(length_bin(len(gt_m)))
    fr = np.array(fractions)
    per_bin, sizes = {}, {}
    for name in ("short", "medium", "long"):
        mask = [b == name for b in bins]
        sizes[name] = int(sum(mask))
        per_bin[name] = float(fr[mask].mean()) if sizes[name] else float("nan")
    return PerfectStats(mean=float(fr.mean()), minimum=float(fr.min()),
                        maximum=float(fr.max()), per_bin=per_bin, bin_sizes=sizes)


# --- quality filter -----------------------------------------------------------

@dataclass(frozen=True)
class FilterVerdict:
    kind: str           # "pass" | "fail" | "invalid"
    cd: float | None

    @property
    def passed(self) -> bool:
        return self.kind == "pass"


def normalized_aligned_cd(gt_cloud: np.ndarray, pred_cloud: np.ndarray) -> float:
    """Aligned CD with the ground truth rescaled to unit half-extent, the
    frame the CD < 0.02 success threshold is calibrated for."""
    gt_cloud = _check_cloud(gt_cloud, "gt")
    half_extent = float(np.max(gt_cloud.max(axis=0) - gt_cloud.min(axis=0))) / 2.0
    if half_extent < 1e-12:
        raise DegenerateCloud("ground-truth cloud has no extent")
    _, cd = align_pca(gt_cloud / half_extent, pred_cloud)
    return cd


def quality_filter(target, rebuilt, threshold: float = SUCCESS_CD,
                   n_samples: int = DEFAULT_SAMPLES,
                   seed: int = DEFAULT_SAMPLE_SEED) -> FilterVerdict:
    """Sample both solids, align, and pass iff CD < threshold."""
    from . import kernel
    from .errors import EmptySolid

    if target is None:
        return FilterVerdict("invalid", None)
    try:
        cloud_t = kernel.sample_points(target, n_samples, seed)
    except EmptySolid:
        return FilterVerdict("invalid", None)
    if rebuilt is None:
        return FilterVerdict("invalid", None)
    try:
        cloud_r = kernel.sample_points(rebuilt, n_samples, seed)
    except EmptySolid:
        return FilterVerdict("invalid", None)
    cd = normalized_aligned_cd(cloud_t, cloud_r)
    return FilterVerdict("pass" if cd < threshold else "fail", cd)


@dataclass
class EvalReport:
    mu_cmd: float
    mu_param: float
    perfect: PerfectStats
    cd_values: list[float] = field(default_factory=list)
    success_rate: float | None = None
    invalid_rate: float | None = None

    def to_dict(self) -> dict:
        out = {
            "mu_cmd": self.mu_cmd,
            "mu_param": self.mu_param,
            "perfect_mean": self.perfect.mean,
            "perfect_min": self.perfect.minimum,
            "perfect_max": self.perfect.maximum,
        }
        for name in ("short", "medium", "long"):
            value = self.perfect.per_bin[name]
            out[f"perfect_{name}"] = None if np.isnan(value) else value
            out[f"episodes_{name}"] = self.perfect.bin_sizes[name]
        if self.cd_values:
            out["mean_cd"] = float(np.mean(self.cd_values))
        if self.success_rate is not None:
            out["success_rate"] = self.success_rate
        if self.invalid_rate is not None:
            out["invalid_rate"] = self.invalid_rate
        return out

    def csv_rows(self) -> list[str]:
        d = self.to_dict()
        keys = list(d)
        return [",".join(keys), ",".join(f"{d[k]}" for k in keys)]


class ExternalSimilarity:
    """Hook for embedding-based filtering; no implementation ships."""

    def score(self, image_a, image_b) -> float:  # pragma: no cover - interface
        raise NotImplementedError
