"""Reference dataset consumer for episode directories.

Reads exactly the layout the generator emits:
``<root>/<episode_id>/{manifest.json, actions.jsonl, target.pgm, cloud.xyz,
frames/%06d.pgm}``.  Validation is eager per episode (manifest schema and
checksums before any step is yielded); frame pixels load lazily.

This package deliberately reimplements the file formats rather than importing
the generator, so it doubles as a contract check on the layout.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np


class NotADataset(Exception):
    """Directory holds no episode manifests."""


class CorruptEpisode(Exception):
    """Episode fails manifest schema or checksum validation."""


class SchemaViolation(Exception):
    """Action rows violate the 7-field vector contract."""


REQUIRED_MANIFEST_FIELDS = (
    "episode_id", "source_id", "seed", "status", "action_count",
    "files", "checksums",
)

# Vector slots used by each command index; all other slots must be -1.
_SLOTS = {0: (1, 2), 1: (3, 4), 2: (5,), 3: (6,), 4: ()}
_N_BINS = 1000


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def validate_vector(vec: list[int], where: str) -> None:
    if len(vec) != 7:
        raise SchemaViolation(f"{where}: vector has {len(vec)} fields")
    cmd = vec[0]
    if cmd not in _SLOTS:
        raise SchemaViolation(f"{where}: unknown command {cmd}")
    used = _SLOTS[cmd]
    for i in range(1, 7):
        if i in used:
            if not 0 <= vec[i] < _N_BINS:
                raise SchemaViolation(f"{where}: field {i}={vec[i]} out of range")
        elif vec[i] != -1:
            raise SchemaViolation(f"{where}: field {i}={vec[i]} must be -1")


def read_pgm(path: Path) -> np.ndarray:
    data = Path(path).read_bytes()
    if not data.startswith(b"P5"):
        raise CorruptEpisode(f"{path}: not a binary PGM")
    fields: list[bytes] = []
    i = 2
    while len(fields) < 3:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i:i + 1].isspace():
            i += 1
        fields.append(data[start:i])
    i += 1
    w, h, maxval = (int(f) for f in fields)
    if maxval != 255:
        raise CorruptEpisode(f"{path}: unsupported maxval {maxval}")
    raster = data[i:i + w * h]
    if len(raster) != w * h:
        raise CorruptEpisode(f"{path}: truncated raster ({len(raster)} of {w * h} bytes)")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)


@dataclass
class EpisodeView:
    path: Path
    manifest: dict

    @property
    def episode_id(self) -> str:
        return self.manifest["episode_id"]

    @property
    def action_count(self) -> int:
        return self.manifest["action_count"]

    @property
    def status(self) -> str:
        return self.manifest["status"]

    def _rows(self) -> list[dict]:
        rows = []
        for lineno, line in enumerate((self.path / "actions.jsonl").read_text().splitlines()):
            if not line.strip():
                continue
            rows.append(json.loads(line))
        return rows

    def actions(self) -> np.ndarray:
        """All vectors as an (action_count, 7) int array, schema-checked."""
        rows = self._rows()
        for row in rows:
            validate_vector(row["a"], f"{self.episode_id}[{row['i']}]")
        return np.array([row["a"] for row in rows], dtype=np.int64)

    def steps(self) -> Iterator[tuple[Path, tuple[int, ...], str | None]]:
        """Yield (frame path, 7-int vector, hl tag) per executed action."""
        rows = self._rows()
        if len(rows) != self.action_count:
            raise SchemaViolation(
                f"{self.episode_id}: {len(rows)} rows, manifest says {self.action_count}")
        for row in rows:
            validate_vector(row["a"], f"{self.episode_id}[{row['i']}]")
        for row in rows:
            frame = self.path / "frames" / f"{row['i']:06d}.pgm"
            yield frame, tuple(row["a"]), row.get("hl")

    def frame(self, index: int) -> np.ndarray:
        return read_pgm(self.path / "frames" / f"{index:06d}.pgm")

    def target(self) -> np.ndarray:
        return read_pgm(self.path / self.manifest["files"]["target"])

    def write_back_actions(self) -> bytes:
        """Re-serialize the parsed rows; byte-identical to the source file."""
        lines = [json.dumps(row, separators=(", ", ": ")) for row in self._rows()]
        return ("\n".join(lines) + "\n").encode()


def _validate_episode(ep_dir: Path) -> EpisodeView:
    mpath = ep_dir / "manifest.json"
    try:
        manifest = json.loads(mpath.read_text())
    except (OSError, ValueError) as exc:
        raise CorruptEpisode(f"{ep_dir.name}: unreadable manifest ({exc})") from None
    for field in REQUIRED_MANIFEST_FIELDS:
        if field not in manifest:
            raise CorruptEpisode(f"{ep_dir.name}: manifest missing '{field}'")
    for rel, digest in manifest["checksums"].items():
        fpath = ep_dir / rel
        if not fpath.is_file():
            raise CorruptEpisode(f"{ep_dir.name}: missing file {rel}")
        if _sha256(fpath) != digest:
            raise CorruptEpisode(f"{ep_dir.name}: checksum mismatch for {rel}")
    frame_count = manifest["files"].get("frame_count", 0)
    for i in range(frame_count):
        if not (ep_dir / "frames" / f"{i:06d}.pgm").is_file():
            raise CorruptEpisode(f"{ep_dir.name}: missing frame {i:06d}")
    return EpisodeView(path=ep_dir, manifest=manifest)


def open_dataset(root: str | Path,
                 statuses: tuple[str, ...] = ("completed",)) -> Iterator[EpisodeView]:
    """Iterate validated episode views in lexicographic id order."""
    root = Path(root)
    manifests = sorted(root.glob("*/manifest.json"))
    if not manifests:
        raise NotADataset(f"{root}: no episode manifests")
    for mpath in manifests:
        status = None
        try:
            status = json.loads(mpath.read_text()).get("status")
        except (OSError, ValueError):
            pass
        if status is not None and statuses and status not in statuses:
            continue
        yield _validate_episode(mpath.parent)
