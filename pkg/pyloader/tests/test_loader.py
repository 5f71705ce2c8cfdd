"""Contract tests: the loader accepts exactly what the generator CLI emits and
rejects five constructed corruptions."""

import hashlib
import json
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from pyloader import (
    CorruptEpisode,
    NotADataset,
    SchemaViolation,
    open_dataset,
)


@pytest.fixture(scope="session")
def fixture_dataset(tmp_path_factory):
    """Build a small dataset through the generator's public CLI."""
    root = tmp_path_factory.mktemp("contract")
    corpus = root / "corpus.cadseq"
    gen = subprocess.run(
        [sys.executable, "-c",
         "from cadact.synth import generate_corpus, corpus_text;"
         "import sys; sys.stdout.write(corpus_text(generate_corpus(3, base_seed=800)))"],
        capture_output=True, text=True)
    if gen.returncode != 0:
        pytest.skip("generator CLI unavailable: " + gen.stderr[:200])
    corpus.write_text(gen.stdout)
    out = root / "ds"
    built = subprocess.run(
        [sys.executable, "-m", "cadact.cli", "build", "--input", str(corpus),
         "--out", str(out), "--seed", "3", "--frame-px", "96", "--samples", "512"],
        capture_output=True, text=True)
    assert built.returncode == 0, built.stderr
    return out


def corrupt_copy(fixture: Path, tmp_path: Path, name: str) -> Path:
    dst = tmp_path / name
    shutil.copytree(fixture, dst)
    return dst


def first_episode(root: Path) -> Path:
    return sorted(p.parent for p in root.glob("*/manifest.json"))[0]


def test_opens_every_emitted_episode(fixture_dataset):
    views = list(open_dataset(fixture_dataset))
    assert len(views) == 3
    ids = [v.episode_id for v in views]
    assert ids == sorted(ids)
    for v in views:
        steps = list(v.steps())
        assert len(steps) == v.action_count
        for frame, vec, hl in steps:
            assert frame.is_file()
            assert len(vec) == 7
        arr = v.actions()
        assert arr.shape == (v.action_count, 7)
        assert v.target().ndim == 2
        assert v.frame(0).shape == v.target().shape


def test_hl_tags_present(fixture_dataset):
    view = next(open_dataset(fixture_dataset))
    tags = [hl for _, _, hl in view.steps() if hl]
    assert "eos" in tags
    assert any(t == "extrude" for t in tags)


def test_write_back_byte_identical(fixture_dataset):
    for view in open_dataset(fixture_dataset):
        original = (view.path / "actions.jsonl").read_bytes()
        assert view.write_back_actions() == original


def test_empty_dir_not_a_dataset(tmp_path):
    with pytest.raises(NotADataset):
        list(open_dataset(tmp_path))


def test_rejects_truncated_frame(fixture_dataset, tmp_path):
    ds = corrupt_copy(fixture_dataset, tmp_path, "trunc")
    ep = first_episode(ds)
    frame = ep / "frames" / "000000.pgm"
    frame.write_bytes(frame.read_bytes()[:-40])
    with pytest.raises(CorruptEpisode):
        list(open_dataset(ds))


def test_rejects_edited_vector(fixture_dataset, tmp_path):
    ds = corrupt_copy(fixture_dataset, tmp_path, "edited")
    ep = first_episode(ds)
    lines = (ep / "actions.jsonl").read_text().splitlines()
    row = json.loads(lines[0])
    row["a"] = [0, 1, 1, -1, -1, -1, -1]
    lines[0] = json.dumps(row, separators=(", ", ": "))
    (ep / "actions.jsonl").write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptEpisode):  # checksum no longer matches
        list(open_dataset(ds))


def test_rejects_missing_manifest_field(fixture_dataset, tmp_path):
    ds = corrupt_copy(fixture_dataset, tmp_path, "missing")
    ep = first_episode(ds)
    manifest = json.loads((ep / "manifest.json").read_text())
    del manifest["action_count"]
    (ep / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(CorruptEpisode):
        list(open_dataset(ds))


def test_rejects_checksum_mismatch(fixture_dataset, tmp_path):
    ds = corrupt_copy(fixture_dataset, tmp_path, "sum")
    ep = first_episode(ds)
    manifest = json.loads((ep / "manifest.json").read_text())
    manifest["checksums"]["actions.jsonl"] = "0" * 64
    (ep / "manifest.json").write_text(json.dumps(manifest))
    with pytest.raises(CorruptEpisode):
        list(open_dataset(ds))


def test_rejects_click_with_params(fixture_dataset, tmp_path):
    # Forge a pattern-invalid vector *and* fix up the checksum, so the schema
    # layer itself must catch it.
    ds = corrupt_copy(fixture_dataset, tmp_path, "click")
    ep = first_episode(ds)
    lines = (ep / "actions.jsonl").read_text().splitlines()
    row = json.loads(lines[0])
    row["a"] = [4, 0, -1, -1, -1, -1, -1]
    lines[0] = json.dumps(row, separators=(", ", ": "))
    body = "\n".join(lines) + "\n"
    (ep / "actions.jsonl").write_text(body)
    manifest = json.loads((ep / "manifest.json").read_text())
    manifest["checksums"]["actions.jsonl"] = hashlib.sha256(body.encode()).hexdigest()
    (ep / "manifest.json").write_text(json.dumps(manifest))
    views = list(open_dataset(ds))
    bad = [v for v in views if v.path == ep]
    assert bad
    with pytest.raises(SchemaViolation):
        list(bad[0].steps())
