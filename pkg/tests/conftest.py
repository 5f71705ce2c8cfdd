import pytest

from cadact.compiler import CompileConfig
from cadact.dataset import BuildConfig, cmd_build
from cadact.synth import generate_sequence


@pytest.fixture(scope="session")
def toy_dataset(tmp_path_factory):
    """30 built episodes shared across stats/VQA/loader/acceptance tests."""
    root = tmp_path_factory.mktemp("toyds")
    seqs = [generate_sequence(500 + i) for i in range(30)]
    cfg = BuildConfig(out_dir=root, seed=11, frame_px=128, n_samples=2048,
                      compile=CompileConfig())
    summary = cmd_build(seqs, cfg)
    return root, summary
