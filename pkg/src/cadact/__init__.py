"""cadact: sketch-extrude CAD sequences -> UI action programs -> episodes.

Pipeline stages:

- sequences: parse/validate/serialize quantized 17-field command sequences
- geometry:  dequantize records into canvas sketch geometry + extrude params
- compiler:  lower records into 7-field UI action programs (Table-style codec)
- simulator: deterministic headless UI that executes programs and renders frames
- kernel:    sketch-extrude CSG solids, sampling, rendering, topology queries
- metrics:   Chamfer + 48-way PCA alignment, accuracy metrics, quality filter
- dataset:   episode persistence, stats, batch evaluation
- vqa:       procedural question families with verify()/grade()
"""

from .sequences import CadSequence, parse_sequence, serialize_sequence, validate
from .geometry import lower_record
from .compiler import CompileConfig, compile_sequence
from .simulator import SimConfig, run
from .metrics import align_pca, chamfer, quality_filter

__all__ = [
    "CadSequence",
    "CompileConfig",
    "SimConfig",
    "align_pca",
    "chamfer",
    "compile_sequence",
    "lower_record",
    "parse_sequence",
    "quality_filter",
    "run",
    "serialize_sequence",
    "validate",
]

__version__ = "0.1.0"
