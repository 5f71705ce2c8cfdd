"""Reference consumer for episode datasets."""

from .loader import (
    CorruptEpisode,
    EpisodeView,
    NotADataset,
    SchemaViolation,
    open_dataset,
    read_pgm,
    validate_vector,
)

__all__ = [
    "CorruptEpisode",
    "EpisodeView",
    "NotADataset",
    "SchemaViolation",
    "open_dataset",
    "read_pgm",
    "validate_vector",
]

__version__ = "0.1.0"
