"""Streaming speaker clustering with bounded per-step cost."""

from ._core import (
    ClusteringConfig,
    EmbeddingRecord,
    Error,
    InvalidConfigError,
    BoundOrderingError,
    DimensionMismatchError,
    NoScoredTimeError,
    InfeasibleAngleError,
    MalformedLineError,
    RttmSegment,
    Session,
    ahc_cluster,
    compute_der,
    generate,
    parse_rttm,
    route,
    speaker_count_stats,
    spectral_cluster,
    sweep,
    write_rttm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
