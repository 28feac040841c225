"""Intent clustering with LLM pseudo-labels.

Thin wrapper over the C++ core in ``intentclust._core``.
"""

import json

from . import _core
from ._core import (
    BackendUnavailable,
    ConfigError,
    IntentclustError,
    LengthMismatch,
    clustering_accuracy,
    evaluate,
    kmeans,
    mock_bow_embed,
    nmi,
    normalize_label,
    paired_t_test,
    parse_classification_reply,
    parse_construction_reply,
    render_classification_prompt,
    render_construction_prompt,
    synthetic_jsonl,
)

__all__ = [
    "BackendUnavailable",
    "ConfigError",
    "IntentclustError",
    "LengthMismatch",
    "clustering_accuracy",
    "evaluate",
    "kmeans",
    "mock_bow_embed",
    "nmi",
    "normalize_label",
    "paired_t_test",
    "parse_classification_reply",
    "parse_construction_reply",
    "render_classification_prompt",
    "render_construction_prompt",
    "run",
    "synthetic_jsonl",
]


def run(config, ablation=False, resume=False):
    """Run the pipeline from a JSON config path; returns (report, manifest) dicts."""
    out = _core.run(str(config), ablation, resume)
    return json.loads(out["report"]), json.loads(out["manifest"])
