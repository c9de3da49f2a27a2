"""Prompt-strategy benchmark harness for explainable sarcasm detection."""

from ._core import (
    SarcbenchError,
    accuracy,
    build_kg_system_prompt,
    build_prompt,
    cosine_similarity,
    dataset_stats,
    error_counts,
    extract_explanation,
    few_shot_exemplars,
    load_dataset,
    paired_permutation_test,
    parse_action_blob,
    parse_verdict,
    word_count,
)

__all__ = [
    "SarcbenchError",
    "accuracy",
    "build_kg_system_prompt",
    "build_prompt",
    "cosine_similarity",
    "dataset_stats",
    "error_counts",
    "extract_explanation",
    "few_shot_exemplars",
    "load_dataset",
    "paired_permutation_test",
    "parse_action_blob",
    "parse_verdict",
    "word_count",
]
