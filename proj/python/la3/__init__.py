"""Molecule caption augmentation and evaluation."""

import json

from ._la3 import (
    DataError,
    Error,
    ExternalError,
    __version__,
    build_prompt,
    canonical_smiles,
    corpus_bleu,
    evaluate_json,
    fingerprint_bits,
    fingerprint_hex,
    is_valid,
    levenshtein,
    load_augmented,
    load_corpus,
    make_split,
    meteor,
    render_report,
    rouge,
    run_cli,
    tanimoto,
    tokenize,
    validate_caption,
)


def evaluate(task, predictions, corpus, split_file=None, strict_scorers=False):
    """Score a prediction TSV against a corpus; returns the report as a dict."""
    return json.loads(evaluate_json(task, predictions, corpus, split_file, strict_scorers))


__all__ = [
    "DataError",
    "Error",
    "ExternalError",
    "__version__",
    "build_prompt",
    "canonical_smiles",
    "corpus_bleu",
    "evaluate",
    "evaluate_json",
    "fingerprint_bits",
    "fingerprint_hex",
    "is_valid",
    "levenshtein",
    "load_augmented",
    "load_corpus",
    "make_split",
    "meteor",
    "render_report",
    "rouge",
    "run_cli",
    "tanimoto",
    "tokenize",
    "validate_caption",
]
