import json

from ._keygest import (
    Config,
    Dataset,
    KeygestError,
    Model,
    density_peaks,
    entropy_curve,
    extract_keyframes,
    fuse,
    fusion_weights,
    generate_synthetic,
    image_entropy,
    lbp_top,
    load_dataset,
    load_model,
    local_extrema,
    motion_feature,
    train,
)
from ._keygest import evaluate_json as _evaluate_json


def evaluate(dataset, config=None, ablation=False, timing=False):
    """Repeated stratified evaluation; returns the report as a dict."""
    return json.loads(_evaluate_json(dataset, config if config is not None else Config(), ablation, timing))


__all__ = [
    "Config",
    "Dataset",
    "KeygestError",
    "Model",
    "density_peaks",
    "entropy_curve",
    "evaluate",
    "extract_keyframes",
    "fuse",
    "fusion_weights",
    "generate_synthetic",
    "image_entropy",
    "lbp_top",
    "load_dataset",
    "load_model",
    "local_extrema",
    "motion_feature",
    "train",
]
