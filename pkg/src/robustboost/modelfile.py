"""Versioned model persistence.

Models are stored as indented JSON (nested key/value records with
arrays): human-readable, diffable in golden tests, and float values
round-trip exactly through repr.  Unknown future format versions are
rejected at load.
"""

from __future__ import annotations

import json

from .boosting import Ensemble
from .errors import DataError
from .losses import LossSpec
from .trees import Tree

FORMAT_VERSION = 1


def model_record(ensemble: Ensemble, method: str, loss_stage1: LossSpec | None,
                 loss_stage2: LossSpec | None, manifest: dict) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "method": method,
        "loss": {
            "stage1": loss_stage1.to_record() if loss_stage1 else None,
            "stage2": loss_stage2.to_record() if loss_stage2 else None,
        },
        "sigma_hat": ensemble.sigma_hat,
        "gamma": ensemble.gamma,
        "stage_boundary": ensemble.stage_boundary,
        "stop_index": ensemble.stop_index,
        "init": ensemble.init.to_record(),
        "steps": [{"alpha": float(a), "tree": t.to_record()}
                  for a, t in ensemble.steps],
        "manifest": manifest,
    }


def save_model(path, ensemble: Ensemble, method: str,
               loss_stage1: LossSpec | None = None,
               loss_stage2: LossSpec | None = None,
               manifest: dict | None = None):
    rec = model_record(ensemble, method, loss_stage1, loss_stage2,
                       manifest or {})
    with open(path, "w") as fh:
        json.dump(rec, fh, indent=1)
        fh.write("\n")


def load_model(path):
    """Load a model file; returns (ensemble, record)."""
    with open(path) as fh:
        try:
            rec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not a valid model file ({exc})") from None
    version = rec.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(
            f"{path}: unsupported model format version {version!r} "
            f"(this build reads version {FORMAT_VERSION})"
        )
    ensemble = Ensemble(
        init=Tree.from_record(rec["init"]),
        steps=[(step["alpha"], Tree.from_record(step["tree"]))
               for step in rec["steps"]],
        gamma=rec["gamma"],
        sigma_hat=rec["sigma_hat"],
        stage_boundary=rec["stage_boundary"],
        stop_index=rec["stop_index"],
    )
    return ensemble, rec
