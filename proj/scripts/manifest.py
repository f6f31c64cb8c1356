"""Shared writer for ringres dataset manifests."""

import json
from pathlib import Path

import numpy as np


def write_manifest(out_dir, task, channels, samples, classes=None, target_dim=None):
    """Writes out_dir/manifest.json and one CSV per sample under out_dir/series/.

    samples yields (series, target) pairs: series is a (T, channels) array and
    target is an int label (classification) or a sequence of floats (regression).
    """
    out = Path(out_dir)
    (out / "series").mkdir(parents=True, exist_ok=True)
    entries = []
    for i, (series, target) in enumerate(samples):
        series = np.asarray(series, dtype=np.float64)
        if series.ndim != 2 or series.shape[1] != channels:
            raise ValueError(f"sample {i}: expected shape (T, {channels}), got {series.shape}")
        name = f"series/{i:06d}.csv"
        np.savetxt(out / name, series, delimiter=",", fmt="%.17g")
        if task == "classification":
            entries.append({"series": name, "label": int(target)})
        else:
            entries.append({"series": name, "target": [float(v) for v in np.atleast_1d(target)]})
    manifest = {"format": "ringres-manifest", "version": 1, "task": task, "channels": channels}
    if task == "classification":
        manifest["classes"] = classes
    else:
        manifest["target_dim"] = target_dim
    manifest["samples"] = entries
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return len(entries)
