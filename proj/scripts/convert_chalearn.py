#!/usr/bin/env python3
"""Convert ChaLearn gesture keypoint exports to a ringres manifest.

Input is an index CSV with a header and the columns `path,label`. Each path,
relative to the index file, is either
  * a CSV of frames x values (any header row is skipped), already holding the
    8 upper-body keypoints as x1,y1,...,x8,y8; or
  * a directory of per-frame OpenPose JSON files (BODY_25 or COCO layout),
    from which the first person's keypoints 0-7 (nose, neck, both shoulders,
    elbows and wrists) are taken as x,y pairs. Confidences are dropped and a
    frame with no detected person repeats the previous frame (zeros at the start).

Labels are shifted by --label-offset so that the smallest class becomes 0; the
helicopter marshalling subset has 9 classes. Sequences keep their native
lengths; the spec's length_policy equalizes them.

Example:
  scripts/convert_chalearn.py data/chalearn/raw/index.csv --out data/chalearn --label-offset 1
  ringres train --spec presets/paper-gesture.spec
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from manifest import write_manifest

KEYPOINTS = 8


def from_openpose(directory):
    frames, previous = [], np.zeros(2 * KEYPOINTS)
    for f in sorted(Path(directory).glob("*.json")):
        people = json.loads(f.read_text()).get("people", [])
        if people:
            flat = np.asarray(people[0]["pose_keypoints_2d"], dtype=np.float64).reshape(-1, 3)
            if flat.shape[0] < KEYPOINTS:
                raise ValueError(f"{f}: only {flat.shape[0]} keypoints")
            previous = flat[:KEYPOINTS, :2].reshape(-1)
        frames.append(previous)
    if not frames:
        raise ValueError(f"{directory}: no OpenPose JSON frames")
    return np.vstack(frames)


def from_csv(path):
    rows = []
    with open(path, newline="") as f:
        for row in csv.reader(f):
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if rows:
                    raise
    series = np.asarray(rows, dtype=np.float64)
    if series.ndim != 2 or series.shape[1] != 2 * KEYPOINTS:
        raise ValueError(f"{path}: expected {2 * KEYPOINTS} columns, got shape {series.shape}")
    return series


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("index", help="CSV with columns path,label")
    p.add_argument("--out", required=True, help="output directory for manifest.json and series/")
    p.add_argument("--label-offset", type=int, default=0, help="subtracted from every label")
    args = p.parse_args(argv)

    base = Path(args.index).parent
    with open(args.index, newline="") as f:
        entries = [(base / r["path"], int(r["label"]) - args.label_offset) for r in csv.DictReader(f)]
    if not entries:
        raise SystemExit(f"{args.index}: no entries")
    if min(label for _, label in entries) < 0:
        raise SystemExit("negative label after --label-offset")
    classes = max(label for _, label in entries) + 1

    def samples():
        for path, label in entries:
            yield (from_openpose(path) if path.is_dir() else from_csv(path)), label

    n = write_manifest(args.out, "classification", 2 * KEYPOINTS, samples(), classes=classes)
    print(f"wrote {n} samples ({classes} classes) to {args.out}/manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
