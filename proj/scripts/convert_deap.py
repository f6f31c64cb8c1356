#!/usr/bin/env python3
"""Convert DEAP preprocessed participant files (s01.dat ... s32.dat) to a ringres manifest.

Each file is the pickled dict from the "data_preprocessed_python" release:
  data   (40 trials, 40 channels, 8064 samples at 128 Hz)
  labels (40 trials, 4) = valence, arousal, dominance, liking

Every trial is cut into consecutive epochs of --epoch-length samples (134 by
default, 60 per trial) and each epoch inherits its trial's rating, so one
participant yields 2400 regression samples with 40 channels. Channel scaling is
left to ringres, which normalizes to [-1, 1] from training-split bounds.

Example:
  scripts/convert_deap.py data/deap/raw/s01.dat --out data/deap
  ringres train --spec presets/paper-eeg.spec
"""

import argparse
import pickle
import sys

import numpy as np

from manifest import write_manifest

LABELS = {"valence": 0, "arousal": 1, "dominance": 2, "liking": 3}


def epochs(path, label_index, epoch_length, epochs_per_trial):
    with open(path, "rb") as f:
        record = pickle.load(f, encoding="latin1")
    data = np.asarray(record["data"], dtype=np.float64)
    labels = np.asarray(record["labels"], dtype=np.float64)
    if data.ndim != 3 or labels.shape[0] != data.shape[0]:
        raise ValueError(f"{path}: unexpected shapes data {data.shape}, labels {labels.shape}")
    for trial in range(data.shape[0]):
        signal = data[trial]  # (channels, samples)
        count = signal.shape[1] // epoch_length
        if epochs_per_trial:
            count = min(count, epochs_per_trial)
        for e in range(count):
            window = signal[:, e * epoch_length:(e + 1) * epoch_length]
            yield window.T, [labels[trial, label_index]]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("inputs", nargs="+", help="participant .dat files")
    p.add_argument("--out", required=True, help="output directory for manifest.json and series/")
    p.add_argument("--label", choices=sorted(LABELS), default="arousal")
    p.add_argument("--epoch-length", type=int, default=134)
    p.add_argument("--epochs-per-trial", type=int, default=60, help="0 keeps every full epoch")
    args = p.parse_args(argv)

    def samples():
        for path in args.inputs:
            yield from epochs(path, LABELS[args.label], args.epoch_length, args.epochs_per_trial)

    first = next(epochs(args.inputs[0], 0, args.epoch_length, 1))[0]
    n = write_manifest(args.out, "regression", first.shape[1], samples(), target_dim=1)
    print(f"wrote {n} samples to {args.out}/manifest.json")
    return 0


if __name__ == "__main__":
    sys.exit(main())
