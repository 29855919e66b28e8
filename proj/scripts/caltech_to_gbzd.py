#!/usr/bin/env python3
"""Convert caltech101_silhouettes_28_split1.mat into train/valid/test GBZD files."""
import struct
import sys
from pathlib import Path

import numpy as np
from scipy.io import loadmat


def write_gbzd(path, data):
    data = np.asarray(data, dtype=np.uint8)
    n, d = data.shape
    # Images are stored column-major; transpose each to row-major for display.
    side = int(round(d ** 0.5))
    if side * side == d:
        data = data.reshape(n, side, side).transpose(0, 2, 1).reshape(n, d)
    with open(path, "wb") as f:
        f.write(b"GBZD")
        f.write(struct.pack("<II", n, d))
        f.write(np.packbits(data.reshape(-1)).tobytes())


def main():
    mat = loadmat(sys.argv[1])
    out = Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    for key, name in (("train_data", "train"), ("val_data", "valid"), ("test_data", "test")):
        write_gbzd(out / f"{name}.gbzd", mat[key])
        print(f"{name}: {mat[key].shape[0]} examples")


if __name__ == "__main__":
    main()
