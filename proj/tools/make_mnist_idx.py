#!/usr/bin/env python3
"""Convert the digit samples bundled with the npm `mnist` package to IDX files.

The package ships 10 000 MNIST digits as JSON arrays of 784 intensities in
[0, 1] (one file per class). This script shuffles them with a fixed seed and
writes a standard IDX layout:

    train-images-idx3-ubyte / train-labels-idx1-ubyte   (first 8 000)
    t10k-images-idx3-ubyte  / t10k-labels-idx1-ubyte    (last 2 000)

Usage:
    npm pack mnist && tar xzf mnist-*.tgz
    python3 tools/make_mnist_idx.py package/src/digits data/mnist
"""

import argparse
import json
import pathlib
import random
import struct

SIDE = 28


def write_images(path, images):
    with open(path, "wb") as f:
        f.write(struct.pack(">IIII", 2051, len(images), SIDE, SIDE))
        for img in images:
            f.write(bytes(img))


def write_labels(path, labels):
    with open(path, "wb") as f:
        f.write(struct.pack(">II", 2049, len(labels)))
        f.write(bytes(labels))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("digits_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--train", type=int, default=8000)
    parser.add_argument("--seed", type=int, default=2019)
    args = parser.parse_args()

    samples = []
    for label in range(10):
        raw = json.loads((args.digits_dir / f"{label}.json").read_text())["data"]
        count = len(raw) // (SIDE * SIDE)
        for k in range(count):
            chunk = raw[k * SIDE * SIDE:(k + 1) * SIDE * SIDE]
            pixels = [min(255, max(0, round(v * 255))) for v in chunk]
            samples.append((pixels, label))

    random.Random(args.seed).shuffle(samples)
    train, test = samples[:args.train], samples[args.train:]

    args.out_dir.mkdir(parents=True, exist_ok=True)
    for prefix, part in (("train", train), ("t10k", test)):
        write_images(args.out_dir / f"{prefix}-images-idx3-ubyte", [p for p, _ in part])
        write_labels(args.out_dir / f"{prefix}-labels-idx1-ubyte", [l for _, l in part])
    print(f"wrote {len(train)} train / {len(test)} test images to {args.out_dir}")


if __name__ == "__main__":
    main()
