#!/usr/bin/env python3
"""Write superpixel region adjacency graphs for a few MNIST images.

Each image is segmented with SLIC (scikit-image) into ~75 superpixels. Every
superpixel becomes a vertex carrying its mean intensity; superpixels sharing a
pixel border are joined by an edge carrying the relative polar coordinates
(rho, phi) of the higher-id centroid seen from the lower-id centroid.

Output layout (the one `load_rag_dataset` reads):
    <out>/<index>.graph
    <out>/labels.txt       lines "<index> <label>"

Usage:
    python3 tools/make_rag_samples.py data/mnist data/rag_samples --count 24
"""

import argparse
import math
import pathlib
import struct

import numpy as np
from skimage.segmentation import slic


def read_idx(images_path, labels_path):
    raw = images_path.read_bytes()
    magic, count, rows, cols = struct.unpack(">IIII", raw[:16])
    assert magic == 2051
    images = np.frombuffer(raw[16:], dtype=np.uint8).reshape(count, rows, cols)
    lraw = labels_path.read_bytes()
    magic, lcount = struct.unpack(">II", lraw[:8])
    assert magic == 2049 and lcount == count
    return images.astype(np.float64) / 255.0, np.frombuffer(lraw[8:], dtype=np.uint8)


def rag(image, segments):
    seg = slic(image, n_segments=segments, compactness=0.3, channel_axis=None,
               start_label=0)
    ids = np.unique(seg)
    remap = {int(old): new for new, old in enumerate(ids)}
    seg = np.vectorize(remap.get)(seg)
    n = len(ids)
    means, centroids = [], []
    for v in range(n):
        mask = seg == v
        means.append(float(image[mask].mean()))
        rr, cc = np.nonzero(mask)
        centroids.append((float(rr.mean()), float(cc.mean())))
    edges = set()
    h, w = seg.shape
    for r in range(h):
        for c in range(w):
            for dr, dc in ((0, 1), (1, 0)):
                rr, cc = r + dr, c + dc
                if rr < h and cc < w and seg[r, c] != seg[rr, cc]:
                    a, b = sorted((int(seg[r, c]), int(seg[rr, cc])))
                    edges.add((a, b))
    edge_attrs = []
    for a, b in sorted(edges):
        dy = centroids[b][0] - centroids[a][0]
        dx = centroids[b][1] - centroids[a][1]
        edge_attrs.append((a, b, math.hypot(dx, dy), math.atan2(dy, dx)))
    return means, edge_attrs


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("mnist_dir", type=pathlib.Path)
    parser.add_argument("out_dir", type=pathlib.Path)
    parser.add_argument("--count", type=int, default=24)
    parser.add_argument("--segments", type=int, default=75)
    args = parser.parse_args()

    images, labels = read_idx(args.mnist_dir / "t10k-images-idx3-ubyte",
                              args.mnist_dir / "t10k-labels-idx1-ubyte")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for index in range(args.count):
        means, edges = rag(images[index], args.segments)
        with open(args.out_dir / f"{index}.graph", "w") as f:
            f.write(f"graph {len(means)} {len(edges)} 1 2\n")
            for v, m in enumerate(means):
                f.write(f"v {v} {m!r}\n")
            for a, b, rho, phi in edges:
                f.write(f"e {a} {b} {rho!r} {phi!r}\n")
        lines.append(f"{index} {int(labels[index])}\n")
    (args.out_dir / "labels.txt").write_text("".join(lines))
    print(f"wrote {args.count} graphs to {args.out_dir}")


if __name__ == "__main__":
    main()
