#!/usr/bin/env python3
"""Convert the digits bundled with the npm `mnist` package (v1.1.0) to gzipped IDX files.

The package ships 10,000 MNIST digits as per-class JSON arrays of 784 floats in
[0, 1] rounded to three decimals. Pixels are mapped back to bytes with
round(v * 255).

Usage:
    npm pack mnist@1.1.0 && tar xzf mnist-1.1.0.tgz
    tools/make_mnist_subset.py package/src/digits data/
"""
import argparse
import gzip
import json
import pathlib
import struct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("digits_dir", type=pathlib.Path)
    ap.add_argument("out_dir", type=pathlib.Path)
    args = ap.parse_args()

    images = bytearray()
    labels = bytearray()
    for digit in range(10):
        data = json.loads((args.digits_dir / f"{digit}.json").read_text())["data"]
        assert len(data) % 784 == 0
        for v in data:
            images.append(min(255, max(0, round(v * 255))))
        labels.extend([digit] * (len(data) // 784))

    count = len(labels)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(args.out_dir / "mnist-subset-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, count, 28, 28))
        f.write(bytes(images))
    with gzip.GzipFile(args.out_dir / "mnist-subset-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, count))
        f.write(bytes(labels))
    print(f"wrote {count} samples to {args.out_dir}")


if __name__ == "__main__":
    main()
