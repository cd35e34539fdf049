#!/usr/bin/env python3
# Copyright 2026 The SmoothMix Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the 5,000-digit MNIST subset shipped inside the mlxtend wheel as IDX files.

Usage: make_mnist_idx.py OUT_DIR [--wheel PATH]

Without --wheel the wheel is fetched with `pip download --no-deps mlxtend`.
"""
import argparse
import glob
import gzip
import io
import os
import struct
import subprocess
import sys
import tempfile
import zipfile

MEMBER = "mlxtend/data/data/mnist_5k.csv.gz"


def find_wheel(explicit):
    if explicit:
        return explicit
    tmp = tempfile.mkdtemp()
    subprocess.check_call([sys.executable, "-m", "pip", "download", "--no-deps",
                           "-q", "-d", tmp, "mlxtend"])
    return glob.glob(os.path.join(tmp, "mlxtend-*.whl"))[0]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("out_dir")
    ap.add_argument("--wheel")
    args = ap.parse_args()

    with zipfile.ZipFile(find_wheel(args.wheel)) as wheel:
        raw = gzip.decompress(wheel.read(MEMBER)).decode()

    images, labels = bytearray(), bytearray()
    count = 0
    for line in io.StringIO(raw):
        fields = line.strip().split(",")
        if len(fields) != 785:
            continue
        pixels = [int(float(v)) for v in fields[:784]]
        images.extend(bytes(pixels))
        labels.append(int(float(fields[784])))
        count += 1

    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "images-idx3-ubyte"), "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, count, 28, 28))
        f.write(images)
    with open(os.path.join(args.out_dir, "labels-idx1-ubyte"), "wb") as f:
        f.write(struct.pack(">II", 0x00000801, count))
        f.write(labels)
    print(f"wrote {count} images to {args.out_dir}")


if __name__ == "__main__":
    main()
