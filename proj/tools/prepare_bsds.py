#!/usr/bin/env python3
# Copyright 2026 The segfusion Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rearranges the Berkeley segmentation archives into the per-image layout
read by `segfusion bench`:  <out>/<image id>/<annotator>.{seg,pgm}

  prepare_bsds.py bsds300 BSDS300/ out300/ [--include-gray]
  prepare_bsds.py bsds500 BSR/BSDS500/data/groundTruth out500/ [--splits test]

BSDS300 human .seg files are copied unchanged. BSDS500 ground truth .mat
files are converted to 16-bit PGM label rasters (needs scipy).
"""

import argparse
import pathlib
import shutil
import sys


def prepare_bsds300(src: pathlib.Path, out: pathlib.Path, include_gray: bool) -> int:
    human = src / "human" if (src / "human").is_dir() else src
    modes = ["color", "gray"] if include_gray else ["color"]
    copied = 0
    for mode in modes:
        for seg in sorted((human / mode).glob("*/*.seg")):
            user = seg.parent.name
            dest = out / seg.stem / f"{mode}_{user}.seg"
            dest.parent.mkdir(parents=True, exist_ok=True)
            shutil.copyfile(seg, dest)
            copied += 1
    return copied


def write_pgm16(path: pathlib.Path, labels) -> None:
    h, w = labels.shape
    if labels.min() < 1 or labels.max() > 65535:
        raise ValueError(f"{path}: labels outside 1..65535")
    header = f"P5\n{w} {h}\n65535\n".encode("ascii")
    path.write_bytes(header + labels.astype(">u2").tobytes())


def prepare_bsds500(src: pathlib.Path, out: pathlib.Path, splits) -> int:
    from scipy.io import loadmat

    written = 0
    for split in splits:
        for mat in sorted((src / split).glob("*.mat")):
            gt = loadmat(mat)["groundTruth"]
            for i in range(gt.shape[1]):
                seg = gt[0, i]["Segmentation"][0, 0]
                dest = out / mat.stem / f"user{i:02d}.pgm"
                dest.parent.mkdir(parents=True, exist_ok=True)
                write_pgm16(dest, seg)
                written += 1
    return written


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("dataset", choices=["bsds300", "bsds500"])
    p.add_argument("src", type=pathlib.Path)
    p.add_argument("out", type=pathlib.Path)
    p.add_argument("--include-gray", action="store_true",
                   help="BSDS300: also take the grayscale annotations")
    p.add_argument("--splits", default="train,val,test",
                   help="BSDS500: comma separated subsets")
    a = p.parse_args()
    if a.dataset == "bsds300":
        n = prepare_bsds300(a.src, a.out, a.include_gray)
    else:
        n = prepare_bsds500(a.src, a.out, [s for s in a.splits.split(",") if s])
    if n == 0:
        print(f"no annotations found under {a.src}", file=sys.stderr)
        return 1
    print(f"wrote {n} annotations to {a.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
