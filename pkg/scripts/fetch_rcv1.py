#!/usr/bin/env python3
"""Fetch the rcv1 binary-classification dataset for the optional
reproduction tests.

Downloads the two libsvm-format splits from the LIBSVM dataset page and
decompresses them into a target directory as:

    rcv1_train  <- rcv1_test.binary  (677,399 examples; the big split is
                                      conventionally used for training)
    rcv1_test   <- rcv1_train.binary (20,242 examples)

Then run:  SOL_RCV1_DIR=<dir> pytest tests/test_acceptance.py -k rcv1 -v
"""

import bz2
import os
import sys
import urllib.request

BASE = "https://www.csie.ntu.edu.tw/~cjlin/libsvmtools/datasets/binary"
FILES = {
    "rcv1_train": f"{BASE}/rcv1_test.binary.bz2",
    "rcv1_test": f"{BASE}/rcv1_train.binary.bz2",
}


def main(target="data/rcv1"):
    os.makedirs(target, exist_ok=True)
    for name, url in FILES.items():
        out = os.path.join(target, name)
        if os.path.exists(out):
            print(f"{out} already present, skipping")
            continue
        print(f"downloading {url} ...")
        packed = out + ".bz2"
        urllib.request.urlretrieve(url, packed)
        print(f"decompressing {packed} ...")
        with bz2.open(packed, "rb") as src, open(out, "wb") as dst:
            while True:
                block = src.read(1 << 22)
                if not block:
                    break
                dst.write(block)
        os.unlink(packed)
        print(f"wrote {out}")
    print(f"done; export SOL_RCV1_DIR={os.path.abspath(target)}")


if __name__ == "__main__":
    main(*sys.argv[1:])
