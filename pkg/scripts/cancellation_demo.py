#!/usr/bin/env python3
"""Cancellation experiment at double-equivalent (53-bit) fixed precision.

Shows the U-shaped error of the naive sine (recomputed from the cosine every
step, subtracting two values that both approach 1) against the stable sine
(one division per step): the naive route bottoms out around depth 13 and then
loses everything, while the stable route rides down to its rounding floor.
"""

import argparse

from radpi import PrecisionContext, Seed, cancellation_audit
from radpi.cli import render_audit


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--audited-bits", type=int, default=53)
    parser.add_argument("--k", type=int, default=40)
    parser.add_argument("--format", choices=["text", "csv", "json"], default="text")
    args = parser.parse_args()

    reference = PrecisionContext(max(256, 4 * args.audited_bits))
    rows = cancellation_audit(Seed(2, 2, 1), args.k, args.audited_bits, reference)
    meta = {
        "seed": "m=2, s=2, sign=+",
        "audited_bits": args.audited_bits,
        "reference_bits": reference.scale_bits,
    }
    print(render_audit(rows, meta, args.format), end="")


if __name__ == "__main__":
    main()
