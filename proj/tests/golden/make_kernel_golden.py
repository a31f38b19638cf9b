#!/usr/bin/env python3
"""Independent scalar recomputation of the (1+1) kernel golden file.

S = (x^3 y + x y^3) / 3, lambda = 8, m = 16 midpoints per axis on [-1, 1],
smooth bump cut-off exp(1 - 1/(1 - r^2)) of radius 1. Layout: uint64 rows,
uint64 cols, float64 lambda, then row-major (re, im) float64 pairs.
"""
import cmath
import math
import struct
import sys

LAM = 8.0
M = 16


def bump(t):
    return math.exp(1.0 - 1.0 / (1.0 - t * t)) if abs(t) < 1.0 else 0.0


def main(path):
    h = 2.0 / M
    nodes = [-1.0 + h * (i + 0.5) for i in range(M)]
    out = bytearray(struct.pack("<QQd", M, M, LAM))
    for x in nodes:
        for y in nodes:
            s = (x ** 3 * y + x * y ** 3) / 3.0
            w = bump(math.hypot(x, y))
            z = w * cmath.exp(1j * LAM * s)
            out += struct.pack("<dd", z.real, z.imag)
    with open(path, "wb") as fh:
        fh.write(out)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "kernel_m16_lambda8.bin")
