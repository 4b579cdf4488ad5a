#!/usr/bin/env python3
"""Regenerates acn_primitives.txt.

Each line is `op offset args... -> hex end_bit`. The encoder starts at bit
`offset` of a zeroed buffer just large enough for the result. This script
builds the wire image as a string of '0'/'1' characters and shares nothing
with the C++ code.
"""
import random
import struct
import sys


def bits(v, n):
    return format(v, "0{}b".format(n)) if n else ""


def bits_needed(r):
    return r.bit_length()


def pack(offset, payload):
    s = "0" * offset + payload
    nbytes = (len(s) + 7) // 8
    s = s.ljust(nbytes * 8, "0")
    data = bytes(int(s[i:i + 8], 2) for i in range(0, len(s), 8))
    return data.hex() or "-", offset + len(payload)


def cpwn(v, lo, hi):
    return bits(v - lo, bits_needed(hi - lo))


def twos(v, n):
    return bits(v & ((1 << n) - 1), n)


def real(pattern, width, endian):
    raw = pattern.to_bytes(width // 8, "big" if endian == "big" else "little")
    return "".join(bits(b, 8) for b in raw)


def ascii_null(s, pattern):
    return "".join(bits(b, 8) for b in s + pattern)


def char_index(s, alphabet, lo=None, hi=None):
    width = bits_needed(len(alphabet) - 1)
    out = "" if lo is None else cpwn(len(s), lo, hi)
    return out + "".join(bits(alphabet.index(c), width) for c in s)


def main():
    rng = random.Random(2024)
    lines = []

    def emit(args, payload, offset):
        hexs, end = pack(offset, payload)
        lines.append("{} -> {} {}".format(" ".join(str(a) for a in args), hexs, end))

    fixed = [
        (0, 0, 0, 0), (5, 0, 7, 0), (255, 0, 255, 3), (1000, 1000, 1000, 1),
        (6, 2, 9, 7), (2**40, 0, 2**48, 13),
    ]
    for v, lo, hi, off in fixed:
        emit(["cpwn", off, v, lo, hi], cpwn(v, lo, hi), off)
    for _ in range(40):
        lo = rng.randrange(0, 1 << rng.randrange(1, 63))
        hi = lo + rng.randrange(0, 1 << rng.randrange(0, 62 - lo.bit_length() + 1))
        v = rng.randint(lo, hi)
        off = rng.randrange(32)
        emit(["cpwn", off, v, lo, hi], cpwn(v, lo, hi), off)
    for _ in range(40):
        lo = rng.randint(-(1 << 40), 1 << 20)
        hi = lo + rng.randrange(1 << rng.randrange(1, 40))
        v = rng.randint(lo, hi)
        off = rng.randrange(32)
        emit(["cwn", off, v, lo, hi], bits(v - lo, bits_needed(hi - lo)), off)
    for width in (8, 16, 32, 64):
        for _ in range(8):
            v = rng.randrange(1 << width)
            off = rng.randrange(32)
            emit(["uint_aligned", off, v, width], bits(v, width), off)
            s = rng.randint(-(1 << (width - 1)), (1 << (width - 1)) - 1)
            emit(["twos_aligned", off, s, width], twos(s, width), off)
    for _ in range(40):
        n = rng.randint(1, 64)
        off = rng.randrange(32)
        v = rng.randrange(1 << n)
        emit(["uint", off, v, n], bits(v, n), off)
        s = rng.randint(-(1 << (n - 1)), (1 << (n - 1)) - 1)
        emit(["twos", off, s, n], twos(s, n), off)
    specials32 = [struct.unpack(">I", struct.pack(">f", 1.5))[0], 0x7FC00001, 0xFF800000, 0x80000000]
    specials64 = [struct.unpack(">Q", struct.pack(">d", -2.25))[0], 0x7FF8000000000123,
                  0x7FF0000000000000, 0x0000000000000001]
    for width, pats in ((32, specials32), (64, specials64)):
        for p in pats + [rng.randrange(1 << width) for _ in range(4)]:
            for endian in ("big", "little"):
                off = rng.randrange(32)
                emit(["real", off, p, width, endian], real(p, width, endian), off)
    for _ in range(30):
        plen = rng.randint(1, 3)
        pattern = bytes(rng.randrange(128, 256) for _ in range(plen)) if rng.random() < 0.5 \
            else bytes([0] * plen)
        s = bytes(rng.randrange(1, 128) for _ in range(rng.randrange(0, 10)))
        off = rng.randrange(32)
        emit(["ascii_null", off, s.hex() or "-", 10, pattern.hex()], ascii_null(s, pattern), off)
    alphabets = ["AB", "ABC", "0123456789", "abcdefghijklmnopqrstuvwxyz"]
    for _ in range(30):
        alpha = rng.choice(alphabets)
        lo = rng.randrange(0, 4)
        hi = lo + rng.randrange(0, 8)
        s = "".join(rng.choice(alpha) for _ in range(rng.randint(lo, hi)))
        off = rng.randrange(32)
        emit(["char_internal", off, alpha.encode().hex(), s.encode().hex() or "-", lo, hi],
             char_index(s, alpha, lo, hi), off)
        emit(["char_external", off, alpha.encode().hex(), s.encode().hex() or "-", hi],
             char_index(s, alpha), off)
    for off in range(0, 33, 3):
        for m in (8, 16, 32):
            emit(["align", off, m], "0" * ((m - off % m) % m), off)

    out = sys.argv[1] if len(sys.argv) > 1 else "acn_primitives.txt"
    with open(out, "w") as f:
        f.write("# generated by make_primitive_vectors.py\n")
        f.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
