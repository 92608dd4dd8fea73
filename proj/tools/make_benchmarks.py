#!/usr/bin/env python3
"""Writes the small combinational benchmark circuits in benchmarks/ as ASCII AIGER."""

import argparse
import pathlib


class Builder:
    def __init__(self, num_inputs):
        self.num_inputs = num_inputs
        self.ands = []
        self.table = {}
        self.outputs = []

    def input(self, i):
        return 2 * (i + 1)

    def and_(self, a, b):
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1:
            return b
        if a == b:
            return a
        if a ^ 1 == b:
            return 0
        key = (a, b)
        if key not in self.table:
            self.ands.append(key)
            self.table[key] = 2 * (self.num_inputs + len(self.ands))
        return self.table[key]

    def or_(self, a, b):
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def xor(self, a, b):
        return self.and_(self.and_(a, b) ^ 1, self.and_(a ^ 1, b ^ 1) ^ 1)

    def mux(self, s, t, e):
        return self.or_(self.and_(s, t), self.and_(s ^ 1, e))

    def text(self):
        m = self.num_inputs + len(self.ands)
        lines = [f"aag {m} {self.num_inputs} 0 {len(self.outputs)} {len(self.ands)}"]
        lines += [str(self.input(i)) for i in range(self.num_inputs)]
        lines += [str(o) for o in self.outputs]
        for i, (a, b) in enumerate(self.ands):
            lines.append(f"{2 * (self.num_inputs + 1 + i)} {b} {a}")
        return "\n".join(lines) + "\n"


def adder4():
    g = Builder(9)
    a = [g.input(i) for i in range(4)]
    b = [g.input(4 + i) for i in range(4)]
    carry = g.input(8)
    for i in range(4):
        s = g.xor(g.xor(a[i], b[i]), carry)
        carry = g.or_(g.and_(a[i], b[i]), g.and_(carry, g.xor(a[i], b[i])))
        g.outputs.append(s)
    g.outputs.append(carry)
    return g


def mult3x3():
    g = Builder(6)
    a = [g.input(i) for i in range(3)]
    b = [g.input(3 + i) for i in range(3)]
    acc = [0] * 6
    for j in range(3):
        carry = 0
        for i in range(3):
            p = g.and_(a[i], b[j])
            s = g.xor(g.xor(acc[i + j], p), carry)
            carry = g.or_(g.and_(acc[i + j], p), g.and_(carry, g.xor(acc[i + j], p)))
            acc[i + j] = s
        k = j + 3
        while carry != 0 and k < 6:
            s = g.xor(acc[k], carry)
            carry = g.and_(acc[k], carry)
            acc[k] = s
            k += 1
    g.outputs.extend(acc)
    return g


def cmp4():
    g = Builder(8)
    a = [g.input(i) for i in range(4)]
    b = [g.input(4 + i) for i in range(4)]
    lt, eq = 0, 1
    for i in range(4):
        bit_lt = g.and_(a[i] ^ 1, b[i])
        bit_eq = g.xor(a[i], b[i]) ^ 1
        lt = g.or_(bit_lt, g.and_(bit_eq, lt))
        eq = g.and_(eq, bit_eq)
    gt = g.and_(lt ^ 1, eq ^ 1)
    g.outputs.extend([lt, eq, gt])
    return g


def parity8():
    g = Builder(8)
    acc = g.input(0)
    for i in range(1, 8):
        acc = g.xor(acc, g.input(i))
    g.outputs.append(acc)
    return g


def mux8():
    g = Builder(11)
    sel = [g.input(i) for i in range(3)]
    data = [g.input(3 + i) for i in range(8)]
    level = data
    for s in sel:
        level = [g.mux(s, level[2 * i + 1], level[2 * i]) for i in range(len(level) // 2)]
    g.outputs.append(level[0])
    return g


def present_sbox():
    table = [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2]
    g = Builder(4)
    x = [g.input(i) for i in range(4)]
    for bit in range(4):
        terms = []
        for m in range(16):
            if (table[m] >> bit) & 1:
                lit = 1
                for i in range(4):
                    lit = g.and_(lit, x[i] if (m >> i) & 1 else x[i] ^ 1)
                terms.append(lit)
        out = 0
        for t in terms:
            out = g.or_(out, t)
        g.outputs.append(out)
    return g


def majority5_chain():
    g = Builder(10)
    x = [g.input(i) for i in range(10)]
    outs = []
    for i in range(0, 10, 5):
        a, b, c, d, e = x[i:i + 5]
        m3 = g.or_(g.or_(g.and_(a, b), g.and_(a, c)), g.and_(b, c))
        outs.append(g.or_(g.and_(m3, g.or_(d, e)), g.and_(d, g.and_(e, g.or_(a, g.or_(b, c))))))
    outs.append(g.xor(outs[0], outs[1]))
    g.outputs.extend(outs)
    return g


BENCHMARKS = {
    "adder4": adder4,
    "mult3x3": mult3x3,
    "cmp4": cmp4,
    "parity8": parity8,
    "mux8": mux8,
    "present_sbox": present_sbox,
    "majority_mix": majority5_chain,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("outdir", type=pathlib.Path)
    args = parser.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, make in BENCHMARKS.items():
        (args.outdir / f"{name}.aag").write_text(make().text())


if __name__ == "__main__":
    main()
