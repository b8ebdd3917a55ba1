#!/usr/bin/env python3
"""Independent recurrence oracle for tower geometry.

    geometry_oracle.py report            print paper-example stages 1..2
    geometry_oracle.py check <lab-path>  compare `lab heights` output
"""
import subprocess
import sys
from fractions import Fraction
from math import factorial


def paper_example_params(j, h, alpha=20):
    # Block k spans floor(((k+1)!)^alpha) stages, starting at stage 1.
    k, start = 1, 1
    while True:
        length = factorial(k + 1) ** alpha
        if j < start + length:
            r = factorial(k + 1)
            return r, [10 ** i * h for i in range(1, r + 1)]
        start += length
        k += 1


def odometer_params(j, h):
    return 2, [0, 0]


def explicit_params(stages):
    def params(j, h):
        r, spacers = stages[j - 1]
        return r, spacers
    return params


def stages(h1, params, J):
    out = []
    h, w = h1, Fraction(1)
    for j in range(1, J + 1):
        row = {"j": j, "h": h, "w": w, "measure": h * w}
        if j < J:
            r, s = params(j, h)
            offsets, at = [], 0
            for i in range(r):
                offsets.append(at)
                at += h + s[i]
            row["offsets"] = offsets
            h, w = at, w / r
        out.append(row)
    return out


def fmt(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def report():
    for row in stages(10, paper_example_params, 2):
        print("h", row["j"], row["h"])
        print("measure", row["j"], fmt(row["measure"]))
        if "offsets" in row:
            print("offsets", row["j"], *row["offsets"])


def lab_rows(lab, *args):
    text = subprocess.run([lab, "heights", "--cache", "off", *args], check=True,
                          capture_output=True, text=True).stdout
    lines = [l for l in text.splitlines() if l and not l.startswith("#")]
    return [l.split("\t") for l in lines[1:]]


def check(lab):
    cases = [
        ("paper-example", ["--family", "paper-example", "--J", "6"], stages(10, paper_example_params, 6)),
        ("paper-example-alpha19", ["--family", "paper-example-alpha19", "--J", "6"],
         stages(10, lambda j, h: paper_example_params(j, h, 19), 6)),
        ("odometer", ["--family", "odometer", "--J", "12"], stages(1, odometer_params, 12)),
    ]
    failures = 0
    for name, args, expected in cases:
        got = lab_rows(lab, *args)
        for row, exp in zip(got, expected):
            want = [str(exp["j"]), str(exp["h"]), fmt(exp["w"]), fmt(exp["measure"])]
            if row != want:
                print(f"{name}: stage {exp['j']}: lab {row} oracle {want}")
                failures += 1
        if len(got) != len(expected):
            print(f"{name}: {len(got)} rows, expected {len(expected)}")
            failures += 1
    print("geometry oracle:", "ok" if failures == 0 else f"{failures} mismatches")
    return 1 if failures else 0


if __name__ == "__main__":
    if len(sys.argv) >= 2 and sys.argv[1] == "report":
        report()
    elif len(sys.argv) >= 3 and sys.argv[1] == "check":
        sys.exit(check(sys.argv[2]))
    else:
        print(__doc__)
        sys.exit(2)
