"""Regenerate the bundled category and algebra fixture files.

Run from the repository root: ``python3 tools/make_fixtures.py``.
"""
from __future__ import annotations

import cmath
import itertools
import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "fullcentre" / "fixtures"


def num(z: complex) -> list[str]:
    z = complex(z)
    return [repr(z.real), repr(z.imag)]


def fusion_from_rule(labels, rule):
    n = len(labels)
    return [[labels[a], labels[b], labels[c], rule(a, b, c)]
            for a, b in itertools.product(range(1, n), repeat=2) for c in range(n) if rule(a, b, c)]


def f_entries(labels, rule, value):
    """All multiplicity-free F entries with a, b, c non-unit; ``value`` overrides 1."""
    n = len(labels)
    out = []
    for a, b, c, d in itertools.product(range(1, n), range(1, n), range(1, n), range(n)):
        for e, f in itertools.product(range(n), repeat=2):
            if rule(a, b, e) and rule(e, c, d) and rule(b, c, f) and rule(a, f, d):
                v = value(a, b, c, d, e, f)
                out.append([labels[x] for x in (a, b, c, d, e, f)] + [0, 0, 0, 0] + num(v))
    return out


def r_entries(labels, rule, value):
    n = len(labels)
    return [[labels[a], labels[b], labels[c], 0, 0] + num(value(a, b, c))
            for a, b, c in itertools.product(range(1, n), range(1, n), range(n)) if rule(a, b, c)]


def category(name, labels, dual, rule, fval, rval, pivotal=None):
    full = lambda a, b, c: (1 if (a == 0 and b == c) or (b == 0 and a == c) else rule(a, b, c))  # noqa: E731
    doc = {"name": name, "labels": labels,
           "dual": {labels[i]: labels[dual[i]] for i in range(len(labels))},
           "fusion": fusion_from_rule(labels, full),
           "F": f_entries(labels, full, fval),
           "R": r_entries(labels, full, rval)}
    if pivotal:
        doc["pivotal"] = {k: num(v) for k, v in pivotal.items()}
    return doc


def trivial():
    return {"name": "trivial", "labels": ["1"], "dual": {"1": "1"}, "fusion": [], "F": [], "R": []}


def semion():
    return category("semion", ["1", "s"], [0, 1],
                    lambda a, b, c: int((a + b) % 2 == c),
                    lambda *k: -1.0 if k[:4] == (1, 1, 1, 1) else 1.0,
                    lambda a, b, c: 1j,
                    pivotal={"s": -1.0})


def fibonacci():
    phi = (1 + math.sqrt(5)) / 2
    fmat = {(0, 0): 1 / phi, (0, 1): phi ** -0.5, (1, 0): phi ** -0.5, (1, 1): -1 / phi}

    def rule(a, b, c):
        if a == 0:
            return int(b == c)
        if b == 0:
            return int(a == c)
        return 1

    def fval(a, b, c, d, e, f):
        if (a, b, c, d) == (1, 1, 1, 1):
            return fmat[(e, f)]
        return 1.0

    def rval(a, b, c):
        return cmath.exp(-4j * math.pi / 5) if c == 0 else cmath.exp(3j * math.pi / 5)

    return category("fibonacci", ["1", "tau"], [0, 1], rule, fval, rval)


def ising():
    s2 = 1 / math.sqrt(2)

    def rule(a, b, c):  # 0 = 1, 1 = sigma, 2 = psi
        if a == 0:
            return int(b == c)
        if b == 0:
            return int(a == c)
        if a == 1 and b == 1:
            return int(c in (0, 2))
        if {a, b} == {1, 2}:
            return int(c == 1)
        return int(c == 0)  # psi psi

    def fval(a, b, c, d, e, f):
        if (a, b, c, d) == (1, 1, 1, 1):
            return s2 * (-1.0 if (e, f) == (2, 2) else 1.0)
        if (a, b, c, d) in ((2, 1, 2, 1), (1, 2, 1, 2)):
            return -1.0
        return 1.0

    def rval(a, b, c):
        if (a, b) == (1, 1):
            return cmath.exp(-1j * math.pi / 8) if c == 0 else cmath.exp(3j * math.pi / 8)
        if {a, b} == {1, 2}:
            return -1j
        return -1.0  # psi psi

    return category("ising", ["1", "sigma", "psi"], [0, 1, 2], rule, fval, rval)


def toric():
    bits = [(0, 0), (1, 0), (0, 1), (1, 1)]

    def rule(a, b, c):
        x, y = bits[a], bits[b]
        return int(bits[c] == ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2))

    def rval(a, b, c):
        return (-1.0) ** (bits[a][1] * bits[b][0])

    return category("toric", ["1", "e", "m", "f"], [0, 1, 2, 3], rule, lambda *k: 1.0, rval)


def broken_pentagon():
    doc = fibonacci()
    doc["name"] = "broken_pentagon"
    for entry in doc["F"]:
        if entry[:6] == ["tau"] * 4 + ["1", "tau"]:
            entry[10] = repr(-float(entry[10]))
    return doc


def matrix_algebra(n):
    """Mat_n in Vect: matrix units E_ij, index i * n + j; E_ij E_kl = delta_jk E_il."""
    d = n * n
    m = [[0.0] * (d * d) for _ in range(d)]
    for i, j, l in itertools.product(range(n), repeat=3):
        m[i * n + l][(i * n + j) * d + (j * n + l)] = 1.0
    eta = [[1.0 if i == j else 0.0] for i in range(n) for j in range(n)]
    return {"name": f"Mat_{n}", "category": "trivial.json", "object": [{"1": d}],
            "m": {"1": [[num(x) for x in row] for row in m]},
            "eta": {"1": [[num(x) for x in row] for row in eta]}}


def unit_algebra(catfile, name="1"):
    return {"name": name, "category": catfile, "object": [{"1": 1}],
            "m": {"1": [[num(1.0)]]}, "eta": {"1": [[num(1.0)]]}}


def z2_algebra(catfile, label, name):
    """1 (+) x for an invertible boson x with trivial self-braiding: group algebra in the tree basis."""
    # word A (x) A, label k: left-combed basis (e, a) ordered lexicographically over admissible pairs
    blocks = {"1": [[num(1.0), num(1.0)]], label: [[num(1.0), num(1.0)]]}
    return {"name": name, "category": catfile, "object": [{"1": 1, label: 1}],
            "m": blocks, "eta": {"1": [[num(1.0)]]}}


def column_module():
    """C^2 as a left Mat_2-module: E_ij v_l = delta_jl v_i."""
    n = 2
    rho = [[0.0] * (n * n * n) for _ in range(n)]
    for i, j in itertools.product(range(n), repeat=2):
        rho[i][(i * n + j) * n + j] = 1.0
    return {"name": "C2", "algebra": "mat2.json", "object": [{"1": 2}], "side": "left",
            "action": {"1": [[num(x) for x in row] for row in rho]}}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    files = {
        "trivial.json": trivial(), "semion.json": semion(), "fibonacci.json": fibonacci(),
        "ising.json": ising(), "toric.json": toric(), "broken_pentagon.json": broken_pentagon(),
        "vect_unit.json": unit_algebra("trivial.json", "Mat_1"),
        "mat2.json": matrix_algebra(2), "mat3.json": matrix_algebra(3),
        "toric_unit.json": unit_algebra("toric.json"),
        "toric_1e.json": z2_algebra("toric.json", "e", "1+e"),
        "toric_1m.json": z2_algebra("toric.json", "m", "1+m"),
        "ising_unit.json": unit_algebra("ising.json"),
        "fibonacci_unit.json": unit_algebra("fibonacci.json"),
        "semion_unit.json": unit_algebra("semion.json"),
        "c2_module.json": column_module(),
    }
    for name, doc in files.items():
        (OUT / name).write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(files)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
