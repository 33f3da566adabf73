"""Regenerate crates/core/data/atlas3d.cat from spglib's standard settings.

Each group is taken in its default International Tables setting, moved to a
primitive basis when the lattice is centred, and reduced to a small set of
generators modulo the lattice.  IT 113 uses the generators from the
tetragonal example in the documentation.
"""
import sys
from fractions import Fraction as F

import numpy as np
import spglib

CENTRING = {
    "P": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    "A": [[1, 0, 0], [0, F(1, 2), F(-1, 2)], [0, F(1, 2), F(1, 2)]],
    "B": [[F(1, 2), 0, F(-1, 2)], [0, 1, 0], [F(1, 2), 0, F(1, 2)]],
    "C": [[F(1, 2), F(-1, 2), 0], [F(1, 2), F(1, 2), 0], [0, 0, 1]],
    "I": [[F(-1, 2), F(1, 2), F(1, 2)], [F(1, 2), F(-1, 2), F(1, 2)], [F(1, 2), F(1, 2), F(-1, 2)]],
    "F": [[0, F(1, 2), F(1, 2)], [F(1, 2), 0, F(1, 2)], [F(1, 2), F(1, 2), 0]],
    "R": [[F(2, 3), F(-1, 3), F(-1, 3)], [F(1, 3), F(1, 3), F(-2, 3)], [F(1, 3), F(1, 3), F(1, 3)]],
}


def mat(rows):
    return [[F(x) for x in r] for r in rows]


def mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def mulv(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def inv3(m):
    a = np.array([[float(x) for x in r] for r in m])
    det = F(round(np.linalg.det(a) * 216), 216)
    adj = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            minor = [[m[r][c] for c in range(3) if c != j] for r in range(3) if r != i]
            adj[j][i] = (-1) ** (i + j) * (minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0])
    return [[x / det for x in r] for r in adj]


def transpose(m):
    return [list(r) for r in zip(*m)]


def gram_for(number):
    if number <= 2:
        return mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    if 143 <= number <= 194:
        return mat([[2, -1, 0], [-1, 2, 0], [0, 0, 2]])
    return mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def frac(v):
    return [x - (x.numerator // x.denominator) for x in v]


def key(op):
    r, t = op
    return (tuple(tuple(x) for x in r), tuple(t))


def compose(a, b):
    ra, ta = a
    rb, tb = b
    return (mul(ra, rb), frac([x + y for x, y in zip(ta, mulv(ra, tb))]))


def closure(gens):
    ident = (mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), [F(0)] * 3)
    seen = {key(ident): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                k = key(y)
                if k not in seen:
                    seen[k] = y
                    nxt.append(y)
        frontier = nxt
    return seen


def term(c, name):
    if c == 1:
        return "+" + name
    if c == -1:
        return "-" + name
    return ("+" if c > 0 else "-") + str(abs(c)) + name


def fmt(op):
    r, t = op
    out = []
    for i in range(3):
        s = "".join(term(int(r[i][j]), "xyz"[j]) for j in range(3) if r[i][j] != 0)
        if t[i] != 0:
            s += "+" + str(t[i])
        out.append(s.lstrip("+"))
    return ",".join(out)


def ops_for(number):
    if number == 113:
        return "P", mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]]), [
            (mat([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]), [F(1, 2), F(1, 2), F(0)]),
            (mat([[0, 1, 0], [-1, 0, 0], [0, 0, -1]]), [F(1, 2), F(0), F(0)]),
            (mat([[-1, 0, 0], [0, 1, 0], [0, 0, -1]]), [F(0), F(1, 2), F(0)]),
        ]
    sgt = spglib.get_spacegroup_type_from_symmetry if False else None
    hall = None
    for h in range(1, 531):
        t = spglib.get_spacegroup_type(h)
        if t.number == number:
            hall = h
            break
    t = spglib.get_spacegroup_type(hall)
    letter = t.hall_symbol.lstrip("-")[0]
    sym = spglib.get_symmetry_from_database(hall)
    ops = []
    for r, tr in zip(sym["rotations"], sym["translations"]):
        ops.append((mat(r.tolist()), [F(round(x * 12), 12) for x in tr]))
    return letter, mat(CENTRING[letter]), ops, t


def main():
    out = ["# Three-dimensional space-group atlas: one entry per IT number.",
           "# Generated by tools/gen_atlas3d.py from the standard ITA settings;",
           "# centred lattices are rewritten in a primitive basis.", ""]
    for number in range(1, 231):
        res = ops_for(number)
        if number == 113:
            letter, m, ops = res
            name = "P-42_1m"
            src = "tetragonal worked example generators"
            gens = ops
        else:
            letter, m, ops, t = res
            name = t.international_short
            src = "ITA default setting, Hall '%s'" % t.hall_symbol
            minv = inv3(m)
            prim = []
            for r, tr in ops:
                r2 = mul(minv, mul(r, m))
                assert all(x.denominator == 1 for row in r2 for x in row), (number, r2)
                t2 = frac(mulv(minv, tr))
                prim.append((r2, t2))
            uniq = {}
            for op in prim:
                uniq.setdefault(key(op)[0], op)
            full = list(uniq.values())
            full.sort(key=lambda op: (sum(abs(x) for row in op[0] for x in row), key(op)))
            gens = []
            target = len(full)
            ident = mat([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
            for op in full:
                if op[0] == ident:
                    continue
                pts = {key(x)[0] for x in closure(gens).values()} if gens else {key((ident, [0, 0, 0]))[0]}
                if key(op)[0] in pts:
                    continue
                gens.append(op)
                if len({key(x)[0] for x in closure(gens).values()}) == target:
                    break
            # prefer fewer generators: retry from largest-order elements
        g = mul(transpose(m), mul(gram_for(number), m))
        out.append("[group]")
        out.append("# source: %s" % src)
        out.append("id = 3/%d" % number)
        out.append("name = %s" % name)
        out.append("gram = " + "; ".join(" ".join(str(x) for x in row) for row in g))
        for op in gens:
            out.append("op = " + fmt(op))
        out.append("")
    sys.stdout.write("\n".join(out))


if __name__ == "__main__":
    main()
