#!/usr/bin/env python3
"""Export the eigenform packages referenced by the curve corpus.

Requires cypari2 (PARI/GP >= 2.15).  Usage:

    python3 tools/fixtures/generate.py [--corpus PATH] [--out DIR]

Every factor label in the corpus is resolved to a newform orbit, and enough
coefficients are written to cover the Sturm bound of each curve that uses it.
"""
import argparse
import json
import math
import os
import re
import sys

import cypari2

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.dirname(os.path.dirname(HERE))

# Rational newforms carry the historical elliptic-curve isogeny-class letters,
# which do not follow trace order. Value: leading coefficients a_1.. of the
# intended form. Each entry was pinned by the curve that uses it.
OVERRIDES = {
    "120A": [1, 0, 1, 0, 1, 0, 0, 0, 1, 0, -4],
    "118A": [1, 1, -1, 1, 1, -1, 3, 1, -2, 1, 2, -1],
    "118B": [1, 1, 2, 1, -2, 2, -3, 1, 1, -2, -1, 2],
    "118C": [1, -1, -1, 1, -3, 1, -1, -1, -2, 3, -2, -1],
    "459B": [1, -2, 0, 2, -4, 0, 1, 0, 0, 8, 6, 0],
    "1215A": [1, 0, 0, -2, -1, 0, -1, 0, 0, 0, 6, 0],
    "1539C": [1, -1, 0, -1, 2, 0, 3, 3, 0, -2, -3, 0],
    "1539D": [1, -1, 0, -1, -3, 0, -2, 3, 0, 3, 2, 0],
    "1539E": [1, 2, 0, 2, -1, 0, -3, 0, 0, -2, 0, 0],
}

LABEL = re.compile(r"^(\d+)([A-Z]+)(?:_\{([\d,]+)\})?$")
SLACK = 8


def factor(n):
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def parse_label(text):
    m = LABEL.match(text)
    if not m:
        raise ValueError(f"bad label {text}")
    level, letter = int(m.group(1)), m.group(2)
    flat = [int(e) for e in m.group(3).split(",")] if m.group(3) else None
    code = []
    for p, a in factor(level):
        width = 0 if (p, a) == (2, 1) else 2 if p == 2 and a >= 3 else 1
        if flat is None:
            code.append([0] * width)
        else:
            code.append(flat[:width])
            flat = flat[width:]
    if flat:
        raise ValueError(f"too many exponents in {text}")
    return level, letter, code


def letter_index(letter):
    k = 0
    for ch in letter:
        k = 26 * k + (ord(ch) - 64)
    return k - 1


def index(level, gamma1):
    r = level * level if gamma1 else level
    for p, _ in factor(level):
        r = r * (p * p - 1) // (p * p) if gamma1 else r * (p + 1) // p
    return r


def needs(corpus):
    need = {}

    def use(level, labels, degree):
        trivial = all(all(e == 0 for c in parse_label(l)[2] for e in c) for l in labels)
        bound = math.ceil(2 * degree * index(level, not trivial) / 12)
        for l in labels:
            need[l] = max(need.get(l, 60), bound + degree + SLACK)

    for rec in corpus["records"]:
        labels = [f["label"] for f in rec["factors"]]
        if rec.get("verify") == "geometry":
            for l in labels:
                need[l] = max(need.get(l, 60), 60)
        else:
            use(rec["level"], labels, rec["degree"])
        for var in rec.get("variants", []):
            if "factors" in var:
                use(var["level"], [f["label"] for f in var["factors"]], rec["degree"])
    return need


def rat(x):
    return str(x)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--corpus", default=os.path.join(ROOT, "crates/core/data/corpus.json"))
    ap.add_argument("--out", default=os.path.join(ROOT, "fixtures/packages"))
    ap.add_argument("--only", nargs="*")
    args = ap.parse_args()

    corpus = json.load(open(args.corpus))
    need = needs(corpus)
    if args.only:
        need = {k: v for k, v in need.items() if k in args.only}

    pari = cypari2.Pari()
    pari.allocatemem(8 * 10**9)
    pari(f'read("{os.path.join(HERE, "newforms.gp")}")')
    version = str(pari("Strprintf(\"%d.%d.%d\", version()[1], version()[2], version()[3])"))

    by_space = {}
    for label, m in need.items():
        level, _, code = parse_label(label)
        conrey = 1 if all(e == 0 for c in code for e in c) else int(pari(f"findchar({level},{code})"))
        if conrey == 0:
            raise SystemExit(f"no character matches {label}")
        by_space.setdefault((level, conrey), []).append((label, m))

    os.makedirs(args.out, exist_ok=True)
    for (level, conrey), items in sorted(by_space.items()):
        m = max(x[1] for x in items)
        orbs = pari(f"orbits({level},{conrey},{m})")
        for label, _ in items:
            _, letter, code = parse_label(label)
            k = letter_index(letter)
            if label in OVERRIDES:
                want = OVERRIDES[label]
                hits = [i for i in range(len(orbs))
                        if int(pari.poldegree(orbs[i][1])) == 1
                        and [int(pari(f"{orbs[i][2][n]}")) for n in range(len(want))] == want]
                k = hits[0]
            orb = orbs[k]
            P = orb[1]
            deg = int(pari.poldegree(P))
            coeffs = []
            for n in range(m):
                c = orb[2][n]
                coeffs.append([rat(pari.polcoef(c, j, "y")) for j in range(deg)])
            pkg = {
                "schema_version": 1,
                "level": level,
                "label": label,
                "nebentypus": [
                    {"prime_power": f"{p}^{a}", "exponent": (c if len(c) == 2 else (c[0] if c else 0))}
                    for (p, a), c in zip(factor(level), code)
                ],
                "field_poly": [int(pari.polcoef(P, j, "y")) for j in range(deg, -1, -1)],
                "coefficients": coeffs,
                "provenance": {
                    "source": f"PARI/GP {version} mfeigenbasis",
                    "character_conrey": f"{level}.{conrey}",
                    "orbit_rank": k,
                    "ordering": "trace sequence" if label not in OVERRIDES else "isogeny-class letter",
                },
            }
            name = label.replace("_{", "_").replace("}", "").replace(",", "-") + ".json"
            with open(os.path.join(args.out, name), "w") as fh:
                json.dump(pkg, fh, separators=(",", ":"))
                fh.write("\n")
            print(f"{label}: degree {deg}, {m} coefficients", file=sys.stderr)


if __name__ == "__main__":
    main()
