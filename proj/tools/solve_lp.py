#!/usr/bin/env python3
"""Solve an LP-format 0/1 model with scipy's MILP solver (HiGHS).

Supports the subset of the LP interchange format that `hdats export-ilp`
emits: a Minimize objective, named constraints with <= / >= / =, a Bounds
section, and Generals/Binaries declarations. Prints the optimal objective.

Usage: solve_lp.py model.lp [--print-vars]
"""

import argparse
import re
import sys

import numpy as np
from scipy.optimize import LinearConstraint, milp
from scipy.sparse import lil_matrix

TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z_][A-Za-z0-9_]*)")
REL_RE = re.compile(r"(<=|>=|=)\s*([+-]?\d+(?:\.\d+)?)\s*$")


def tokenize_sections(path):
    sections = {"objective": [], "subject": [], "bounds": [], "generals": [], "binaries": []}
    current = None
    with open(path) as fh:
        for raw in fh:
            line = raw.rstrip("\n")
            if line.startswith("\\"):
                continue
            stripped = line.strip()
            if not stripped:
                continue
            low = stripped.lower()
            if low == "minimize":
                current = "objective"
                continue
            if low == "subject to":
                current = "subject"
                continue
            if low == "bounds":
                current = "bounds"
                continue
            if low in ("generals", "general"):
                current = "generals"
                continue
            if low in ("binaries", "binary"):
                current = "binaries"
                continue
            if low == "end":
                break
            if current is None:
                raise ValueError(f"statement outside any section: {stripped}")
            sections[current].append(stripped)
    return sections


def parse_terms(expr):
    terms = []
    for sign, coef, name in TERM_RE.findall(expr):
        value = float(coef) if coef else 1.0
        if sign == "-":
            value = -value
        terms.append((name, value))
    return terms


def parse_constraints(lines):
    # wrapped lines carry no name prefix and no relation until the last piece
    merged = []
    buffer = ""
    for line in lines:
        if ":" in line.split()[0] or line.split()[0].endswith(":"):
            if buffer:
                merged.append(buffer)
            buffer = line
        else:
            buffer += " " + line
        if REL_RE.search(buffer):
            merged.append(buffer)
            buffer = ""
    if buffer:
        merged.append(buffer)

    out = []
    for row in merged:
        name, _, rest = row.partition(":")
        match = REL_RE.search(rest)
        if not match:
            raise ValueError(f"no relation in constraint {name}")
        rel, rhs = match.group(1), float(match.group(2))
        out.append((name.strip(), parse_terms(rest[: match.start()]), rel, rhs))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("model")
    ap.add_argument("--print-vars", action="store_true")
    args = ap.parse_args()

    sections = tokenize_sections(args.model)

    objective_terms = []
    for line in sections["objective"]:
        _, _, rest = line.partition(":")
        objective_terms.extend(parse_terms(rest if rest else line))

    constraints = parse_constraints(sections["subject"])

    names = []
    index = {}

    def var(name):
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for name, _ in objective_terms:
        var(name)
    for _, terms, _, _ in constraints:
        for name, _ in terms:
            var(name)
    binaries = set()
    for line in sections["binaries"]:
        for name in line.split():
            binaries.add(name)
            var(name)
    generals = set()
    for line in sections["generals"]:
        for name in line.split():
            generals.add(name)
            var(name)

    n = len(names)
    c = np.zeros(n)
    for name, coef in objective_terms:
        c[index[name]] += coef

    a = lil_matrix((len(constraints), n))
    lower = np.full(len(constraints), -np.inf)
    upper = np.full(len(constraints), np.inf)
    for row, (_, terms, rel, rhs) in enumerate(constraints):
        for name, coef in terms:
            a[row, index[name]] += coef
        if rel in ("<=", "="):
            upper[row] = rhs
        if rel in (">=", "="):
            lower[row] = rhs

    integrality = np.zeros(n)
    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    for name in binaries:
        integrality[index[name]] = 1
        ub[index[name]] = 1
    for name in generals:
        integrality[index[name]] = 1

    result = milp(
        c=c,
        constraints=LinearConstraint(a.tocsr(), lower, upper),
        integrality=integrality,
        bounds=(lb, ub),
    )
    if not result.success:
        print(f"status {result.status}: {result.message}", file=sys.stderr)
        return 1

    print(f"objective {result.fun:.6g}")
    if args.print_vars:
        for name in names:
            value = result.x[index[name]]
            if abs(value) > 1e-6:
                print(f"{name} = {value:.6g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
