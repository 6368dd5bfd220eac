#!/usr/bin/env python3
"""MILP solver wrapper: CPLEX-LP file in, `name value` lines out.

Usage: lp_solve.py [--gap G] [--time-limit T] <model.lp> <solution.out>

Writes one "name value" line per nonzero variable plus "OBJECTIVE <value>".
Exit codes: 0 solved to (gap-)optimality, 2 infeasible, 3 other failure.
Backed by scipy.optimize.milp (HiGHS).
"""

import argparse
import re
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

_TOKEN = re.compile(r"(<=|>=|=|[+-]|[A-Za-z_][A-Za-z0-9_.]*|"
                    r"[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)")

SECTIONS = {"minimize", "maximize", "subject to", "such that", "st", "s.t.",
            "bounds", "binary", "binaries", "general", "end"}


def tokenize(text):
    for raw in text.splitlines():
        line = raw.split("\\")[0]
        if not line.strip():
            continue
        yield line


def section_of(line):
    key = line.strip().lower()
    if key in SECTIONS:
        return key
    return None


def parse_expr(tokens, start, var_id, coefs):
    """Accumulates +/-coef*name terms from tokens[start:]; returns index of
    the first token it could not consume (a relation or end)."""
    i = start
    sign = 1.0
    pending = None  # numeric literal awaiting a variable
    while i < len(tokens):
        t = tokens[i]
        if t in ("<=", ">=", "="):
            return i, pending
        if t == "+":
            sign, pending = 1.0, None
        elif t == "-":
            sign = -sign if pending is None and tokens[i - 1] in ("+", "-") else -1.0
            pending = None
        elif re.match(r"^[0-9.]", t):
            pending = float(t)
        else:
            coef = sign * (1.0 if pending is None else pending)
            j = var_id.setdefault(t, len(var_id))
            coefs[j] = coefs.get(j, 0.0) + coef
            sign, pending = 1.0, None
        i += 1
    return i, pending


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gap", type=float, default=0.0,
                    help="relative MIP gap (default 0: proven optimum)")
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("model")
    ap.add_argument("solution")
    args = ap.parse_args()

    with open(args.model, "r", encoding="ascii") as fh:
        lines = list(tokenize(fh.read()))

    var_id = {}
    objective = {}
    rows = []          # (coefs dict, lb, ub)
    binaries = set()
    lo_bound = {}
    hi_bound = {}

    section = None
    pending_obj = False
    for line in lines:
        sec = section_of(line)
        if sec is not None:
            if sec == "maximize":
                print("maximization not supported", file=sys.stderr)
                return 3
            section = {"subject to": "st", "such that": "st", "s.t.": "st",
                       "binaries": "binary", "general": "general"}.get(sec, sec)
            pending_obj = section == "minimize"
            continue
        tokens = _TOKEN.findall(line)
        if not tokens:
            continue
        if section == "minimize":
            if pending_obj and tokens and tokens[0].lower() != "obj":
                pass
            # drop a leading "name:" label
            if ":" in line:
                label_end = line.index(":")
                tokens = _TOKEN.findall(line[label_end + 1:])
            parse_expr(tokens, 0, var_id, objective)
        elif section == "st":
            if ":" in line:
                tokens = _TOKEN.findall(line[line.index(":") + 1:])
            coefs = {}
            i, _ = parse_expr(tokens, 0, var_id, coefs)
            if i >= len(tokens):
                print("constraint without relation:", line, file=sys.stderr)
                return 3
            rel = tokens[i]
            rhs_tokens = tokens[i + 1:]
            sign = -1.0 if rhs_tokens and rhs_tokens[0] == "-" else 1.0
            rhs = sign * float(rhs_tokens[-1])
            if rel == "<=":
                rows.append((coefs, -np.inf, rhs))
            elif rel == ">=":
                rows.append((coefs, rhs, np.inf))
            else:
                rows.append((coefs, rhs, rhs))
        elif section == "bounds":
            toks = _TOKEN.findall(line)
            if "free" in line.lower():
                name = toks[0]
                j = var_id.setdefault(name, len(var_id))
                lo_bound[j] = -np.inf
                continue
            # forms: "x >= lo", "x <= hi", "lo <= x <= hi"
            if len(toks) >= 3 and re.match(r"^[A-Za-z_]", toks[0]):
                j = var_id.setdefault(toks[0], len(var_id))
                val = float(toks[-1]) * (-1.0 if toks[-2] == "-" else 1.0)
                if toks[1] == ">=":
                    lo_bound[j] = val
                else:
                    hi_bound[j] = val
            elif len(toks) >= 5:
                j = var_id.setdefault(toks[2], len(var_id))
                lo_bound[j] = float(toks[0])
                hi_bound[j] = float(toks[-1])
        elif section in ("binary", "general"):
            for name in _TOKEN.findall(line):
                if re.match(r"^[A-Za-z_]", name):
                    j = var_id.setdefault(name, len(var_id))
                    if section == "binary":
                        binaries.add(j)

    n = len(var_id)
    names = [None] * n
    for name, j in var_id.items():
        names[j] = name

    c = np.zeros(n)
    for j, v in objective.items():
        c[j] = v

    data, indices, indptr = [], [], [0]
    lbs, ubs = [], []
    for coefs, lo, hi in rows:
        for j, v in coefs.items():
            indices.append(j)
            data.append(v)
        indptr.append(len(indices))
        lbs.append(lo)
        ubs.append(hi)
    A = sparse.csr_matrix((data, indices, indptr), shape=(len(rows), n))

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    integrality = np.zeros(n)
    for j in binaries:
        ub[j] = 1.0
        integrality[j] = 1
    for j, v in lo_bound.items():
        lb[j] = v
    for j, v in hi_bound.items():
        ub[j] = v

    options = {"mip_rel_gap": args.gap}
    if args.time_limit is not None:
        options["time_limit"] = args.time_limit
    res = milp(c=c, constraints=LinearConstraint(A, lbs, ubs),
               integrality=integrality, bounds=Bounds(lb, ub),
               options=options)
    if res.status == 2:
        return 2
    if res.status != 0 or res.x is None:
        print("solver status:", res.status, res.message, file=sys.stderr)
        return 3

    with open(args.solution, "w", encoding="ascii") as out:
        for j in range(n):
            if abs(res.x[j]) > 1e-12:
                out.write("%s %.17g\n" % (names[j], res.x[j]))
        out.write("OBJECTIVE %.17g\n" % res.fun)
    return 0


if __name__ == "__main__":
    sys.exit(main())
