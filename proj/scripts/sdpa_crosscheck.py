#!/usr/bin/env python3
"""Solves an SDPA sparse (.dat-s) file with cvxpy and prints the optimal value.

Usage: sdpa_crosscheck.py FILE [--solver CLARABEL|SCS|CVXOPT]
The file encodes  min c.x  s.t.  sum_i x_i F_i - F_0 >= 0  blockwise.
"""
import argparse
import sys

import cvxpy as cp
import numpy as np


def read_sdpa(path):
    with open(path) as fh:
        lines = [ln.split('"')[0].split('*')[0].strip() for ln in fh]
    lines = [ln for ln in lines if ln]
    nvar = int(lines[0].split()[0])
    nblocks = int(lines[1].split()[0])
    sizes = [int(v) for v in lines[2].replace(",", " ").replace("{", " ").replace("}", " ").split()][:nblocks]
    c = np.array([float(v) for v in lines[3].replace(",", " ").replace("{", " ").replace("}", " ").split()][:nvar])
    mats = [[np.zeros((abs(s), abs(s))) for s in sizes] for _ in range(nvar + 1)]
    for ln in lines[4:]:
        matno, blk, i, j, val = ln.split()
        m, b, i, j = int(matno), int(blk) - 1, int(i) - 1, int(j) - 1
        mats[m][b][i, j] = float(val)
        mats[m][b][j, i] = float(val)
    return nvar, sizes, c, mats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("file")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()
    nvar, sizes, c, mats = read_sdpa(args.file)
    x = cp.Variable(nvar)
    cons = []
    for b, s in enumerate(sizes):
        expr = -mats[0][b] + sum(x[i] * mats[i + 1][b] for i in range(nvar) if np.any(mats[i + 1][b]))
        if s < 0:
            cons.append(cp.diag(expr) >= 0)
        else:
            cons.append((expr + expr.T) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(c @ x), cons)
    prob.solve(solver=args.solver)
    print(f"{prob.status} {prob.value:.12g}")
    return 0 if prob.status == cp.OPTIMAL else 1


if __name__ == "__main__":
    sys.exit(main())
