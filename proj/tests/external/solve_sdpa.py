#!/usr/bin/env python3
"""Solve an SDPA sparse (.dat-s) problem with cvxpy and print the optimum.

Convention: minimize c^T y subject to sum_k y_k F_k - F_0 >= 0 per block
(negative block sizes are diagonal blocks, i.e. elementwise >= 0).
Output: one line "objective <value>" followed by one line "y <v1> <v2> ...".

--upper K=V adds y_K <= V (1-based K). Problems whose infimum is only
approached as a variable grows without bound need this to converge.
"""
import argparse
import sys

import cvxpy as cp
import numpy as np
import scipy.sparse as sp


def read_sdpa(path):
    tokens = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line[0] in '*"':
                continue
            line = line.split("=")[0]
            tokens.append(line.replace(",", " ").replace("{", " ").replace("}", " ")
                          .replace("(", " ").replace(")", " ").split())
    m = int(tokens[0][0])
    nblocks = int(tokens[1][0])
    sizes = [int(v) for v in tokens[2][:nblocks]]
    c = np.array([float(v) for v in tokens[3][:m]])
    # entries[b] collects (k, i, j, v) with both triangles filled in
    entries = [[] for _ in sizes]
    for row in tokens[4:]:
        k, b, i, j, v = int(row[0]), int(row[1]) - 1, int(row[2]) - 1, int(row[3]) - 1, float(row[4])
        entries[b].append((k, i, j, v))
        if i != j:
            entries[b].append((k, j, i, v))
    return m, sizes, c, entries


def block_map(m, size, entries):
    """F_0 as a dense matrix and the map y -> vec(sum_k y_k F_k) as a sparse matrix."""
    n = abs(size)
    f0 = np.zeros((n, n))
    rows, cols, vals = [], [], []
    for k, i, j, v in entries:
        if k == 0:
            f0[i, j] = v
        else:
            rows.append(j * n + i)  # column-major vec
            cols.append(k - 1)
            vals.append(v)
    return f0, sp.csr_matrix((vals, (rows, cols)), shape=(n * n, m))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("problem")
    parser.add_argument("--upper", action="append", default=[], metavar="K=V")
    args = parser.parse_args()
    m, sizes, c, entries = read_sdpa(args.problem)
    y = cp.Variable(m)
    cons = []
    for bound in args.upper:
        k, v = bound.split("=")
        cons.append(y[int(k) - 1] <= float(v))
    for b, s in enumerate(sizes):
        f0, a = block_map(m, s, entries[b])
        n = abs(s)
        if s < 0:
            diag = [i * n + i for i in range(n)]
            cons.append(a[diag, :] @ y - np.diag(f0) >= 0)
        else:
            expr = cp.reshape(a @ y, (n, n), order="F") - f0
            cons.append((expr + expr.T) / 2 >> 0)
    prob = cp.Problem(cp.Minimize(c @ y), cons)
    prob.solve(solver=cp.CLARABEL)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        print("status", prob.status)
        return 1
    print("objective %.12g" % prob.value)
    print("y " + " ".join("%.12g" % v for v in y.value))
    return 0


if __name__ == "__main__":
    sys.exit(main())
