#!/usr/bin/env python3
"""MPS -> HiGHS (via scipy.optimize.milp) -> solution file adapter.

Reads a fixed-layout MPS model, solves it, and writes a solution document of
`name value` pairs with `#`-prefixed status/objective/bound/gap comments.

Exit codes: 0 solved (status comment says optimal or feasible), 2 infeasible,
3 stopped without an incumbent (or unbounded), 4 usage/internal error.
"""

import argparse
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp


def parse_mps(path):
    row_sense = {}
    row_order = []
    obj_row = None
    col_names = []
    col_index = {}
    integral = []
    entries = []  # (row, col, coef); row -1 = objective
    rhs = {}
    lo = {}
    hi = {}
    explicit_bounds = set()

    section = None
    in_integer = False
    with open(path) as f:
        for raw in f:
            line = raw.rstrip("\n")
            if not line.strip() or line.startswith("*"):
                continue
            if not line[0].isspace():
                section = line.split()[0]
                continue
            fields = line.split()
            if section == "ROWS":
                sense, name = fields[0], fields[1]
                if sense == "N":
                    obj_row = name
                else:
                    row_sense[name] = sense
                    row_order.append(name)
            elif section == "COLUMNS":
                if len(fields) >= 3 and fields[1] == "'MARKER'":
                    in_integer = fields[2] == "'INTORG'"
                    continue
                col = fields[0]
                if col not in col_index:
                    col_index[col] = len(col_names)
                    col_names.append(col)
                    integral.append(in_integer)
                for k in range(1, len(fields) - 1, 2):
                    row, coef = fields[k], float(fields[k + 1])
                    entries.append((row, col_index[col], coef))
            elif section == "RHS":
                for k in range(1, len(fields) - 1, 2):
                    rhs[fields[k]] = float(fields[k + 1])
            elif section == "BOUNDS":
                btype, col = fields[0], fields[2]
                j = col_index[col]
                explicit_bounds.add(j)
                val = float(fields[3]) if len(fields) > 3 else 0.0
                if btype == "UP":
                    hi[j] = val
                elif btype == "LO":
                    lo[j] = val
                elif btype == "FX":
                    lo[j] = val
                    hi[j] = val
                elif btype == "BV":
                    lo[j], hi[j] = 0.0, 1.0
                elif btype == "FR":
                    lo[j] = -np.inf
                elif btype == "MI":
                    lo[j] = -np.inf
                elif btype == "PL":
                    hi[j] = np.inf
                else:
                    raise ValueError(f"unsupported bound type {btype}")
            elif section == "RANGES":
                raise ValueError("RANGES section not supported")
            elif section == "ENDATA":
                break

    n = len(col_names)
    m = len(row_order)
    row_idx = {name: i for i, name in enumerate(row_order)}
    c = np.zeros(n)
    data, ri, ci = [], [], []
    for row, col, coef in entries:
        if row == obj_row:
            c[col] += coef
        else:
            ri.append(row_idx[row])
            ci.append(col)
            data.append(coef)
    A = sparse.csr_matrix((data, (ri, ci)), shape=(m, n))
    lb = np.full(m, -np.inf)
    ub = np.full(m, np.inf)
    for name, i in row_idx.items():
        b = rhs.get(name, 0.0)
        s = row_sense[name]
        if s in ("L", "E"):
            ub[i] = b
        if s in ("G", "E"):
            lb[i] = b
    xlo = np.zeros(n)
    xhi = np.full(n, np.inf)
    for j, v in lo.items():
        xlo[j] = v
    for j, v in hi.items():
        xhi[j] = v
    return {
        "c": c,
        "A": A,
        "row_lb": lb,
        "row_ub": ub,
        "lo": xlo,
        "hi": xhi,
        "integral": np.array(integral, dtype=int),
        "col_names": col_names,
        "rows": m,
        "cols": n,
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--mps", required=True)
    ap.add_argument("--sol", required=True)
    ap.add_argument("--time-limit", type=float, default=7200.0)
    ap.add_argument("--gap", type=float, default=0.0)
    ap.add_argument("--count-only", action="store_true",
                    help="print 'rows cols' and exit (cross-reader checks)")
    args = ap.parse_args()

    model = parse_mps(args.mps)
    if args.count_only:
        print(model["rows"], model["cols"])
        return 0

    constraints = LinearConstraint(model["A"], model["row_lb"], model["row_ub"])
    res = milp(
        model["c"],
        constraints=constraints,
        integrality=model["integral"],
        bounds=Bounds(model["lo"], model["hi"]),
        options={
            "time_limit": args.time_limit,
            "mip_rel_gap": args.gap,
            "presolve": True,
            "disp": False,
        },
    )

    if res.status == 2 and res.x is None:
        return 2
    if res.x is None:
        return 3

    gap = getattr(res, "mip_gap", 0.0) or 0.0
    bound = getattr(res, "mip_dual_bound", res.fun)
    if bound is None:
        bound = res.fun
    status = "optimal" if res.status == 0 and gap <= 1e-9 else "feasible"
    with open(args.sol, "w") as f:
        f.write("# pipesched solution (highs via scipy)\n")
        f.write(f"# status {status}\n")
        f.write(f"# objective {float(res.fun)!r}\n")
        f.write(f"# bound {float(bound)!r}\n")
        f.write(f"# gap {float(gap)!r}\n")
        for name, val in zip(model["col_names"], res.x):
            if abs(val) > 1e-11:
                f.write(f"{name} {float(val)!r}\n")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001
        print(f"highs_solve: {exc}", file=sys.stderr)
        sys.exit(4)
