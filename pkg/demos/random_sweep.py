"""A small accuracy sweep over random densities of four shapes.

Draws S = A A* for random causal A with entries uniform on [-1, 1], runs
JLE-3, JLE-1 and Wilson on the same inputs and prints median residuals.
Pass a seed count as the first argument (default 3).
"""

import statistics
import sys
import warnings
from collections import defaultdict

from specfact.harness import preset, run_bench

warnings.simplefilter("ignore")

seeds = int(sys.argv[1]) if len(sys.argv) > 1 else 3
rows = run_bench(preset("table1", seeds))

errs = defaultdict(list)
secs = defaultdict(float)
for row in rows:
    if row.status != "ok":
        print("failed:", row.alg, row.r, row.n, row.seed, row.status)
        continue
    errs[row.r, row.n, row.alg].append(row.err)
    secs[row.r, row.n, row.alg] += row.time_s

print(f"median err over {seeds} seeds (total seconds in brackets)")
print(f"{'shape':>7s}" + "".join(f"{a:>22s}" for a in ("jle3", "jle1", "wilson")))
for r, n in [(4, 30), (6, 20), (8, 10), (10, 5)]:
    cells = []
    for a in ("jle3", "jle1", "wilson"):
        e = errs[r, n, a]
        cells.append(f"{statistics.median(e):.2e} [{secs[r, n, a]:5.1f}]" if e else "-")
    print(f"{r:>3d}x{n:<3d}" + "".join(f"{c:>22s}" for c in cells))
