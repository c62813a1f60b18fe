"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Kernel timings call both backend modules directly on the same inputs; the
end-to-end row runs a classification workload in a subprocess per backend
(the backend is chosen at import time).
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from aaut import kernels
from aaut.element import split_leaf
from aaut.randgen import random_element
from aaut.tree import Shape

WORKLOAD = """
import random, time
from aaut import kernels
from aaut.classify import classify_element
from aaut.randgen import random_element, random_leaf_count
from aaut.tree import Shape
rng = random.Random(0)
els = []
for i in range(400):
    shape = [Shape(2, 2), Shape(3, 2), Shape(2, 3), Shape(3, 3)][i % 4]
    els.append(random_element(shape, random_leaf_count(shape, 16, rng), rng))
t = time.perf_counter()
for g in els:
    classify_element(g)
print(kernels.BACKEND, time.perf_counter() - t)
"""


def inputs(seed=0):
    rng = random.Random(seed)
    shape = Shape(2, 2)
    gs = [random_element(shape, 24, rng) for _ in range(40)]
    addrs = [tuple([rng.randrange(2)] + [rng.randrange(2) for _ in range(rng.randrange(1, 14))])
             for _ in range(400)]
    unreduced = []
    for g in gs:
        h = g
        for _ in range(6):
            h = split_leaf(h, rng.choice([p for p, _ in h.pairs]))
        unreduced.append(list(h.pairs))
    merged = sorted({a for g in gs for a in g.domain.addrs})
    targets = sorted(gs[0].range.addrs)
    return gs, addrs, unreduced, merged, targets


def kernel_cases(mod, gs, addrs, unreduced, merged, targets):
    maps = [(g.mapping, list(g.sorted_domain), g.maxlen) for g in gs]
    pairs = [list(g.pairs) for g in gs]

    def lookups():
        for m, _, ml in maps:
            for a in addrs:
                mod.image(m, a, ml)

    def compose():
        for (m, s, ml), hp in zip(maps, reversed(pairs)):
            mod.compose_pairs(m, s, ml, hp)

    def reduce():
        for p in unreduced:
            mod.reduce_pairs(p, 2)

    def sweep():
        mod.theta_sweep(targets, merged)
        mod.minimal_sorted(merged)

    return {"image lookups": lookups, "compose_pairs": compose, "reduce_pairs": reduce, "theta_sweep": sweep}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    data = inputs()
    backends = [("python", kernels.pure)]
    if kernels.compiled is not None:
        backends.append(("cython", kernels.compiled))
    else:
        print("compiled extension not built; showing the fallback only")
    rows = {}
    for name, mod in backends:
        for case, fn in kernel_cases(mod, *data).items():
            rows.setdefault(case, {})[name] = min(timeit.repeat(fn, number=1, repeat=args.repeat))
    for flag, name in (("1", "python"), ("0", "cython")):
        if name == "cython" and kernels.compiled is None:
            continue
        env = dict(os.environ, AAUT_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        rows.setdefault("classify 400 elements", {})[out[0]] = float(out[1])
    print(f"{'kernel':<24}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}")
    for case, t in rows.items():
        py, cy = t.get("python"), t.get("cython")
        speed = f"{py / cy:.2f}x" if py and cy else "-"
        cy_text = f"{cy * 1e3:.1f}" if cy else "-"
        print(f"{case:<24}{py * 1e3:>14.1f}{cy_text:>14}{speed:>10}")


if __name__ == "__main__":
    main()
