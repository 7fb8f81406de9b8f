"""
ncerg Benchmarks
Compares the averaging methods: phi1 closed form vs factorized quadrature vs
full-grid quadrature, on the built-in families.
"""

import timeit

import numpy as np

from ncerg.algebra import random_hermitian
from ncerg.averaging import average_map_phi1, average_map_quadrature
from ncerg.dynamics import builtin_suite

REPEATS = 5
T = 1.0

methods = {
    "phi1": lambda sg: average_map_phi1(sg, T),
    "quad (factorized)": lambda sg: average_map_quadrature(sg, T, 12, True),
    "quad (full grid)": lambda sg: average_map_quadrature(sg, T, 12, False),
}

rng = np.random.default_rng(0)

print("\n=== ncerg Averaging Benchmark (t = 1, order 12) ===")
print(f"{'Family':<24} {'Method':<20} {'ms':>10} {'vs phi1':>10} {'gap':>10}")
print("-" * 78)

for name, sg in builtin_suite().items():
    x = random_hermitian(sg.shape, rng)
    reference = average_map_phi1(sg, T).apply(x)
    baseline = None
    for label, build in methods.items():
        seconds = min(timeit.repeat(lambda: build(sg), number=1, repeat=REPEATS))
        baseline = baseline or seconds
        gap = build(sg).apply(x).distance(reference)
        print(f"{name:<24} {label:<20} {seconds * 1e3:>10.2f} {seconds / baseline:>9.2f}x {gap:>10.1e}")
