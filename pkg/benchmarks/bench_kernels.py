"""Timing comparison of the compiled and pure-Python integration kernels.

Run from the repo root after an editable install:

    python3 benchmarks/bench_kernels.py

The generic (token-free) integration path is timed as well, since it is the
fallback for systems without a kernel mapping.
"""
import time

import numpy as np

from maupertuis import _kernels
from maupertuis.dynamics import integrate, jacobi_system, newtonian_system, perihelion_state
from maupertuis.geometry import SystemSpec


def time_call(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    spec, state = perihelion_state(SystemSpec(family="kepler"), 4.0 / 3.0, 0.5)
    n_steps = 200_000
    h = 1e-4
    span = (0.0, n_steps * h)
    sigma_span = (0.0, 0.375 * n_steps * h)

    rows = []
    cases = [
        ("newton rk4-fixed", newtonian_system(spec), span, "rk4-fixed"),
        ("newton stormer-verlet", newtonian_system(spec), span, "stormer-verlet"),
        ("jm implicit-midpoint", jacobi_system(spec), sigma_span, "implicit-midpoint"),
    ]
    backends = ["python", "generic"]
    if _kernels.backend() == "compiled":
        backends.insert(0, "compiled")
    else:
        print("note: compiled kernels unavailable; comparing python vs generic only")

    for label, system, sp, method in cases:
        times = {}
        for backend in backends:
            def run(backend=backend, system=system, sp=sp, method=method):
                integrate(system, state, sp, method=method, step=h,
                          stride=1000, backend=backend)
            times[backend] = time_call(run)
        rows.append((label, times))

    steps_txt = "%.0e steps at h=%g" % (n_steps, h)
    print("kernel benchmark, %s, orbit e=0.5" % steps_txt)
    header = ["case"] + backends + (["speedup"] if "compiled" in backends else [])
    print("  ".join("%-24s" % header[0:1][0] if i == 0 else "%12s" % h_
                    for i, h_ in enumerate(header)))
    for label, times in rows:
        cells = ["%-24s" % label]
        for backend in backends:
            cells.append("%10.3fs" % times[backend])
        if "compiled" in backends:
            cells.append("%11.1fx" % (times["python"] / times["compiled"]))
        print("  ".join(cells))


if __name__ == "__main__":
    main()
