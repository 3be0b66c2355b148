"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each workload runs on both backends with identical inputs; the results are
checked to agree (up to last-bit libm differences) before timings are reported.
"""

import argparse
import json
import sys
import timeit

import numpy as np

from corecdyn._kernels import compiled_backend, python_backend

SHAPES = {
    "circle m=2": (1.0, 1.0, 0.5, [0.2], [2], [0.0]),
    "ellipse 2 harmonics": (2.0, 1.0, 0.3, [0.1, 0.05], [2, 5], [0.3, -1.0]),
}


def workloads(mod, packed):
    return {
        "exact_step x10k": lambda: [mod.exact_step(packed, 0.001 * k) for k in range(10_000)],
        "orbit exact n=20k": lambda: mod.orbit(packed, 1.0, 20_000, True),
        "orbit first-order n=20k": lambda: mod.orbit(packed, 1.0, 20_000, False),
        "lyapunov_mean n=20k": lambda: mod.lyapunov_mean(packed, 1.0, 1000, 20_000, 1e-6, True),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--json", help="write the timings to this file")
    args = parser.parse_args(argv)
    if compiled_backend is None:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 1
    rows = []
    print(f"{'shape':22} {'workload':26} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for shape_name, params in SHAPES.items():
        py_jobs = workloads(python_backend, python_backend.pack(*params))
        c_jobs = workloads(compiled_backend, compiled_backend.pack(*params))
        for name in py_jobs:
            ref, got = np.asarray(py_jobs[name](), float), np.asarray(c_jobs[name](), float)
            if not np.allclose(ref, got, rtol=1e-12, atol=1e-12):
                raise SystemExit(f"backends disagree on {shape_name} / {name}")
            t_py = min(timeit.repeat(py_jobs[name], number=1, repeat=args.repeat))
            t_c = min(timeit.repeat(c_jobs[name], number=1, repeat=args.repeat))
            rows.append({"shape": shape_name, "workload": name, "python_s": t_py,
                         "compiled_s": t_c, "speedup": t_py / t_c})
            print(f"{shape_name:22} {name:26} {t_py:10.4f} {t_c:11.5f} {t_py / t_c:7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
