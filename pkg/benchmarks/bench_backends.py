"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_backends.py [--sizes 50 100 200] [--repeat 3]

Matrices are assembled buckling pencils on the unit square, so the timings
reflect the structure the package actually solves.
"""
import argparse
import time

import numpy as np

from krein_spectra import linalg
from krein_spectra.basis import BasisSpec, Box, build_basis
from krein_spectra.forms import assemble_forms


def pencil(cells):
    forms = assemble_forms(build_basis(Box((0, 0), (1, 1)), BasisSpec(m=1, degree=3, cells=cells)))
    return forms.A, forms.B


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cells", type=int, nargs="+", default=[6, 9, 12, 15],
                   help="cells per axis; the pencil order is (cells - 1)^2")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    backends = linalg.available_backends()
    if len(backends) < 2:
        print("compiled extension not built; only the numpy fallback is available")
    print(f"{'order':>6} {'kernel':>14} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for cells in args.cells:
        A, B = pencil(cells)
        lam = float(np.median(np.diag(A) / np.diag(B)))
        jobs = {
            "cholesky": lambda: linalg.cholesky(B),
            "ldlt_inertia": lambda: linalg.ldlt_inertia(A - lam * B),
            "sym_eig": lambda: linalg.sym_eig(A),
            "gen_eig": lambda: linalg.gen_eig(A, B),
        }
        for name, job in jobs.items():
            row = {}
            for b in backends:
                with linalg.use_backend(b):
                    row[b] = best_of(job, args.repeat)
            speed = row["python"] / row["cython"] if "cython" in row else float("nan")
            print(f"{len(A):>6} {name:>14} " + " ".join(f"{row[b]:>9.4f}s" for b in backends)
                  + f"   {speed:6.1f}x")
        with linalg.use_backend(backends[0]):
            t = best_of(lambda: linalg.gen_eig(A, B, method="lapack"), args.repeat)
        print(f"{len(A):>6} {'gen_eig/lapack':>14} {t:>9.4f}s")


if __name__ == "__main__":
    main()
