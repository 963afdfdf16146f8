"""Times the likelihood kernels: compiled extension vs numpy fallback.

The workload mirrors the late iterations of a d=2 estimation run, where
the refiner faces the full record history.  Run as

    python3 benchmarks/bench_kernels.py [--d D] [--records R] [--repeats K]
"""

import argparse
import time

import numpy as np

from quditmse import backend
from quditmse.core import haar_random_state
from quditmse.interferometer import sample_record
from quditmse.mle import DataLog
from quditmse.simplex import SimplexOptions


def build_problem(d, records, shots, seed=0):
    rng = np.random.default_rng(seed)
    truth = haar_random_state(d, rng)
    log = DataLog()
    for _ in range(records):
        probe = haar_random_state(d, rng)
        log.append(sample_record(truth, probe, shots, rng))
    probes, counts = log.packed()
    start = haar_random_state(d, rng)
    x0 = np.empty(2 * d)
    x0[0::2] = start.real
    x0[1::2] = start.imag
    return x0, probes, counts


def time_call(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name, impl, x0, probes, counts, repeats):
    opts = SimplexOptions()
    nll_time = time_call(lambda: impl.neg_log_likelihood(x0, probes, counts), repeats)

    def run_refine():
        impl.refine_params(
            x0,
            probes,
            counts,
            opts.budget(x0.size),
            opts.x_tolerance,
            opts.f_tolerance,
            opts.reflection,
            opts.expansion,
            opts.contraction,
            opts.shrink,
            opts.displacement,
        )

    refine_time = time_call(run_refine, max(1, repeats // 10))
    print(
        "%-8s  likelihood eval %10.1f us   full refinement %10.2f ms"
        % (name, nll_time * 1e6, refine_time * 1e3)
    )
    return nll_time, refine_time


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--d", type=int, default=2, help="system dimension")
    parser.add_argument("--records", type=int, default=100, help="measurement records")
    parser.add_argument("--shots", type=int, default=1000, help="shots per record")
    parser.add_argument("--repeats", type=int, default=200, help="timing repetitions")
    args = parser.parse_args()

    x0, probes, counts = build_problem(args.d, args.records, args.shots)
    print(
        "workload: d=%d, %d records x %d shots, %d-point simplex budget %d"
        % (
            args.d,
            args.records,
            args.shots,
            2 * args.d + 1,
            SimplexOptions().budget(2 * args.d),
        )
    )

    from quditmse import _kernels_py

    results = {"python": bench_backend("python", _kernels_py, x0, probes, counts, args.repeats)}
    if "cython" in backend.available_backends():
        from quditmse import _kernels

        results["cython"] = bench_backend("cython", _kernels, x0, probes, counts, args.repeats)
        print(
            "speedup   likelihood eval %9.1fx   full refinement %9.1fx"
            % (
                results["python"][0] / results["cython"][0],
                results["python"][1] / results["cython"][1],
            )
        )
    else:
        print("compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
