"""Compare the compiled and numpy per-mode kernels.

    python benchmarks/bench_kernels.py [--sizes 100000 1000000 10000000] [--repeat 3]

Reports the best-of-``repeat`` wall time of ``log_factors`` and
``tree_sum`` for each backend, the speed-up, and confirms the two
backends return bit-identical results.
"""

import argparse
import time

import numpy as np

from mirrordeco.kernels import get_backend


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[100_000, 1_000_000, 10_000_000])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = {"python": get_backend("python")}
    try:
        backends["cython"] = get_backend("cython")
    except ImportError:
        print("compiled extension not built; timing the numpy backend only")

    rng = np.random.default_rng(0)
    print(f"{'modes':>10} {'kernel':>10} " + " ".join(f"{b:>10}" for b in backends)
          + f" {'speed-up':>9} {'identical':>9}")
    for size in args.sizes:
        masses = rng.uniform(0.5, 2.0, size) * 1e-6
        forces = rng.uniform(-1.0, 1.0, size) * 1e-14
        widths = rng.uniform(0.5, 2.0, size) * 1e-5
        for label, call in (
            ("log_factors", lambda k: k.log_factors(masses, forces, widths, 1, 0, 2.0, 1.0)),
            ("tree_sum", lambda k: k.tree_sum(masses)),
        ):
            timing, results = {}, {}
            for name, impl in backends.items():
                timing[name], results[name] = best_of(lambda: call(impl), args.repeat)
            ref = results["python"]
            same = all(np.array_equal(np.asarray(r), np.asarray(ref)) for r in results.values())
            speed = (timing["python"] / timing["cython"]) if "cython" in timing else float("nan")
            print(f"{size:>10} {label:>10} "
                  + " ".join(f"{timing[b]:>9.4f}s" for b in backends)
                  + f" {speed:>8.1f}x {str(same):>9}")


if __name__ == "__main__":
    main()
