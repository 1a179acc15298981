"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeats 20] [--epochs 200]
"""

import argparse
import time

import numpy as np

from nnbvp import kernels
from nnbvp.mlp import init_params
from nnbvp.problems import Problem, expansion
from nnbvp.sampling import GridSpec, generate
from nnbvp.trainer import TrainConfig, train


def best_of(fn, repeats):
    fn()  # warm-up / compile
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times), float(np.median(times))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--epochs", type=int, default=200)
    ap.add_argument("--h", type=int, default=15)
    ap.add_argument("--k", type=int, default=16)
    args = ap.parse_args()

    params = init_params(args.h, 2, 0)
    points = generate(GridSpec("uniform", args.k)).points
    print(f"H={args.h}  K={args.k} ({len(points)} points)  repeats={args.repeats}")
    print(f"{'case':42s} {'backend':>8s} {'best ms':>10s} {'median ms':>10s}")

    for problem in Problem:
        exp = expansion(problem, points, "residual")
        weights = np.ones(len(exp))
        perm = np.arange(len(exp))
        cases = {
            "residuals": lambda b: kernels.evaluate(params, exp, b),
            "weighted gradient": lambda b: kernels.weighted_gradient(params, exp, weights, b),
            "sgd epoch (batch 32)": lambda b: kernels.sgd_epoch(
                params.w1.copy(), params.b1.copy(), params.w2.copy(), exp, perm, 32, 1e-3, 0.0, b),
        }
        for case, fn in cases.items():
            ref = None
            for backend in sorted(kernels.BACKENDS):
                best, med = best_of(lambda: fn(backend), args.repeats)
                ratio = "" if ref is None else f"  x{best / ref:.1f}"
                ref = ref or best
                print(f"{problem.value + ': ' + case:42s} {backend:>8s} {1e3 * best:10.3f} {1e3 * med:10.3f}{ratio}")

    cfg = TrainConfig(epochs=args.epochs, eval_every=args.epochs)
    for backend in sorted(kernels.BACKENDS):
        train("laplace-dirichlet", GridSpec("uniform", 4), args.h, TrainConfig(epochs=1), backend=backend)
        start = time.perf_counter()
        train("laplace-dirichlet", GridSpec("uniform", args.k), args.h, cfg, backend=backend)
        elapsed = time.perf_counter() - start
        print(f"{'laplace train, ' + str(args.epochs) + ' epochs':42s} {backend:>8s} {1e3 * elapsed:10.1f}")


if __name__ == "__main__":
    main()
