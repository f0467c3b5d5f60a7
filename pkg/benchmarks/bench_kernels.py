"""Numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--J 10]

Times each kernel pair on the same inputs (after one warm-up call, so JIT
compilation is excluded), checks the results agree, and finishes with an
end-to-end tensor projection with each backend swapped in.
"""

import argparse
import time

import numpy as np

from lpwave import kernels
from lpwave._backend import HAVE_NUMBA
from lpwave.corpus import interior_box
from lpwave.grid import SampledFunction
from lpwave.scaling import daubechies_system
from lpwave.tensor import TensorContext, project_nd


def best_of(fn, repeat):
    fn()  # warm-up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def report(name, t_numba, t_numpy):
    print(f"{name:<28} numba {t_numba * 1e3:9.2f} ms   numpy {t_numpy * 1e3:9.2f} ms   x{t_numpy / t_numba:6.1f}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--J", type=int, default=10)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    J = args.J
    sy = daubechies_system(4, J)
    box = interior_box(sy, J, scales=(2, 0))
    rng = np.random.default_rng(0)
    for kappa in (0, 3):
        table, lo = sy.table(kappa, dual=True)
        nu_lo = box.support_lo * 2**kappa // 2**J - 8
        n_nu = box.n * 2**kappa // 2**J + 16
        lines = rng.standard_normal((64, box.n))
        coeffs = rng.standard_normal((64, n_nu))
        a_args = (lines, table, lo, kappa, J, box.support_lo, nu_lo, n_nu)
        s_args = (coeffs, table, lo, kappa, J, box.support_lo, nu_lo, box.n)
        assert np.allclose(kernels.analysis_numba(*a_args), kernels.analysis_numpy(*a_args), rtol=0, atol=1e-10)
        assert np.allclose(kernels.synthesis_numba(*s_args), kernels.synthesis_numpy(*s_args), rtol=0, atol=1e-10)
        report(f"analysis  kappa={kappa}", best_of(lambda: kernels.analysis_numba(*a_args), args.repeat),
               best_of(lambda: kernels.analysis_numpy(*a_args), args.repeat))
        report(f"synthesis kappa={kappa}", best_of(lambda: kernels.synthesis_numba(*s_args), args.repeat),
               best_of(lambda: kernels.synthesis_numpy(*s_args), args.repeat))

    a = rng.standard_normal(16)
    assert kernels.rademacher_moment_numba(a, 3.0) == kernels.rademacher_moment_numpy(a, 3.0)
    report("rademacher n=16", best_of(lambda: kernels.rademacher_moment_numba(a, 3.0), args.repeat),
           best_of(lambda: kernels.rademacher_moment_numpy(a, 3.0), args.repeat))

    # end to end: swap the bound kernels that proj1d calls through the module
    Jn = min(J, 8)
    sy2 = daubechies_system(4, Jn)
    b2 = interior_box(sy2, Jn, scales=(2, 0))
    ctx = TensorContext.build([sy2, sy2], [b2, b2])
    f = SampledFunction(ctx.grid, rng.standard_normal(ctx.grid.shape))
    timings, results = {}, {}
    saved = kernels.analysis, kernels.synthesis
    try:
        for name in ("numba", "numpy"):
            kernels.analysis = getattr(kernels, f"analysis_{name}")
            kernels.synthesis = getattr(kernels, f"synthesis_{name}")
            timings[name] = best_of(lambda: project_nd(ctx, f, (3, 3)), max(1, args.repeat // 2))
            results[name] = project_nd(ctx, f, (3, 3)).samples
    finally:
        kernels.analysis, kernels.synthesis = saved
    assert np.allclose(results["numba"], results["numpy"], rtol=0, atol=1e-10)
    report(f"project_nd d=2 J={Jn}", timings["numba"], timings["numpy"])


if __name__ == "__main__":
    main()
