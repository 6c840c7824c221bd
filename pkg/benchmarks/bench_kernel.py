"""Time one full-horizon simulation on the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernel.py [--repeats N]
"""

import argparse
import statistics
import time

from pvbatt import _engine
from pvbatt.cli import DEMO_CONFIG
from pvbatt.ingest import load_config
from pvbatt.lifecycle import SimulationContext, SystemDesign, simulate


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times), statistics.median(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args(argv)

    ctx = SimulationContext.from_config(load_config(DEMO_CONFIG))
    design = SystemDesign(30.0, 0.0, 24, 2, "powerwall2", 4, "retailer_b_tou")
    kernels = {"python": _engine.python_simulate_horizon}
    if _engine.compiled_simulate_horizon is not None:
        kernels["cython"] = _engine.compiled_simulate_horizon
    else:
        print("compiled kernel not built; timing the fallback only")

    hours = ctx.economics.lifespan_years * 8760
    results = {}
    for name, kernel in kernels.items():
        simulate(design, ctx, kernel=kernel)  # warm caches
        results[name] = best_of(lambda: simulate(design, ctx, kernel=kernel), args.repeats)
        lo, med = results[name]
        print(f"{name:<7} best {lo * 1e3:9.2f} ms  median {med * 1e3:9.2f} ms  ({hours / lo / 1e6:.2f} M hours/s)")
    if len(results) == 2:
        print(f"speed-up {results['python'][0] / results['cython'][0]:.1f}x")
        same = simulate(design, ctx, kernel=kernels["python"]).npv == simulate(design, ctx, kernel=kernels["cython"]).npv
        print(f"identical NPV: {same}")


if __name__ == "__main__":
    main()
