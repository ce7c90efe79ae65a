"""Compare the compiled and pure-Python geodesic-flow kernels.

Runs the same one-period integrations on each available backend, reports
the median wall time per call and the largest disagreement between the
backends.

Usage::

    python3 benchmarks/bench_kernel.py --repeat 20
"""

import argparse
import statistics
import time

import numpy as np

from solgeom import kernel
from solgeom.flow import spec_from_kh
from solgeom.invariants import invariant_set


def _cases():
    for k in (0.3, 0.6, 0.9, 0.99):
        spec = spec_from_kh(k, 0.0, 0.0)
        times = np.linspace(0.0, invariant_set(k).T, 101)
        yield k, spec, times


def _time_backend(name, repeat, rtol):
    kernel.use_backend(name)
    results = {}
    for k, spec, times in _cases():
        samples = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            out, steps, status = kernel.propagate(
                spec.a, spec.b, spec.initial_state, times, rtol, rtol, 10**6
            )
            samples.append(time.perf_counter() - t0)
        results[k] = (statistics.median(samples), steps, out)
    return results


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=10)
    parser.add_argument("--rtol", type=float, default=1e-12)
    args = parser.parse_args(argv)

    previous = kernel.active_backend()
    names = kernel.available_backends()
    timings = {name: _time_backend(name, args.repeat, args.rtol) for name in names}
    kernel.use_backend(previous)

    print(f"backends: {', '.join(names)}  rtol={args.rtol:g}  repeat={args.repeat}")
    header = "k       steps  " + "  ".join(f"{n:>12s}" for n in names)
    if len(names) == 2:
        header += "     speedup   max |diff|"
    print(header)
    for k, _, _ in _cases():
        steps = timings[names[0]][k][1]
        line = f"{k:<6g}  {steps:5d}  " + "  ".join(
            f"{timings[n][k][0] * 1e3:9.3f} ms" for n in names
        )
        if len(names) == 2:
            fast, slow = timings[names[0]][k], timings[names[1]][k]
            diff = float(np.max(np.abs(fast[2] - slow[2])))
            line += f"  {slow[0] / fast[0]:9.1f}x  {diff:11.2e}"
        print(line)


if __name__ == "__main__":
    main()
