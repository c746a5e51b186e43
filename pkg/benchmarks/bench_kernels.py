"""Compare the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--points 200000] [--repeat 5]

Times expression evaluation, batched segment root finding and two full
integrations under each backend, after a warm-up call that absorbs JIT
compilation, and checks that both backends return the same numbers.
"""

import argparse
import time

import numpy as np

from implicitquad import kernels
from implicitquad.fields import ExprField
from implicitquad.geometry import Box
from implicitquad.region import integrate_region
from implicitquad.surface import integrate_surface

LEVELSET_2D = "x^2+4*y^2-1+0.1*sin(3*x)*cos(2*y)"


def best_of(fn, repeat):
    fn()
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(n_points):
    rng = np.random.default_rng(7)
    F = ExprField.from_text(LEVELSET_2D, 2)
    pts = rng.uniform(-1.1, 1.1, size=(n_points, 2))

    m = n_points // 4
    a = np.zeros((m, 2))
    theta = rng.uniform(0, 2 * np.pi, m)
    b = 1.5 * np.column_stack([np.cos(theta), np.sin(theta)])
    fa, _ = F.value_and_grad(a)
    fb, _ = F.value_and_grad(b)

    def roots():
        return kernels.segment_roots(F, a, b, fa, fb, np.full(m, 0.5), 1e-12, 1e-14)[0]

    box2 = Box.from_flat([-1.1, 1.1, -1.1, 1.1])
    box3 = Box.from_flat([-1.1, 1.1] * 3)
    return {
        "eval value+grad": lambda: F.value_and_grad(pts)[1],
        "segment roots": roots,
        "region 2-D n=64 q=8": lambda: integrate_region(box2, 64, LEVELSET_2D, "1", 8),
        "surface 3-D n=12 q=6": lambda: integrate_surface(box3, 12, "x^2+y^2+z^2-1", "1", 6),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = kernels.available_backends()
    timings, outputs = {}, {}
    for name in backends:
        with kernels.use_backend(name):
            for label, fn in cases(args.points).items():
                timings[label, name], outputs[label, name] = best_of(fn, args.repeat)

    print(f"{'case':24s}" + "".join(f"{b:>12s}" for b in backends) + "     speedup   max |diff|")
    for label in cases(8):
        row = f"{label:24s}" + "".join(f"{timings[label, b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            x, y = (np.asarray(outputs[label, b], dtype=float) for b in backends)
            row += f"  {timings[label, 'numpy'] / timings[label, 'numba']:9.2f}x  {np.max(np.abs(x - y)):10.2e}"
        print(row)


if __name__ == "__main__":
    main()
