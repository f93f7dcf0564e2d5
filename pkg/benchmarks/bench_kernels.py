"""Compare the compiled and pure-Python mean-field kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times a saddle-window flow map (121 starts) and a long time-dependent
trajectory on every available backend and checks that they agree.
"""

import argparse
import math
import timeit

import numpy as np

from cavity_xyz import kernels


def _flow_case():
    n, chi = 700, 1e-3
    p = np.zeros(kernels.N_PARAMS)
    p[0:3] = 4 * chi, 2 * chi, 0.0
    p[12] = 1e-5
    th = np.linspace(math.pi / 2 - math.pi / 12, math.pi / 2 + math.pi / 12, 11)
    tt, pp = np.meshgrid(th, th + 0.0, indexing="ij")
    starts = n / 2 * np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp),
                               np.cos(tt)], axis=-1).reshape(-1, 3)
    dt = 0.05 / (2 * chi * n)
    return p, starts, dt


def _trajectory_case():
    n, chi = 700, 1e-3
    p = np.zeros(kernels.N_PARAMS)
    p[0:2] = 2 * chi, 2 * chi
    p[6:9] = chi, 3 * chi * n, 0.2
    y0 = n / 2 * np.array([0.6, 0.0, 0.8])
    t_out = np.linspace(0, 20 / (chi * n), 201)
    return p, y0, t_out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    p, starts, dt = _flow_case()
    pt, y0, t_out = _trajectory_case()
    results = {}
    print(f"{'backend':<8} {'flow map (121)':>16} {'trajectory':>14}")
    for name, mod in backends.items():
        flow = min(timeit.repeat(lambda: mod.flow_batch(p, starts, dt, 1e-10, 1e-8),
                                 number=1, repeat=args.repeat))
        traj = min(timeit.repeat(lambda: mod.integrate(pt, y0, t_out, 1e-10, 1e-8),
                                 number=1, repeat=args.repeat))
        results[name] = (flow, traj, np.asarray(mod.flow_batch(p, starts, dt, 1e-10, 1e-8)[0]))
        print(f"{name:<8} {flow * 1e3:>13.2f} ms {traj * 1e3:>11.2f} ms")
    if len(results) == 2:
        py, cy = results["python"], results["cython"]
        diff = np.abs(py[2] - cy[2]).max()
        print(f"speed-up: flow map x{py[0] / cy[0]:.1f}, trajectory x{py[1] / cy[1]:.1f}; "
              f"max |difference| {diff:.1e}")
    else:
        print("compiled extension not available; only the Python kernels were timed")


if __name__ == "__main__":
    main()
