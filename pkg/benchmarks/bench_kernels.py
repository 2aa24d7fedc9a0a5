"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each case runs once per backend on identical inputs; the table reports the
best of ``--repeat`` runs and the speed-up of the compiled backend.
"""
import argparse
import json
import sys
import timeit

import numpy as np

from lcladder import kernels
from lcladder.fixedpoint import DiscRegion, LadderMap, check_contraction
from lcladder.lowpass import LowPassConfig, make_impedances
from lcladder.propagation import gaussian_packet_config, propagate_packet

KERNEL_NAMES = ("map_orbit", "map_values", "lipschitz_max", "exp_sum")


def _use(backend):
    mod = kernels.get_backend(backend)
    for name in KERNEL_NAMES:
        setattr(kernels, name, getattr(mod, name))
    return mod


def _cases():
    rng = np.random.default_rng(0)
    za = rng.normal(size=200_000) + 1j * rng.normal(size=200_000)
    zb = za + 1e-3 * (rng.normal(size=za.size) + 1j * rng.normal(size=za.size))
    x = np.linspace(0, 400, 2_000)
    y = np.linspace(-0.6, 0.6, 1_500)
    coeffs = rng.normal(size=y.size) + 1j * rng.normal(size=y.size)
    lossy = LowPassConfig(1, 1, 1, 1e-3, 1e-3)
    params = make_impedances(lossy)
    region = DiscRegion(1 + 0.5j, 1e-3)
    filt = LowPassConfig(1, 1, 1)
    packet = gaussian_packet_config(filt, 1.0, 20.0, [0, 5, 10, 20])

    return {
        "map_orbit ladder n=1e6": lambda m: m.map_orbit(kernels.LADDER, params.z1, params.z2, 1 + 0j, 1_000_000, np.inf),
        "map_orbit tangent n=1e6": lambda m: m.map_orbit(kernels.TANGENT, 0, 0, 0.3 + 0.1j, 1_000_000, 1e150),
        "map_values quadratic 2e5": lambda m: m.map_values(kernels.QUADRATIC, 0.25, 0, za),
        "lipschitz_max ladder 2e5": lambda m: m.lipschitz_max(kernels.LADDER, params.z1, params.z2, za, zb),
        "exp_sum 2000x1500": lambda m: m.exp_sum(x, y, coeffs, 1),
        "check_contraction 1e5": lambda m: check_contraction(LadderMap(params.z1, params.z2), region, 100_000),
        "propagate_packet 4 sections": lambda m: propagate_packet(packet, filt),
    }


def run(repeat):
    rows = []
    backends = kernels.available_backends()
    saved = {name: getattr(kernels, name) for name in KERNEL_NAMES}
    try:
        for label, fn in _cases().items():
            times = {}
            for backend in backends:
                mod = _use(backend)
                fn(mod)
                times[backend] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=repeat))
            rows.append({"case": label, **times})
    finally:
        for name, f in saved.items():
            setattr(kernels, name, f)
    return backends, rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results to this path")
    args = ap.parse_args(argv)
    backends, rows = run(args.repeat)
    head = f"{'case':<30}" + "".join(f"{b + ' [ms]':>16}" for b in backends)
    if "cython" in backends:
        head += f"{'speed-up':>10}"
    print(head)
    for r in rows:
        line = f"{r['case']:<30}" + "".join(f"{1e3 * r[b]:>16.2f}" for b in backends)
        if "cython" in backends:
            line += f"{r['python'] / r['cython']:>9.1f}x"
        print(line)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump({"backends": backends, "rows": rows}, fh, indent=2)
            fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
