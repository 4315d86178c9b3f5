"""Compare the compiled and pure-Python kernel backends.

Times each hot kernel on a 100-node round, then a full simulation run per
backend (each run in a fresh interpreter, since the backend is fixed at import).

    python3 benchmarks/bench_kernels.py [--repeat 200] [--rounds 2000]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from ehorm_sim import _kernels_py, kernels
from ehorm_sim.radio_model import RadioParams
from ehorm_sim.topology import deploy

try:
    from ehorm_sim import _kernels as compiled
except ImportError:
    compiled = None


def round_inputs(n=100, seed=3):
    net = deploy(n, 100.0, 100.0, 0.5, hetero=(0.1, 1.0), seed=seed)
    g = np.random.default_rng(seed)
    heads = np.sort(g.choice(n, size=n // 10, replace=False)).astype(np.int64)
    joiners = np.ones(n, dtype=bool)
    joiners[heads] = False
    is_head = ~joiners
    can_send = g.random(n) < 0.9
    return net, heads, joiners, is_head, can_send, g.random(n)


def kernel_cases(backend):
    net, heads, joiners, is_head, can_send, draws = round_inputs()
    radio = RadioParams()
    member_of = kernels.associate(net.x, net.y, joiners, heads, backend=backend)
    prob = np.full(net.n, 0.1)
    return {
        "associate": lambda: kernels.associate(net.x, net.y, joiners, heads, backend=backend),
        "deliver": lambda: kernels.deliver(
            net.x, net.y, net.dist_sink, member_of, is_head, can_send, 4000, radio, backend=backend
        ),
        "elect": lambda: kernels.elect(prob, draws, net.active, np.zeros(net.n, dtype=bool), 3, backend=backend),
        "play (fused round)": lambda: kernels.play(
            net.copy(), np.zeros(net.n, dtype=bool), prob, draws, 3e-4, 4000, radio, backend=backend
        ),
    }


RUN = (
    "import time; from ehorm_sim.engine import SimConfig, run; from ehorm_sim import kernels;"
    "t = time.perf_counter(); run(SimConfig(protocol='deec', ehorm=True, max_rounds={rounds}, seed=1));"
    "print(kernels.BACKEND, time.perf_counter() - t)"
)


def full_run(rounds, pure):
    env = dict(os.environ)
    env.pop("EHORM_SIM_PURE_PYTHON", None)
    if pure:
        env["EHORM_SIM_PURE_PYTHON"] = "1"
    out = subprocess.run(
        [sys.executable, "-c", RUN.format(rounds=rounds)], env=env, capture_output=True, text=True, check=True
    ).stdout.split()
    return out[0], float(out[1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200, help="calls per kernel timing")
    ap.add_argument("--rounds", type=int, default=2000, help="rounds for the full-run timing")
    args = ap.parse_args(argv)

    if compiled is None:
        print("compiled extension not built; only the pure-Python backend is available")
    backends = {"python": _kernels_py, "cython": compiled}
    print(f"{'kernel':20s} {'python us':>10s} {'cython us':>10s} {'speedup':>8s}")
    for name in kernel_cases(_kernels_py):
        us = {}
        for label, impl in backends.items():
            if impl is None:
                continue
            fn = kernel_cases(impl)[name]
            us[label] = min(timeit.repeat(fn, number=args.repeat, repeat=3)) / args.repeat * 1e6
        cy = us.get("cython")
        speed = f"{us['python'] / cy:7.1f}x" if cy else "     n/a"
        print(f"{name:20s} {us['python']:10.1f} {cy if cy else float('nan'):10.1f} {speed}")

    print(f"\nfull iDEEC run, {args.rounds} rounds (100 nodes):")
    for pure in (True, False):
        backend, seconds = full_run(args.rounds, pure)
        print(f"  {backend:7s} {seconds:7.2f} s")


if __name__ == "__main__":
    main()
