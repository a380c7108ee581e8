"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot paths: single/two/three-qubit gate application at 7 and
12 qubits, counter-RNG uniform generation, and an end-to-end sample_shots of
the full router circuit. Run:

    python benchmarks/bench_kernels.py [--shots 100000] [--repeat 5]
"""

import argparse
import os
import statistics
import sys
import time

import numpy as np


def _time(fn, repeat):
    best = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return min(best), statistics.median(best)


def bench_apply(backend, n, reps=200):
    from qrouter.gates import GateKind, gate_matrix

    rng = np.random.default_rng(1)
    amps = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    amps /= np.linalg.norm(amps)
    cases = [
        ("1q H", gate_matrix(GateKind.H), (n // 2,)),
        ("2q CX", gate_matrix(GateKind.CX), (0, n - 1)),
        ("3q CSWAP", gate_matrix(GateKind.CSWAP), (0, n // 2, n - 1)),
    ]
    out = []
    for label, gate, axes in cases:
        def run():
            a = amps
            for _ in range(reps):
                a = backend.apply_unitary(a, gate, axes, n)
        best, _ = _time(run, 3)
        out.append((f"{label} @ {n}q", reps / best))
    return out


def bench_rng(backend, count=1_000_000):
    def run():
        backend.uniform_block(12345, 0, count, 7)
    best, _ = _time(run, 5)
    return [("uniform_block", count / best)]


def bench_sampler(shots, repeat):
    from qrouter.correction import ChannelParams
    from qrouter.experiment import build_router_circuit
    from qrouter.sim import NoiseSpec, sample_shots

    rc = build_router_circuit(ChannelParams(0.5, 0.5), "both-qubits", ("Z", "Z", "Z"))

    def run():
        sample_shots(rc.circuit, shots, NoiseSpec(depolarizing_per_cx=0.01, rng_seed=3))

    best, med = _time(run, repeat)
    return [(f"sample_shots({shots})", shots / best)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--shots", type=int, default=100_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    from qrouter._kernels import available_backends

    backends = available_backends()
    print(f"backends available: {', '.join(sorted(backends))}")
    rows = {}
    for name in sorted(backends):
        backend = backends[name]
        entries = []
        for n in (7, 12):
            entries += bench_apply(backend, n)
        entries += bench_rng(backend)
        rows[name] = dict(entries)

    # sampler goes through the selected backend; force each via env + re-exec
    sampler = {}
    for name in sorted(backends):
        if os.environ.get("QROUTE_KERNELS") == name:
            sampler[name] = dict(bench_sampler(args.shots, args.repeat))
    if not sampler:
        here = dict(bench_sampler(args.shots, args.repeat))
        from qrouter._kernels import BACKEND_NAME

        sampler[BACKEND_NAME] = here

    labels = list(next(iter(rows.values())))
    width = max(len(label) for label in labels) + 2
    header = "kernel".ljust(width) + "".join(f"{name:>18}" for name in sorted(rows))
    print(header)
    print("-" * len(header))
    for label in labels:
        line = label.ljust(width)
        for name in sorted(rows):
            line += f"{rows[name][label]:>14.3g}/s"
        print(line)
    for name, entries in sampler.items():
        for label, rate in entries.items():
            print(f"{label} [{name} backend]: {rate:.3g} shots/s")
    if len(rows) == 2:
        speedups = [rows["compiled"][label] / rows["numpy"][label] for label in labels]
        print(f"compiled/numpy speedup: min {min(speedups):.2f}x, max {max(speedups):.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
