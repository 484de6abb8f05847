"""Timing comparison of the numpy and numba kernel backends.

Each workload is timed as best-of-``repeats`` wall time over a fixed batch,
after one untimed warm-up call per backend (the first numba call compiles).
Run from the repository root:

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --qubits 12 --batch 200000
"""

import argparse
import math
import time

import numpy as np

from qsg import _kernels
from qsg.circuit import su2_matrix


def _bench(fn, args, repeats):
    fn(*args)  # warm-up, also triggers jit compilation
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads(n_qubits, n_density, batch, rng):
    state = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    state = np.ascontiguousarray(state / np.linalg.norm(state))
    mat = rng.normal(size=(1 << n_density, 1 << n_density)) + 0j
    mat = np.ascontiguousarray(mat)
    u1 = su2_matrix(0.7, 1.1)
    u2 = np.kron(u1, su2_matrix(2.0, 0.3))
    cdf = np.ascontiguousarray(np.linspace(0.125, 1.0, 8))
    uniforms = np.ascontiguousarray(rng.uniform(0.0, 1.0, size=batch))
    actions = np.ascontiguousarray(rng.integers(0, 2, size=(batch, 3), dtype=np.uint8))
    defense = np.ascontiguousarray(rng.integers(0, 2, size=batch, dtype=np.uint8))
    return [
        (f"apply_1q ({n_qubits} qubits)", "apply_1q", (state, u1, n_qubits // 2, n_qubits)),
        (
            f"apply_2q ({n_qubits} qubits)",
            "apply_2q",
            (state, u2, 1, n_qubits - 1, n_qubits),
        ),
        (
            f"apply_1q_cols ({n_density}-qubit density)",
            "apply_1q_cols",
            (mat, u1, n_density // 2, n_density),
        ),
        (
            f"apply_2q_cols ({n_density}-qubit density)",
            "apply_2q_cols",
            (mat, u2, 0, n_density - 1, n_density),
        ),
        (f"sample_indices (batch {batch})", "sample_indices", (cdf, uniforms)),
        (
            f"sample_action_bits (batch {batch})",
            "sample_action_bits",
            (cdf, uniforms, 3),
        ),
        (f"score_rounds (batch {batch})", "score_rounds", (actions, defense)),
    ]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--qubits", type=int, default=10, help="statevector size")
    parser.add_argument("--density", type=int, default=6, help="density matrix size")
    parser.add_argument("--batch", type=int, default=100_000, help="sampling batch")
    parser.add_argument("--repeats", type=int, default=20, help="timed repetitions")
    parser.add_argument("--seed", type=int, default=20251021)
    args = parser.parse_args()

    backends = {"numpy": _kernels.implementations("numpy")}
    try:
        backends["numba"] = _kernels.implementations("numba")
    except ImportError as exc:
        print(f"numba backend unavailable ({exc}); timing numpy only")

    rng = np.random.default_rng(args.seed)
    rows = _workloads(args.qubits, args.density, args.batch, rng)

    width = max(len(name) for name, _, _ in rows)
    header = f"{'workload':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(f"active backend: {_kernels.BACKEND}")
    print(header)
    print("-" * len(header))
    for name, key, call_args in rows:
        times = [_bench(impls[key], call_args, args.repeats) for impls in backends.values()]
        line = f"{name:<{width}}  " + "  ".join(f"{t * 1e6:>10.1f}us" for t in times)
        if len(times) == 2 and times[1] > 0:
            line += f"  {times[0] / times[1]:>7.2f}x"
        print(line)


if __name__ == "__main__":
    main()
