"""Brute-force reference computations, independent of the package kernels."""

import numpy as np


def embed_matrix(u, targets, n):
    """Embed a k-qubit matrix into the full register, element by element.

    Pure integer bit surgery; shares no code with the package.
    """
    d = 1 << n
    k = len(targets)
    full = np.zeros((d, d), dtype=complex)
    for col in range(d):
        sub_in = 0
        for j, t in enumerate(targets):
            sub_in |= ((col >> t) & 1) << j
        base = col
        for t in targets:
            base &= ~(1 << t)
        for sub_out in range(1 << k):
            row = base
            for j, t in enumerate(targets):
                if (sub_out >> j) & 1:
                    row |= 1 << t
            full[row, col] += u[sub_out, sub_in]
    return full


def kron_states(a, b):
    """Joint amplitudes with `a` on the high qubits, via explicit loops."""
    out = np.zeros(len(a) * len(b), dtype=complex)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i * len(b) + j] = ai * bj
    return out


def random_state(n, rng):
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return a / np.linalg.norm(a)


def random_density(n, rng):
    d = 1 << n
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = a @ a.conj().T
    return m / np.trace(m)


def random_unitary(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(a)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def w_target(n):
    """Equal-weight single-excitation amplitudes, built by enumeration."""
    amps = np.zeros(1 << n, dtype=complex)
    for q in range(n):
        amps[1 << q] = 1.0 / np.sqrt(n)
    return amps
