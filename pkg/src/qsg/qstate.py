"""Dense state representations and seeded randomness for small registers.

Basis convention used across the package: basis index bit ``q`` is qubit
``q``, so in the bitstring for index ``i`` (``format(i, "0{n}b")``) the
rightmost character is qubit 0.  Player ``i`` of a team reads qubit ``i``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import _kernels

MAX_QUBITS = 10

# algebraic identities hold to 1e-10; accumulated drift bounds are 1e-9
ATOL = 1e-10
DRIFT_ATOL = 1e-9


def bitstring(index: int, n_qubits: int) -> str:
    """Basis label of ``index``: qubit 0 is the rightmost character."""
    if not 0 <= index < (1 << n_qubits):
        raise ValueError(f"index {index} out of range for {n_qubits} qubits")
    return format(index, f"0{n_qubits}b")


def index_of(bits: str) -> int:
    """Inverse of :func:`bitstring`."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"invalid bitstring {bits!r}")
    return int(bits, 2)


def derive_rng(master_seed: int, label: str) -> np.random.Generator:
    """Named PCG64 stream, reproducible across platforms and processes.

    The label is hashed so that streams such as ``"defense"`` and
    ``"measurement:2Q"`` are statistically independent for any master seed.
    """
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    seq = np.random.SeedSequence([int(master_seed), *words])
    return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized statevector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps.real)) or not np.all(np.isfinite(amps.imag)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.sum(amps.real**2 + amps.imag**2))
        if abs(norm - 1.0) > DRIFT_ATOL:
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    def probability(self, bits: str) -> float:
        a = self.amplitudes[index_of(bits)]
        return float(a.real**2 + a.imag**2)

    def to_density(self) -> "MixedState":
        m = np.outer(self.amplitudes, self.amplitudes.conj())
        return MixedState(self.n_qubits, m)


def zero_state(n_qubits: int) -> PureState:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return PureState(n_qubits, amps)


def basis_state(bits: str) -> PureState:
    n = len(bits)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index_of(bits)] = 1.0
    return PureState(n, amps)


@dataclass(frozen=True, eq=False)
class MixedState:
    """Density matrix: Hermitian, unit trace, positive semidefinite."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        d = 1 << self.n_qubits
        m = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        if m.shape != (d, d):
            raise ValueError(f"expected shape {(d, d)}, got {m.shape}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise ValueError("density matrix must be finite")
        if np.max(np.abs(m - m.conj().T)) > ATOL:
            raise ValueError("density matrix is not Hermitian")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        low = float(np.linalg.eigvalsh(m)[0])
        if low < -DRIFT_ATOL:
            raise ValueError(f"density matrix has negative eigenvalue {low!r}")
        object.__setattr__(self, "matrix", m)

    def probability(self, bits: str) -> float:
        p = float(self.matrix.diagonal().real[index_of(bits)])
        return max(p, 0.0)


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Exact outcome distribution over the ``2**n`` basis labels."""

    n_qubits: int
    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(self.probs, dtype=np.float64)
        if p.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} entries, got shape {p.shape}")
        if np.any(p < -1e-12) or np.any(p > 1.0 + 1e-12):
            raise ValueError("probabilities must lie in [0, 1]")
        total = float(p.sum())
        if abs(total - 1.0) > ATOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "probs", np.clip(p, 0.0, 1.0))

    def probability(self, bits: str) -> float:
        return float(self.probs[index_of(bits)])

    def entries(self) -> list[tuple[str, float]]:
        n = self.n_qubits
        return [(bitstring(i, n), float(p)) for i, p in enumerate(self.probs)]


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Joint state with ``a`` on the high qubits and ``b`` on the low ones."""
    n = a.n_qubits + b.n_qubits
    if n > MAX_QUBITS:
        raise ValueError(f"product register of {n} qubits exceeds the {MAX_QUBITS}-qubit cap")
    return PureState(n, np.kron(a.amplitudes, b.amplitudes))


def apply_unitary(state: PureState, u: np.ndarray, targets: tuple[int, ...]) -> PureState:
    """Apply a ``2**k x 2**k`` unitary to the ordered target qubits.

    ``targets[0]`` is the least significant bit of the matrix index.
    """
    u = np.ascontiguousarray(u, dtype=np.complex128)
    targets = tuple(int(t) for t in targets)
    k = len(targets)
    if k == 0:
        raise ValueError("at least one target qubit is required")
    if u.shape != (1 << k, 1 << k):
        raise ValueError(f"matrix shape {u.shape} does not act on {k} qubits")
    if len(set(targets)) != k:
        raise ValueError(f"target qubits must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < state.n_qubits:
            raise ValueError(f"target qubit {t} out of range for {state.n_qubits} qubits")
    dev = np.max(np.abs(u.conj().T @ u - np.eye(1 << k)))
    if dev > ATOL:
        raise ValueError(f"matrix is not unitary (max deviation {float(dev):.3e})")
    amps = _kernels.apply_matrix_state(state.amplitudes, u, targets, state.n_qubits)
    return PureState(state.n_qubits, amps)


def measurement_probabilities(state: PureState | MixedState) -> ProbabilityTable:
    """Computational-basis outcome distribution of a pure or mixed state."""
    if isinstance(state, PureState):
        a = state.amplitudes
        p = a.real**2 + a.imag**2
    else:
        p = np.maximum(state.matrix.diagonal().real.copy(), 0.0)
    return ProbabilityTable(state.n_qubits, p)


def sample_bitstring(table: ProbabilityTable, rng: np.random.Generator) -> str:
    """Draw one basis label from the table."""
    cdf = _kernels.cdf_from_probs(table.probs)
    idx = int(_kernels.sample_indices(cdf, rng.random(1))[0])
    return bitstring(idx, table.n_qubits)


def sample_bitstrings(table: ProbabilityTable, size: int, rng: np.random.Generator) -> list[str]:
    """Draw ``size`` labels in one vectorized pass."""
    cdf = _kernels.cdf_from_probs(table.probs)
    idx = _kernels.sample_indices(cdf, rng.random(size))
    n = table.n_qubits
    return [format(i, f"0{n}b") for i in idx]


def fidelity(rho: MixedState, psi: PureState) -> float:
    """Overlap <psi| rho |psi> of a density matrix with a pure target."""
    if rho.n_qubits != psi.n_qubits:
        raise ValueError(
            f"dimension mismatch: {rho.n_qubits} vs {psi.n_qubits} qubits"
        )
    v = psi.amplitudes
    f = float(np.real(v.conj() @ (rho.matrix @ v)))
    return float(np.clip(f, 0.0, 1.0))
