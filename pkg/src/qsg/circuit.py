"""Gate-level circuits, the team state preparations, and shot execution.

Supported gates: ``H``, ``X``, ``RY(theta)``, ``U(theta, phi)`` on one qubit
and ``CX``, ``CRY(theta)`` on a control/target pair.  ``U`` is the
single-parameter-pair strategy rotation

    U(theta, phi) = [[cos(theta/2),            -exp(i phi) sin(theta/2)],
                     [exp(-i phi) sin(theta/2), cos(theta/2)           ]]

so ``RY(theta) == U(theta, 0)``.  Angles are wrapped into ``[0, 2*pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .qstate import MAX_QUBITS, MixedState, ProbabilityTable, PureState, bitstring

TWO_PI = 2.0 * math.pi

_SINGLE_QUBIT_KINDS = ("H", "X", "RY", "U")
_TWO_QUBIT_KINDS = ("CX", "CRY")
_PARAM_COUNT = {"H": 0, "X": 0, "RY": 1, "U": 2, "CX": 0, "CRY": 1}

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)


def su2_matrix(theta: float, phi: float) -> np.ndarray:
    """Strategy rotation matrix; parameters are wrapped into [0, 2*pi)."""
    theta = float(theta) % TWO_PI
    phi = float(phi) % TWO_PI
    c = math.cos(theta / 2.0)
    s = math.sin(theta / 2.0)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, -e * s], [e.conjugate() * s, c]], dtype=np.complex128)


@dataclass(frozen=True)
class Gate:
    """One gate application; ``qubits`` is (target,) or (control, target)."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        if kind in _SINGLE_QUBIT_KINDS:
            arity = 1
        elif kind in _TWO_QUBIT_KINDS:
            arity = 2
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        if len(qubits) != arity:
            raise ValueError(f"{kind} acts on {arity} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"{kind} qubits must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise ValueError(f"qubit indices must be nonnegative, got {qubits}")
        params = tuple(float(p) % TWO_PI for p in self.params)
        if len(params) != _PARAM_COUNT[kind]:
            raise ValueError(
                f"{kind} takes {_PARAM_COUNT[kind]} parameter(s), got {len(params)}"
            )
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "params", params)

    @classmethod
    def h(cls, qubit: int) -> "Gate":
        return cls("H", (qubit,))

    @classmethod
    def x(cls, qubit: int) -> "Gate":
        return cls("X", (qubit,))

    @classmethod
    def ry(cls, theta: float, qubit: int) -> "Gate":
        return cls("RY", (qubit,), (theta,))

    @classmethod
    def u(cls, theta: float, phi: float, qubit: int) -> "Gate":
        return cls("U", (qubit,), (theta, phi))

    @classmethod
    def cx(cls, control: int, target: int) -> "Gate":
        return cls("CX", (control, target))

    @classmethod
    def cry(cls, theta: float, control: int, target: int) -> "Gate":
        return cls("CRY", (control, target), (theta,))


def gate_matrix(gate: Gate) -> tuple[np.ndarray, tuple[int, ...]]:
    """Matrix of a gate plus its kernel target order (low bit first).

    Controlled gates put the target on the low matrix bit and the control
    on the high one, so rows/columns 2 and 3 form the controlled block.
    """
    if gate.kind == "H":
        return _H, gate.qubits
    if gate.kind == "X":
        return _X, gate.qubits
    if gate.kind == "RY":
        return su2_matrix(gate.params[0], 0.0), gate.qubits
    if gate.kind == "U":
        return su2_matrix(gate.params[0], gate.params[1]), gate.qubits
    control, target = gate.qubits
    m = np.eye(4, dtype=np.complex128)
    if gate.kind == "CX":
        m[2:, 2:] = _X
    else:
        m[2:, 2:] = su2_matrix(gate.params[0], 0.0)
    return m, (target, control)


@dataclass(frozen=True)
class Circuit:
    """Fixed-width gate sequence acting on ``n_qubits`` qubits."""

    n_qubits: int
    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {self.n_qubits}")
        gates = tuple(self.gates)
        for g in gates:
            if any(q >= self.n_qubits for q in g.qubits):
                raise ValueError(
                    f"gate {g.kind} on {g.qubits} exceeds register of {self.n_qubits}"
                )
        object.__setattr__(self, "gates", gates)


def bell_circuit() -> Circuit:
    """Two-qubit preparation of (|00> + |11>)/sqrt(2)."""
    return Circuit(2, (Gate.h(0), Gate.cx(0, 1)))


def w_state_angles(n_qubits: int) -> tuple[float, ...]:
    """Cascade angles theta_i = 2*arccos(1/sqrt(n - i)) for the W builder.

    For n = 3 these evaluate to about (1.9106, 1.5708); the resulting state
    is checked against the equal-weight single-excitation target exactly.
    """
    if not 2 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"W preparation needs 2..{MAX_QUBITS} qubits, got {n_qubits}")
    return tuple(2.0 * math.acos(1.0 / math.sqrt(n_qubits - i)) for i in range(n_qubits - 1))


def w_state_circuit(n_qubits: int) -> Circuit:
    """Preparation of the W state: equal superposition of one-hot bitstrings.

    An X seeds the excitation on qubit 0; each CRY/CX pair then moves it one
    qubit up with the correct amplitude split.
    """
    angles = w_state_angles(n_qubits)
    gates: list[Gate] = [Gate.x(0)]
    for i, theta in enumerate(angles):
        gates.append(Gate.cry(theta, i, i + 1))
        gates.append(Gate.cx(i + 1, i))
    return Circuit(n_qubits, tuple(gates))


def simulate(circuit: Circuit) -> PureState:
    """Noiseless statevector of the circuit applied to |0...0>."""
    amps = np.zeros(1 << circuit.n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    for g in circuit.gates:
        u, targets = gate_matrix(g)
        amps = _kernels.apply_matrix_state(amps, u, targets, circuit.n_qubits)
    return PureState(circuit.n_qubits, amps)


def _gate_noise_applications(noise, gate: Gate, n_qubits: int):
    """Yield (kraus_operators, targets) to apply after one gate.

    A one-qubit channel hits every qubit the gate touched; a channel whose
    width matches the gate arity is applied jointly; a wider channel skips
    the gate (pair noise attaches to pair gates only).
    """
    if noise is None:
        return
    # local import: channel depends on qstate only, so this cannot cycle
    from .channel import KrausChannel, NoiseProfile, profile_gate_channels

    if isinstance(noise, NoiseProfile):
        yield from profile_gate_channels(noise, gate)
        return
    channels = noise if isinstance(noise, (list, tuple)) else (noise,)
    _, kernel_targets = gate_matrix(gate)
    for ch in channels:
        if not isinstance(ch, KrausChannel):
            raise TypeError(f"expected KrausChannel entries, got {type(ch).__name__}")
        if ch.n_qubits > n_qubits:
            raise ValueError(
                f"channel on {ch.n_qubits} qubit(s) does not fit a "
                f"{n_qubits}-qubit register"
            )
        if ch.n_qubits == len(gate.qubits):
            yield ch.operators, kernel_targets
        elif ch.n_qubits == 1:
            for q in gate.qubits:
                yield ch.operators, (q,)


def _final_density_array(circuit: Circuit, noise) -> np.ndarray:
    d = 1 << circuit.n_qubits
    rho = np.zeros((d, d), dtype=np.complex128)
    rho[0, 0] = 1.0
    for g in circuit.gates:
        u, targets = gate_matrix(g)
        rho = _kernels.apply_matrix_density(rho, u, targets, circuit.n_qubits)
        for ops, tgts in _gate_noise_applications(noise, g, circuit.n_qubits):
            rho = _kernels.apply_kraus_density(rho, ops, tgts, circuit.n_qubits)
    return rho


def simulate_density(circuit: Circuit, noise=None) -> MixedState:
    """Density-matrix evolution with a noise application after every gate.

    ``noise`` may be None, a KrausChannel, a list of KrausChannels, or a
    NoiseProfile.  A one-qubit channel is applied to each qubit the gate
    touched; a channel matching the gate arity is applied jointly.
    """
    return MixedState(circuit.n_qubits, _final_density_array(circuit, noise))


@dataclass(frozen=True, eq=False)
class ShotRecord:
    """Measurement memory: one basis label per shot, in draw order."""

    n_qubits: int
    shots: int
    memory: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if len(self.memory) != self.shots:
            raise ValueError(f"memory holds {len(self.memory)} entries for {self.shots} shots")

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for m in self.memory:
            out[m] = out.get(m, 0) + 1
        return out


def final_distribution(circuit: Circuit, noise=None) -> ProbabilityTable:
    """Exact outcome distribution, including readout error when the noise
    source is a profile that defines one."""
    from .channel import NoiseProfile, apply_readout_to_probs

    if noise is None:
        a = simulate(circuit).amplitudes
        probs = a.real**2 + a.imag**2
    else:
        rho = _final_density_array(circuit, noise)
        probs = np.maximum(rho.diagonal().real.copy(), 0.0)
    if isinstance(noise, NoiseProfile) and noise.readout_error:
        probs = apply_readout_to_probs(probs, noise.readout_error, circuit.n_qubits)
    return ProbabilityTable(circuit.n_qubits, probs)


def execute(
    circuit: Circuit,
    noise=None,
    shots: int = 1024,
    *,
    rng: np.random.Generator,
) -> ShotRecord:
    """Sample the circuit's final distribution into a shot memory.

    Noiseless circuits sample the exact statevector distribution; noisy ones
    sample the evolved density's diagonal.  When a profile defines readout
    error, each sampled bit is flipped independently with the per-qubit
    misread probabilities.
    """
    from .channel import NoiseProfile, readout_flip_bits

    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = circuit.n_qubits
    if noise is None:
        a = simulate(circuit).amplitudes
        probs = a.real**2 + a.imag**2
    else:
        rho = _final_density_array(circuit, noise)
        probs = np.maximum(rho.diagonal().real.copy(), 0.0)
        probs = probs / probs.sum()
    cdf = _kernels.cdf_from_probs(probs)
    idx = _kernels.sample_indices(cdf, rng.random(shots))
    if isinstance(noise, NoiseProfile) and noise.readout_error:
        bits = ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)
        bits = readout_flip_bits(bits, noise.readout_error, rng)
        idx = bits @ (1 << np.arange(n, dtype=np.int64))
    memory = tuple(format(int(i), f"0{n}b") for i in idx)
    return ShotRecord(n_qubits=n, shots=shots, memory=memory)
