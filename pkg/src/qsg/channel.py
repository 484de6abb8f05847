"""Kraus channels, the sabotage operator, and calibrated noise profiles.

Channel constructors return operator sets in the operator-sum convention
``rho -> sum_k E_k rho E_k^dagger``.  Trace preservation is a property to
check (:func:`verify_cptp`), not a construction-time hard failure, so that
defective operator sets can be diagnosed; every constructor in this module
produces a trace-preserving set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np
import yaml

from . import _kernels
from .qstate import ATOL, MixedState

_I2 = np.eye(2, dtype=np.complex128)
_PAULI = {
    "I": _I2,
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Operator-sum channel acting on a fixed number of qubits."""

    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not self.operators:
            raise ValueError("a channel needs at least one Kraus operator")
        ops = []
        dim = None
        for e in self.operators:
            e = np.ascontiguousarray(e, dtype=np.complex128)
            if e.ndim != 2 or e.shape[0] != e.shape[1]:
                raise ValueError(f"Kraus operators must be square, got shape {e.shape}")
            if dim is None:
                dim = e.shape[0]
            elif e.shape[0] != dim:
                raise ValueError("Kraus operators must share one dimension")
            ops.append(e)
        if dim < 2 or dim & (dim - 1):
            raise ValueError(f"operator dimension {dim} is not a power of two")
        object.__setattr__(self, "operators", tuple(ops))

    @property
    def dimension(self) -> int:
        return self.operators[0].shape[0]

    @property
    def n_qubits(self) -> int:
        return self.dimension.bit_length() - 1


class CptpCheck(NamedTuple):
    ok: bool
    max_deviation: float


def verify_cptp(channel: KrausChannel, atol: float = ATOL) -> CptpCheck:
    """Check sum_k E_k^dagger E_k == identity to within ``atol`` (max norm)."""
    acc = np.zeros((channel.dimension, channel.dimension), dtype=np.complex128)
    for e in channel.operators:
        acc += e.conj().T @ e
    dev = float(np.max(np.abs(acc - np.eye(channel.dimension))))
    return CptpCheck(ok=dev <= atol, max_deviation=dev)


def _check_probability(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


def identity_channel(n_qubits: int = 1) -> KrausChannel:
    return KrausChannel((np.eye(1 << n_qubits, dtype=np.complex128),))


def depolarizing(p: float) -> KrausChannel:
    """Single-qubit depolarizing noise.

    E_0 = sqrt(1 - p) I and sqrt(p/3) X, Y, Z.  At p = 3/4 every input is
    replaced by the maximally mixed state.
    """
    p = _check_probability(p, "depolarizing probability")
    ops = [math.sqrt(1.0 - p) * _I2]
    ops += [math.sqrt(p / 3.0) * _PAULI[k] for k in ("X", "Y", "Z")]
    return KrausChannel(tuple(ops))


def two_qubit_depolarizing(p: float) -> KrausChannel:
    """Two-qubit depolarizing noise: sqrt(1-p) on II, sqrt(p/15) on the
    other fifteen Pauli products."""
    p = _check_probability(p, "depolarizing probability")
    ops = []
    for a in "IXYZ":
        for b in "IXYZ":
            pauli = np.kron(_PAULI[a], _PAULI[b])
            w = math.sqrt(1.0 - p) if a == b == "I" else math.sqrt(p / 15.0)
            ops.append(w * pauli)
    return KrausChannel(tuple(ops))


def amplitude_damping(gamma: float) -> KrausChannel:
    """Energy relaxation toward |0>.

    E_0 = [[1, 0], [0, sqrt(1-gamma)]], E_1 = [[0, sqrt(gamma)], [0, 0]].
    """
    gamma = _check_probability(gamma, "damping probability")
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=np.complex128)
    e1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=np.complex128)
    return KrausChannel((e0, e1))


def phase_damping(lam: float) -> KrausChannel:
    """Pure dephasing: off-diagonal terms shrink by sqrt(1 - lambda)."""
    lam = _check_probability(lam, "dephasing probability")
    e0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - lam)]], dtype=np.complex128)
    e1 = np.array([[0.0, 0.0], [0.0, math.sqrt(lam)]], dtype=np.complex128)
    return KrausChannel((e0, e1))


def bit_flip(p: float) -> KrausChannel:
    """X error with probability p."""
    p = _check_probability(p, "flip probability")
    return KrausChannel(
        (math.sqrt(1.0 - p) * _I2, math.sqrt(p) * _PAULI["X"])
    )


def apply_channel(channel: KrausChannel, rho: MixedState, targets: tuple[int, ...]) -> MixedState:
    """Apply the channel to the target qubits of a density matrix."""
    targets = tuple(int(t) for t in targets)
    if len(targets) != channel.n_qubits:
        raise ValueError(
            f"channel acts on {channel.n_qubits} qubit(s), got targets {targets}"
        )
    if len(set(targets)) != len(targets):
        raise ValueError(f"target qubits must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < rho.n_qubits:
            raise ValueError(f"target qubit {t} out of range for {rho.n_qubits} qubits")
    out = _kernels.apply_kraus_density(rho.matrix, channel.operators, targets, rho.n_qubits)
    return MixedState(rho.n_qubits, out)


@dataclass(frozen=True, eq=False)
class SabotageOp:
    """Round interference acting on the opposing team's register.

    ``unitary`` mode conjugates by a fixed matrix; ``mixture`` mode leaves
    the state alone with probability 1 - p and applies ``base`` otherwise:
    rho -> (1 - p) rho + p N(rho).
    """

    mode: str
    unitary: np.ndarray | None = None
    p: float = 0.0
    base: KrausChannel | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("unitary", "mixture"):
            raise ValueError(f"mode must be 'unitary' or 'mixture', got {self.mode!r}")
        if self.mode == "unitary":
            if self.unitary is None:
                raise ValueError("unitary mode requires a matrix")
            u = np.ascontiguousarray(self.unitary, dtype=np.complex128)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise ValueError(f"sabotage matrix must be square, got {u.shape}")
            dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
            if dev > ATOL:
                raise ValueError(f"sabotage matrix is not unitary (deviation {dev:.3e})")
            object.__setattr__(self, "unitary", u)
        else:
            if self.base is None:
                raise ValueError("mixture mode requires a base channel")
            _check_probability(self.p, "mixture probability")

    @property
    def n_qubits(self) -> int:
        if self.mode == "unitary":
            return self.unitary.shape[0].bit_length() - 1
        return self.base.n_qubits


def sabotage_apply(op: SabotageOp, rho: MixedState, targets: tuple[int, ...]) -> MixedState:
    """Apply a sabotage operation to the target qubits."""
    targets = tuple(int(t) for t in targets)
    if len(targets) != op.n_qubits:
        raise ValueError(f"sabotage acts on {op.n_qubits} qubit(s), got targets {targets}")
    for t in targets:
        if not 0 <= t < rho.n_qubits:
            raise ValueError(f"target qubit {t} out of range for {rho.n_qubits} qubits")
    if op.mode == "unitary":
        out = _kernels.apply_matrix_density(rho.matrix, op.unitary, targets, rho.n_qubits)
        return MixedState(rho.n_qubits, out)
    noisy = _kernels.apply_kraus_density(
        rho.matrix, op.base.operators, targets, rho.n_qubits
    )
    return MixedState(rho.n_qubits, (1.0 - op.p) * rho.matrix + op.p * noisy)


def damping_from_lifetimes(t1_us: float, t2_us: float, gate_time_ns: float) -> tuple[float, float]:
    """Convert relaxation/coherence lifetimes into per-gate channel rates.

    Returns (gamma, dephase): gamma = 1 - exp(-t/T1) feeds amplitude
    damping and dephase = 1 - exp(-t (1/T2 - 1/(2 T1))) feeds phase
    damping, with the gate time converted from ns to the lifetimes' us.
    """
    if t1_us <= 0 or t2_us <= 0:
        raise ValueError(f"lifetimes must be positive, got T1={t1_us}, T2={t2_us}")
    if gate_time_ns < 0:
        raise ValueError(f"gate time must be nonnegative, got {gate_time_ns}")
    if t2_us > 2.0 * t1_us + 1e-12:
        raise ValueError(f"T2={t2_us} exceeds 2*T1={2.0 * t1_us}")
    t_us = gate_time_ns / 1000.0
    gamma = 1.0 - math.exp(-t_us / t1_us)
    pure_rate = 1.0 / t2_us - 1.0 / (2.0 * t1_us)
    dephase = 1.0 - math.exp(-t_us * max(pure_rate, 0.0))
    return gamma, dephase


# ---------------------------------------------------------------------------
# noise profiles


class ProfileError(ValueError):
    """Raised when a profile document violates the schema."""


@dataclass(frozen=True, eq=False)
class NoiseProfile:
    """Device-style error calibration applied per gate kind and per qubit.

    ``single_qubit_error`` maps a gate kind to a depolarizing probability;
    ``two_qubit_error`` is one depolarizing probability for all two-qubit
    gates; ``readout_error`` holds per-qubit (p10, p01) misread pairs.
    Lifetimes plus ``gate_time_ns`` add thermal damping per touched qubit.
    Missing pieces mean no effect of that kind.
    """

    name: str
    single_qubit_error: Mapping[str, float] = field(default_factory=dict)
    two_qubit_error: float = 0.0
    readout_error: tuple[tuple[float, float], ...] = ()
    t1_us: tuple[float, ...] = ()
    t2_us: tuple[float, ...] = ()
    gate_time_ns: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        errs: list[str] = []
        if not self.name or not isinstance(self.name, str):
            errs.append("name: expected a nonempty string")
        sq = {str(k).lower(): float(v) for k, v in dict(self.single_qubit_error).items()}
        for k, v in sq.items():
            if not 0.0 <= v <= 1.0:
                errs.append(f"single_qubit_error.{k}: probability {v} out of [0, 1]")
        tq = float(self.two_qubit_error)
        if not 0.0 <= tq <= 1.0:
            errs.append(f"two_qubit_error: probability {tq} out of [0, 1]")
        ro = tuple((float(a), float(b)) for a, b in self.readout_error)
        for q, pair in enumerate(ro):
            for j, v in enumerate(pair):
                if not 0.0 <= v <= 1.0:
                    errs.append(f"readout_error[{q}][{j}]: probability {v} out of [0, 1]")
        t1 = tuple(float(v) for v in self.t1_us)
        t2 = tuple(float(v) for v in self.t2_us)
        for q, v in enumerate(t1):
            if v <= 0:
                errs.append(f"t1_us[{q}]: lifetime {v} must be positive")
        for q, v in enumerate(t2):
            if v <= 0:
                errs.append(f"t2_us[{q}]: lifetime {v} must be positive")
        if t1 and t2:
            if len(t1) != len(t2):
                errs.append("t2_us: length differs from t1_us")
            else:
                for q, (a, b) in enumerate(zip(t1, t2)):
                    if a > 0 and b > 2.0 * a + 1e-12:
                        errs.append(f"t2_us[{q}]: T2 {b} exceeds 2*T1 {2.0 * a}")
        gt = {str(k).lower(): float(v) for k, v in dict(self.gate_time_ns).items()}
        for k, v in gt.items():
            if v < 0:
                errs.append(f"gate_time_ns.{k}: duration {v} must be nonnegative")
        if errs:
            raise ProfileError("; ".join(errs))
        object.__setattr__(self, "single_qubit_error", sq)
        object.__setattr__(self, "two_qubit_error", tq)
        object.__setattr__(self, "readout_error", ro)
        object.__setattr__(self, "t1_us", t1)
        object.__setattr__(self, "t2_us", t2)
        object.__setattr__(self, "gate_time_ns", gt)


_PROFILE_FIELDS = (
    "name",
    "single_qubit_error",
    "two_qubit_error",
    "readout_error",
    "t1_us",
    "t2_us",
    "gate_time_ns",
)


def _require(cond: bool, path: str, message: str) -> None:
    if not cond:
        raise ProfileError(f"{path}: {message}")


def load_noise_profile(source: str | Path | Mapping) -> NoiseProfile:
    """Parse and validate a profile document (path or mapping).

    Documents are YAML mappings (plain JSON parses too).  Unknown fields,
    wrong shapes, and out-of-range values raise :class:`ProfileError` with
    the offending field path.
    """
    if isinstance(source, Mapping):
        doc = dict(source)
    else:
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ProfileError(f"cannot read profile {path}: {exc}") from exc
        doc = yaml.safe_load(text)
    _require(isinstance(doc, dict), "profile", f"expected a mapping, got {type(doc).__name__}")
    for key in doc:
        if key not in _PROFILE_FIELDS:
            raise ProfileError(f"unknown field {key!r}")
    _require("name" in doc, "name", "required field is missing")
    _require(isinstance(doc["name"], str) and doc["name"], "name", "expected a nonempty string")

    sq = doc.get("single_qubit_error", {})
    _require(isinstance(sq, dict), "single_qubit_error", "expected a mapping of gate kind to rate")
    for k, v in sq.items():
        _require(
            isinstance(v, (int, float)) and not isinstance(v, bool),
            f"single_qubit_error.{k}",
            f"expected a number, got {v!r}",
        )
    tq = doc.get("two_qubit_error", 0.0)
    _require(
        isinstance(tq, (int, float)) and not isinstance(tq, bool),
        "two_qubit_error",
        f"expected a number, got {tq!r}",
    )
    ro_raw = doc.get("readout_error", [])
    _require(isinstance(ro_raw, list), "readout_error", "expected a list of [p10, p01] pairs")
    ro = []
    for q, pair in enumerate(ro_raw):
        _require(
            isinstance(pair, list) and len(pair) == 2,
            f"readout_error[{q}]",
            f"expected a [p10, p01] pair, got {pair!r}",
        )
        for j, v in enumerate(pair):
            _require(
                isinstance(v, (int, float)) and not isinstance(v, bool),
                f"readout_error[{q}][{j}]",
                f"expected a number, got {v!r}",
            )
        ro.append((float(pair[0]), float(pair[1])))
    lifetimes = {}
    for key in ("t1_us", "t2_us"):
        arr = doc.get(key, [])
        _require(isinstance(arr, list), key, "expected a list of per-qubit lifetimes")
        for q, v in enumerate(arr):
            _require(
                isinstance(v, (int, float)) and not isinstance(v, bool),
                f"{key}[{q}]",
                f"expected a number, got {v!r}",
            )
        lifetimes[key] = tuple(float(v) for v in arr)
    gt = doc.get("gate_time_ns", {})
    _require(isinstance(gt, dict), "gate_time_ns", "expected a mapping of gate kind to ns")
    for k, v in gt.items():
        _require(
            isinstance(v, (int, float)) and not isinstance(v, bool),
            f"gate_time_ns.{k}",
            f"expected a number, got {v!r}",
        )
    return NoiseProfile(
        name=doc["name"],
        single_qubit_error=sq,
        two_qubit_error=float(tq),
        readout_error=tuple(ro),
        t1_us=lifetimes["t1_us"],
        t2_us=lifetimes["t2_us"],
        gate_time_ns=gt,
    )


def bundled_profile_path(name: str = "kyiv_like") -> Path:
    """Filesystem path of a profile shipped with the package."""
    candidate = resources.files("qsg").joinpath(f"profiles/{name}.yaml")
    with resources.as_file(candidate) as p:
        if not p.is_file():
            raise ProfileError(f"no bundled profile named {name!r}")
        return Path(p)


def profile_gate_channels(profile: NoiseProfile, gate):
    """Yield (kraus_operators, targets) the profile attaches to one gate."""
    kind = gate.kind.lower()
    qubits = gate.qubits
    if len(qubits) == 1:
        p = profile.single_qubit_error.get(kind, 0.0)
        if p > 0.0:
            ops = depolarizing(p).operators
            yield ops, qubits
    else:
        if profile.two_qubit_error > 0.0:
            # order matches the gate's own kernel layout; the channel is
            # symmetric under qubit exchange so either order is equivalent
            yield two_qubit_depolarizing(profile.two_qubit_error).operators, qubits
    if profile.t1_us and kind in profile.gate_time_ns:
        dt = profile.gate_time_ns[kind]
        for q in qubits:
            if q >= len(profile.t1_us):
                raise ValueError(
                    f"profile {profile.name!r} calibrates {len(profile.t1_us)} qubits; "
                    f"gate touches qubit {q}"
                )
            t1 = profile.t1_us[q]
            t2 = profile.t2_us[q] if q < len(profile.t2_us) else 2.0 * t1
            gamma, dephase = damping_from_lifetimes(t1, t2, dt)
            if gamma > 0.0:
                yield amplitude_damping(gamma).operators, (q,)
            if dephase > 0.0:
                yield phase_damping(dephase).operators, (q,)


def apply_readout_to_probs(
    probs: np.ndarray, readout: tuple[tuple[float, float], ...], n_qubits: int
) -> np.ndarray:
    """Exact confusion-matrix transform of an outcome distribution."""
    if len(readout) < n_qubits:
        raise ValueError(
            f"readout calibration covers {len(readout)} qubits, register has {n_qubits}"
        )
    t = np.asarray(probs, dtype=np.float64).reshape((2,) * n_qubits)
    for q in range(n_qubits):
        p10, p01 = readout[q]
        # column = true bit, row = observed bit
        c = np.array([[1.0 - p01, p10], [p01, 1.0 - p10]])
        axis = n_qubits - 1 - q
        t = np.moveaxis(np.tensordot(c, t, axes=([1], [axis])), 0, axis)
    return t.reshape(1 << n_qubits)


def readout_flip_bits(
    bits: np.ndarray, readout: tuple[tuple[float, float], ...], rng: np.random.Generator
) -> np.ndarray:
    """Flip sampled bits column-by-column with the per-qubit misread rates.

    ``bits`` has one row per shot and one column per qubit.
    """
    shots, n = bits.shape
    if len(readout) < n:
        raise ValueError(
            f"readout calibration covers {len(readout)} qubits, register has {n}"
        )
    p10 = np.array([readout[q][0] for q in range(n)])
    p01 = np.array([readout[q][1] for q in range(n)])
    flip_prob = np.where(bits == 1, p10[None, :], p01[None, :])
    flips = rng.random((shots, n)) < flip_prob
    return (bits ^ flips.astype(np.uint8)).astype(np.uint8)
