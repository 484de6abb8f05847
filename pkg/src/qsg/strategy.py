"""Team strategies: coordinated randomizers mapping to per-player actions.

Every player attacks basement A or basement B each round.  Measurement
outcomes map to actions bit-by-bit: qubit ``i`` is player ``i`` and a ``1``
reads as attacking A.  Classical teams flip independent fair coins; the
entangled teams measure a shared Bell or W register; the
hear-and-herd benchmark coordinates all players on one target using a
noisy intelligence bit about the round's defense.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .channel import KrausChannel, NoiseProfile
from .circuit import Circuit, bell_circuit, execute, final_distribution, w_state_circuit
from .qstate import ProbabilityTable

KINDS = ("classical", "bell", "wstate", "hah")

# intelligence-success defaults calibrated so the benchmark's expected
# score per round lands on the reference values 0.86 (n=2) and 1.96 (n=3)
HAH_INTEL_2P = 0.715
HAH_INTEL_3P = 0.8267

MIN_TEAM = 2
MAX_TEAM = 5

_ACTION_BY_BIT = ("B", "A")


@dataclass(frozen=True)
class ActionProfile:
    """One action per player, player 0 first."""

    actions: tuple[str, ...]

    def __post_init__(self) -> None:
        actions = tuple(self.actions)
        if not actions:
            raise ValueError("an action profile needs at least one player")
        for a in actions:
            if a not in ("A", "B"):
                raise ValueError(f"actions must be 'A' or 'B', got {a!r}")
        object.__setattr__(self, "actions", actions)

    @property
    def n_players(self) -> int:
        return len(self.actions)

    def bits(self) -> np.ndarray:
        return np.array([1 if a == "A" else 0 for a in self.actions], dtype=np.uint8)

    def text(self) -> str:
        return "".join(self.actions)


def bitstring_to_actions(bits: str) -> ActionProfile:
    """Decode a measurement label: player i reads character n-1-i."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"invalid bitstring {bits!r}")
    n = len(bits)
    return ActionProfile(tuple(_ACTION_BY_BIT[int(bits[n - 1 - i])] for i in range(n)))


def actions_from_bits(row: np.ndarray) -> ActionProfile:
    return ActionProfile(tuple(_ACTION_BY_BIT[int(b)] for b in row))


@dataclass(frozen=True)
class StrategyConfig:
    """Declarative description of one team.

    ``noise`` is optional and only meaningful for the circuit-backed kinds:
    a KrausChannel (or list of them) inserted after every gate, or a
    NoiseProfile.  ``memory_mode`` switches the engine to the literal
    shot-memory path: every round executes ``shots`` shots and draws the
    action profile uniformly from the recorded memory.  The default path
    samples the identical distribution directly.
    """

    kind: str
    team_size: int
    shots: int = 1024
    intel_prob: float | None = None
    noise: object | None = None
    label: str | None = None
    memory_mode: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not MIN_TEAM <= self.team_size <= MAX_TEAM:
            raise ValueError(
                f"team_size must be in [{MIN_TEAM}, {MAX_TEAM}], got {self.team_size}"
            )
        if self.kind == "bell" and self.team_size != 2:
            raise ValueError("bell teams have exactly 2 players")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.kind == "hah":
            if self.intel_prob is None:
                raise ValueError("hah teams require intel_prob")
            if not 0.0 <= self.intel_prob <= 1.0:
                raise ValueError(f"intel_prob must lie in [0, 1], got {self.intel_prob}")
        elif self.intel_prob is not None:
            raise ValueError(f"intel_prob only applies to hah teams, not {self.kind!r}")
        if self.noise is not None and self.kind in ("classical", "hah"):
            raise ValueError(f"{self.kind!r} teams take no noise model")

    def with_label(self, label: str) -> "StrategyConfig":
        return replace(self, label=label)


def default_label(config: StrategyConfig) -> str:
    if config.label:
        return config.label
    if config.kind == "classical":
        return f"{config.team_size}C"
    return f"{config.team_size}Q"


def team_circuit(config: StrategyConfig) -> Circuit | None:
    """Preparation circuit for the circuit-backed kinds, else None."""
    if config.kind == "bell":
        return bell_circuit()
    if config.kind == "wstate":
        return w_state_circuit(config.team_size)
    return None


def exact_action_distribution(config: StrategyConfig) -> ProbabilityTable:
    """Joint action distribution over basis labels, exact to solver precision.

    Defense-independent kinds only; the hear-and-herd benchmark conditions
    on the round's defense and has no single such table.
    """
    n = config.team_size
    if config.kind == "classical":
        return ProbabilityTable(n, np.full(1 << n, 1.0 / (1 << n)))
    if config.kind == "hah":
        raise ValueError("hah actions depend on the round's defense")
    return final_distribution(team_circuit(config), config.noise)


# ---------------------------------------------------------------------------
# engine-facing teams


class ClassicalTeam:
    """Independent fair coin per player per round."""

    uses_defense = False

    def __init__(self, config: StrategyConfig):
        self.config = config
        self.label = default_label(config)
        self.n_players = config.team_size

    def sample_bits(self, n_rounds: int, rng: np.random.Generator) -> np.ndarray:
        return rng.integers(0, 2, size=(n_rounds, self.n_players), dtype=np.uint8)


class QuantumTeam:
    """Shared-register team: each round is one measurement of the state."""

    uses_defense = False

    def __init__(self, config: StrategyConfig):
        self.config = config
        self.label = default_label(config)
        self.n_players = config.team_size
        self.circuit = team_circuit(config)
        table = final_distribution(self.circuit, config.noise)
        self._cdf = _kernels.cdf_from_probs(table.probs)

    def sample_bits(self, n_rounds: int, rng: np.random.Generator) -> np.ndarray:
        if self.config.memory_mode:
            rows = [
                quantum_action(self.config, rng).bits() for _ in range(n_rounds)
            ]
            return np.stack(rows).astype(np.uint8)
        return _kernels.sample_action_bits(self._cdf, rng.random(n_rounds), self.n_players)


class HahTeam:
    """All players herd onto one target chosen from noisy defense intel."""

    uses_defense = True

    def __init__(self, config: StrategyConfig):
        self.config = config
        self.label = default_label(config)
        self.n_players = config.team_size

    def sample_bits_given_defense(
        self, defense_bits: np.ndarray, rng: np.random.Generator
    ) -> np.ndarray:
        informed = rng.random(defense_bits.shape[0]) < self.config.intel_prob
        target = np.where(informed, 1 - defense_bits, defense_bits).astype(np.uint8)
        return np.repeat(target[:, None], self.n_players, axis=1)


def make_team(config: StrategyConfig):
    if config.kind == "classical":
        return ClassicalTeam(config)
    if config.kind == "hah":
        return HahTeam(config)
    return QuantumTeam(config)


# ---------------------------------------------------------------------------
# single-round action draws


def classical_action(n_players: int, rng: np.random.Generator) -> ActionProfile:
    """One round of independent fair coins."""
    if n_players < 1:
        raise ValueError(f"n_players must be >= 1, got {n_players}")
    bits = rng.integers(0, 2, size=n_players)
    return ActionProfile(tuple(_ACTION_BY_BIT[int(b)] for b in bits))


def quantum_action(config: StrategyConfig, rng: np.random.Generator) -> ActionProfile:
    """One round through the literal shot-memory path.

    Executes the team circuit for ``config.shots`` shots and draws the
    round's profile uniformly from the memory.  Statistically identical to
    sampling the exact distribution once.
    """
    if config.kind not in ("bell", "wstate"):
        raise ValueError(f"quantum_action needs a circuit-backed team, got {config.kind!r}")
    record = execute(team_circuit(config), config.noise, config.shots, rng=rng)
    pick = int(rng.integers(config.shots))
    return bitstring_to_actions(record.memory[pick])


def hah_action(
    n_players: int, intel_prob: float, defense_strong: str, rng: np.random.Generator
) -> ActionProfile:
    """One herd round: with probability intel_prob the tip names the
    undefended basement, otherwise it names the defended one."""
    if defense_strong not in ("A", "B"):
        raise ValueError(f"defense must be 'A' or 'B', got {defense_strong!r}")
    if not 0.0 <= intel_prob <= 1.0:
        raise ValueError(f"intel_prob must lie in [0, 1], got {intel_prob}")
    undefended = "B" if defense_strong == "A" else "A"
    target = undefended if rng.random() < intel_prob else defense_strong
    return ActionProfile((target,) * n_players)
