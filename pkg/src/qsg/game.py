"""Round structure, scoring, match execution, and resource bookkeeping.

Each round one of the two basements is defended ("strong"), chosen
uniformly and hidden from the attackers.  A player scores +1 for attacking
the undefended basement and -1 for walking into the defended one; the team
score is the sum over players.  Defense-independent teams never see the
defense draw; only the hear-and-herd benchmark consumes it, through its
noisy intelligence bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import _kernels
from .strategy import ActionProfile, StrategyConfig, actions_from_bits, make_team


@dataclass(frozen=True)
class Defense:
    """The round's defended basement."""

    strong: str

    def __post_init__(self) -> None:
        if self.strong not in ("A", "B"):
            raise ValueError(f"strong must be 'A' or 'B', got {self.strong!r}")

    @property
    def bit(self) -> int:
        return 1 if self.strong == "A" else 0


def assign_defense(rng: np.random.Generator) -> Defense:
    """Uniform draw of the defended basement."""
    return Defense("A" if rng.integers(2) else "B")


def defense_sequence(n_rounds: int, rng: np.random.Generator) -> np.ndarray:
    """Vector of defense bits (1 means A is defended), one per round."""
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
    return rng.integers(0, 2, size=n_rounds, dtype=np.uint8)


@dataclass(frozen=True)
class RoundOutcome:
    """Scored actions of one team for one round."""

    round_index: int
    defense: Defense
    profile: ActionProfile
    player_scores: tuple[int, ...]
    team_score: int


def score_round(profile: ActionProfile, defense: Defense, round_index: int = 0) -> RoundOutcome:
    """Score one profile: +1 off the defended basement, -1 on it."""
    scores = tuple(1 if a != defense.strong else -1 for a in profile.actions)
    return RoundOutcome(
        round_index=round_index,
        defense=defense,
        profile=profile,
        player_scores=scores,
        team_score=sum(scores),
    )


@dataclass(frozen=True, eq=False)
class MatchResult:
    """Full trajectory of one team over a match, stored columnwise."""

    team_label: str
    n_players: int
    defense_bits: np.ndarray
    action_bits: np.ndarray
    team_scores: np.ndarray
    cumulative: np.ndarray

    def __post_init__(self) -> None:
        r = self.defense_bits.shape[0]
        if self.action_bits.shape != (r, self.n_players):
            raise ValueError(
                f"action matrix shape {self.action_bits.shape} does not match "
                f"{r} rounds x {self.n_players} players"
            )
        if self.team_scores.shape != (r,) or self.cumulative.shape != (r,):
            raise ValueError("score vectors must have one entry per round")

    @property
    def n_rounds(self) -> int:
        return int(self.defense_bits.shape[0])

    def round_outcome(self, k: int) -> RoundOutcome:
        defense = Defense("A" if self.defense_bits[k] else "B")
        profile = actions_from_bits(self.action_bits[k])
        return score_round(profile, defense, round_index=k)

    def outcomes(self) -> Iterator[RoundOutcome]:
        for k in range(self.n_rounds):
            yield self.round_outcome(k)


def run_match(
    n_rounds: int,
    config: StrategyConfig,
    rng: np.random.Generator,
    defense_bits: np.ndarray | None = None,
) -> MatchResult:
    """Play ``n_rounds`` with one team.

    The defense sequence is drawn from ``rng`` first unless one is passed
    in (scenario runners share a sequence across teams for fairness).  The
    whole trajectory is deterministic given the generator's seed.
    """
    team = make_team(config)
    if defense_bits is None:
        defense_bits = defense_sequence(n_rounds, rng)
    else:
        defense_bits = np.ascontiguousarray(defense_bits, dtype=np.uint8)
        if defense_bits.shape != (n_rounds,):
            raise ValueError(
                f"defense sequence of shape {defense_bits.shape} does not cover "
                f"{n_rounds} rounds"
            )
    if team.uses_defense:
        actions = team.sample_bits_given_defense(defense_bits, rng)
    else:
        actions = team.sample_bits(n_rounds, rng)
    scores = _kernels.score_rounds(actions, defense_bits)
    return MatchResult(
        team_label=team.label,
        n_players=team.n_players,
        defense_bits=defense_bits,
        action_bits=actions,
        team_scores=scores,
        cumulative=np.cumsum(scores),
    )


# ---------------------------------------------------------------------------
# resource evolution


@dataclass(frozen=True)
class ResourceState:
    """Defender stockpiles and the per-basement defense costs."""

    r_quantum: float
    r_classical: float
    s_a: float
    s_b: float

    def __post_init__(self) -> None:
        if self.s_a < 0 or self.s_b < 0:
            raise ValueError(f"defense costs must be nonnegative, got {self.s_a}, {self.s_b}")


def indicator_probs(profile: ActionProfile) -> np.ndarray:
    """Realized per-player attack probabilities: rows of [P(A), P(B)] that
    are 0/1 indicators of the sampled actions."""
    rows = [(1.0, 0.0) if a == "A" else (0.0, 1.0) for a in profile.actions]
    return np.array(rows, dtype=np.float64)


def update_resources(
    state: ResourceState,
    quantum_probs: np.ndarray,
    classical_probs: np.ndarray,
    floor_at_zero: bool = False,
) -> ResourceState:
    """One round of defender attrition.

    Each side's stockpile drops by the cost of meeting every attacker:
    sum over players of P(attack A) * s_a + P(attack B) * s_b.  Pass exact
    per-player probabilities for the expected dynamic or indicator rows
    (see :func:`indicator_probs`) for the realized one.  Stockpiles may go
    negative unless ``floor_at_zero``.
    """
    drains = []
    for name, probs in (("quantum", quantum_probs), ("classical", classical_probs)):
        p = np.asarray(probs, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != 2:
            raise ValueError(f"{name} probabilities must be (players, 2), got {p.shape}")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError(f"{name} probabilities must lie in [0, 1]")
        sums = p.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-9):
            raise ValueError(
                f"{name} per-player probabilities must sum to 1, got row sums {sums}"
            )
        drains.append(float(p[:, 0].sum() * state.s_a + p[:, 1].sum() * state.s_b))
    r_q = state.r_quantum - drains[0]
    r_c = state.r_classical - drains[1]
    if floor_at_zero:
        r_q = max(r_q, 0.0)
        r_c = max(r_c, 0.0)
    return ResourceState(r_quantum=r_q, r_classical=r_c, s_a=state.s_a, s_b=state.s_b)
