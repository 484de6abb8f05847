"""Match statistics, exact expected utility, and equilibrium probes.

The equilibrium tooling treats a team strategy as one shared rotation
U(theta, phi) applied to every qubit of a fixed entangled base state; the
expected utility is computed exactly from the resulting outcome
distribution, with no sampling anywhere in the loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .channel import KrausChannel
from .circuit import su2_matrix
from .game import MatchResult
from .qstate import PureState, index_of
from .strategy import StrategyConfig, exact_action_distribution


@dataclass(frozen=True)
class Stats:
    """Per-match summary of a team's score trajectory."""

    mean: float
    std: float
    p_positive: float
    accumulated: float
    n_rounds: int


def summarize(result: MatchResult) -> Stats:
    """Mean, spread, winning-round fraction, and final accumulated score."""
    scores = result.team_scores
    return Stats(
        mean=float(scores.mean()),
        std=float(scores.std()),
        p_positive=float((scores > 0).mean()),
        accumulated=float(result.cumulative[-1]),
        n_rounds=result.n_rounds,
    )


def sampling_band(n_rounds: int, per_round_std: float, k_sigma: float = 3.0) -> float:
    """Half-width k * std / sqrt(n) of the sampling band around a mean."""
    if n_rounds < 1:
        raise ValueError(f"n_rounds must be >= 1, got {n_rounds}")
    if per_round_std < 0:
        raise ValueError(f"per_round_std must be nonnegative, got {per_round_std}")
    if k_sigma <= 0:
        raise ValueError(f"k_sigma must be positive, got {k_sigma}")
    return k_sigma * per_round_std / math.sqrt(n_rounds)


def _score_moments_from_table(probs: np.ndarray, n_players: int) -> tuple[float, float]:
    """(mean, second moment) of the team score under uniform defense."""
    idx = np.arange(probs.shape[0])
    weights = np.zeros_like(idx)
    for q in range(n_players):
        weights = weights + ((idx >> q) & 1)
    margin = n_players - 2 * weights  # score when A is defended; negated otherwise
    mean = 0.0  # the two defenses contribute +margin and -margin equally
    second = float((probs * margin.astype(np.float64) ** 2).sum())
    return mean, second


def per_round_score_std(config: StrategyConfig) -> float:
    """Exact standard deviation of one round's team score.

    Defense-independent teams average over the hidden defense analytically;
    the hear-and-herd benchmark uses its closed form 2 n sqrt(q (1 - q)).
    """
    n = config.team_size
    if config.kind == "hah":
        q = config.intel_prob
        return 2.0 * n * math.sqrt(q * (1.0 - q))
    table = exact_action_distribution(config)
    mean, second = _score_moments_from_table(table.probs, n)
    return math.sqrt(max(second - mean**2, 0.0))


def per_round_score_mean(config: StrategyConfig) -> float:
    """Exact expected team score of one round."""
    if config.kind == "hah":
        return config.team_size * (2.0 * config.intel_prob - 1.0)
    return 0.0  # uniform hidden defense cancels any defense-independent play


# ---------------------------------------------------------------------------
# expected utility over strategy rotations


@dataclass(frozen=True, eq=False)
class UtilityMatrix:
    """Utility per joint outcome, indexed by basis index."""

    n_players: int
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.shape != (1 << self.n_players,):
            raise ValueError(
                f"expected {1 << self.n_players} utilities, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("utilities must be finite")
        object.__setattr__(self, "values", v)

    def value(self, bits: str) -> float:
        return float(self.values[index_of(bits)])


def fixed_defense_utility(n_players: int, strong: str = "A") -> UtilityMatrix:
    """Team score per outcome when one basement is always defended."""
    if strong not in ("A", "B"):
        raise ValueError(f"strong must be 'A' or 'B', got {strong!r}")
    idx = np.arange(1 << n_players)
    weights = np.zeros_like(idx)
    for q in range(n_players):
        weights = weights + ((idx >> q) & 1)
    margin = n_players - 2 * weights  # strong = A: every A-attacker loses one
    if strong == "B":
        margin = -margin
    return UtilityMatrix(n_players, margin.astype(np.float64))


def defense_averaged_utility(n_players: int) -> UtilityMatrix:
    """Score averaged over the uniform hidden defense: identically zero."""
    return UtilityMatrix(n_players, np.zeros(1 << n_players))


@dataclass(frozen=True)
class StrategyPoint:
    """One shared rotation: theta in [0, pi], phi in [0, 2*pi)."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2.0 * math.pi:
            raise ValueError(f"phi must lie in [0, 2*pi), got {self.phi}")


def _rotated_probs(theta: float, phi: float, base: PureState, noise) -> np.ndarray:
    n = base.n_qubits
    u = su2_matrix(theta, phi)
    if noise is None:
        amps = base.amplitudes
        for q in range(n):
            amps = _kernels.apply_matrix_state(amps, u, (q,), n)
        return amps.real**2 + amps.imag**2
    rho = np.outer(base.amplitudes, base.amplitudes.conj())
    for q in range(n):
        rho = _kernels.apply_matrix_density(rho, u, (q,), n)
    channels = noise if isinstance(noise, (list, tuple)) else (noise,)
    for ch in channels:
        if not isinstance(ch, KrausChannel):
            raise TypeError(f"expected KrausChannel entries, got {type(ch).__name__}")
        if ch.n_qubits == 1:
            for q in range(n):
                rho = _kernels.apply_kraus_density(rho, ch.operators, (q,), n)
        elif ch.n_qubits == n:
            rho = _kernels.apply_kraus_density(rho, ch.operators, tuple(range(n)), n)
        else:
            raise ValueError(
                f"channel on {ch.n_qubits} qubit(s) does not fit a {n}-qubit register"
            )
    return np.maximum(rho.diagonal().real, 0.0)


def expected_utility(
    point: StrategyPoint,
    base: PureState,
    utility: UtilityMatrix,
    noise=None,
) -> float:
    """Exact expected utility of playing one rotation on every qubit.

    The rotation is applied to each qubit of the base state, the optional
    channel is applied afterwards (per qubit for one-qubit channels, jointly
    when the dimension matches), and the utility is averaged under the exact
    outcome distribution.
    """
    if base.n_qubits != utility.n_players:
        raise ValueError(
            f"base state has {base.n_qubits} qubits, utility expects {utility.n_players}"
        )
    probs = _rotated_probs(point.theta, point.phi, base, noise)
    return float(probs @ utility.values)


def _eval_raw(theta: float, phi: float, base: PureState, utility: UtilityMatrix, noise) -> float:
    # su2_matrix wraps angles, so probing slightly outside the canonical
    # ranges during finite differences and refinement is well defined
    probs = _rotated_probs(theta, phi, base, noise)
    return float(probs @ utility.values)


class StationarityResult(NamedTuple):
    gradient: np.ndarray
    is_stationary: bool


def stationarity_check(
    point: StrategyPoint,
    base: PureState,
    utility: UtilityMatrix,
    noise=None,
    step: float = 1e-5,
    tol: float = 1e-6,
) -> StationarityResult:
    """Richardson-extrapolated central-difference gradient at a point.

    The gradient combines central differences at ``step`` and ``step / 2``
    via (4 g_half - g_full) / 3, cancelling the leading error term; the
    point is stationary when the max norm falls below ``tol``.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    grad = np.empty(2)
    for axis in range(2):

        def g(h: float, axis: int = axis) -> float:
            dth = h if axis == 0 else 0.0
            dph = h if axis == 1 else 0.0
            up = _eval_raw(point.theta + dth, point.phi + dph, base, utility, noise)
            dn = _eval_raw(point.theta - dth, point.phi - dph, base, utility, noise)
            return (up - dn) / (2.0 * h)

        g_full = g(step)
        g_half = g(step / 2.0)
        grad[axis] = (4.0 * g_half - g_full) / 3.0
    return StationarityResult(gradient=grad, is_stationary=bool(np.max(np.abs(grad)) < tol))


class BestResponse(NamedTuple):
    point: StrategyPoint
    value: float


def best_response_search(
    base: PureState,
    utility: UtilityMatrix,
    noise=None,
    grid_density: int = 32,
) -> BestResponse:
    """Maximize expected utility over the rotation parameters.

    A full grid scan over [0, pi] x [0, 2*pi) seeds a shrinking local
    pattern search.  Ties prefer the smallest theta, then the smallest phi;
    the refined value never drops below the best grid value.
    """
    if grid_density < 8:
        raise ValueError(f"grid_density must be >= 8, got {grid_density}")

    def f(theta: float, phi: float) -> float:
        return _eval_raw(theta, phi, base, utility, noise)

    thetas = np.linspace(0.0, math.pi, grid_density)
    phis = np.linspace(0.0, 2.0 * math.pi, grid_density, endpoint=False)
    best_t, best_p = 0.0, 0.0
    best_v = -math.inf
    for t in thetas:
        for p in phis:
            v = f(float(t), float(p))
            if v > best_v:
                best_v, best_t, best_p = v, float(t), float(p)

    span_t = math.pi / (grid_density - 1)
    span_p = 2.0 * math.pi / grid_density
    while max(span_t, span_p) > 1e-12:
        improved = False
        for dt, dp in ((span_t, 0.0), (-span_t, 0.0), (0.0, span_p), (0.0, -span_p)):
            t = min(max(best_t + dt, 0.0), math.pi)
            p = (best_p + dp) % (2.0 * math.pi)
            v = f(t, p)
            if v > best_v:
                best_v, best_t, best_p = v, t, p
                improved = True
        if not improved:
            span_t *= 0.5
            span_p *= 0.5
    return BestResponse(point=StrategyPoint(theta=best_t, phi=best_p), value=best_v)
