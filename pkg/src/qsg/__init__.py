"""Sabotage-game simulator: entangled and classical teams under noise."""

from ._kernels import BACKEND
from .analysis import (
    BestResponse,
    Stats,
    StationarityResult,
    StrategyPoint,
    UtilityMatrix,
    best_response_search,
    defense_averaged_utility,
    expected_utility,
    fixed_defense_utility,
    per_round_score_mean,
    per_round_score_std,
    sampling_band,
    stationarity_check,
    summarize,
)
from .channel import (
    CptpCheck,
    KrausChannel,
    NoiseProfile,
    ProfileError,
    SabotageOp,
    amplitude_damping,
    apply_channel,
    bit_flip,
    bundled_profile_path,
    damping_from_lifetimes,
    depolarizing,
    identity_channel,
    load_noise_profile,
    phase_damping,
    sabotage_apply,
    two_qubit_depolarizing,
    verify_cptp,
)
from .circuit import (
    Circuit,
    Gate,
    ShotRecord,
    bell_circuit,
    execute,
    final_distribution,
    simulate,
    simulate_density,
    su2_matrix,
    w_state_angles,
    w_state_circuit,
)
from .cli import ConfigError, RunConfig, run_scenario, validate_config
from .game import (
    Defense,
    MatchResult,
    ResourceState,
    RoundOutcome,
    assign_defense,
    defense_sequence,
    indicator_probs,
    run_match,
    score_round,
    update_resources,
)
from .qstate import (
    MAX_QUBITS,
    MixedState,
    ProbabilityTable,
    PureState,
    apply_unitary,
    basis_state,
    bitstring,
    derive_rng,
    fidelity,
    index_of,
    measurement_probabilities,
    sample_bitstring,
    sample_bitstrings,
    tensor_product,
    zero_state,
)
from .strategy import (
    ActionProfile,
    StrategyConfig,
    bitstring_to_actions,
    classical_action,
    exact_action_distribution,
    hah_action,
    make_team,
    quantum_action,
)

__version__ = "0.1.0"
