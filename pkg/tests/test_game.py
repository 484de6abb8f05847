"""Round scoring, match execution, and resource bookkeeping."""

import numpy as np
import pytest

from qsg import analysis, game, qstate, strategy


class TestScoreRound:
    def test_mixed_profile_against_a(self):
        out = game.score_round(strategy.ActionProfile(("A", "A", "B")), game.Defense("A"))
        assert out.player_scores == (-1, -1, 1)
        assert out.team_score == -1

    def test_all_off_defense(self):
        out = game.score_round(strategy.ActionProfile(("B", "B")), game.Defense("A"))
        assert out.player_scores == (1, 1)
        assert out.team_score == 2

    def test_split_pair_is_zero_either_way(self):
        profile = strategy.ActionProfile(("A", "B"))
        assert game.score_round(profile, game.Defense("A")).team_score == 0
        assert game.score_round(profile, game.Defense("B")).team_score == 0

    def test_enumeration_oracle_three_players(self):
        for idx in range(8):
            profile = strategy.bitstring_to_actions(format(idx, "03b"))
            for strong in ("A", "B"):
                expected = sum(
                    1 if a != strong else -1 for a in profile.actions
                )
                out = game.score_round(profile, game.Defense(strong))
                assert out.team_score == expected
                assert sum(out.player_scores) == expected

    def test_defense_validation(self):
        with pytest.raises(ValueError, match="'A' or 'B'"):
            game.Defense("C")


class TestDefenseAssignment:
    def test_uniform_within_four_sigma(self):
        rng = np.random.default_rng(81)
        draws = [game.assign_defense(rng).strong for _ in range(10_000)]
        freq = draws.count("A") / len(draws)
        assert abs(freq - 0.5) < 4 * np.sqrt(0.25 / 10_000)

    def test_sequence_deterministic(self):
        a = game.defense_sequence(100, qstate.derive_rng(20251021, "defense"))
        b = game.defense_sequence(100, qstate.derive_rng(20251021, "defense"))
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        a = game.defense_sequence(100, qstate.derive_rng(1, "defense"))
        b = game.defense_sequence(100, qstate.derive_rng(2, "defense"))
        assert not np.array_equal(a, b)


class TestRunMatch:
    def test_classical_pair_short_match_near_zero(self):
        cfg = strategy.StrategyConfig("classical", 2)
        res = game.run_match(100, cfg, qstate.derive_rng(20251021, "team:2C"))
        st = analysis.summarize(res)
        band = analysis.sampling_band(100, np.sqrt(2.0), 3.0)
        assert abs(st.mean) <= band
        assert st.accumulated == pytest.approx(st.mean * 100, abs=1e-9)

    def test_w3_scores_are_unit_steps(self):
        cfg = strategy.StrategyConfig("wstate", 3)
        res = game.run_match(2000, cfg, np.random.default_rng(82))
        assert set(np.unique(res.team_scores)) <= {-1, 1}

    def test_bell_scores_are_double_steps(self):
        cfg = strategy.StrategyConfig("bell", 2)
        res = game.run_match(2000, cfg, np.random.default_rng(83))
        assert set(np.unique(res.team_scores)) <= {-2, 2}

    def test_cumulative_is_prefix_sum(self):
        cfg = strategy.StrategyConfig("classical", 3)
        res = game.run_match(500, cfg, np.random.default_rng(84))
        np.testing.assert_array_equal(res.cumulative, np.cumsum(res.team_scores))

    def test_outcome_rows_match_arrays(self):
        cfg = strategy.StrategyConfig("wstate", 3)
        res = game.run_match(50, cfg, np.random.default_rng(85))
        for k, outcome in enumerate(res.outcomes()):
            assert outcome.round_index == k
            assert outcome.team_score == res.team_scores[k]
            assert outcome.defense.bit == res.defense_bits[k]
            np.testing.assert_array_equal(outcome.profile.bits(), res.action_bits[k])

    def test_deterministic_given_seed(self):
        cfg = strategy.StrategyConfig("bell", 2)
        a = game.run_match(200, cfg, np.random.default_rng(86))
        b = game.run_match(200, cfg, np.random.default_rng(86))
        np.testing.assert_array_equal(a.team_scores, b.team_scores)
        np.testing.assert_array_equal(a.action_bits, b.action_bits)

    def test_shared_defense_sequence_is_respected(self):
        defense = np.array([1, 0, 1, 1, 0], dtype=np.uint8)
        cfg = strategy.StrategyConfig("classical", 2)
        res = game.run_match(5, cfg, np.random.default_rng(87), defense_bits=defense)
        np.testing.assert_array_equal(res.defense_bits, defense)

    def test_defense_length_validated(self):
        cfg = strategy.StrategyConfig("classical", 2)
        with pytest.raises(ValueError, match="cover"):
            game.run_match(5, cfg, np.random.default_rng(1), defense_bits=np.zeros(3, np.uint8))

    def test_hah_benchmark_mean(self):
        cfg = strategy.StrategyConfig("hah", 3, intel_prob=0.8267)
        res = game.run_match(100_000, cfg, qstate.derive_rng(20251021, "team:3Q"))
        assert analysis.summarize(res).mean == pytest.approx(1.9602, abs=0.03)

    def test_every_team_mean_within_four_sigma_of_zero(self):
        rounds = 100_000
        for label, cfg in (
            ("2C", strategy.StrategyConfig("classical", 2)),
            ("3C", strategy.StrategyConfig("classical", 3)),
            ("2Q", strategy.StrategyConfig("bell", 2)),
            ("3Q", strategy.StrategyConfig("wstate", 3)),
        ):
            rng = qstate.derive_rng(20251021, f"measurement:{label}")
            res = game.run_match(rounds, cfg, rng)
            st = analysis.summarize(res)
            band = analysis.sampling_band(rounds, analysis.per_round_score_std(cfg), 4.0)
            assert abs(st.mean) <= band, f"{label} drifted: {st.mean} vs {band}"


class TestResources:
    def test_zero_cost_is_inert(self):
        state = game.ResourceState(10.0, 10.0, 0.0, 0.0)
        probs = np.full((2, 2), 0.5)
        out = game.update_resources(state, probs, probs)
        assert out.r_quantum == 10.0
        assert out.r_classical == 10.0

    def test_balanced_pair_drains_unit_costs(self):
        state = game.ResourceState(10.0, 8.0, 1.0, 1.0)
        probs = np.full((2, 2), 0.5)
        out = game.update_resources(state, probs, probs)
        # each player contributes 0.5 * s_a + 0.5 * s_b = 1
        assert out.r_quantum == pytest.approx(8.0)
        assert out.r_classical == pytest.approx(6.0)

    def test_certain_attack_on_a_costs_s_a(self):
        state = game.ResourceState(5.0, 5.0, 1.0, 0.0)
        q = np.array([[1.0, 0.0]])
        c = np.array([[0.0, 1.0]])
        out = game.update_resources(state, q, c)
        assert out.r_quantum == pytest.approx(4.0)
        assert out.r_classical == pytest.approx(5.0)

    def test_realized_mode_uses_indicators(self):
        profile = strategy.ActionProfile(("A", "B", "A"))
        ind = game.indicator_probs(profile)
        np.testing.assert_array_equal(ind, [[1, 0], [0, 1], [1, 0]])
        state = game.ResourceState(10.0, 10.0, 2.0, 1.0)
        out = game.update_resources(state, ind, ind)
        assert out.r_quantum == pytest.approx(10.0 - (2 + 1 + 2))

    def test_resources_never_increase(self):
        rng = np.random.default_rng(91)
        state = game.ResourceState(3.0, 3.0, float(rng.uniform(0, 2)), float(rng.uniform(0, 2)))
        for _ in range(30):
            pa = rng.uniform(0, 1, size=3)
            probs = np.stack([pa, 1 - pa], axis=1)
            new = game.update_resources(state, probs, probs)
            assert new.r_quantum <= state.r_quantum + 1e-12
            assert new.r_classical <= state.r_classical + 1e-12
            state = new

    def test_floor_clamps_at_zero(self):
        state = game.ResourceState(0.5, 0.5, 1.0, 1.0)
        probs = np.full((2, 2), 0.5)
        out = game.update_resources(state, probs, probs, floor_at_zero=True)
        assert out.r_quantum == 0.0
        assert out.r_classical == 0.0
        out = game.update_resources(state, probs, probs)
        assert out.r_quantum == pytest.approx(-1.5)

    def test_probability_rows_validated(self):
        state = game.ResourceState(1.0, 1.0, 1.0, 1.0)
        bad = np.array([[0.7, 0.7]])
        good = np.array([[0.5, 0.5]])
        with pytest.raises(ValueError, match="sum to 1"):
            game.update_resources(state, bad, good)
        with pytest.raises(ValueError, match=r"\(players, 2\)"):
            game.update_resources(state, np.array([0.5, 0.5]), good)

    def test_negative_costs_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            game.ResourceState(1.0, 1.0, -0.5, 1.0)
