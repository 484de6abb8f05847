"""Team strategies: action mapping, correlation structure, defense privacy."""

import numpy as np
import pytest

from qsg import channel, qstate, strategy

from oracles import embed_matrix


class TestActionMapping:
    def test_bitstring_decoding(self):
        assert strategy.bitstring_to_actions("000").actions == ("B", "B", "B")
        assert strategy.bitstring_to_actions("001").actions == ("A", "B", "B")
        assert strategy.bitstring_to_actions("11").actions == ("A", "A")
        assert strategy.bitstring_to_actions("100").actions == ("B", "B", "A")

    def test_rejects_invalid_strings(self):
        with pytest.raises(ValueError):
            strategy.bitstring_to_actions("0a1")
        with pytest.raises(ValueError):
            strategy.bitstring_to_actions("")

    def test_profile_validation(self):
        with pytest.raises(ValueError, match="'A' or 'B'"):
            strategy.ActionProfile(("A", "C"))
        with pytest.raises(ValueError, match="at least one"):
            strategy.ActionProfile(())

    def test_bits_round_trip(self):
        p = strategy.ActionProfile(("A", "B", "A"))
        np.testing.assert_array_equal(p.bits(), [1, 0, 1])
        assert p.text() == "ABA"


class TestConfigValidation:
    def test_bell_requires_two_players(self):
        with pytest.raises(ValueError, match="2 players"):
            strategy.StrategyConfig(kind="bell", team_size=3)

    def test_team_size_range(self):
        with pytest.raises(ValueError, match="team_size"):
            strategy.StrategyConfig(kind="classical", team_size=1)
        with pytest.raises(ValueError, match="team_size"):
            strategy.StrategyConfig(kind="wstate", team_size=6)

    def test_intel_prob_only_for_hah(self):
        with pytest.raises(ValueError, match="intel_prob"):
            strategy.StrategyConfig(kind="classical", team_size=2, intel_prob=0.7)
        with pytest.raises(ValueError, match="intel_prob"):
            strategy.StrategyConfig(kind="hah", team_size=2)

    def test_noise_only_for_circuit_kinds(self):
        with pytest.raises(ValueError, match="noise"):
            strategy.StrategyConfig(
                kind="classical", team_size=2, noise=channel.bit_flip(0.1)
            )

    def test_default_labels(self):
        assert strategy.default_label(strategy.StrategyConfig("classical", 3)) == "3C"
        assert strategy.default_label(strategy.StrategyConfig("bell", 2)) == "2Q"
        assert strategy.default_label(strategy.StrategyConfig("wstate", 3)) == "3Q"


class TestClassicalTeam:
    def test_marginals_are_fair(self):
        team = strategy.make_team(strategy.StrategyConfig("classical", 3))
        bits = team.sample_bits(100_000, np.random.default_rng(61))
        freq = bits.mean(axis=0)
        sigma = np.sqrt(0.25 / 100_000)
        assert np.all(np.abs(freq - 0.5) < 4 * sigma)

    def test_players_are_independent(self):
        team = strategy.make_team(strategy.StrategyConfig("classical", 2))
        bits = team.sample_bits(100_000, np.random.default_rng(62)).astype(float)
        corr = np.corrcoef(bits[:, 0], bits[:, 1])[0, 1]
        assert abs(corr) < 0.02

    def test_single_round_action(self):
        profile = strategy.classical_action(1, np.random.default_rng(63))
        assert profile.n_players == 1
        assert profile.actions[0] in ("A", "B")


class TestQuantumTeams:
    def test_bell_pairs_always_match(self):
        team = strategy.make_team(strategy.StrategyConfig("bell", 2))
        bits = team.sample_bits(10_000, np.random.default_rng(64))
        assert np.all(bits[:, 0] == bits[:, 1])

    def test_w3_exactly_one_attacker_on_a(self):
        team = strategy.make_team(strategy.StrategyConfig("wstate", 3))
        bits = team.sample_bits(10_000, np.random.default_rng(65))
        np.testing.assert_array_equal(bits.sum(axis=1), np.ones(10_000))

    def test_exact_distribution_bell(self):
        table = strategy.exact_action_distribution(strategy.StrategyConfig("bell", 2))
        np.testing.assert_allclose(table.probs, [0.5, 0, 0, 0.5], atol=1e-12)

    def test_exact_distribution_classical_uniform(self):
        table = strategy.exact_action_distribution(strategy.StrategyConfig("classical", 2))
        np.testing.assert_allclose(table.probs, np.full(4, 0.25), atol=1e-15)

    def test_hah_has_no_defense_free_distribution(self):
        with pytest.raises(ValueError, match="defense"):
            strategy.exact_action_distribution(
                strategy.StrategyConfig("hah", 2, intel_prob=0.7)
            )

    def test_single_round_literal_action_bell(self):
        cfg = strategy.StrategyConfig("bell", 2, shots=64)
        rng = np.random.default_rng(66)
        for _ in range(50):
            profile = strategy.quantum_action(cfg, rng)
            assert profile.actions[0] == profile.actions[1]

    def test_quantum_action_rejects_other_kinds(self):
        with pytest.raises(ValueError, match="circuit-backed"):
            strategy.quantum_action(
                strategy.StrategyConfig("classical", 2), np.random.default_rng(1)
            )

    def test_bitflip_half_breaks_bell_correlation(self):
        # independent oracle: evolve the Bell circuit with X-mixing after
        # every gate by hand, then read P(players differ) from the diagonal
        p = 0.5
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        ops = [np.sqrt(1 - p) * np.eye(2), np.sqrt(p) * x]
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        cx = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = 1.0
        for u, targets, touched in ((h, (0,), (0,)), (cx, (1, 0), (0, 1))):
            full = embed_matrix(u, targets, 2)
            rho = full @ rho @ full.conj().T
            for q in touched:
                acc = np.zeros_like(rho)
                for e in ops:
                    fe = embed_matrix(e, (q,), 2)
                    acc += fe @ rho @ fe.conj().T
                rho = acc
        p_differ_exact = rho[1, 1].real + rho[2, 2].real

        cfg = strategy.StrategyConfig("bell", 2, noise=channel.bit_flip(p))
        table = strategy.exact_action_distribution(cfg)
        got_differ = table.probability("01") + table.probability("10")
        assert got_differ == pytest.approx(p_differ_exact, abs=1e-12)

        team = strategy.make_team(cfg)
        bits = team.sample_bits(10_000, np.random.default_rng(67))
        differ = float((bits[:, 0] != bits[:, 1]).mean())
        assert differ > 0.3
        sigma = np.sqrt(p_differ_exact * (1 - p_differ_exact) / 10_000)
        assert abs(differ - p_differ_exact) < 4 * sigma

    def test_memory_mode_matches_direct_sampling(self):
        rounds = 4000
        direct = strategy.make_team(strategy.StrategyConfig("wstate", 3))
        literal = strategy.make_team(
            strategy.StrategyConfig("wstate", 3, shots=32, memory_mode=True)
        )
        a = direct.sample_bits(rounds, np.random.default_rng(68))
        b = literal.sample_bits(rounds, np.random.default_rng(69))
        pa = np.bincount(a @ (1 << np.arange(3)), minlength=8) / rounds
        pb = np.bincount(b @ (1 << np.arange(3)), minlength=8) / rounds
        tv = 0.5 * np.abs(pa - pb).sum()
        assert tv < 0.05


class TestDefenseIndependence:
    def test_samplers_take_no_defense_argument(self):
        for cfg in (
            strategy.StrategyConfig("classical", 2),
            strategy.StrategyConfig("bell", 2),
            strategy.StrategyConfig("wstate", 3),
        ):
            team = strategy.make_team(cfg)
            assert not team.uses_defense

    def test_action_distribution_same_under_either_defense(self):
        # the sampler never sees the defense; two draws with one seed are
        # bit-identical, so compare two independent draws distributionally
        team = strategy.make_team(strategy.StrategyConfig("bell", 2))
        a = team.sample_bits(100_000, np.random.default_rng(70))
        b = team.sample_bits(100_000, np.random.default_rng(71))
        pa = np.bincount(a @ (1 << np.arange(2)), minlength=4) / 100_000
        pb = np.bincount(b @ (1 << np.arange(2)), minlength=4) / 100_000
        assert 0.5 * np.abs(pa - pb).sum() < 0.02


class TestHahTeam:
    def test_perfect_intel_always_hits(self):
        team = strategy.make_team(strategy.StrategyConfig("hah", 3, intel_prob=1.0))
        defense = np.array([0, 1, 0, 1, 1], dtype=np.uint8)
        bits = team.sample_bits_given_defense(defense, np.random.default_rng(72))
        # every player targets the opposite basement from the defense
        for k in range(5):
            assert np.all(bits[k] == 1 - defense[k])

    def test_zero_intel_always_walks_in(self):
        team = strategy.make_team(strategy.StrategyConfig("hah", 2, intel_prob=0.0))
        defense = np.array([0, 1, 1, 0], dtype=np.uint8)
        bits = team.sample_bits_given_defense(defense, np.random.default_rng(73))
        for k in range(4):
            assert np.all(bits[k] == defense[k])

    def test_all_players_herd(self):
        team = strategy.make_team(strategy.StrategyConfig("hah", 3, intel_prob=0.8267))
        defense = np.random.default_rng(74).integers(0, 2, 1000).astype(np.uint8)
        bits = team.sample_bits_given_defense(defense, np.random.default_rng(75))
        assert np.all((bits.sum(axis=1) == 0) | (bits.sum(axis=1) == 3))

    def test_single_round_op(self):
        rng = np.random.default_rng(76)
        profile = strategy.hah_action(3, 1.0, "A", rng)
        assert profile.actions == ("B", "B", "B")
        profile = strategy.hah_action(2, 0.0, "B", rng)
        assert profile.actions == ("B", "B")
