"""Command-line front end: configure a scenario, run it, write results.

``qsg run`` plays one scenario with four default teams (2- and 3-player
classical, Bell pair, three-player W) against a shared per-round defense
sequence, then writes a round-by-round CSV and a text summary next to it.
Scenarios: ``ideal`` (noiseless circuits), ``snm`` (a standard channel after
every gate), ``hardware`` (a calibrated noise profile), and ``hah`` (the
hear-and-herd coordination benchmark, no circuits).
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import click
import yaml

from . import analysis, game
from .channel import (
    ProfileError,
    amplitude_damping,
    bit_flip,
    bundled_profile_path,
    depolarizing,
    load_noise_profile,
)
from .qstate import derive_rng
from .strategy import (
    HAH_INTEL_2P,
    HAH_INTEL_3P,
    StrategyConfig,
    default_label,
)

DEFAULT_MASTER_SEED = 20251021
DEFAULT_ROUNDS = 100
DEFAULT_SHOTS = 1024
DEFAULT_ERROR_RATE = 0.05

SCENARIOS = ("hah", "ideal", "snm", "hardware")
NOISE_KINDS = {
    "depolarizing": depolarizing,
    "amplitude": amplitude_damping,
    "bitflip": bit_flip,
}

CSV_HEADER = ("round", "team", "defense", "actions", "team_score", "cumulative")


class ConfigError(ValueError):
    """Raised when a run configuration is invalid."""


@dataclass(frozen=True)
class RunConfig:
    """Fully validated description of one scenario run."""

    scenario: str
    rounds: int
    shots: int
    master_seed: int
    noise_kind: str
    error_rate: float
    profile_path: str | None
    teams: tuple[StrategyConfig, ...]
    output_path: str


_CONFIG_FIELDS = (
    "scenario",
    "rounds",
    "shots",
    "master_seed",
    "noise_kind",
    "error_rate",
    "profile_path",
    "teams",
    "output_path",
)
_TEAM_FIELDS = ("kind", "team_size", "shots", "intel_prob", "label", "memory_mode")


def _expect_int(doc: Mapping, key: str, default: int, minimum: int) -> int:
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    if v < minimum:
        raise ConfigError(f"{key}: must be >= {minimum}, got {v}")
    return v


def _scenario_noise(scenario: str, noise_kind: str, error_rate: float, profile_path):
    """Noise object attached to circuit-backed teams, per scenario."""
    if scenario == "snm":
        return [NOISE_KINDS[noise_kind](error_rate)]
    if scenario == "hardware":
        return load_noise_profile(profile_path)
    return None


def _default_team_specs(scenario: str) -> list[dict]:
    if scenario == "hah":
        return [
            {"kind": "classical", "team_size": 2, "label": "2C"},
            {"kind": "classical", "team_size": 3, "label": "3C"},
            {"kind": "hah", "team_size": 2, "intel_prob": HAH_INTEL_2P, "label": "2Q"},
            {"kind": "hah", "team_size": 3, "intel_prob": HAH_INTEL_3P, "label": "3Q"},
        ]
    return [
        {"kind": "classical", "team_size": 2, "label": "2C"},
        {"kind": "classical", "team_size": 3, "label": "3C"},
        {"kind": "bell", "team_size": 2, "label": "2Q"},
        {"kind": "wstate", "team_size": 3, "label": "3Q"},
    ]


def validate_config(document: Mapping | None) -> RunConfig:
    """Validate a config mapping and fill defaults.

    An empty document is valid: 100 ideal rounds with the four default
    teams, 1024 shots, master seed 20251021.
    """
    doc = dict(document or {})
    for key in doc:
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"unknown field {key!r}")
    scenario = doc.get("scenario", "ideal")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario: expected one of {SCENARIOS}, got {scenario!r}")
    rounds = _expect_int(doc, "rounds", DEFAULT_ROUNDS, 1)
    shots = _expect_int(doc, "shots", DEFAULT_SHOTS, 1)
    master_seed = _expect_int(doc, "master_seed", DEFAULT_MASTER_SEED, 0)
    noise_kind = doc.get("noise_kind", "depolarizing")
    if noise_kind not in NOISE_KINDS:
        raise ConfigError(
            f"noise_kind: expected one of {tuple(NOISE_KINDS)}, got {noise_kind!r}"
        )
    error_rate = doc.get("error_rate", DEFAULT_ERROR_RATE)
    if isinstance(error_rate, bool) or not isinstance(error_rate, (int, float)):
        raise ConfigError(f"error_rate: expected a number, got {error_rate!r}")
    if not 0.0 <= float(error_rate) <= 1.0:
        raise ConfigError(f"error_rate: must lie in [0, 1], got {error_rate}")
    profile_path = doc.get("profile_path")
    if profile_path is not None and not isinstance(profile_path, str):
        raise ConfigError(f"profile_path: expected a path string, got {profile_path!r}")
    if scenario == "hardware" and not profile_path:
        raise ConfigError("profile_path: required when scenario is 'hardware'")
    output_path = doc.get("output_path", "qsg_results.csv")
    if not isinstance(output_path, str) or not output_path:
        raise ConfigError(f"output_path: expected a path string, got {output_path!r}")

    try:
        noise = _scenario_noise(scenario, noise_kind, float(error_rate), profile_path)
    except ProfileError as exc:
        raise ConfigError(f"profile_path: {exc}") from exc

    team_specs = doc.get("teams", None)
    if team_specs is None:
        team_specs = _default_team_specs(scenario)
    if not isinstance(team_specs, list) or not team_specs:
        raise ConfigError("teams: expected a nonempty list of team mappings")
    teams: list[StrategyConfig] = []
    for i, spec in enumerate(team_specs):
        if not isinstance(spec, Mapping):
            raise ConfigError(f"teams[{i}]: expected a mapping, got {spec!r}")
        for key in spec:
            if key not in _TEAM_FIELDS:
                raise ConfigError(f"teams[{i}]: unknown field {key!r}")
        kind = spec.get("kind")
        if kind not in ("classical", "bell", "wstate", "hah"):
            raise ConfigError(f"teams[{i}].kind: expected a team kind, got {kind!r}")
        if scenario == "hah" and kind in ("bell", "wstate"):
            raise ConfigError(
                f"teams[{i}].kind: the hah scenario replaces circuit teams with "
                "hah teams (intel_prob required)"
            )
        try:
            cfg = StrategyConfig(
                kind=kind,
                team_size=int(spec.get("team_size", 2)),
                shots=int(spec.get("shots", shots)),
                intel_prob=spec.get("intel_prob"),
                noise=noise if kind in ("bell", "wstate") else None,
                label=spec.get("label"),
                memory_mode=bool(spec.get("memory_mode", False)),
            )
        except ValueError as exc:
            raise ConfigError(f"teams[{i}]: {exc}") from exc
        teams.append(cfg)
    labels = [default_label(t) for t in teams]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"teams: labels must be unique, got {labels}")

    return RunConfig(
        scenario=scenario,
        rounds=rounds,
        shots=shots,
        master_seed=master_seed,
        noise_kind=noise_kind,
        error_rate=float(error_rate),
        profile_path=profile_path,
        teams=tuple(teams),
        output_path=output_path,
    )


def load_config(path: str | Path) -> dict:
    """Read a config document (YAML mapping; plain JSON parses too)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    doc = yaml.safe_load(text)
    if doc is None:
        return {}
    if not isinstance(doc, dict):
        raise ConfigError(f"config must be a mapping, got {type(doc).__name__}")
    return doc


def _summary_text(config: RunConfig, results, stats_list, bands, means) -> str:
    out = io.StringIO()
    out.write(
        f"scenario={config.scenario} rounds={config.rounds} shots={config.shots} "
        f"master_seed={config.master_seed}\n"
    )
    if config.scenario == "snm":
        out.write(f"noise={config.noise_kind} error_rate={config.error_rate:g}\n")
    elif config.scenario == "hardware":
        out.write(f"profile={config.profile_path}\n")
    out.write("\n")
    for res, st, band, exact_mean in zip(results, stats_list, bands, means):
        verdict = "within" if abs(st.mean - exact_mean) <= band else "outside"
        out.write(
            f"team {res.team_label}: mean={st.mean:+.4f} std={st.std:.4f} "
            f"p_positive={st.p_positive:.4f} accumulated={st.accumulated:+.0f} "
            f"expected_mean={exact_mean:+.4f} band3sigma={band:.4f} "
            f"({verdict} 3 sigma of expectation)\n"
        )
    return out.getvalue()


def run_scenario(config: RunConfig) -> int:
    """Play every configured team against one shared defense sequence.

    Writes the round-by-round CSV to ``output_path`` and a text summary to
    the same stem with suffix ``.summary.txt``.  Returns 0 on success.
    """
    defense = game.defense_sequence(
        config.rounds, derive_rng(config.master_seed, "defense")
    )
    results = []
    for team_cfg in config.teams:
        label = default_label(team_cfg)
        stream = "measurement" if team_cfg.kind in ("bell", "wstate") else "team"
        rng = derive_rng(config.master_seed, f"{stream}:{label}")
        results.append(game.run_match(config.rounds, team_cfg, rng, defense_bits=defense))

    out_path = Path(config.output_path)
    if out_path.parent and not out_path.parent.exists():
        raise ConfigError(f"output_path: directory {out_path.parent} does not exist")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for res in results:
            for k in range(res.n_rounds):
                writer.writerow(
                    (
                        k + 1,
                        res.team_label,
                        "A" if res.defense_bits[k] else "B",
                        "".join("A" if b else "B" for b in res.action_bits[k]),
                        int(res.team_scores[k]),
                        int(res.cumulative[k]),
                    )
                )

    stats_list = [analysis.summarize(res) for res in results]
    bands = []
    means = []
    for team_cfg in config.teams:
        std = analysis.per_round_score_std(team_cfg)
        bands.append(analysis.sampling_band(config.rounds, std, 3.0))
        means.append(analysis.per_round_score_mean(team_cfg))
    summary_path = out_path.with_suffix(".summary.txt")
    summary_path.write_text(
        _summary_text(config, results, stats_list, bands, means), encoding="utf-8"
    )
    return 0


@click.group()
def main() -> None:
    """Sabotage-game simulator: entangled and classical teams under noise."""


@main.command("run")
@click.option("--config", "config_path", type=click.Path(), default=None, help="Config document (YAML/JSON mapping).")
@click.option("--scenario", type=click.Choice(SCENARIOS), default=None, help="Scenario to play.")
@click.option("--rounds", type=int, default=None, help="Rounds per match.")
@click.option("--shots", type=int, default=None, help="Shots per circuit execution.")
@click.option("--seed", type=int, default=None, help="Master seed for every stream.")
@click.option("--noise", type=click.Choice(sorted(NOISE_KINDS)), default=None, help="Channel kind for the snm scenario.")
@click.option("--error-rate", type=float, default=None, help="Channel rate for the snm scenario.")
@click.option("--profile", "profile_path", type=click.Path(), default=None, help="Noise profile for the hardware scenario.")
@click.option("--out", "output_path", type=click.Path(), default=None, help="CSV output path.")
def run_command(
    config_path,
    scenario,
    rounds,
    shots,
    seed,
    noise,
    error_rate,
    profile_path,
    output_path,
) -> None:
    """Play one scenario and write per-round results plus a summary."""
    try:
        doc = load_config(config_path) if config_path else {}
        overrides = {
            "scenario": scenario,
            "rounds": rounds,
            "shots": shots,
            "master_seed": seed,
            "noise_kind": noise,
            "error_rate": error_rate,
            "profile_path": profile_path,
            "output_path": output_path,
        }
        for key, value in overrides.items():
            if value is not None:
                doc[key] = value
        config = validate_config(doc)
        run_scenario(config)
    except (ConfigError, ProfileError) as exc:
        raise click.ClickException(str(exc)) from exc
    except OSError as exc:
        raise click.ClickException(f"i/o failure: {exc}") from exc
    out = Path(config.output_path)
    click.echo(f"wrote {out} and {out.with_suffix('.summary.txt')}")


@main.command("profiles")
def profiles_command() -> None:
    """Show the bundled hardware profile path."""
    click.echo(str(bundled_profile_path()))


if __name__ == "__main__":
    main()
