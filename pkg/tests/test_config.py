"""Tests for the INI configuration parser."""

from __future__ import annotations

import math

import pytest

from acqf.agents import MacroChoice, PolicyKind
from acqf.config import (
    ParseError,
    RunConfig,
    ValidationError,
    parse_config,
    parse_grid,
)
from acqf.pool import Scheduler

FULL = """
# toy run, every key spelled out
[pool]
n_systems = 10
yaw = 0.5
pitch = 0.25
churn_rate = 0.8          # partial churn
symmetrize = true
scheduler = round_robin
observables = x, z

[policy]
kind = budgeted
beta = 0.3
delta = 0.05
intent = L

[scenario]
steps = 500
c0 = 2.0
g = -0.2

[audit]
alpha = 0.01
pool_systems = true

[run]
seed = 7
replicates = 4
workers = 2
"""


class TestDefaults:
    def test_empty_text_is_valid(self):
        cfg = parse_config("")
        assert cfg == RunConfig()

    def test_default_values(self):
        cfg = parse_config("")
        assert cfg.n_systems == 3
        assert cfg.yaw == pytest.approx(math.pi / 4)
        assert cfg.pitch == pytest.approx(math.pi / 4)
        assert cfg.churn_rate == 1.0
        assert cfg.symmetrize is False
        assert cfg.scheduler is Scheduler.UNIFORM
        assert cfg.observables == ("x", "y", "z")
        assert cfg.kind is PolicyKind.BORN
        assert cfg.bias_beta == 0.0
        assert cfg.tolerance_delta == 0.025
        assert cfg.intent is MacroChoice.R
        assert cfg.steps == 1000
        assert cfg.c0 == 1.0
        assert cfg.gradient == 0.1
        assert cfg.alpha == 0.05
        assert cfg.pool_systems is False
        assert cfg.seed == 42
        assert cfg.replicates == 1
        assert cfg.workers == 1

    def test_comments_and_blank_lines_ignored(self):
        cfg = parse_config("\n# nothing here\n   \n# [pool] commented out\n")
        assert cfg == RunConfig()


class TestFullConfig:
    def test_every_key(self):
        cfg = parse_config(FULL)
        assert cfg.n_systems == 10
        assert cfg.yaw == 0.5
        assert cfg.pitch == 0.25
        assert cfg.churn_rate == 0.8
        assert cfg.symmetrize is True
        assert cfg.scheduler is Scheduler.ROUND_ROBIN
        assert cfg.observables == ("x", "z")
        assert cfg.kind is PolicyKind.BUDGETED
        assert cfg.bias_beta == 0.3
        assert cfg.tolerance_delta == 0.05
        assert cfg.intent is MacroChoice.L
        assert cfg.steps == 500
        assert cfg.c0 == 2.0
        assert cfg.gradient == -0.2
        assert cfg.alpha == 0.01
        assert cfg.pool_systems is True
        assert cfg.seed == 7
        assert cfg.replicates == 4
        assert cfg.workers == 2

    def test_derived_objects(self):
        cfg = parse_config(FULL)
        pool = cfg.pool_config()
        assert pool.n_systems == 10
        assert pool.scheduler is Scheduler.ROUND_ROBIN
        assert [o.label for o in pool.observables()] == ["x", "z"]
        policy = cfg.policy()
        assert policy.kind is PolicyKind.BUDGETED
        assert policy.bias_beta == 0.3
        params = cfg.sim_params()
        assert params.steps == 500
        assert params.intent is MacroChoice.L


class TestParseErrors:
    def test_unknown_section(self):
        with pytest.raises(ParseError) as err:
            parse_config("[pool]\nn_systems = 3\n[nope]\n")
        assert err.value.line == 3

    def test_unknown_key(self):
        with pytest.raises(ParseError) as err:
            parse_config("[pool]\nbogus = 1\n")
        assert err.value.line == 2

    def test_key_from_wrong_section(self):
        with pytest.raises(ParseError):
            parse_config("[pool]\nbeta = 0.5\n")

    def test_duplicate_key(self):
        with pytest.raises(ParseError) as err:
            parse_config("[pool]\nn_systems = 3\nn_systems = 4\n")
        assert err.value.line == 3

    def test_key_before_section(self):
        with pytest.raises(ParseError) as err:
            parse_config("n_systems = 3\n")
        assert err.value.line == 1

    def test_missing_equals(self):
        with pytest.raises(ParseError):
            parse_config("[pool]\nn_systems 3\n")

    def test_empty_value(self):
        with pytest.raises(ParseError):
            parse_config("[pool]\nn_systems =\n")

    def test_malformed_section_header(self):
        with pytest.raises(ParseError):
            parse_config("[pool\nn_systems = 3\n")

    def test_parse_error_is_value_error(self):
        assert issubclass(ParseError, ValueError)
        assert issubclass(ValidationError, ValueError)


class TestValidation:
    @pytest.mark.parametrize(
        "snippet,field",
        [
            ("[pool]\nn_systems = 0", "n_systems"),
            ("[pool]\nn_systems = three", "n_systems"),
            ("[pool]\nchurn_rate = 1.5", "churn_rate"),
            ("[pool]\nchurn_rate = -0.1", "churn_rate"),
            ("[pool]\nsymmetrize = yes", "symmetrize"),
            ("[pool]\nscheduler = random", "scheduler"),
            ("[pool]\nobservables = x, w", "observables"),
            ("[pool]\nobservables = x, x", "observables"),
            ("[pool]\nyaw = nan", "yaw"),
            ("[pool]\npitch = inf", "pitch"),
            ("[policy]\nkind = psychic", "kind"),
            ("[policy]\nbeta = 1.2", "bias_beta"),
            ("[policy]\nbeta = -0.1", "bias_beta"),
            ("[policy]\ndelta = 0", "tolerance_delta"),
            ("[policy]\ndelta = 0.5", "tolerance_delta"),
            ("[policy]\nintent = U", "intent"),
            ("[scenario]\nsteps = 0", "steps"),
            ("[scenario]\nc0 = -1", "c0"),
            ("[audit]\nalpha = 0", "alpha"),
            ("[audit]\nalpha = 1", "alpha"),
            ("[run]\nseed = -1", "seed"),
            ("[run]\nreplicates = 0", "replicates"),
            ("[run]\nworkers = 0", "workers"),
        ],
    )
    def test_bad_values_name_the_field(self, snippet, field):
        with pytest.raises(ValidationError) as err:
            parse_config(snippet)
        assert err.value.field == field

    def test_seed_upper_bound(self):
        parse_config(f"[run]\nseed = {2**64 - 1}")
        with pytest.raises(ValidationError):
            parse_config(f"[run]\nseed = {2**64}")

    def test_beta_key_maps_to_bias_beta(self):
        cfg = parse_config("[policy]\nbeta = 0.7")
        assert cfg.bias_beta == 0.7

    def test_degenerate_angles_rejected(self):
        with pytest.raises(ValidationError) as err:
            parse_config("[pool]\nyaw = 0\npitch = 0")
        assert err.value.field == "yaw/pitch"

    def test_valid_angles_accepted(self):
        cfg = parse_config("[pool]\nyaw = 0.7853981633974483\npitch = 0.7853981633974483")
        assert cfg.pool_config().ready_frame is not None


class TestParseGrid:
    def test_basic_grid(self):
        grid = parse_grid("[grid]\nn_systems = 3, 30, 300\nbeta = 0.0, 0.2\ntrials = 3000\n")
        assert grid.n_systems == (3, 30, 300)
        assert grid.bias_beta == (0.0, 0.2)
        assert grid.trials == (3000,)

    def test_missing_key(self):
        with pytest.raises(ValidationError):
            parse_grid("[grid]\nn_systems = 3\nbeta = 0.1\n")

    def test_unknown_section(self):
        with pytest.raises(ParseError):
            parse_grid("[pool]\nn_systems = 3\n")

    def test_bad_beta(self):
        with pytest.raises(ValidationError):
            parse_grid("[grid]\nn_systems = 3\nbeta = 2.0\ntrials = 10\n")

    def test_bad_trials(self):
        with pytest.raises(ValidationError):
            parse_grid("[grid]\nn_systems = 3\nbeta = 0.5\ntrials = 0\n")
