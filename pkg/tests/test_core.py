# tests/test_core.py
from __future__ import annotations

import logging

import numpy as np

from app.core.errors import CheckpointError, ConfigError, HabCoverageError, VerificationError, WindParseError
from app.core.logging import get_logger
from app.core.reporting import init_error_reporting, report_error
from app.core.rng import Purpose, agent_stream, derive_seed, generator_state, restore_generator, stream
from app.settings import get_settings


# ------------------- rng -------------------

def test_streams_are_reproducible_and_independent():
    assert stream(1, Purpose.DYNAMICS).random() == stream(1, Purpose.DYNAMICS).random()
    assert stream(1, Purpose.DYNAMICS).random() != stream(1, Purpose.FORECAST).random()
    assert stream(1, Purpose.DYNAMICS).random() != stream(2, Purpose.DYNAMICS).random()


def test_agent_streams_do_not_shift_when_the_team_grows():
    small = [agent_stream(5, i, Purpose.DYNAMICS).normal(size=4) for i in range(3)]
    large = [agent_stream(5, i, Purpose.DYNAMICS).normal(size=4) for i in range(8)]
    for a, b in zip(small, large):
        assert np.array_equal(a, b)


def test_derived_seeds_are_32_bit():
    seeds = {derive_seed(0, Purpose.EVAL_EPISODE, k) for k in range(100)}
    assert len(seeds) == 100
    assert all(0 <= s < 2**32 for s in seeds)
    assert derive_seed(0, Purpose.TORCH) == derive_seed(0, Purpose.TORCH)


def test_generator_state_round_trip():
    rng = stream(8, Purpose.SAMPLER)
    rng.random(17)
    clone = restore_generator(generator_state(rng))
    assert np.array_equal(clone.integers(0, 1000, size=10), rng.integers(0, 1000, size=10))


# ------------------- errors -------------------

def test_error_detail_shape():
    err = ConfigError("invalid value for 'env.n_agents'", key="env.n_agents")
    assert err.detail == {"error_code": "CONFIG", "message": "invalid value for 'env.n_agents'", "key": "env.n_agents"}
    assert err.exit_code == 1
    assert isinstance(err, HabCoverageError)


def test_unset_context_is_left_out():
    assert CheckpointError("checkpoint not found").detail == {"error_code": "CHECKPOINT", "message": "checkpoint not found"}


def test_verification_failures_have_their_own_exit_code():
    err = VerificationError("step 3 differs", step=3, agent_id=0)
    assert err.exit_code == 2
    assert err.detail["step"] == 3 and err.detail["agent_id"] == 0


def test_wind_parse_errors_carry_position():
    err = WindParseError("bad number", line=12, field="u")
    assert str(err) == "line 12, field 'u': bad number"
    assert str(WindParseError("wind file not found: x")) == "file: wind file not found: x"


def test_custom_error_code():
    assert HabCoverageError("boom", error_code="CUSTOM").detail["error_code"] == "CUSTOM"


# ------------------- logging / reporting -------------------

def test_loggers_live_under_the_package_root():
    assert get_logger().name == "hab-coverage"
    assert get_logger("wind").name == "hab-coverage.wind"
    assert get_logger("hab-coverage.qmix").name == "hab-coverage.qmix"
    assert isinstance(get_logger("x"), logging.Logger)


def test_reporting_is_off_without_a_dsn():
    assert get_settings().HABCOV_SENTRY_DSN is None
    assert init_error_reporting() is False
    # no-op when reporting never started
    report_error(ConfigError("x"))
