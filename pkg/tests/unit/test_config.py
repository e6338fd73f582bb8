"""
Unit tests for configuration handling.
"""

import pytest

from pachner_walk.core.exceptions import ConfigurationError, ValidationError
from pachner_walk.core.models import Regime, Thresholds
from pachner_walk.utils.config import Config, RunConfig


def test_config_validation_applies_defaults():
    """An empty config validates to the documented defaults."""
    config = Config({})

    assert config.validate() is True
    assert config.get("alpha") == 1e-2
    assert config.get("heatmap.bins") == 64
    run_config = config.run_config()
    assert run_config.resolved_beta() == pytest.approx(3e-2)
    assert run_config.initial_state == "origin-default"
    assert run_config.assert_level == "norm"


def test_config_normalizes_log_level():
    """log_level is accepted in any case and stored upper-case."""
    config = Config({"log_level": "debug"})

    assert config.run_config().log_level == "DEBUG"


@pytest.mark.parametrize(
    "beta, expected",
    [("2.5*alpha", 0.25), ("0.3", 0.3), (0.05, 0.05), (" 6 * alpha ", 0.6)],
)
def test_beta_forms(beta, expected):
    """beta is a number, a numeric string or a '<ratio>*alpha' token."""
    run_config = Config({"alpha": 0.1, "beta": beta}).run_config()

    assert run_config.resolved_beta() == pytest.approx(expected)


@pytest.mark.parametrize(
    "values",
    [
        {"beta": "alpha*3"},
        {"alpha": 0.5, "beta": "3*alpha"},
        {"alpha": 0.0, "beta": 1.0},
        {"alpha": 1.5},
        {"eta_window": 4},
        {"steps": 0},
        {"unknown_key": 1},
        {"coins": {"W": [1.0, 0.0]}},
        {"initial_state": [{"path": [4], "side": 1, "re": 1.0}]},
    ],
)
def test_config_validation_rejects_invalid_values(values):
    """Invalid settings raise ConfigurationError."""
    config = Config(values)

    with pytest.raises(ConfigurationError):
        config.validate()


def test_explicit_initial_state_parses():
    """A list of slot amplitudes replaces the default origin state."""
    run_config = Config(
        {"initial_state": [{"path": [1, 2], "side": 3, "re": 0.6, "im": 0.8}]}
    ).run_config()

    (entry,) = run_config.initial_state
    assert entry.path == [1, 2]
    assert entry.side == 3
    assert complex(entry.re, entry.im) == 0.6 + 0.8j


def test_environment_overrides(monkeypatch):
    """PACHNER_WALK_* variables take precedence over file values."""
    monkeypatch.setenv("PACHNER_WALK_ALPHA", "0.2")
    monkeypatch.setenv("PACHNER_WALK_HEATMAP_BINS", "16")
    config = Config({"alpha": 0.1})

    assert config.get("heatmap.bins") == "16"
    assert config.run_config().alpha == pytest.approx(0.2)


def test_set_wins_over_environment(monkeypatch):
    """Values passed to set() are not overridden by PACHNER_WALK_* variables."""
    monkeypatch.setenv("PACHNER_WALK_LOG_LEVEL", "ERROR")
    config = Config({})
    config.set("log_level", "DEBUG")

    assert config.get("log_level") == "DEBUG"
    assert config.run_config().log_level == "DEBUG"


def test_set_creates_nested_keys():
    """set() accepts dotted keys."""
    config = Config({})
    config.set("heatmap.bins", 8)

    assert config.get("heatmap.bins") == 8
    assert config.run_config().heatmap.bins == 8


def test_from_file(run_config_path):
    """YAML files load into a validated configuration."""
    run_config = Config.from_file(run_config_path).run_config()

    assert run_config.alpha == pytest.approx(0.05)
    assert run_config.steps == 8
    assert run_config.heatmap.every_n_steps == 4


def test_from_file_errors(tmp_path):
    """Missing files and non-mapping documents are configuration errors."""
    with pytest.raises(ConfigurationError):
        Config.from_file(tmp_path / "missing.yaml")

    listing = tmp_path / "list.yaml"
    listing.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        Config.from_file(listing)


def test_scalar_fields_are_run_config_fields():
    """Every environment-overridable key is a RunConfig field."""
    assert set(RunConfig.scalar_fields()) <= set(RunConfig.model_fields)


@pytest.mark.parametrize(
    "alpha, beta, regime",
    [(0.01, 0.07, Regime.UNSTABLE), (0.01, 0.03, Regime.INTERMEDIATE), (0.01, 0.005, Regime.QUASI_STABLE)],
)
def test_threshold_regimes(alpha, beta, regime):
    """The beta/alpha ratio selects the stability regime."""
    assert Thresholds(alpha=alpha, beta=beta).regime is regime


def test_thresholds_reject_unbounded_refinement():
    """alpha = 0 with beta = 1 is not a valid threshold pair."""
    with pytest.raises(ValidationError) as exc_info:
        Thresholds(alpha=0.0, beta=1.0)

    assert exc_info.value.code == "VALIDATION_ERROR"
    assert "refines the grid without bound" in exc_info.value.message


def test_thresholds_out_of_range_raise_validation_error():
    """Out-of-range thresholds surface as the package ValidationError."""
    with pytest.raises(ValidationError) as exc_info:
        Thresholds(alpha=2.0)

    assert exc_info.value.details == {"field": "thresholds"}
    assert "alpha" in exc_info.value.message
