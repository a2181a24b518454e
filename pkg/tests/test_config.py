import pytest
from pydantic import ValidationError

from app.core.config import (
    CALIBRATION_THRESHOLDS,
    PrecisionParams,
    RegimeParams,
    RunConfig,
    get_settings,
    get_thresholds,
    load_run_config,
)
from app.core.errors import CapExceededError, DomainError, InfeasibleError, ToleranceError


def test_default_regime_parameters(regime_params):
    assert regime_params.a == 0.05
    assert regime_params.c == 0.05
    assert regime_params.alpha == 0.25
    assert regime_params.epsilon_o == pytest.approx(0.25 ** 4 / 2)


def test_explicit_epsilon_o_is_kept():
    assert RegimeParams(epsilon_o=0.01).epsilon_o == 0.01


def test_epsilon_o_follows_alpha():
    assert RegimeParams(alpha=0.2).epsilon_o == pytest.approx(0.2 ** 4 / 2)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"alpha": 0.5},
        {"a": 0.5, "c": 0.5},
        {"epsilon": 0.3},
        {"a": 0.0},
        {"boundary_band": 0.6},
    ],
)
def test_invalid_regime_parameters(kwargs):
    with pytest.raises(ValidationError):
        RegimeParams(**kwargs)


def test_precision_defaults(precision):
    assert precision.exact_cap == 300
    assert precision.series_exact_cap == 400
    assert precision.mantissa_bits == 128
    with pytest.raises(ValidationError):
        PrecisionParams(mantissa_bits=32)


def test_run_config_defaults(run_config):
    assert run_config.workers == 1
    assert run_config.output.format == "csv"
    assert run_config.output.path is None


def test_load_without_file():
    config = load_run_config(None, {"regime": {"a": 0.1, "c": None}, "workers": None})
    assert config.regime.a == 0.1
    assert config.regime.c == 0.05
    assert config.workers == 1


def test_load_toml_and_overrides(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('workers = 3\n\n[regime]\na = 0.1\nc = 0.2\n\n[output]\nformat = "json"\n')

    config = load_run_config(path)
    assert config.workers == 3
    assert config.regime.a == 0.1
    assert config.regime.c == 0.2
    assert config.output.format == "json"

    config = load_run_config(path, {"regime": {"a": 0.02}, "output": {"format": None}})
    assert config.regime.a == 0.02
    assert config.regime.c == 0.2
    assert config.output.format == "json"


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_run_config(tmp_path / "absent.toml")


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("COMBWALK_WORKERS", "4")
    monkeypatch.setenv("COMBWALK_REGIME__A", "0.2")
    config = RunConfig()
    assert config.workers == 4
    assert config.regime.a == 0.2


def test_settings_are_cached():
    assert get_settings() is get_settings()


def test_thresholds():
    thresholds = get_thresholds()
    assert thresholds is CALIBRATION_THRESHOLDS
    assert thresholds["LOCAL"] == 0.05
    assert all(0 < value < 1 for value in thresholds.values())


@pytest.mark.parametrize(
    "error, exit_code, status_code",
    [
        (DomainError, 2, 422),
        (InfeasibleError, 3, 409),
        (CapExceededError, 3, 409),
        (ToleranceError, 4, 500),
    ],
)
def test_error_codes(error, exit_code, status_code):
    e = error("détail")
    assert e.exit_code == exit_code
    assert e.status_code == status_code
    assert e.detail == "détail"
    assert str(e) == "détail"
