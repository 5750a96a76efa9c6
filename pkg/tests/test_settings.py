import pytest
from pydantic import ValidationError

from santalo.settings import Settings


def test_model_config():
    assert Settings.model_config["case_sensitive"] is True
    assert Settings.model_config["env_file"] == ".env"


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("MC_SAMPLES", "20000")
    monkeypatch.setenv("MC_BATCH", "5000")
    monkeypatch.setenv("mc_batch", "7")
    configured = Settings(_env_file=None)
    assert configured.MC_SAMPLES == 20_000
    assert configured.MC_BATCH == 5_000


def test_batch_must_divide_samples():
    assert Settings(_env_file=None, MC_SAMPLES=10_000, MC_BATCH=1_000).MC_BATCH == 1_000
    with pytest.raises(ValidationError):
        Settings(_env_file=None, MC_SAMPLES=1_000, MC_BATCH=300)


def test_tolerances_are_positive():
    with pytest.raises(ValidationError):
        Settings(_env_file=None, POLARITY_TOL=0.0)
