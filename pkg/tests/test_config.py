import httpx
import pytest
from pydantic import ValidationError

from shared_arrangements.config.env_subst import substitute_env_vars
from shared_arrangements.config.file import load_config as load_file
from shared_arrangements.config.final import Settings, TraceSettings
from shared_arrangements.config.http import load_config as load_url
from shared_arrangements.models import WorkloadConfig
from shared_arrangements.models.workload import resolve_effort


def test_substitute_env_vars():
    config = {"trace": {"merge_effort": "$EFFORT"}, "drop": None, "tags": ["${A}-x", 3]}
    env = {"EFFORT": "4", "A": "a"}
    assert substitute_env_vars(config, env) == {"trace": {"merge_effort": "4"}, "tags": ["a-x", 3]}
    assert substitute_env_vars("$MISSING", {}) == "$MISSING"


def test_settings_defaults():
    settings = Settings()
    assert settings.trace.effort() == 8
    assert settings.operators.join_fuel == 1 << 16
    assert settings.operators.iterate_max_rounds == 1_000_000


def test_settings_from_nested_dict():
    settings = Settings(**{"runtime": {"workers": 4}, "trace": {"merge_effort": "eager"}})
    assert settings.runtime.workers == 4
    assert settings.trace.effort() is None


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("SHARED_ARRANGEMENTS__RUNTIME__WORKERS", "3")
    monkeypatch.setenv("SHARED_ARRANGEMENTS__TRACE__MERGE_EFFORT", "lazy")
    settings = Settings()
    assert settings.runtime.workers == 3
    assert settings.trace.effort() == 1


@pytest.mark.parametrize("effort", [0, -2, "sometimes"])
def test_invalid_merge_effort(effort):
    with pytest.raises(ValidationError):
        TraceSettings(merge_effort=effort)
    with pytest.raises(ValidationError):
        WorkloadConfig(merge_effort=effort)


@pytest.mark.parametrize("setting, effort", [("eager", None), ("lazy", 1), (12, 12)])
def test_settings_and_workloads_resolve_effort_alike(setting, effort):
    assert resolve_effort(setting) == effort
    assert TraceSettings(merge_effort=setting).effort() == effort
    assert WorkloadConfig(merge_effort=setting).effort() == effort


def test_workload_scaling():
    config = WorkloadConfig(workers=4, keys=100, rate=50.0)
    scaled = config.scaled()
    assert (scaled.keys, scaled.rate) == (400, 200.0)
    assert (config.keys, config.rate) == (100, 50.0)


def test_config_file(tmp_path):
    path = tmp_path / "config.json"
    assert load_file(str(path)) == {}
    path.write_text("{not json")
    assert load_file(str(path)) == {}
    path.write_text('{"runtime": {"workers": 2}}')
    assert load_file(str(path)) == {"runtime": {"workers": 2}}


def test_config_url_unreachable(monkeypatch):
    def refuse(url, timeout):
        raise httpx.ConnectError("refused")

    monkeypatch.setattr(httpx, "get", refuse)
    assert load_url("http://config.invalid/config.json") == {}


def test_config_url(monkeypatch):
    def serve(url, timeout):
        return httpx.Response(200, json={"logging": {"log_level": "DEBUG"}}, request=httpx.Request("GET", url))

    monkeypatch.setattr(httpx, "get", serve)
    assert load_url("http://config.example/config.json") == {"logging": {"log_level": "DEBUG"}}
