import pytest

from config import DEFAULT_SETTINGS_PATH, Settings, SettingsError, load_settings, resolve_threads

ENV_NAMES = ("SALIENT_THREADS", "SALIENT_PLANNER_ENDPOINT", "SALIENT_PLANNER_MODEL", "SALIENT_PLANNER_API_KEY")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_NAMES:
        monkeypatch.delenv(name, raising=False)


def test_bundled_settings_match_built_in_defaults():
    assert DEFAULT_SETTINGS_PATH.is_file()
    assert load_settings() == Settings()


def test_settings_file_overrides_defaults(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("clustering:\n  spatial_eps: 0.3\nevaluation:\n  score_cutoff: 0.25\n", encoding="utf-8")
    settings = load_settings(path)
    assert settings.clustering.spatial_eps == 0.3
    assert settings.clustering.temporal_eps == 0.4
    assert settings.evaluation.score_cutoff == 0.25


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SALIENT_THREADS", "3")
    monkeypatch.setenv("SALIENT_PLANNER_MODEL", "other-model")
    monkeypatch.setenv("SALIENT_PLANNER_API_KEY", "secret")
    settings = load_settings()
    assert settings.runtime.threads == 3
    assert settings.planner.model == "other-model"
    assert settings.planner.api_key == "secret"
    assert "api_key" not in settings.planner.model_dump()


def test_bad_thread_variable(monkeypatch):
    monkeypatch.setenv("SALIENT_THREADS", "many")
    with pytest.raises(SettingsError, match="SALIENT_THREADS"):
        load_settings()


def test_api_key_is_not_read_from_files(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("planner:\n  api_key: oops\n", encoding="utf-8")
    with pytest.raises(SettingsError, match="SALIENT_PLANNER_API_KEY"):
        load_settings(path)


def test_invalid_values_and_unknown_sections(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("evaluation:\n  score_cutoff: 3\n", encoding="utf-8")
    with pytest.raises(SettingsError, match="evaluation.score_cutoff"):
        load_settings(path)
    path.write_text("telemetry:\n  enabled: true\n", encoding="utf-8")
    with pytest.raises(SettingsError, match="telemetry"):
        load_settings(path)
    path.write_text("- just\n- a list\n", encoding="utf-8")
    with pytest.raises(SettingsError):
        load_settings(path)


def test_missing_explicit_settings_file(tmp_path):
    with pytest.raises(SettingsError, match="not found"):
        load_settings(tmp_path / "absent.yaml")


def test_resolve_threads():
    assert resolve_threads(2) == 2
    assert resolve_threads(0) >= 1
    assert resolve_threads(None, Settings.model_validate({"runtime": {"threads": 5}})) == 5
    with pytest.raises(SettingsError):
        resolve_threads(-1)
