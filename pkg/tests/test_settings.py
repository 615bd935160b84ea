"""Tests for environment-driven settings."""

import pytest

from essrate.config import Settings, get_settings


class TestSettings:
    """Tests for the Settings model."""

    def test_defaults(self) -> None:
        """Test the documented defaults."""
        settings = Settings(_env_file=None)

        assert settings.log_level == "INFO"
        assert settings.default_safety == 0.9
        assert settings.tail_frac == 0.25
        assert settings.fit_window == 0.5
        assert settings.method_registry_path == "config/rk_methods.json"

    def test_env_override(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that ESSRATE_ variables override defaults."""
        monkeypatch.setenv("ESSRATE_THREADS", "3")
        monkeypatch.setenv("ESSRATE_DEFAULT_SAFETY", "0.5")

        settings = Settings(_env_file=None)

        assert settings.threads == 3
        assert settings.resolved_threads() == 3
        assert settings.default_safety == 0.5

    def test_resolved_threads_defaults_to_cpus(self) -> None:
        """Test that unset threads resolve to at least one worker."""
        assert Settings(_env_file=None).resolved_threads() >= 1

    def test_rejects_invalid_safety(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that a safety factor above 1 is rejected."""
        monkeypatch.setenv("ESSRATE_DEFAULT_SAFETY", "1.5")

        with pytest.raises(ValueError):
            Settings(_env_file=None)

    def test_get_settings_is_cached(self) -> None:
        """Test that get_settings returns a shared instance."""
        assert get_settings() is get_settings()
