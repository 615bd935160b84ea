"""Configuration management for essrate."""

from essrate.config.settings import Settings, get_settings

__all__ = ["Settings", "get_settings"]
