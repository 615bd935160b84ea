"""Tests for essrate."""
