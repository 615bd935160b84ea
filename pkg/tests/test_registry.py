"""Tests for the Runge-Kutta method registry."""

import json
import tempfile
from pathlib import Path

import pytest

from essrate.errors import UnknownMethodError
from essrate.registry import MethodRegistry
from essrate.stability import RK4, RkMethod

RALSTON = {
    "order": 2,
    "butcher_a": [[0.0, 0.0], [2.0 / 3.0, 0.0]],
    "butcher_b": [0.25, 0.75],
    "butcher_c": [0.0, 2.0 / 3.0],
}


class TestMethodRegistry:
    """Tests for MethodRegistry class."""

    def test_builtin_registry(self) -> None:
        """Test that a registry without a file holds the built-in methods."""
        registry = MethodRegistry()

        assert len(registry) == 4
        assert registry.list_methods() == ["euler", "heun", "rk3", "rk4"]
        assert registry.get_method("nonexistent") is None

    def test_aliases_and_case(self) -> None:
        """Test that aliases and upper-case names resolve."""
        registry = MethodRegistry()

        assert registry.get_method("RK4") == RK4
        assert registry.require("rk2").name == "heun"
        assert "rk1" in registry

    def test_require_unknown(self) -> None:
        """Test that require raises for unknown names."""
        registry = MethodRegistry()

        with pytest.raises(UnknownMethodError, match="unknown method"):
            registry.require("dopri5")

    def test_register_method(self) -> None:
        """Test registering a method."""
        registry = MethodRegistry()
        method = RkMethod(name="ralston", **RALSTON)

        registry.register_method(method)

        assert len(registry) == 5
        assert "ralston" in registry
        assert registry.get_method("ralston") == method

    def test_register_mixed_case_name(self) -> None:
        """Test that a mixed-case registration is found under any case."""
        registry = MethodRegistry()
        method = RkMethod(name="Ralston", **RALSTON)

        registry.register_method(method)

        assert registry.get_method("Ralston") == method
        assert registry.require("RALSTON") == method
        assert "ralston" in registry.list_methods()
        assert registry.remove_method("Ralston") is True

    def test_remove_method(self) -> None:
        """Test removing a method."""
        registry = MethodRegistry()

        assert registry.remove_method("euler") is True
        assert len(registry) == 3
        assert registry.remove_method("nonexistent") is False

    def test_load_from_file(self) -> None:
        """Test loading extra methods from a JSON file."""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".json", delete=False) as f:
            json.dump({"ralston": RALSTON}, f)
            temp_path = f.name

        try:
            registry = MethodRegistry(temp_path)

            assert len(registry) == 5
            ralston = registry.require("ralston")
            assert ralston.stability_poly == pytest.approx((1.0, 1.0, 0.5))
        finally:
            Path(temp_path).unlink()

    def test_load_shipped_registry(self) -> None:
        """Test that the methods shipped in config/ validate."""
        path = Path(__file__).parents[1] / "config" / "rk_methods.json"
        registry = MethodRegistry(str(path))

        assert {"ralston", "ssprk3", "rk38"} <= set(registry.list_methods())
        assert registry.require("rk38").stability_poly == pytest.approx(RK4.stability_poly)

    def test_load_nonexistent_file(self) -> None:
        """Test loading from a nonexistent file keeps the built-ins."""
        registry = MethodRegistry("/nonexistent/path/rk_methods.json")

        assert len(registry) == 4

    def test_load_malformed_file(self) -> None:
        """Test that malformed JSON keeps the built-ins."""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".json", delete=False) as f:
            f.write("{not json")
            temp_path = f.name

        try:
            registry = MethodRegistry(temp_path)
            assert len(registry) == 4
        finally:
            Path(temp_path).unlink()

    def test_save_to_file(self) -> None:
        """Test saving the non-built-in methods to a JSON file."""
        registry = MethodRegistry()
        registry.register_method(RkMethod(name="ralston", **RALSTON))

        with tempfile.NamedTemporaryFile(mode="w", suffix=".json", delete=False) as f:
            temp_path = f.name

        try:
            registry.save_to_file(temp_path)

            with open(temp_path) as f:
                data = json.load(f)

            assert list(data) == ["ralston"]
            assert data["ralston"]["order"] == 2

            reloaded = MethodRegistry(temp_path)
            assert reloaded.require("ralston").butcher_b == (0.25, 0.75)
        finally:
            Path(temp_path).unlink()

    def test_save_without_path(self) -> None:
        """Test that saving needs a path."""
        with pytest.raises(ValueError, match="No path"):
            MethodRegistry().save_to_file()
