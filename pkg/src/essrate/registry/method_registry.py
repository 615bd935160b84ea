"""
Runge-Kutta method registry.

The registry resolves method names used in experiment configs to
:class:`RkMethod` records. It always holds the built-in methods and can be
extended from a JSON file of Butcher tableaux.
"""

import json
import logging
from pathlib import Path

from pydantic import ValidationError

from essrate.errors import UnknownMethodError
from essrate.stability.builtin import BUILTIN_METHODS, METHOD_ALIASES
from essrate.stability.models import RkMethod

logger = logging.getLogger(__name__)


class MethodRegistry:
    """Registry that maps method names to explicit Runge-Kutta methods.

    Example registry data:
    {
        "ralston": {
            "order": 2,
            "butcher_a": [[0, 0], [0.6666666666666666, 0]],
            "butcher_b": [0.25, 0.75],
            "butcher_c": [0, 0.6666666666666666]
        }
    }
    """

    def __init__(self, registry_path: str | None = None) -> None:
        """Initialize the registry with the built-in methods.

        Args:
            registry_path: Path to a JSON file with additional methods.
                          If None, only the built-ins are available.
        """
        self._registry: dict[str, RkMethod] = dict(BUILTIN_METHODS)
        self._registry_path = registry_path

        if registry_path:
            self._load_from_file(registry_path)

    def _load_from_file(self, path: str) -> None:
        """Load extra methods from a JSON file.

        Args:
            path: Path to the JSON file.
        """
        file_path = Path(path)
        if not file_path.exists():
            logger.warning(f"Method registry file not found: {path}")
            return

        try:
            with open(file_path) as f:
                data = json.load(f)

            loaded = 0
            for method_name, method_data in data.items():
                self._registry[method_name.lower()] = RkMethod(name=method_name, **method_data)
                loaded += 1

            logger.info(f"Loaded {loaded} methods from {path}")
        except json.JSONDecodeError as e:
            logger.error(f"Failed to parse method registry JSON: {e}")
        except ValidationError as e:
            logger.error(f"Invalid method in registry {path}: {e}")

    def _resolve(self, method_name: str) -> str:
        name = method_name.lower()
        return METHOD_ALIASES.get(name, name)

    def get_method(self, method_name: str) -> RkMethod | None:
        """Get a method by name or alias.

        Returns:
            RkMethod if found, None otherwise.
        """
        return self._registry.get(self._resolve(method_name))

    def require(self, method_name: str) -> RkMethod:
        """Get a method by name.

        Raises:
            UnknownMethodError: If the name is not registered.
        """
        method = self.get_method(method_name)
        if method is None:
            raise UnknownMethodError(
                f"unknown method {method_name!r}; known: {', '.join(self.list_methods())}"
            )
        return method

    def register_method(self, method: RkMethod) -> None:
        """Register a new method or replace an existing one.

        Names are stored lower-case, the form lookups resolve to.
        """
        self._registry[method.name.lower()] = method
        logger.info(f"Registered method: {method.name}")

    def remove_method(self, method_name: str) -> bool:
        """Remove a method from the registry.

        Returns:
            True if the method was removed, False if it wasn't found.
        """
        name = self._resolve(method_name)
        if name in self._registry:
            del self._registry[name]
            logger.info(f"Removed method: {name}")
            return True
        return False

    def list_methods(self) -> list[str]:
        """List all registered method names, sorted."""
        return sorted(self._registry)

    def save_to_file(self, path: str | None = None) -> None:
        """Save the non-built-in methods to a JSON file.

        Args:
            path: Path to save to. If None, uses the original path.
        """
        save_path = path or self._registry_path
        if not save_path:
            raise ValueError("No path specified for saving registry")

        file_path = Path(save_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)

        data = {
            name: method.model_dump(exclude={"name"})
            for name, method in self._registry.items()
            if BUILTIN_METHODS.get(name) != method
        }

        with open(file_path, "w") as f:
            json.dump(data, f, indent=2)

        logger.info(f"Saved {len(data)} methods to {save_path}")

    def __len__(self) -> int:
        """Return the number of registered methods."""
        return len(self._registry)

    def __contains__(self, method_name: str) -> bool:
        """Check if a method is registered."""
        return self._resolve(method_name) in self._registry
