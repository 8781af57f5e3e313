"""
System Registry - Discovers and manages system plugins
Drop-in ready: add a new system file under systems/ and its `kind` becomes
available to run descriptions
"""

import importlib
import inspect
import pkgutil
import types
from typing import Optional

import numpy as np

from core.model import SystemModel
from core.systems.system_setup import SystemSetup
from utils.logger import get_logger

logger = get_logger(__name__)


class SystemRegistry:
    """
    Discovers and manages system plugins.

    Systems are discovered from the 'systems' package. Each SystemModel
    subclass that declares a `kind` is registered under that tag.
    """

    def __init__(self):
        self.systems: dict[str, type[SystemModel]] = {}

    def discover_systems(self):
        """Import every module of the 'systems' package and register its systems"""
        import systems

        logger.debug(f"Discovering systems from: {list(systems.__path__)}")
        for _, name, _ in pkgutil.iter_modules(systems.__path__):
            if name.startswith("_"):
                continue
            module = importlib.import_module(f"systems.{name}")
            for attr_name in dir(module):
                attr = getattr(module, attr_name)
                if is_system_class(attr, module.__name__):
                    self.register_system(attr)

    def register_system(self, system_class: type[SystemModel]):
        """Register a system class under its kind tag"""
        existing = self.systems.get(system_class.kind)
        if existing is not None and existing is not system_class:
            raise ValueError(f"Kind '{system_class.kind}' claimed by {existing.__name__} and {system_class.__name__}")
        self.systems[system_class.kind] = system_class
        logger.debug(f"Registered system: {system_class.kind} ({system_class.__name__})")

    def get_system(self, kind: str) -> Optional[type[SystemModel]]:
        """Get a system class by kind"""
        return self.systems.get(kind)

    def list_kinds(self) -> list[str]:
        """List all registered kinds"""
        return sorted(self.systems)

    def build(self, params: dict, seed: Optional[int] = None) -> SystemSetup:
        """Build the setup described by a `system` block"""
        kind = params["kind"]
        system_class = self.get_system(kind)
        if system_class is None:
            raise KeyError(f"Unknown system kind '{kind}'; known: {self.list_kinds()}")
        setup = system_class.from_config(params, np.random.default_rng(seed))
        logger.info(f"Built {setup.system.description} ({kind}, dim={setup.system.dim})")
        return setup


def is_system_class(attr, module_name: str) -> bool:
    """True for a SystemModel subclass with a kind, defined in module_name"""
    # Parametrized aliases such as NDArray[np.float64] pass isinstance(attr, type) on 3.10
    if not inspect.isclass(attr) or isinstance(attr, types.GenericAlias):
        return False
    if attr.__module__ != module_name:
        return False
    return issubclass(attr, SystemModel) and attr is not SystemModel and attr.kind is not None


_default_registry: Optional[SystemRegistry] = None


def get_registry() -> SystemRegistry:
    """Process-wide registry, discovered on first use"""
    global _default_registry
    if _default_registry is None:
        # Published only once discovery has completed
        registry = SystemRegistry()
        registry.discover_systems()
        _default_registry = registry
    return _default_registry
