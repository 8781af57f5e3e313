# Core system catalog package
from core.systems.system_setup import SystemSetup
from core.systems.system_registry import SystemRegistry, get_registry

__all__ = ["SystemSetup", "SystemRegistry", "get_registry"]
