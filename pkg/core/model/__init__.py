# Core mechanical model package
from core.model.state import State
from core.model.system_model import SystemModel
from core.model.load_schedule import LoadSchedule, eval_load
from core.model.validation import Violation, ViolationKind, validate_system

__all__ = [
    "State",
    "SystemModel",
    "LoadSchedule",
    "eval_load",
    "Violation",
    "ViolationKind",
    "validate_system",
]
