# Core configuration package
from core.config.config_manager import (
    Command,
    ConfigManager,
    QuotientConfig,
    RunConfig,
    parse_config,
)

__all__ = ["Command", "ConfigManager", "QuotientConfig", "RunConfig", "parse_config"]
