"""配置管理模块

提供统一的配置管理功能，包括：
- 应用配置加载和验证
- 环境变量处理
- 默认配置管理

实验文档（YAML）的解析见 ringsim.config.parser。
"""

from .config_manager import ConfigManager, config_manager
from .settings import (
    LoggingSettings,
    OutputSettings,
    Settings,
    SimulationSettings,
    SweepSettings,
    get_settings,
    reload_settings,
)

__all__ = [
    "ConfigManager",
    "config_manager",
    "Settings",
    "SimulationSettings",
    "OutputSettings",
    "SweepSettings",
    "LoggingSettings",
    "get_settings",
    "reload_settings",
]
