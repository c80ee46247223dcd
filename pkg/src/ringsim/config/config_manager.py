"""
应用配置管理

负责：
- 内置默认值（仿真、输出、扫描、日志）
- config/ 目录下的通用与环境特定配置文件合并
- RINGSIM_* 环境变量覆盖，按默认值的类型转换
"""

import os
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, Union

import yaml

logger = logging.getLogger(__name__)

# 环境变量 -> 配置路径
ENV_MAPPINGS = {
    "RINGSIM_LOG_LEVEL": "logging.level",
    "RINGSIM_LOG_FILE": "logging.file",
    "RINGSIM_OUTPUT_DIR": "output.output_dir",
    "RINGSIM_TRAJECTORY_FORMAT": "output.trajectory_format",
    "RINGSIM_PLOT_DATA": "output.plot_data",
    "RINGSIM_PARALLEL": "sweep.parallel_workers",
}

CONFIG_SUFFIXES = (".json", ".yaml", ".yml")
TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


def default_config() -> Dict[str, Any]:
    """内置默认配置"""
    return {
        # 仿真默认值
        "simulation": {
            "n_vehicles": 10,
            "ring_length": 300.0,
            "vehicle_length": 5.0,
            "dt": 1.0 / 30.0,
            "duration": 120.0,
            "accel_min": -10.0,
            "accel_max": 5.0,
            "phase_edges": [30.0, 60.0, 90.0, 120.0],
            "attack_window": [60.0, 90.0],
        },

        # 输出配置
        "output": {
            "output_dir": "output",
            "trajectory_format": "csv",
            "write_trajectories": True,
            "plot_data": False,
            "report_name": "report.txt",
        },

        # 扫描配置
        "sweep": {
            "parallel_workers": 4,
        },

        # 日志配置
        "logging": {
            "level": "INFO",
            "console_level": "INFO",
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            "file": "logs/ringsim.log",
            "max_size_mb": 10,
            "backup_count": 5,
            "performance_log": True,
        },
    }


def coerce_env_value(raw: str, like: Any) -> Any:
    """
    把环境变量字符串转换为与默认值相同的类型

    Args:
        raw: 环境变量原始值
        like: 该配置项的默认值，None 时按字符串处理

    Returns:
        转换后的值

    Raises:
        ValueError: 无法转换为目标类型
    """
    text = raw.strip()
    if isinstance(like, bool):
        word = text.lower()
        if word in TRUE_WORDS:
            return True
        if word in FALSE_WORDS:
            return False
        raise ValueError(f"无法解析为布尔值: {raw!r}")
    if isinstance(like, int):
        return int(text)
    if isinstance(like, float):
        return float(text)
    return text


def _split(path: str) -> list:
    return path.split(".")


@dataclass
class ConfigManager:
    """配置管理器

    加载顺序（后者覆盖前者）：
    - 内置默认值
    - config/config.{json,yaml,yml}
    - config/config.<ENVIRONMENT>.{json,yaml,yml}
    - RINGSIM_* 环境变量
    """

    config_dir: Path = field(default_factory=lambda: Path("config"))
    environment: str = field(default_factory=lambda: os.getenv("ENVIRONMENT", "development"))
    _config: Dict[str, Any] = field(default_factory=dict, init=False)
    _config_files: Dict[str, Path] = field(default_factory=dict, init=False)

    def __post_init__(self):
        self.config_dir = Path(self.config_dir)
        self._config = default_config()
        for config_file in self._candidate_files():
            self._merge_file(config_file)
        self._apply_env_overrides()

    def _candidate_files(self) -> Iterator[Path]:
        for stem in ("config", f"config.{self.environment}"):
            for suffix in CONFIG_SUFFIXES:
                candidate = self.config_dir / f"{stem}{suffix}"
                if candidate.exists():
                    yield candidate

    def _merge_file(self, config_file: Path) -> None:
        try:
            self.merge_file(config_file)
        except (OSError, ValueError) as e:
            logger.error(f"加载配置文件失败 {config_file}: {e}")

    def merge_file(self, file_path: Union[str, Path]) -> None:
        """
        合并一个额外的配置文件（如命令行 --settings 指定的文件）

        Raises:
            FileNotFoundError: 文件不存在
            ValueError: 后缀不受支持、内容无法解析或顶层不是映射
        """
        config_file = Path(file_path)
        if config_file.suffix not in CONFIG_SUFFIXES:
            raise ValueError(f"不支持的配置文件类型: {config_file.suffix or '(无后缀)'}")
        text = config_file.read_text(encoding="utf-8")
        try:
            if config_file.suffix == ".json":
                data = json.loads(text)
            else:
                data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"YAML 解析失败: {e}") from e
        if not isinstance(data, dict):
            raise ValueError("顶层必须是映射")

        _deep_merge(self._config, data)
        self._config_files[config_file.name] = config_file
        logger.info(f"配置文件已加载: {config_file}")

    def _apply_env_overrides(self) -> None:
        for env_var, config_path in ENV_MAPPINGS.items():
            raw = os.getenv(env_var)
            if raw is None:
                continue
            try:
                value = coerce_env_value(raw, self.get(config_path))
            except ValueError as e:
                logger.warning(f"忽略环境变量 {env_var}: {e}")
                continue
            self.set(config_path, value)
            logger.debug(f"环境变量已加载: {env_var} -> {config_path}")

    @property
    def loaded_files(self) -> Dict[str, Path]:
        """已合并的配置文件（文件名 -> 路径）"""
        return dict(self._config_files)

    def get(self, key: str, default: Any = None) -> Any:
        """获取配置值

        Args:
            key: 点分隔的嵌套键（如 'simulation.dt'）
            default: 键不存在时的返回值
        """
        node: Any = self._config
        for part in _split(key):
            if not isinstance(node, dict) or part not in node:
                return default
            node = node[part]
        return node

    def set(self, key: str, value: Any) -> None:
        """设置配置值（点分隔的嵌套键），中间层不存在时创建"""
        *parents, leaf = _split(key)
        node = self._config
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value
        logger.debug(f"配置已更新: {key} = {value}")

    def get_section(self, section: str) -> Dict[str, Any]:
        """获取配置段"""
        return self._config.get(section, {})

    def save_config(self, file_path: Union[str, Path], format: str = "json") -> None:
        """保存当前配置到文件（json 或 yaml）"""
        file_path = Path(file_path)
        file_path.parent.mkdir(parents=True, exist_ok=True)

        fmt = format.lower()
        if fmt == "json":
            content = json.dumps(self._config, indent=2, ensure_ascii=False)
        elif fmt in ("yaml", "yml"):
            content = yaml.safe_dump(self._config, default_flow_style=False, allow_unicode=True)
        else:
            raise ValueError(f"不支持的格式: {format}")

        file_path.write_text(content, encoding="utf-8")
        logger.info(f"配置已保存到: {file_path}")


def _deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> None:
    """把 update 递归合并进 base，映射逐键合并，其余值直接替换"""
    for key, value in update.items():
        if isinstance(base.get(key), dict) and isinstance(value, dict):
            _deep_merge(base[key], value)
        else:
            base[key] = value


# 全局配置管理器实例
config_manager = ConfigManager()
