from typing import Optional, Dict, Any, List
from dataclasses import dataclass, field, asdict
from .config_manager import config_manager

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
TRAJECTORY_FORMATS = ['csv', 'parquet']


@dataclass
class SimulationSettings:
    """仿真默认值"""
    n_vehicles: int = 10
    ring_length: float = 300.0
    vehicle_length: float = 5.0
    dt: float = 1.0 / 30.0
    duration: float = 120.0
    accel_min: float = -10.0
    accel_max: float = 5.0
    phase_edges: List[float] = field(default_factory=lambda: [30.0, 60.0, 90.0, 120.0])
    attack_window: List[float] = field(default_factory=lambda: [60.0, 90.0])

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'SimulationSettings':
        """从配置字典创建设置"""
        return cls(
            n_vehicles=int(config.get('n_vehicles', 10)),
            ring_length=float(config.get('ring_length', 300.0)),
            vehicle_length=float(config.get('vehicle_length', 5.0)),
            dt=float(config.get('dt', 1.0 / 30.0)),
            duration=float(config.get('duration', 120.0)),
            accel_min=float(config.get('accel_min', -10.0)),
            accel_max=float(config.get('accel_max', 5.0)),
            phase_edges=[float(x) for x in config.get('phase_edges', [30.0, 60.0, 90.0, 120.0])],
            attack_window=[float(x) for x in config.get('attack_window', [60.0, 90.0])],
        )


@dataclass
class OutputSettings:
    """输出设置"""
    output_dir: str = "output"
    trajectory_format: str = "csv"
    write_trajectories: bool = True
    plot_data: bool = False
    report_name: str = "report.txt"

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'OutputSettings':
        """从配置字典创建设置"""
        return cls(
            output_dir=str(config.get('output_dir', 'output')),
            trajectory_format=str(config.get('trajectory_format', 'csv')).lower(),
            write_trajectories=bool(config.get('write_trajectories', True)),
            plot_data=bool(config.get('plot_data', False)),
            report_name=str(config.get('report_name', 'report.txt')),
        )


@dataclass
class SweepSettings:
    """扫描设置"""
    parallel_workers: int = 4

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'SweepSettings':
        return cls(parallel_workers=int(config.get('parallel_workers', 4)))


@dataclass
class LoggingSettings:
    """日志设置"""
    level: str = "INFO"
    console_level: str = "INFO"
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    file: str = "logs/ringsim.log"
    max_size_mb: int = 10
    backup_count: int = 5
    performance_log: bool = True

    @property
    def max_bytes(self) -> int:
        return int(self.max_size_mb * 1024 * 1024)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'LoggingSettings':
        """从配置字典创建设置"""
        return cls(
            level=str(config.get('level', 'INFO')).upper(),
            console_level=str(config.get('console_level', config.get('level', 'INFO'))).upper(),
            format=config.get('format', '%(asctime)s - %(name)s - %(levelname)s - %(message)s'),
            file=config.get('file') or "",
            max_size_mb=config.get('max_size_mb', 10),
            backup_count=config.get('backup_count', 5),
            performance_log=bool(config.get('performance_log', True)),
        )


@dataclass
class Settings:
    """应用设置

    包含所有配置模块的设置，提供类型安全的配置访问
    """
    simulation: SimulationSettings
    output: OutputSettings
    sweep: SweepSettings
    logging: LoggingSettings

    @classmethod
    def from_config_manager(cls) -> 'Settings':
        """从配置管理器创建设置"""
        return cls(
            simulation=SimulationSettings.from_config(config_manager.get_section('simulation')),
            output=OutputSettings.from_config(config_manager.get_section('output')),
            sweep=SweepSettings.from_config(config_manager.get_section('sweep')),
            logging=LoggingSettings.from_config(config_manager.get_section('logging')),
        )

    def validate(self) -> bool:
        """验证设置

        Returns:
            设置是否有效
        """
        sim = self.simulation
        if sim.n_vehicles < 1 or sim.ring_length <= 0 or sim.vehicle_length <= 0:
            return False
        if sim.dt <= 0 or sim.duration <= 0:
            return False
        if not sim.accel_min < 0 < sim.accel_max:
            return False
        edges = sim.phase_edges
        if len(edges) != 4 or any(b <= a for a, b in zip(edges, edges[1:])) or edges[0] < 0:
            return False
        if len(sim.attack_window) != 2 or not 0 <= sim.attack_window[0] < sim.attack_window[1]:
            return False

        if self.output.trajectory_format not in TRAJECTORY_FORMATS:
            return False
        if self.sweep.parallel_workers <= 0:
            return False

        if self.logging.level not in LOG_LEVELS or self.logging.console_level not in LOG_LEVELS:
            return False
        if self.logging.max_size_mb <= 0 or self.logging.backup_count < 0:
            return False

        return True

    def to_dict(self) -> Dict[str, Any]:
        """转换为字典"""
        return asdict(self)


# 全局设置实例
_settings: Optional[Settings] = None


def get_settings() -> Settings:
    """获取全局设置实例

    Returns:
        Settings: 应用设置实例
    """
    global _settings
    if _settings is None:
        _settings = Settings.from_config_manager()
        if not _settings.validate():
            raise ValueError("配置验证失败")
    return _settings


def reload_settings() -> Settings:
    """重新加载设置（CLI 覆盖之后调用）

    Returns:
        Settings: 新的设置实例
    """
    global _settings
    _settings = Settings.from_config_manager()
    if not _settings.validate():
        raise ValueError("配置验证失败")
    return _settings
