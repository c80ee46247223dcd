"""
日志配置和监控模块

负责：
- 结构化日志记录
- 性能指标收集
- 错误追踪
- 扫描运行统计
"""

import functools
import json
import logging
import logging.config
import threading
import time
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config.settings import LoggingSettings


@dataclass
class LogEntry:
    """日志条目数据结构"""
    timestamp: str
    level: str
    message: str
    operation: str
    duration: Optional[float] = None
    scenario: Optional[str] = None
    fleet: Optional[str] = None
    attack: Optional[str] = None
    ticks: Optional[int] = None
    collided: Optional[bool] = None
    error_type: Optional[str] = None
    error_details: Optional[str] = None


def build_logging_config(settings: LoggingSettings) -> Dict[str, Any]:
    """
    根据日志设置生成 dictConfig 配置

    Args:
        settings: 日志设置

    Returns:
        Dict[str, Any]: logging.config.dictConfig 可用的配置字典
    """
    handlers: Dict[str, Any] = {
        "console": {
            "class": "logging.StreamHandler",
            "level": settings.console_level,
            "formatter": "detailed",
        }
    }
    root_handlers = ["console"]
    performance_handlers: List[str] = []

    if settings.file:
        log_file = Path(settings.file)
        handlers["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "level": "DEBUG",
            "formatter": "detailed",
            "filename": str(log_file),
            "maxBytes": settings.max_bytes,
            "backupCount": settings.backup_count,
            "encoding": "utf-8",
        }
        root_handlers.append("file")
        if settings.performance_log:
            handlers["performance"] = {
                "class": "logging.handlers.RotatingFileHandler",
                "level": "INFO",
                "formatter": "json",
                "filename": str(log_file.with_name("performance.log")),
                "maxBytes": settings.max_bytes,
                "backupCount": settings.backup_count,
                "encoding": "utf-8",
            }
            performance_handlers.append("performance")

    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "detailed": {"format": settings.format},
            "json": {"format": "%(message)s"},
        },
        "handlers": handlers,
        "loggers": {
            "": {"handlers": root_handlers, "level": settings.level},
            "performance": {
                "handlers": performance_handlers,
                "level": "INFO",
                "propagate": False,
            },
        },
    }


def setup_logging(settings: Optional[LoggingSettings] = None) -> None:
    """设置日志系统"""
    settings = settings or LoggingSettings()
    if settings.file:
        Path(settings.file).parent.mkdir(parents=True, exist_ok=True)
    logging.config.dictConfig(build_logging_config(settings))


class PerformanceLogger:
    """性能日志记录器，JSON 行写入 performance 日志器"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.performance_logger = logging.getLogger("performance")
        self.metrics: List[Dict[str, Any]] = []
        self._lock = threading.Lock()

    def log_operation_start(self, operation: str, **kwargs) -> float:
        """记录操作开始"""
        entry = LogEntry(
            timestamp=datetime.now().isoformat(),
            level="DEBUG",
            message=f"Starting {operation}",
            operation=operation,
            **kwargs,
        )
        self.logger.debug(json.dumps(asdict(entry), ensure_ascii=False))
        return time.perf_counter()

    def log_operation_end(self, operation: str, start_time: float, **kwargs) -> float:
        """记录操作结束，返回耗时（秒）"""
        duration = time.perf_counter() - start_time
        entry = LogEntry(
            timestamp=datetime.now().isoformat(),
            level="INFO",
            message=f"Completed {operation}",
            operation=operation,
            duration=duration,
            **kwargs,
        )
        self.performance_logger.info(json.dumps(asdict(entry), ensure_ascii=False))

        with self._lock:
            self.metrics.append({"operation": operation, "duration": duration})
        return duration

    def log_error(self, operation: str, error: Exception, **kwargs) -> None:
        """记录错误"""
        entry = LogEntry(
            timestamp=datetime.now().isoformat(),
            level="ERROR",
            message=str(error),
            operation=operation,
            error_type=type(error).__name__,
            error_details=str(error),
            **kwargs,
        )
        self.logger.error(json.dumps(asdict(entry), ensure_ascii=False))

    def get_performance_summary(self) -> Dict[str, Any]:
        """获取性能摘要"""
        with self._lock:
            operations: Dict[str, List[float]] = {}
            for metric in self.metrics:
                operations.setdefault(metric["operation"], []).append(metric["duration"])

        return {
            op: {
                "count": len(durations),
                "total_time": sum(durations),
                "avg_time": sum(durations) / len(durations),
                "min_time": min(durations),
                "max_time": max(durations),
            }
            for op, durations in operations.items()
        }


class RunMetricsCollector:
    """扫描指标收集器（线程安全）"""

    def __init__(self):
        self._lock = threading.Lock()
        self.reset()

    def reset(self) -> None:
        with self._lock:
            self.metrics = {
                "runs": 0,
                "collisions": 0,
                "failures": 0,
                "run_times": [],
            }

    def record_run(self, duration: float, collided: bool) -> None:
        """记录一次完成的仿真"""
        with self._lock:
            self.metrics["runs"] += 1
            self.metrics["collisions"] += int(collided)
            self.metrics["run_times"].append(duration)

    def record_failure(self) -> None:
        with self._lock:
            self.metrics["failures"] += 1

    def get_metrics(self) -> Dict[str, Any]:
        """获取指标"""
        with self._lock:
            metrics_copy = dict(self.metrics)
            times = list(self.metrics["run_times"])

        metrics_copy["run_times"] = times
        if times:
            metrics_copy["avg_run_time"] = sum(times) / len(times)
            metrics_copy["max_run_time"] = max(times)
        return metrics_copy


# 全局实例
performance_logger = PerformanceLogger()


def _describe_call(args) -> Dict[str, Any]:
    """从 SimConfig 参数中提取日志字段"""
    config = args[0] if args else None
    scenario = getattr(config, "scenario", None)
    attack = getattr(config, "attack", None)
    fleet = getattr(config, "fleet_powertrain", None)
    if scenario is None or attack is None or fleet is None:
        return {}
    return {"scenario": scenario.id, "fleet": fleet.value, "attack": attack.label}


def log_performance(func):
    """性能日志装饰器"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        operation_name = func.__name__
        context = _describe_call(args)
        start_time = performance_logger.log_operation_start(operation_name, **context)

        try:
            result = func(*args, **kwargs)
        except Exception as e:
            performance_logger.log_error(operation_name, e, **context)
            raise

        trajectory = getattr(result, "trajectory", None)
        if trajectory is not None:
            context["ticks"] = trajectory.n_ticks
            context["collided"] = result.collided
        performance_logger.log_operation_end(operation_name, start_time, **context)
        return result

    return wrapper
