"""文件输出管理模块

负责：
- 输出目录布局
- 轨迹 CSV / Parquet 导出
- 绘图数据序列导出
- 配置回显与报告保存
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import polars as pl

from .scenarios.engine import RunResult, Trajectory

logger = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["t", "vehicle_id", "position_m", "speed_mps", "gap_m", "accel_mps2"]
PLOT_SERIES = {"speed": "speeds", "gap": "gaps"}
PLOT_DATA_DIR = "plot_data"
TRAJECTORY_DIR = "trajectories"


def format_time(t: float) -> str:
    return f"{t:.3f}"


def format_value(x: float) -> str:
    """6 位有效数字，负零归一为 0"""
    return f"{x + 0.0:.6g}"


def trajectory_frame(trajectory: Trajectory) -> pl.DataFrame:
    """
    轨迹转换为长表，按 (t, vehicle_id) 排序

    Args:
        trajectory: 仿真轨迹

    Returns:
        pl.DataFrame: 每行一个 (tick, 车辆)，数值列为浮点
    """
    n_ticks, n_vehicles = trajectory.n_ticks, trajectory.n_vehicles
    return pl.DataFrame(
        {
            "t": np.repeat(trajectory.times, n_vehicles),
            "vehicle_id": np.tile(np.arange(n_vehicles, dtype=np.int64), n_ticks),
            "position_m": trajectory.positions.ravel(),
            "speed_mps": trajectory.speeds.ravel(),
            "gap_m": trajectory.gaps.ravel(),
            "accel_mps2": trajectory.accels.ravel(),
        }
    )


def _formatted_frame(trajectory: Trajectory) -> pl.DataFrame:
    frame = trajectory_frame(trajectory)
    return pl.DataFrame(
        {
            "t": [format_time(t) for t in frame["t"].to_list()],
            "vehicle_id": [str(k) for k in frame["vehicle_id"].to_list()],
            **{
                column: [format_value(x) for x in frame[column].to_list()]
                for column in TRAJECTORY_COLUMNS[2:]
            },
        }
    )


def emit_trajectory_csv(result: RunResult, path: Union[str, Path]) -> Path:
    """
    写出轨迹 CSV

    表头 t,vehicle_id,position_m,speed_mps,gap_m,accel_mps2；
    t 保留 3 位小数，其余数值 6 位有效数字；相同输入字节级一致。

    Args:
        result: 仿真结果
        path: 输出文件路径

    Returns:
        Path: 写出的文件路径
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _formatted_frame(result.trajectory).write_csv(path, line_terminator="\n")
    logger.debug(f"轨迹 CSV 已写出: {path}")
    return path


def emit_trajectory_parquet(result: RunResult, path: Union[str, Path]) -> Path:
    """写出数值型 Parquet 轨迹（未经格式化）"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trajectory_frame(result.trajectory).write_parquet(path)
    logger.debug(f"轨迹 Parquet 已写出: {path}")
    return path


def emit_plot_data(result: RunResult, directory: Union[str, Path]) -> List[Path]:
    """
    为每辆车写出 (t, value) 两列序列，供外部绘图工具使用

    目录结构：<directory>/<series>_v<id>.csv，series 为 speed 与 gap。

    Args:
        result: 仿真结果
        directory: 输出目录

    Returns:
        List[Path]: 写出的文件列表
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    trajectory = result.trajectory
    times = [format_time(t) for t in trajectory.times]
    written = []
    for series, attribute in PLOT_SERIES.items():
        values = getattr(trajectory, attribute)
        for vehicle in range(trajectory.n_vehicles):
            path = directory / f"{series}_v{vehicle}.csv"
            pl.DataFrame(
                {"t": times, "value": [format_value(x) for x in values[:, vehicle]]}
            ).write_csv(path, line_terminator="\n")
            written.append(path)
    logger.debug(f"绘图数据已写出: {directory} ({len(written)} 个文件)")
    return written


class OutputManager:
    """单次仿真或扫描的输出目录管理"""

    def __init__(self, output_dir: Union[str, Path], trajectory_format: str = "csv"):
        if trajectory_format not in ("csv", "parquet"):
            raise ValueError(f"不支持的轨迹格式: {trajectory_format}")
        self.output_dir = Path(output_dir)
        self.trajectory_format = trajectory_format
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def trajectory_path(self, run_name: str) -> Path:
        return self.output_dir / TRAJECTORY_DIR / f"{run_name}.{self.trajectory_format}"

    def plot_data_dir(self, run_name: str) -> Path:
        return self.output_dir / PLOT_DATA_DIR / run_name

    def save_trajectory(self, result: RunResult, run_name: str) -> Path:
        """按配置格式保存轨迹"""
        path = self.trajectory_path(run_name)
        if self.trajectory_format == "parquet":
            return emit_trajectory_parquet(result, path)
        return emit_trajectory_csv(result, path)

    def save_plot_data(self, result: RunResult, run_name: str) -> List[Path]:
        return emit_plot_data(result, self.plot_data_dir(run_name))

    def save_text(self, name: str, content: str) -> Path:
        """保存文本文件（报告、配置回显）"""
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding="utf-8", newline="\n")
        logger.info(f"文件已保存: {path}")
        return path

    def save_json(self, name: str, data: Dict) -> Path:
        return self.save_text(name, json.dumps(data, indent=2, ensure_ascii=False, sort_keys=True) + "\n")
