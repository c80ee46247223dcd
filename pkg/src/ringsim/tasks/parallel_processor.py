# 并行处理核心模块
# 负责把独立的仿真任务分发到线程池并收集带计时的结果

import concurrent.futures
import logging
import os
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

# 默认最大工作线程数
MAX_WORKERS = 4

Task = Tuple[str, Callable, tuple]


@dataclass
class TaskResult:
    """任务结果数据类"""
    task_name: str
    result: Any
    execution_time: float
    success: bool
    error: Optional[str] = None


def timed_call(task_name: str, func: Callable, *args, **kwargs) -> TaskResult:
    """
    执行单个任务并捕获异常

    异常不会向外抛出，而是以 "类型名: 消息" 的形式写入 TaskResult.error。
    """
    task_start = time.perf_counter()
    try:
        result = func(*args, **kwargs)
    except Exception as e:
        elapsed = time.perf_counter() - task_start
        logger.error(f"任务 '{task_name}' 失败: {e}，耗时: {elapsed:.2f}秒")
        return TaskResult(task_name, None, elapsed, False, f"{type(e).__name__}: {e}")

    elapsed = time.perf_counter() - task_start
    logger.debug(f"任务 '{task_name}' 完成，耗时: {elapsed:.2f}秒")
    return TaskResult(task_name, result, elapsed, True)


class ParallelProcessor:
    """线程池并行处理器（上下文管理器）"""

    def __init__(self, max_workers: Optional[int] = None):
        """
        Args:
            max_workers: 最大工作线程数，默认为 min(4, CPU 核心数 + 4)
        """
        if max_workers is not None and max_workers < 1:
            raise ValueError(f"max_workers 必须 >= 1 (当前 {max_workers})")
        self.max_workers = max_workers or min(MAX_WORKERS, (os.cpu_count() or 1) + 4)
        self.executor: Optional[concurrent.futures.ThreadPoolExecutor] = None
        self.start_time: Optional[float] = None

    def __enter__(self):
        self.executor = concurrent.futures.ThreadPoolExecutor(
            max_workers=self.max_workers, thread_name_prefix="ringsim"
        )
        self.start_time = time.perf_counter()
        logger.debug(f"线程池已启动，工作线程数: {self.max_workers}")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self.executor:
            self.executor.shutdown(wait=True)
            self.executor = None

        total_time = time.perf_counter() - self.start_time if self.start_time else 0
        logger.info(f"并行处理完成，总耗时: {total_time:.2f}秒")

    def submit_task(self, task_name: str, func: Callable, *args, **kwargs) -> concurrent.futures.Future:
        """提交任务，Future 的结果为 TaskResult"""
        if not self.executor:
            raise RuntimeError("并行处理器未初始化")
        logger.debug(f"提交任务: {task_name}")
        return self.executor.submit(timed_call, task_name, func, *args, **kwargs)

    def collect(
        self, futures: List[concurrent.futures.Future], timeout: Optional[float] = None
    ) -> List[Optional[TaskResult]]:
        """
        按提交顺序收集结果

        Args:
            futures: submit_task 返回的 Future 列表
            timeout: 总等待时间（秒），超时后未完成的任务被取消并以 None 占位
        """
        done, pending = concurrent.futures.wait(futures, timeout=timeout)
        if pending:
            logger.warning(f"{len(pending)} 个任务在 {timeout} 秒内未完成，已取消")
            for future in pending:
                future.cancel()
        return [future.result() if future in done else None for future in futures]


def run_serial(tasks: Sequence[Task]) -> Dict[str, TaskResult]:
    """在当前线程依次执行任务"""
    return {name: timed_call(name, func, *args) for name, func, args in tasks}


def run_parallel(tasks: Sequence[Task], max_workers: int = MAX_WORKERS) -> Dict[str, TaskResult]:
    """
    执行一组相互独立的任务

    max_workers 为 1 时不创建线程池。

    Args:
        tasks: (任务名称, 函数, 位置参数) 列表，名称必须唯一
        max_workers: 最大工作线程数

    Returns:
        任务名称 -> 任务结果，按提交顺序排列；超时未完成的任务不出现在结果中
    """
    names = [name for name, _, _ in tasks]
    if len(set(names)) != len(names):
        raise ValueError("任务名称必须唯一")
    if not tasks:
        return {}
    if max_workers <= 1:
        return run_serial(tasks)

    with ParallelProcessor(max_workers=min(max_workers, len(tasks))) as processor:
        futures = [processor.submit_task(name, func, *args) for name, func, args in tasks]
        results = processor.collect(futures)
    return {result.task_name: result for result in results if result is not None}
