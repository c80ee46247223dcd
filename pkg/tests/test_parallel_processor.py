"""
线程池任务执行测试
"""

import threading

import pytest

from src.ringsim.tasks.parallel_processor import ParallelProcessor, run_parallel, timed_call


def _square(x):
    return x * x


def _fail(message):
    raise ValueError(message)


class TestTimedCall:
    """单任务执行测试"""

    def test_success(self):
        """测试成功任务记录结果与耗时"""
        result = timed_call("sq", _square, 3)

        assert result.success
        assert result.result == 9
        assert result.execution_time >= 0
        assert result.error is None

    def test_failure_captured(self):
        """测试异常被捕获为错误字符串"""
        result = timed_call("bad", _fail, "boom")

        assert not result.success
        assert result.result is None
        assert result.error == "ValueError: boom"


class TestRunParallel:
    """批量执行测试"""

    @pytest.mark.parametrize("workers", [1, 3])
    def test_results_in_submission_order(self, workers):
        """测试结果按提交顺序返回"""
        tasks = [(f"t{k}", _square, (k,)) for k in range(6)]
        results = run_parallel(tasks, max_workers=workers)

        assert list(results) == [f"t{k}" for k in range(6)]
        assert [r.result for r in results.values()] == [k * k for k in range(6)]

    def test_failure_isolated(self):
        """测试单个任务失败不影响其余任务"""
        tasks = [("ok", _square, (2,)), ("bad", _fail, ("x",)), ("ok2", _square, (5,))]
        results = run_parallel(tasks, max_workers=2)

        assert results["ok"].result == 4
        assert results["ok2"].result == 25
        assert not results["bad"].success

    def test_serial_runs_in_caller_thread(self):
        """测试单线程时在调用线程内执行"""
        caller = threading.get_ident()
        results = run_parallel([("id", threading.get_ident, ())], max_workers=1)

        assert results["id"].result == caller

    def test_duplicate_names_rejected(self):
        """测试任务名称重复"""
        with pytest.raises(ValueError):
            run_parallel([("a", _square, (1,)), ("a", _square, (2,))])

    def test_empty(self):
        """测试空任务列表"""
        assert run_parallel([]) == {}


class TestParallelProcessor:
    """处理器上下文测试"""

    def test_submit_outside_context(self):
        """测试未进入上下文时提交任务"""
        with pytest.raises(RuntimeError):
            ParallelProcessor(max_workers=2).submit_task("x", _square, 1)

    def test_invalid_workers(self):
        """测试非法线程数"""
        with pytest.raises(ValueError):
            ParallelProcessor(max_workers=0)

    def test_collect(self):
        """测试在上下文中提交并收集"""
        with ParallelProcessor(max_workers=2) as processor:
            futures = [processor.submit_task(f"t{k}", _square, k) for k in range(3)]
            results = processor.collect(futures)

        assert [r.result for r in results] == [0, 1, 4]
