import logging

import pytest

from app.utils.time_tracker import PerformanceMonitor, TimeTracker


def test_steps_accumulate():
    tracker = TimeTracker("figure2").start()
    tracker.step("scan")
    tracker.step("write")
    tracker.step("scan")
    metrics = tracker.finish()
    assert set(metrics.step_times) == {"scan", "write"}
    assert all(ms >= 0 for ms in metrics.step_times.values())
    assert metrics.total_ms >= sum(metrics.step_times.values())
    assert metrics.slowest_step in metrics.step_times


def test_step_before_start():
    with pytest.raises(RuntimeError):
        TimeTracker("design").step("design")


def test_monitor_logs_failure(caplog):
    @PerformanceMonitor.measure_sync_function("broken")
    def broken():
        raise ValueError("nan")

    with caplog.at_level(logging.ERROR), pytest.raises(ValueError):
        broken()
    assert "broken" in caplog.text
