"""
단계 시간 측정
명령 실행 단계별 소요 시간(provenance.json의 step_times_ms)과 오래 걸리는 수치 계산 경고
"""
import functools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Optional

from app.shared.constants import PerformanceThresholds

logger = logging.getLogger(__name__)


@dataclass
class TimeMetrics:
    """명령 하나의 단계별 소요 시간 (ms)"""
    name: str
    total_ms: float = 0.0
    step_times: Dict[str, float] = field(default_factory=dict)

    @property
    def slowest_step(self) -> Optional[str]:
        if not self.step_times:
            return None
        return max(self.step_times, key=self.step_times.get)


class TimeTracker:
    """
    단계 구분 타이머

    Usage:
        tracker = TimeTracker("figure1").start()
        ...  # 발산 프로파일
        tracker.step("profiles")
        ...  # 깊이 스캔
        tracker.step("depth_scan")
        metrics = tracker.finish()

    step()은 직전 step() (또는 start()) 이후 경과 시간을 그 이름으로 기록한다.
    같은 이름이 반복되면 시간을 더한다 (스윕 점 반복 등).
    """

    def __init__(self, name: str):
        self.name = name
        self._t0: Optional[float] = None
        self._mark: Optional[float] = None
        self._steps: Dict[str, float] = {}

    def start(self) -> "TimeTracker":
        self._t0 = self._mark = time.perf_counter()
        logger.debug(f"⏱️  {self.name} 시작")
        return self

    def _require_started(self) -> float:
        if self._t0 is None:
            raise RuntimeError(f"{self.name}: start() 호출 전입니다")
        return time.perf_counter()

    def step(self, step_name: str) -> float:
        now = self._require_started()
        elapsed = (now - self._mark) * 1000.0
        self._steps[step_name] = self._steps.get(step_name, 0.0) + elapsed
        self._mark = now
        logger.debug(f"📊 {self.name}.{step_name}: {elapsed:.1f}ms")
        return elapsed

    def finish(self) -> TimeMetrics:
        now = self._require_started()
        metrics = TimeMetrics(name=self.name, total_ms=(now - self._t0) * 1000.0, step_times=dict(self._steps))
        slowest = metrics.slowest_step
        detail = f" (최장 단계 {slowest}: {metrics.step_times[slowest]:.1f}ms)" if slowest else ""
        logger.info(f"✅ {self.name} 완료: {metrics.total_ms:.1f}ms{detail}")
        return metrics


class PerformanceMonitor:
    """수치 계산 함수 시간 감시"""

    @staticmethod
    def measure_sync_function(func_name: str):
        """임계값을 넘긴 호출만 로그로 남기는 데코레이터"""
        def decorator(func):
            @functools.wraps(func)
            def wrapper(*args, **kwargs):
                t0 = time.perf_counter()
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    logger.error(f"❌ {func_name} 계산 실패: {e}")
                    raise
                finally:
                    elapsed = (time.perf_counter() - t0) * 1000.0
                    if elapsed > PerformanceThresholds.SLOW_FUNCTION_MS:
                        logger.warning(f"🐌 느린 계산: {func_name} ({elapsed:.0f}ms)")
                    elif elapsed > PerformanceThresholds.WARNING_FUNCTION_MS:
                        logger.info(f"⚠️  {func_name} {elapsed:.0f}ms 소요")
            return wrapper
        return decorator
