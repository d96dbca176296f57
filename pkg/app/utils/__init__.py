"""
유틸리티 패키지
설정 검증, 단위 별칭, 시간 측정, CSV 작성 헬퍼
"""

from .alias_mapper import UnitAliasMapper
from .validators import ConfigError, ConfigValidator, parse_config
from .time_tracker import TimeTracker, TimeMetrics, PerformanceMonitor

__all__ = [
    "UnitAliasMapper",
    "ConfigError",
    "ConfigValidator",
    "parse_config",
    "TimeTracker",
    "TimeMetrics",
    "PerformanceMonitor",
]
