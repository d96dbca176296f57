"""
예외 클래스 정의
물리 계산, 변환, 분석 단계에서 발생하는 오류
"""
from typing import Optional


class EtwistError(Exception):
    """시뮬레이터 기본 예외"""

    def __init__(self, message: str, field: Optional[str] = None, code: Optional[str] = None):
        self.message = message
        self.field = field
        self.code = code
        super().__init__(message)


class PhysicsDomainError(EtwistError):
    """물리적으로 허용되지 않는 입력 (α ≤ 0, θ 범위 밖 등)"""
    pass


class SingularityError(EtwistError):
    """분모가 0이 되는 퇴화 입력"""
    pass


class AliasingError(EtwistError):
    """요청한 OAM 창에 비해 φ 표본이 부족함"""
    pass


class ResolutionError(EtwistError):
    """격자가 표현 가능한 대역폭을 벗어남"""
    pass


class UndefinedDistributionError(EtwistError):
    """전체 노름이 0인 OAM 분포"""
    pass


class EmptyProfileError(EtwistError):
    """비어 있는 발산 프로파일"""
    pass
