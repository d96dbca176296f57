"""
단위 별칭 매퍼 (Unit Alias Mapper)
설정 값의 단위 접미사(deg, °, mrad, mm, Å ...)를 SI 배율로 해석
"""
import logging
import math
import re
from typing import Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r'^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(\S*)\s*$')


class UnitAliasMapper:
    """단위 별칭 관리 클래스"""

    def __init__(self):
        # 각도 → rad
        self._angle_aliases: Dict[str, float] = {
            "rad": 1.0,
            "mrad": 1e-3,
            "urad": 1e-6,
            "µrad": 1e-6,
            "μrad": 1e-6,
            "deg": math.pi / 180.0,
            "degree": math.pi / 180.0,
            "degrees": math.pi / 180.0,
            "°": math.pi / 180.0,
        }
        # 길이 → m
        self._length_aliases: Dict[str, float] = {
            "m": 1.0,
            "mm": 1e-3,
            "um": 1e-6,
            "µm": 1e-6,
            "nm": 1e-9,
            "A": 1e-10,
            "Å": 1e-10,
        }

    def get_supported_aliases(self) -> List[str]:
        """지원되는 모든 접미사"""
        return sorted(set(self._angle_aliases) | set(self._length_aliases))

    def resolve_alias(self, suffix: str) -> Optional[Tuple[str, float]]:
        """
        접미사를 (차원, 배율)로 해석

        Returns:
            ("angle" | "length", SI 배율) 또는 알 수 없으면 None
        """
        if suffix in self._angle_aliases:
            return "angle", self._angle_aliases[suffix]
        if suffix in self._length_aliases:
            return "length", self._length_aliases[suffix]
        return None

    def validate_alias(self, suffix: str) -> bool:
        """접미사가 유효한지 검증"""
        return self.resolve_alias(suffix) is not None

    def parse_quantity(self, text: str) -> Optional[float]:
        """
        '1deg', '0.5 mrad', '2Å' 같은 값을 SI 실수로 변환

        Returns:
            변환된 값, 숫자+접미사 형식이 아니면 None
        """
        match = _NUMBER.match(text)
        if not match:
            return None
        number, suffix = match.groups()
        if not suffix:
            return float(number)
        resolved = self.resolve_alias(suffix)
        if resolved is None:
            return None
        kind, factor = resolved
        value = float(number) * factor
        logger.debug(f"단위 해석: {text!r} → {value!r} ({kind})")
        return value
