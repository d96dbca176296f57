"""
설정 검증 유틸리티 (Validators)
키-값 설정 문서 파싱, RunConfig 검증, 스윕 계획 전개
"""
import hashlib
import json
import logging
import re
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError as PydanticValidationError

from app.models.errors import EtwistError
from app.models.request import Command, RunConfig
from app.utils.alias_mapper import UnitAliasMapper

logger = logging.getLogger(__name__)

_INT = re.compile(r'^[+-]?\d+$')
_FLOAT = re.compile(r'^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$')
_KEY = re.compile(r'^[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*$')

TOP_LEVEL_KEYS = {"command", "rng_seed", "output_dir"}


class ConfigError(EtwistError):
    """설정 오류 (field는 점 표기 키)"""
    pass


class ConfigValidator:
    """설정 문서 검증 클래스"""

    def __init__(self):
        self.unit_mapper = UnitAliasMapper()

    # === 문서 파싱 ===

    def parse_document(self, text: str) -> Dict[str, Any]:
        """
        'key = value' 줄들을 점 표기 키 → 값 딕셔너리로 파싱

        '#' 이후는 주석, 빈 줄은 무시한다.
        """
        entries: Dict[str, Any] = {}
        for lineno, raw_line in enumerate(text.splitlines(), start=1):
            line = self._strip_comment(raw_line).strip()
            if not line:
                continue
            key, value = self.parse_assignment(line, location=f"line {lineno}")
            if key in entries:
                raise ConfigError(f"중복된 키: {key} ({lineno}행)", field=key, code="DUPLICATE_KEY")
            entries[key] = value
        return entries

    def parse_assignment(self, text: str, location: str) -> Tuple[str, Any]:
        """'key = value' 한 항목 파싱"""
        if "=" not in text:
            raise ConfigError(f"{location}: 'key = value' 형식이 아닙니다: {text!r}", field=location, code="MALFORMED_LINE")
        key, value = (part.strip() for part in text.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(f"{location}: 잘못된 키 {key!r}", field=key or location, code="INVALID_KEY")
        if not value:
            raise ConfigError(f"{key}: 값이 비어 있습니다", field=key, code="EMPTY_VALUE")
        return key, self.parse_value(value, key)

    @staticmethod
    def _strip_comment(line: str) -> str:
        quote = None
        for i, ch in enumerate(line):
            if ch in ("'", '"'):
                quote = None if quote == ch else (quote or ch)
            elif ch == "#" and quote is None:
                return line[:i]
        return line

    def parse_value(self, text: str, key: str) -> Any:
        """값 하나 해석 (리스트, 문자열, 불리언, 수, 단위 붙은 수)"""
        text = text.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise ConfigError(f"{key}: 닫히지 않은 리스트", field=key, code="MALFORMED_LIST")
            body = text[1:-1].strip()
            if not body:
                return []
            return [self._parse_scalar(item, key) for item in body.split(",")]
        return self._parse_scalar(text, key)

    def _parse_scalar(self, text: str, key: str) -> Any:
        text = text.strip()
        if not text:
            raise ConfigError(f"{key}: 빈 리스트 항목", field=key, code="EMPTY_VALUE")
        if len(text) >= 2 and text[0] == text[-1] and text[0] in ("'", '"'):
            return text[1:-1]
        lowered = text.lower()
        if lowered in ("true", "false"):
            return lowered == "true"
        if _INT.match(text):
            return int(text)
        if _FLOAT.match(text):
            return float(text)
        quantity = self.unit_mapper.parse_quantity(text)
        if quantity is not None:
            return quantity
        return text

    # === 키 정리 ===

    @staticmethod
    def qualify_key(key: str, command: str) -> str:
        """점 없는 키는 명령 섹션 아래로"""
        if "." in key or key in TOP_LEVEL_KEYS:
            return key
        return f"{command}.{key}"

    @staticmethod
    def nest(entries: Dict[str, Any]) -> Dict[str, Any]:
        """점 표기 키 → 중첩 딕셔너리"""
        root: Dict[str, Any] = {}
        for key in sorted(entries):
            node = root
            parts = key.split(".")
            for part in parts[:-1]:
                child = node.setdefault(part, {})
                if not isinstance(child, dict):
                    raise ConfigError(f"키 충돌: {key}", field=key, code="KEY_CONFLICT")
                node = child
            if isinstance(node.get(parts[-1]), dict):
                raise ConfigError(f"키 충돌: {key}", field=key, code="KEY_CONFLICT")
            node[parts[-1]] = entries[key]
        return root

    # === 검증 ===

    def validate(self, data: Dict[str, Any]) -> RunConfig:
        """중첩 딕셔너리 → RunConfig (pydantic 오류는 ConfigError로 변환)"""
        try:
            config = RunConfig.model_validate(data)
        except PydanticValidationError as exc:
            raise self._convert(exc) from None
        errors = self._validate_command_requirements(config)
        if errors:
            raise errors[0]
        return config

    @staticmethod
    def _convert(exc: PydanticValidationError) -> ConfigError:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first.get("loc", ())) or "config"
        kind = first.get("type", "")
        if kind == "missing":
            code = "MISSING_KEY"
            message = f"{field}: 필수 키가 없습니다"
        elif kind == "extra_forbidden":
            code = "UNKNOWN_KEY"
            message = f"{field}: 알 수 없는 키입니다"
        else:
            code = "INVALID_VALUE"
            message = f"{field}: {first.get('msg', '잘못된 값')}"
        return ConfigError(message, field=field, code=code)

    def _validate_command_requirements(self, config: RunConfig) -> List[ConfigError]:
        """명령별 필수 키 검증"""
        errors = []
        if config.command == Command.VOLTAGE and config.voltage.alpha is None:
            errors.append(ConfigError(
                "voltage.alpha: voltage 명령에는 발산각 alpha가 필요합니다",
                field="voltage.alpha",
                code="MISSING_KEY"
            ))
        if config.command == Command.SWEEP:
            if config.sweep.target is None:
                errors.append(ConfigError(
                    "sweep.target: sweep 명령에는 target이 필요합니다",
                    field="sweep.target",
                    code="MISSING_KEY"
                ))
            elif not config.sweep.axes:
                errors.append(ConfigError(
                    "sweep: 스윕 축(sweep.<키> = [...])이 하나 이상 필요합니다",
                    field="sweep",
                    code="EMPTY_SWEEP"
                ))
        if config.command == Command.FIGURE1 and config.figure1.monte_carlo_rays > 0:
            logger.debug(f"몬테카를로 검증 사용: seed={config.rng_seed}")
        return errors

    # === 스윕 ===

    def expand_sweep(self, config: RunConfig) -> List[Tuple[Dict[str, Any], RunConfig]]:
        """스윕 설정 → (점 재정의, 점 RunConfig) 목록"""
        target = config.sweep.target.value
        base = config.model_dump(mode="json", exclude={"sweep"})
        base["command"] = target
        points = []
        for overrides in config.sweep.plan():
            entries = {self.qualify_key(key, target): value for key, value in overrides.items()}
            data = json.loads(json.dumps(base))
            for key, value in entries.items():
                _assign(data, key, value)
            points.append((entries, self.validate(data)))
        logger.info(f"스윕 계획: 대상 {target}, {len(points)}개 점")
        return points


def _assign(data: Dict[str, Any], dotted: str, value: Any) -> None:
    node = data
    parts = dotted.split(".")
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"키 충돌: {dotted}", field=dotted, code="KEY_CONFLICT")
        node = child
    node[parts[-1]] = value


def parse_config(
    text: str,
    command: Optional[str] = None,
    overrides: Optional[Sequence[str]] = None,
) -> RunConfig:
    """
    설정 문서 파싱 및 검증

    Args:
        text: 키-값 설정 문서
        command: CLI 명령 (문서의 command보다 우선)
        overrides: --set 'key=value' 목록 (문서 값을 덮어씀)

    Returns:
        기본값이 채워진 RunConfig
    """
    validator = ConfigValidator()
    entries = validator.parse_document(text or "")

    command = command or entries.get("command")
    if command is None:
        raise ConfigError("command: 명령이 지정되지 않았습니다", field="command", code="MISSING_KEY")
    command = str(command)
    try:
        Command(command)
    except ValueError:
        raise ConfigError(f"command: 알 수 없는 명령 {command!r}", field="command", code="UNKNOWN_COMMAND") from None

    qualified: Dict[str, Any] = {}
    for key, value in entries.items():
        name = validator.qualify_key(key, command)
        if name in qualified:
            raise ConfigError(f"중복된 키: {name}", field=name, code="DUPLICATE_KEY")
        qualified[name] = value
    for item in overrides or []:
        key, value = validator.parse_assignment(item, location="--set")
        qualified[validator.qualify_key(key, command)] = value
    qualified["command"] = command

    config = validator.validate(validator.nest(qualified))
    logger.debug(f"설정 검증 완료: command={command}, 키 {len(qualified)}개")
    return config


def config_hash(config: RunConfig) -> str:
    """출력 디렉터리를 제외한 정규 JSON의 SHA-256"""
    canonical = json.dumps(
        config.model_dump(mode="json", exclude={"output_dir"}), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
