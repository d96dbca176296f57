"""
etwist 명령줄 진입점
전기장 스핀-궤도 상태 시뮬레이터

    etwist <command> [--config FILE] [--set key=value]... [--out DIR] [--seed N]
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from dotenv import load_dotenv

from app.config.settings import get_settings
from app.models.errors import EtwistError
from app.models.request import Command
from app.models.response import ErrorDetail
from app.services.experiment_runner import run
from app.shared.constants import SYSTEM_VERSION, ExitCodes
from app.utils.validators import ConfigError, parse_config

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    """인자 파서 구성"""
    parser = argparse.ArgumentParser(
        prog="etwist",
        description="Spectral simulator of electric-field spin-orbit states (figures, voltage, design, sweeps)",
    )
    parser.add_argument("command", choices=[c.value for c in Command], help="실행할 명령")
    parser.add_argument("--config", type=Path, default=None, help="key = value 설정 파일")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="설정 키 재정의 (여러 번 사용 가능)")
    parser.add_argument("--out", type=Path, default=None, help="출력 디렉터리")
    parser.add_argument("--seed", type=int, default=None, help="난수 시드 (rng_seed)")
    parser.add_argument("--alpha", default=None, help="voltage 명령의 발산각 (예: 1deg, 17.45mrad)")
    parser.add_argument("--plot-script", action="store_true", help="CSV마다 matplotlib 스크립트 생성")
    parser.add_argument("--verbose", action="store_true", help="DEBUG 로그 출력")
    parser.add_argument("--version", action="version", version=f"%(prog)s {SYSTEM_VERSION}")
    return parser


def _collect_overrides(args: argparse.Namespace) -> List[str]:
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"rng_seed = {args.seed}")
    if args.alpha is not None:
        overrides.append(f"voltage.alpha = {args.alpha}")
    return overrides


def _read_config(path: Optional[Path]) -> str:
    if path is None:
        return ""
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"설정 파일을 읽을 수 없습니다: {path} ({e.strerror})", field="config", code="CONFIG_NOT_FOUND")


def _report(detail: ErrorDetail) -> int:
    logger.error(f"❌ [{detail.code}] {detail.message}")
    field = f" ({detail.field})" if detail.field else ""
    print(f"etwist: error[{detail.code}]{field}: {detail.message}", file=sys.stderr)
    return detail.exit_status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    CLI 실행

    Returns:
        종료 코드 (0 성공, 2 설정 오류, 3 수치 오류)
    """
    load_dotenv()
    args = build_parser().parse_args(argv)
    settings = get_settings()

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else getattr(logging, settings.log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    try:
        config = parse_config(_read_config(args.config), command=args.command, overrides=_collect_overrides(args))
        out_dir = args.out or config.output_dir or settings.output_dir / config.command.value
        result = run(config, out_dir, plot_script=args.plot_script)
    except ConfigError as e:
        return _report(ErrorDetail(
            code=e.code or "CONFIG_ERROR", message=e.message, field=e.field, exit_status=ExitCodes.CONFIG_ERROR
        ))
    except EtwistError as e:
        return _report(ErrorDetail(
            code=e.code or "NUMERIC_ERROR", message=e.message, field=e.field, exit_status=ExitCodes.NUMERIC_ERROR
        ))
    except (ValueError, ArithmeticError) as e:
        return _report(ErrorDetail(code="NUMERIC_ERROR", message=str(e), exit_status=ExitCodes.NUMERIC_ERROR))

    for path in result.files:
        print(path)
    return ExitCodes.SUCCESS


if __name__ == "__main__":
    sys.exit(main())
