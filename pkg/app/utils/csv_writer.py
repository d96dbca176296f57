"""
CSV 결과 파일 작성
'#' 메타데이터 머리말 + 헤더 한 줄 + '%.12e' 본문 (타임스탬프는 provenance.json에만)
"""
import logging
from pathlib import Path
from typing import Sequence

import numpy as np

from app.models.response import Provenance, ResultTable
from app.shared.constants import OUTPUT_FORMAT_VERSION, SYSTEM_VERSION

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"
PROVENANCE_FILE = "provenance.json"

_PLOT_TEMPLATE = '''"""{name}.csv 플롯 (생성된 스크립트)"""
import sys

import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else "{name}.csv"
data = np.loadtxt(path, delimiter=",", comments="#", skiprows={skip}, ndmin=2)
headers = {headers!r}

fig, ax = plt.subplots()
for j in range(1, data.shape[1]):
    ax.plot(data[:, 0], data[:, j], label=headers[j])
ax.set_xlabel(headers[0])
ax.legend()
fig.savefig("{name}.png", dpi=150)
'''


def preamble_lines(table: ResultTable, config_hash: str) -> Sequence[str]:
    """'#' 메타데이터 줄"""
    units = ",".join(f"{col.name}={col.unit}" for col in table.columns)
    return [
        f"# format: {OUTPUT_FORMAT_VERSION}",
        f"# code_version: {SYSTEM_VERSION}",
        f"# config_hash: {config_hash}",
        f"# table: {table.name}",
        f"# units: {units}",
    ]


def write_table(table: ResultTable, out_dir: Path, config_hash: str) -> Path:
    """
    결과 표 하나를 CSV로 기록

    Args:
        table: 결과 표
        out_dir: 출력 디렉터리 (없으면 생성)
        config_hash: 검증된 설정의 SHA-256

    Returns:
        작성된 파일 경로
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{table.name}.csv"
    headers = ",".join(col.header for col in table.columns)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in preamble_lines(table, config_hash):
            fh.write(line + "\n")
        np.savetxt(fh, table.rows, fmt=FLOAT_FORMAT, delimiter=",", header=headers, comments="")
    logger.debug(f"CSV 작성: {path} ({table.rows.shape[0]}행 × {table.rows.shape[1]}열)")
    return path


def write_plot_script(table: ResultTable, out_dir: Path) -> Path:
    """matplotlib 플롯 스크립트를 CSV 옆에 기록 (패키지에서 import하지 않음)"""
    path = Path(out_dir) / f"plot_{table.name}.py"
    skip = len(preamble_lines(table, "")) + 1
    script = _PLOT_TEMPLATE.format(
        name=table.name, skip=skip, headers=[col.header for col in table.columns]
    )
    path.write_text(script, encoding="utf-8")
    return path


def write_provenance(provenance: Provenance, out_dir: Path) -> Path:
    """provenance.json 사이드카 기록"""
    path = Path(out_dir) / PROVENANCE_FILE
    path.write_text(provenance.model_dump_json(indent=2), encoding="utf-8")
    logger.debug(f"provenance 작성: {path}")
    return path


def read_table(path: Path) -> np.ndarray:
    """작성한 CSV의 본문만 다시 읽기"""
    return np.loadtxt(path, delimiter=",", comments="#", ndmin=2, dtype=str)[1:].astype(float)
