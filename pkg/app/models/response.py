"""
결과 모델 정의
CSV 결과 표와 provenance 사이드카
"""
from datetime import datetime
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class ErrorDetail(BaseModel):
    """에러 상세 정보"""
    code: str
    message: str
    field: Optional[str] = None
    exit_status: int


class ColumnSpec(BaseModel):
    """열 이름과 단위"""
    name: str
    unit: str = Field(..., min_length=1, description="무차원이면 '1'")

    @property
    def header(self) -> str:
        return f"{self.name}[{self.unit}]"


class ResultTable(BaseModel):
    """한 파일에 쓰는 결과 표"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    name: str = Field(..., description="파일 이름 (확장자 제외)")
    columns: List[ColumnSpec]
    rows: np.ndarray

    @field_validator("rows", mode="before")
    @classmethod
    def as_2d_array(cls, v: Any) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.ndim == 1:
            arr = arr[None, :]
        return arr

    @model_validator(mode="after")
    def validate_shape(self) -> "ResultTable":
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError(
                f"{self.name}: 열 수 {len(self.columns)}와 데이터 형상 {self.rows.shape}이 다릅니다"
            )
        if not np.all(np.isfinite(self.rows)):
            raise ValueError(f"{self.name}: 유한하지 않은 값이 있습니다")
        return self

    @classmethod
    def from_columns(cls, name: str, columns: List[ColumnSpec], *data) -> "ResultTable":
        """열 배열들로부터 생성"""
        return cls(name=name, columns=columns, rows=np.column_stack([np.ravel(d) for d in data]))


class Provenance(BaseModel):
    """실행 출처 정보 (provenance.json)"""
    command: str
    config_hash: str
    code_version: str
    output_format: str
    rng_seed: int
    timestamp: datetime
    files: List[str] = Field(default_factory=list)
    summary: Dict[str, float] = Field(default_factory=dict)
    step_times_ms: Dict[str, float] = Field(default_factory=dict)
