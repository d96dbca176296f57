"""
공유 상수 정의
물리 상수, 수치 파라미터, 그림 기본값을 중앙 집중 관리
"""
import math

from scipy import constants as _codata

# 시스템 버전 정보
SYSTEM_VERSION = "1.0.0"
OUTPUT_FORMAT_VERSION = "csv-1"


# 물리 상수 (CODATA, SI)
class PhysicalConstants:
    SPEED_OF_LIGHT = _codata.c  # m/s
    NEUTRON_GYROMAGNETIC_RATIO = _codata.physical_constants["neutron gyromag. ratio"][0]  # rad/(s·T)
    NEUTRON_GYROMAGNETIC_RATIO_CHECK = 1.83247e8  # 6자리 검증용
    ANGSTROM = 1e-10  # m


# 성능 임계값 (ms)
class PerformanceThresholds:
    SLOW_FUNCTION_MS = 5000  # 느린 함수 임계값
    WARNING_FUNCTION_MS = 1000  # 경고 함수 임계값


# 수치 허용 오차
class NumericTolerances:
    TAIL_MASS = 1e-10  # OAM 창 밖 잔여 질량
    NORMALIZATION = 1e-10  # 분포 정규화
    NYQUIST_FACTOR = 2.0  # 최대 파수 대비 과표본 배수
    ENERGY_CONSISTENCY = 1e-12  # ε와 k_z² + k_r²의 상대 차이


# 반경 구적 기본값 (복합 가우스-르장드르)
class QuadratureDefaults:
    PANELS = 32
    ORDER = 16
    TAIL_SIGMAS = 10.0  # 가우시안 절단 폭 (표준편차 배수)
    RING_WIDTH_FRACTION = 1e-3  # 델타 링 정규화 폭 / k_ρ
    CDF_POINTS = 20001  # 해석적 누적분포 표본 수


# OAM 창 기본값
class OAMWindowDefaults:
    ELL_MIN = -8
    ELL_MAX = 8
    MAX_HALF_WIDTH = 256  # 자동 확장 상한


# 그림 1: 세로 전송 (무차원 단위)
class Figure1Defaults:
    K_Z = 1.0
    COUPLING = 0.1
    Z_MAX = 8.0e4
    Z_POINTS = 801
    N_PHI = 64  # 창 [−9, 8] 분해에 38개 이상 필요
    RADIAL_PANELS = 24
    RADIAL_ORDER = 16
    TAIL_FRACTION = 0.3  # 후반부 대비 측정 구간


# 그림 2: 스치는 입사 반사
class Figure2Defaults:
    WAVELENGTH = 2.0 * PhysicalConstants.ANGSTROM  # m
    FIELD = 1.0e10  # V/m
    THETA_MIN_DEG = 1.0e-5
    THETA_MAX_DEG = 5.0e-3
    THETA_POINTS = 2000
    EXPECTED_OPTIMUM_DEG = 1.0e-3  # 반전 확률 최대 각도 근처


# 그림 3: 가우시안 파속 OAM 표면
class Figure3Defaults:
    K_Y_MEAN = 1.0
    SIGMA_Y = (0.3, 0.5, 0.7, 0.9)
    R = (0.4, 0.6, 0.8, 1.0, 1.2)
    N_PHI = 512
    RADIAL_PANELS = 64
    RADIAL_ORDER = 16


# 그림 4: 실공간 합성
class Figure4Defaults:
    K_Y_MEAN = 1.0
    SIGMA_Y_SQUARED = 0.1
    R = 1.0
    K_POINTS = 161
    X_EXTENT = 12.0
    X_POINTS = 241


# 빔 트위스터 설계점
class DesignDefaults:
    FIELDS = (1.0e7, 1.0e8)  # V/m
    LENGTHS = (1.0,)  # m
    NOMINAL_AMPLITUDE_RANGE = (0.02, 0.20)  # 1e7 ~ 1e8 V/m, 1 m 기준 반전 진폭


# 몬테카를로 기본값
class MonteCarloDefaults:
    SEED = 20240611
    RAYS = 10_000_000
    CHUNK = 1_000_000


# CLI 종료 코드
class ExitCodes:
    SUCCESS = 0
    CONFIG_ERROR = 2
    NUMERIC_ERROR = 3


DEGREE = math.pi / 180.0
