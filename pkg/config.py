import os
from fractions import Fraction
from logging import DEBUG, INFO

# 2026-10-17 - 제한 카케야 실험실 - 전역 설정 및 상수 정의
# 파일 위치: config.py - v1

# 프로젝트 루트 디렉토리를 기준으로 경로를 설정합니다.
BASE_DIR = os.path.dirname(os.path.abspath(__file__))

APP_NAME = 'restricted-kakeya-lab'
APP_VERSION = '1.0.0'

# === 1. 경로 설정 (Path Settings) ===

# 로그 파일 경로 (logs/lab.log)
LOG_DIR = os.path.join(BASE_DIR, 'logs')
LOG_FILE_NAME = 'lab.log'
LOG_FILE_PATH = os.path.join(LOG_DIR, LOG_FILE_NAME)

# 실험/곡선 결과 기본 출력 디렉토리
DEFAULT_OUTPUT_DIR = os.path.join(BASE_DIR, 'output')


# === 2. 로깅 설정 (Logging Settings) ===

# 로그 레벨: 개발 단계는 DEBUG, CLI 실행 시는 INFO를 기본으로 합니다.
LOG_LEVEL_DEV = DEBUG
LOG_LEVEL_PROD = INFO
LOG_MAX_BYTES = 10 * 1024 * 1024  # 10MB
LOG_BACKUP_COUNT = 3              # 최대 3개 백업 파일 유지


# === 3. 지수 계산 상수 (bounds) ===

P_SAMPLES = 64                    # max over p 검증용 표본 수
CURVE_STEP = Fraction(1, 100)     # 곡선 CSV 기본 s 간격


# === 4. 기하/수치 상수 (geometry, maximal) ===

GRID_FACTOR = 4                   # 격자 크기 h = delta / GRID_FACTOR
MC_MIN_SAMPLES = 1000             # 이보다 적은 Monte Carlo 표본은 거부
PROPGEO_SAMPLES = 20000           # 교집합 통계 기본 표본 수
PROPGEO_PAIRS = 200               # 튜브 쌍 실험 개수
LAMBDA_LEVELS = 64                # 약형 노름 lambda 격자 단계 수
NET_CANDIDATE_FACTOR = 16         # 원(n=2) 후보 점 밀도: 16*pi/delta
NET_MIN_CANDIDATES = 1024
NET_MAX_CANDIDATES = 2 ** 18      # n>=3 후보 수 상한 (메모리/시간 보호)
SPHERE_CANDIDATE_FACTOR = 8       # n>=3 Sobol 후보 수: 8*|S^{n-1}|/delta^{n-1}
UNIT_TOLERANCE = 1e-12            # 방향 벡터 단위 길이 허용 오차
DIAMETER_DIRECT_LIMIT = 2000      # 이 이하의 적중 표본은 pdist 로 직접 지름 계산
WORKERS = 1                       # 방향별 병렬 맵 작업자 수 (1 = 순차)


# === 5. 부시(bush) 상수 ===
# 상수는 실험용 값으로 고정하고 로그로 남깁니다.

BUSH_CONST_C = Fraction(1, 4)     # 핵 공 B(x0, c*lambda) 반지름 계수
BUSH_CONST_B = 4                  # diam(T∩T') <= b*delta/|e-e'| 의 b
BUSH_SEPARATION_FACTOR = 10       # 가지치기 분리 10*delta/lambda
DENSITY_CONSTANT = Fraction(1, 10)
STOPPING_CONSTANT = 4             # m <= C * bound 의 C
ITERATION_CAP_FACTOR = 10         # 반복 상한 = 10 * (정지 한계)


# === 6. 상자 차원 (fractals) ===

COVER_GRID_SHIFTS = (0.0, 0.25, 0.5, 0.75)  # 격자 이동(셀 크기 비율) 중 최소 개수 사용


# === 7. 검증 묶음 (verify suites) ===

PROPGEO_DELTAS = (2.0 ** -5, 2.0 ** -7)
PROPGEO_MAX_SPREAD = 2.0          # 두 delta 사이 상수 비율 허용치
CORDOBA_DELTAS = tuple(2.0 ** -k for k in range(5, 9))
CORDOBA_MAX_SPREAD = 4.0
SUITE_BUSH_DELTA = 2.0 ** -6
SUITE_BUSH_LAMBDA = 0.5


# === 8. 실험 기본 설정값 (Default Experiment Settings) ===
# ExperimentConfig에서 초기값 및 타입 판별에 사용됩니다.
DEFAULT_EXPERIMENT = {
    'n': 2,
    'delta': 0.03125,
    'lambda': 0.5,
    'fractal_kind': 'single_point',
    'fractal_step': 0.25,
    'fractal_ratio': '1/3',
    'fractal_axes': 1,
    'fractal_maps': 2,
    'seed': 7,
    'grid_factor': GRID_FACTOR,
    'assignment_rule': 'nearest',
    'workers': WORKERS,
    'output_dir': 'experiment_output',
}

# 곡선 그림 색상 (파랑 n-s, 검정 전이 경계, 초록 참고선)
CURVE_COLORS = {
    'best': '#333333',
    'n_minus_s': '#007BFF',
    'transferred': '#000000',
    'reference': '#28A745',
}
