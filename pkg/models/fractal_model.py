import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from config import COVER_GRID_SHIFTS, GRID_FACTOR, WORKERS
from models.base_model import BaseModel, DomainError, PreconditionError
from models.geometry_model import SphericalNet, Tube, VoxelSet, rasterize_tubes, tube_cells
from models.maximal_model import MidpointSet
from utils.logger import setup_logger
from utils.number_format import parse_fraction

# 2026-10-17 - 제한 카케야 실험실 - 중점 집합 생성기와 상자 차원 추정
# 파일 위치: models/fractal_model.py - v1
# 목적: 지정된 상자 차원의 A 생성, 덮개 수/차원 적합, A-제한 카케야 합집합 구성

LOGGER = setup_logger()

MAX_GENERATED_POINTS = 2 ** 20


class FractalKind(str, Enum):
    SINGLE_POINT = 'single_point'
    LATTICE = 'lattice'
    CANTOR_PRODUCT = 'cantor_product'
    RANDOM_SELF_SIMILAR = 'random_self_similar'


class AssignmentRule(str, Enum):
    NEAREST = 'nearest'
    RANDOM = 'random'
    ADVERSARIAL = 'adversarial'


@dataclass(frozen=True)
class FractalSpec:
    """
    중점 집합 A 의 생성 규칙.
    - single_point: 상자 중심 한 점 (차원 0)
    - lattice(step): 간격 step 의 격자 (유한 집합, 차원 0)
    - cantor_product(ratio, axes): axes 개 좌표가 비율 ratio 의 2-조각 칸토어 집합
      (차원 axes * log 2 / log(1/ratio)), 나머지 좌표는 상자 중심
    - random_self_similar(maps, ratio, seed): 임의 평행이동을 가진 m 개 닮음 사상의
      끌개 (겹침이 없을 때 차원 log m / log(1/ratio), n 으로 절단)
    """
    kind: FractalKind
    n: int = 2
    step: float = 0.25
    ratio: Fraction = Fraction(1, 3)
    axes: int = 1
    maps: int = 2
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'kind', FractalKind(self.kind))
        object.__setattr__(self, 'ratio', parse_fraction(self.ratio))
        if self.n < 1:
            raise DomainError(f"ambient dimension must be >= 1, got {self.n}")
        if self.kind == FractalKind.LATTICE and not (0 < self.step <= 1):
            raise DomainError(f"lattice step must lie in (0, 1], got {self.step}")
        if self.kind == FractalKind.CANTOR_PRODUCT:
            if not (0 < self.ratio < Fraction(1, 2)):
                raise DomainError(f"Cantor ratio must lie in (0, 1/2), got {self.ratio}")
            if not (1 <= self.axes <= self.n):
                raise DomainError(f"Cantor axes must lie in [1, {self.n}], got {self.axes}")
        if self.kind == FractalKind.RANDOM_SELF_SIMILAR:
            if not (0 < self.ratio < 1):
                raise DomainError(f"similarity ratio must lie in (0, 1), got {self.ratio}")
            if self.maps < 1:
                raise DomainError(f"need at least one similarity map, got {self.maps}")

    def similarity_dimension(self) -> float:
        if self.kind in (FractalKind.SINGLE_POINT, FractalKind.LATTICE):
            return 0.0
        if self.kind == FractalKind.CANTOR_PRODUCT:
            return self.axes * math.log(2) / math.log(1 / float(self.ratio))
        return min(float(self.n), math.log(self.maps) / math.log(1 / float(self.ratio)))

    @property
    def target_dim(self) -> float:
        return self.similarity_dimension()


@dataclass(frozen=True)
class DimensionFit(BaseModel):
    scales: Tuple[float, ...]
    counts: Tuple[int, ...]
    slope: float
    intercept: float
    r2: float

    FIELDS = ['delta', 'count']

    def rows(self) -> List[dict]:
        return [{'delta': d, 'count': c} for d, c in zip(self.scales, self.counts)]

    def summary(self) -> str:
        return f"slope={self.slope:.6f} r2={self.r2:.6f} scales={len(self.scales)}"


# --- 1. 생성기 ---

def _unit_bbox(n: int) -> Tuple[np.ndarray, np.ndarray]:
    return np.zeros(n), np.ones(n)


def _cantor_centers(ratio: float, level: int) -> np.ndarray:
    """ level 단계 구간들의 중심 (구간 경계에서 떨어진 대표점) """
    lefts = np.zeros(1)
    length = 1.0
    for _ in range(level):
        lefts = np.concatenate([lefts, lefts + length * (1 - ratio)])
        length *= ratio
    return np.sort(lefts + length / 2)


def _level_for(delta: float, ratio: float) -> int:
    return max(0, int(math.ceil(math.log(1 / delta) / math.log(1 / ratio) - 1e-9)))


def generate(spec: FractalSpec, delta: float, bbox=None) -> MidpointSet:
    """
    delta 해상도의 유한 근사. 단위 상자 [0,1]^n 에서 만든 뒤 bbox 로 평행이동/확대합니다.
    """
    if not (0 < delta < 1):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    n = spec.n
    lower, upper = _unit_bbox(n) if bbox is None else (np.asarray(bbox[0], float), np.asarray(bbox[1], float))

    if spec.kind == FractalKind.SINGLE_POINT:
        unit = np.full((1, n), 0.5)
    elif spec.kind == FractalKind.LATTICE:
        ticks = np.arange(int(math.floor(1 / spec.step + 1e-9)) + 1) * spec.step
        mesh = np.meshgrid(*([ticks] * n), indexing='ij')
        unit = np.stack([m.ravel() for m in mesh], axis=1)
    elif spec.kind == FractalKind.CANTOR_PRODUCT:
        level = _level_for(delta, float(spec.ratio))
        if 2 ** (level * spec.axes) > MAX_GENERATED_POINTS:
            raise DomainError(f"Cantor product would generate {2 ** (level * spec.axes)} points")
        centers = _cantor_centers(float(spec.ratio), level)
        mesh = np.meshgrid(*([centers] * spec.axes), indexing='ij')
        unit = np.full((mesh[0].size, n), 0.5)
        for axis in range(spec.axes):
            unit[:, axis] = mesh[axis].ravel()
    else:
        ratio = float(spec.ratio)
        level = _level_for(delta, ratio)
        if spec.maps ** level > MAX_GENERATED_POINTS:
            raise DomainError(f"self-similar set would generate {spec.maps ** level} points")
        rng = np.random.default_rng(spec.seed)
        offsets = rng.uniform(0, 1 - ratio, (spec.maps, n))
        unit = np.full((1, n), 0.5)
        for _ in range(level):
            unit = np.concatenate([ratio * unit + b for b in offsets])

    points = lower + unit * (upper - lower)
    LOGGER.debug(f"Generated {spec.kind.value} midpoint set: {len(points)} points at delta={delta}.")
    return MidpointSet(points=points, declared_dim=spec.similarity_dimension())


def points_of_voxels(g: VoxelSet) -> MidpointSet:
    """ 점유 셀 중심을 점 집합으로 (상자 세기용) """
    points = g.occupied_points()
    if len(points) == 0:
        raise PreconditionError("voxel set is empty")
    return MidpointSet(points=points, declared_dim=g.n)


# --- 2. 덮개 수와 차원 적합 ---

def covering_number(A: MidpointSet, delta: float) -> int:
    """
    변 delta/sqrt(n) (지름 delta) 격자의 점유 셀 수를 COVER_GRID_SHIFTS 만큼 대각으로
    이동시킨 격자들 중 최솟값으로 N_delta 를 대신합니다 (N_delta <= 값 <= 3^n N_delta).
    """
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    points = A.points
    side = delta / math.sqrt(A.n)
    base = points.min(axis=0)
    best = None
    for shift in COVER_GRID_SHIFTS:
        cells = np.floor((points - base) / side + shift).astype(np.int64)
        count = len(np.unique(cells, axis=0))
        best = count if best is None else min(best, count)
    return int(best)


def empirical_dimension(A: MidpointSet, delta: float) -> float:
    """ s_delta = log N_delta(A) / log(1/delta) """
    if not (0 < delta < 1):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    return math.log(covering_number(A, delta)) / math.log(1 / delta)


def box_dimension_fit(A: MidpointSet, scales: Sequence[float]) -> DimensionFit:
    """ log N_delta 대 log(1/delta) 의 최소제곱 기울기 """
    scales = [float(d) for d in scales]
    if len(scales) < 3:
        raise DomainError(f"box-dimension fit needs at least 3 scales, got {len(scales)}")
    counts = [covering_number(A, d) for d in scales]
    fit = stats.linregress(np.log(1 / np.array(scales)), np.log(np.array(counts, dtype=float)))
    result = DimensionFit(scales=tuple(scales), counts=tuple(counts), slope=float(fit.slope),
                          intercept=float(fit.intercept), r2=float(fit.rvalue ** 2))
    LOGGER.info(f"Box-dimension fit over {len(scales)} scales: {result.summary()}")
    return result


# --- 3. A-제한 카케야 합집합 ---

def _nearest_to_reference(points: np.ndarray, reference: np.ndarray) -> int:
    # 거리 오름차순, 동률은 좌표 사전순
    distances = np.linalg.norm(points - reference, axis=1)
    keys = [points[:, k] for k in reversed(range(points.shape[1]))] + [distances]
    return int(np.lexsort(keys)[0])


def assign_midpoints(A: MidpointSet, net: SphericalNet, delta: float, rule: AssignmentRule,
                     seed: int = 0, grid: Optional[VoxelSet] = None) -> np.ndarray:
    """ 방향마다 A 의 점 번호 a(e) 를 고릅니다. """
    rule = AssignmentRule(rule)
    count = len(net)
    if rule == AssignmentRule.NEAREST:
        return np.full(count, _nearest_to_reference(A.points, np.zeros(A.n)), dtype=np.intp)
    if rule == AssignmentRule.RANDOM:
        return np.random.default_rng(seed).integers(0, len(A), count).astype(np.intp)

    # adversarial: 이미 그린 합집합과 가장 많이 겹치는 중점을 차례로 고릅니다 (측도를 줄이는 방향).
    if grid is None:
        raise PreconditionError("adversarial assignment needs the target grid")
    occupancy = grid.occupancy.reshape(-1).copy()
    choice = np.empty(count, dtype=np.intp)
    for i, e in enumerate(net.vectors):
        best, best_overlap, best_cells = 0, -1, None
        for j, a in enumerate(A.points):
            cells = tube_cells(Tube(e, a, delta), grid)
            overlap = int(occupancy[cells.indices].sum())
            if overlap > best_overlap:
                best, best_overlap, best_cells = j, overlap, cells
        choice[i] = best
        occupancy[best_cells.indices] = True
    return choice


def default_kakeya_bbox(A: MidpointSet, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    reach = 0.5 + 2 * delta
    return A.points.min(axis=0) - reach, A.points.max(axis=0) + reach


def build_restricted_kakeya(A: MidpointSet, net: SphericalNet, delta: float, bbox=None,
                            h: Optional[float] = None, rule: AssignmentRule = AssignmentRule.NEAREST,
                            seed: int = 0, workers: int = WORKERS) -> VoxelSet:
    """
    각 방향 e 에 a(e) in A 를 배정하고 T^delta_e(a(e)) 들의 합집합을 래스터화합니다.
    상자를 벗어나는 부분은 잘라내고 경고합니다.
    """
    if len(A) == 0:
        raise PreconditionError("A must be nonempty")
    lower, upper = default_kakeya_bbox(A, delta) if bbox is None else bbox
    grid = VoxelSet.empty(lower, upper, h or delta / GRID_FACTOR)
    index = assign_midpoints(A, net, delta, rule, seed, grid)
    tubes = [Tube(e, A.points[i], delta) for e, i in zip(net.vectors, index)]
    rasterize_tubes(tubes, grid, workers)
    LOGGER.info(f"Restricted Kakeya union ({AssignmentRule(rule).value}): {len(tubes)} tubes, "
                f"measure {grid.measure():.6g}.")
    return grid
