import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import signal, stats

from config import LAMBDA_LEVELS, WORKERS, GRID_FACTOR
from models.base_model import BaseModel, DomainError, PreconditionError
from models.geometry_model import (
    SphericalNet, Tube, VoxelSet, fold_antipodal, greedy_net, map_in_slots,
    pairwise_direction_distances, pairwise_overlap_sum, tube_cells, tube_volume,
)
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - 제한/비제한 카케야 최대함수
# 파일 위치: models/maximal_model.py - v1
# 목적: 복셀 집합 위 최대함수 프로파일, 레벨셋 측도, 약형 노름, 튜브 합 노름

LOGGER = setup_logger()


@dataclass(frozen=True, eq=False)
class MidpointSet:
    """ 중점 집합 A (delta 해상도 근사)와 선언된 상자 차원 s """
    points: np.ndarray
    declared_dim: Union[Fraction, float] = 0

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        if points.size == 0:
            raise PreconditionError("midpoint set A must be nonempty")
        object.__setattr__(self, 'points', points)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def n(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True, eq=False)
class MaximalProfile:
    """
    넷의 각 방향 e 에 대한 최대함수 값 (측도의 비율이므로 [0, 1]).
    midpoint_index 는 제한 프로파일에서 최댓값을 준 A 의 점 번호입니다.
    """
    net: SphericalNet
    values: np.ndarray
    delta: float
    restricted_to: Optional[MidpointSet] = None
    midpoint_index: Optional[np.ndarray] = None

    def argmax_midpoints(self) -> np.ndarray:
        if self.restricted_to is None or self.midpoint_index is None:
            raise PreconditionError("only restricted profiles carry midpoints")
        return self.restricted_to.points[self.midpoint_index]


@dataclass(frozen=True)
class LevelSetReport(BaseModel):
    lam: float
    direction_count: int
    measure_estimate: float

    FIELDS = ['lambda', 'direction_count', 'measure_estimate']

    def to_record(self):
        return {'lambda': self.lam, 'direction_count': self.direction_count,
                'measure_estimate': self.measure_estimate}


@dataclass(frozen=True)
class WeakNormReport(BaseModel):
    delta: float
    norm: float
    lambda_star: float
    normalized: float = math.nan

    FIELDS = ['delta', 'norm', 'lambda_star', 'normalized']

    def to_record(self):
        return {name: getattr(self, name) for name in self.FIELDS}


# --- 1. 튜브 평균 ---

def tube_ratio(E: VoxelSet, t: Tube) -> float:
    """ |E ∩ T| / |T| 의 복셀 근사 (분모는 격자 밖 셀까지 포함) """
    cells = tube_cells(t, E)
    if cells.total == 0:
        return 0.0
    return float(E.occupancy.reshape(-1)[cells.indices].sum()) / cells.total


def _require_grid(E: VoxelSet, delta: float):
    if E.h > delta / GRID_FACTOR * (1 + 1e-12):
        raise PreconditionError(f"grid too coarse for maximal functions: h={E.h} > delta/{GRID_FACTOR}")


def _require_net(net: SphericalNet, delta: float):
    if not math.isclose(net.separation, delta, rel_tol=1e-9):
        raise PreconditionError(f"net separation {net.separation} differs from delta={delta}")


# --- 2. 프로파일 ---

def restricted_maximal_profile(E: VoxelSet, A: MidpointSet, delta: float, net: SphericalNet,
                               workers: int = WORKERS) -> MaximalProfile:
    """
    K*_{delta,A} chi_E (e) = max_{a in A} |E ∩ T^delta_e(a)| / |T^delta_e(a)|
    """
    if A is None or len(A) == 0:
        raise PreconditionError("restricted maximal function needs a nonempty A")
    _require_grid(E, delta)
    _require_net(net, delta)

    points = A.points

    def per_direction(i: int) -> Tuple[float, int]:
        e = net.vectors[i]
        ratios = [tube_ratio(E, Tube(e, a, delta)) for a in points]
        best = int(np.argmax(ratios))
        return ratios[best], best

    results = map_in_slots(per_direction, len(net), workers)
    values = np.array([r[0] for r in results], dtype=float)
    index = np.array([r[1] for r in results], dtype=np.intp)
    return MaximalProfile(net=net, values=values, delta=delta, restricted_to=A, midpoint_index=index)


def _tube_kernel(e: np.ndarray, delta: float, h: float) -> Tuple[np.ndarray, int]:
    """ 셀 중심에 놓인 튜브의 셀 마스크 (홀수 크기, 중심 대칭) 와 전체 셀 수 """
    n = len(e)
    radius = int(math.ceil((0.5 + delta) / h)) + 1
    local = VoxelSet(origin=np.full(n, -(radius + 0.5) * h), h=h,
                     occupancy=np.zeros((2 * radius + 1,) * n, dtype=bool))
    cells = tube_cells(Tube(e, np.zeros(n), delta), local)
    local.occupancy.reshape(-1)[cells.indices] = True
    return local.occupancy, cells.total


def unrestricted_maximal_profile(E: VoxelSet, delta: float, net: SphericalNet, lattice_step: float,
                                 workers: int = WORKERS) -> MaximalProfile:
    """
    sup 를 격자 간격 lattice_step 의 셀 중심 격자점으로 이산화합니다.
    간격은 h 의 정수배여야 하며, 간격을 반으로 줄이면 격자가 포함되므로 값은 줄지 않습니다.
    """
    _require_grid(E, delta)
    _require_net(net, delta)
    if lattice_step > delta / 2 * (1 + 1e-12):
        raise PreconditionError(f"lattice step {lattice_step} exceeds delta/2")
    stride = int(round(lattice_step / E.h))
    if stride < 1 or not math.isclose(stride * E.h, lattice_step, rel_tol=1e-9):
        raise PreconditionError(f"lattice step {lattice_step} is not a multiple of h={E.h}")
    lattice = tuple(slice(0, size, stride) for size in E.shape)
    if any(size == 0 for size in E.shape):
        raise PreconditionError("lattice is empty")

    if not E.occupancy.any():
        return MaximalProfile(net=net, values=np.zeros(len(net)), delta=delta)

    field = E.occupancy.astype(float)

    def per_direction(i: int) -> float:
        kernel, total = _tube_kernel(net.vectors[i], delta, E.h)
        counts = np.rint(signal.fftconvolve(field, kernel.astype(float), mode='same'))
        return float(counts[lattice].max()) / total

    values = np.array(map_in_slots(per_direction, len(net), workers), dtype=float)
    return MaximalProfile(net=net, values=np.clip(values, 0.0, 1.0), delta=delta)


# --- 3. 레벨셋과 약형 노름 ---

def level_set_measure(prof: MaximalProfile, lam: float) -> LevelSetReport:
    """ {e : value(e) > lambda} 의 방향 수와 구면 측도 근사 """
    if lam <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    count = int(np.count_nonzero(prof.values > lam))
    return LevelSetReport(lam=lam, direction_count=count,
                          measure_estimate=count * prof.net.quadrature_weight())


def lambda_grid(values: np.ndarray, levels: int = LAMBDA_LEVELS) -> np.ndarray:
    """ 최소 양수 값과 최댓값 사이의 기하 격자 """
    positive = values[values > 0]
    if positive.size == 0:
        return np.empty(0)
    low, high = float(positive.min()), float(positive.max())
    if low == high:
        return np.array([high])
    return np.geomspace(low, high, levels)


def weak_norm_with_level(prof: MaximalProfile, q: Union[Fraction, float]) -> Tuple[float, float]:
    """ sup_lambda lambda |{value >= lambda}|^{1/q} 와 그 sup 을 주는 lambda """
    q = float(q)
    if q < 1:
        raise DomainError(f"weak norm needs q >= 1, got {q}")
    weight = prof.net.quadrature_weight()
    best, best_lam = 0.0, 0.0
    for lam in lambda_grid(prof.values):
        value = lam * (np.count_nonzero(prof.values >= lam) * weight) ** (1.0 / q)
        if value > best:
            best, best_lam = float(value), float(lam)
    return best, best_lam


def weak_norm(prof: MaximalProfile, q: Union[Fraction, float]) -> float:
    return weak_norm_with_level(prof, q)[0]


def lp_norm_of_set(E: VoxelSet, q: Union[Fraction, float]) -> float:
    """ ||chi_E||_q = |E|^{1/q} """
    return E.measure() ** (1.0 / float(q))


def weak_norm_scaling(cases: Sequence[Tuple[float, MaximalProfile, VoxelSet]],
                      q: Union[Fraction, float]) -> Tuple[List[WeakNormReport], float]:
    """
    (delta, profile, E) 목록에 대해 약형 노름을 계산하고 log-log 기울기를 돌려줍니다.
    normalized 는 ||K chi_E||_{q,inf} / ||chi_E||_q 입니다.
    """
    reports = []
    for delta, prof, E in cases:
        norm, lam_star = weak_norm_with_level(prof, q)
        set_norm = lp_norm_of_set(E, q)
        reports.append(WeakNormReport(delta=delta, norm=norm, lambda_star=lam_star,
                                      normalized=norm / set_norm if set_norm > 0 else math.nan))
    slope = math.nan
    if len(reports) >= 2 and all(r.norm > 0 for r in reports):
        fit = stats.linregress(np.log([r.delta for r in reports]), np.log([r.norm for r in reports]))
        slope = float(fit.slope)
    LOGGER.info(f"Weak-norm scaling q={q}: slope {slope:.4f} over {len(reports)} scales "
                f"(quadrature weight normalisation = |S^(n-1)| / N).")
    return reports, slope


# --- 4. 튜브 합 노름 ---

def tube_sum_field(tubes: Sequence[Tube], g: VoxelSet) -> np.ndarray:
    """ 겹침 수 sum_k chi_{T_k} 를 격자 위 정수 배열로 """
    field = np.zeros(g.occupancy.size, dtype=np.int64)
    clipped = 0
    for t in tubes:
        cells = tube_cells(t, g)
        field[cells.indices] += 1
        clipped += cells.total - len(cells.indices)
    if clipped:
        LOGGER.warning(f"Tube-sum field: {clipped} cells fall outside the grid and are ignored.")
    return field.reshape(g.shape)


def tube_sum_norm(tubes: Sequence[Tube], p_prime: Union[Fraction, float], g: VoxelSet) -> float:
    """ || sum_k chi_{T_k} ||_{L^{p'}} (복셀 구적) """
    p_prime = float(p_prime)
    if p_prime < 1:
        raise DomainError(f"p' must be >= 1, got {p_prime}")
    tubes = list(tubes)
    if not tubes:
        return 0.0
    delta = tubes[0].radius
    distances = pairwise_direction_distances(np.array([t.e for t in tubes]), fold=True)
    if distances.size and distances.min() <= delta:
        raise PreconditionError(f"tube directions are not delta-separated (min distance {distances.min():.3g})")
    field = tube_sum_field(tubes, g).astype(float)
    return float((np.sum(field ** p_prime) * g.cell_volume) ** (1.0 / p_prime))


@dataclass(frozen=True)
class CordobaRow(BaseModel):
    delta: float
    tube_count: int
    norm_squared: float
    exact_overlap: float
    tube_total: float
    ratio: float

    FIELDS = ['delta', 'tube_count', 'norm_squared', 'exact_overlap', 'tube_total', 'ratio']

    def to_record(self):
        return {name: getattr(self, name) for name in self.FIELDS}


def cordoba_ratio(delta: float, seed: int) -> CordobaRow:
    """
    평면에서 원점을 지나는 극대 delta-분리 부시에 대해
    ||sum chi_T||_2^2 / (log(1/delta) sum |T|) 를 계산합니다. shapely 로 구한
    sum_i sum_j |T_i ∩ T_j| (양 끝 반원 제외) 를 함께 기록합니다.
    """
    net = fold_antipodal(greedy_net(2, delta, seed))
    tubes = [Tube(e, (0.0, 0.0), delta) for e in net.vectors]
    reach = 0.5 + 2 * delta
    g = VoxelSet.empty((-reach, -reach), (reach, reach), delta / GRID_FACTOR)
    norm = tube_sum_norm(tubes, 2, g)
    tube_total = sum(tube_volume(t, 2) for t in tubes)
    ratio = norm ** 2 / (math.log(1 / delta) * tube_total)
    row = CordobaRow(delta=delta, tube_count=len(tubes), norm_squared=norm ** 2,
                     exact_overlap=pairwise_overlap_sum(tubes), tube_total=tube_total, ratio=ratio)
    LOGGER.info(f"Cordoba ratio delta={delta}: {ratio:.4f} ({len(tubes)} tubes)")
    return row
