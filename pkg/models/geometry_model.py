import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Any

import numpy as np
import shapely
from scipy import linalg, special, stats
from scipy.spatial import ConvexHull, QhullError
from scipy.spatial.distance import pdist

from config import (
    DIAMETER_DIRECT_LIMIT, MC_MIN_SAMPLES, NET_CANDIDATE_FACTOR, NET_MAX_CANDIDATES,
    NET_MIN_CANDIDATES, PROPGEO_SAMPLES, SPHERE_CANDIDATE_FACTOR, UNIT_TOLERANCE, WORKERS,
    GRID_FACTOR,
)
from models.base_model import BaseModel, DomainError, PreconditionError
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - delta-튜브 기하 엔진
# 파일 위치: models/geometry_model.py - v1
# 목적: 방향/넷/튜브/평행사변형 이웃/복셀 격자와 교집합 통계 (n = 2, 3, 4)

LOGGER = setup_logger()


# --- 1. 공통 수치 함수 ---

def unit_ball_volume(k: int) -> float:
    """ k 차원 단위 공의 부피 v_k = pi^{k/2} / Gamma(k/2 + 1) """
    if k < 0:
        raise DomainError(f"ball dimension must be >= 0, got {k}")
    return float(math.pi ** (k / 2) / special.gamma(k / 2 + 1))


def sphere_measure(n: int) -> float:
    """ |S^{n-1}| = n v_n """
    return n * unit_ball_volume(n)


def map_in_slots(func: Callable[[int], Any], count: int, workers: int = WORKERS) -> List[Any]:
    """
    func(0..count-1) 를 실행하여 미리 할당한 슬롯에 결과를 기록합니다.
    작업자 수와 무관하게 순차 실행과 동일한 결과 리스트를 돌려줍니다.
    """
    results: List[Any] = [None] * count
    if workers <= 1 or count <= 1:
        for index in range(count):
            results[index] = func(index)
        return results

    def run(index: int):
        results[index] = func(index)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(run, range(count)))
    return results


def distance_to_segment(points: np.ndarray, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    span = end - start
    length2 = float(span @ span)
    rel = points - start
    if length2 == 0.0:
        return np.linalg.norm(rel, axis=1)
    t = np.clip(rel @ span / length2, 0.0, 1.0)
    return np.linalg.norm(rel - t[:, None] * span, axis=1)


# --- 2. 방향과 튜브 ---

@dataclass(frozen=True)
class Direction:
    """ S^{n-1} 위의 단위 벡터 """
    coords: Tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        norm = math.sqrt(sum(c * c for c in coords))
        if abs(norm - 1.0) > UNIT_TOLERANCE:
            raise DomainError(f"direction must have unit norm, got {norm!r}")
        object.__setattr__(self, 'coords', coords)

    @classmethod
    def from_vector(cls, vector) -> 'Direction':
        vector = np.asarray(vector, dtype=float).ravel()
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            raise DomainError("cannot build a direction from the zero vector")
        return cls(tuple(vector / norm))

    @property
    def n(self) -> int:
        return len(self.coords)

    def as_array(self) -> np.ndarray:
        return np.array(self.coords)


@dataclass(frozen=True)
class Tube:
    """
    T^delta_e(a): 중점 a, 방향 e 인 단위 선분의 delta-이웃 (양 끝 반구 포함).
    """
    direction: Direction
    midpoint: Tuple[float, ...]
    radius: float

    def __post_init__(self):
        direction = self.direction
        if not isinstance(direction, Direction):
            direction = Direction.from_vector(direction)
        midpoint = tuple(float(x) for x in np.asarray(self.midpoint, dtype=float).ravel())
        if len(midpoint) != direction.n:
            raise DomainError(f"midpoint has {len(midpoint)} coordinates, direction has {direction.n}")
        if not (0.0 < self.radius < 1.0):
            raise DomainError(f"tube radius must lie in (0, 1), got {self.radius}")
        object.__setattr__(self, 'direction', direction)
        object.__setattr__(self, 'midpoint', midpoint)
        object.__setattr__(self, 'radius', float(self.radius))

    @property
    def n(self) -> int:
        return self.direction.n

    @property
    def e(self) -> np.ndarray:
        return self.direction.as_array()

    @property
    def a(self) -> np.ndarray:
        return np.array(self.midpoint)

    def endpoints(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.a - 0.5 * self.e, self.a + 0.5 * self.e

    def distance(self, points) -> np.ndarray:
        start, end = self.endpoints()
        return distance_to_segment(points, start, end)

    def contains(self, points) -> np.ndarray:
        return self.distance(points) <= self.radius

    def to_record(self):
        record = {f"e{i + 1}": c for i, c in enumerate(self.direction.coords)}
        record.update({f"a{i + 1}": c for i, c in enumerate(self.midpoint)})
        record['radius'] = self.radius
        return record


def analytic_tube_volume(delta: float, n: int) -> float:
    """ v_{n-1} delta^{n-1} (길이 1 원기둥) + v_n delta^n (양 끝 반구 두 개) """
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    return unit_ball_volume(n - 1) * delta ** (n - 1) + unit_ball_volume(n) * delta ** n


def tube_volume(t: Tube, n: int) -> float:
    if t.n != n:
        raise DomainError(f"tube lives in R^{t.n}, not R^{n}")
    return analytic_tube_volume(t.radius, n)


def direction_distance(e1, e2, fold: bool = False):
    """
    두 방향의 유클리드 거리. fold=True 이면 e ~ -e 를 같은 방향으로 보고
    min(|e1 - e2|, |e1 + e2|) 를 씁니다 (튜브는 e -> -e 에 대해 불변).
    """
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    minus = np.linalg.norm(e1 - e2, axis=-1)
    if not fold:
        return minus
    return np.minimum(minus, np.linalg.norm(e1 + e2, axis=-1))


def pairwise_direction_distances(vectors: np.ndarray, fold: bool = False) -> np.ndarray:
    """ pdist 꼴(압축 형태)의 모든 쌍 거리 """
    vectors = np.asarray(vectors, dtype=float)
    if len(vectors) < 2:
        return np.empty(0)
    dots = 1.0 - pdist(vectors, 'cosine')
    if fold:
        dots = np.abs(dots)
    return np.sqrt(np.clip(2.0 - 2.0 * dots, 0.0, None))


def acute_angle(e1, e2) -> float:
    """ 두 방향 사이의 예각 (반대 방향은 같은 직선) """
    cosine = abs(float(np.dot(e1, e2)))
    return math.acos(min(1.0, cosine))


# --- 3. 구면 넷 ---

@dataclass(frozen=True, eq=False)
class SphericalNet:
    """
    delta-분리된 방향 집합. folded 넷은 각 반대쌍 (e, -e) 중 하나만 담고
    거리도 접힌 거리로 잽니다.
    """
    vectors: np.ndarray
    separation: float
    maximal: bool = True
    seed: Optional[int] = None
    folded: bool = False
    density_constant: float = 0.0

    def __post_init__(self):
        vectors = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if vectors.size and np.any(np.abs(np.linalg.norm(vectors, axis=1) - 1.0) > UNIT_TOLERANCE):
            raise DomainError("net vectors must be unit vectors")
        object.__setattr__(self, 'vectors', vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def n(self) -> int:
        return self.vectors.shape[1]

    @property
    def dirs(self) -> List[Direction]:
        return [Direction(tuple(v)) for v in self.vectors]

    def quadrature_weight(self) -> float:
        """ 방향 하나에 배정되는 구면 측도 |S^{n-1}| / N (접힌 넷의 방향은 e, -e 를 함께 대표) """
        if len(self) == 0:
            return 0.0
        return sphere_measure(self.n) / len(self)

    def min_separation(self) -> float:
        distances = pairwise_direction_distances(self.vectors, fold=self.folded)
        return float(distances.min()) if distances.size else math.inf

    def is_separated(self) -> bool:
        return self.min_separation() > self.separation


def _circle_candidates(delta: float, rng: np.random.Generator) -> np.ndarray:
    # [0, pi) 의 등각 지터 점. 반대쪽은 스트림에서 쌍으로 붙입니다.
    count = max(int(math.ceil(NET_CANDIDATE_FACTOR * math.pi / delta)), NET_MIN_CANDIDATES)
    angles = math.pi * (np.arange(count) + rng.random(count)) / count
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def _sphere_candidates(n: int, delta: float, rng: np.random.Generator) -> np.ndarray:
    wanted = SPHERE_CANDIDATE_FACTOR * sphere_measure(n) / delta ** (n - 1)
    wanted = min(max(wanted, NET_MIN_CANDIDATES), NET_MAX_CANDIDATES)
    if wanted == NET_MAX_CANDIDATES:
        LOGGER.warning(f"Sphere candidate stream capped at {NET_MAX_CANDIDATES} points (n={n}, delta={delta}).")
    sampler = stats.qmc.Sobol(d=n, scramble=True, seed=rng)
    uniform = np.clip(sampler.random_base2(int(math.ceil(math.log2(wanted)))), 1e-12, 1 - 1e-12)
    gaussian = stats.norm.ppf(uniform)
    norms = np.linalg.norm(gaussian, axis=1)
    keep = norms > 0
    return gaussian[keep] / norms[keep, None]


def _greedy_select(stream: np.ndarray, delta: float, fold: bool = False) -> List[int]:
    """
    스트림 순서대로 기존 선택점 모두와 delta 보다 멀면 받아들입니다.
    셀 크기 delta 의 공간 해시에서 3^n 이웃 셀만 검사합니다.
    fold=True 이면 받아들인 점의 반대점도 해시에 넣어 접힌 거리로 판정합니다.
    """
    n = stream.shape[1]
    offsets = list(itertools.product((-1, 0, 1), repeat=n))
    buckets = {}
    accepted = []

    def cell(point) -> Tuple[int, ...]:
        return tuple(int(math.floor(x / delta)) for x in point)

    for index, point in enumerate(stream.tolist()):
        key = cell(point)
        clear = True
        for offset in offsets:
            bucket = buckets.get(tuple(k + o for k, o in zip(key, offset)))
            if bucket and any(math.dist(point, other) <= delta for other in bucket):
                clear = False
                break
        if clear:
            accepted.append(index)
            buckets.setdefault(key, []).append(point)
            if fold:
                opposite = [-x for x in point]
                buckets.setdefault(cell(opposite), []).append(opposite)
    return accepted


def greedy_net(n: int, delta: float, seed: int) -> SphericalNet:
    """
    준균일 후보 스트림(n=2: 지터 등각, n>=3: 스크램블 Sobol)에 대한 탐욕 삽입으로
    극대 delta-분리 넷을 만듭니다. 후보는 (x, -x) 쌍으로 들어오므로 결과도 대칭입니다.
    """
    if n < 2:
        raise DomainError(f"nets need n >= 2, got {n}")
    if delta <= 0:
        raise DomainError(f"delta must be positive, got {delta}")
    if delta >= 2:
        raise DomainError(f"no two unit vectors are more than 2 apart; delta={delta} admits no separated pair")

    rng = np.random.default_rng(seed)
    candidates = _circle_candidates(delta, rng) if n == 2 else _sphere_candidates(n, delta, rng)
    stream = np.empty((2 * len(candidates), n))
    stream[0::2] = candidates
    stream[1::2] = -candidates

    accepted = _greedy_select(stream, delta)
    vectors = stream[accepted]
    density = len(vectors) * delta ** (n - 1)
    LOGGER.info(f"Greedy net n={n}, delta={delta}: {len(vectors)} directions from {len(stream)} candidates "
                f"(density constant c={density:.4f}).")
    return SphericalNet(vectors=vectors, separation=float(delta), maximal=True,
                        seed=seed, folded=False, density_constant=density)


def fold_antipodal(net: SphericalNet) -> SphericalNet:
    """
    반대쌍 중 첫 번째 0 아닌 좌표가 양수인 쪽만 남깁니다.
    적도 근처에서 접힌 거리가 delta 이하인 쌍은 앞선 점만 남깁니다.
    """
    if net.folded:
        return net
    vectors = net.vectors
    nonzero = np.abs(vectors) > UNIT_TOLERANCE
    first = np.argmax(nonzero, axis=1)
    vectors = vectors[vectors[np.arange(len(vectors)), first] > 0]
    kept = _greedy_select(vectors, net.separation, fold=True) if len(vectors) else []
    if len(kept) < len(vectors):
        LOGGER.debug(f"Folding dropped {len(vectors) - len(kept)} near-antipodal directions.")
    return SphericalNet(vectors=vectors[kept], separation=net.separation, maximal=net.maximal,
                        seed=net.seed, folded=True, density_constant=net.density_constant)


# --- 4. 복셀 격자 ---

class CellList(NamedTuple):
    indices: np.ndarray   # 격자 안쪽 셀의 평탄화 인덱스
    total: int            # 격자 밖 셀까지 포함한 전체 셀 수


@dataclass(eq=False)
class VoxelSet:
    """
    축 정렬 상자 위의 점유 격자. 셀 (i_1..i_n) 의 중심은 origin + (i + 1/2) h 입니다.
    """
    origin: np.ndarray
    h: float
    occupancy: np.ndarray

    def __post_init__(self):
        self.origin = np.asarray(self.origin, dtype=float)
        self.occupancy = np.asarray(self.occupancy, dtype=bool)
        if self.h <= 0:
            raise DomainError(f"cell size must be positive, got {self.h}")
        if self.origin.shape != (self.occupancy.ndim,):
            raise DomainError("origin dimension does not match the occupancy grid")

    @classmethod
    def empty(cls, lower, upper, h: float) -> 'VoxelSet':
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if h <= 0:
            raise DomainError(f"cell size must be positive, got {h}")
        if np.any(upper <= lower):
            raise DomainError("bounding box must have positive extent on every axis")
        shape = tuple(int(math.ceil((u - l) / h - 1e-9)) for l, u in zip(lower, upper))
        return cls(origin=lower, h=float(h), occupancy=np.zeros(shape, dtype=bool))

    @property
    def n(self) -> int:
        return self.occupancy.ndim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.occupancy.shape

    @property
    def upper(self) -> np.ndarray:
        return self.origin + np.array(self.shape) * self.h

    @property
    def cell_volume(self) -> float:
        return self.h ** self.n

    def like(self) -> 'VoxelSet':
        return VoxelSet(origin=self.origin.copy(), h=self.h, occupancy=np.zeros(self.shape, dtype=bool))

    def copy(self) -> 'VoxelSet':
        return VoxelSet(origin=self.origin.copy(), h=self.h, occupancy=self.occupancy.copy())

    def same_grid(self, other: 'VoxelSet') -> bool:
        return (self.shape == other.shape and self.h == other.h
                and np.array_equal(self.origin, other.origin))

    def _require_same_grid(self, other: 'VoxelSet'):
        if not self.same_grid(other):
            raise PreconditionError("voxel sets live on different grids")

    def union(self, other: 'VoxelSet') -> 'VoxelSet':
        self._require_same_grid(other)
        return VoxelSet(self.origin.copy(), self.h, self.occupancy | other.occupancy)

    def intersection(self, other: 'VoxelSet') -> 'VoxelSet':
        self._require_same_grid(other)
        return VoxelSet(self.origin.copy(), self.h, self.occupancy & other.occupancy)

    def difference(self, other: 'VoxelSet') -> 'VoxelSet':
        self._require_same_grid(other)
        return VoxelSet(self.origin.copy(), self.h, self.occupancy & ~other.occupancy)

    def count(self) -> int:
        return int(np.count_nonzero(self.occupancy))

    def measure(self) -> float:
        return self.count() * self.cell_volume

    def centers(self, flat_indices) -> np.ndarray:
        multi = np.array(np.unravel_index(np.asarray(flat_indices, dtype=np.intp), self.shape)).T
        return self.origin + (multi + 0.5) * self.h

    def occupied_points(self) -> np.ndarray:
        return self.centers(np.flatnonzero(self.occupancy))

    def cell_index(self, points) -> Tuple[np.ndarray, np.ndarray]:
        """ 점을 담는 셀의 다중 인덱스와 격자 안쪽 여부 """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        index = np.floor((points - self.origin) / self.h).astype(np.int64)
        inside = np.all((index >= 0) & (index < np.array(self.shape)), axis=1)
        return index, inside


def _cell_indices_in_box(g: VoxelSet, lo: np.ndarray, hi: np.ndarray) -> Optional[np.ndarray]:
    """ 중심이 [lo, hi] 에 드는 셀의 (잘리지 않은) 정수 인덱스 목록 """
    first = np.ceil((lo - g.origin) / g.h - 0.5).astype(np.int64)
    last = np.floor((hi - g.origin) / g.h - 0.5).astype(np.int64)
    if np.any(last < first):
        return None
    axes = [np.arange(f, l + 1) for f, l in zip(first, last)]
    mesh = np.meshgrid(*axes, indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=1)


def _split_inside(g: VoxelSet, index: np.ndarray) -> np.ndarray:
    inside = np.all((index >= 0) & (index < np.array(g.shape)), axis=1)
    if not inside.any():
        return np.empty(0, dtype=np.intp)
    return np.ravel_multi_index(index[inside].T, g.shape)


def tube_cells(t: Tube, g: VoxelSet) -> CellList:
    """
    중심이 튜브 안에 드는 모든 셀. 선분을 길이 max(8 delta, 16 h) 조각으로 나누고,
    각 셀은 축 방향 투영이 속한 조각에서만 세므로 중복이 없습니다.
    """
    if t.n != g.n:
        raise DomainError(f"tube in R^{t.n} cannot be placed on a grid in R^{g.n}")
    e, a, delta = t.e, t.a, t.radius
    lo_t, hi_t = -0.5 - delta, 0.5 + delta
    piece_count = max(1, int(math.ceil((hi_t - lo_t) / max(8 * delta, 16 * g.h))))
    cuts = np.linspace(lo_t, hi_t, piece_count + 1)

    chunks = []
    total = 0
    for k in range(piece_count):
        u0, u1 = cuts[k], cuts[k + 1]
        p0, p1 = a + u0 * e, a + u1 * e
        index = _cell_indices_in_box(g, np.minimum(p0, p1) - delta, np.maximum(p0, p1) + delta)
        if index is None:
            continue
        centers = g.origin + (index + 0.5) * g.h
        axial = (centers - a) @ e
        upper_ok = axial < u1 if k < piece_count - 1 else axial <= u1
        candidate = (axial >= u0) & upper_ok
        index = index[candidate]
        member = t.contains(centers[candidate]) if len(index) else np.zeros(0, dtype=bool)
        index = index[member]
        total += len(index)
        chunks.append(_split_inside(g, index))

    indices = np.concatenate(chunks) if chunks else np.empty(0, dtype=np.intp)
    return CellList(indices=indices, total=total)


def _require_fidelity(g: VoxelSet, delta: float, factor: float = 2.0):
    if g.h > delta / factor * (1 + 1e-12):
        raise PreconditionError(f"grid too coarse: h={g.h} > delta/{factor:g}={delta / factor}")


def rasterize_tube(t: Tube, g: VoxelSet) -> VoxelSet:
    """ 중심이 막대 조건을 만족하는 셀만 표시합니다 (g 를 직접 갱신). """
    return rasterize_tubes([t], g, workers=1)


def rasterize_tubes(tubes: Sequence[Tube], g: VoxelSet, workers: int = WORKERS) -> VoxelSet:
    """
    튜브 목록을 작업자 수만큼 나누어 각자 점유 배열을 만들고 논리합으로 병합합니다.
    격자를 벗어난 셀은 잘라내고 호출당 한 번 경고합니다.
    """
    tubes = list(tubes)
    for t in tubes:
        _require_fidelity(g, t.radius)
    workers = max(1, min(workers, len(tubes))) if tubes else 1
    chunks = [tubes[i::workers] for i in range(workers)]

    def work(index: int):
        occupancy = np.zeros(g.occupancy.size, dtype=bool)
        clipped_tubes = 0
        clipped_cells = 0
        for t in chunks[index]:
            cells = tube_cells(t, g)
            occupancy[cells.indices] = True
            missing = cells.total - len(cells.indices)
            if missing:
                clipped_tubes += 1
                clipped_cells += missing
        return occupancy, clipped_tubes, clipped_cells

    results = map_in_slots(work, len(chunks), workers)
    clipped_tubes = 0
    clipped_cells = 0
    flat = g.occupancy.reshape(-1)
    for occupancy, tube_count, cell_count in results:
        flat |= occupancy
        clipped_tubes += tube_count
        clipped_cells += cell_count
    g.occupancy = flat.reshape(g.shape)

    if clipped_tubes:
        LOGGER.warning(f"{clipped_tubes} of {len(tubes)} tubes escape the bounding box; "
                       f"{clipped_cells} cells clipped.")
    return g


def rasterize_ball(center, radius: float, g: VoxelSet) -> VoxelSet:
    center = np.asarray(center, dtype=float)
    index = _cell_indices_in_box(g, center - radius, center + radius)
    if index is None:
        return g
    centers = g.origin + (index + 0.5) * g.h
    member = np.linalg.norm(centers - center, axis=1) <= radius
    flat = _split_inside(g, index[member])
    if len(flat) < int(member.sum()):
        LOGGER.warning(f"Ball at {center.tolist()} escapes the bounding box; cells clipped.")
    g.occupancy.reshape(-1)[flat] = True
    return g


def raster_convergence(t: Tube, factors: Sequence[int] = (4, 8, 16)) -> List[dict]:
    """ h = delta/k 로 래스터화한 측도와 해석적 부피의 상대 오차 """
    delta = t.radius
    start, end = t.endpoints()
    lower = np.minimum(start, end) - 2 * delta
    upper = np.maximum(start, end) + 2 * delta
    exact = tube_volume(t, t.n)
    rows = []
    for k in factors:
        g = rasterize_tube(t, VoxelSet.empty(lower, upper, delta / k))
        measure = g.measure()
        rows.append({'factor': k, 'h': delta / k, 'measure': measure,
                     'relative_error': abs(measure - exact) / exact})
    return rows


# --- 5. 교집합 통계 ---

@dataclass(frozen=True)
class IntersectionStats(BaseModel):
    measure: float
    stderr: float
    diameter: float
    theta: float
    delta: float
    n: int
    hits: int

    FIELDS = ['theta', 'measure', 'stderr', 'diameter', 'measure_constant', 'diameter_constant']

    @property
    def measure_constant(self) -> float:
        """ measure <= C delta^n / (theta + delta) 를 만족하는 최소 C """
        return self.measure * (self.theta + self.delta) / self.delta ** self.n

    @property
    def diameter_constant(self) -> float:
        return self.diameter * (self.theta + self.delta) / self.delta

    def to_record(self):
        return {
            'theta': self.theta, 'measure': self.measure, 'stderr': self.stderr,
            'diameter': self.diameter, 'measure_constant': self.measure_constant,
            'diameter_constant': self.diameter_constant,
        }


def point_set_diameter(points: np.ndarray, rng: Optional[np.random.Generator] = None) -> float:
    """ 볼록 껍질 꼭짓점의 최대 쌍 거리. 퇴화된 껍질이면 부분 표본으로 대신합니다. """
    if len(points) < 2:
        return 0.0
    if len(points) <= DIAMETER_DIRECT_LIMIT:
        return float(pdist(points).max())
    try:
        hull = ConvexHull(points)
        return float(pdist(points[hull.vertices]).max())
    except (QhullError, ValueError):
        rng = rng or np.random.default_rng(0)
        pick = rng.choice(len(points), DIAMETER_DIRECT_LIMIT, replace=False)
        return float(pdist(points[pick]).max())


def intersection_stats(t1: Tube, t2: Tube, n: int, samples: int = PROPGEO_SAMPLES,
                       seed: int = 0) -> IntersectionStats:
    """
    t1 을 감싸는 방향 상자 (1+2delta)(2delta)^{n-1} 에서 몬테카를로로
    |t1 ∩ t2| 와 지름을 추정합니다.
    """
    if samples < MC_MIN_SAMPLES:
        raise PreconditionError(f"{samples} samples is too noisy; need at least {MC_MIN_SAMPLES}")
    if not math.isclose(t1.radius, t2.radius, rel_tol=1e-12):
        raise PreconditionError("both tubes must share the radius delta")
    if t1.n != n or t2.n != n:
        raise DomainError(f"tubes must live in R^{n}")

    delta = t1.radius
    rng = np.random.default_rng(seed)
    e, a = t1.e, t1.a
    frame = linalg.null_space(e[None, :])
    half = 0.5 + delta
    axial = rng.uniform(-half, half, samples)
    radial = rng.uniform(-delta, delta, (samples, n - 1))
    points = a + axial[:, None] * e + radial @ frame.T

    hit = t1.contains(points) & t2.contains(points)
    box_volume = 2 * half * (2 * delta) ** (n - 1)
    fraction = float(hit.mean())
    return IntersectionStats(
        measure=box_volume * fraction,
        stderr=box_volume * math.sqrt(fraction * (1 - fraction) / samples),
        diameter=point_set_diameter(points[hit], rng),
        theta=acute_angle(t1.e, t2.e),
        delta=delta,
        n=n,
        hits=int(hit.sum()),
    )


def random_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(n)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            return v / norm


def random_tube_pair(n: int, delta: float, rng: np.random.Generator) -> Tuple[Tube, Tube]:
    """ 원점을 공유하는 두 튜브. 두 번째 튜브는 delta 이하로 흔듭니다. """
    e1 = random_unit_vector(n, rng)
    e2 = random_unit_vector(n, rng)
    u1, u2 = rng.uniform(-0.5, 0.5, 2)
    shift = random_unit_vector(n, rng) * delta * rng.random() ** (1.0 / n)
    return Tube(e1, -u1 * e1, delta), Tube(e2, -u2 * e2 + shift, delta)


def tube_pair_statistics(n: int, delta: float, pairs: int, samples: int = PROPGEO_SAMPLES,
                         seed: int = 0, workers: int = WORKERS) -> List[IntersectionStats]:
    rng = np.random.default_rng(seed)
    tube_pairs = [random_tube_pair(n, delta, rng) for _ in range(pairs)]
    sample_seeds = np.random.SeedSequence(seed).generate_state(pairs)
    return map_in_slots(
        lambda i: intersection_stats(*tube_pairs[i], n, samples, int(sample_seeds[i])),
        pairs, workers)


# --- 6. 평면 정확 계산 (shapely) ---

def tube_polygon(t: Tube, caps: bool = False):
    """
    평면 튜브의 다각형. caps=False 이면 직사각형 핵심부만 쓰며 오차는
    양 끝 반원 넓이 pi delta^2 이하입니다.
    """
    if t.n != 2:
        raise DomainError("exact polygon clipping is only available in the plane")
    start, end = t.endpoints()
    if caps:
        return shapely.buffer(shapely.linestrings([start, end]), t.radius, quad_segs=64)
    normal = np.array([-t.e[1], t.e[0]]) * t.radius
    ring = np.array([start + normal, end + normal, end - normal, start - normal, start + normal])
    return shapely.polygons(ring)


def exact_intersection_area_2d(t1: Tube, t2: Tube, caps: bool = False) -> float:
    return float(shapely.area(shapely.intersection(tube_polygon(t1, caps), tube_polygon(t2, caps))))


def pairwise_overlap_sum(tubes: Sequence[Tube], caps: bool = False) -> float:
    """ sum_i sum_j |T_i ∩ T_j| (대각 포함) = ||sum chi_T||_2^2 의 정확한 값 """
    polygons = np.array([tube_polygon(t, caps) for t in tubes], dtype=object)
    if len(polygons) == 0:
        return 0.0
    tree = shapely.STRtree(polygons)
    left, right = tree.query(polygons, predicate='intersects')
    return float(shapely.area(shapely.intersection(polygons[left], polygons[right])).sum())


# --- 7. 평행사변형 이웃 ---

@dataclass(frozen=True)
class ParallelogramSlab:
    """ 선분 I_e(x1), I_e(x2) 가 생성하는 평행사변형 P_e(x1, x2) 의 delta-이웃 """
    direction: Direction
    x1: Tuple[float, ...]
    x2: Tuple[float, ...]
    radius: float

    def __post_init__(self):
        direction = self.direction
        if not isinstance(direction, Direction):
            direction = Direction.from_vector(direction)
        object.__setattr__(self, 'direction', direction)
        object.__setattr__(self, 'x1', tuple(float(x) for x in np.ravel(self.x1)))
        object.__setattr__(self, 'x2', tuple(float(x) for x in np.ravel(self.x2)))
        if len(self.x1) != direction.n or len(self.x2) != direction.n:
            raise DomainError("slab points must match the direction dimension")
        if self.radius <= 0:
            raise DomainError(f"slab radius must be positive, got {self.radius}")

    def distance(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        e = self.direction.as_array()
        x1, x2 = np.array(self.x1), np.array(self.x2)
        side = x2 - x1
        side_perp = side - (side @ e) * e

        if np.linalg.norm(side_perp) < 1e-12:
            # 퇴화: 두 선분이 같은 직선 위에 있으므로 합쳐진 선분 하나
            shift = side @ e
            return distance_to_segment(points, x1 + min(-0.5, shift - 0.5) * e,
                                       x1 + max(0.5, shift + 0.5) * e)

        corner = x1 - 0.5 * e
        gram = np.array([[1.0, side @ e], [side @ e, side @ side]])
        rel = points - corner
        coeffs = np.linalg.solve(gram, np.stack([rel @ e, rel @ side]))
        s, t = coeffs
        inside = (s >= 0) & (s <= 1) & (t >= 0) & (t <= 1)
        plane = np.linalg.norm(rel - np.outer(s, e) - np.outer(t, side), axis=1)

        edges = [
            (corner, corner + e), (corner + side, corner + side + e),
            (corner, corner + side), (corner + e, corner + e + side),
        ]
        edge = np.min([distance_to_segment(points, p, q) for p, q in edges], axis=0)
        return np.where(inside, plane, edge)


def slab_membership(s: ParallelogramSlab, x) -> bool:
    return bool(s.distance(x)[0] <= s.radius)


def slab_cells(s: ParallelogramSlab, g: VoxelSet) -> CellList:
    e = s.direction.as_array()
    corners = np.array([np.array(x) + sign * 0.5 * e for x in (s.x1, s.x2) for sign in (-1, 1)])
    index = _cell_indices_in_box(g, corners.min(axis=0) - s.radius, corners.max(axis=0) + s.radius)
    if index is None:
        return CellList(np.empty(0, dtype=np.intp), 0)
    centers = g.origin + (index + 0.5) * g.h
    index = index[s.distance(centers) <= s.radius]
    return CellList(_split_inside(g, index), len(index))


def slab_average(s: ParallelogramSlab, E: VoxelSet) -> float:
    """ |E ∩ 𝕋_e(x1, x2)| / |𝕋_e(x1, x2)| 의 복셀 근사 """
    cells = slab_cells(s, E)
    if cells.total == 0:
        return 0.0
    return float(E.occupancy.reshape(-1)[cells.indices].sum()) / cells.total


# --- 8. 부시의 동심 껍질 분해 ---

@dataclass(frozen=True)
class ShellMeasure(BaseModel):
    k: int
    inner: float
    outer: float
    measure: float
    bound_constant: float

    FIELDS = ['k', 'inner', 'outer', 'measure', 'bound_constant']

    def to_record(self):
        return {name: getattr(self, name) for name in self.FIELDS}


@dataclass(frozen=True)
class AnnulusReport:
    shells: List[ShellMeasure]
    bush_measure: float
    core_measure: float

    @property
    def max_constant(self) -> float:
        return max((s.bound_constant for s in self.shells), default=0.0)


def annulus_slices(bush_tubes: Sequence[Tube], x0, delta: float,
                   h: Optional[float] = None, workers: int = WORKERS) -> AnnulusReport:
    """
    (B - x0) ∩ (B(0, 2^{k+1} delta) \\ B(0, 2^k delta)) 의 측도를 k = 0..K+1
    (K = ceil(log2(1/delta))) 에 대해 구합니다. 상수 C_k = |B^k| / (2^k delta |B|).
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    for t in bush_tubes:
        if t.distance(x0)[0] > delta * (1 + 1e-9):
            raise PreconditionError(f"tube with midpoint {t.midpoint} does not contain x0={x0.tolist()}")
    if not bush_tubes:
        raise PreconditionError("annulus slices need at least one tube")

    h = h or delta / GRID_FACTOR
    reach = 1 + 2 * delta + h
    g = rasterize_tubes(bush_tubes, VoxelSet.empty(x0 - reach, x0 + reach, h), workers)
    radii = np.linalg.norm(g.occupied_points() - x0, axis=1)
    bush_measure = g.measure()
    core_measure = int((radii < delta).sum()) * g.cell_volume

    top = int(math.ceil(math.log2(1 / delta)))
    shells = []
    for k in range(top + 2):
        inner, outer = 2 ** k * delta, 2 ** (k + 1) * delta
        measure = int(((radii >= inner) & (radii < outer)).sum()) * g.cell_volume
        constant = measure / (inner * bush_measure) if bush_measure > 0 else 0.0
        shells.append(ShellMeasure(k, inner, outer, measure, constant))

    report = AnnulusReport(shells=shells, bush_measure=bush_measure, core_measure=core_measure)
    LOGGER.info(f"Annulus slices n={n}, delta={delta}: {len(bush_tubes)} tubes, "
                f"max shell constant C={report.max_constant:.4f}")
    return report
