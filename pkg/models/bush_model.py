import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Union

import numpy as np

from config import (
    BUSH_CONST_C, BUSH_SEPARATION_FACTOR, DENSITY_CONSTANT, GRID_FACTOR,
    ITERATION_CAP_FACTOR, STOPPING_CONSTANT, WORKERS,
)
from models.base_model import BaseModel, DomainError, PreconditionError, VerificationError
from models.geometry_model import (
    SphericalNet, Tube, VoxelSet, direction_distance, pairwise_direction_distances,
    rasterize_tubes, tube_cells,
)
from models.maximal_model import (
    MaximalProfile, MidpointSet, level_set_measure, restricted_maximal_profile,
)
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - 부시 추출과 반복 분해
# 파일 위치: models/bush_model.py - v1
# 목적: 비둘기집 공 선택, 분리 가지치기로 부시 구성, 잔여 집합에서 반복 추출,
#       밀도/서로소 핵심부/정지 한계 검증

LOGGER = setup_logger()


# --- 1. 결과 타입 ---

@dataclass(frozen=True, eq=False)
class PigeonholeResult:
    center: np.ndarray
    members: List[int]
    balls_hit: int              # 후보가 하나라도 들어간 덮개 공의 수 N_delta

    @property
    def count(self) -> int:
        return len(self.members)


@dataclass(frozen=True, eq=False)
class Bush:
    """
    공통점 anchor 를 지나는 delta-튜브 묶음. dirs 는 가지치기 후 방향 집합입니다.
    """
    anchor: np.ndarray
    tubes: List[Tube]
    dirs: np.ndarray
    lam: float
    delta: float
    ratios: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __len__(self) -> int:
        return len(self.tubes)

    def separation(self) -> float:
        distances = pairwise_direction_distances(self.dirs, fold=True)
        return float(distances.min()) if distances.size else math.inf

    def is_separated(self) -> bool:
        return self.separation() > BUSH_SEPARATION_FACTOR * self.delta / self.lam

    def contains_anchor(self) -> bool:
        return all(t.distance(self.anchor)[0] <= t.radius * (1 + 1e-9) for t in self.tubes)

    def rasterize(self, like: VoxelSet, workers: int = WORKERS) -> VoxelSet:
        return rasterize_tubes(self.tubes, like.like(), workers)


@dataclass(frozen=True)
class DensityReport(BaseModel):
    ratio: float
    passed: bool
    constant: float

    FIELDS = ['ratio', 'passed', 'constant']

    def to_record(self):
        return {name: getattr(self, name) for name in self.FIELDS}


@dataclass(frozen=True)
class StoppingReport(BaseModel):
    m: int
    bound: float
    passed: bool
    constant: float

    FIELDS = ['m', 'bound', 'passed', 'constant']

    def to_record(self):
        return {name: getattr(self, name) for name in self.FIELDS}


@dataclass(frozen=True)
class DecompositionStep(BaseModel):
    step: int
    level_measure: float
    bush_size: int
    bush_measure: float
    density_ratio: float

    FIELDS = ['step', 'level_measure', 'bush_size', 'bush_measure', 'density_ratio']

    def to_record(self):
        return {name: getattr(self, name) for name in self.FIELDS}


@dataclass(eq=False)
class BushDecomposition:
    """
    E_0 = E 에서 시작해 E_{i+1} = E_i \\ B_i 로 부시를 떼어낸 결과.
    level_measures[i] = |D_i| (level lambda/2), 마지막 값이 정지 조건을 만족합니다.
    """
    bushes: List[Bush]
    residual: VoxelSet
    level_measures: List[float]
    epsilon0: float
    stopped: bool
    lam: float
    delta: float
    steps: List[DecompositionStep] = field(default_factory=list)
    removed_measures: List[float] = field(default_factory=list)
    iteration_cap: int = 0
    trivial_case: bool = False
    trivial_volume_bound: float = 0.0

    @property
    def m(self) -> int:
        return len(self.bushes)


# --- 2. 비둘기집 공 ---

def pigeonhole_ball(A: MidpointSet, candidate_midpoints, delta: float) -> PigeonholeResult:
    """
    A 를 지름 2delta/3 의 격자 셀(반지름 delta/3 공에 내접)로 덮고
    후보가 가장 많이 든 셀을 고릅니다. 동률은 셀 인덱스의 사전순으로 깹니다.
    """
    candidates = np.atleast_2d(np.asarray(candidate_midpoints, dtype=float))
    if candidates.size == 0:
        raise PreconditionError("pigeonhole needs at least one candidate midpoint")
    n = candidates.shape[1]
    side = 2 * delta / (3 * math.sqrt(n))
    # A 의 최솟점이 셀 중심에 오도록 격자를 둡니다.
    origin = A.points.min(axis=0) - side / 2
    cells = np.floor((candidates - origin) / side).astype(np.int64)

    unique, inverse, counts = np.unique(cells, axis=0, return_inverse=True, return_counts=True)
    inverse = np.asarray(inverse).ravel()
    # np.unique 는 사전순 정렬이므로 argmax 는 동률 중 가장 작은 인덱스를 줍니다.
    winner = int(np.argmax(counts))
    members = np.flatnonzero(inverse == winner).tolist()
    center = origin + (unique[winner] + 0.5) * side
    result = PigeonholeResult(center=center, members=members, balls_hit=len(unique))
    LOGGER.debug(f"Pigeonhole: {result.count} of {len(candidates)} candidates in one ball "
                 f"({result.balls_hit} balls hit).")
    return result


# --- 3. 부시 추출 ---

def _prune(vectors: np.ndarray, order: Sequence[int], scale: float) -> List[int]:
    """ 순서대로 접힌 거리 scale 초과인 방향만 남기는 탐욕 가지치기 """
    kept: List[int] = []
    for index in order:
        if all(direction_distance(vectors[index], vectors[j], fold=True) > scale for j in kept):
            kept.append(index)
    return kept


def extract_bush(E: VoxelSet, A: MidpointSet, net: SphericalNet, delta: float, lam: float,
                 level: Optional[float] = None, profile: Optional[MaximalProfile] = None,
                 workers: int = WORKERS) -> Optional[Bush]:
    """
    (i) 비율이 level (기본 lambda) 을 넘는 방향 선택, (ii) 그 중점들에 비둘기집,
    (iii) 10 delta / lambda 분리 가지치기. 선택된 방향이 없으면 None.
    """
    if not (0 < lam < 1):
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    level = lam if level is None else level
    profile = profile or restricted_maximal_profile(E, A, delta, net, workers)

    selected = np.flatnonzero(profile.values > level)
    if selected.size == 0:
        return None

    midpoints = profile.argmax_midpoints()
    ball = pigeonhole_ball(A, midpoints[selected], delta)
    family = selected[ball.members]
    order = sorted(family.tolist(), key=lambda i: (-profile.values[i], i))
    kept = _prune(net.vectors, order, BUSH_SEPARATION_FACTOR * delta / lam)

    tubes = [Tube(net.vectors[i], midpoints[i], delta) for i in kept]
    bush = Bush(anchor=ball.center, tubes=tubes, dirs=net.vectors[kept], lam=lam, delta=delta,
                ratios=profile.values[kept])
    LOGGER.debug(f"Extracted bush at {np.round(ball.center, 6).tolist()}: {len(selected)} selected, "
                 f"{len(family)} in ball, {len(kept)} after pruning.")
    return bush


# --- 4. 반복 분해 ---

def stopping_bound(E_measure: float, epsilon0: float, delta: float, s: Union[Fraction, float],
                   lam: float, n: int) -> float:
    """ (1/eps0) |E| delta^{-s} lambda^{-n}  (epsilon = 0, 상수 1) """
    if epsilon0 <= 0:
        return 0.0
    return E_measure * delta ** (-float(s)) * lam ** (-n) / epsilon0


def decompose(E: VoxelSet, A: MidpointSet, net: SphericalNet, delta: float, lam: float,
              workers: int = WORKERS) -> BushDecomposition:
    """
    eps0 = |D_0| (level lambda). 단계 i 에서 |D_i| (level lambda/2) < eps0/4 이면 멈추고,
    아니면 E_i 에서 부시를 떼어냅니다. 반복 상한은 max(1, ceil(10 * 정지 한계)).
    """
    if not (0 < lam < 1):
        raise DomainError(f"lambda must lie in (0, 1), got {lam}")
    n = E.n

    if lam <= delta:
        # lambda <= delta 이면 반복 없이 |E| >~ lambda delta^{n-1} 만 보고합니다.
        bound = lam * delta ** (n - 1)
        LOGGER.info(f"lambda={lam} <= delta={delta}: trivial volume bound {bound:.3g} (|E|={E.measure():.3g}).")
        return BushDecomposition(bushes=[], residual=E.copy(), level_measures=[], epsilon0=0.0,
                                 stopped=True, lam=lam, delta=delta, trivial_case=True,
                                 trivial_volume_bound=bound)

    profile = restricted_maximal_profile(E, A, delta, net, workers)
    epsilon0 = level_set_measure(profile, lam).measure_estimate
    if epsilon0 == 0:
        LOGGER.info("D_0 is empty; decomposition is degenerate (m = 0).")
        return BushDecomposition(bushes=[], residual=E.copy(), level_measures=[0.0], epsilon0=0.0,
                                 stopped=True, lam=lam, delta=delta)

    bound = stopping_bound(E.measure(), epsilon0, delta, A.declared_dim, lam, n)
    cap = max(1, int(math.ceil(ITERATION_CAP_FACTOR * bound)))
    LOGGER.info(f"Decomposition: eps0={epsilon0:.4g}, stopping bound {bound:.4g}, iteration cap {cap}.")

    residual = E
    bushes: List[Bush] = []
    level_measures: List[float] = []
    removed: List[float] = []
    steps: List[DecompositionStep] = []
    step = 0
    while True:
        if step > 0:
            profile = restricted_maximal_profile(residual, A, delta, net, workers)
        level_measure = level_set_measure(profile, lam / 2).measure_estimate
        level_measures.append(level_measure)
        if level_measure < epsilon0 / 4:
            steps.append(DecompositionStep(step, level_measure, 0, 0.0, math.nan))
            LOGGER.info(f"Step {step}: |D|={level_measure:.4g} < eps0/4, stopping with m={len(bushes)}.")
            break
        if step >= cap:
            raise VerificationError(f"bush decomposition exceeded the iteration cap {cap}")

        # 첫 단계는 lambda, 이후 단계는 lambda/2 에서 선택합니다.
        bush = extract_bush(residual, A, net, delta, lam, level=lam if step == 0 else lam / 2,
                            profile=profile, workers=workers)
        if bush is None:
            steps.append(DecompositionStep(step, level_measure, 0, 0.0, math.nan))
            LOGGER.info(f"Step {step}: no direction above the selection level; stopping.")
            break

        region = bush.rasterize(residual, workers)
        taken = residual.intersection(region).measure()
        density = check_bush_density(bush, residual, region=region)
        steps.append(DecompositionStep(step, level_measure, len(bush), region.measure(), density.ratio))
        removed.append(taken)
        bushes.append(bush)
        residual = residual.difference(region)
        LOGGER.info(f"Step {step}: |D|={level_measure:.4g}, bush of {len(bush)} tubes removed "
                    f"{taken:.4g} (density ratio {density.ratio:.3f}).")
        step += 1

    # 떼어낸 조각은 서로소이므로 합이 |E| 를 넘을 수 없습니다.
    if sum(removed) > E.measure() * (1 + 1e-12):
        raise VerificationError("removed bush pieces exceed the measure of E")

    return BushDecomposition(bushes=bushes, residual=residual, level_measures=level_measures,
                             epsilon0=epsilon0, stopped=True, lam=lam, delta=delta, steps=steps,
                             removed_measures=removed, iteration_cap=cap)


def verify_stopping_bound(d: BushDecomposition, E_measure: float, s: Union[Fraction, float],
                          constant: float = STOPPING_CONSTANT) -> StoppingReport:
    """ m <= C (1/eps0) |E| delta^{-s} lambda^{-n} """
    if not d.stopped:
        raise PreconditionError("decomposition has not stopped")
    if d.m == 0:
        return StoppingReport(m=0, bound=0.0, passed=True, constant=constant)
    n = d.residual.n
    bound = stopping_bound(E_measure, d.epsilon0, d.delta, s, d.lam, n)
    passed = d.m <= constant * bound
    LOGGER.info(f"Stopping bound: m={d.m}, bound={bound:.4g}, C={constant} -> {'pass' if passed else 'FAIL'}")
    return StoppingReport(m=d.m, bound=bound, passed=passed, constant=constant)


# --- 5. 부시 검증 ---

def check_bush_density(b: Bush, E: VoxelSet, c: float = float(DENSITY_CONSTANT),
                       region: Optional[VoxelSet] = None) -> DensityReport:
    """ ratio = |E ∩ B| / (lambda |B|),  pass = ratio >= c """
    region = region if region is not None else b.rasterize(E)
    bush_measure = region.measure()
    if bush_measure == 0:
        return DensityReport(ratio=0.0, passed=False, constant=c)
    ratio = E.intersection(region).measure() / (b.lam * bush_measure)
    if ratio < c:
        LOGGER.warning(f"Bush density ratio {ratio:.4f} below c={c}: extraction precondition violated.")
    return DensityReport(ratio=ratio, passed=ratio >= c, constant=c)


def check_disjoint_cores(b: Bush, E: VoxelSet, c_const: float = float(BUSH_CONST_C)) -> bool:
    """ E ∩ T_k \\ B(anchor, c lambda) 들이 복셀 단위로 서로소인지 """
    radius = c_const * b.lam
    flat = E.occupancy.reshape(-1)
    seen = np.zeros(flat.size, dtype=bool)
    for t in b.tubes:
        cells = tube_cells(t, E)
        index = cells.indices[flat[cells.indices]]
        centers = E.centers(index)
        index = index[np.linalg.norm(centers - b.anchor, axis=1) >= radius]
        if seen[index].any():
            return False
        seen[index] = True
    return True


# --- 6. 구성 픽스처 ---

@dataclass(eq=False)
class BushFixture:
    E: VoxelSet
    A: MidpointSet
    tubes: List[Tube]
    directions: np.ndarray
    anchors: np.ndarray


def fixture_directions(net: SphericalNet, delta: float, lam: float) -> np.ndarray:
    """ 넷에서 접힌 거리 2 * 10 delta / lambda 로 분리된 방향을 고릅니다. """
    kept = _prune(net.vectors, range(len(net)), 2 * BUSH_SEPARATION_FACTOR * delta / lam)
    return net.vectors[kept]


def make_bush_fixture(net: SphericalNet, delta: float, lam: float, anchor=None,
                      h: Optional[float] = None, workers: int = WORKERS) -> BushFixture:
    """ anchor 를 지나는 단일 부시를 래스터화한 E 와 A = {anchor} """
    n = net.n
    anchor = np.zeros(n) if anchor is None else np.asarray(anchor, dtype=float)
    directions = fixture_directions(net, delta, lam)
    tubes = [Tube(e, anchor, delta) for e in directions]
    reach = 0.5 + 2 * delta
    E = VoxelSet.empty(anchor - reach, anchor + reach, h or delta / GRID_FACTOR)
    rasterize_tubes(tubes, E, workers)
    return BushFixture(E=E, A=MidpointSet(anchor[None, :], 0), tubes=tubes,
                       directions=directions, anchors=anchor[None, :])


def make_two_bush_fixture(net: SphericalNet, delta: float, lam: float, offset: float = 2.0,
                          h: Optional[float] = None, workers: int = WORKERS) -> BushFixture:
    """ 첫 좌표축 위 -offset, +offset 에 중심을 둔 두 부시 """
    n = net.n
    anchors = np.zeros((2, n))
    anchors[0, 0], anchors[1, 0] = -offset, offset
    directions = fixture_directions(net, delta, lam)
    tubes = [Tube(e, anchor, delta) for anchor in anchors for e in directions]
    reach = 0.5 + 2 * delta
    lower = np.full(n, -reach)
    upper = np.full(n, reach)
    lower[0], upper[0] = -offset - reach, offset + reach
    E = VoxelSet.empty(lower, upper, h or delta / GRID_FACTOR)
    rasterize_tubes(tubes, E, workers)
    return BushFixture(E=E, A=MidpointSet(anchors, 0), tubes=tubes,
                       directions=directions, anchors=anchors)
