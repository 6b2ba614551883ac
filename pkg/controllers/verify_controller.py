import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from config import (
    CORDOBA_DELTAS, CORDOBA_MAX_SPREAD, PROPGEO_DELTAS, PROPGEO_MAX_SPREAD, PROPGEO_PAIRS,
    PROPGEO_SAMPLES, SUITE_BUSH_DELTA, SUITE_BUSH_LAMBDA,
)
from controllers.base_controller import BaseController
from models.base_model import DomainError
from models.bush_model import (
    check_disjoint_cores, decompose, make_bush_fixture, make_two_bush_fixture,
    verify_stopping_bound,
)
from models.fractal_model import (
    FractalKind, FractalSpec, box_dimension_fit, build_restricted_kakeya, generate,
    points_of_voxels,
)
from models.geometry_model import (
    Tube, annulus_slices, fold_antipodal, greedy_net, raster_convergence, tube_pair_statistics,
)
from models.maximal_model import (
    MidpointSet, cordoba_ratio, restricted_maximal_profile, weak_norm_scaling,
)
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - 검증 묶음 컨트롤러
# 파일 위치: controllers/verify_controller.py - v1
# 목적: tubes / cordoba / bush / boxdim / maximal 검증 묶음을 실행하고 통과 여부를 표로 정리

LOGGER = setup_logger()

SUITE_NAMES = ('tubes', 'cordoba', 'bush', 'boxdim', 'maximal')


@dataclass
class SuiteResult:
    """ 검증 묶음 하나의 결과. checks 의 모든 항목이 통과해야 passed 입니다. """
    suite: str
    checks: List[Dict[str, Any]] = field(default_factory=list)
    tables: Dict[str, List[Dict[str, Any]]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c['passed'] for c in self.checks)

    def add_check(self, check: str, value: float, threshold: str, passed: bool):
        self.checks.append({'suite': self.suite, 'check': check, 'value': value,
                            'threshold': threshold, 'passed': bool(passed)})
        level = LOGGER.info if passed else LOGGER.warning
        level(f"[{self.suite}] {check}: {value:.6g} ({threshold}) -> {'PASS' if passed else 'FAIL'}")


def _spread(values: List[float]) -> float:
    positive = [v for v in values if v > 0]
    if len(positive) < len(values):
        return math.inf
    return max(positive) / min(positive)


class VerifyController(BaseController):
    """
    각 모델의 불변식을 작은(데스크) 규모에서 실험으로 확인합니다.
    """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._suites: Dict[str, Callable[[], SuiteResult]] = {
            'tubes': self.suite_tubes,
            'cordoba': self.suite_cordoba,
            'bush': self.suite_bush,
            'boxdim': self.suite_boxdim,
            'maximal': self.suite_maximal,
        }

    def run(self, suite: str, seed: Optional[int] = None) -> SuiteResult:
        if suite not in self._suites:
            raise DomainError(f"unknown suite '{suite}' (choose from {', '.join(SUITE_NAMES)})")
        if seed is not None:
            self.config = replace(self.config, seed=seed)
        LOGGER.info(f"Running verification suite '{suite}' (seed={self.config.seed}).")
        return self._suites[suite]()

    # --- 1. 튜브 교집합 상수 ---

    def suite_tubes(self) -> SuiteResult:
        result = SuiteResult('tubes')
        rows = []
        for n in (2, 3):
            measure_constants, diameter_constants = [], []
            for delta in PROPGEO_DELTAS:
                stats = tube_pair_statistics(n, delta, PROPGEO_PAIRS, PROPGEO_SAMPLES,
                                             seed=self.sub_seed(f"tubes-{n}-{delta!r}"),
                                             workers=self.config.workers)
                c_measure = max(s.measure_constant for s in stats)
                c_diameter = max(s.diameter_constant for s in stats)
                measure_constants.append(c_measure)
                diameter_constants.append(c_diameter)
                rows.append({'n': n, 'delta': delta, 'pairs': len(stats),
                             'C_measure': c_measure, 'C_diameter': c_diameter})
                LOGGER.info(f"Tube constants n={n}, delta={delta}: C={c_measure:.4f}, C'={c_diameter:.4f}")
            spread = _spread(measure_constants)
            result.add_check(f"measure constant spread n={n}", spread,
                             f"<= {PROPGEO_MAX_SPREAD}", spread <= PROPGEO_MAX_SPREAD)
            spread = _spread(diameter_constants)
            result.add_check(f"diameter constant spread n={n}", spread,
                             f"<= {PROPGEO_MAX_SPREAD}", spread <= PROPGEO_MAX_SPREAD)
        result.tables['constants'] = rows

        # 래스터 근사 오차
        delta = PROPGEO_DELTAS[0]
        tube = Tube((1.0, 0.0, 0.0), (0.0, 0.0, 0.0), delta)
        convergence = raster_convergence(tube, (4, 16))
        result.tables['raster'] = convergence
        for row, limit in zip(convergence, (0.10, 0.05)):
            result.add_check(f"raster error h=delta/{row['factor']}", row['relative_error'],
                             f"<= {limit}", row['relative_error'] <= limit)
        return result

    # --- 2. 코르도바 로그 인자 ---

    def suite_cordoba(self) -> SuiteResult:
        result = SuiteResult('cordoba')
        rows = [cordoba_ratio(delta, self.sub_seed(f"cordoba-{delta!r}"))
                for delta in CORDOBA_DELTAS]
        result.tables['ratios'] = [row.to_record() for row in rows]
        spread = _spread([row.ratio for row in rows])
        result.add_check("log-factor ratio spread", spread, f"<= {CORDOBA_MAX_SPREAD}",
                         spread <= CORDOBA_MAX_SPREAD)
        return result

    # --- 3. 부시 분해 ---

    def suite_bush(self) -> SuiteResult:
        result = SuiteResult('bush')
        delta, lam = SUITE_BUSH_DELTA, SUITE_BUSH_LAMBDA
        workers = self.config.workers
        net = fold_antipodal(greedy_net(2, delta, self.sub_seed('bush-net')))

        single = make_bush_fixture(net, delta, lam, workers=workers)
        d1 = decompose(single.E, single.A, net, delta, lam, workers)
        result.add_check("single bush m", d1.m, "== 1", d1.m == 1)
        density = d1.steps[0].density_ratio if d1.steps and d1.m else 0.0
        result.add_check("single bush density ratio", density, ">= 1/4", density >= 0.25)
        stop1 = verify_stopping_bound(d1, single.E.measure(), single.A.declared_dim)
        result.add_check("single bush stopping bound", stop1.bound, f"m={stop1.m} <= C*bound", stop1.passed)
        if d1.m:
            disjoint = check_disjoint_cores(d1.bushes[0], single.E)
            result.add_check("disjoint cores", float(disjoint), "== 1", disjoint)

        double = make_two_bush_fixture(net, delta, lam, workers=workers)
        d2 = decompose(double.E, double.A, net, delta, lam, workers)
        result.add_check("two bushes m", d2.m, "== 2", d2.m == 2)
        found = np.array([b.anchor for b in d2.bushes]) if d2.bushes else np.empty((0, 2))
        worst = max((float(np.min(np.linalg.norm(found - anchor, axis=1))) if len(found) else math.inf)
                    for anchor in double.anchors)
        result.add_check("anchor recovery distance", worst, f"<= delta={delta}", worst <= delta)
        stop2 = verify_stopping_bound(d2, double.E.measure(), double.A.declared_dim)
        result.add_check("two bush stopping bound", stop2.bound, f"m={stop2.m} <= C*bound", stop2.passed)

        report = annulus_slices(single.tubes, single.anchors[0], delta, workers=workers)
        result.add_check("annulus shell constant", report.max_constant, "<= 16", report.max_constant <= 16)
        result.tables['decomposition'] = [s.to_record() for s in d1.steps + d2.steps]
        result.tables['shells'] = [s.to_record() for s in report.shells]
        return result

    # --- 4. 상자 차원 추정기 ---

    def suite_boxdim(self) -> SuiteResult:
        result = SuiteResult('boxdim')
        scales = [3.0 ** -k for k in range(3, 8)]

        cantor = generate(FractalSpec(kind=FractalKind.CANTOR_PRODUCT, n=1), scales[-1])
        fit = box_dimension_fit(cantor, scales)
        target = math.log(2) / math.log(3)
        result.add_check("Cantor slope", fit.slope, f"{target:.4f} +/- 0.05", abs(fit.slope - target) <= 0.05)

        t = np.linspace(0.0, 1.0, 3 ** 9 + 1)
        segment = MidpointSet(np.column_stack([t, np.full_like(t, 0.5)]), 1)
        fit_segment = box_dimension_fit(segment, scales)
        result.add_check("segment slope", fit_segment.slope, "1 +/- 0.05", abs(fit_segment.slope - 1) <= 0.05)
        result.tables['cantor'] = fit.rows()
        result.tables['segment'] = fit_segment.rows()
        return result

    # --- 5. 제한 최대함수 (A = 한 점) ---

    def suite_maximal(self) -> SuiteResult:
        result = SuiteResult('maximal')
        workers = self.config.workers
        A = MidpointSet(np.zeros((1, 2)), 0)
        deltas = [2.0 ** -k for k in range(5, 9)]

        cases = []
        for delta in deltas:
            net = fold_antipodal(greedy_net(2, delta, self.sub_seed(f"maximal-{delta!r}")))
            K = build_restricted_kakeya(A, net, delta, workers=workers)
            profile = restricted_maximal_profile(K, A, delta, net, workers)
            cases.append((delta, profile, K))

        # 가장 작은 delta 의 합집합 (h = delta/4) 을 상자 세기합니다.
        fit = box_dimension_fit(points_of_voxels(cases[-1][2]), deltas)
        result.add_check("K_point box dimension", fit.slope, ">= 1.9", fit.slope >= 1.9)
        reports, slope = weak_norm_scaling(cases, q=2)
        result.add_check("weak-norm scaling slope", slope, "in [-0.2, 0.2]", -0.2 <= slope <= 0.2)
        result.tables['dimension_fit'] = fit.rows()
        result.tables['weak_norm'] = [r.to_record() for r in reports]
        return result
