import os
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from controllers.base_controller import BaseController
from models.bounds_model import best_lower_bound
from models.bush_model import DecompositionStep, decompose, verify_stopping_bound
from models.fractal_model import (
    DimensionFit, FractalKind, FractalSpec, box_dimension_fit, build_restricted_kakeya,
    empirical_dimension, generate, points_of_voxels,
)
from models.geometry_model import SphericalNet, fold_antipodal, greedy_net
from models.maximal_model import (
    MidpointSet, WeakNormReport, restricted_maximal_profile, unrestricted_maximal_profile,
    weak_norm_scaling,
)
from utils.logger import setup_logger
from utils.number_format import format_rational
from views.report_view import render_summary

# 2026-10-17 - 제한 카케야 실험실 - 실험 실행 컨트롤러
# 파일 위치: controllers/experiment_controller.py - v1
# 목적: 설정 하나로 A, K_A, 최대함수 프로파일, 부시 분해, 상자 차원 적합을 만들고
#       모든 결과를 출력 디렉토리에 기록 (같은 설정이면 같은 바이트)

LOGGER = setup_logger()

# 상자 세기 스케일 = delta * 2^k
FIT_SCALE_POWERS = (3, 2, 1, 0)
# s_delta 를 유리수로 바꿀 때의 최대 분모
S_DENOMINATOR_LIMIT = 1000


class ExperimentController(BaseController):
    """
    experiment / net / boxdim 명령의 실행 로직을 담당합니다.
    """

    # --- 1. 전체 실험 ---

    def run(self, out_dir: Optional[str] = None) -> Optional[Dict[str, Any]]:
        """
        실험을 실행하고 요약 딕셔너리를 반환합니다. 출력 파일을 쓰지 못하면 None.
        """
        cfg = self.config
        out_dir = out_dir or cfg.output_dir
        if not self.prepare_output(out_dir):
            return None
        n, delta, lam, workers = cfg.n, cfg.delta, cfg.lam, cfg.workers
        LOGGER.info(f"Experiment start: n={n}, delta={delta}, lambda={lam}, A={cfg.fractal_kind}, "
                    f"rule={cfg.assignment_rule}, seed={cfg.seed}")

        # 1. 중점 집합 A 와 그 경험적 차원
        spec = cfg.fractal_spec()
        A = generate(spec, delta, bbox=(np.full(n, -0.5), np.full(n, 0.5)))
        s_delta = empirical_dimension(A, delta)
        if spec.kind in (FractalKind.SINGLE_POINT, FractalKind.LATTICE):
            # 유한 집합은 선언 차원 0 대신 delta 해상도의 경험적 차원을 씁니다.
            A = MidpointSet(A.points, s_delta)

        # 2. 넷과 A-제한 카케야 합집합
        net = fold_antipodal(greedy_net(n, delta, self.sub_seed('net')))
        K = build_restricted_kakeya(A, net, delta, h=cfg.h, rule=cfg.assignment_rule,
                                    seed=self.sub_seed('assignment'), workers=workers)

        # 3. 최대함수 프로파일과 약형 노름
        restricted = restricted_maximal_profile(K, A, delta, net, workers)
        unrestricted = None
        if n == 2:
            stride = max(1, cfg.grid_factor // 2)
            unrestricted = unrestricted_maximal_profile(K, delta, net, stride * K.h, workers)
        reports, _ = weak_norm_scaling([(delta, restricted, K)], q=n)

        # 4. 부시 분해
        decomposition = decompose(K, A, net, delta, lam, workers)
        stopping = verify_stopping_bound(decomposition, K.measure(), A.declared_dim)

        # 5. K_A 의 상자 차원과 하한 비교
        scales = [delta * 2 ** k for k in FIT_SCALE_POWERS if delta * 2 ** k < 1]
        fit = box_dimension_fit(points_of_voxels(K), scales)
        s_rational = min(Fraction(n), max(Fraction(0), Fraction(s_delta).limit_denominator(S_DENOMINATOR_LIMIT)))
        bound = best_lower_bound(n, s_rational, self.library)

        summary = {
            'n': n,
            'delta': repr(delta),
            'lambda': repr(lam),
            'h': repr(cfg.h),
            'fractal_kind': spec.kind.value,
            'midpoints': len(A),
            's_delta': f"{s_delta:.10g}",
            's_rational': format_rational(s_rational),
            'directions': len(net),
            'kakeya_measure': f"{K.measure():.10g}",
            'restricted_max': f"{float(restricted.values.max()):.10g}",
            'unrestricted_max': f"{float(unrestricted.values.max()):.10g}" if unrestricted is not None else 'n/a',
            'weak_norm': f"{reports[0].norm:.10g}",
            'lambda_star': f"{reports[0].lambda_star:.10g}",
            'bushes': decomposition.m,
            'epsilon0': f"{decomposition.epsilon0:.10g}",
            'stopping_bound': f"{stopping.bound:.10g}",
            'stopping_passed': stopping.passed,
            'box_dimension': f"{fit.slope:.10g}",
            'box_dimension_r2': f"{fit.r2:.10g}",
            'best_lower_bound': format_rational(bound),
            'best_lower_bound_decimal': f"{float(bound):.10g}",
            'dimension_gap': f"{fit.slope - float(bound):.10g}",
        }

        if not self._write_outputs(out_dir, A, net, K, restricted, unrestricted, reports,
                                   decomposition, fit, summary):
            return None
        LOGGER.info(f"Experiment finished: box dimension {fit.slope:.4f} vs lower bound "
                    f"{format_rational(bound)} (s_delta={s_delta:.4f}).")
        return summary

    def _write_outputs(self, out_dir, A, net, K, restricted, unrestricted, reports,
                       decomposition, fit, summary) -> bool:
        fh = self.file_handler

        def path(name: str) -> str:
            return os.path.join(out_dir, name)

        tubes, owners = [], []
        for index, bush in enumerate(decomposition.bushes):
            tubes += bush.tubes
            owners += [index] * len(bush.tubes)

        ok = (fh.export_points(path('midpoints.csv'), A.points)
              and fh.export_net(path('net.csv'), net)
              and fh.export_voxels(path('kakeya.vox'), K)
              and fh.export_profile(path('profile_restricted.csv'), restricted)
              and (unrestricted is None or fh.export_profile(path('profile_unrestricted.csv'), unrestricted))
              and fh.export_models(path('weak_norm.csv'), WeakNormReport, reports)
              and fh.export_models(path('decomposition.csv'), DecompositionStep, decomposition.steps)
              and fh.export_tubes(path('bush_tubes.csv'), tubes, owners)
              and fh.export_dimension_fit(path('dimension_fit.csv'), fit)
              and fh.write_text(path('config.txt'), self.config.to_text())
              and fh.write_text(path('summary.txt'), render_summary(summary)))
        return bool(ok)

    # --- 2. 넷 / 상자 차원 명령 ---

    def write_net(self, n: int, delta: float, out_path: str, folded: bool = False) -> Optional[SphericalNet]:
        net = greedy_net(n, delta, self.sub_seed('net'))
        if folded:
            net = fold_antipodal(net)
        LOGGER.info(f"Net n={n}, delta={delta}: {len(net)} directions, "
                    f"quadrature weight {net.quadrature_weight():.6g}")
        directory = os.path.dirname(out_path)
        if directory and not self.prepare_output(directory):
            return None
        return net if self.file_handler.export_net(out_path, net) else None

    def write_boxdim(self, spec: FractalSpec, scales: Sequence[float], out_path: str) -> Optional[DimensionFit]:
        """ 가장 작은 스케일에서 생성한 근사로 상자 차원을 적합합니다. """
        scales = sorted((float(d) for d in scales), reverse=True)
        A = generate(spec, scales[-1])
        fit = box_dimension_fit(A, scales)
        LOGGER.info(f"{spec.kind.value}: fitted slope {fit.slope:.4f}, "
                    f"similarity dimension {spec.similarity_dimension():.4f}")
        directory = os.path.dirname(out_path)
        if directory and not self.prepare_output(directory):
            return None
        return fit if self.file_handler.export_dimension_fit(out_path, fit) else None


def default_boxdim_scales(spec: FractalSpec, count: int = 5) -> List[float]:
    """ 닮음비가 있는 생성기는 ratio^k, 나머지는 2^-k (k = 3 ..) """
    if spec.kind in (FractalKind.CANTOR_PRODUCT, FractalKind.RANDOM_SELF_SIMILAR):
        base = float(spec.ratio)
    else:
        base = 0.5
    return [base ** k for k in range(3, 3 + count)]
