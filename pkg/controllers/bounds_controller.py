import os
from fractions import Fraction
from typing import Any, Dict, List, Optional

from config import CURVE_STEP
from controllers.base_controller import BaseController
from models.base_model import DomainError, VerificationError
from models.bounds_model import (
    PiecewiseBound, best_lower_bound, curve_components, piecewise_curve, reference_kakeya_bound,
    sample_points,
)
from utils.logger import setup_logger
from utils.number_format import Rational, format_affine, format_rational, parse_fraction
from views.figure_view import render_curve
from views.report_view import format_bound_line

# 2026-10-17 - 제한 카케야 실험실 - 차원 하한 컨트롤러
# 파일 위치: controllers/bounds_controller.py - v1
# 목적: bounds / curve 명령. 한 점의 하한과 그 조각, 전체 곡선 CSV, 추정식 목록, 선택적 PNG

LOGGER = setup_logger()


class BoundsController(BaseController):
    """
    bounds 모델을 호출해 하한 값을 만들고 파일로 내보냅니다.
    """

    # --- 1. 한 점의 하한 ---

    def bound_summary(self, n: int, s: Rational) -> Dict[str, Any]:
        s = parse_fraction(s)
        value = best_lower_bound(n, s, self.library)
        if n == 2:
            piece = format_affine(Fraction(2), Fraction(-1))
        else:
            curve = piecewise_curve(n, self.library)
            index = curve.piece_index(s)
            if curve.evaluate(s) != value:
                raise VerificationError(
                    f"curve value {curve.evaluate(s)} disagrees with best bound {value} at n={n}, s={s}")
            piece = curve.describe_piece(index)
        LOGGER.info(f"Best lower bound n={n}, s={format_rational(s)}: {format_rational(value)} ({piece})")
        return {'n': n, 's': s, 'value': value, 'piece': piece,
                'line': format_bound_line(value, piece)}

    # --- 2. 곡선 ---

    def curve_rows(self, n: int, step: Rational = CURVE_STEP) -> List[Dict[str, Fraction]]:
        """ 표본점마다 최종 하한과 두 구성 곡선 """
        curve = self.curve(n)
        rows = []
        for s in sample_points(curve, step):
            components = curve_components(n, s, self.library)
            rows.append({'s': s, 'best': curve.evaluate(s), **components})
        return rows

    def curve(self, n: int) -> PiecewiseBound:
        if n < 3:
            raise DomainError(f"curve output needs n >= 3 (for n = 2 the bound is 2 - s), got {n}")
        curve = piecewise_curve(n, self.library)
        # 꺾인점과 양 끝에서 닫힌 식 하한과 일치해야 합니다.
        for s in [Fraction(0)] + curve.breakpoints() + [Fraction(n)]:
            if curve.evaluate(s) != best_lower_bound(n, s, self.library):
                raise VerificationError(f"piecewise curve disagrees with best bound at n={n}, s={s}")
        return curve

    def write_curve(self, n: int, out_dir: str, step: Rational = CURVE_STEP,
                    plot: bool = False) -> Optional[List[str]]:
        """
        curve_n{n}.csv, curve_n{n}_components.csv, catalog.csv (plot 이면 curve_n{n}.png) 를 씁니다.
        하나라도 쓰지 못하면 None 을 반환합니다.
        """
        if not self.prepare_output(out_dir):
            return None
        curve = self.curve(n)
        rows = self.curve_rows(n, step)
        points = [row['s'] for row in rows]

        paths = {
            'curve': os.path.join(out_dir, f"curve_n{n}.csv"),
            'components': os.path.join(out_dir, f"curve_n{n}_components.csv"),
            'catalog': os.path.join(out_dir, "catalog.csv"),
        }
        ok = (self.file_handler.export_curve(paths['curve'], curve, points)
              and self.file_handler.export_components(paths['components'], rows, reference_kakeya_bound(n))
              and self.file_handler.export_catalog(paths['catalog'], self.library.catalog()))
        if ok and plot:
            paths['figure'] = os.path.join(out_dir, f"curve_n{n}.png")
            ok = render_curve(paths['figure'], n, rows, reference_kakeya_bound(n))
        if not ok:
            return None
        breakpoints = ', '.join(format_rational(b) for b in curve.breakpoints())
        LOGGER.info(f"Curve n={n}: {len(rows)} samples, breakpoints [{breakpoints}], "
                    f"unrestricted reference {reference_kakeya_bound(n):.4f}")
        return list(paths.values())
