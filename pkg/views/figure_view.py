from typing import Any, Dict, List

import matplotlib
matplotlib.use('Agg')
from matplotlib.figure import Figure

from config import CURVE_COLORS
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - 곡선 그림 뷰
# 파일 위치: views/figure_view.py - v1
# 목적: 하한 곡선과 두 구성 곡선, 참고 상수를 PNG 로 렌더링 (화면 없이 Agg 백엔드)

LOGGER = setup_logger()


class CurveFigure:
    """ Figure 하나에 곡선을 그리고 파일로 저장하는 얇은 래퍼입니다. """

    def __init__(self, width: float = 6, height: float = 4.5, dpi: int = 120):
        self.fig = Figure(figsize=(width, height), dpi=dpi)
        self.axes = self.fig.add_subplot(111)

    def draw(self, n: int, rows: List[Dict[str, Any]], reference: float):
        s = [float(r['s']) for r in rows]
        self.axes.clear()
        self.axes.plot(s, [float(r['n_minus_s']) for r in rows], color=CURVE_COLORS['n_minus_s'],
                       linewidth=1, label='n - s')
        self.axes.plot(s, [float(r['transferred']) for r in rows], color=CURVE_COLORS['transferred'],
                       linewidth=1, label='transferred bound')
        self.axes.plot(s, [float(r['best']) for r in rows], color=CURVE_COLORS['best'],
                       linewidth=2.5, alpha=0.6, label='best lower bound')
        self.axes.axhline(reference, color=CURVE_COLORS['reference'], linestyle='--',
                          label=f"unrestricted reference {reference:.3f}")
        self.axes.set_xlim(0, n)
        self.axes.set_ylim(0, n + 0.5)
        self.axes.set_title(f"Lower bound for dim K_A in R^{n}")
        self.axes.set_xlabel("s (upper box dimension of A)")
        self.axes.set_ylabel("dimension")
        self.axes.grid(True, linestyle='--', alpha=0.6)
        self.axes.legend(loc='upper right')

    def save(self, file_path: str) -> bool:
        try:
            self.fig.savefig(file_path, metadata={'Software': None})
            LOGGER.info(f"Curve figure saved to {file_path}")
            return True
        except OSError as e:
            LOGGER.error(f"Failed to save figure {file_path}: {e}")
            return False


def render_curve(file_path: str, n: int, rows: List[Dict[str, Any]], reference: float) -> bool:
    figure = CurveFigure()
    figure.draw(n, rows, reference)
    return figure.save(file_path)
