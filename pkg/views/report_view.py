from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from utils.number_format import format_exact, format_rational

# 2026-10-17 - 제한 카케야 실험실 - 텍스트 보고서 뷰
# 파일 위치: views/report_view.py - v1
# 목적: CLI 표준 출력용 문자열 생성 (하한 한 줄, 검증 표, 실험 요약)


def format_bound_line(value: Fraction, piece: Optional[str]) -> str:
    """
    정수면 '4', 아니면 '13/5 (= 2.6), piece: 19/5 - 3/5 s'.
    유한소수가 아닌 값은 십진 근사를 6자리로 보여줍니다.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    decimal = format_exact(value)
    if '/' in decimal:
        decimal = f"{float(value):.6g}"
    line = f"{format_rational(value)} (= {decimal})"
    return f"{line}, piece: {piece}" if piece else line


def render_table(records: List[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    if not records:
        return "(no rows)"
    df = pd.DataFrame(records, columns=list(columns) if columns else None)
    return df.to_string(index=False, float_format=lambda x: f"{x:.6g}")


def render_suite(result) -> str:
    lines = [f"suite {result.suite}: {'PASS' if result.passed else 'FAIL'}", ""]
    checks = [{**c, 'passed': 'PASS' if c['passed'] else 'FAIL'} for c in result.checks]
    lines.append(render_table(checks, ['check', 'value', 'threshold', 'passed']))
    for name, rows in result.tables.items():
        lines += ["", f"[{name}]", render_table(rows)]
    return "\n".join(lines)


def render_summary(summary: Dict[str, Any]) -> str:
    """ key: value 줄 목록 (실험 summary.txt 와 표준 출력 공용) """
    width = max((len(k) for k in summary), default=0)
    return "\n".join(f"{key.ljust(width)} : {value}" for key, value in summary.items()) + "\n"
