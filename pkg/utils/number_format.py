from fractions import Fraction
from typing import Union

# 2026-10-17 - 제한 카케야 실험실 - 유리수 파싱/출력 유틸리티
# 파일 위치: utils/number_format.py - v1
# 목적: 지수 계산 결과를 정확한 유리수 또는 유한소수로 표기

Rational = Union[int, str, Fraction]


def parse_fraction(value: Rational) -> Fraction:
    """
    '13/5', '0.25', 3, Fraction 등을 정확한 Fraction 으로 변환합니다.
    float 는 이진 근사 오차가 섞이므로 받지 않습니다.
    """
    if isinstance(value, float):
        raise TypeError("float values are not accepted for exact exponents; pass a string or Fraction.")
    if isinstance(value, str):
        value = value.strip()
    return Fraction(value)


def _is_terminating(q: Fraction) -> bool:
    den = q.denominator
    for prime in (2, 5):
        while den % prime == 0:
            den //= prime
    return den == 1


def format_exact(q: Fraction) -> str:
    """
    유한소수로 끝나는 유리수는 정확한 소수 표기로, 아니면 'num/den' 으로 표기합니다.
    예: 13/5 -> '2.6', 4 -> '4', 19/6 -> '19/6'
    """
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if not _is_terminating(q):
        return f"{q.numerator}/{q.denominator}"

    # 분모가 2^a 5^b 이면 10^k 배로 정수가 되는 최소 k 를 찾습니다.
    sign = '-' if q < 0 else ''
    q = abs(q)
    digits = 0
    scaled = q
    while scaled.denominator != 1:
        scaled *= 10
        digits += 1
    text = str(scaled.numerator).rjust(digits + 1, '0')
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


def format_rational(q: Fraction) -> str:
    """ 항상 'num/den' 또는 정수로 표기합니다. """
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_affine(a: Fraction, b: Fraction, var: str = 's') -> str:
    """
    a + b*var 를 사람이 읽는 일차식으로 출력합니다. 예: (19/5, -3/5) -> '19/5 - 3/5 s'
    """
    a = Fraction(a)
    b = Fraction(b)
    if b == 0:
        return format_rational(a)
    coeff = abs(b)
    term = var if coeff == 1 else f"{format_rational(coeff)} {var}"
    if a == 0:
        return f"-{term}" if b < 0 else term
    op = '-' if b < 0 else '+'
    return f"{format_rational(a)} {op} {term}"
