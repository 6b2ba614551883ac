import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import List, Dict, Any, Optional, Tuple, NamedTuple

from config import P_SAMPLES
from models.base_model import BaseModel, DomainError, VerificationError
from utils.logger import setup_logger
from utils.number_format import Rational, parse_fraction, format_rational, format_affine

# 2026-10-17 - 제한 카케야 실험실 - 정확한 유리수 지수 계산 모델
# 파일 위치: models/bounds_model.py - v1
# 목적: 최대함수 추정식의 보간/차원 전이와 차원 하한 곡선 f(n, s) 계산
#
# 모든 지수는 Fraction 으로만 다룹니다. epsilon 손실은 epsilon -> 0 극한값으로
# 기록하고 MaximalEstimate.epsilon_loss 플래그로만 남깁니다.

LOGGER = setup_logger()


class EstimateFlavor(str, Enum):
    STRONG = 'strong'
    WEAK = 'weak'
    RESTRICTED_WEAK = 'restricted-weak'


@dataclass(frozen=True)
class MaximalEstimate(BaseModel):
    """
    차원 ambient_dim 에서의 최대함수 부등식을 지수 (p, q, h) 로 표현합니다.

    restricted-weak 추정식은 (p, beta) 쌍을 담으며 beta 는 h 필드에 저장합니다.
    """
    ambient_dim: int
    p: Fraction
    q: Fraction
    h: Fraction
    flavor: EstimateFlavor = EstimateFlavor.STRONG
    source: str = ''
    epsilon_loss: bool = True
    midpoint_dim: Optional[Fraction] = None

    FIELDS = ['name', 'dim', 'p', 'q', 'h']

    def __post_init__(self):
        # 입력을 정확한 유리수로 정규화합니다 (frozen 이므로 object.__setattr__ 사용)
        for name in ('p', 'q', 'h'):
            object.__setattr__(self, name, parse_fraction(getattr(self, name)))
        if self.midpoint_dim is not None:
            object.__setattr__(self, 'midpoint_dim', parse_fraction(self.midpoint_dim))
        object.__setattr__(self, 'flavor', EstimateFlavor(self.flavor))

        if self.ambient_dim < 2:
            raise DomainError(f"ambient dimension must be >= 2, got {self.ambient_dim}")
        if self.p < 1:
            raise DomainError(f"Lebesgue exponent p must be >= 1, got {self.p}")
        if self.h < 0:
            raise DomainError(f"delta-power loss h must be >= 0, got {self.h}")
        if self.flavor != EstimateFlavor.RESTRICTED_WEAK and self.q < self.p:
            raise DomainError(f"sphere exponent q={self.q} must be >= p={self.p}")

    @property
    def beta(self) -> Fraction:
        """ restricted-weak 추정식의 delta 손실 지수 beta (h 필드) """
        return self.h

    def to_record(self) -> Dict[str, Any]:
        return {
            'name': self.source,
            'dim': self.ambient_dim,
            'p': format_rational(self.p),
            'q': format_rational(self.q),
            'h': format_rational(self.h),
        }


class Piece(NamedTuple):
    """ [s_lo, s_hi) 에서 f(s) = a + b*s """
    s_lo: Fraction
    s_hi: Fraction
    a: Fraction
    b: Fraction

    def value(self, s: Fraction) -> Fraction:
        return self.a + self.b * s


@dataclass(frozen=True)
class PiecewiseBound:
    """
    유리수 꺾인점을 갖는 연속 구간별 일차 하한 곡선 s -> f(n, s).
    마지막 조각만 닫힌 구간 [s_lo, n] 입니다.
    """
    n: int
    pieces: Tuple[Piece, ...]

    def __post_init__(self):
        object.__setattr__(self, 'pieces', tuple(Piece(*map(Fraction, p)) for p in self.pieces))
        self._validate()

    def _validate(self):
        pieces = self.pieces
        if not pieces:
            raise DomainError("a piecewise bound needs at least one piece")
        if pieces[0].s_lo != 0 or pieces[-1].s_hi != self.n:
            raise DomainError(f"pieces must partition [0, {self.n}]")
        for left, right in zip(pieces, pieces[1:]):
            if left.s_hi != right.s_lo:
                raise DomainError(f"gap between pieces at s={left.s_hi}")
            if left.value(left.s_hi) != right.value(right.s_lo):
                raise DomainError(f"curve is discontinuous at s={left.s_hi}")
        for piece in pieces:
            if piece.s_lo >= piece.s_hi:
                raise DomainError(f"empty piece [{piece.s_lo}, {piece.s_hi})")
            if piece.b > 0:
                raise DomainError(f"piece on [{piece.s_lo}, {piece.s_hi}) is increasing")
            # f - (n - s) 는 조각별 일차이므로 끝점에서만 확인하면 충분합니다.
            for s in (piece.s_lo, piece.s_hi):
                if piece.value(s) < self.n - s:
                    raise DomainError(f"bound falls below n - s at s={s}")
        if pieces[0].value(Fraction(0)) != self.n:
            raise DomainError(f"f({self.n}, 0) must equal {self.n}")

    def piece_index(self, s: Rational) -> int:
        s = parse_fraction(s)
        if s < 0 or s > self.n:
            raise DomainError(f"s={s} outside [0, {self.n}]")
        for index, piece in enumerate(self.pieces):
            if piece.s_lo <= s < piece.s_hi:
                return index
        return len(self.pieces) - 1

    def evaluate(self, s: Rational) -> Fraction:
        s = parse_fraction(s)
        return self.pieces[self.piece_index(s)].value(s)

    def breakpoints(self) -> List[Fraction]:
        """ 내부 꺾인점 (0 과 n 제외) """
        return [piece.s_lo for piece in self.pieces[1:]]

    def describe_piece(self, index: int) -> str:
        piece = self.pieces[index]
        return format_affine(piece.a, piece.b)


# --- 1. 기본 지수 연산 ---

def w_exponent(m: int) -> Fraction:
    """
    HRZ 지수 w(m) = 1 + min_{2<=t<=m} max(2m / ((m-1)m + (t-1)t), 1/(m+1-t)).
    (차원 n-1 을 m 으로 쓴 형태)
    """
    if m < 2:
        raise DomainError(f"w_exponent needs m >= 2, got {m}")
    best = None
    for t in range(2, m + 1):
        value = max(Fraction(2 * m, (m - 1) * m + (t - 1) * t), Fraction(1, m + 1 - t))
        if best is None or value < best:
            best = value
    return 1 + best


def dual_exponent(p: Rational) -> Fraction:
    """ p' = p / (p - 1). 정확한 involution 입니다. """
    p = parse_fraction(p)
    if p <= 1:
        raise DomainError(f"dual exponent needs p > 1, got {p}")
    return p / (p - 1)


def classical_estimate(m: int, p0: Rational, source: str,
                       flavor: EstimateFlavor = EstimateFlavor.STRONG) -> MaximalEstimate:
    """
    h = m/p0 - 1 형태의 추정식 (p0 = q0). Cordoba, Wolff, HRZ 모두 이 꼴입니다.
    """
    p0 = parse_fraction(p0)
    return MaximalEstimate(ambient_dim=m, p=p0, q=p0, h=Fraction(m) / p0 - 1,
                           flavor=flavor, source=source)


def validate_necessary_condition(est: MaximalEstimate) -> bool:
    """ 필요조건 m <= (1 + h) p  (epsilon -> 0 극한) """
    return est.ambient_dim <= (1 + est.h) * est.p


def interpolate(base: MaximalEstimate, target_p: Rational) -> MaximalEstimate:
    """
    자명한 L^1 -> L^inf 추정과 보간하여 target_p 에서의 추정식을 얻습니다.
    q = q0 (1 - 1/p0) / (1 - 1/p),  h = m/p - 1
    """
    target_p = parse_fraction(target_p)
    if not (1 < target_p <= base.p):
        raise DomainError(f"target p={target_p} outside (1, {base.p}]")
    m = base.ambient_dim
    if base.h != Fraction(m) / base.p - 1:
        raise DomainError(f"base estimate '{base.source}' is not of the form h = m/p0 - 1")
    q = base.q * (1 - 1 / base.p) / (1 - 1 / target_p)
    return MaximalEstimate(ambient_dim=m, p=target_p, q=q, h=Fraction(m) / target_p - 1,
                           flavor=base.flavor, source='interpolated',
                           epsilon_loss=base.epsilon_loss)


def transfer_to_restricted(base: MaximalEstimate, n: int, s: Rational) -> MaximalEstimate:
    """
    (n-1) 차원 추정식에서 R^n 의 제한 약형 추정식 (p, beta) 를 만듭니다.
    p = (p_ + n(p_-1) + 1)/p_,  beta = (h_ p_ + s p_ - s)/(p_ + n(p_-1) + 1)
    """
    s = parse_fraction(s)
    if base.p <= 1:
        raise DomainError(f"transfer needs base p > 1, got {base.p}")
    if s < 0 or s > n:
        raise DomainError(f"s={s} outside [0, {n}]")
    if base.ambient_dim != n - 1:
        LOGGER.warning(f"Transferring '{base.source}' from dimension {base.ambient_dim} into n={n} "
                       f"(expected base dimension {n - 1}).")
    p_, h_ = base.p, base.h
    denominator = p_ + n * (p_ - 1) + 1
    p = denominator / p_
    beta = (h_ * p_ + s * p_ - s) / denominator
    return MaximalEstimate(ambient_dim=n, p=p, q=p, h=beta,
                           flavor=EstimateFlavor.RESTRICTED_WEAK,
                           source=f"transferred from {base.source}",
                           epsilon_loss=True, midpoint_dim=s)


def g_function(base: MaximalEstimate, s: Rational) -> Fraction:
    """ g_n(s) = (h_ p_ + s p_ - s) / p_ = h_ + s (p_ - 1)/p_ """
    s = parse_fraction(s)
    if base.p <= 1:
        raise DomainError(f"g_function needs base p > 1, got {base.p}")
    return (base.h * base.p + s * base.p - s) / base.p


def restricted_estimate_from_box_dimension(n: int, s: Rational) -> MaximalEstimate:
    """ 상자 차원 s 인 A 에 대한 제한 약형 추정식: p = q = n, beta = s/n """
    s = parse_fraction(s)
    if s < 0 or s > n:
        raise DomainError(f"s={s} outside [0, {n}]")
    return MaximalEstimate(ambient_dim=n, p=Fraction(n), q=Fraction(n), h=s / n,
                           flavor=EstimateFlavor.RESTRICTED_WEAK,
                           source='box-dimension weak-type estimate', midpoint_dim=s)


def dimension_bound_from_estimate(est: MaximalEstimate, n: int) -> Fraction:
    """ 제한 약형 (p, beta) 추정식이 주는 하우스도르프 차원 하한 n - beta p """
    if est.flavor != EstimateFlavor.RESTRICTED_WEAK:
        raise DomainError(f"estimate '{est.source}' does not carry a (p, beta) pair")
    return n - est.beta * est.p


# --- 2. 기반 추정식 카탈로그 ---

@dataclass(frozen=True)
class BaseEstimateLibrary:
    """
    (n-1) 차원 입력으로 쓰이는 알려진 추정식 목록.
    명시적 항목(Cordoba, Wolff) 외에 HRZ 항목은 모든 m >= 2 에 대해 계산으로 제공합니다.
    """
    entries: Tuple[MaximalEstimate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for entry in self.entries:
            if not validate_necessary_condition(entry):
                raise DomainError(f"catalog entry '{entry.source}' violates m <= (1+h)p")

    @classmethod
    def default(cls) -> 'BaseEstimateLibrary':
        return cls(entries=(
            classical_estimate(2, 2, 'Cordoba n=2'),
            classical_estimate(3, Fraction(5, 2), 'Wolff n=3'),
        ))

    @staticmethod
    def hrz(m: int) -> MaximalEstimate:
        """
        HRZ 항목: p_{m} = w(m)' 이고 h = m - 1 - m/p' (p' = w(m)) = m/p - 1.
        """
        return classical_estimate(m, dual_exponent(w_exponent(m)), f"HRZ n-1={m}")

    def admissible_bases(self, m: int) -> List[MaximalEstimate]:
        if m < 2:
            return []
        return [e for e in self.entries if e.ambient_dim == m] + [self.hrz(m)]

    def best_base(self, m: int) -> Optional[MaximalEstimate]:
        """ 가장 큰 p 를 갖는 항목. 같으면 명시적 카탈로그 항목을 우선합니다. """
        best = None
        for entry in self.admissible_bases(m):
            if best is None or entry.p > best.p:
                best = entry
        return best

    def catalog(self, max_dim: int = 12) -> List[MaximalEstimate]:
        """ 내보내기용 전체 목록 (명시 항목 + HRZ m=2..max_dim) """
        return list(self.entries) + [self.hrz(m) for m in range(2, max_dim + 1)]


# --- 3. 차원 하한 ---

def _transferred_value(n: int, s: Fraction, base: MaximalEstimate, p: Fraction) -> Fraction:
    """ p <= base.p 로 보간한 기반 추정식에서 얻는 n - g_n(s) """
    estimate = base if p == base.p else interpolate(base, p)
    return n - g_function(estimate, s)


def best_lower_bound(n: int, s: Rational, lib: Optional[BaseEstimateLibrary] = None) -> Fraction:
    """
    max( n - s, sup_{1 < p <= p_max} n - (n-1-s)/p - (s-1) ).

    s <= n-1 이면 sup 은 p = p_max 에서, s > n-1 이면 p -> 1 극한 2 에서 얻어집니다.
    닫힌 식의 결과는 P_SAMPLES 개의 p 표본으로 다시 검증합니다.
    """
    s = parse_fraction(s)
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if s < 0 or s > n:
        raise DomainError(f"s={s} outside [0, {n}]")
    lib = lib or BaseEstimateLibrary.default()

    candidates = [n - s]
    base = lib.best_base(n - 1)
    if base is None:
        LOGGER.debug(f"No base estimate in dimension {n - 1}; bound is n - s.")
        return candidates[0]

    if s <= n - 1:
        closed = _transferred_value(n, s, base, base.p)
    else:
        closed = Fraction(2)

    for k in range(1, P_SAMPLES + 1):
        p = 1 + (base.p - 1) * Fraction(k, P_SAMPLES)
        sampled = _transferred_value(n, s, base, p)
        if sampled > closed:
            raise VerificationError(
                f"sampled bound {sampled} at p={p} exceeds closed form {closed} (n={n}, s={s})")

    candidates.append(closed)
    return max(candidates)


def piecewise_curve(n: int, lib: Optional[BaseEstimateLibrary] = None) -> PiecewiseBound:
    """
    f(n, s) 를 정확한 조각 곡선으로 만듭니다:
    n - s on [0, s1), 전이 경계 on [s1, n-1), 2 on [n-1, n].  비어 있는 조각은 생략합니다.
    """
    if n < 3:
        raise DomainError(f"piecewise_curve needs n >= 3, got {n}")
    lib = lib or BaseEstimateLibrary.default()
    base = lib.best_base(n - 1)

    # 전이 경계 n - g(s) = (n - h) - s (p-1)/p
    a = n - base.h
    b = -(base.p - 1) / base.p
    # n - s 와 만나는 점 s1 = h p
    s1 = base.h * base.p
    s_end = Fraction(n - 1)

    pieces = []
    if s1 > 0:
        pieces.append(Piece(Fraction(0), s1, Fraction(n), Fraction(-1)))
    if s1 < s_end:
        pieces.append(Piece(s1, s_end, a, b))
    pieces.append(Piece(s_end, Fraction(n), Fraction(2), Fraction(0)))

    curve = PiecewiseBound(n=n, pieces=tuple(pieces))
    LOGGER.debug(f"Curve n={n} from '{base.source}': breakpoints {[format_rational(x) for x in curve.breakpoints()]}")
    return curve


def curve_components(n: int, s: Rational, lib: Optional[BaseEstimateLibrary] = None) -> Dict[str, Fraction]:
    """ 그림의 두 구성 곡선 값: n - s 와 전이 경계 n - g_n(s) (p = p_max) """
    s = parse_fraction(s)
    lib = lib or BaseEstimateLibrary.default()
    base = lib.best_base(n - 1)
    return {
        'n_minus_s': n - s,
        'transferred': n - g_function(base, s),
    }


def sample_points(curve: PiecewiseBound, step: Rational) -> List[Fraction]:
    """ [0, n] 의 step 격자 + 모든 꺾인점 (중복 제거, 오름차순) """
    step = parse_fraction(step)
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    count = int(math.floor(curve.n / step))
    points = {step * k for k in range(count + 1)}
    points.update(curve.breakpoints())
    points.add(Fraction(curve.n))
    return sorted(points)


def reference_kakeya_bound(n: int) -> float:
    """
    알려진 (비제한) Kakeya 집합 차원 하한. 곡선 출력에 참고선으로만 사용합니다.
    """
    if n <= 2:
        return 2.0
    if n == 3:
        return 3.0
    if n == 4:
        return 3.059
    return max((n + 2) / 2, (2 - math.sqrt(2)) * (n - 4) + 3)
