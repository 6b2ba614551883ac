import zlib
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from config import DEFAULT_EXPERIMENT
from models.base_model import ConfigError, DomainError
from models.fractal_model import AssignmentRule, FractalKind, FractalSpec
from utils.logger import setup_logger
from utils.number_format import parse_fraction

# 2026-10-17 - 제한 카케야 실험실 - 실험 설정 모델
# 파일 위치: models/settings_model.py - v1
# 목적: 평면 key = value 설정 텍스트의 파싱/검증/직렬화, 이름별 하위 시드

LOGGER = setup_logger()

# 설정 파일 키 -> 데이터클래스 필드 ('lambda' 는 파이썬 예약어)
KEY_TO_FIELD = {key: ('lam' if key == 'lambda' else key) for key in DEFAULT_EXPERIMENT}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    실험 한 번의 모든 입력. 값의 타입은 DEFAULT_EXPERIMENT 기본값의 타입을 따릅니다.
    """
    n: int = DEFAULT_EXPERIMENT['n']
    delta: float = DEFAULT_EXPERIMENT['delta']
    lam: float = DEFAULT_EXPERIMENT['lambda']
    fractal_kind: str = DEFAULT_EXPERIMENT['fractal_kind']
    fractal_step: float = DEFAULT_EXPERIMENT['fractal_step']
    fractal_ratio: str = DEFAULT_EXPERIMENT['fractal_ratio']
    fractal_axes: int = DEFAULT_EXPERIMENT['fractal_axes']
    fractal_maps: int = DEFAULT_EXPERIMENT['fractal_maps']
    seed: int = DEFAULT_EXPERIMENT['seed']
    grid_factor: int = DEFAULT_EXPERIMENT['grid_factor']
    assignment_rule: str = DEFAULT_EXPERIMENT['assignment_rule']
    workers: int = DEFAULT_EXPERIMENT['workers']
    output_dir: str = DEFAULT_EXPERIMENT['output_dir']

    def __post_init__(self):
        problem = self.range_problem()
        if problem:
            raise ConfigError(problem[1])

    # --- 1. 검증 ---

    def range_problem(self) -> Optional[Tuple[str, str]]:
        """ 범위를 벗어난 첫 번째 값의 (키, 설명). 문제가 없으면 None """
        if self.n not in (2, 3, 4):
            return 'n', f"n must be 2, 3 or 4 for geometry experiments, got {self.n}"
        if not (0 < self.delta < 1):
            return 'delta', f"delta must lie in (0, 1), got {self.delta}"
        if not (0 < self.lam < 1):
            return 'lambda', f"lambda must lie in (0, 1), got {self.lam}"
        if self.fractal_kind not in {k.value for k in FractalKind}:
            return 'fractal_kind', f"unknown fractal_kind '{self.fractal_kind}'"
        if self.assignment_rule not in {r.value for r in AssignmentRule}:
            return 'assignment_rule', f"unknown assignment_rule '{self.assignment_rule}'"
        if self.grid_factor < 4:
            return 'grid_factor', f"grid_factor must be >= 4 (h <= delta/4), got {self.grid_factor}"
        if self.workers < 1:
            return 'workers', f"workers must be >= 1, got {self.workers}"
        if not self.output_dir:
            return 'output_dir', "output_dir must not be empty"
        return self._fractal_problem()

    def _fractal_problem(self) -> Optional[Tuple[str, str]]:
        """ 생성기 인자를 하나씩 (나머지는 FractalSpec 기본값) 검사해 틀린 키를 가리킵니다. """
        single = {'fractal_step': ('step', self.fractal_step),
                  'fractal_ratio': ('ratio', self.fractal_ratio),
                  'fractal_axes': ('axes', self.fractal_axes),
                  'fractal_maps': ('maps', self.fractal_maps)}
        for key, (name, value) in single.items():
            try:
                FractalSpec(kind=self.fractal_kind, n=self.n, **{name: value})
            except (DomainError, ValueError, ZeroDivisionError) as e:
                return key, f"invalid fractal parameters: {e}"
        try:
            self.fractal_spec()
        except DomainError as e:
            return 'fractal_kind', f"invalid fractal parameters: {e}"
        return None

    # --- 2. 파생 값 ---

    @property
    def h(self) -> float:
        return self.delta / self.grid_factor

    def fractal_spec(self) -> FractalSpec:
        return FractalSpec(kind=self.fractal_kind, n=self.n, step=self.fractal_step,
                           ratio=parse_fraction(self.fractal_ratio), axes=self.fractal_axes,
                           maps=self.fractal_maps, seed=self.sub_seed('fractal'))

    def sub_seed(self, name: str) -> int:
        """ (seed, crc32(name)) 로 만든 플랫폼 독립 하위 시드 """
        sequence = np.random.SeedSequence([self.seed, zlib.crc32(name.encode('utf-8'))])
        return int(sequence.generate_state(1)[0])

    def rng(self, name: str) -> np.random.Generator:
        return np.random.default_rng(self.sub_seed(name))

    # --- 3. 텍스트 형식 ---

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, KEY_TO_FIELD[key]) for key in DEFAULT_EXPERIMENT}

    def to_text(self) -> str:
        lines = ["# restricted Kakeya experiment"]
        for key, value in self.to_dict().items():
            lines.append(f"{key} = {value!r}" if isinstance(value, float) else f"{key} = {value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> 'ExperimentConfig':
        """
        '#' 주석과 빈 줄을 건너뛰고 key = value 를 읽습니다.
        오류는 1부터 세는 줄 번호와 함께 ConfigError 로 올립니다.
        """
        values: Dict[str, Any] = {}
        seen_at: Dict[str, int] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError(f"expected 'key = value', got '{raw.strip()}'", line_no)
            key, value = (part.strip() for part in line.split('=', 1))
            if key not in DEFAULT_EXPERIMENT:
                raise ConfigError(f"unknown key '{key}'", line_no)
            if key in seen_at:
                raise ConfigError(f"duplicate key '{key}' (first set on line {seen_at[key]})", line_no)
            seen_at[key] = line_no
            values[KEY_TO_FIELD[key]] = _convert(key, value, line_no)

        # 범위 검사는 기본값과 합친 뒤에 하고, 문제 키가 적힌 줄을 가리킵니다.
        problem = _first_problem(values)
        if problem:
            key, message = problem
            raise ConfigError(message, seen_at.get(key))
        config = cls(**values)
        LOGGER.debug(f"Experiment config parsed: {config.to_dict()}")
        return config


def _first_problem(values: Dict[str, Any]) -> Optional[Tuple[str, str]]:
    draft = object.__new__(ExperimentConfig)
    merged = {KEY_TO_FIELD[k]: v for k, v in DEFAULT_EXPERIMENT.items()}
    merged.update(values)
    for name, value in merged.items():
        object.__setattr__(draft, name, value)
    return draft.range_problem()


def _convert(key: str, value: str, line_no: int) -> Any:
    default = DEFAULT_EXPERIMENT[key]
    try:
        if key == 'fractal_ratio':
            return str(parse_fraction(value))
        if isinstance(default, int):
            return int(value)
        if isinstance(default, float):
            return float(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"'{key}' expects a {type(default).__name__}, got '{value}'", line_no) from None
    if not value:
        raise ConfigError(f"'{key}' must not be empty", line_no)
    return value


def load_config(path: Optional[str]) -> ExperimentConfig:
    """ 경로가 없으면 기본 설정을 돌려줍니다. """
    if path is None:
        return ExperimentConfig()
    with open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    LOGGER.info(f"Loading experiment config from {path}")
    return ExperimentConfig.from_text(text)
