from typing import List, Dict, Any, Iterable, Optional
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - 모든 모델의 기반 클래스와 예외 계층
# 파일 위치: models/base_model.py - v1
# 목적: 공통 레코드 변환(CSV 내보내기용)과 도메인 예외 정의

LOGGER = setup_logger()


# --- 예외 계층 ---

class KakeyaLabError(Exception):
    """ 실험실 내부에서 발생하는 모든 오류의 최상위 클래스입니다. """


class DomainError(KakeyaLabError, ValueError):
    """ 수학적 정의역 밖의 인자 (p <= 1, s 가 [0, n] 밖 등). """


class PreconditionError(KakeyaLabError, ValueError):
    """ 연산의 사전조건 위반 (빈 A, x0 를 포함하지 않는 튜브 등). """


class VerificationError(KakeyaLabError):
    """ 내부 검증 실패. 조용히 넘기지 않고 반드시 올려 보냅니다. """


class ConfigError(KakeyaLabError):
    """ 설정 파일 오류. line_no 는 1부터 시작하는 줄 번호입니다. """

    def __init__(self, message: str, line_no: Optional[int] = None):
        self.line_no = line_no
        prefix = f"line {line_no}: " if line_no is not None else ""
        super().__init__(prefix + message)


# --- 레코드 기반 클래스 ---

class BaseModel:
    """
    CSV 로 내보낼 수 있는 모든 결과 모델이 상속받는 기반 클래스입니다.
    상속받는 클래스는 FIELDS 에 내보낼 컬럼 순서를 정의하고 to_record 를 구현합니다.
    """

    # 상속받는 클래스에서 반드시 재정의해야 하는 클래스 변수
    FIELDS: List[str] = []

    def to_record(self) -> Dict[str, Any]:
        raise NotImplementedError(f"{self.__class__.__name__} must implement to_record().")

    @classmethod
    def to_records(cls, items: Iterable['BaseModel']) -> List[Dict[str, Any]]:
        """
        모델 리스트를 FIELDS 순서를 따르는 딕셔너리 리스트로 변환합니다.
        """
        if not cls.FIELDS:
            LOGGER.error(f"BaseModel export error: FIELDS not set in {cls.__name__}")
            # 개발 단계에서 바로 잡아야 하는 오류이므로 raise
            raise NotImplementedError("FIELDS must be defined in the derived class.")
        records = []
        for item in items:
            record = item.to_record()
            records.append({field: record.get(field) for field in cls.FIELDS})
        return records
