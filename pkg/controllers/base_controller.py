from typing import Optional

from models.bounds_model import BaseEstimateLibrary
from models.settings_model import ExperimentConfig
from utils.file_handler import FileHandler
from utils.logger import setup_logger

# 2026-10-17 - 제한 카케야 실험실 - 모든 컨트롤러의 기반 클래스
# 파일 위치: controllers/base_controller.py - v1
# 목적: 실험 설정, 기반 추정식 목록, 파일 처리기를 공유하고 하위 시드를 나눠 줌

LOGGER = setup_logger()


class BaseController:
    """
    모든 컨트롤러 클래스가 상속받는 기반 클래스입니다.
    하나의 실험 설정과 추정식 목록을 공유하고, 모든 난수는 설정의 이름별 하위 시드에서 나옵니다.
    """

    def __init__(self, config: Optional[ExperimentConfig] = None,
                 library: Optional[BaseEstimateLibrary] = None):
        self.config: ExperimentConfig = config or ExperimentConfig()
        self.library: BaseEstimateLibrary = library or BaseEstimateLibrary.default()
        self.file_handler: FileHandler = FileHandler()
        LOGGER.debug(f"{self.__class__.__name__} initialized (seed={self.config.seed}, workers={self.config.workers}).")

    # --- 공통 유틸리티 ---

    def sub_seed(self, name: str) -> int:
        return self.config.sub_seed(name)

    def prepare_output(self, directory: str) -> bool:
        """ 출력 디렉토리를 만들고 성공 여부를 반환합니다. """
        return self.file_handler.ensure_dir(directory)
