import os
import sys

# 2026-10-17 - 제한 카케야 실험실 - pytest 공용 설정
# 파일 위치: conftest.py - v1
# 목적: 저장소 루트를 import 경로에 추가 (from config import ... 형태의 최상위 import)

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
