import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from models.base_model import DomainError
from models.geometry_model import SphericalNet, Tube, VoxelSet
from utils.logger import setup_logger
from utils.number_format import format_exact

# 2026-10-17 - 제한 카케야 실험실 - 파일 입출력 유틸리티
# 파일 위치: utils/file_handler.py - v1
# 목적: 모든 결과의 CSV 입출력(pandas), 복셀 집합 RLE 형식, 텍스트 파일 처리

LOGGER = setup_logger()

FLOAT_FORMAT = '%.17g'
VOXEL_MAGIC = '# kakeya-voxels v1'


class FileHandler:
    """
    실험 결과를 CSV/텍스트 파일로 내보내고 다시 읽어오는 유틸리티 클래스입니다.
    내보내기 함수는 성공 여부(bool)를 반환하고 실패 원인은 로그로 남깁니다.
    """

    # --- 1. 공통 ---

    @staticmethod
    def ensure_dir(path: str) -> bool:
        try:
            os.makedirs(path, exist_ok=True)
            return True
        except OSError as e:
            LOGGER.error(f"Cannot create output directory {path}: {e}")
            return False

    def export_records(self, file_path: str, records: List[Dict[str, Any]],
                       columns: Optional[Sequence[str]] = None) -> bool:
        """
        딕셔너리 리스트를 CSV 로 저장합니다. 빈 리스트도 헤더만 있는 파일로 저장합니다.
        """
        try:
            df = pd.DataFrame(records, columns=list(columns) if columns else None)
            df.to_csv(file_path, index=False, float_format=FLOAT_FORMAT,
                      lineterminator='\n', encoding='utf-8')
            LOGGER.info(f"Exported {len(df)} rows to {file_path}")
            return True
        except OSError as e:
            LOGGER.error(f"Failed to export CSV {file_path}: {e}")
            return False

    @staticmethod
    def read_csv(file_path: str, **kwargs) -> pd.DataFrame:
        return pd.read_csv(file_path, encoding='utf-8', **kwargs)

    @staticmethod
    def write_text(file_path: str, text: str) -> bool:
        try:
            with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(text)
            LOGGER.info(f"Wrote {file_path}")
            return True
        except OSError as e:
            LOGGER.error(f"Failed to write {file_path}: {e}")
            return False

    @staticmethod
    def read_text(file_path: str) -> str:
        with open(file_path, 'r', encoding='utf-8') as f:
            return f.read()

    # --- 2. bounds ---

    def export_curve(self, file_path: str, curve, points) -> bool:
        """ s,bound,piece_index (정확한 유리수 표기) """
        records = [{'s': format_exact(s), 'bound': format_exact(curve.evaluate(s)),
                    'piece_index': curve.piece_index(s)} for s in points]
        return self.export_records(file_path, records, ['s', 'bound', 'piece_index'])

    def export_components(self, file_path: str, rows: List[Dict[str, Any]],
                          reference: Optional[float] = None) -> bool:
        """
        s,best,n_minus_s,transferred: 두 구성 곡선과 최종 하한.
        reference 가 있으면 비제한 카케야 참고 상수를 reference 열로 덧붙입니다 (표시 전용).
        """
        records = [{key: format_exact(value) for key, value in row.items()} for row in rows]
        columns = ['s', 'best', 'n_minus_s', 'transferred']
        if reference is not None:
            columns.append('reference')
            for record in records:
                record['reference'] = repr(float(reference))
        return self.export_records(file_path, records, columns)

    def export_catalog(self, file_path: str, estimates) -> bool:
        records = [estimate.to_record() for estimate in estimates]
        return self.export_records(file_path, records, ['name', 'dim', 'p', 'q', 'h'])

    # --- 3. geometry ---

    def export_net(self, file_path: str, net: SphericalNet) -> bool:
        columns = [f"x{i + 1}" for i in range(net.n)]
        df = pd.DataFrame(net.vectors, columns=columns)
        return self.export_records(file_path, df.to_dict('records'), columns)

    def import_net(self, file_path: str, separation: float, folded: bool = False) -> SphericalNet:
        """ x1..xn 열을 읽어 넷을 복원합니다. 분리 조건은 호출 측에서 확인합니다. """
        df = self.read_csv(file_path, float_precision='round_trip')
        columns = [c for c in df.columns if c.startswith('x')]
        if not columns:
            raise DomainError(f"{file_path} has no x1..xn columns")
        return SphericalNet(vectors=df[columns].to_numpy(dtype=float), separation=separation,
                            maximal=False, folded=folded)

    def export_tubes(self, file_path: str, tubes: Sequence[Tube], bush_index: Optional[Sequence[int]] = None) -> bool:
        records = []
        for i, tube in enumerate(tubes):
            record = tube.to_record()
            if bush_index is not None:
                record = {'bush': bush_index[i], **record}
            records.append(record)
        return self.export_records(file_path, records)

    def export_points(self, file_path: str, points: np.ndarray) -> bool:
        points = np.atleast_2d(points)
        columns = [f"x{i + 1}" for i in range(points.shape[1])]
        return self.export_records(file_path, pd.DataFrame(points, columns=columns).to_dict('records'), columns)

    def import_points(self, file_path: str) -> np.ndarray:
        return self.read_csv(file_path, float_precision='round_trip').to_numpy(dtype=float)

    # --- 4. 복셀 집합 (RLE) ---

    def export_voxels(self, file_path: str, g: VoxelSet) -> bool:
        try:
            self.write_voxels(file_path, g)
            LOGGER.info(f"Exported voxel set ({g.count()} cells) to {file_path}")
            return True
        except OSError as e:
            LOGGER.error(f"Failed to export voxel set {file_path}: {e}")
            return False

    @staticmethod
    def write_voxels(file_path: str, g: VoxelSet):
        flat = g.occupancy.ravel(order='C').astype(np.int8)
        # 값이 바뀌는 위치로 런 길이를 구합니다. 첫 런은 항상 빈 셀(0)입니다.
        changes = np.flatnonzero(np.diff(flat)) + 1
        bounds = np.concatenate(([0], changes, [flat.size]))
        runs = np.diff(bounds).tolist()
        if flat.size and flat[0] == 1:
            runs = [0] + runs
        lines = [
            VOXEL_MAGIC,
            f"n {g.n}",
            "h " + FLOAT_FORMAT % g.h,
            "origin " + " ".join(FLOAT_FORMAT % x for x in g.origin),
            "upper " + " ".join(FLOAT_FORMAT % x for x in g.upper),
            "shape " + " ".join(str(s) for s in g.shape),
            f"runs {len(runs)}",
            " ".join(str(r) for r in runs),
        ]
        with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write("\n".join(lines) + "\n")

    def import_voxels(self, file_path: str) -> VoxelSet:
        lines = self.read_text(file_path).splitlines()
        if not lines or lines[0] != VOXEL_MAGIC:
            raise DomainError(f"{file_path} is not a voxel file (missing '{VOXEL_MAGIC}')")
        header = {}
        for line in lines[1:7]:
            key, _, value = line.partition(' ')
            header[key] = value
        n = int(header['n'])
        shape = tuple(int(x) for x in header['shape'].split())
        origin = np.array([float(x) for x in header['origin'].split()])
        runs = [int(x) for x in lines[7].split()] if len(lines) > 7 else []
        if len(shape) != n or len(origin) != n or len(runs) != int(header['runs']):
            raise DomainError(f"{file_path}: inconsistent voxel header")
        if sum(runs) != int(np.prod(shape)):
            raise DomainError(f"{file_path}: runs cover {sum(runs)} cells, grid has {int(np.prod(shape))}")
        values = np.arange(len(runs)) % 2
        flat = np.repeat(values.astype(bool), runs)
        return VoxelSet(origin=origin, h=float(header['h']), occupancy=flat.reshape(shape))

    # --- 5. maximal / bush / fractals ---

    def export_profile(self, file_path: str, profile) -> bool:
        n = profile.net.n
        columns = [f"e{i + 1}" for i in range(n)] + ['value']
        data = np.column_stack([profile.net.vectors, profile.values])
        return self.export_records(file_path, pd.DataFrame(data, columns=columns).to_dict('records'), columns)

    def export_models(self, file_path: str, model_cls, items) -> bool:
        """ BaseModel 하위 클래스 목록을 FIELDS 순서로 내보냅니다. """
        return self.export_records(file_path, model_cls.to_records(items), model_cls.FIELDS)

    def export_dimension_fit(self, file_path: str, fit) -> bool:
        """ delta,count 표 앞에 '# ' 로 시작하는 한 줄 요약을 붙입니다. """
        try:
            df = pd.DataFrame(fit.rows(), columns=fit.FIELDS)
            body = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
            with open(file_path, 'w', encoding='utf-8', newline='\n') as f:
                f.write(f"# {fit.summary()}\n")
                f.write(body)
            LOGGER.info(f"Exported dimension fit to {file_path}")
            return True
        except OSError as e:
            LOGGER.error(f"Failed to export dimension fit {file_path}: {e}")
            return False

    def import_dimension_fit(self, file_path: str) -> pd.DataFrame:
        return self.read_csv(file_path, comment='#')
