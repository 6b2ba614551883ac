import numpy as np
import pytest

from controllers.bounds_controller import BoundsController
from models.base_model import DomainError
from models.bounds_model import BaseEstimateLibrary, piecewise_curve, sample_points
from models.fractal_model import FractalSpec, box_dimension_fit, generate
from models.geometry_model import Tube, VoxelSet, greedy_net
from models.maximal_model import WeakNormReport
from utils.file_handler import VOXEL_MAGIC, FileHandler

# 2026-10-17 - 제한 카케야 실험실 - 파일 입출력 테스트
# 파일 위치: tests/test_file_handler.py - v1


@pytest.fixture
def fh():
    return FileHandler()


def read_lines(path):
    return path.read_text(encoding='utf-8').splitlines()


class TestVoxels:

    def test_exact_text(self, fh, tmp_path):
        g = VoxelSet(origin=[0.0, 0.0], h=0.5, occupancy=[[1, 1, 0], [0, 0, 1]])
        path = tmp_path / "k.vox"
        assert fh.export_voxels(str(path), g)
        assert read_lines(path) == [VOXEL_MAGIC, "n 2", "h 0.5", "origin 0 0", "upper 1 1.5",
                                    "shape 2 3", "runs 4", "0 2 3 1"]

    @pytest.mark.parametrize("first_occupied", [True, False])
    def test_round_trip(self, fh, tmp_path, first_occupied):
        rng = np.random.default_rng(1)
        g = VoxelSet.empty([-0.5, -0.25, 0.0], [0.5, 0.25, 0.3], 0.05)
        g.occupancy[:] = rng.random(g.shape) < 0.4
        g.occupancy.reshape(-1)[0] = first_occupied
        path = str(tmp_path / "k.vox")
        fh.export_voxels(path, g)
        back = fh.import_voxels(path)
        assert back.same_grid(g)
        np.testing.assert_array_equal(back.occupancy, g.occupancy)

    def test_empty_set(self, fh, tmp_path):
        g = VoxelSet.empty([0, 0], [1, 1], 0.25)
        path = tmp_path / "empty.vox"
        fh.export_voxels(str(path), g)
        assert read_lines(path)[-2:] == ["runs 1", "16"]
        assert fh.import_voxels(str(path)).count() == 0

    def test_rejects_bad_files(self, fh, tmp_path):
        path = tmp_path / "bad.vox"
        path.write_text("not a voxel file\n", encoding='utf-8')
        with pytest.raises(DomainError):
            fh.import_voxels(str(path))
        path.write_text("\n".join([VOXEL_MAGIC, "n 1", "h 0.5", "origin 0", "upper 1", "shape 2",
                                   "runs 2", "1 2"]) + "\n", encoding='utf-8')
        with pytest.raises(DomainError):
            fh.import_voxels(str(path))


class TestCurveFiles:

    def test_curve_csv(self, fh, tmp_path):
        curve = piecewise_curve(4)
        path = tmp_path / "curve_n4.csv"
        assert fh.export_curve(str(path), curve, sample_points(curve, '1/2'))
        lines = read_lines(path)
        assert lines[0] == "s,bound,piece_index"
        assert "0,4,0" in lines
        assert "0.5,3.5,1" in lines
        assert "2,2.6,1" in lines
        assert lines[-1] == "4,2,2"

    def test_components_csv(self, fh, tmp_path):
        rows = BoundsController().curve_rows(4, '1/2')
        path = tmp_path / "components.csv"
        fh.export_components(str(path), rows)
        lines = read_lines(path)
        assert lines[0] == "s,best,n_minus_s,transferred"
        assert "2,2.6,2,2.6" in lines

    def test_catalog_csv(self, fh, tmp_path):
        path = tmp_path / "catalog.csv"
        fh.export_catalog(str(path), BaseEstimateLibrary.default().catalog())
        lines = read_lines(path)
        assert lines[0] == "name,dim,p,q,h"
        assert "Wolff n=3,3,5/2,5/2,1/5" in lines
        assert len(lines) == 14


class TestTables:

    def test_net_round_trip(self, fh, tmp_path):
        net = greedy_net(3, 0.4, seed=2)
        path = str(tmp_path / "net.csv")
        assert fh.export_net(path, net)
        back = fh.import_net(path, separation=0.4)
        np.testing.assert_array_equal(back.vectors, net.vectors)
        assert back.is_separated()

    def test_tubes_with_bush_index(self, fh, tmp_path):
        tubes = [Tube((1.0, 0.0), (0.0, 0.0), 0.1), Tube((0.0, 1.0), (0.5, 0.0), 0.1)]
        path = tmp_path / "tubes.csv"
        fh.export_tubes(str(path), tubes, [0, 1])
        lines = read_lines(path)
        assert lines[0] == "bush,e1,e2,a1,a2,radius"
        assert lines[2] == "1,0,1,0.5,0,0.10000000000000001"

    def test_models(self, fh, tmp_path):
        path = tmp_path / "weak.csv"
        fh.export_models(str(path), WeakNormReport, [WeakNormReport(delta=0.25, norm=1.5, lambda_star=0.5)])
        lines = read_lines(path)
        assert lines[0] == "delta,norm,lambda_star,normalized"
        assert lines[1] == "0.25,1.5,0.5,"

    def test_dimension_fit(self, fh, tmp_path):
        scales = [3.0 ** -k for k in range(3, 6)]
        fit = box_dimension_fit(generate(FractalSpec(kind='cantor_product', n=1), scales[-1]), scales)
        path = tmp_path / "fit.csv"
        assert fh.export_dimension_fit(str(path), fit)
        assert read_lines(path)[0] == f"# {fit.summary()}"
        table = fh.import_dimension_fit(str(path))
        assert list(table.columns) == ['delta', 'count']
        assert table['count'].tolist() == list(fit.counts)

    def test_points_round_trip(self, fh, tmp_path):
        points = np.random.default_rng(0).uniform(-1, 1, (5, 2))
        path = str(tmp_path / "points.csv")
        fh.export_points(path, points)
        np.testing.assert_array_equal(fh.import_points(path), points)

    def test_unwritable_path(self, fh, tmp_path):
        missing = str(tmp_path / "no" / "such" / "dir" / "out.csv")
        assert fh.export_records(missing, [{'a': 1}]) is False
        assert fh.write_text(missing, "x") is False
        assert fh.export_voxels(missing, VoxelSet.empty([0], [1], 0.5)) is False
