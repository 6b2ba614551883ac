import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from models.base_model import DomainError, PreconditionError
from models.geometry_model import (
    Direction, ParallelogramSlab, SphericalNet, Tube, VoxelSet, analytic_tube_volume, annulus_slices,
    direction_distance, exact_intersection_area_2d, fold_antipodal, greedy_net, intersection_stats,
    map_in_slots, pairwise_overlap_sum, raster_convergence, rasterize_ball, rasterize_tube,
    rasterize_tubes, slab_average, slab_membership, sphere_measure, tube_cells, tube_pair_statistics,
    unit_ball_volume,
)

# 2026-10-17 - 제한 카케야 실험실 - 기하 엔진 테스트
# 파일 위치: tests/test_geometry_model.py - v1


def horizontal_tube(delta=0.1, midpoint=(0.0, 0.0)):
    return Tube(Direction((1.0, 0.0)), midpoint, delta)


class TestVolumes:

    def test_unit_ball_volume(self):
        assert_allclose(unit_ball_volume(1), 2.0)
        assert_allclose(unit_ball_volume(2), math.pi)
        assert_allclose(unit_ball_volume(3), 4 * math.pi / 3)
        assert_allclose(sphere_measure(3), 4 * math.pi)

    def test_analytic_tube_volume_plane(self):
        assert_allclose(analytic_tube_volume(0.1, 2), 0.2 + math.pi * 0.01)

    def test_negative_radius(self):
        with pytest.raises(DomainError):
            analytic_tube_volume(-0.1, 2)


class TestDirectionsAndTubes:

    def test_direction_requires_unit_norm(self):
        with pytest.raises(DomainError):
            Direction((1.0, 1.0))

    def test_direction_from_vector(self):
        assert_allclose(Direction.from_vector([3, 4]).coords, (0.6, 0.8))
        with pytest.raises(DomainError):
            Direction.from_vector([0, 0])

    def test_tube_validation(self):
        with pytest.raises(DomainError):
            Tube(Direction((1.0, 0.0)), (0.0, 0.0), 1.0)
        with pytest.raises(DomainError):
            Tube(Direction((1.0, 0.0)), (0.0, 0.0, 0.0), 0.1)

    def test_tube_contains_caps(self):
        t = horizontal_tube()
        inside = t.contains([[0.5, 0.05], [0.55, 0.0], [0.0, 0.1], [0.61, 0.0], [0.0, 0.11]])
        assert inside.tolist() == [True, True, True, False, False]

    def test_folded_distance_identifies_antipodes(self):
        e = np.array([0.6, 0.8])
        assert_allclose(direction_distance(e, -e), 2.0)
        assert_allclose(direction_distance(e, -e, fold=True), 0.0)


class TestNets:

    def test_greedy_net_circle_is_separated_and_maximal_sized(self):
        net = greedy_net(2, 0.1, seed=3)
        assert net.is_separated()
        # 극대 분리 집합: 인접 간격은 delta 초과 2.2 delta 미만
        assert 2 * math.pi / (2.2 * 0.1) <= len(net) < 2 * math.pi / 0.1

    def test_wide_separation_leaves_four_directions(self):
        # 현 길이 1.4 초과 = 각도 88.85도 초과: 원 위에 네 점까지만 들어감
        net = greedy_net(2, 1.4, seed=0)
        assert len(net) == 4
        assert net.is_separated()

    @pytest.mark.parametrize("n", [2, 3])
    def test_nearly_diameter_separation_leaves_antipodal_pair(self, n):
        net = greedy_net(n, 1.999, seed=0)
        assert len(net) == 2
        assert_allclose(net.vectors[0], -net.vectors[1])

    def test_greedy_net_is_deterministic(self):
        first = greedy_net(3, 0.3, seed=11)
        second = greedy_net(3, 0.3, seed=11)
        np.testing.assert_array_equal(first.vectors, second.vectors)
        assert first.is_separated()

    @pytest.mark.parametrize("n, delta", [(1, 0.1), (2, 0.0), (2, 2.0)])
    def test_greedy_net_domain(self, n, delta):
        with pytest.raises(DomainError):
            greedy_net(n, delta, seed=0)

    def test_fold_keeps_one_of_each_pair(self):
        net = greedy_net(2, 0.2, seed=5)
        folded = fold_antipodal(net)
        assert folded.folded
        assert len(folded) < len(net)
        assert folded.is_separated()
        for v in folded.vectors:
            first = v[np.abs(v) > 1e-12][0]
            assert first > 0
        assert fold_antipodal(folded) is folded

    def test_quadrature_weight(self):
        net = SphericalNet(vectors=[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], separation=1.0)
        assert_allclose(net.quadrature_weight(), 2 * math.pi / 4)
        folded = SphericalNet(vectors=[[1.0, 0.0], [0.0, 1.0]], separation=1.0, folded=True)
        assert_allclose(folded.quadrature_weight(), math.pi)

    def test_net_rejects_non_unit_vectors(self):
        with pytest.raises(DomainError):
            SphericalNet(vectors=[[1.0, 1.0]], separation=0.1)


class TestVoxelSet:

    def test_empty_grid_shape(self):
        g = VoxelSet.empty([0, 0], [1, 0.5], 0.125)
        assert g.shape == (8, 4)
        assert g.count() == 0
        assert_allclose(g.upper, [1.0, 0.5])

    def test_set_algebra(self):
        a = VoxelSet.empty([0, 0], [1, 1], 0.25)
        b = a.like()
        a.occupancy[0, :2] = True
        b.occupancy[0, 1:3] = True
        assert a.union(b).count() == 3
        assert a.intersection(b).count() == 1
        assert a.difference(b).count() == 1
        assert_allclose(a.union(b).measure(), 3 * 0.0625)

    def test_grid_mismatch(self):
        a = VoxelSet.empty([0, 0], [1, 1], 0.25)
        b = VoxelSet.empty([0, 0], [1, 1], 0.125)
        with pytest.raises(PreconditionError):
            a.union(b)

    def test_centers_and_cell_index(self):
        g = VoxelSet.empty([-1, -1], [1, 1], 0.5)
        assert_allclose(g.centers([0]), [[-0.75, -0.75]])
        index, inside = g.cell_index([[0.1, 0.1], [2.0, 0.0]])
        assert index[0].tolist() == [2, 2]
        assert inside.tolist() == [True, False]


class TestRasterize:

    def test_tube_measure_close_to_analytic(self):
        rows = raster_convergence(horizontal_tube(0.1), factors=(4, 16))
        assert rows[0]['relative_error'] < 0.10
        assert rows[1]['relative_error'] < 0.05

    def test_coarse_grid_is_rejected(self):
        g = VoxelSet.empty([-1, -1], [1, 1], 0.1)
        with pytest.raises(PreconditionError):
            rasterize_tube(horizontal_tube(0.1), g)

    def test_cells_are_not_double_counted(self):
        t = Tube(Direction.from_vector([1, 2]), (0.0, 0.0), 0.05)
        g = VoxelSet.empty([-1, -1], [1, 1], 0.0125)
        cells = tube_cells(t, g)
        assert len(np.unique(cells.indices)) == len(cells.indices)
        assert cells.total == len(cells.indices)

    def test_clipped_tube_keeps_inside_cells(self):
        g = VoxelSet.empty([0, -0.2], [1, 0.2], 0.025)
        cells = tube_cells(horizontal_tube(0.1), g)
        assert cells.total > len(cells.indices) > 0

    def test_workers_do_not_change_result(self):
        rng = np.random.default_rng(0)
        tubes = [Tube(Direction.from_vector(rng.standard_normal(2)), rng.uniform(-0.2, 0.2, 2), 0.05)
                 for _ in range(12)]
        serial = rasterize_tubes(tubes, VoxelSet.empty([-1, -1], [1, 1], 0.0125), workers=1)
        parallel = rasterize_tubes(tubes, VoxelSet.empty([-1, -1], [1, 1], 0.0125), workers=4)
        np.testing.assert_array_equal(serial.occupancy, parallel.occupancy)

    def test_rasterize_ball(self):
        g = rasterize_ball([0.0, 0.0], 0.5, VoxelSet.empty([-1, -1], [1, 1], 0.01))
        assert_allclose(g.measure(), math.pi * 0.25, rtol=0.02)

    def test_map_in_slots_preserves_order(self):
        assert map_in_slots(lambda i: i * i, 6, workers=3) == [0, 1, 4, 9, 16, 25]


class TestIntersections:

    def test_too_few_samples(self):
        t = horizontal_tube(0.05)
        with pytest.raises(PreconditionError):
            intersection_stats(t, t, 2, samples=999)

    def test_radius_mismatch(self):
        with pytest.raises(PreconditionError):
            intersection_stats(horizontal_tube(0.05), horizontal_tube(0.06), 2, samples=2000)

    def test_perpendicular_tubes(self):
        t1 = horizontal_tube(0.05)
        t2 = Tube(Direction((0.0, 1.0)), (0.0, 0.0), 0.05)
        stats = intersection_stats(t1, t2, 2, samples=20000, seed=1)
        assert_allclose(stats.theta, math.pi / 2)
        assert_allclose(stats.measure, 4 * 0.05 ** 2, rtol=0.15)
        assert stats.diameter <= 2 * math.sqrt(2) * 0.05 + 1e-9
        assert set(stats.to_record()) == set(stats.FIELDS)

    def test_exact_area_of_perpendicular_cores(self):
        t1 = horizontal_tube(0.05)
        t2 = Tube(Direction((0.0, 1.0)), (0.0, 0.0), 0.05)
        assert_allclose(exact_intersection_area_2d(t1, t2), 4 * 0.05 ** 2)

    def test_overlap_sum_of_single_tube(self):
        assert_allclose(pairwise_overlap_sum([horizontal_tube(0.05)]), 0.1)
        assert pairwise_overlap_sum([]) == 0.0

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [2, 3])
    def test_random_pairs_obey_constant_bounds(self, n):
        delta = 2.0 ** -5
        stats = tube_pair_statistics(n, delta, 200, seed=n)
        assert len(stats) == 200
        assert all(s.measure >= 0 for s in stats)
        assert max(s.measure_constant for s in stats) <= 32
        assert max(s.diameter_constant for s in stats) <= 32


class TestSlabAndAnnulus:

    def test_slab_membership(self):
        slab = ParallelogramSlab(Direction((0.0, 1.0)), (0.0, 0.0), (0.5, 0.0), 0.05)
        assert slab_membership(slab, [0.25, 0.0])
        assert slab_membership(slab, [0.25, 0.54])
        assert not slab_membership(slab, [0.25, 0.6])
        assert not slab_membership(slab, [-0.1, 0.0])

    def test_degenerate_slab_is_a_segment(self):
        slab = ParallelogramSlab(Direction((1.0, 0.0)), (0.0, 0.0), (0.25, 0.0), 0.05)
        assert slab_membership(slab, [0.7, 0.0])
        assert not slab_membership(slab, [0.85, 0.0])

    def test_slab_average_of_full_grid(self):
        g = VoxelSet.empty([-1, -1], [1, 1], 0.025)
        g.occupancy[:] = True
        slab = ParallelogramSlab(Direction((0.0, 1.0)), (0.0, 0.0), (0.3, 0.0), 0.05)
        assert slab_average(slab, g) == 1.0
        assert slab_average(slab, g.like()) == 0.0

    def test_annulus_requires_common_point(self):
        with pytest.raises(PreconditionError):
            annulus_slices([horizontal_tube(0.05, midpoint=(0.0, 0.5))], [0.0, 0.0], 0.05)
        with pytest.raises(PreconditionError):
            annulus_slices([], [0.0, 0.0], 0.05)

    def test_annulus_shells_cover_the_bush(self):
        tubes = [Tube(Direction.from_vector([math.cos(a), math.sin(a)]), (0.0, 0.0), 0.05)
                 for a in np.linspace(0, math.pi, 6, endpoint=False)]
        report = annulus_slices(tubes, [0.0, 0.0], 0.05)
        total = report.core_measure + sum(s.measure for s in report.shells)
        assert_allclose(total, report.bush_measure)
        assert report.max_constant < 16

    def test_slab_with_equal_segments_is_the_tube(self):
        rng = np.random.default_rng(4)
        e = Direction.from_vector([0.6, 0.8])
        x1 = (0.1, -0.2)
        slab = ParallelogramSlab(e, x1, x1, 0.05)
        tube = Tube(e, x1, 0.05)
        points = np.asarray(x1) + rng.uniform(-0.6, 0.6, (200, 2))
        expected = tube.contains(points)
        assert expected.any() and not expected.all()
        assert [slab_membership(slab, p) for p in points] == expected.tolist()

    def test_single_tube_shells_match_strip_area(self):
        # 반지름 2^k delta 와 2^{k+1} delta 사이의 폭 2 delta 띠: 넓이 약 4 * 2^k delta^2
        delta = 2.0 ** -5
        report = annulus_slices([horizontal_tube(delta)], [0.0, 0.0], delta)
        for shell in report.shells[1:4]:
            assert_allclose(shell.measure, 4 * 2 ** shell.k * delta ** 2, rtol=0.12)
        assert report.shells[-1].measure == 0.0
        assert report.shells[-2].measure == 0.0
