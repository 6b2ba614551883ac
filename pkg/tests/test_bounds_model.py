from fractions import Fraction

import pytest

from models.base_model import DomainError
from models.bounds_model import (
    BaseEstimateLibrary, EstimateFlavor, MaximalEstimate, Piece, PiecewiseBound,
    best_lower_bound, classical_estimate, curve_components, dimension_bound_from_estimate,
    dual_exponent, g_function, interpolate, piecewise_curve, reference_kakeya_bound,
    restricted_estimate_from_box_dimension, sample_points, transfer_to_restricted,
    validate_necessary_condition, w_exponent,
)

# 2026-10-17 - 제한 카케야 실험실 - bounds 모델 테스트
# 파일 위치: tests/test_bounds_model.py - v1

F = Fraction
WOLFF = classical_estimate(3, F(5, 2), 'Wolff n=3')
CORDOBA = classical_estimate(2, 2, 'Cordoba n=2')


def brute_force_w(m):
    values = []
    for t in range(2, m + 1):
        values.append(max(F(2 * m, m * m - m + t * t - t), F(1, m + 1 - t)))
    return 1 + min(values)


class TestExponents:

    def test_w_exponent_nine(self):
        assert w_exponent(9) == F(6, 5)
        assert dual_exponent(w_exponent(9)) == 6

    @pytest.mark.parametrize("m", range(2, 31))
    def test_w_exponent_matches_brute_force(self, m):
        assert w_exponent(m) == brute_force_w(m)

    @pytest.mark.parametrize("p", [1 + F(k, 16) for k in range(1, 65)] + [F(7, 6), F(19, 5), F(1001, 1000), F(100)])
    def test_dual_is_involution(self, p):
        assert dual_exponent(dual_exponent(p)) == p
        assert 1 / p + 1 / dual_exponent(p) == 1

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            w_exponent(1)
        with pytest.raises(DomainError):
            dual_exponent(1)

    def test_float_exponents_are_rejected(self):
        with pytest.raises(TypeError):
            MaximalEstimate(ambient_dim=3, p=2.5, q=2.5, h=0.2)


class TestEstimates:

    def test_wolff_meets_necessary_condition_with_equality(self):
        assert WOLFF.h == F(1, 5)
        assert (1 + WOLFF.h) * WOLFF.p == 3
        assert validate_necessary_condition(WOLFF)

    def test_catalog_entries_pass_necessary_condition(self):
        catalog = BaseEstimateLibrary.default().catalog()
        assert len(catalog) == 2 + 11
        assert all(validate_necessary_condition(e) for e in catalog)

    def test_library_rejects_violating_entry(self):
        bad = MaximalEstimate(ambient_dim=3, p=F(5, 2), q=F(5, 2), h=F(0), source='too good')
        with pytest.raises(DomainError):
            BaseEstimateLibrary(entries=(bad,))

    def test_q_below_p_is_rejected(self):
        with pytest.raises(DomainError):
            MaximalEstimate(ambient_dim=3, p=F(3), q=F(2), h=F(0))

    def test_interpolation_towards_p_one(self):
        est = interpolate(WOLFF, 2)
        assert est.p == 2
        assert est.q == 3
        assert est.h == F(1, 2)
        with pytest.raises(DomainError):
            interpolate(WOLFF, 3)

    def test_hrz_entry_for_nine(self):
        est = BaseEstimateLibrary.hrz(9)
        assert est.p == 6
        assert est.h == F(1, 2)

    def test_best_base_prefers_explicit_entry_on_ties(self):
        lib = BaseEstimateLibrary.default()
        assert lib.best_base(2).source == 'Cordoba n=2'
        assert lib.best_base(3).source == 'Wolff n=3'
        assert lib.best_base(1) is None

    def test_catalog_record(self):
        assert WOLFF.to_record() == {'name': 'Wolff n=3', 'dim': 3, 'p': '5/2', 'q': '5/2', 'h': '1/5'}


class TestTransfer:

    @pytest.mark.parametrize("k", range(33))
    def test_wolff_transfer_identity(self, k):
        s = F(k, 8)
        est = transfer_to_restricted(WOLFF, 4, s)
        assert est.p == F(19, 5)
        assert est.beta == (1 + 3 * s) / 19
        assert dimension_bound_from_estimate(est, 4) == F(19, 5) - F(3, 5) * s
        assert 4 - g_function(WOLFF, s) == F(19, 5) - F(3, 5) * s

    def test_cordoba_transfer(self):
        est = transfer_to_restricted(CORDOBA, 3, 1)
        assert (est.p, est.beta) == (3, F(1, 6))
        est = transfer_to_restricted(CORDOBA, 4, 1)
        assert (est.p, est.beta) == (F(7, 2), F(1, 7))
        assert est.flavor == EstimateFlavor.RESTRICTED_WEAK

    def test_transfer_rejects_s_outside_range(self):
        with pytest.raises(DomainError):
            transfer_to_restricted(WOLFF, 4, 5)

    def test_box_dimension_estimate_gives_n_minus_s(self):
        for n, s in ((2, F(0)), (3, F(1)), (4, F(5, 2))):
            est = restricted_estimate_from_box_dimension(n, s)
            assert dimension_bound_from_estimate(est, n) == n - s

    def test_strong_estimate_has_no_dimension_bound(self):
        with pytest.raises(DomainError):
            dimension_bound_from_estimate(WOLFF, 4)


class TestCurves:

    def test_four_dimensional_curve(self):
        curve = piecewise_curve(4)
        assert curve.evaluate(0) == 4
        assert curve.evaluate(F(1, 2)) == F(7, 2)
        assert curve.evaluate(2) == F(13, 5)
        assert curve.evaluate(3) == 2
        assert curve.breakpoints() == [F(1, 2), F(3)]
        assert curve.describe_piece(0) == '4 - s'
        assert curve.describe_piece(1) == '19/5 - 3/5 s'
        assert curve.describe_piece(2) == '2'

    def test_ten_dimensional_curve(self):
        curve = piecewise_curve(10)
        assert curve.evaluate(0) == 10
        assert curve.evaluate(3) == 7
        assert curve.evaluate(9) == 2
        assert curve.breakpoints() == [F(3), F(9)]
        assert curve.describe_piece(1) == '19/2 - 5/6 s'

    def test_three_dimensional_curve_has_single_breakpoint(self):
        curve = piecewise_curve(3)
        assert curve.breakpoints() == [F(2)]
        assert curve.evaluate(0) == 3
        assert curve.evaluate(1) == F(5, 2)

    @pytest.mark.parametrize("n", range(3, 13))
    def test_curve_agrees_with_best_lower_bound(self, n):
        curve = piecewise_curve(n)
        points = sample_points(curve, F(1, 16))
        assert all(F(k, 16) in points for k in range(16 * n + 1))
        for s in points:
            assert curve.evaluate(s) == best_lower_bound(n, s)
            assert curve.evaluate(s) >= n - s

    def test_best_lower_bound_edge_cases(self):
        assert best_lower_bound(2, F(1, 2)) == F(3, 2)
        assert best_lower_bound(4, F(7, 2)) == 2
        assert best_lower_bound(10, 10) == 2
        with pytest.raises(DomainError):
            best_lower_bound(4, 5)
        with pytest.raises(DomainError):
            best_lower_bound(1, 0)

    def test_sample_points_include_breakpoints(self):
        points = sample_points(piecewise_curve(4), F(1, 3))
        assert F(1, 2) in points and F(3) in points
        assert points[0] == 0 and points[-1] == 4
        assert points == sorted(set(points))

    def test_components(self):
        parts = curve_components(4, 2)
        assert parts == {'n_minus_s': 2, 'transferred': F(13, 5)}

    def test_invalid_piecewise_bounds(self):
        with pytest.raises(DomainError):
            PiecewiseBound(n=2, pieces=(Piece(0, 1, 2, -1), Piece(1, 2, 2, 0)))
        with pytest.raises(DomainError):
            PiecewiseBound(n=2, pieces=(Piece(0, 2, 2, 1),))

    def test_reference_constants(self):
        assert reference_kakeya_bound(2) == 2
        assert reference_kakeya_bound(3) == 3
        assert reference_kakeya_bound(4) == pytest.approx(3.059)
