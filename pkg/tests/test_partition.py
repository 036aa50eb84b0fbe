import math

import numpy as np
import pytest

from momentbounds.errors import DegenerateCell, ParameterOutOfRange, QuadratureBudgetExceeded
from momentbounds.models import LognormalModel, bs_call_price, lognormal_partial_moment, norm_cdf
from momentbounds.partition import (
    ConditionalMoments,
    LinearPartition,
    PartitionKind,
    PartitionSpec,
    flat_conditional_moments,
    flat_refined_bound,
    linear_conditional_moments,
    linear_partition_functions,
    linear_refined_bound,
    partition_moment_matrix,
    quadrature_partial_moment,
    refined_bound,
)
from momentbounds.vanilla import vanilla_bound

MODEL = LognormalModel(1.0, 0.4, 1.0)
FIG_BOUNDARIES_6 = np.linspace(0.5, 2.5, 5)
FIG_BOUNDARIES_30 = np.linspace(0.1, 2.9, 29)
EVAL_STRIKES = np.linspace(0.4, 2.6, 23)


class TestPartitionSpec:
    def test_flat_cells(self):
        spec = PartitionSpec(PartitionKind.FLAT, FIG_BOUNDARIES_6)
        assert spec.cell_count == 6

    def test_linear_needs_two_strikes(self):
        with pytest.raises(ParameterOutOfRange):
            PartitionSpec(PartitionKind.LINEAR, [1.0])

    def test_grid_must_increase(self):
        with pytest.raises(ParameterOutOfRange):
            PartitionSpec(PartitionKind.FLAT, [1.0, 1.0])


class TestFlatConditionalMoments:
    def test_single_cell_reproduces_model(self):
        moments = flat_conditional_moments(MODEL, [])
        assert moments.cells == 1
        assert moments.digital[0] == pytest.approx(1.0, rel=1e-14)
        assert moments.price[0] == pytest.approx(1.0, rel=1e-14)
        assert moments.root_variance[0] == pytest.approx(MODEL.root_variance, rel=1e-12)

    def test_two_cells_split_at_forward(self):
        moments = flat_conditional_moments(MODEL, [1.0])
        # P(a <= f) = Phi((log(1) + sigma^2 T / 2) / (sigma sqrt(T))) = Phi(0.2).
        assert moments.digital[0] == pytest.approx(float(norm_cdf(0.2)), rel=1e-14)
        assert moments.digital[1] == pytest.approx(1.0 - float(norm_cdf(0.2)), rel=1e-13)

    @pytest.mark.parametrize("boundaries", [FIG_BOUNDARIES_6, FIG_BOUNDARIES_30])
    def test_normalisation_identities(self, boundaries):
        moments = flat_conditional_moments(MODEL, boundaries)
        total, mean, sqrt_mean = moments.normalisation_sums()
        assert abs(total - 1.0) <= 1e-10
        assert abs(mean - 1.0) <= 1e-10
        assert abs(sqrt_mean - math.sqrt(1.0 - MODEL.root_variance)) <= 1e-10

    def test_degenerate_cell_dropped_with_warning(self):
        with pytest.warns(UserWarning, match="dropped"):
            moments = flat_conditional_moments(MODEL, [1.0, 1e9])
        assert moments.cells == 2

    def test_degenerate_cell_strict_raises(self):
        with pytest.raises(DegenerateCell):
            flat_conditional_moments(MODEL, [1.0, 1e9], strict=True)

    def test_zero_vol_rejected(self):
        with pytest.raises(ParameterOutOfRange):
            flat_conditional_moments(LognormalModel(1.0, 0.0, 1.0), [1.0])


class TestFlatRefinedBound:
    def test_single_cell_equals_vanilla(self):
        moments = flat_conditional_moments(MODEL, [])
        nu = MODEL.root_variance
        for k in (0.4, 0.8, 1.0, 1.7, 2.6):
            refined = flat_refined_bound(moments, k)
            assert refined == pytest.approx(vanilla_bound(1.0, nu, k), rel=1e-12)

    def test_six_cell_sandwich_at_atm(self):
        moments = flat_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        v6 = flat_refined_bound(moments, 1.0)
        vanilla = vanilla_bound(1.0, MODEL.root_variance, 1.0)
        black = bs_call_price(MODEL, 1.0)
        assert black <= v6 <= vanilla
        assert vanilla - v6 > 1e-3  # the refinement genuinely bites

    def test_monotone_refinement_on_nested_grids(self):
        m6 = flat_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        m30 = flat_conditional_moments(MODEL, FIG_BOUNDARIES_30)
        nu = MODEL.root_variance
        for k in (0.5, 1.0, 1.6, 2.4):
            b1 = vanilla_bound(1.0, nu, k)
            b6 = flat_refined_bound(m6, k)
            b30 = flat_refined_bound(m30, k)
            assert b1 >= b6 - 1e-10
            assert b6 >= b30 - 1e-10
            assert b30 >= bs_call_price(MODEL, k) - 1e-10


class TestLinearPartitionFunctions:
    def test_partition_of_unity(self):
        part = linear_partition_functions([0.5, 1.0, 1.5, 2.0, 2.5])
        rng = np.random.default_rng(9)
        points = rng.uniform(0.01, 5.0, 200)
        total = sum(part.weight(n, points) for n in range(part.count))
        assert np.allclose(total, 1.0, atol=1e-14)

    def test_node_interpolation(self):
        strikes = [0.5, 1.0, 1.5, 2.0, 2.5]
        part = LinearPartition(strikes)
        for n, k in enumerate(strikes):
            for m in range(part.count):
                expected = 1.0 if m == n else 0.0
                assert part.weight(m, k) == pytest.approx(expected, abs=1e-15)

    def test_midpoint_symmetry(self):
        part = LinearPartition([1.0, 2.0])
        mid = 1.5
        assert part.weight(0, mid) == pytest.approx(0.5, abs=1e-15)
        assert part.weight(1, mid) == pytest.approx(0.5, abs=1e-15)
        assert part.sqrt_cross(0, mid) == pytest.approx(0.5, abs=1e-15)

    def test_supports(self):
        part = LinearPartition([1.0, 2.0, 3.0])
        assert part.weight(0, 0.2) == 1.0  # flat below the first strike
        assert part.weight(2, 5.0) == 1.0  # flat above the last strike
        assert part.weight(1, 0.5) == 0.0
        assert part.sqrt_cross(0, 2.5) == 0.0

    def test_cross_consistency_with_weights(self):
        part = LinearPartition([1.0, 2.0, 3.0])
        a = np.linspace(1.05, 1.95, 17)
        direct = np.sqrt(part.weight(0, a) * part.weight(1, a))
        assert np.allclose(part.sqrt_cross(0, a), direct, atol=1e-14)


class TestQuadratureAgainstClosedForm:
    def test_panels_match_closed_form(self):
        edges = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, math.inf]
        for lo, hi in zip(edges[:-1], edges[1:]):
            for p in (0.0, 0.5, 1.0):
                numeric = quadrature_partial_moment(MODEL, p, lo, hi)
                closed = lognormal_partial_moment(MODEL, p, lo, hi)
                assert abs(numeric - closed) <= 1e-9


class TestLinearConditionalMoments:
    def test_sums_reproduce_unpartitioned_moments(self):
        moments = linear_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        total, mean, sqrt_mean = moments.normalisation_sums()
        assert abs(total - 1.0) <= 1e-10
        assert abs(mean - 1.0) <= 1e-10
        assert abs(sqrt_mean - math.sqrt(1.0 - MODEL.root_variance)) <= 1e-10

    def test_cross_terms_positive_and_bounded(self):
        moments = linear_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        assert np.all(moments.cross_digital > 0.0)
        assert np.all(moments.cross_sqrt > 0.0)
        assert np.all(moments.cross_price > 0.0)
        # sqrt(u_n u_{n+1}) <= 1/2 pointwise, so each cross moment is below
        # half the shared support mass.
        assert np.all(moments.cross_digital <= 0.5)

    def test_budget_enforced(self):
        with pytest.raises(QuadratureBudgetExceeded):
            linear_conditional_moments(MODEL, FIG_BOUNDARIES_6, node_budget=100)

    def test_moment_matrix_is_psd_tridiagonal(self):
        moments = linear_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        q = partition_moment_matrix(moments)
        eigs = np.linalg.eigvalsh(q.entries)
        assert eigs[0] >= -1e-12
        n = moments.cells
        # Quadrants are tridiagonal: nothing beyond the first off-diagonal.
        upper_left = q.entries[:n, :n]
        assert np.all(np.triu(upper_left, 2) == 0.0)


class TestLinearRefinedBound:
    def test_far_tail_strikes_approach_vanilla(self):
        bound = linear_refined_bound(MODEL, [0.02, 18.0], 1.0)
        vanilla = vanilla_bound(1.0, MODEL.root_variance, 1.0)
        assert bound <= vanilla + 1e-12
        assert bound == pytest.approx(vanilla, abs=5e-3)

    def test_five_strike_bound_sandwiched_and_smoother(self):
        lm = linear_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        fm = flat_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        nu = MODEL.root_variance
        atm = refined_bound(lm, 1.0)
        assert bs_call_price(MODEL, 1.0) <= atm <= vanilla_bound(1.0, nu, 1.0)
        linear_curve = np.array([refined_bound(lm, float(k)) for k in EVAL_STRIKES])
        flat_curve = np.array([refined_bound(fm, float(k)) for k in EVAL_STRIKES])
        # Continuous basis functions produce a visibly smoother bound than
        # the kinked digital partition on the same strike grid.
        assert np.max(np.abs(np.diff(linear_curve, 2))) < np.max(np.abs(np.diff(flat_curve, 2)))

    def test_dominates_reference_prices(self):
        lm29 = linear_conditional_moments(MODEL, FIG_BOUNDARIES_30)
        for k in EVAL_STRIKES:
            assert refined_bound(lm29, float(k)) >= bs_call_price(MODEL, float(k)) - 1e-10

    def test_monotone_against_vanilla_and_finer_grid(self):
        lm5 = linear_conditional_moments(MODEL, FIG_BOUNDARIES_6)
        lm29 = linear_conditional_moments(MODEL, FIG_BOUNDARIES_30)
        nu = MODEL.root_variance
        for k in (0.6, 1.0, 1.9, 2.5):
            b0 = vanilla_bound(1.0, nu, k)
            b5 = refined_bound(lm5, k)
            b29 = refined_bound(lm29, k)
            assert b0 >= b5 - 1e-10
            assert b5 >= b29 - 1e-10


class TestConditionalMomentsType:
    def test_cross_sequences_all_or_none(self):
        with pytest.raises(ParameterOutOfRange):
            ConditionalMoments(
                digital=[0.5, 0.5],
                price=[1.0, 1.0],
                root_variance=[0.1, 0.1],
                cross_price=[0.1],
                cross_sqrt=None,
                cross_digital=None,
            )

    def test_externally_supplied_moments_are_usable(self):
        # Quote-implied conditional moments can bypass the reference model.
        moments = ConditionalMoments(
            digital=[0.6, 0.4],
            price=[0.7, 1.45],
            root_variance=[0.01, 0.02],
        )
        q = partition_moment_matrix(moments)
        assert q.dim == 4
        value = refined_bound(moments, 1.0)
        assert value >= 0.0

    def test_single_cell_matrix_matches_vanilla_layout(self):
        moments = ConditionalMoments(digital=[1.0], price=[1.0], root_variance=[0.04])
        q = partition_moment_matrix(moments)
        s = math.sqrt(0.96)
        assert np.allclose(q.entries, [[1.0, s], [s, 1.0]], rtol=1e-15)
