import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import chi_square_gof, subset_rank_position_counts

from incseq.analytics import (
    LogValue,
    core_match_mean_exact,
    core_match_second_moment_exact,
    core_window,
    expected_count,
    expected_count_asymptotic,
    expected_count_loggamma,
    insertion_position_pmf,
    joint_position_pmf,
    merge_entropy,
    position_pmf_mode,
    position_pmf_peak_bound,
    superadditivity_gap,
    superadditivity_ratio,
)
from incseq.perms import sample_k_subset
from incseq.rng import RngStream


class TestLogValue:
    def test_zero_marker(self):
        z = LogValue.from_value(0.0)
        assert z.log == float("-inf")
        assert z.value() == 0.0

    def test_arithmetic(self):
        a = LogValue.from_value(3.0)
        b = LogValue.from_value(4.0)
        assert math.isclose((a * b).value(), 12.0, rel_tol=1e-12)
        assert math.isclose((a + b).value(), 7.0, rel_tol=1e-12)
        assert math.isclose((b / a).value(), 4.0 / 3.0, rel_tol=1e-12)

    def test_huge_values_survive(self):
        big = LogValue.from_log(1e6)
        assert (big * big).log == 2e6
        assert big.value() == float("inf")

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            LogValue.from_value(-1.0)


class TestExpectedCount:
    def test_worked_example(self):
        exact, lg = expected_count(5, 3)
        assert exact == Fraction(10, 6) == Fraction(5, 3)
        assert math.isclose(lg.value(), 5 / 3, rel_tol=1e-12)

    def test_k1_and_kn(self):
        assert expected_count(7, 1)[0] == 7
        assert expected_count(7, 7)[0] == Fraction(1, math.factorial(7))

    def test_matches_enumeration_average(self):
        # Independent oracle: average the brute-force count over all of S_4.
        from itertools import permutations

        from conftest import count_by_enumeration

        for k in range(5):
            total = sum(
                count_by_enumeration(img, k) for img in permutations(range(1, 5))
            )
            assert expected_count(4, k)[0] == Fraction(total, 24)

    def test_validation(self):
        with pytest.raises(ValueError):
            expected_count(3, 4)


class TestAsymptotic:
    def test_ratio_near_one_below_half(self):
        n, c, l = 10**6, 1.0, 0.3
        asym = expected_count_asymptotic(n, c, l)
        exact = expected_count_loggamma(n, c * n**l)
        ratio = math.exp(exact.log - asym.log)
        assert 0.9 <= ratio <= 1.1

    def test_critical_line_decay_above_e(self):
        lg = expected_count_asymptotic(10**8, 2.8, 0.5)
        assert lg.log < 0

    def test_critical_line_growth_below_e(self):
        a = expected_count_asymptotic(10**6, 2.6, 0.5)
        b = expected_count_asymptotic(4 * 10**6, 2.6, 0.5)
        assert a.log > 0
        assert b.log > a.log

    def test_l_range_enforced(self):
        with pytest.raises(ValueError):
            expected_count_asymptotic(100, 1.0, 0.6)
        with pytest.raises(ValueError):
            expected_count_asymptotic(100, 1.0, 0.0)
        with pytest.raises(ValueError):
            expected_count_asymptotic(100, -1.0, 0.4)


class TestPositionPmf:
    def test_small_case_exact(self):
        law = insertion_position_pmf(4, 2, 1)
        assert list(law.support) == [1, 2, 3]
        assert law.exact == (Fraction(1, 2), Fraction(1, 3), Fraction(1, 6))

    def test_matches_subset_enumeration_oracle(self):
        for n_total, k, j in ((5, 3, 2), (7, 4, 4), (8, 2, 1), (6, 6, 3)):
            law = insertion_position_pmf(n_total, k, j)
            counts = subset_rank_position_counts(n_total, k, j)
            total = math.comb(n_total, k)
            for r, frac in zip(law.support.tolist(), law.exact):
                assert frac == Fraction(counts.get(r, 0), total)

    def test_sums_to_one(self):
        for n_total, k, j in ((50, 20, 10), (200, 30, 29), (1000, 100, 25)):
            law = insertion_position_pmf(n_total, k, j)
            assert abs(float(law.pmf.sum()) - 1.0) < 1e-10

    def test_exact_matches_loggamma(self):
        for n_total, k, j in ((20, 8, 3), (40, 15, 15), (60, 30, 7)):
            law = insertion_position_pmf(n_total, k, j, exact=True)
            fr = np.array([float(f) for f in law.exact])
            rel = np.abs(law.pmf - fr) / np.maximum(fr, 1e-300)
            assert rel.max() < 1e-10

    def test_j1_max_at_first_position(self):
        law = insertion_position_pmf(12, 5, 1, exact=True)
        assert law.exact[0] == Fraction(5, 12)
        assert max(law.exact) == law.exact[0]

    def test_empirical_frequencies_chi_square(self):
        for n_total, k, j, seed in ((16, 6, 3, 1), (24, 12, 6, 2), (40, 8, 2, 3)):
            gen = RngStream(seed, 0).generator()
            law = insertion_position_pmf(n_total, k, j)
            offset = law.support[0]
            counts = np.zeros(len(law.support))
            for _ in range(20000):
                sub = sample_k_subset(n_total, k, gen)
                counts[sub[j - 1] - offset] += 1
            _, _, ok = chi_square_gof(counts, law.pmf)
            assert ok

    def test_validation(self):
        with pytest.raises(ValueError):
            insertion_position_pmf(5, 6, 1)
        with pytest.raises(ValueError):
            insertion_position_pmf(5, 3, 0)
        with pytest.raises(ValueError):
            insertion_position_pmf(5, 3, 4)


class TestJointPositionPmf:
    def test_small_case_exact_value(self):
        joint = joint_position_pmf(4, 2, 1, 2)
        assert abs(joint[1, 2] - 1 / 6) < 1e-12
        # Oracle: enumerate all 6 subsets of size 2.
        for r, rp in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)):
            count = sum(
                1 for sub in combinations(range(1, 5), 2) if sub == (r, rp)
            )
            assert abs(joint[r, rp] - count / 6) < 1e-12

    def test_total_mass(self):
        joint = joint_position_pmf(30, 10, 3, 7)
        assert abs(joint.sum() - 1.0) < 1e-10

    def test_marginalizes_to_single_law(self):
        n_total, k, i, j = 25, 9, 2, 6
        joint = joint_position_pmf(n_total, k, i, j)
        law_i = insertion_position_pmf(n_total, k, i)
        law_j = insertion_position_pmf(n_total, k, j)
        marg_i = joint.sum(axis=1)
        marg_j = joint.sum(axis=0)
        assert np.abs(marg_i[law_i.support] - law_i.pmf).max() < 1e-10
        assert np.abs(marg_j[law_j.support] - law_j.pmf).max() < 1e-10

    def test_order_validated(self):
        with pytest.raises(ValueError):
            joint_position_pmf(10, 4, 3, 3)


class TestModeAndPeakBound:
    def test_mode_matches_full_scan(self):
        for n_total, k, j in ((10, 4, 2), (4, 2, 2), (30, 7, 5), (50, 25, 13), (9, 9, 4)):
            law = insertion_position_pmf(n_total, k, j, exact=True)
            scan_best = max(range(len(law.exact)), key=lambda idx: law.exact[idx])
            mode = position_pmf_mode(n_total, k, j)
            assert law.exact[mode - law.support[0]] == law.exact[scan_best]

    def test_mode_is_local_max(self):
        for n_total, k, j in ((40, 12, 6), (100, 30, 20)):
            law = insertion_position_pmf(n_total, k, j)
            mode = position_pmf_mode(n_total, k, j)
            idx = mode - int(law.support[0])
            if idx > 0:
                assert law.pmf[idx] >= law.pmf[idx - 1]
            if idx < len(law.pmf) - 1:
                assert law.pmf[idx] >= law.pmf[idx + 1]

    def test_j1_bound_ratio_is_one(self):
        peak, ratio = position_pmf_peak_bound(20, 7, 1)
        assert abs(peak - 7 / 20) < 1e-12
        assert abs(ratio - 1.0) < 1e-12

    def test_reflection_symmetry(self):
        for n_total, k, j in ((30, 10, 3), (17, 9, 2)):
            pa, _ = position_pmf_peak_bound(n_total, k, j)
            pb, _ = position_pmf_peak_bound(n_total, k, k - j + 1)
            assert abs(pa - pb) < 1e-12

    def test_grid_scan_bounded_constant(self):
        worst = 0.0
        for n_total in (100, 1000, 10000):
            for k in (int(n_total**0.4), int(n_total**0.5), n_total // 2):
                for j in list(range(1, k + 1, max(1, k // 23))) + [k]:
                    _, ratio = position_pmf_peak_bound(n_total, k, j)
                    worst = max(worst, ratio)
        # Recorded empirical envelope constant: the scan peaks at exactly 1,
        # attained at the rank extremes j = 1 and j = k.
        assert worst <= 1.0 + 1e-9


class TestCoreWindow:
    def test_window_examples(self):
        assert list(core_window(8)) == [3, 4, 5]
        assert list(core_window(2)) == []
        assert list(core_window(1)) == []
        assert list(core_window(3)) == [1]
        assert list(core_window(7)) == [2, 3, 4]

    @given(st.integers(0, 2000))
    @settings(max_examples=200)
    def test_empty_iff_k_below_3(self, k):
        assert (len(core_window(k)) == 0) == (k <= 2)


class TestCoreMatchMoments:
    def test_empty_window_gives_zero(self):
        assert core_match_mean_exact(4, 2) == 0.0
        assert core_match_mean_exact(4, 2, exact=True) == 0

    def test_exact_fraction_matches_float(self):
        fr = core_match_mean_exact(16, 8, exact=True)
        fl = core_match_mean_exact(16, 8)
        assert abs(float(fr) - fl) < 1e-12

    def test_matches_double_subset_enumeration(self):
        # Oracle: enumerate both subset draws completely (all C(N,k)^2 pairs).
        for n_total, k in ((8, 4), (10, 5), (12, 6)):
            subs = np.array(list(combinations(range(1, n_total + 1), k)))
            window = core_window(k)
            lo, hi = window.start - 1, window.stop - 1
            cols = subs[:, lo:hi]
            matches = (cols[:, None, :] == cols[None, :, :]).sum(axis=2)
            mean = matches.mean()
            second = (matches.astype(np.float64) ** 2).mean()
            assert abs(core_match_mean_exact(n_total, k) - mean) < 1e-10
            assert abs(core_match_second_moment_exact(n_total, k) - second) < 1e-10

    def test_exact_rational_second_moment(self):
        val = core_match_second_moment_exact(12, 6, exact=True)
        assert isinstance(val, Fraction)
        assert abs(float(val) - core_match_second_moment_exact(12, 6)) < 1e-12

    def test_second_moment_dominates_squared_mean(self):
        for n_total, k in ((16, 8), (64, 16), (40, 20)):
            mean = core_match_mean_exact(n_total, k)
            second = core_match_second_moment_exact(n_total, k)
            assert second >= mean**2 - 1e-12

    def test_oversized_exact_second_moment_rejected(self):
        with pytest.raises(ValueError):
            core_match_second_moment_exact(100000, 10000)


class TestSuperadditivity:
    def test_equality_case(self):
        assert abs(superadditivity_ratio(1, 1, 1, 1) - 1.0) < 1e-12

    def test_worked_value(self):
        # exp(F(1,1) + F(1,2) - F(2,3)) = 4 * 3^6 / 5^5 exactly.
        val = superadditivity_ratio(1, 1, 1, 2)
        assert abs(val - 2916 / 3125) < 1e-12
        assert val < 1

    def test_homogeneous_scaling(self):
        base = superadditivity_ratio(1.3, 0.7, 2.1, 0.9)
        lam = 3.7
        scaled = superadditivity_ratio(lam * 1.3, lam * 0.7, lam * 2.1, lam * 0.9)
        assert abs(scaled - base**lam) < 1e-9

    def test_random_quadruples_never_exceed_one(self):
        gen = RngStream(55, 0).generator()
        quads = gen.uniform(0.01, 100.0, size=(20000, 4))
        ratios = superadditivity_ratio(quads[:, 0], quads[:, 1], quads[:, 2], quads[:, 3])
        assert float(ratios.max()) <= 1 + 1e-12

    def test_equality_surface(self):
        gen = RngStream(56, 0).generator()
        abc = gen.uniform(0.1, 50.0, size=(2000, 3))
        d = abc[:, 1] * abc[:, 2] / abc[:, 0]
        ratios = superadditivity_ratio(abc[:, 0], abc[:, 1], abc[:, 2], d)
        assert np.abs(ratios - 1.0).max() <= 1e-9

    def test_gap_zero_at_critical_point(self):
        for a, b, c in ((1.0, 2.0, 3.0), (0.5, 0.4, 9.0)):
            assert abs(superadditivity_gap(a, b, c, b * c / a)) <= 1e-9

    def test_gap_minimized_at_critical_point(self):
        a, b, c = 2.0, 3.0, 5.0
        t0 = b * c / a
        eps = 1e-4
        g_minus = superadditivity_gap(a, b, c, t0 - eps)
        g_plus = superadditivity_gap(a, b, c, t0 + eps)
        g_mid = superadditivity_gap(a, b, c, t0)
        assert g_minus > g_mid - 1e-12
        assert g_plus > g_mid - 1e-12
        # Finite-difference sign change of the derivative across the minimum.
        assert (g_mid - g_minus) < 0 or abs(g_mid - g_minus) < 1e-12
        assert (g_plus - g_mid) > 0 or abs(g_plus - g_mid) < 1e-12

    def test_nonpositive_inputs_rejected(self):
        with pytest.raises(ValueError):
            superadditivity_ratio(0.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            merge_entropy(-1.0, 2.0)

    @given(
        st.floats(0.01, 1000),
        st.floats(0.01, 1000),
        st.floats(0.01, 1000),
        st.floats(0.01, 1000),
    )
    @settings(max_examples=200)
    def test_property_bounded_by_one(self, a, b, c, d):
        assert superadditivity_ratio(a, b, c, d) <= 1 + 1e-12
