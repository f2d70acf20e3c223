import numpy as np
import pytest

from crackqc import bifurcation as bif
from crackqc import effective as eff
from crackqc.bifurcation import (BifurcationCurve, EffectiveEquation,
                                 compare_curves, fold_points, lipschitz_bound,
                                 solve_branches, trace_curve)
from crackqc.effective import ModelKind
from crackqc.material import force_law

REF_N = 104
REF_M = 100


@pytest.fixture
def exact_eq(params):
    coefs = eff.exact_coefficients(params, REF_N)
    return EffectiveEquation(force_law(params), coefs.kappa, coefs.eta)


def _equation(params, kind, m=REF_M, n=REF_N):
    coefs = eff.coefficients(params, kind, n,
                             None if kind is ModelKind.EXACT else m)
    return EffectiveEquation(force_law(params), coefs.kappa, coefs.eta)


class TestEquation:
    def test_rejects_nonpositive_eta(self, params):
        law = force_law(params)
        with pytest.raises(ValueError):
            EffectiveEquation(law, -4.0, 0.0)
        with pytest.raises(ValueError):
            EffectiveEquation(law, -4.0, -1.0)

    def test_residual_and_slope(self, exact_eq):
        assert exact_eq.residual(0.0, 0.0) == 0.0
        h = 1e-7
        fd = (exact_eq.residual(0.2 + h, 1.0)
              - exact_eq.residual(0.2 - h, 1.0)) / (2 * h)
        assert fd == pytest.approx(exact_eq.slope(0.2), rel=1e-7)


class TestBranches:
    def test_origin_root_at_zero_load(self, exact_eq):
        roots = solve_branches(exact_eq, 0.0)
        assert any(abs(u) < 1e-12 for u in roots)

    def test_roots_satisfy_equation(self, exact_eq):
        for P in (0.5, 2.0, 2.3, 2.6, 3.0):
            for u in solve_branches(exact_eq, P):
                assert abs(exact_eq.residual(u, P)) < 1e-9

    def test_scan_pattern_one_three_one(self, exact_eq):
        # 10^4 loads: one branch below the lower fold load, three between
        # the folds, one above the upper fold load.
        folds = fold_points(exact_eq)
        p_lo, p_hi = sorted(f.P_star for f in folds)
        margin = 3.0 / 10 ** 4
        for p in np.linspace(1e-6, 3.0, 10 ** 4):
            count = len(solve_branches(exact_eq, float(p)))
            if p < p_lo - margin or p > p_hi + margin:
                assert count == 1, p
            elif p_lo + margin < p < p_hi - margin:
                assert count == 3, p
            else:
                assert count in (1, 2, 3), p

    def test_rejects_nonfinite_load(self, exact_eq):
        with pytest.raises(ValueError):
            solve_branches(exact_eq, float("nan"))


class TestFolds:
    def test_reference_values(self, exact_eq):
        folds = fold_points(exact_eq)
        assert len(folds) == 2
        assert folds[0].u_star == pytest.approx(0.23536949427100265,
                                                rel=1e-12)
        assert folds[1].u_star == pytest.approx(0.431297172395664, rel=1e-12)
        assert folds[0].P_star == pytest.approx(2.5232420834734177,
                                                rel=1e-12)
        assert folds[1].P_star == pytest.approx(2.1996141140020424,
                                                rel=1e-12)

    def test_exactly_two_folds_per_model(self, params):
        for kind in ModelKind:
            eq = _equation(params, kind)
            folds = fold_points(eq)
            assert len(folds) == 2, kind
            for f in folds:
                assert 0 < f.u_star < params.u_cut
                assert abs(eq.slope(f.u_star)) < 1e-9
                assert abs(eq.residual(f.u_star, f.P_star)) < 1e-12

    def test_no_folds_for_stiff_kappa(self, params):
        # kappa below -kappa3/3 removes the tangency pair entirely.
        eq = EffectiveEquation(force_law(params), -10.0, 1.0)
        assert fold_points(eq) == []


class TestTrace:
    def test_first_integral_at_default_step(self, exact_eq):
        curve = trace_curve(exact_eq, 4.0, 1e-3)
        assert float(curve.samples[:, 3].max()) <= 1e-8

    def test_halving_step_improves_residual(self, exact_eq):
        # 4th-order integrator: halving h shrinks the worst residual by
        # about 16; at least 12 is required.  Coarse steps keep both runs
        # above roundoff.
        coarse = trace_curve(exact_eq, 3.0, 0.05)
        fine = trace_curve(exact_eq, 3.0, 0.025)
        r_coarse = float(coarse.samples[:, 3].max())
        r_fine = float(fine.samples[:, 3].max())
        assert r_coarse / r_fine >= 12

    def test_unit_speed_sampling(self, exact_eq):
        curve = trace_curve(exact_eq, 1.0, 1e-2)
        d = np.diff(curve.samples[:, 1:3], axis=0)
        speeds = np.hypot(d[:, 0], d[:, 1]) / 1e-2
        assert np.max(np.abs(speeds - 1)) < 1e-3

    def test_passes_through_folds(self, exact_eq):
        # Arc length to the first fold exceeds 2.5; the curve must round
        # both folds, so the load direction changes sign twice.
        curve = trace_curve(exact_eq, 4.0, 1e-2)
        dp = np.diff(curve.samples[:, 2])
        flips = np.count_nonzero(np.diff(np.sign(dp[np.abs(dp) > 1e-14])))
        assert flips == 2
        # On the bonded piece the largest load is the upper fold load; the
        # final linear piece climbs past it and is excluded.
        bonded = curve.samples[curve.samples[:, 1] < exact_eq.law.u_cut]
        p_max = float(bonded[:, 2].max())
        folds = fold_points(exact_eq)
        assert p_max == pytest.approx(max(f.P_star for f in folds), abs=1e-3)

    def test_zero_length_gives_single_row(self, exact_eq):
        curve = trace_curve(exact_eq, 0.0)
        assert curve.samples.shape == (1, 4)
        assert np.all(curve.samples[0] == 0.0)

    def test_stops_beyond_broken_bond(self, exact_eq):
        curve = trace_curve(exact_eq, 50.0, 1e-2)
        u = curve.samples[:, 1]
        assert float(u.max()) <= 1.1 * exact_eq.law.u_cut + 1e-2
        assert len(curve.samples) < 50.0 / 1e-2

    def test_reversed_orientation_mirrors_start(self, exact_eq):
        sign = bif.orientation(exact_eq)
        fwd = trace_curve(exact_eq, 0.01, 1e-3, sign=sign)
        rev = trace_curve(exact_eq, 0.01, 1e-3, sign=-sign)
        assert fwd.samples[1, 2] > 0
        assert rev.samples[1, 2] < 0
        # Near the regular start point the two orientations retrace the
        # same curve through the origin.
        assert rev.samples[1, 1] == pytest.approx(-fwd.samples[1, 1],
                                                  abs=1e-8)
        assert rev.samples[1, 2] == pytest.approx(-fwd.samples[1, 2],
                                                  abs=1e-7)

    def test_rejects_bad_arguments(self, exact_eq):
        with pytest.raises(ValueError):
            trace_curve(exact_eq, -1.0)
        with pytest.raises(ValueError):
            trace_curve(exact_eq, 1.0, 0.0)


class TestCompare:
    def test_requires_matching_step(self, exact_eq):
        a = trace_curve(exact_eq, 0.1, 1e-2)
        b = trace_curve(exact_eq, 0.1, 5e-3)
        with pytest.raises(ValueError):
            compare_curves(a, b)

    def test_qqc_tracks_exact_far_better_than_qc(self, params, exact_eq):
        s_max, h = 2.0, 1e-3
        base = trace_curve(exact_eq, s_max, h)
        sup_qqc, _ = compare_curves(
            base, trace_curve(_equation(params, ModelKind.QQC), s_max, h))
        sup_qc, _ = compare_curves(
            base, trace_curve(_equation(params, ModelKind.QC), s_max, h))
        assert sup_qqc < 1e-10
        assert sup_qqc * 10 < sup_qc

    @pytest.mark.parametrize("m", [100, 96])
    @pytest.mark.parametrize("kind",
                             [ModelKind.QC, ModelKind.QQC, ModelKind.FQC])
    def test_within_lipschitz_bound(self, params, exact_eq, kind, m):
        s_max, h = 2.0, 1e-3
        other = _equation(params, kind, m=m)
        sup, series = compare_curves(trace_curve(exact_eq, s_max, h),
                                     trace_curve(other, s_max, h))
        bound, derivation = lipschitz_bound(exact_eq, other, s_max)
        assert sup <= bound
        assert "exp" in derivation and "eta_min" in derivation
        assert series.shape[1] == 2

    def test_bound_rejects_negative_length(self, exact_eq):
        with pytest.raises(ValueError):
            lipschitz_bound(exact_eq, exact_eq, -1.0)
