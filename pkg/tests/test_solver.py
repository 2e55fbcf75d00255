import math

import numpy as np
import pytest

import lownerjohn as lj
from lownerjohn.errors import CenterOutsideError
from lownerjohn.solver import PolarLevelSets, PrimalLevelSets

from conftest import gaussian, interval_indicator, square_indicator

SQ5 = math.sqrt(5.0)
CE_T = 4.0 / SQ5
CE_B = -3.0 / (8.0 * SQ5)


def cone(n=1):
    return lj.RadialFunction(lj.CONE_PROFILE, n)


class TestXi:
    def test_two_sided_exponential(self):
        # primal level sets of exp(-|y|): xi(s) = s (-log s)
        prov = PrimalLevelSets(cone(1), np.zeros(1))
        val, T = lj.xi(prov, math.exp(-1))
        assert val == pytest.approx(math.exp(-1), rel=1e-10)
        assert T[0, 0] == pytest.approx(1.0, rel=1e-10)

    def test_ball_indicator_levels(self):
        f = lj.IndicatorFunction(lj.HPolytope.ball_approx(1.0, 2, 128))
        prov = PrimalLevelSets(f, np.zeros(2))
        val, T = lj.xi(prov, 0.5)
        assert val == pytest.approx(0.5, rel=1e-6)
        assert np.allclose(T, np.eye(2), atol=1e-6)

    def test_gaussian_levels(self):
        prov = PrimalLevelSets(gaussian(2), np.zeros(2))
        val, _ = lj.xi(prov, math.exp(-1.0))
        # s * r(s)^n with r = sqrt(-2 log s)
        assert val == pytest.approx(math.exp(-1.0) * 2.0, rel=1e-9)

    def test_center_error(self):
        f = interval_indicator(0.5, 2.0)
        prov = PrimalLevelSets(f, np.zeros(1))
        with pytest.raises(CenterOutsideError):
            lj.xi(prov, 0.5)


class TestMaximizeXi:
    def test_two_sided_exponential(self):
        res = lj.maximize_xi(PrimalLevelSets(cone(1), np.zeros(1)))
        assert res.s0 == pytest.approx(math.exp(-1.0), rel=1e-6)
        assert res.T0[0, 0] == pytest.approx(1.0, rel=1e-6)

    def test_gaussian_polar_2d(self):
        prov = PolarLevelSets(gaussian(2), np.zeros(2))
        res = lj.maximize_xi(prov)
        assert res.s0 == pytest.approx(math.exp(-1.0), rel=1e-6)
        assert np.allclose(res.T0, math.sqrt(2) * np.eye(2), atol=1e-5)
        assert not res.pinned_floor and not res.pinned_cap

    def test_indicator_pins_at_cap(self):
        res = lj.maximize_xi(PrimalLevelSets(square_indicator(), np.zeros(2)))
        assert res.s0 == 1.0
        assert res.pinned_cap

    def test_explicit_range_callable(self):
        prov = PrimalLevelSets(cone(1), np.zeros(1))
        res = lj.maximize_xi(prov.polytope, s_range=(1e-9, 1.0))
        assert res.s0 == pytest.approx(math.exp(-1.0), rel=1e-5)

    def test_non_unimodal_fallback(self):
        from lownerjohn.solver import UnimodalityWarning

        def bumpy(s):
            u = math.log(s)
            r = math.exp(max(-((u + 2.0) ** 2), 0.4 - 8.0 * (u + 6.0) ** 2))
            return lj.HPolytope.interval(-r, r)

        with pytest.warns(UnimodalityWarning):
            res = lj.maximize_xi(bumpy, s_range=(1e-9, 1.0))
        # global maximum of u + log r(u) sits on the broad bump: u = -3/2
        best_u = math.log(res.s0)
        assert best_u == pytest.approx(-1.5, abs=2e-2)
        assert math.log(res.xi0) == pytest.approx(-1.75, abs=1e-3)

    def test_all_empty_provider_raises(self):
        from lownerjohn.errors import ConvergenceError

        with pytest.raises(ConvergenceError):
            lj.maximize_xi(lambda s: None, s_range=(1e-9, 1.0))

    def test_xi_empty_level_raises(self):
        from lownerjohn.errors import EmptyLevelSetError

        prov = PrimalLevelSets(lj.counterexample_function(), np.zeros(1))
        with pytest.raises(EmptyLevelSetError):
            lj.xi(prov, 1.5)


class TestLownerAtCenter:
    def test_gaussian_1d(self):
        co = lj.lowner_at_center(gaussian(1), np.zeros(1))
        assert co.T0[0, 0] == pytest.approx(1.0, rel=1e-7)
        assert co.t0 == pytest.approx(0.5, abs=1e-7)
        assert co.value == pytest.approx(2 * math.exp(0.5), rel=1e-7)

    def test_interval_indicator(self):
        co = lj.lowner_at_center(interval_indicator(), np.zeros(1))
        assert co.T0[0, 0] == pytest.approx(1.0, rel=1e-10)
        assert co.t0 == pytest.approx(1.0, abs=1e-10)
        assert co.value == pytest.approx(2 * math.e, rel=1e-10)

    def test_off_center_is_worse(self):
        base = lj.lowner_at_center(gaussian(1), np.zeros(1)).value
        off = lj.lowner_at_center(gaussian(1), np.array([0.3])).value
        assert off > base + 1e-3

    def test_off_center_matches_analytic(self):
        # tangency algebra for a |x+b| - t <= x^2/2 at b = 0.3:
        # a^2 + 0.3 a - 1 = 0, t = a^2/2 + 0.3 a
        co = lj.lowner_at_center(gaussian(1), np.array([0.3]))
        a = (-0.3 + math.sqrt(0.09 + 4.0)) / 2.0
        t = a * a / 2 + 0.3 * a
        assert co.T0[0, 0] == pytest.approx(a, rel=1e-6)
        assert co.t0 == pytest.approx(t, rel=1e-6)

    def test_center_outside_support(self):
        with pytest.raises(CenterOutsideError):
            lj.lowner_at_center(interval_indicator(), np.array([2.0]))

    def test_value_recomputable(self):
        co = lj.lowner_at_center(gaussian(2), np.zeros(2))
        assert co.value == pytest.approx(co.recompute(), rel=1e-10)


class TestLowner:
    def test_gaussian_2d(self):
        rep = lj.lowner(gaussian(2))
        assert np.allclose(rep.optimizer.T, math.sqrt(2) * np.eye(2), atol=2e-6)
        assert np.allclose(rep.optimizer.b, 0.0)
        assert rep.optimizer.t == pytest.approx(1.0, abs=1e-6)
        assert rep.feasibility_margin <= 1e-6

    def test_square_level_one_is_circumscribed_disc(self):
        rep = lj.lowner(square_indicator())
        assert rep.optimizer.t == pytest.approx(2.0, abs=1e-9)
        M, c = rep.optimizer.level_ellipsoid(1.0)
        assert np.allclose(M, math.sqrt(2) * np.eye(2), atol=1e-6)
        assert np.allclose(c, 0.0)

    def test_counterexample(self):
        rep = lj.lowner(lj.counterexample_function())
        assert rep.optimizer.T[0, 0] == pytest.approx(CE_T, abs=1e-4)
        assert rep.optimizer.b[0] == pytest.approx(CE_B, abs=1e-4)
        assert rep.optimizer.t == pytest.approx(0.5, abs=1e-4)
        assert rep.feasibility_margin <= 1e-6

    def test_cube_circumscribed_ball(self):
        cube = lj.IndicatorFunction(lj.HPolytope.box([-1, -1, -1], [1, 1, 1]))
        rep = lj.lowner(cube)
        assert rep.optimizer.t == pytest.approx(3.0, abs=1e-9)
        assert np.allclose(rep.optimizer.T, math.sqrt(3.0) * np.eye(3), atol=1e-7)

    def test_objective_consistency(self):
        rep = lj.lowner(gaussian(1))
        assert rep.objective == pytest.approx(
            lj.ellipsoidal_integral(rep.optimizer), rel=1e-12
        )

    def test_scaling_shifts_t(self):
        # L(c f) = c L(f): exponent t gains log c
        f = lj.PiecewiseQuadratic1D([(-math.inf, math.inf, 0.5, 0.0, -math.log(2.0))])
        rep = lj.lowner(f)
        assert rep.optimizer.t == pytest.approx(0.5 + math.log(2.0), abs=1e-6)
        assert rep.optimizer.T[0, 0] == pytest.approx(1.0, rel=1e-6)


class TestJohn:
    def test_gaussian_2d(self):
        rep = lj.john(gaussian(2))
        assert rep.s0 == pytest.approx(math.exp(-1.0), rel=1e-6)
        assert np.allclose(rep.optimizer.T, math.sqrt(2) * np.eye(2), atol=1e-5)
        assert np.allclose(rep.optimizer.b, 0.0)

    def test_ball_is_its_own_ellipsoid(self):
        f = lj.IndicatorFunction(lj.HPolytope.ball_approx(1.0, 2, 128))
        rep = lj.john(f)
        assert rep.s0 == 1.0
        assert np.allclose(rep.optimizer.T, np.eye(2), atol=1e-6)

    def test_square_polar(self):
        pol = lj.polar(square_indicator(), np.zeros(2))
        rep = lj.john(pol.fn)
        assert rep.s0 == math.exp(-2.0)
        assert np.allclose(rep.optimizer.T, math.sqrt(2) * np.eye(2), atol=1e-7)

    def test_gaussian_3d(self):
        rep = lj.john(gaussian(3))
        assert rep.s0 == pytest.approx(math.exp(-1.5), rel=1e-6)
        assert rep.optimizer.det_T() == pytest.approx(3.0**1.5, rel=1e-6)

    def test_objective_consistency(self):
        rep = lj.john(gaussian(1))
        assert rep.objective == pytest.approx(rep.s0 * rep.optimizer.det_T(), rel=1e-12)
        assert rep.feasibility_margin <= 1e-6


class TestRadialLowner:
    def test_gaussian_3d(self):
        a, t0 = lj.radial_lowner(lj.GAUSSIAN_PROFILE, 3)
        assert a == pytest.approx(math.sqrt(3), rel=1e-12)
        assert t0 == pytest.approx(1.5, abs=1e-12)

    def test_cone_is_fixed(self):
        a, t0 = lj.radial_lowner(lj.CONE_PROFILE, 1)
        assert a == pytest.approx(1.0, rel=1e-12)
        assert t0 == pytest.approx(0.0, abs=1e-12)

    def test_quartic(self):
        a, t0 = lj.radial_lowner(lj.PowerSumProfile(((1.0, 4.0),)), 1)
        assert a == pytest.approx(math.sqrt(2), rel=1e-12)
        assert t0 == pytest.approx(0.75, abs=1e-12)


class TestVerifyDomination:
    def test_gaussian_tangency(self):
        rep = lj.lowner(gaussian(2))
        margin = lj.verify_domination(rep.optimizer, gaussian(2))
        assert margin <= 1e-6
        # equality on the sphere of radius sqrt(n)
        x = np.array([math.sqrt(2.0), 0.0])
        assert rep.optimizer.exponent(x) == pytest.approx(gaussian(2).psi(x), abs=1e-5)

    def test_shifted_t_breaks_feasibility(self):
        rep = lj.lowner(gaussian(1))
        E = rep.optimizer
        worse = lj.EllipsoidalFunction(E.T, E.b, E.t - 0.1)
        assert lj.verify_domination(worse, gaussian(1)) >= 0.1 - 1e-6

    def test_counterexample_optimum_feasible(self):
        E = lj.EllipsoidalFunction([[CE_T]], [CE_B], 0.5)
        assert lj.verify_domination(E, lj.counterexample_function()) <= 1e-6


class TestSymmetral:
    def test_even_function_unchanged(self, rng):
        f = lj.PiecewiseQuadratic1D([(-math.inf, math.inf, 0.5, 0.0, 0.0)])
        s = lj.symmetral_1d(f, 0.0)
        for x in rng.uniform(-3, 3, 50):
            assert s.psi(np.array([x])) == pytest.approx(f.psi(np.array([x])), abs=1e-12)

    def test_pointwise_max(self, rng):
        f = lj.counterexample_function()
        w = 0.2
        s = lj.symmetral_1d(f, w)
        for x in rng.uniform(-2, 2, 200):
            direct = max(f.psi(np.array([x])), f.psi(np.array([2 * w - x])))
            assert s.psi(np.array([x])) == pytest.approx(direct, rel=1e-9, abs=1e-9)

    def test_disjoint_supports(self):
        f = interval_indicator(0.0, 2.0)
        assert lj.symmetral_1d(f, -2.0) is None

    def test_indicator_symmetral_window(self):
        f = interval_indicator(0.0, 2.0)
        s = lj.symmetral_1d(f, 0.5)
        lo, hi = s.domain()
        assert (lo, hi) == pytest.approx((0.0, 1.0))


class TestProperties:
    def test_xi_log_concavity_random_triples(self, rng):
        prov = PolarLevelSets(gaussian(2), np.array([0.15, -0.1]))
        for _ in range(25):
            s1, s2 = np.exp(rng.uniform(-6, -0.2, 2))
            lam = rng.uniform(0, 1)
            v_mid, _ = lj.xi(prov, s1 ** (1 - lam) * s2**lam)
            v1, _ = lj.xi(prov, s1)
            v2, _ = lj.xi(prov, s2)
            assert v_mid >= v1 ** (1 - lam) * v2**lam - 1e-7

    def test_profile_log_concavity(self):
        prof = lj.xi_scan(PrimalLevelSets(cone(1), np.zeros(1)), points=65)
        assert prof.log_concavity_defect() >= -1e-7

    def test_profile_vanishes_at_low_levels(self):
        prof = lj.xi_scan(PrimalLevelSets(gaussian(2), np.zeros(2)), points=33)
        assert prof.xi[0] <= 1e-6  # xi -> 0 as the level drops to 0
        assert prof.xi[0] < np.max(prof.xi) * 1e-4

    def test_profile_samples_recheckable(self):
        prov = PrimalLevelSets(gaussian(2), np.zeros(2))
        prof = lj.xi_scan(prov, points=17)
        for i in (4, 8, 12):
            val, T = lj.xi(prov, float(prof.s[i]))
            assert val == pytest.approx(prof.xi[i], rel=1e-9)
            assert np.allclose(T, prof.Ts[i], atol=1e-9)
            assert prof.xi[i] == pytest.approx(prof.s[i] * prof.dets[i], rel=1e-12)

    def test_grid_pipeline_close_to_closed_form(self):
        # tolerance limited by the grid resolution, not the solver
        g = np.linspace(-4.5, 4.5, 121)
        f = lj.GridFunction((g, g), 0.5 * (g[:, None] ** 2 + g[None, :] ** 2))
        rep = lj.lowner(f)
        assert rep.optimizer.det_T() == pytest.approx(2.0, rel=5e-3)
        assert rep.optimizer.t == pytest.approx(1.0, rel=5e-3)
        repj = lj.john(f)
        assert repj.s0 == pytest.approx(np.exp(-1.0), rel=5e-3)

    def test_affine_equivariance_1d(self):
        f = lj.counterexample_function()
        rep = lj.lowner(f)
        scaled = lj.PiecewiseQuadratic1D(
            [(lo / 2.0, hi / 2.0, 4 * a2, 2 * a1, a0) for lo, hi, a2, a1, a0 in f.pieces]
        )  # psi(2x): halve the domain, rescale coefficients
        rep2 = lj.lowner(scaled)
        assert rep2.optimizer.det_T() == pytest.approx(2 * rep.optimizer.det_T(), rel=1e-4)
        assert rep2.optimizer.t == pytest.approx(rep.optimizer.t, abs=1e-6)

    def test_affine_equivariance_2d_indicator(self):
        M = np.array([[1.4, 0.3], [0.0, 0.8]])
        K = lj.HPolytope.box([-1, -1], [1, 1])
        # {x : Mx in K} has rows M' a_i
        img = lj.IndicatorFunction(lj.HPolytope(K.normals @ M, K.offsets))
        rep = lj.lowner(square_indicator())
        rep2 = lj.lowner(img)
        assert rep2.optimizer.det_T() == pytest.approx(
            rep.optimizer.det_T() * abs(np.linalg.det(M)), rel=1e-4
        )
        assert rep2.optimizer.t == pytest.approx(rep.optimizer.t, abs=1e-6)

    def test_even_shortcut_agreement_1d(self):
        full = lj.lowner(gaussian(1), even_shortcut=False)
        quick = lj.lowner(gaussian(1))
        assert abs(full.optimizer.b[0]) <= 1e-4
        assert full.optimizer.det_T() == pytest.approx(quick.optimizer.det_T(), rel=1e-5)
        assert full.optimizer.t == pytest.approx(quick.optimizer.t, abs=1e-5)

    def test_even_shortcut_agreement_2d(self):
        full = lj.lowner(square_indicator(), even_shortcut=False)
        quick = lj.lowner(square_indicator())
        assert np.linalg.norm(full.optimizer.b) <= 1e-4
        assert full.optimizer.det_T() == pytest.approx(quick.optimizer.det_T(), rel=1e-5)
        assert full.optimizer.t == pytest.approx(quick.optimizer.t, abs=1e-5)

    def test_seed_restart_agreement(self):
        f = lj.counterexample_function()
        b0 = lj.lowner(f, seed=0).optimizer.b[0]
        b1 = lj.lowner(f, seed=12345).optimizer.b[0]
        assert abs(b0 - b1) <= 1e-4

    def test_constraint_order_stability(self):
        rows = np.array([[1.0, 0], [0, 1.0], [math.sqrt(0.5), math.sqrt(0.5)]])
        offs = np.array([1.0, 1.0, 1.2])
        f1 = lj.IndicatorFunction(
            lj.SymmetricPolytope(rows, offs).to_hpolytope()
        )
        perm = [4, 2, 0, 5, 1, 3]
        P = f1.body
        f2 = lj.IndicatorFunction(lj.HPolytope(P.normals[perm], P.offsets[perm]))
        T1 = lj.lowner(f1).optimizer.T
        T2 = lj.lowner(f2).optimizer.T
        assert np.linalg.norm(T1 - T2) <= 1e-6

    def test_wall_radial_lowner_matches_indicator(self):
        # ball indicator via the radial wall profile: a = n/R, t0 = n
        a, t0 = lj.radial_lowner(lj.WallProfile(1.5), 2)
        assert a == pytest.approx(2.0 / 1.5, rel=1e-9)
        assert t0 == pytest.approx(2.0, abs=1e-9)


class TestTranslatedInputs:
    """The optimum must follow a translated input; the search is not even."""

    def test_shifted_interval_indicator(self):
        f = interval_indicator(0.0, 2.0)
        rep = lj.lowner(f)
        assert rep.optimizer.T[0, 0] == pytest.approx(1.0, abs=1e-6)
        assert rep.optimizer.center[0] == pytest.approx(1.0, abs=1e-6)
        assert rep.optimizer.t == pytest.approx(1.0, abs=1e-6)

    def test_shifted_gaussian_majorant(self):
        g = lj.PiecewiseQuadratic1D([(-math.inf, math.inf, 0.5, -0.7, 0.245)])
        rep = lj.lowner(g)
        assert rep.optimizer.T[0, 0] == pytest.approx(1.0, abs=1e-6)
        assert rep.optimizer.center[0] == pytest.approx(0.7, abs=1e-4)
        assert rep.optimizer.t == pytest.approx(0.5, abs=1e-6)

    def test_shifted_gaussian_minorant(self):
        g = lj.PiecewiseQuadratic1D([(-math.inf, math.inf, 0.5, -0.7, 0.245)])
        rep = lj.john(g)
        assert rep.s0 == pytest.approx(math.exp(-0.5), rel=1e-6)
        assert rep.optimizer.center[0] == pytest.approx(0.7, abs=1e-4)

    def test_shifted_square_indicator(self):
        f = lj.IndicatorFunction(lj.HPolytope.box([0.0, -0.5], [2.0, 1.5]))
        rep = lj.lowner(f)
        assert np.allclose(rep.optimizer.center, [1.0, 0.5], atol=1e-4)
        assert rep.optimizer.t == pytest.approx(2.0, abs=1e-6)
        assert rep.optimizer.det_T() == pytest.approx(2.0, rel=1e-6)

    def test_shifted_square_minorant(self):
        f = lj.IndicatorFunction(lj.HPolytope.box([0.0, -0.5], [2.0, 1.5]))
        rep = lj.john(f)
        assert rep.s0 == 1.0
        assert np.allclose(rep.optimizer.center, [1.0, 0.5], atol=1e-4)
        assert np.allclose(rep.optimizer.T, np.eye(2), atol=1e-4)
