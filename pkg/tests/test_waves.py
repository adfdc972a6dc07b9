import numpy as np
import pytest

import gradflow as gf
from gradflow.domain import FrameTag
from gradflow.errors import (
    DomainTooSmallError,
    InvalidArgumentError,
    NotAHumpError,
)

P3 = gf.ModelParams(p=3.0, N=1)


class TestPhaseField:
    def test_origin_is_critical(self):
        assert gf.tw_rhs(0.0, 0.0, gf.TWParams(c=1.0, p=3.0)) == (0.0, 0.0)

    def test_tangency_on_explicit_orbit_at_unit_speed(self):
        tw = gf.TWParams(c=1.0, p=3.0)
        for V in (0.3, 1.0, 2.5):
            U = V ** 2
            dU, dV = gf.tw_rhs(U, V, tw)
            normal = np.array([1.0, -(tw.p - 1.0) * V ** (tw.p - 2.0)])
            assert abs(normal @ np.array([dU, dV])) < 1e-12

    def test_normal_flux_reference_values(self):
        # on the explicit-orbit curve the normal flux is (p-1)(c-1)V^{p-1}
        assert gf.direction_field_sign(gf.TWParams(c=0.9, p=3.0), 1.0) == pytest.approx(-0.2)
        assert gf.direction_field_sign(gf.TWParams(c=1.1, p=3.0), 2.0) == pytest.approx(0.8)
        assert gf.direction_field_sign(gf.TWParams(c=1.0, p=3.0), 7.7) == 0.0

    def test_normal_flux_sign_trichotomy(self):
        for V in (0.5, 1.0, 2.0):
            assert gf.direction_field_sign(gf.TWParams(c=0.7, p=3.0), V) < 0
            assert gf.direction_field_sign(gf.TWParams(c=1.0, p=3.0), V) == 0.0
            assert gf.direction_field_sign(gf.TWParams(c=1.4, p=3.0), V) > 0

    def test_normal_flux_needs_positive_v(self):
        with pytest.raises(InvalidArgumentError):
            gf.direction_field_sign(gf.TWParams(c=1.0, p=3.0), 0.0)


class TestCriticalPoints:
    def test_eigenstructure(self):
        rep = gf.classify_critical_points(gf.TWParams(c=0.7, p=3.0))
        assert rep.eigenvalues == (0.0, -0.7)
        assert rep.Q1 == (0.0, 1.0)
        J = rep.jacobian
        e1 = np.array(rep.eigenvectors[0])
        assert np.allclose(J @ e1, 0.0)
        e2 = np.array(rep.eigenvectors[1])
        assert np.allclose(J @ e2, -0.7 * e2)

    def test_damping_shifts_infinity_points(self):
        rep = gf.classify_critical_points(gf.TWParams(c=0.5, p=3.0, alpha=0.25))
        assert rep.Q1 == (0.0, 0.8)
        assert rep.Q2 == (0.0, -0.8)


class TestExplicitWave:
    def test_reference_value(self):
        assert gf.explicit_wave(-2.0, 0.0, gf.TWParams(c=1.0, p=3.0)) == 1.0

    def test_vanishes_past_interface(self):
        tw = gf.TWParams(c=1.0, p=3.0)
        assert gf.explicit_wave(0.5, 0.5, tw) == 0.0
        assert gf.explicit_wave(3.0, 0.5, tw) == 0.0

    def test_speed_pairing_enforced(self):
        with pytest.raises(InvalidArgumentError):
            gf.explicit_wave(0.0, 0.0, gf.TWParams(c=0.9, p=3.0))
        with pytest.raises(InvalidArgumentError):
            gf.explicit_wave(0.0, 0.0, gf.TWParams(c=1.0, p=3.0, alpha=0.2))
        # the damped pairing c = 1/(1+alpha) is accepted
        val = gf.explicit_wave(-1.0, 0.0, gf.TWParams(c=1 / 1.2, p=3.0, alpha=0.2))
        assert val == pytest.approx(0.25 / 1.2, rel=1e-14)


class TestSeedCoefficient:
    def test_reference_value(self):
        assert gf.interface_seed_coefficient(gf.TWParams(c=0.9, p=3.0)) == pytest.approx(0.225)

    def test_symbolic_rederivation_p4(self):
        # plug f = a (K - z)^m into the wave equation and require the dominant
        # (K - z)^{m-1} balance to vanish; solve for a and compare
        import sympy as sp

        p = sp.Integer(4)
        c, a, zeta = sp.symbols("c a zeta", positive=True)
        m = (p - 1) / (p - 2)
        f = a * zeta ** m                      # zeta = K - z, so d/dz = -d/dzeta
        fz = -sp.diff(f, zeta)
        flux = (-fz) ** (p - 2) * fz           # fz < 0 on the hump tail
        ode = -c * fz + sp.diff(flux, zeta) + (-fz) ** (p - 1) - f
        lead = sp.simplify(ode.expand() / zeta ** (m - 1))
        coeff = sp.limit(lead, zeta, 0)
        sol = sp.solve(sp.Eq(coeff, 0), a)
        positive = [s for s in sol if s.free_symbols == {c} and sp.simplify(s) != 0]
        expected = c ** sp.Rational(1, int(p - 2)) * ((p - 2) / (p - 1)) ** m
        assert any(sp.simplify(s - expected) == 0 for s in positive)
        c_val = 1.3
        a_num = gf.interface_seed_coefficient(gf.TWParams(c=c_val, p=4.0))
        assert a_num == pytest.approx(float(expected.subs(c, c_val)), rel=1e-12)


class TestInterfaceOrbit:
    def test_separatrix_identity_plain(self):
        orb = gf.integrate_interface_orbit(gf.TWParams(c=1.0, p=3.0), 5.0, rtol=1e-10)
        assert orb.separatrix_residual() <= 1e-6

    def test_separatrix_identity_damped(self):
        tw = gf.TWParams(c=1 / 1.2, p=3.0, alpha=0.2)
        orb = gf.integrate_interface_orbit(tw, 5.0, rtol=1e-10)
        assert orb.separatrix_residual() <= 1e-6

    def test_nonmonotone_below_unit_speed(self):
        orb = gf.integrate_interface_orbit(gf.TWParams(c=0.9, p=3.0), 50.0)
        assert orb.v_zero_events.shape[0] >= 1
        assert orb.u_zero_events.shape[0] >= 1
        z_peak = orb.v_zero_events[0, 0]
        z_left = orb.u_zero_events[0, 0]
        assert z_left < z_peak < 0.0

    def test_monotone_above_unit_speed(self):
        # over long ranges the super-unit-speed orbit eventually hands off to
        # the exponentially growing family (escape is the documented report);
        # the whole computed span stays positive and monotone with no events
        orb = gf.integrate_interface_orbit(gf.TWParams(c=1.5, p=3.0), 50.0)
        assert orb.v_zero_events.shape[0] == 0
        assert orb.u_zero_events.shape[0] == 0
        assert orb.reached_extent or orb.escaped
        assert np.all(orb.U > 0.0) and np.all(orb.V > 0.0)
        assert orb.z[-1] < -35.0  # escape, if any, happens far out

    def test_moderate_superunit_speed_reaches_extent(self):
        orb = gf.integrate_interface_orbit(gf.TWParams(c=1.5, p=3.0), 25.0)
        assert orb.reached_extent and not orb.escaped
        assert orb.v_zero_events.shape[0] == 0
        assert np.all(orb.U > 0.0) and np.all(orb.V > 0.0)

    def test_z_strictly_decreasing(self):
        orb = gf.integrate_interface_orbit(gf.TWParams(c=0.9, p=3.0), 50.0)
        assert np.all(np.diff(orb.z) < 0.0)

    def test_seed_offset_insensitivity(self):
        # backward in z the interface orbit attracts: halving the seed offset
        # moves the computed endpoint by no more than integrator-level error
        from gradflow.waves import seed_sensitivity

        tw = gf.TWParams(c=0.9, p=3.0)
        assert seed_sensitivity(tw, 4.0, seed_delta=1e-6) < 1e-7

    def test_invalid_extent(self):
        with pytest.raises(InvalidArgumentError):
            gf.integrate_interface_orbit(gf.TWParams(c=1.0, p=3.0), -1.0)


class TestHump:
    def test_structure_below_unit_speed(self):
        h = gf.build_hump(gf.TWParams(c=0.9, p=3.0))
        assert h.M > 0.0
        assert h.z_left < h.z_peak < h.K
        zz = np.linspace(h.z_left, h.K, 400)
        vals = h(zz)
        assert vals.min() >= 0.0
        assert vals.max() == pytest.approx(h.M, rel=1e-3)
        assert h(h.z_left - 1.0) == 0.0 and h(h.K + 1.0) == 0.0
        peak_idx = np.argmax(vals)
        assert np.all(np.diff(vals[:peak_idx]) >= -1e-12)
        assert np.all(np.diff(vals[peak_idx:]) <= 1e-12)

    def test_translation_equivariance(self):
        h0 = gf.build_hump(gf.TWParams(c=0.9, p=3.0, K=0.0), seed_delta=1e-6)
        h3 = gf.build_hump(gf.TWParams(c=0.9, p=3.0, K=3.0), seed_delta=1e-6)
        assert h3.z_left == pytest.approx(h0.z_left + 3.0, abs=1e-7)
        assert h3.M == pytest.approx(h0.M, rel=1e-8)
        zz = np.linspace(h0.z_left, 0.0, 500)
        assert np.max(np.abs(h0(zz) - h3(zz + 3.0))) < 1e-6

    def test_speed_at_or_above_separatrix_rejected(self):
        with pytest.raises(InvalidArgumentError):
            gf.build_hump(gf.TWParams(c=1.0, p=3.0))
        with pytest.raises(InvalidArgumentError):
            gf.build_hump(gf.TWParams(c=0.9, p=3.0, alpha=0.2))  # 1/(1+a) < 0.9

    def test_no_hump_within_extent(self):
        # just below the separatrix the arch stretches beyond a short extent
        with pytest.raises(NotAHumpError):
            gf.build_hump(gf.TWParams(c=0.999999, p=3.0), z_extent_max=5.0)


class TestPlateau:
    def test_damping_coefficient(self):
        ps = gf.build_plateau_subsolution(0.9, 1.0, 3.0, 2)
        assert ps.alpha_c == pytest.approx(0.1 / 1.9, rel=1e-12)

    def test_validity_time_dominates_curvature_threshold(self):
        ps = gf.build_plateau_subsolution(0.9, 1.0, 3.0, 2)
        assert ps.tau_min > 2.0 * (ps.N - 1) / ps.alpha_c

    def test_evaluator_regions(self):
        ps = gf.build_plateau_subsolution(0.9, 1.0, 3.0, 2)
        tau = ps.tau_min + 1.0
        # vanishes at and beyond the interface K + c tau
        assert ps.evaluate(tau, ps.K + ps.c * tau) == 0.0
        assert ps.evaluate(tau, ps.K + ps.c * tau + 2.0) == 0.0
        # plateau inside the core
        assert ps.evaluate(tau, 0.0) == ps.M
        core_edge = ps.z_peak_shift + ps.c * tau
        assert ps.evaluate(tau, 0.5 * core_edge) == ps.M

    def test_radially_nonincreasing(self):
        ps = gf.build_plateau_subsolution(0.8, 1.0, 3.0, 2)
        tau = ps.tau_min + 2.0
        g = gf.make_grid("radial", ps.K + ps.c * tau + 1.0, 800)
        vals = ps.evaluate(tau, g.nodes)
        assert np.all(np.diff(vals) <= 1e-10)

    def test_too_early_rejected(self):
        ps = gf.build_plateau_subsolution(0.9, 1.0, 3.0, 2)
        with pytest.raises(InvalidArgumentError):
            ps.evaluate(0.5 * ps.tau_min, 0.0)

    def test_speed_range_enforced(self):
        for c in (0.5, 1.0, 1.2):
            with pytest.raises(InvalidArgumentError):
                gf.build_plateau_subsolution(c, 1.0, 3.0, 1)


class TestSlopeMonotonicityInSpeed:
    def test_reference_difference_p3(self):
        rep = gf.c_monotonicity_check(3.0, 0.0, 0.8, 0.9, [(0.7, 1.0)])
        assert rep.ok and rep.checked == 1
        # measured slope difference equals (c2-c1)/((p-1)|V|^{p-2}) = 0.05
        dv1 = gf.tw_rhs(0.7, 1.0, gf.TWParams(c=0.9, p=3.0))
        dv0 = gf.tw_rhs(0.7, 1.0, gf.TWParams(c=0.8, p=3.0))
        assert (dv1[1] / dv1[0] - dv0[1] / dv0[0]) == pytest.approx(0.05)

    def test_reference_difference_p4(self):
        rep = gf.c_monotonicity_check(4.0, 0.0, 1.0, 2.0, [(1.0, 2.0)])
        assert rep.ok
        dv1 = gf.tw_rhs(1.0, 2.0, gf.TWParams(c=2.0, p=4.0))
        dv0 = gf.tw_rhs(1.0, 2.0, gf.TWParams(c=1.0, p=4.0))
        assert (dv1[1] / dv1[0] - dv0[1] / dv0[0]) == pytest.approx(1.0 / 12.0)

    def test_zero_v_skipped(self):
        rep = gf.c_monotonicity_check(3.0, 0.0, 0.8, 0.9, [(1.0, 0.0), (0.5, 0.5)])
        assert rep.checked == 1 and len(rep.skipped) == 1

    def test_equal_speeds_rejected(self):
        with pytest.raises(InvalidArgumentError):
            gf.c_monotonicity_check(3.0, 0.0, 0.9, 0.9, [(1.0, 1.0)])


class TestSpreadingCap:
    def test_admissible_corner_p3(self):
        r_bound, t_min = gf.cap_parameter_bounds(P3)
        assert r_bound == 0.0625
        assert t_min == 40.0
        assert gf.cap_parameter_bounds(gf.ModelParams(p=3.0, N=2))[1] == 56.0

    def test_reference_value_at_origin(self):
        val = gf.spreading_cap_values(0.0625, 40.0, 0.0, 0.0, P3)
        assert val == pytest.approx(0.1953125, rel=1e-15)

    def test_positive_part_support(self):
        vals = gf.spreading_cap_values(0.0625, 40.0, 0.0, np.array([2.4, 2.5, 3.0]), P3)
        assert vals[0] > 0.0
        assert vals[1] == 0.0 and vals[2] == 0.0

    def test_parameter_ranges(self):
        with pytest.raises(InvalidArgumentError):
            gf.spreading_cap_values(0.07, 40.0, 0.0, 0.0, P3)
        with pytest.raises(InvalidArgumentError):
            gf.spreading_cap_values(0.05, 39.0, 0.0, 0.0, P3)

    def test_sample_needs_room(self):
        g = gf.make_grid("line", 2.0, 64)
        with pytest.raises(DomainTooSmallError):
            gf.sample_spreading_cap(0.0625, 40.0, 0.0, g, P3)

    def test_is_discrete_subsolution_of_rescaled_form(self):
        # residual of the sampled family must stay below +5h on smooth nodes
        g = gf.make_grid("line", 4.5, 900)
        R, T = gf.cap_parameter_bounds(P3)

        def sampler(tau):
            return gf.spreading_cap_values(R, T, tau, g.nodes, P3)

        for tau in (0.0, 3.0, 8.0):
            res = gf.residual_field(sampler, tau, g, P3, "v")
            edge = R * (T + tau)
            smooth = np.abs(np.abs(g.nodes) - edge) > 3 * g.h
            vals = res[1:-1][smooth[1:-1]]
            assert np.nanmax(vals) <= 5 * g.h


class TestFrontBarriers:
    def test_front_supersolution_reference_value(self):
        assert gf.front_supersolution_values(0.5, 0.0, 0.0, P3) == pytest.approx(0.0625)

    def test_front_exactness_one_dimension(self):
        # away from the origin the sharp front solves the w-frame flow exactly;
        # the discrete residual is pure truncation error, O(h)
        g = gf.make_grid("radial", 1.5, 1500)

        def sampler(tau):
            return gf.front_supersolution_values(0.5, tau, g.nodes, P3)

        res = gf.residual_field(sampler, 9.0, g, P3, "w")
        edge = 9.5 / 10.0
        ok = (g.nodes > 0.05) & (np.abs(g.nodes - edge) > 3 * g.h)
        band = np.abs(res[ok])
        assert np.nanmax(band) <= 5 * g.h

    def test_front_excess_matches_curvature_term_n2(self):
        pp = gf.ModelParams(p=3.0, N=2)
        g = gf.make_grid("radial", 1.5, 1500)
        tau, R = 9.0, 0.5

        def sampler(t):
            return gf.front_supersolution_values(R, t, g.nodes, pp)

        res = gf.residual_field(sampler, tau, g, pp, "w")
        F = gf.front_supersolution_values(R, tau, g.nodes, pp)
        excess = F / ((1.0 + tau) * np.abs(g.nodes, where=g.nodes != 0,
                                           out=np.ones_like(g.nodes)))
        sel = (g.nodes >= 0.05) & (g.nodes <= 0.65)
        rel = np.abs(res[sel] - excess[sel]) / excess[sel]
        assert np.nanmax(rel) <= 0.10
        assert np.nanmin(res[sel]) > 0.0  # strictly a supersolution in N = 2

    def test_damped_front_window_values(self):
        st, win = gf.sample_damped_front(0.5, 0.1, 0.6, 9.0,
                                         gf.make_grid("radial", 1.5, 300), P3)
        assert win.tau_min == pytest.approx(2.0 / 0.6 - 0.5, rel=1e-12)
        assert win.inner_edge == pytest.approx(0.37, rel=1e-12)
        assert st.frame.tag is FrameTag.RESCALED_W

    def test_damped_front_is_subsolution_on_window(self):
        g = gf.make_grid("radial", 1.5, 1500)
        R, theta, beta, tau = 0.5, 0.1, 0.6, 9.0
        win = gf.waves.damped_front_validity(R, beta, tau, P3)
        assert tau >= win.tau_min

        def sampler(t):
            return gf.damped_front_values(R, theta, beta, t, g.nodes, P3)

        res = gf.residual_field(sampler, tau, g, P3, "w")
        sel = (g.nodes > 2 * g.h) & (g.nodes <= win.inner_edge)
        assert np.nanmax(res[sel]) <= 5 * g.h

    def test_damped_front_theta_cap_n2(self):
        pp = gf.ModelParams(p=3.0, N=2)
        win = gf.waves.damped_front_validity(0.5, 0.6, 9.0, pp, r_star=0.4)
        assert win.theta_cap == pytest.approx((0.4 * 0.4 / 2.0), rel=1e-12)

    def test_parameter_ranges(self):
        g = gf.make_grid("radial", 1.5, 64)
        with pytest.raises(InvalidArgumentError):
            gf.front_supersolution_values(1.5, 0.0, 0.0, P3)
        with pytest.raises(InvalidArgumentError):
            gf.sample_damped_front(0.5, 1.5, 0.6, 1.0, g, P3)
        with pytest.raises(InvalidArgumentError):
            gf.sample_damped_front(0.5, 0.1, 0.4, 1.0, g, P3)


class TestOrderingAgainstNumericalRuns:
    def test_cap_barrier_stays_below_evolved_state(self):
        # start the rescaled flow exactly on the cap barrier: the numerical
        # solution must stay above the advancing barrier (up to scheme slack)
        pp = P3
        g = gf.make_grid("radial", 4.0, 800)
        R, T = gf.cap_parameter_bounds(pp)
        st = gf.sample_spreading_cap(R, T, 0.0, g, pp)
        tau_end = 2.0
        fin, _ = gf.evolve(st, "v", tau_end)
        barrier = gf.sample_spreading_cap(R, T, tau_end, g, pp)
        rep = gf.check_comparison(barrier, fin, slack=5 * g.h)
        assert rep.passed

    def test_front_barrier_stays_above_evolved_state(self):
        pp = P3
        g = gf.make_grid("radial", 1.5, 750)
        st = gf.sample_front_supersolution(0.5, 0.0, g, pp)
        tau_end = 3.0
        fin, _ = gf.evolve(st, "w", tau_end, on_overflow="clamp")
        barrier = gf.sample_front_supersolution(0.5, tau_end, g, pp)
        rep = gf.check_comparison(fin, barrier, slack=5 * g.h)
        assert rep.passed
