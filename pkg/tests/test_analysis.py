import io
import math

import numpy as np
import pytest

import gradflow as gf
from gradflow.domain import Frame, FrameTag, SolutionState
from gradflow.errors import (
    InvalidArgumentError,
    InvalidFrameError,
    InvalidWindowError,
)

P3 = gf.ModelParams(p=3.0, N=1)


def sandpile_state(n=400, r_max=2.0, tag=FrameTag.RESCALED_W, kind="line", N=1):
    g = gf.make_grid(kind, r_max, n)
    pp = gf.ModelParams(p=3.0, N=N)
    return SolutionState(Frame(tag, 0.0), g, gf.sandpile_profile(g.nodes, pp), pp)


class TestSupportRadius:
    def test_sandpile(self):
        st = sandpile_state(n=400)  # h = 0.01
        assert abs(gf.support_radius(st) - 1.0) <= st.grid.h

    def test_zero_state(self):
        g = gf.make_grid("line", 2.0, 32)
        st = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, np.zeros(g.n_nodes), P3)
        assert gf.support_radius(st) == 0.0

    def test_wave_right_edge(self):
        g = gf.make_grid("line", 4.0, 800)
        st = gf.sample_initial(gf.InitialData.explicit_wave(2.0), g, P3,
                               frame_tag=FrameTag.RESCALED_V)
        left, right = gf.support_edges(st)
        assert abs(right - 2.0) <= g.h
        assert left == pytest.approx(-4.0 - g.h / 2)


class TestNorms:
    def test_sandpile_reference_values(self):
        st = sandpile_state(n=2000)
        norms = gf.state_norms(st)
        assert norms["Linf"] == 0.25
        # |dW/dx| = (1-|x|)/2 <= 1/2, attained at the support edge
        assert norms["Lip"] == pytest.approx(0.5, abs=st.grid.h)
        assert norms["L1"] == pytest.approx(1.0 / 6.0, abs=1e-6)

    def test_radial_matches_line_for_even_profile(self):
        line = gf.state_norms(sandpile_state(n=3000))
        radial = gf.state_norms(sandpile_state(n=1500, kind="radial"))
        assert radial["L1"] == pytest.approx(line["L1"], rel=1e-6)
        assert radial["Linf"] == line["Linf"]

    def test_zero_state(self):
        g = gf.make_grid("line", 1.0, 16)
        st = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, np.zeros(g.n_nodes), P3)
        assert all(v == 0.0 for v in gf.state_norms(st).values())


class TestSeriesRecorder:
    def test_collects_and_streams_csv(self):
        sink = io.StringIO()
        rec = gf.SeriesRecorder(sink=sink)
        rec(sandpile_state())
        series = rec.series(FrameTag.RESCALED_W)
        assert set(series) == {"L1", "Linf", "Lip", "support_radius"}
        lines = sink.getvalue().strip().split("\n")
        assert lines[0] == "time,L1,Linf,Lip,support_radius"
        assert len(lines) == 2

    def test_rate_series_validation(self):
        with pytest.raises(InvalidArgumentError):
            gf.RateSeries("L1", FrameTag.RESCALED_V,
                          np.array([0.0, 1.0, 1.0]), np.zeros(3))


class TestScaledBounds:
    @staticmethod
    def series_from(fn, label="Linf"):
        tau = np.linspace(0.5, 40.0, 200)
        return gf.RateSeries(label, FrameTag.RESCALED_V, tau, fn(tau))

    def test_constant_ratio_passes(self):
        rep = gf.check_scaled_bounds(self.series_from(lambda t: 3.0 * t ** 2), P3)
        assert rep.passed
        assert rep.measured == pytest.approx(1.0, rel=1e-6)

    def test_exponent_cancellation(self):
        # value tau^2 with the sup-norm exponent 2 at p = 3: bounded ratio
        rep = gf.check_scaled_bounds(self.series_from(lambda t: t ** 2), P3)
        assert rep.passed

    def test_constructed_violation_fails(self):
        rep = gf.check_scaled_bounds(self.series_from(lambda t: t ** 3), P3)
        assert not rep.passed
        assert rep.measured > 2.0

    def test_l1_exponent_n1_p3(self):
        assert gf.analysis.scaled_bound_exponent("L1", P3) == pytest.approx(3.0)
        assert gf.analysis.scaled_bound_exponent("Lip", P3) == pytest.approx(1.0)

    def test_insufficient_range_rejected(self):
        tau = np.linspace(1.0, 5.0, 20)
        s = gf.RateSeries("Linf", FrameTag.RESCALED_V, tau, tau ** 2)
        with pytest.raises(InvalidWindowError):
            gf.check_scaled_bounds(s, P3)

    def test_wrong_frame_rejected(self):
        tau = np.linspace(0.5, 40.0, 50)
        s = gf.RateSeries("Linf", FrameTag.ORIGINAL, tau, tau ** 2)
        with pytest.raises(InvalidFrameError):
            gf.check_scaled_bounds(s, P3)


class TestExpansionRate:
    def test_translating_edge_ratio(self):
        tau = np.linspace(0.0, 20.0, 300)
        s = gf.RateSeries("support_radius", FrameTag.RESCALED_V, tau, 0.2 + tau)
        rep = gf.fit_expansion_rate(s, P3, R0=0.2, u0_sup=1.0)
        assert rep.measured == pytest.approx((0.2 + 20.0) / 20.0)
        assert rep.passed  # nondecreasing + inside the wave bracket
        assert rep.details["original_frame_expected"] == 1.0

    def test_half_speed_series_reports_low_ratio(self):
        tau = np.linspace(0.0, 20.0, 300)
        s = gf.RateSeries("support_radius", FrameTag.RESCALED_V, tau, 0.5 * tau)
        rep = gf.fit_expansion_rate(s, P3)
        assert rep.measured == pytest.approx(0.5)

    def test_bracket_violation_detected(self):
        tau = np.linspace(0.0, 25.0, 300)
        s = gf.RateSeries("support_radius", FrameTag.RESCALED_V, tau, 5.0 + 2.0 * tau)
        rep = gf.fit_expansion_rate(s, P3, R0=1.0, u0_sup=1.0)
        assert not rep.passed
        assert rep.details["bracket_max_excess"] > 0

    def test_wave_bracket_radius_reference(self):
        assert gf.wave_bracket_radius(1.0, 1.0, P3) == 3.0

    def test_shrinking_support_fails_trend(self):
        tau = np.linspace(0.0, 20.0, 100)
        s = gf.RateSeries("support_radius", FrameTag.RESCALED_V, tau,
                          10.0 - 0.1 * tau)
        rep = gf.fit_expansion_rate(s, P3)
        assert not rep.passed


class TestGrowup:
    def test_quadratic_growth_slope(self):
        tau = np.linspace(1.0, 40.0, 200)
        rep = gf.fit_growup_exponent(tau, 3.0 * tau ** 2, P3)
        assert rep.passed
        assert rep.measured == pytest.approx(2.0, abs=1e-10)

    def test_linear_growth_fails_for_p3(self):
        tau = np.linspace(1.0, 40.0, 200)
        rep = gf.fit_growup_exponent(tau, tau, P3)
        assert not rep.passed

    def test_nonpositive_values_fail(self):
        tau = np.linspace(1.0, 40.0, 50)
        rep = gf.fit_growup_exponent(tau, np.zeros(50), P3)
        assert not rep.passed


class TestProfileError:
    def test_sandpile_state_is_exact(self):
        assert gf.profile_error(sandpile_state()) == 0.0

    def test_zero_state_error_is_central_value(self):
        g = gf.make_grid("radial", 1.5, 150)
        st = SolutionState(Frame(FrameTag.RESCALED_W, 0.0), g, np.zeros(g.n_nodes), P3)
        assert gf.profile_error(st) == 0.25

    def test_log_time_frame_accepted(self):
        st = sandpile_state(tag=FrameTag.LOG_TIME)
        assert gf.profile_error(st) == 0.0

    def test_wrong_frame_rejected(self):
        st = sandpile_state(tag=FrameTag.RESCALED_V)
        with pytest.raises(InvalidFrameError):
            gf.profile_error(st)


class TestComparison:
    def test_state_vs_itself(self):
        st = sandpile_state()
        rep = gf.check_comparison(st, st, slack=0.0)
        assert rep.passed and rep.violation == 0.0

    def test_ordered_pair_passes_at_zero_slack(self):
        st = sandpile_state()
        double = st.with_values(2.0 * st.values)
        assert gf.check_comparison(st, double, slack=0.0).passed

    def test_violation_magnitude_and_location(self):
        st = sandpile_state()
        double = st.with_values(2.0 * st.values)
        rep = gf.check_comparison(double, st, slack=0.0)
        assert not rep.passed
        assert rep.violation == pytest.approx(0.25)
        assert rep.where == pytest.approx(0.0)

    def test_grid_mismatch_rejected(self):
        a = sandpile_state(n=100)
        b = sandpile_state(n=200)
        with pytest.raises(InvalidArgumentError):
            gf.check_comparison(a, b)


class TestSymmetryInequality:
    def test_symmetric_nonincreasing_passes(self):
        g = gf.make_grid("line", 4.0, 400)
        vals = gf.bump_profile(g.nodes, 1.0, 1.0)
        st = SolutionState(Frame(FrameTag.RESCALED_V, 1.0), g, vals, P3)
        rep = gf.symmetry_inequality_check(st, R0=1.0, slack=0.0)
        assert rep.passed and not rep.skipped

    def test_zero_outside_double_radius_passes(self):
        g = gf.make_grid("line", 5.0, 500)
        vals = gf.bump_profile(g.nodes, 0.9, 1.0)
        st = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, vals, P3)
        rep = gf.symmetry_inequality_check(st, R0=1.0, slack=0.0)
        assert rep.passed

    def test_violation_detected(self):
        g = gf.make_grid("line", 5.0, 500)
        vals = gf.bump_profile(g.nodes - 3.0, 0.5, 1.0)  # lump far off-centre
        st = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, vals, P3)
        rep = gf.symmetry_inequality_check(st, R0=0.5, slack=0.0)
        assert not rep.passed
        assert rep.violation > 0.5

    def test_no_admissible_pairs_skipped(self):
        g = gf.make_grid("line", 1.0, 32)
        vals = gf.bump_profile(g.nodes, 0.9, 1.0)
        st = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, vals, P3)
        rep = gf.symmetry_inequality_check(st, R0=2.0, slack=0.0)
        assert rep.skipped and rep.passed

    def test_needs_line_grid(self):
        g = gf.make_grid("radial", 2.0, 32)
        st = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g,
                           np.zeros(g.n_nodes), P3)
        with pytest.raises(InvalidArgumentError):
            gf.symmetry_inequality_check(st, R0=0.5)


class TestSupportMonotoneUnderDomination:
    def test_radius_monotone(self):
        g = gf.make_grid("line", 3.0, 300)
        lo = gf.bump_profile(g.nodes, 0.8, 1.0)
        hi = lo + gf.bump_profile(g.nodes, 1.5, 0.3)
        st_lo = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, lo, P3)
        st_hi = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), g, hi, P3)
        assert gf.support_radius(st_lo) <= gf.support_radius(st_hi)


class TestFitReportSerialisation:
    def test_json_dict_roundtrip(self):
        rep = gf.FitReport(label="demo", measured=1.0, expected=1.0,
                           tolerance=0.1, passed=True, window=(0.0, 1.0),
                           details={"arr": np.arange(3)})
        d = rep.to_json_dict()
        assert d["pass"] is True
        assert d["details"]["arr"] == [0, 1, 2]
