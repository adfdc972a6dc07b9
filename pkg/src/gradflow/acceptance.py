"""Acceptance suite: one runner per criterion, each returning typed verdicts.

Every runner pins the tolerances stated in the build contract.  Two runners
document infeasibilities of their stated parameterizations that are inherent
to this class of monotone first-order schemes (see the individual runners and
the decisions log): the exact-wave regression at h = 1e-3 to tau = 5 needs
around 1e9 explicit steps and is only executed in full when
GRADFLOW_ACCEPT_FULL=1 is set, and the long-horizon profile-convergence run
is executed verbatim and reported honestly, together with a same-physics
refinement study that isolates the discretization effect.

Heavy runs are cached on the suite instance so criteria sharing a run (6, 8,
9) do not recompute it.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import waves
from .analysis import (
    SeriesRecorder,
    check_comparison,
    check_scaled_bounds,
    fit_expansion_rate,
    fit_growup_exponent,
    profile_error,
    support_edges,
    symmetry_inequality_check,
    wave_bracket_radius,
)
from .domain import (
    Frame,
    FrameTag,
    InitialData,
    ModelParams,
    SolutionState,
    bump_profile,
    make_grid,
    sample_initial,
    wave_profile,
)
from .errors import GradflowError
from .frames import t_of_tau, tau_of_t, u_to_v, v_to_u, v_to_w, w_to_omega, w_to_v, omega_to_w
from .solver import evolve, residual_field, stable_dt, step
from .waves import (
    TWParams,
    cap_parameter_bounds,
    damped_front_values,
    direction_field_sign,
    front_supersolution_values,
    integrate_interface_orbit,
    sample_spreading_cap,
    spreading_cap_values,
)

FULL_ENV = "GRADFLOW_ACCEPT_FULL"


@dataclass
class Verdict:
    id: str
    description: str
    expected: object
    measured: object
    tolerance: object
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        def clean(v):
            if isinstance(v, np.ndarray):
                return v.tolist()
            if isinstance(v, (np.floating, np.integer)):
                return v.item()
            if isinstance(v, float) and not math.isfinite(v):
                return str(v)
            return v

        return {
            "id": self.id,
            "description": self.description,
            "expected": clean(self.expected),
            "measured": clean(self.measured),
            "tolerance": clean(self.tolerance),
            "pass": bool(self.passed),
            "details": {k: clean(v) for k, v in self.details.items()},
        }

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.id}: measured={self.measured} expected={self.expected}"


P3_1 = ModelParams(p=3.0, N=1)
P3_2 = ModelParams(p=3.0, N=2)


def _wave_strip_run(h: float, tau_end: float, r_max: float, params: ModelParams):
    """Evolve the explicit wave with exact inflow data; return error metrics."""
    grid = make_grid("line", r_max, int(round(2 * r_max / h)))
    state = sample_initial(InitialData.explicit_wave(0.0), grid, params,
                           frame_tag=FrameTag.RESCALED_V)

    def boundary(tau):
        return float(wave_profile(-r_max, tau, params)), 0.0

    final, stats = evolve(state, "v", tau_end, boundary=boundary)
    exact = wave_profile(grid.nodes, tau_end, params)
    sup_err = float(np.max(np.abs(final.values - exact)))
    edge_err = abs(support_edges(final)[1] - tau_end)
    return sup_err, edge_err, stats.steps


class AcceptanceSuite:
    """Runs the acceptance criteria; heavy shared runs are cached."""

    def __init__(self, log=None):
        self._log = log or (lambda msg: None)

    # ---------------------------------------------------------------- shared runs

    @cached_property
    def expansion_run(self):
        """v-frame bump run to tau = 40 shared by criteria 6, 8 and 9.

        A radial N = 1 mesh carries the same symmetric 1-D dynamics at half
        the nodes; h = 0.02 keeps the O(h)-per-unit-time edge drift of the
        monotone scheme inside the criterion band.
        """
        self._log("running v-frame expansion run (tau = 40, h = 0.02) ...")
        h = 0.02
        grid = make_grid("radial", 46.0, int(round(46.0 / h)))
        state = sample_initial(InitialData.bump(1.0, 1.0), grid, P3_1,
                               frame_tag=FrameTag.RESCALED_V)
        recorder = SeriesRecorder()
        origin_values = []

        def observe(s):
            recorder(s)
            origin_values.append((s.frame.clock, float(s.values[0])))

        t0 = time.time()
        final, stats = evolve(state, "v", 40.0, observer=observe,
                              output_times=[0.25 * k for k in range(1, 161)])
        self._log(f"  done in {time.time() - t0:.0f}s ({stats.steps} steps)")
        return {
            "grid": grid,
            "series": recorder.series(FrameTag.RESCALED_V),
            "origin": np.array(origin_values),
            "stats": stats,
        }

    @cached_property
    def profile_run(self):
        """w-frame bump runs (N = 1 and N = 2) to tau = 1000 for criterion 7."""
        out = {}
        checkpoints = [10.0, 30.0, 100.0, 300.0, 1000.0]
        for N in (1, 2):
            params = ModelParams(p=3.0, N=N)
            grid = make_grid("radial", 1.5, 750)  # h = 2e-3 as stated
            state = sample_initial(InitialData.bump(1.0, 1.0), grid, params,
                                   frame_tag=FrameTag.RESCALED_W)
            errors = {}
            self._log(f"running w-frame profile run N={N} (tau = 1000) ...")
            t0 = time.time()
            final, stats = evolve(
                state, "w", 1000.0,
                observer=lambda s: errors.__setitem__(round(s.frame.clock), profile_error(s)),
                output_times=checkpoints,
                on_overflow="clamp",
            )
            self._log(f"  done in {time.time() - t0:.0f}s ({stats.steps} steps)")
            out[N] = {"errors": errors, "final": final, "stats": stats}
        return out

    @cached_property
    def sandwich_runs(self):
        """Asymmetric bump plus its translated minorant and majorant (crit 10)."""
        self._log("running sandwich trio (tau = 10) ...")
        h = 0.02
        grid = make_grid("line", 14.0, int(round(28.0 / h)))
        x = grid.nodes
        u0 = bump_profile(x - 0.3, 0.7, 1.0) + bump_profile(x + 0.5, 0.3, 0.4)
        shift = 0.3
        shift_cells = int(round(shift / h))
        minor0 = bump_profile(x, 0.35, 0.25)
        # radially nonincreasing plateau covering sup u0 over supp u0
        top = float(u0.max()) * (1.0 + 1e-12)
        major0 = np.clip((1.5 - np.abs(x)) * (top / 0.5), 0.0, top)

        assert np.all(minor0 <= np.interp(x + shift, x, u0) + 1e-15)
        assert np.all(u0 <= major0)

        def run(values):
            state = SolutionState(Frame(FrameTag.RESCALED_V, 0.0), grid, values, P3_1)
            snaps = {}
            evolve(state, "v", 10.0,
                   observer=lambda s: snaps.__setitem__(round(s.frame.clock), s),
                   output_times=[2.0, 5.0, 10.0])
            return snaps

        t0 = time.time()
        trio = {"u": run(u0), "minor": run(minor0), "major": run(major0)}
        self._log(f"  done in {time.time() - t0:.0f}s")
        trio["grid"] = grid
        trio["shift_cells"] = shift_cells
        return trio

    # ---------------------------------------------------------------- criteria

    def criterion_1(self) -> list[Verdict]:
        """Exact-wave regression.

        As stated (h = 1e-3 to tau = 5 plus an h/2 leg) the run needs about
        1.1e9 explicit steps - several hours, not minutes - because the wave
        tail pins dt ~ h^2/|Dv| over a domain that must contain the whole
        interface path.  The same physics at a feasible scale (exact inflow
        data, tau = 0.5, h in {8e-3, 4e-3}) pins the error constant and the
        convergence order; the stated-scale leg runs only under
        GRADFLOW_ACCEPT_FULL=1.
        """
        verdicts = []
        tau_end = 0.5
        errs = {}
        for h in (8e-3, 4e-3):
            sup_err, edge_err, steps = _wave_strip_run(h, tau_end, 2.5, P3_1)
            errs[h] = sup_err
            verdicts.append(Verdict(
                id=f"1-evidence-interface-h{h:g}",
                description="interface position error <= 2h per unit time",
                expected=f"<= {2 * h * max(tau_end, 1.0):g}",
                measured=edge_err,
                tolerance=2 * h * max(tau_end, 1.0),
                passed=edge_err <= 2 * h * max(tau_end, 1.0),
                details={"steps": steps},
            ))
        order = math.log2(errs[8e-3] / errs[4e-3])
        const = errs[4e-3] / (4e-3 * tau_end)
        verdicts.append(Verdict(
            id="1-evidence-order",
            description="sup error order under h -> h/2 (exact-wave strip)",
            expected=">= 0.8",
            measured=order,
            tolerance=0.8,
            passed=order >= 0.8,
            details={"sup_errors": {str(k): v for k, v in errs.items()},
                     "error_constant_per_h_tau": const},
        ))
        projected = const * 1e-3 * 5.0
        if os.environ.get(FULL_ENV) == "1":
            sup_err, edge_err, steps = _wave_strip_run(1e-3, 5.0, 6.0, P3_1)
            sup_err2, _, _ = _wave_strip_run(5e-4, 5.0, 6.0, P3_1)
            order_full = math.log2(sup_err / sup_err2)
            verdicts.append(Verdict(
                id="1-stated",
                description="sup error <= 2e-2 at h = 1e-3, tau = 5; order >= 0.8;"
                            " interface <= 2h per unit time",
                expected="<= 0.02 and order >= 0.8",
                measured={"sup_err": sup_err, "order": order_full,
                          "edge_err_per_tau": edge_err / 5.0},
                tolerance=0.02,
                passed=(sup_err <= 2e-2 and order_full >= 0.8
                        and edge_err <= 2e-3 * 5.0),
                details={"steps": steps},
            ))
        else:
            verdicts.append(Verdict(
                id="1-stated",
                description="exact-wave regression at the stated parameters",
                expected="sup error <= 2e-2 at h = 1e-3, tau = 5 (plus h/2 leg)",
                measured="not run: needs ~1.1e9 explicit steps (hours); "
                         f"set {FULL_ENV}=1 to execute",
                tolerance=0.02,
                passed=False,
                details={
                    "reason": "stated parameters exceed a desk-scale budget: "
                              "dt ~ 0.1 h^2/|Dv| with |Dv| up to ~5.5 over a "
                              "domain containing the tau in [0,5] interface "
                              "path gives ~2e8 steps at h = 1e-3 and ~8e8 at "
                              "h = 5e-4",
                    "projected_sup_error_at_stated_h": projected,
                    "projection_passes_tolerance": bool(projected <= 2e-2),
                },
            ))
        return verdicts

    def criterion_2(self) -> list[Verdict]:
        """Separatrix identity of the interface orbit, plain and damped."""
        verdicts = []
        for label, tw in (("plain", TWParams(c=1.0, p=3.0)),
                          ("damped", TWParams(c=1 / 1.2, p=3.0, alpha=0.2))):
            orbit = integrate_interface_orbit(tw, 5.0, rtol=1e-10)
            res = orbit.separatrix_residual()
            verdicts.append(Verdict(
                id=f"2-separatrix-{label}",
                description="|U - (1+alpha) V^2| / max(U, 1e-12) along the orbit",
                expected="<= 1e-6",
                measured=res,
                tolerance=1e-6,
                passed=res <= 1e-6,
                details={"c": tw.c, "alpha": tw.alpha, "extent": 5.0},
            ))
        return verdicts

    def criterion_3(self) -> list[Verdict]:
        """Orbit trichotomy and the sign of the normal flux."""
        verdicts = []
        slow = integrate_interface_orbit(TWParams(c=0.9, p=3.0), 50.0)
        ok_slow = (slow.v_zero_events.shape[0] >= 1
                   and slow.u_zero_events.shape[0] >= 1)
        verdicts.append(Verdict(
            id="3-nonmonotone-c0.9",
            description="slope-zero then value-zero events below unit speed",
            expected="both events present",
            measured={"v_zeros": int(slow.v_zero_events.shape[0]),
                      "u_zeros": int(slow.u_zero_events.shape[0])},
            tolerance=None,
            passed=ok_slow,
        ))
        fast = integrate_interface_orbit(TWParams(c=1.5, p=3.0), 50.0)
        ok_fast = (fast.v_zero_events.shape[0] == 0
                   and bool(np.all(fast.U > 0)) and bool(np.all(fast.V > 0))
                   and (fast.reached_extent or fast.escaped))
        verdicts.append(Verdict(
            id="3-monotone-c1.5",
            description="no slope-zero event, positive monotone span above unit"
                        " speed (escape beyond |z| ~ 40 is the documented hand-off"
                        " to the exponential family)",
            expected="no events, U,V > 0",
            measured={"v_zeros": int(fast.v_zero_events.shape[0]),
                      "z_end": float(fast.z[-1]), "escaped": fast.escaped},
            tolerance=None,
            passed=ok_fast,
        ))
        signs_ok = True
        for c in (0.9, 1.0, 1.5):
            for V in (0.5, 1.0, 2.0):
                s = direction_field_sign(TWParams(c=c, p=3.0), V)
                signs_ok &= (np.sign(s) == np.sign(c - 1.0))
        verdicts.append(Verdict(
            id="3-normal-flux-sign",
            description="normal flux sign equals sign(c - 1) exactly",
            expected="sign match at V in {0.5, 1, 2}",
            measured=bool(signs_ok),
            tolerance=None,
            passed=bool(signs_ok),
        ))
        return verdicts

    def criterion_4(self) -> list[Verdict]:
        """Discrete comparison principle and the spreading-cap ordering."""
        rng = np.random.default_rng(2024)
        violations = 0
        pairs = 200
        for k in range(pairs):
            kind = "line" if k % 2 == 0 else "radial"
            params = P3_1 if kind == "line" else P3_2
            grid = make_grid(kind, 2.0, 64)
            u = rng.uniform(0.0, 2.0, grid.n_nodes)
            gap = rng.uniform(1e-6, 0.5, grid.n_nodes)
            for arr in (u, gap):
                arr[-1] = 0.0
                if kind == "line":
                    arr[0] = 0.0
            for form, tag, tau in (("original", FrameTag.ORIGINAL, 0.0),
                                   ("v", FrameTag.RESCALED_V, 0.0),
                                   ("w", FrameTag.RESCALED_W, float(rng.uniform(0, 3)))):
                lo = SolutionState(Frame(tag, tau), grid, u, params)
                hi = SolutionState(Frame(tag, tau), grid, u + gap, params)
                dt = min(stable_dt(lo, form), stable_dt(hi, form))
                s_lo, _ = step(lo, form, dt)
                s_hi, _ = step(hi, form, dt)
                if not np.all(s_hi.values >= s_lo.values):
                    violations += 1
        verdicts = [Verdict(
            id="4-monotone-pairs",
            description="nodewise order preserved for 200 random pairs, one step"
                        " of each form, zero slack",
            expected="0 violations",
            measured=violations,
            tolerance=0,
            passed=violations == 0,
        )]

        # ordering against the spreading-cap barrier from exactly matching data;
        # the evolved state spreads like any bump (edge <= R1 + tau ~ 13.4), so
        # the domain is sized for the solution, not the barrier
        h = 0.01
        grid = make_grid("radial", 14.0, int(round(14.0 / h)))
        R, T = cap_parameter_bounds(P3_1)
        state = sample_spreading_cap(R, T, 0.0, grid, P3_1)
        worst = -math.inf
        checkpoints = [2.5, 5.0, 7.5, 10.0]

        def observe(s):
            nonlocal worst
            barrier = sample_spreading_cap(R, T, s.frame.clock, grid, P3_1)
            worst = max(worst, check_comparison(barrier, s, slack=5 * h).violation)

        evolve(state, "v", 10.0, observer=observe, output_times=checkpoints)
        verdicts.append(Verdict(
            id="4-cap-ordering",
            description="v-frame run stays above the sampled spreading cap to"
                        " tau = 10",
            expected=f"max barrier excess <= {5 * h:g}",
            measured=worst,
            tolerance=5 * h,
            passed=worst <= 5 * h,
            details={"checkpoints": checkpoints},
        ))
        return verdicts

    def criterion_5(self) -> list[Verdict]:
        """Signs of the discrete residuals of the three barrier families."""
        verdicts = []

        # spreading cap: subsolution of the v-frame flow
        h = 0.01
        grid = make_grid("line", 4.5, int(round(9.0 / h)))
        R, T = cap_parameter_bounds(P3_1)

        def cap_sampler(tau):
            return spreading_cap_values(R, T, tau, grid.nodes, P3_1)

        worst = -math.inf
        for tau in (0.0, 4.0, 8.0):
            res = residual_field(cap_sampler, tau, grid, P3_1, "v")
            edge = R * (T + tau)
            smooth = np.abs(np.abs(grid.nodes) - edge) > 3 * h
            worst = max(worst, float(np.nanmax(res[1:-1][smooth[1:-1]])))
        verdicts.append(Verdict(
            id="5-cap-subsolution",
            description="spreading-cap residual of the v-frame form at smooth nodes",
            expected=f"<= {5 * h:g}",
            measured=worst,
            tolerance=5 * h,
            passed=worst <= 5 * h,
        ))

        # sharp front: supersolution of the w-frame flow away from the origin
        hw = 1e-3
        gw = make_grid("radial", 1.5, int(round(1.5 / hw)))
        tau0 = 9.0

        def front_sampler_n1(tau):
            return front_supersolution_values(0.5, tau, gw.nodes, P3_1)

        res1 = residual_field(front_sampler_n1, tau0, gw, P3_1, "w")
        edge = (tau0 + 0.5) / (tau0 + 1.0)
        sel = (gw.nodes > 0.05) & (np.abs(gw.nodes - edge) > 3 * hw)
        low = float(np.nanmin(res1[sel]))
        verdicts.append(Verdict(
            id="5-front-supersolution-n1",
            description="sharp-front residual of the w-frame form away from y = 0",
            expected=f">= {-5 * hw:g}",
            measured=low,
            tolerance=5 * hw,
            passed=low >= -5 * hw,
        ))

        def front_sampler_n2(tau):
            return front_supersolution_values(0.5, tau, gw.nodes, P3_2)

        res2 = residual_field(front_sampler_n2, tau0, gw, P3_2, "w")
        F = front_supersolution_values(0.5, tau0, gw.nodes, P3_2)
        with np.errstate(divide="ignore", invalid="ignore"):
            excess = F / ((1.0 + tau0) * gw.nodes)
        band = (gw.nodes >= 0.05) & (gw.nodes <= 0.65)
        rel = float(np.nanmax(np.abs(res2[band] - excess[band]) / excess[band]))
        verdicts.append(Verdict(
            id="5-front-excess-n2",
            description="N = 2 front residual matches the curvature excess"
                        " (N-1) F / ((1+tau)|y|)",
            expected="relative mismatch <= 0.10 on y in [0.05, 0.65]",
            measured=rel,
            tolerance=0.10,
            passed=rel <= 0.10 and float(np.nanmin(res2[band])) > 0.0,
            details={"min_residual": float(np.nanmin(res2[band]))},
        ))

        # damped front: subsolution on its stated window
        R_d, theta, beta = 0.5, 0.1, 0.6
        win = waves.damped_front_validity(R_d, beta, tau0, P3_1)

        def damped_sampler(tau):
            return damped_front_values(R_d, theta, beta, tau, gw.nodes, P3_1)

        res3 = residual_field(damped_sampler, tau0, gw, P3_1, "w")
        window = (gw.nodes > 2 * hw) & (gw.nodes <= win.inner_edge)
        high = float(np.nanmax(res3[window]))
        verdicts.append(Verdict(
            id="5-damped-front-subsolution",
            description="damped-front residual on its validity window",
            expected=f"<= {5 * hw:g} on 0 < y <= K(9) = 0.37",
            measured=high,
            tolerance=5 * hw,
            passed=high <= 5 * hw and abs(win.inner_edge - 0.37) < 1e-12,
            details={"inner_edge": win.inner_edge, "tau_min": win.tau_min},
        ))
        return verdicts

    def criterion_6(self) -> list[Verdict]:
        """Edge expansion law of the v-frame bump run."""
        run = self.expansion_run
        series = run["series"]["support_radius"]
        h = run["grid"].h
        rep = fit_expansion_rate(series, P3_1, R0=1.0, u0_sup=1.0,
                                 trend_slack=0.5 * h)
        ratio = rep.measured
        lo, hi = 0.80, 1.02
        stats = run["stats"]
        clip_ok = stats.clipped_mass < 1e-10 * stats.mass_initial
        return [Verdict(
            id="6-expansion-law",
            description="edge radius over tau at tau = 40, trend and wave bracket",
            expected=f"ratio in [{lo}, {hi}], nondecreasing last decade,"
                     " rho <= R1 + tau, clipping at round-off level",
            measured=ratio,
            tolerance=[lo, hi],
            passed=(lo <= ratio <= hi) and rep.passed and clip_ok,
            details={**rep.details, "R1": wave_bracket_radius(1.0, 1.0, P3_1),
                     "clipped_mass": stats.clipped_mass,
                     "edge_drift_note": "numerical edge drifts ~0.5h per unit"
                                        " tau; h -> 0 extrapolation ~ 1.008"},
        )]

    def criterion_7(self) -> list[Verdict]:
        """Profile convergence toward the sandpile shape in the w-frame.

        Executed verbatim at the stated parameters (r_max = 1.5, h = 2e-3,
        tau = 1000).  The monotone scheme's interface creeps outward by about
        0.2 h per unit tau, so over this horizon the creep dominates: the
        error is U-shaped in tau and the late checkpoints fail; the adjacent
        refinement verdict isolates the h -> 0 behaviour at a fixed horizon.
        """
        run = self.profile_run
        verdicts = []
        errors1 = [run[1]["errors"][k] for k in (10, 30, 100, 300, 1000)]
        increments = np.diff(errors1)
        nonincreasing = bool(np.all(increments <= 1e-12))
        verdicts.append(Verdict(
            id="7-error-nonincreasing",
            description="profile error nonincreasing across tau checkpoints"
                        " {10, 30, 100, 300, 1000} (N = 1)",
            expected="nonincreasing",
            measured=errors1,
            tolerance=0.0,
            passed=nonincreasing,
            details={"wall_peak": run[1]["stats"].wall_peak},
        ))
        final_err = errors1[-1]
        verdicts.append(Verdict(
            id="7-error-at-1000",
            description="profile error at tau = 1000 (N = 1)",
            expected="<= 0.1",
            measured=final_err,
            tolerance=0.1,
            passed=final_err <= 0.1,
        ))
        dim_gap = float(np.max(np.abs(run[1]["final"].values - run[2]["final"].values)))
        verdicts.append(Verdict(
            id="7-dimension-independence",
            description="N = 1 and N = 2 final profiles agree in sup norm",
            expected="<= 0.05",
            measured=dim_gap,
            tolerance=0.05,
            passed=dim_gap <= 0.05,
        ))

        # refinement evidence at a fixed horizon: halving h roughly halves the
        # error, isolating the interface-creep discretization effect
        params = P3_1
        evid = {}
        for h in (4e-3, 2e-3):
            if h == 2e-3:
                evid[h] = run[1]["errors"][100]
                continue
            grid = make_grid("radial", 1.5, int(round(1.5 / h)))
            state = sample_initial(InitialData.bump(1.0, 1.0), grid, params,
                                   frame_tag=FrameTag.RESCALED_W)
            holder = {}
            evolve(state, "w", 100.0,
                   observer=lambda s: holder.__setitem__("err", profile_error(s)),
                   output_times=[100.0], on_overflow="clamp")
            evid[h] = holder["err"]
        shrink = evid[4e-3] / evid[2e-3]
        verdicts.append(Verdict(
            id="7-evidence-refinement",
            description="profile error at tau = 100 shrinks under h -> h/2"
                        " (convergence evidence at a creep-limited horizon)",
            expected=">= 1.5x reduction",
            measured=shrink,
            tolerance=1.5,
            passed=shrink >= 1.5,
            details={"errors": {str(k): v for k, v in evid.items()}},
        ))
        return verdicts

    def criterion_8(self) -> list[Verdict]:
        """Scaled-norm boundedness ratios on the expansion run."""
        run = self.expansion_run
        verdicts = []
        for label in ("L1", "Linf", "Lip"):
            rep = check_scaled_bounds(run["series"][label], P3_1)
            verdicts.append(Verdict(
                id=f"8-scaled-{label}",
                description=f"{label} / tau^exponent last-to-first decade sup ratio",
                expected="<= 2",
                measured=rep.measured,
                tolerance=2.0,
                passed=rep.passed,
                details={"exponent": rep.details["exponent"]},
            ))
        return verdicts

    def criterion_9(self) -> list[Verdict]:
        """Pointwise grow-up exponent at the origin on the expansion run."""
        run = self.expansion_run
        origin = run["origin"]
        rep = fit_growup_exponent(origin[:, 0], origin[:, 1], P3_1, rel_band=0.1)
        return [Verdict(
            id="9-growup-exponent",
            description="log-log slope of v(tau, 0) over the last decade",
            expected=f"within 10% of {P3_1.m}",
            measured=rep.measured,
            tolerance=0.1 * P3_1.m,
            passed=rep.passed,
            details=rep.details,
        )]

    def criterion_10(self) -> list[Verdict]:
        """Shifted sandwich ordering and the eventual-symmetry inequality."""
        trio = self.sandwich_runs
        grid = trio["grid"]
        h = grid.h
        shift = trio["shift_cells"]
        verdicts = []
        worst_sandwich = -math.inf
        worst_symmetry = -math.inf
        for tau in (2, 5, 10):
            u = trio["u"][tau]
            minor = trio["minor"][tau].values
            major = trio["major"][tau].values
            # minorant evaluated at x + x0 must stay below u at x
            shifted = np.concatenate([minor[shift:], np.zeros(shift)])
            worst_sandwich = max(worst_sandwich, float(np.max(shifted - u.values)))
            worst_sandwich = max(worst_sandwich, float(np.max(u.values - major)))
            sym = symmetry_inequality_check(u, R0=1.0, slack=5 * h)
            worst_symmetry = max(worst_symmetry, sym.violation)
        verdicts.append(Verdict(
            id="10-sandwich",
            description="translated minorant <= run <= majorant at tau in {2,5,10}",
            expected=f"<= {5 * h:g}",
            measured=worst_sandwich,
            tolerance=5 * h,
            passed=worst_sandwich <= 5 * h,
        ))
        verdicts.append(Verdict(
            id="10-symmetry",
            description="eventual-symmetry inequality on the asymmetric run",
            expected=f"<= {5 * h:g}",
            measured=worst_symmetry,
            tolerance=5 * h,
            passed=worst_symmetry <= 5 * h,
        ))
        return verdicts

    def criterion_11(self) -> list[Verdict]:
        """Frame round trips: exact maps to 1e-12, resampling maps to O(h)."""
        verdicts = []
        grid = make_grid("line", 3.0, 600)
        worst_exact = 0.0
        for p in (2.5, 3.0, 4.0):
            params = ModelParams(p=p, N=1)
            state = sample_initial(InitialData.bump(1.0, 1.0), grid, params,
                                   clock=2.3)
            back = v_to_u(u_to_v(state))
            worst_exact = max(worst_exact, float(
                np.max(np.abs(back.values - state.values)) / state.values.max()))
            worst_exact = max(worst_exact,
                              abs(t_of_tau(tau_of_t(7.7, params), params) - 7.7) / 7.7)
        w_state = sample_initial(InitialData.bump(1.0, 1.0), grid, P3_1,
                                 frame_tag=FrameTag.RESCALED_W, clock=1.7)
        om = omega_to_w(w_to_omega(w_state))
        exact_om = float(np.max(np.abs(om.values - w_state.values)))
        verdicts.append(Verdict(
            id="11-exact-roundtrips",
            description="u<->v, time maps and w<->omega round trips",
            expected="<= 1e-12 relative",
            measured=max(worst_exact, exact_om),
            tolerance=1e-12,
            passed=max(worst_exact, exact_om) <= 1e-12,
        ))
        interp = {}
        for n in (300, 600):
            g = make_grid("line", 3.0, n)
            v_state = sample_initial(InitialData.bump(1.0, 1.0), g, P3_1,
                                     frame_tag=FrameTag.RESCALED_V, clock=1.0)
            back = w_to_v(v_to_w(v_state))
            interp[n] = float(np.max(np.abs(back.values - v_state.values)))
        verdicts.append(Verdict(
            id="11-interpolating-roundtrip",
            description="v <-> w resampling round trip stays within O(h)",
            expected=f"<= h = {3.0 / 300:g} at n = 300, shrinking under refinement",
            measured=interp[300],
            tolerance=3.0 / 300,
            passed=interp[300] <= 3.0 / 300 and interp[600] < interp[300],
            details={"n600": interp[600]},
        ))
        return verdicts

    def run_all(self) -> list[Verdict]:
        verdicts = []
        for k in range(1, 12):
            runner = getattr(self, f"criterion_{k}")
            try:
                batch = runner()
            except GradflowError as exc:  # surface compute failures as verdicts
                batch = [Verdict(
                    id=f"{k}-error",
                    description=f"criterion {k} aborted",
                    expected="run to completion",
                    measured=f"{type(exc).__name__}: {exc}",
                    tolerance=None,
                    passed=False,
                )]
            for v in batch:
                self._log(v.line())
            verdicts.extend(batch)
        return verdicts
