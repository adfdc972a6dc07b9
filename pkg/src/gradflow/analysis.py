"""Asymptotics diagnostics: norms, support tracking, rate fits, comparisons.

Everything operates on immutable states or on (clock, value) series collected
by an observer; rate verdicts always report a window and a trend, never a
single-point estimate, because the regimes of interest converge slowly with
logarithmic corrections.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .domain import (
    FrameTag,
    Grid,
    GridKind,
    ModelParams,
    SolutionState,
    cell_weights,
    sandpile_profile,
    support_radius_of,
    support_span,
)
from .errors import InvalidArgumentError, InvalidFrameError, InvalidWindowError
from .frames import t_of_tau

SERIES_LABELS = ("L1", "Linf", "Lip", "support_radius")


@dataclass(frozen=True)
class RateSeries:
    """Strictly increasing (clock, value) samples of one scalar diagnostic."""

    label: str
    frame: FrameTag
    clock: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.clock, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if c.shape != v.shape or c.ndim != 1:
            raise InvalidArgumentError("clock/values must be matching 1-D arrays")
        if np.any(np.diff(c) <= 0):
            raise InvalidArgumentError("series clocks must be strictly increasing")
        object.__setattr__(self, "clock", c)
        object.__setattr__(self, "values", v)


@dataclass
class FitReport:
    """Outcome of one diagnostic fit or bound check."""

    label: str
    measured: float
    expected: object
    tolerance: object
    passed: bool
    window: tuple[float, float]
    details: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "id": self.label,
            "measured": self.measured,
            "expected": self.expected,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "window": list(self.window),
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def support_radius(state: SolutionState) -> float:
    """Largest |node| above the support threshold plus half a cell."""
    return support_radius_of(state.values, state.grid)


def support_edges(state: SolutionState) -> tuple[float, float]:
    """Signed (left, right) support edges, half a cell outward; (0, 0) if empty.

    Unlike support_radius this resolves the two interfaces of one-sided data
    (e.g. the translating wave, whose moving edge is on the right).
    """
    span = support_span(state.values)
    if span is None:
        return (0.0, 0.0)
    lo, hi = span
    h2 = 0.5 * state.grid.h
    return (float(state.grid.nodes[lo]) - h2, float(state.grid.nodes[hi]) + h2)


def state_norms(state: SolutionState) -> dict[str, float]:
    """L1 (with the radial measure), nodal sup, max one-sided slope, support."""
    w = cell_weights(state.grid, state.params.N)
    grad = np.abs(np.diff(state.values)) / state.grid.h
    return {
        "L1": float(w @ state.values),
        "Linf": float(np.max(state.values, initial=0.0)),
        "Lip": float(np.max(grad, initial=0.0)),
        "support_radius": support_radius(state),
    }


class SeriesRecorder:
    """Observer that collects the norm diagnostics, optionally echoing CSV rows.

    Pass an open text file (or any object with .write) as `sink` to stream
    `time,L1,Linf,Lip,support_radius` rows while the run progresses.
    """

    def __init__(self, sink=None):
        self.rows: list[tuple[float, dict[str, float]]] = []
        self._sink = sink
        if sink is not None:
            sink.write("time," + ",".join(SERIES_LABELS) + "\n")

    def __call__(self, state: SolutionState) -> None:
        norms = state_norms(state)
        self.rows.append((state.frame.clock, norms))
        if self._sink is not None:
            vals = ",".join(f"{norms[k]:.17g}" for k in SERIES_LABELS)
            self._sink.write(f"{state.frame.clock:.17g},{vals}\n")

    def series(self, frame: FrameTag) -> dict[str, RateSeries]:
        clocks = np.array([t for t, _ in self.rows])
        return {
            label: RateSeries(
                label=label,
                frame=frame,
                clock=clocks,
                values=np.array([r[label] for _, r in self.rows]),
            )
            for label in SERIES_LABELS
        }


def norm_series(rows, frame: FrameTag) -> dict[str, RateSeries]:
    """Organize observer rows (clock, {label: value}) into RateSeries."""
    clocks = np.array([t for t, _ in rows])
    return {
        label: RateSeries(
            label=label, frame=frame, clock=clocks,
            values=np.array([r[label] for _, r in rows]),
        )
        for label in SERIES_LABELS
    }


def scaled_bound_exponent(label: str, params: ModelParams) -> float:
    """Growth exponent in tau that each v-frame norm is bounded by."""
    p, N = params.p, params.N
    if label == "L1":
        return (p * (N + 1) - 2 * N - 1) / (p - 2.0)
    if label == "Linf":
        return params.m
    if label == "Lip":
        return 1.0 / (p - 2.0)
    raise InvalidArgumentError(f"no scaled bound for series {label!r}")


def check_scaled_bounds(
    series: RateSeries,
    params: ModelParams,
    ratio_tolerance: float = 2.0,
    tau_end_min: float = 20.0,
) -> FitReport:
    """Boundedness proxy for a v-frame norm divided by its tau power.

    Computes the scaled ratio on tau >= 1, its sup over dyadic windows, and
    passes when the last-decade sup is at most `ratio_tolerance` times the
    first-decade sup.
    """
    if series.frame is not FrameTag.RESCALED_V:
        raise InvalidFrameError("scaled bounds are defined on the v-frame series")
    tau, val = series.clock, series.values
    tau_end = tau[-1]
    if tau[0] > 1.0 or tau_end < tau_end_min:
        raise InvalidWindowError(
            f"series must cover [1, {tau_end_min}]; got [{tau[0]:g}, {tau_end:g}]"
        )
    mask = tau >= 1.0
    tau, val = tau[mask], val[mask]
    exponent = scaled_bound_exponent(series.label, params)
    ratio = val / tau ** exponent

    windows = []
    hi = tau_end
    while hi > 1.0:
        lo = max(hi / 2.0, 1.0)
        sel = (tau >= lo) & (tau <= hi)
        if np.any(sel):
            windows.append(((lo, hi), float(np.max(ratio[sel]))))
        hi = lo
    first = ratio[(tau >= 1.0) & (tau <= min(10.0, tau_end))]
    last = ratio[tau >= tau_end / 10.0]
    measured = float(np.max(last) / np.max(first))
    return FitReport(
        label=f"scaled_bound_{series.label}",
        measured=measured,
        expected=f"last/first decade sup ratio <= {ratio_tolerance}",
        tolerance=ratio_tolerance,
        passed=measured <= ratio_tolerance,
        window=(float(tau[0]), float(tau_end)),
        details={"exponent": exponent, "dyadic_window_sups": windows},
    )


def fit_expansion_rate(
    series: RateSeries,
    params: ModelParams,
    R0: float | None = None,
    u0_sup: float | None = None,
    trend_slack: float = 0.0,
) -> FitReport:
    """Edge-speed diagnostics of a v-frame support-radius series.

    Reports rho(tau)/tau at the last sample, whether the radius is
    nondecreasing over the last decade (within `trend_slack`), the wave
    bracket rho(tau) <= R1 + tau when (R0, sup of the data) are supplied, and
    the original-frame ratio gamma(t)/log(t) derived through the exact time
    map (a consistency view of the same run, not a second simulation).
    """
    if series.frame is not FrameTag.RESCALED_V:
        raise InvalidFrameError("expansion-rate fits are defined on the v-frame series")
    tau, rho = series.clock, series.values
    tau_end = float(tau[-1])
    if tau_end < 20.0:
        raise InvalidWindowError(
            f"expansion-rate fit needs the series to reach tau >= 20, got {tau_end:g}"
        )
    measured = float(rho[-1] / tau_end)

    decade = tau >= tau_end / 10.0
    increments = np.diff(rho[decade])
    nondecreasing = bool(increments.size == 0 or increments.min() >= -trend_slack)

    details: dict = {"trend_min_increment": float(increments.min(initial=0.0)),
                     "nondecreasing_last_decade": nondecreasing}
    bracket_ok = True
    if R0 is not None and u0_sup is not None:
        R1 = wave_bracket_radius(R0, u0_sup, params)
        bracket_ok = bool(np.all(rho <= R1 + tau + 1e-12))
        details["R1"] = R1
        details["bracket_max_excess"] = float(np.max(rho - (R1 + tau)))
    t_end = t_of_tau(tau_end, params)
    if t_end > 1.0:
        details["original_frame_ratio"] = float(rho[-1] / math.log(t_end))
        details["original_frame_expected"] = 1.0 / (params.p - 2.0)

    return FitReport(
        label="expansion_rate",
        measured=measured,
        expected=1.0,
        tolerance="asymptotic limit; see caller band",
        passed=nondecreasing and bracket_ok,
        window=(float(tau[0]), tau_end),
        details=details,
    )


def wave_bracket_radius(R0: float, u0_sup: float, params: ModelParams) -> float:
    """R1 = R0 + (p-1)/(p-2) sup(u0)^{(p-2)/(p-1)}: edge bound via the exact wave."""
    p = params.p
    return R0 + (p - 1.0) / (p - 2.0) * u0_sup ** ((p - 2.0) / (p - 1.0))


def fit_growup_exponent(
    clocks: np.ndarray,
    values: np.ndarray,
    params: ModelParams,
    rel_band: float = 0.1,
) -> FitReport:
    """Least-squares slope of log value vs log tau over the last decade.

    The pointwise growth at a fixed location has exponent m = (p-1)/(p-2) up
    to a constant prefactor; the prefactor makes the raw ratio log v / log tau
    converge only logarithmically, so the slope over the fit window is the
    honest finite-time estimate of the exponent (the endpoint ratio is
    reported alongside).
    """
    clocks = np.asarray(clocks, dtype=float)
    values = np.asarray(values, dtype=float)
    tau_end = clocks[-1]
    sel = clocks >= tau_end / 10.0
    if np.count_nonzero(sel) < 3:
        raise InvalidWindowError("need at least 3 samples in the last decade")
    if np.any(values[sel] <= 0.0):
        return FitReport(
            label="growup_exponent", measured=math.nan, expected=params.m,
            tolerance=rel_band, passed=False,
            window=(float(tau_end / 10.0), float(tau_end)),
            details={"reason": "value not positive on the fit window"},
        )
    x = np.log(clocks[sel])
    y = np.log(values[sel])
    slope = float(np.polyfit(x, y, 1)[0])
    m = params.m
    return FitReport(
        label="growup_exponent",
        measured=slope,
        expected=m,
        tolerance=rel_band,
        passed=abs(slope - m) <= rel_band * m,
        window=(float(tau_end / 10.0), float(tau_end)),
        details={"endpoint_log_ratio": float(y[-1] / x[-1]) if x[-1] > 0 else math.nan},
    )


def profile_error(state: SolutionState) -> float:
    """Sup-norm distance of a w-frame (or log-time) state to the sandpile profile."""
    if state.frame.tag not in (FrameTag.RESCALED_W, FrameTag.LOG_TIME):
        raise InvalidFrameError("profile error is defined in the w or log-time frame")
    W = sandpile_profile(state.grid.nodes, state.params)
    return float(np.max(np.abs(state.values - W)))


@dataclass(frozen=True)
class ComparisonReport:
    violation: float
    passed: bool
    where: float | None  # node coordinate of the worst violation


def check_comparison(
    lower: SolutionState, upper: SolutionState, slack: float = 0.0
) -> ComparisonReport:
    """Max nodewise excess of `lower` over `upper`; passes when <= slack."""
    if lower.grid != upper.grid:
        raise InvalidArgumentError("comparison needs a shared grid")
    if lower.frame.tag is not upper.frame.tag:
        raise InvalidFrameError("comparison needs a shared frame")
    diff = lower.values - upper.values
    k = int(np.argmax(diff))
    violation = float(diff[k])
    return ComparisonReport(
        violation=violation,
        passed=violation <= slack,
        where=float(lower.grid.nodes[k]) if violation > 0 else None,
    )


@dataclass(frozen=True)
class SymmetryReport:
    violation: float
    passed: bool
    pairs: int
    skipped: bool


def symmetry_inequality_check(
    state: SolutionState, R0: float, slack: float = 0.0
) -> SymmetryReport:
    """Eventual-symmetry inequality on a line state evolved from B(0, R0) data.

    For every node x with |x| > 2 R0 and every radius r < |x| - 2 R0 the value
    at x must not exceed min(v(r), v(-r)).  Reports the worst excess over all
    admissible pairs; skipped when the grid admits none.
    """
    if state.grid.kind is not GridKind.LINE:
        raise InvalidArgumentError("symmetry check needs a line grid")
    x = state.grid.nodes
    v = state.values
    n = state.grid.n_cells
    ks = np.nonzero(x > 0)[0]
    r_nodes = x[ks]
    sym_min = np.minimum(v[ks], v[n - ks])       # node -r mirrors node r exactly
    # prefix_min[j] = min over r-nodes with r <= r_nodes[j]
    prefix_min = np.minimum.accumulate(sym_min)

    worst = -math.inf
    pairs = 0
    for i, xi in enumerate(x):
        limit = abs(xi) - 2.0 * R0
        if limit <= 0:
            continue
        j = int(np.searchsorted(r_nodes, limit, side="left")) - 1
        if j < 0:
            continue
        pairs += j + 1
        worst = max(worst, v[i] - prefix_min[j])
    if pairs == 0:
        return SymmetryReport(violation=0.0, passed=True, pairs=0, skipped=True)
    return SymmetryReport(
        violation=worst, passed=worst <= slack, pairs=pairs, skipped=False
    )


def reports_to_json(reports, path) -> None:
    """Serialize FitReports (or verdict dicts) as a JSON list."""
    payload = [r.to_json_dict() if isinstance(r, FitReport) else r for r in reports]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
