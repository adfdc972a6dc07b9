"""Phase-plane engine for the traveling-wave profiles of the rescaled flow.

A wave v(tau, x) = f(x - c tau) of the v-frame equation in one dimension
satisfies

    -c f' - (|f'|^{p-2} f')' + |f'|^{p-1} - alpha |f'|^{p-2} f' - f = 0,

where alpha >= 0 is an optional damping used to build radially valid
barriers (alpha = 0 is the plain wave equation).  With U = f, V = -f' and
the time change absorbing the degenerate factor (p-1)|V|^{p-2}, the orbits
solve the desingularized system

    dU/ds = -(p-1) |V|^{p-2} V
    dV/ds = -c V - |V|^{p-1} - alpha |V|^{p-2} V + U.

Waves with a sharp interface correspond to the unique orbit entering the
origin tangent to (0, 1); it is computed here by seeding on its leading-order
expansion just behind the interface and integrating backward, with event
detection locating the slope-zero and value-zero crossings that define the
compactly supported hump barriers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .domain import (
    Frame,
    FrameTag,
    Grid,
    ModelParams,
    SolutionState,
    wave_profile,
)
from .errors import DomainTooSmallError, InvalidArgumentError, NotAHumpError

_ESCAPE_CAP = 1e9


@dataclass(frozen=True)
class TWParams:
    """Wave speed, diffusion exponent, damping and interface location."""

    c: float
    p: float
    alpha: float = 0.0
    K: float = 0.0

    def __post_init__(self):
        if not self.c > 0.0:
            raise InvalidArgumentError(f"wave speed c must be positive, got {self.c}")
        if not self.p > 2.0:
            raise InvalidArgumentError(f"p must exceed 2, got {self.p}")
        if self.alpha < 0.0:
            raise InvalidArgumentError(f"alpha must be >= 0, got {self.alpha}")

    @property
    def model(self) -> ModelParams:
        return ModelParams(p=self.p, N=1)

    @property
    def separatrix_speed(self) -> float:
        """Speed of the explicit interface wave: 1/(1+alpha)."""
        return 1.0 / (1.0 + self.alpha)


def tw_rhs(U: float, V: float, tw: TWParams) -> tuple[float, float]:
    """Desingularized phase-plane field (orbit-equivalent to the wave system)."""
    p = tw.p
    av = abs(V)
    avp = av ** (p - 2.0)
    dU = -(p - 1.0) * avp * V
    dV = -tw.c * V - av ** (p - 1.0) - tw.alpha * avp * V + U
    return dU, dV


@dataclass(frozen=True)
class CriticalPoints:
    """Local structure at the origin and at the infinity-chart points."""

    P: tuple[float, float]
    jacobian: np.ndarray
    eigenvalues: tuple[float, float]
    eigenvectors: tuple[tuple[float, float], tuple[float, float]]
    Q1: tuple[float, float]
    Q2: tuple[float, float]


def classify_critical_points(tw: TWParams) -> CriticalPoints:
    """Eigenstructure at the origin plus the saddle points of the inverted chart.

    The origin has eigenvalues (0, -c) with eigenvectors (c, 1) and (0, 1);
    the damping shifts the infinity-chart points to W = +-1/(1+alpha).
    """
    c = tw.c
    w = 1.0 / (1.0 + tw.alpha)
    return CriticalPoints(
        P=(0.0, 0.0),
        jacobian=np.array([[0.0, 0.0], [1.0, -c]]),
        eigenvalues=(0.0, -c),
        eigenvectors=((c, 1.0), (0.0, 1.0)),
        Q1=(0.0, w),
        Q2=(0.0, -w),
    )


def explicit_wave(z, K: float, tw: TWParams):
    """Closed-form interface wave; only exists at the separatrix speed.

    For alpha = 0 this requires c = 1; for alpha > 0, c = 1/(1+alpha).  Its
    orbit satisfies U = (1+alpha) V^{p-1} exactly.
    """
    if abs(tw.c * (1.0 + tw.alpha) - 1.0) > 1e-12:
        raise InvalidArgumentError(
            f"explicit wave needs c = 1/(1+alpha); got c={tw.c}, alpha={tw.alpha}"
        )
    return wave_profile(z, K, tw.model, alpha=tw.alpha)


def interface_seed_coefficient(tw: TWParams) -> float:
    """Leading coefficient a in f ~ a (K - z)^m just behind the interface.

    Balancing -c f' against -(|f'|^{p-2} f')' at the dominant order fixes
    a = c^{1/(p-2)} ((p-2)/(p-1))^{(p-1)/(p-2)}; the damping term only enters
    at the next order.
    """
    p = tw.p
    return tw.c ** (1.0 / (p - 2.0)) * ((p - 2.0) / (p - 1.0)) ** ((p - 1.0) / (p - 2.0))


@dataclass(frozen=True)
class Orbit:
    """Sampled interface orbit (z decreasing) with its zero-crossing events."""

    tw: TWParams
    z: np.ndarray
    U: np.ndarray
    V: np.ndarray
    v_zero_events: np.ndarray      # rows (z, U, V) at slope-zero crossings
    u_zero_events: np.ndarray      # rows (z, U, V) at value-zero crossings
    reached_extent: bool
    escaped: bool
    incomplete: bool
    seed_delta: float
    seed_coefficient: float

    def separatrix_residual(self) -> float:
        """max |U - (1+alpha) V^{p-1}| / max(U, 1e-12) along the samples."""
        p = self.tw.p
        target = (1.0 + self.tw.alpha) * np.abs(self.V) ** (p - 1.0) * np.sign(self.V)
        return float(np.max(np.abs(self.U - target) / np.maximum(self.U, 1e-12)))


def integrate_interface_orbit(
    tw: TWParams,
    z_extent: float,
    seed_delta: float | None = None,
    rtol: float = 1e-9,
    atol=None,
    n_samples: int = 2000,
    sigma_max: float = 1e4,
) -> Orbit:
    """Shoot the unique interface orbit backward from z = K.

    Seeds at z = K - delta on the leading-order expansion and integrates the
    desingularized system backward in z, recording V = 0 and U = 0 crossings
    (root-refined on the dense output).  Integration stops at the first value
    zero, at z = K - z_extent, or when U blows past the escape cap.
    """
    if z_extent <= 0.0:
        raise InvalidArgumentError(f"z_extent must be positive, got {z_extent}")
    p = tw.p
    m = tw.model.m
    a = interface_seed_coefficient(tw)
    delta = 1e-6 * max(1.0, abs(tw.K)) if seed_delta is None else seed_delta
    y0 = [tw.K - delta, a * delta ** m, a * m * delta ** (m - 1.0)]
    if atol is None:
        # keep the error control relative even at the tiny seed values
        atol = [1e-12, 1e-6 * rtol * y0[1], 1e-3 * rtol * y0[2]]

    def field(_s, y):
        _z, U, V = y
        dU, dV = tw_rhs(U, V, tw)
        return [-(p - 1.0) * abs(V) ** (p - 2.0), -dU, -dV]

    def ev_v(_s, y):
        return y[2]

    ev_v.terminal = False
    ev_v.direction = -1.0

    def ev_u(_s, y):
        return y[1]

    ev_u.terminal = True
    ev_u.direction = -1.0

    z_stop = tw.K - z_extent

    def ev_z(_s, y):
        return y[0] - z_stop

    ev_z.terminal = True
    ev_z.direction = -1.0

    def ev_escape(_s, y):
        return y[1] - _ESCAPE_CAP

    ev_escape.terminal = True
    ev_escape.direction = 1.0

    sol = solve_ivp(
        field,
        (0.0, sigma_max),
        y0,
        method="RK45",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=[ev_v, ev_u, ev_z, ev_escape],
    )
    s_end = sol.t[-1]
    samples = sol.sol(np.linspace(0.0, s_end, n_samples))
    z, U, V = samples

    # z stalls only at the isolated slope-zero instant; keep it strictly monotone
    keep = np.concatenate(([True], np.diff(z) < 0.0))
    z, U, V = z[keep], U[keep], V[keep]

    def rows(k):
        ev = sol.y_events[k]
        return ev if ev.size else np.empty((0, 3))

    return Orbit(
        tw=tw,
        z=z,
        U=U,
        V=V,
        v_zero_events=rows(0),
        u_zero_events=rows(1),
        reached_extent=sol.y_events[2].size > 0,
        escaped=sol.y_events[3].size > 0,
        incomplete=sol.status == 0,  # ran to sigma_max with no terminal event
        seed_delta=delta,
        seed_coefficient=a,
    )


def seed_sensitivity(
    tw: TWParams,
    z_extent: float,
    seed_delta: float = 1e-6,
    rtol: float = 1e-10,
) -> float:
    """Relative orbit change at z = K - z_extent under halving the seed offset.

    The interface orbit attracts backward in z, so the two runs land on the
    same curve up to integrator tolerance; large values flag a seeding or
    tolerance problem.  Only meaningful for speeds whose orbit reaches the
    extent without events.
    """
    a = integrate_interface_orbit(tw, z_extent, rtol=rtol, seed_delta=seed_delta)
    b = integrate_interface_orbit(tw, z_extent, rtol=rtol, seed_delta=0.5 * seed_delta)
    if not (a.reached_extent and b.reached_extent):
        raise InvalidArgumentError("seed sensitivity needs event-free runs to the extent")
    end_a = np.array([a.U[-1], a.V[-1]])
    end_b = np.array([b.U[-1], b.V[-1]])
    return float(np.max(np.abs(end_a - end_b) / np.maximum(np.abs(end_a), 1e-12)))


@dataclass(frozen=True)
class HumpProfile:
    """Positive arch of a sub-separatrix wave, clipped to zero outside it.

    f rises from 0 at z_left to its maximum M at z_peak and decreases to the
    interface at K; translation acts by shifting all abscissae.
    """

    tw: TWParams
    z_left: float
    z_peak: float
    K: float
    M: float
    z_samples: np.ndarray
    f_samples: np.ndarray

    def __call__(self, z):
        return np.interp(np.asarray(z, dtype=float), self.z_samples, self.f_samples,
                         left=0.0, right=0.0)


def build_hump(
    tw: TWParams,
    z_extent_max: float = 200.0,
    n_samples: int = 4000,
    **integrate_kw,
) -> HumpProfile:
    """Clip the interface orbit of a sub-separatrix wave to its positive arch.

    Requires c < 1/(1+alpha); raises NotAHumpError when the slope-zero /
    value-zero event pair is not found within the extent (speed too close to
    the separatrix for the configured range).
    """
    if not tw.c * (1.0 + tw.alpha) < 1.0 - 1e-12:
        raise InvalidArgumentError(
            f"hump needs c < 1/(1+alpha); got c={tw.c}, alpha={tw.alpha}"
        )
    orbit = integrate_interface_orbit(tw, z_extent_max, n_samples=n_samples,
                                      **integrate_kw)
    if orbit.v_zero_events.shape[0] == 0 or orbit.u_zero_events.shape[0] == 0:
        raise NotAHumpError(
            f"no hump within extent {z_extent_max} for c={tw.c}, alpha={tw.alpha}"
        )
    z_peak, M, _ = orbit.v_zero_events[0]
    z_left, _, _ = orbit.u_zero_events[0]

    inside = orbit.z >= z_left
    zs = orbit.z[inside][::-1]
    fs = orbit.U[inside][::-1]
    # close the arch exactly at both ends
    zs = np.concatenate(([z_left], zs, [tw.K]))
    fs = np.concatenate(([0.0], np.maximum(fs, 0.0), [0.0]))
    keep = np.concatenate(([True], np.diff(zs) > 0.0))
    return HumpProfile(
        tw=tw,
        z_left=float(z_left),
        z_peak=float(z_peak),
        K=tw.K,
        M=float(M),
        z_samples=zs[keep],
        f_samples=fs[keep],
    )


@dataclass(frozen=True)
class PlateauSubsolution:
    """Radially nonincreasing barrier: constant core, damped-wave tail.

    Equals M on |x| < z_peak + c tau, follows the damped hump on the outside,
    and vanishes for |x| >= K + c tau; valid as a lower barrier of the
    v-frame flow from tau_min on (where the damping dominates the curvature
    term (N-1)/|x|).
    """

    c: float
    alpha_c: float
    K: float
    N: int
    M: float
    tau_min: float
    hump: HumpProfile

    def evaluate(self, tau: float, x):
        if tau < self.tau_min - 1e-12:
            raise InvalidArgumentError(
                f"plateau barrier is defined for tau >= {self.tau_min:g}, got {tau:g}"
            )
        rho = np.abs(np.asarray(x, dtype=float))
        z = rho - self.c * tau
        return np.where(z < self.z_peak_shift, self.M, self.hump(z))

    @property
    def z_peak_shift(self) -> float:
        return self.hump.z_peak

    def sample(self, grid: Grid, tau: float, params: ModelParams) -> SolutionState:
        return SolutionState(
            frame=Frame(FrameTag.RESCALED_V, tau),
            grid=grid,
            values=self.evaluate(tau, grid.nodes),
            params=params,
        )


def build_plateau_subsolution(
    c: float,
    K: float,
    p: float,
    N: int,
    **hump_kw,
) -> PlateauSubsolution:
    """Assemble the dimension-N plateau barrier for a speed c in (1/2, 1).

    The damping alpha_c = (1-c)/(1+c) makes the wave speed sub-separatrix
    (c < 1/(1+alpha_c) reduces to c < 1), and the validity time is
    tau_min = max(2(N-1)/alpha_c - 2 z_peak0, -z_peak0/c) with z_peak0 the
    peak abscissa of the K = 0 hump.
    """
    if not (0.5 < c < 1.0):
        raise InvalidArgumentError(f"plateau barrier needs c in (1/2, 1), got {c}")
    if not K > 0.0:
        raise InvalidArgumentError(f"plateau barrier needs K > 0, got {K}")
    alpha_c = (1.0 - c) / (1.0 + c)
    hump = build_hump(TWParams(c=c, p=p, alpha=alpha_c, K=K), **hump_kw)
    z_peak0 = hump.z_peak - K
    tau_min = max(2.0 * (N - 1) / alpha_c - 2.0 * z_peak0, -z_peak0 / c)
    return PlateauSubsolution(
        c=c, alpha_c=alpha_c, K=K, N=N, M=hump.M, tau_min=tau_min, hump=hump
    )


def direction_field_sign(tw: TWParams, V: float) -> float:
    """Signed normal flux of the field across the explicit-orbit curve.

    On U = (1+alpha) V^{p-1} with normal (1, -(1+alpha)(p-1) V^{p-2}) the
    scalar product is (p-1) (c (1+alpha) - 1) V^{p-1}: negative below the
    separatrix speed, zero on it, positive above.
    """
    if not V > 0.0:
        raise InvalidArgumentError(f"V must be positive, got {V}")
    p = tw.p
    return (p - 1.0) * (tw.c * (1.0 + tw.alpha) - 1.0) * V ** (p - 1.0)


@dataclass(frozen=True)
class CMonotonicityReport:
    ok: bool
    checked: int
    skipped: list = field(default_factory=list)
    max_error: float = 0.0


def c_monotonicity_check(
    p: float,
    alpha: float,
    c1: float,
    c2: float,
    samples,
    tol: float = 1e-10,
) -> CMonotonicityReport:
    """Verify d(dV/dU)/dc = 1/((p-1)|V|^{p-2}) > 0 at the given (U, V) points.

    Points with V = 0 are skipped with a note (the slope is undefined there).
    """
    if not c2 > c1:
        raise InvalidArgumentError("needs c1 < c2")
    skipped = []
    max_err = 0.0
    checked = 0
    for U, V in samples:
        if V == 0.0:
            skipped.append((U, V))
            continue
        avp = abs(V) ** (p - 2.0)

        def slope(c):
            dU, dV = tw_rhs(U, V, TWParams(c=c, p=p, alpha=alpha))
            return dV / dU

        measured = slope(c2) - slope(c1)
        expected = (c2 - c1) / ((p - 1.0) * avp)
        max_err = max(max_err, abs(measured - expected) / max(1.0, abs(expected)))
        checked += 1
    return CMonotonicityReport(
        ok=checked > 0 and max_err <= tol, checked=checked, skipped=skipped,
        max_error=max_err,
    )


# ---------------------------------------------------------------------------
# Explicit barrier families for the rescaled frames.
# ---------------------------------------------------------------------------

def cap_parameter_bounds(params: ModelParams) -> tuple[float, float]:
    """(largest admissible R, smallest admissible T) of the spreading cap."""
    p, N = params.p, params.N
    r_bound = (p - 2.0) / (2.0 ** p * (p - 1.0))
    t_min = 2.0 * (p - 1.0) / (p - 2.0) * (2.0 + 2.0 ** (p - 1.0) * (N + p - 2.0))
    return r_bound, t_min


def spreading_cap_values(R: float, T: float, tau: float, x, params: ModelParams):
    """Expanding-cap barrier of the v-frame flow.

        (p-2)/(R (p-1)) (T+tau)^m (R^2 - |x|^2/(T+tau)^2)_+^m

    A lower barrier whenever R, T are inside the admissible corner returned by
    cap_parameter_bounds; it grows like (T+tau)^m while its support spreads
    linearly, which is what forces the rescaled solution to grow everywhere.
    """
    r_bound, t_min = cap_parameter_bounds(params)
    if not 0.0 < R <= r_bound * (1.0 + 1e-12):
        raise InvalidArgumentError(f"cap needs R in (0, {r_bound:g}], got {R}")
    if T < t_min * (1.0 - 1e-12):
        raise InvalidArgumentError(f"cap needs T >= {t_min:g}, got {T}")
    p, m = params.p, params.m
    xi2 = (np.asarray(x, dtype=float) / (T + tau)) ** 2
    return (p - 2.0) / (R * (p - 1.0)) * (T + tau) ** m * np.maximum(R * R - xi2, 0.0) ** m


def sample_spreading_cap(
    R: float, T: float, tau: float, grid: Grid, params: ModelParams
) -> SolutionState:
    if R * (T + tau) >= grid.r_max:
        raise DomainTooSmallError("cap support R (T+tau) must fit inside the domain")
    return SolutionState(
        frame=Frame(FrameTag.RESCALED_V, tau),
        grid=grid,
        values=spreading_cap_values(R, T, tau, grid.nodes, params),
        params=params,
    )


def front_supersolution_values(R: float, tau: float, y, params: ModelParams):
    """Sharp-front upper barrier of the w-frame flow.

        ((p-2)/(p-1))^m ((tau+R)/(tau+1) - |y|)_+^m

    An exact solution away from y = 0 in one dimension and a strict
    supersolution in higher dimensions, with edge moving from R to 1.
    """
    if not 0.0 < R < 1.0:
        raise InvalidArgumentError(f"front barrier needs R in (0, 1), got {R}")
    m = params.m
    amp = ((params.p - 2.0) / (params.p - 1.0)) ** m
    edge = (tau + R) / (tau + 1.0)
    return amp * np.maximum(edge - np.abs(np.asarray(y, dtype=float)), 0.0) ** m


def sample_front_supersolution(
    R: float, tau: float, grid: Grid, params: ModelParams
) -> SolutionState:
    return SolutionState(
        frame=Frame(FrameTag.RESCALED_W, tau),
        grid=grid,
        values=front_supersolution_values(R, tau, grid.nodes, params),
        params=params,
    )


@dataclass(frozen=True)
class DampedFrontValidity:
    """Window on which the damped front is a classical lower barrier.

    Valid for tau >= tau_min on 0 < |y| <= inner_edge(tau); in dimension
    N >= 2 the damping must additionally satisfy theta^{p-2} <=
    (1-beta) r_star / (2(N-1)), reported as theta_cap when r_star is known.
    """

    tau_min: float
    inner_edge: float
    theta_cap: float | None


def damped_front_validity(
    R: float, beta: float, tau: float, params: ModelParams, r_star: float | None = None
) -> DampedFrontValidity:
    m = params.m
    tau_min = m / beta - R
    inner_edge = beta * (tau + R) / (tau + 1.0) - m / (tau + 1.0)
    theta_cap = None
    if params.N >= 2 and r_star is not None:
        theta_cap = ((1.0 - beta) * r_star / (2.0 * (params.N - 1))) ** (1.0 / (params.p - 2.0))
    return DampedFrontValidity(tau_min=tau_min, inner_edge=inner_edge, theta_cap=theta_cap)


def damped_front_values(
    R: float, theta: float, beta: float, tau: float, y, params: ModelParams
):
    """Damped sharp-front family: theta ((p-2)/(p-1))^m (beta(tau+R)/(tau+1) - |y|)_+^m."""
    if not 0.0 < R < 1.0:
        raise InvalidArgumentError(f"damped front needs R in (0, 1), got {R}")
    if not 0.0 < theta <= 1.0:
        raise InvalidArgumentError(f"damped front needs theta in (0, 1], got {theta}")
    if not 0.5 < beta <= 1.0:
        raise InvalidArgumentError(f"damped front needs beta in (1/2, 1], got {beta}")
    m = params.m
    amp = theta * ((params.p - 2.0) / (params.p - 1.0)) ** m
    edge = beta * (tau + R) / (tau + 1.0)
    return amp * np.maximum(edge - np.abs(np.asarray(y, dtype=float)), 0.0) ** m


def sample_damped_front(
    R: float,
    theta: float,
    beta: float,
    tau: float,
    grid: Grid,
    params: ModelParams,
    r_star: float | None = None,
) -> tuple[SolutionState, DampedFrontValidity]:
    state = SolutionState(
        frame=Frame(FrameTag.RESCALED_W, tau),
        grid=grid,
        values=damped_front_values(R, theta, beta, tau, grid.nodes, params),
        params=params,
    )
    return state, damped_front_validity(R, beta, tau, params, r_star=r_star)
