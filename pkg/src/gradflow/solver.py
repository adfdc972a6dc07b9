"""Monotone explicit finite-difference stepping for the three evolution forms.

Forms solved (all with the critical absorption exponent q = p - 1):

    original    u_t = Lp(u) - |Du|^q
    v-frame     v_t = Lp(v) - |Dv|^q + v
    w-frame     w_t = (Lp(w) + y.Dw - m w)/(1+tau) - |Dw|^q + w

where Lp is the p-Laplacian div(|Du|^{p-2} Du) and m = (p-1)/(p-2).

The space operators are monotone: face fluxes use the one-sided difference at
that face (preserving the degeneracy, hence exact finite propagation), the
first-order sink uses the upwind descent maximum, and the w-frame drift is
upwinded by the sign of y.  Combined with the stability bound of stable_dt,
the forward-Euler update is order preserving node by node, which is what
makes the discrete comparison tests meaningful.

The inner loop is jitted with numba when available; the pure-numpy fallback
implements the same arithmetic and the public operators below stay in plain
numpy as an independent reference for tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap

from .domain import (
    FrameTag,
    Grid,
    GridKind,
    ModelParams,
    SolutionState,
    cell_weights,
    support_radius_of,
)
from .errors import (
    CflViolationError,
    DomainOverflowError,
    InvalidArgumentError,
    InvalidFrameError,
)

CFL_SAFETY = 0.4
REACTION_DT_CAP = 0.5  # accuracy cap for the rescaled forms' zeroth-order terms


class EquationForm(str, enum.Enum):
    ORIGINAL = "original"
    RESCALED_V = "v"
    RESCALED_W = "w"


_FRAME_FOR_FORM = {
    EquationForm.ORIGINAL: FrameTag.ORIGINAL,
    EquationForm.RESCALED_V: FrameTag.RESCALED_V,
    EquationForm.RESCALED_W: FrameTag.RESCALED_W,
}
_FORM_CODE = {
    EquationForm.ORIGINAL: 0,
    EquationForm.RESCALED_V: 1,
    EquationForm.RESCALED_W: 2,
}


@dataclass(frozen=True)
class StepReport:
    dt: float
    max_diffusion: float
    cfl_margin: float          # dt / stability bound; 0 when no term is active
    mass_change: float
    support_change: int        # outer support radius change, in cells
    clipped_mass: float        # mass restored by clipping negative undershoots


@dataclass(frozen=True)
class EvolveStats:
    steps: int
    clipped_mass: float
    mass_initial: float
    mass_final: float
    wall_peak: float = 0.0   # largest value ever seen beside the Dirichlet wall


@njit(cache=True)
def _knl_rhs_bound(u, rhs, nodes, h, p, q, m, N, radial, form_code, tau):
    """Fill rhs; return the worst diffusion+drift diagonal and the largest G^{q-1}.

    The Hamiltonian enters the stability limit as a separate cap (it is at
    most h times the diffusion diagonal nodewise, since the upwind slope is
    itself one of the face slopes), which keeps the diffusion cap exactly
    h^2-scaled while preserving strict monotonicity.
    """
    n_nodes = u.shape[0]
    nf = n_nodes - 1
    empty = True
    for i in range(n_nodes):
        if u[i] != 0.0:
            empty = False
            break
    if empty:
        for i in range(n_nodes):
            rhs[i] = 0.0
        return 0.0, 0.0
    d = np.empty(nf)
    pw = np.empty(nf)
    F = np.empty(nf)
    inv_hp = h ** (-p)
    inv_hq = h ** (-q)
    inv_hp1 = h ** (1.0 - p)
    for j in range(nf):
        dj = u[j + 1] - u[j]
        a = abs(dj)
        w = a if p == 3.0 else a ** (p - 2.0)
        d[j] = dj
        pw[j] = w
        F[j] = w * dj
    coef = 1.0 / (1.0 + tau) if form_code == 2 else 1.0
    denom = 0.0
    ghp_max = 0.0
    rhs[0] = 0.0
    rhs[n_nodes - 1] = 0.0
    for i in range(1, n_nodes - 1):
        lap = (F[i] - F[i - 1]) * inv_hp
        radfac = 1.0
        if radial and N > 1:
            rw = (N - 1) / (2.0 * nodes[i])
            lap += rw * (F[i] + F[i - 1]) * inv_hp1
            radfac = 1.0 + rw * h
        gh = max(max(d[i - 1], -d[i]), 0.0)
        ghp = gh if p == 3.0 else gh ** (p - 2.0)
        sink = gh * ghp * inv_hq
        if form_code == 0:
            rhs[i] = lap - sink
        elif form_code == 1:
            rhs[i] = lap - sink + u[i]
        else:
            a_i = nodes[i]
            dd = d[i] if a_i > 0.0 else d[i - 1]
            rhs[i] = (lap + a_i * dd / h - m * u[i]) * coef - sink + u[i]
        diag = (p - 1.0) * (pw[i - 1] + pw[i]) * inv_hp * radfac * coef
        if form_code == 2:
            diag += abs(nodes[i]) / h * coef
        if diag > denom:
            denom = diag
        if ghp > ghp_max:
            ghp_max = ghp
    if radial:
        # symmetry at r = 0: ghost mirror makes the operator 2N * flux / h
        lap0 = 2.0 * N * F[0] * inv_hp
        gh0 = max(-d[0], 0.0)
        ghp0 = gh0 if p == 3.0 else gh0 ** (p - 2.0)
        sink0 = gh0 * ghp0 * inv_hq
        if form_code == 0:
            rhs[0] = lap0 - sink0
        elif form_code == 1:
            rhs[0] = lap0 - sink0 + u[0]
        else:
            rhs[0] = (lap0 - m * u[0]) * coef - sink0 + u[0]
        diag0 = 2.0 * N * (p - 1.0) * pw[0] * inv_hp * coef
        if diag0 > denom:
            denom = diag0
        if ghp0 > ghp_max:
            ghp_max = ghp0
    if form_code == 2:
        denom += m * coef
    return denom, ghp_max


@njit(cache=True)
def _knl_apply(u, rhs, dt, weights):
    """u += dt rhs, clipped at zero; returns (clipped mass, max value)."""
    clipped = 0.0
    umax = 0.0
    for i in range(u.shape[0]):
        x = u[i] + dt * rhs[i]
        if x < 0.0:
            clipped -= weights[i] * x
            x = 0.0
        u[i] = x
        if x > umax:
            umax = x
    return clipped, umax


def _np_rhs_bound(u, rhs, nodes, h, p, q, m, N, radial, form_code, tau):
    """Vectorized twin of _knl_rhs_bound (used when numba is unavailable)."""
    if not np.any(u):
        rhs[:] = 0.0
        return 0.0, 0.0
    d = np.diff(u)
    absd = np.abs(d)
    pw = absd if p == 3.0 else absd ** (p - 2.0)
    F = pw * d
    inv_hp = h ** (-p)
    inv_hq = h ** (-q)
    coef = 1.0 / (1.0 + tau) if form_code == 2 else 1.0

    lap = (F[1:] - F[:-1]) * inv_hp
    radfac = 1.0
    if radial and N > 1:
        rw = (N - 1) / (2.0 * nodes[1:-1])
        lap = lap + rw * (F[1:] + F[:-1]) * h ** (1.0 - p)
        radfac = 1.0 + rw * h
    gh = np.maximum(np.maximum(d[:-1], -d[1:]), 0.0)
    ghp = gh if p == 3.0 else gh ** (p - 2.0)
    sink = gh * ghp * inv_hq
    ui = u[1:-1]
    if form_code == 0:
        rhs[1:-1] = lap - sink
    elif form_code == 1:
        rhs[1:-1] = lap - sink + ui
    else:
        dd = np.where(nodes[1:-1] > 0.0, d[1:], d[:-1])
        rhs[1:-1] = (lap + nodes[1:-1] * dd / h - m * ui) * coef - sink + ui
    rhs[0] = 0.0
    rhs[-1] = 0.0
    diag = (p - 1.0) * (pw[:-1] + pw[1:]) * inv_hp * radfac * coef
    if form_code == 2:
        diag = diag + np.abs(nodes[1:-1]) / h * coef
    denom = float(np.max(diag, initial=0.0))
    ghp_max = float(np.max(ghp, initial=0.0))
    if radial:
        lap0 = 2.0 * N * F[0] * inv_hp
        gh0 = max(-d[0], 0.0)
        ghp0 = gh0 if p == 3.0 else gh0 ** (p - 2.0)
        sink0 = gh0 * ghp0 * inv_hq
        if form_code == 0:
            rhs[0] = lap0 - sink0
        elif form_code == 1:
            rhs[0] = lap0 - sink0 + u[0]
        else:
            rhs[0] = (lap0 - m * u[0]) * coef - sink0 + u[0]
        denom = max(denom, 2.0 * N * (p - 1.0) * pw[0] * inv_hp * coef)
        ghp_max = max(ghp_max, ghp0)
    if form_code == 2:
        denom += m * coef
    return denom, ghp_max


_rhs_bound = _knl_rhs_bound if _HAVE_NUMBA else _np_rhs_bound


class _Stencil:
    """Per-(grid, params, form) context: coefficients, buffers, kernel calls."""

    def __init__(self, grid: Grid, params: ModelParams, form: EquationForm):
        self.grid = grid
        self.params = params
        self.form = form
        self.form_code = _FORM_CODE[form]
        self.radial = grid.kind is GridKind.RADIAL
        self.weights = cell_weights(grid, params.N)
        self.rhs_buf = np.empty(grid.n_nodes)
        # hot-loop scalars, resolved once
        self._nodes = grid.nodes
        self._h = grid.h
        self._p = params.p
        self._q = params.q
        self._m = params.m
        self._N = params.N
        self._capped = form is not EquationForm.ORIGINAL

    def rhs_and_bound(self, u: np.ndarray, tau: float):
        denom, ghp_max = _rhs_bound(
            u, self.rhs_buf, self._nodes, self._h, self._p, self._q, self._m,
            self._N, self.radial, self.form_code, tau,
        )
        bound = CFL_SAFETY / denom if denom > 0.0 else math.inf
        if ghp_max > 0.0:
            # Hamiltonian Lipschitz cap h / (q G^{q-1}), with the same safety
            ham = CFL_SAFETY * self._h ** self._q / (self._q * ghp_max)
            if ham < bound:
                bound = ham
        if self._capped and bound > REACTION_DT_CAP:
            bound = REACTION_DT_CAP
        return self.rhs_buf, bound

    def rhs(self, u: np.ndarray, tau: float) -> np.ndarray:
        return self.rhs_and_bound(u, tau)[0]

    def max_diffusion(self, u: np.ndarray, tau: float) -> float:
        coef = 1.0 / (1.0 + tau) if self.form is EquationForm.RESCALED_W else 1.0
        slope = float(np.max(np.abs(np.diff(u)), initial=0.0)) / self.grid.h
        return coef * (self.params.p - 1.0) * slope ** (self.params.p - 2.0)


def _check_frame(state: SolutionState, form: EquationForm) -> None:
    if _FRAME_FOR_FORM[form] is not state.frame.tag:
        raise InvalidFrameError(
            f"state frame {state.frame.tag.value!r} cannot be stepped as form {form.value!r}"
        )


def p_laplacian_radial(state: SolutionState) -> np.ndarray:
    """Discrete p-Laplacian field: divergence of the one-sided face fluxes.

    Radial grids add the (N-1)/r face-averaged flux term; the r = 0 node uses
    the symmetry mirror (zero flux through the origin).  Dirichlet boundary
    slots are returned as 0.
    """
    grid, params = state.grid, state.params
    h = grid.h
    d = np.diff(state.values)
    F = np.abs(d) ** (params.p - 2.0) * d
    out = np.zeros_like(state.values)
    out[1:-1] = (F[1:] - F[:-1]) * h ** (-params.p)
    if grid.kind is GridKind.RADIAL:
        if params.N > 1:
            out[1:-1] += (params.N - 1) / (2.0 * grid.nodes[1:-1]) \
                * (F[1:] + F[:-1]) * h ** (1.0 - params.p)
        out[0] = 2.0 * params.N * F[0] * h ** (-params.p)
    return out


def gradient_magnitude_upwind(state: SolutionState) -> np.ndarray:
    """Monotone |Du|: per node, the largest one-sided descent, floored at 0.

    This choice makes the sink -G^q nonincreasing in the neighbours, so the
    full explicit update stays order preserving under the stability bound.
    """
    d = np.diff(state.values)
    out = np.zeros_like(state.values)
    out[1:-1] = np.maximum(np.maximum(d[:-1], -d[1:]), 0.0) / state.grid.h
    if state.grid.kind is GridKind.RADIAL:
        out[0] = max(-d[0], 0.0) / state.grid.h
    return out


def stable_dt(
    state: SolutionState,
    form: EquationForm | str,
    dt_max: float = 0.1,
) -> float:
    """Largest admissible explicit dt for this state, capped at dt_max.

    Combines the diffusion bound ~ h^2 / (2 (p-1) |Du|^{p-2} (1 + radial)),
    the Hamiltonian bound h / (q G^{q-1}), the w-frame drift bound h / |y| and
    its zeroth-order coefficient, with safety 0.4; an all-zero state returns
    dt_max.
    """
    form = EquationForm(form)
    _check_frame(state, form)
    ctx = _Stencil(state.grid, state.params, form)
    _, bound = ctx.rhs_and_bound(state.values, state.frame.clock)
    return min(bound, dt_max)


def _apply_boundary(u: np.ndarray, grid: Grid, clock: float, boundary) -> None:
    if boundary is None:
        if grid.kind is GridKind.LINE:
            u[0] = 0.0
        u[-1] = 0.0
    else:
        left, right = boundary(clock)
        if grid.kind is GridKind.LINE:
            u[0] = left
        u[-1] = right


def step(
    state: SolutionState,
    form: EquationForm | str,
    dt: float,
    boundary=None,
) -> tuple[SolutionState, StepReport]:
    """One forward-Euler step; refuses dt above the stability bound.

    `boundary`, when given, is a callable tau -> (left_value, right_value)
    imposing exact Dirichlet data at the domain ends (radial grids only use
    the right value); by default the ends are held at zero.
    """
    form = EquationForm(form)
    _check_frame(state, form)
    if not (dt > 0.0 and math.isfinite(dt)):
        raise InvalidArgumentError(f"dt must be positive and finite, got {dt}")
    ctx = _Stencil(state.grid, state.params, form)
    tau = state.frame.clock
    rhs, bound = ctx.rhs_and_bound(state.values, tau)
    if dt > bound * (1.0 + 1e-12):
        raise CflViolationError(f"dt={dt:g} exceeds stability bound {bound:g}")

    u_new = state.values + dt * rhs
    new_clock = tau + dt
    _apply_boundary(u_new, state.grid, new_clock, boundary)
    clipped = -float(ctx.weights @ np.minimum(u_new, 0.0))
    np.maximum(u_new, 0.0, out=u_new)

    mass_old = float(ctx.weights @ state.values)
    mass_new = float(ctx.weights @ u_new)
    rad_old = support_radius_of(state.values, state.grid)
    rad_new = support_radius_of(u_new, state.grid)
    report = StepReport(
        dt=dt,
        max_diffusion=ctx.max_diffusion(state.values, tau),
        cfl_margin=dt / bound if math.isfinite(bound) else 0.0,
        mass_change=mass_new - mass_old,
        support_change=int(round((rad_new - rad_old) / state.grid.h)),
        clipped_mass=clipped,
    )
    return state.with_values(u_new, clock=new_clock), report


def evolve(
    state: SolutionState,
    form: EquationForm | str,
    t_end: float,
    observer=None,
    output_times=None,
    dt_max: float = 0.1,
    boundary=None,
    on_overflow: str = "error",
) -> tuple[SolutionState, EvolveStats]:
    """Advance a state to t_end with automatic stable steps.

    `observer(state)` is invoked at every requested output time (hit exactly
    by truncating dt) and at t_end.  With the default zero boundary the run
    aborts with DomainOverflowError as soon as the support reaches the node
    next to the outer boundary; pass on_overflow="clamp" to let the Dirichlet
    wall absorb instead (legitimate when everything beyond the physical
    support bound is round-off-level tail, e.g. very long runs of the
    second-rescaled form whose edge creeps outward by O(h) per unit time).
    The largest value ever clamped at the wall is reported in the stats so
    callers can verify only debris reached it.
    """
    form = EquationForm(form)
    _check_frame(state, form)
    if on_overflow not in ("error", "clamp"):
        raise InvalidArgumentError(f"unknown overflow policy {on_overflow!r}")
    clock = state.frame.clock
    if t_end < clock:
        raise InvalidArgumentError(f"t_end {t_end} is before the state clock {clock}")

    targets = sorted({float(t) for t in (output_times or ()) if clock < t <= t_end})
    if not targets or targets[-1] < t_end:
        targets.append(float(t_end))

    ctx = _Stencil(state.grid, state.params, form)
    line = state.grid.kind is GridKind.LINE
    u = state.values.copy()
    steps = 0
    clipped_total = 0.0
    wall_peak = 0.0
    mass_initial = float(ctx.weights @ u)
    rhs_and_bound = ctx.rhs_and_bound
    weights = ctx.weights
    zero_bc = boundary is None
    guard = zero_bc and on_overflow == "error"

    for target in targets:
        tol = 1e-12 * max(1.0, target)
        while target - clock > tol:
            rhs, bound = rhs_and_bound(u, clock)
            dt = min(bound, dt_max, target - clock)
            clock += dt
            if _HAVE_NUMBA:
                clipped, umax = _knl_apply(u, rhs, dt, weights)
            else:
                u += dt * rhs
                clipped = -float(weights @ np.minimum(u, 0.0))
                np.maximum(u, 0.0, out=u)
                umax = float(u.max())
            clipped_total += clipped
            steps += 1
            if zero_bc:
                if u[-2] > wall_peak:
                    wall_peak = u[-2]
                if line and u[1] > wall_peak:
                    wall_peak = u[1]
                u[-1] = 0.0
                if line:
                    u[0] = 0.0
                if guard and wall_peak > 1e-12 * (1.0 if umax < 1.0 else umax):
                    raise DomainOverflowError(
                        f"support reached the outer boundary at clock {clock:g}; "
                        "enlarge r_max"
                    )
            else:
                _apply_boundary(u, state.grid, clock, boundary)
        if observer is not None:
            observer(state.with_values(u, clock=clock))

    final = state.with_values(u, clock=clock)
    stats = EvolveStats(
        steps=steps,
        clipped_mass=clipped_total,
        mass_initial=mass_initial,
        mass_final=float(ctx.weights @ u),
        wall_peak=wall_peak,
    )
    return final, stats


def residual_field(
    sampler,
    tau: float,
    grid: Grid,
    params: ModelParams,
    form: EquationForm | str,
    dtau: float = 1e-4,
) -> np.ndarray:
    """Discrete residual of a sampled time family against one evolution form.

    `sampler(tau)` must return node values.  The residual is the centred
    finite-difference time derivative minus the scheme right-hand side, so it
    is <= 0 (up to O(h)) where the family is a discrete subsolution of the
    form and >= 0 where it is a supersolution.  Dirichlet boundary slots are
    NaN.
    """
    form = EquationForm(form)
    ctx = _Stencil(grid, params, form)
    u0 = np.asarray(sampler(tau), dtype=float)
    if tau >= dtau:
        dudt = (np.asarray(sampler(tau + dtau), float)
                - np.asarray(sampler(tau - dtau), float)) / (2.0 * dtau)
    else:
        dudt = (np.asarray(sampler(tau + dtau), float) - u0) / dtau
    res = dudt - ctx.rhs(u0, tau)
    res[-1] = np.nan
    if grid.kind is GridKind.LINE:
        res[0] = np.nan
    return res
