"""Core value types: model parameters, grids, frame-tagged states, presets.

Everything here is an immutable snapshot; operations return new objects and
can be shared freely across threads.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainTooSmallError, InvalidArgumentError


@dataclass(frozen=True)
class ModelParams:
    """Exponents of the flow  u_t - div(|Du|^{p-2} Du) + |Du|^{p-1} = 0.

    Only the critical absorption exponent q = p - 1 is supported (diffusion
    and absorption then have comparable long-time size).  Derived quantities:

        m   = (p-1)/(p-2)                      profile / growth exponent
        q   = p - 1                            absorption exponent
        c_p = (p-2)^{1/(p-2)} (p-1)^{m}        profile normalisation
    """

    p: float
    N: int = 1

    def __post_init__(self):
        if not self.p > 2.0:
            raise InvalidArgumentError(f"p must exceed 2, got {self.p}")
        if int(self.N) != self.N or self.N < 1:
            raise InvalidArgumentError(f"N must be an integer >= 1, got {self.N}")

    @property
    def m(self) -> float:
        return (self.p - 1.0) / (self.p - 2.0)

    @property
    def q(self) -> float:
        return self.p - 1.0

    @property
    def c_p(self) -> float:
        p = self.p
        return (p - 2.0) ** (1.0 / (p - 2.0)) * (p - 1.0) ** ((p - 1.0) / (p - 2.0))


class GridKind(str, enum.Enum):
    LINE = "line"
    RADIAL = "radial"


@dataclass(frozen=True, eq=False)
class Grid:
    """Uniform 1-D mesh: a symmetric line [-r_max, r_max] or a ray [0, r_max].

    Radial grids start exactly at r = 0 (symmetry node); the outer node is a
    homogeneous Dirichlet boundary in the solver.
    """

    kind: GridKind
    r_max: float
    n_cells: int
    nodes: np.ndarray

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.kind == other.kind
            and self.r_max == other.r_max
            and self.n_cells == other.n_cells
        )

    @property
    def h(self) -> float:
        width = 2.0 * self.r_max if self.kind is GridKind.LINE else self.r_max
        return width / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1


def make_grid(kind: GridKind | str, r_max: float, n_cells: int) -> Grid:
    """Build a uniform grid; `n_cells` counts cells across the whole domain."""
    kind = GridKind(kind)
    if not (r_max > 0.0 and math.isfinite(r_max)):
        raise InvalidArgumentError(f"r_max must be positive, got {r_max}")
    if int(n_cells) != n_cells or n_cells < 2:
        raise InvalidArgumentError(f"n_cells must be an integer >= 2, got {n_cells}")
    lo = -r_max if kind is GridKind.LINE else 0.0
    nodes = np.linspace(lo, r_max, int(n_cells) + 1)
    nodes.setflags(write=False)
    return Grid(kind=kind, r_max=float(r_max), n_cells=int(n_cells), nodes=nodes)


def surface_measure(N: int) -> float:
    """|S^{N-1}|, with the N = 1 convention |S^0| = 2 (whole-line integral)."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def cell_weights(grid: Grid, N: int) -> np.ndarray:
    """Trapezoid quadrature weights, with the radial measure r^{N-1} dr.

    Radial grids integrate |S^{N-1}| r^{N-1} dr; at N = 1 this reduces to the
    whole-line integral of the even extension.
    """
    h = grid.h
    w = np.full(grid.n_nodes, h)
    w[0] = w[-1] = 0.5 * h
    if grid.kind is GridKind.RADIAL:
        w = w * surface_measure(N) * np.abs(grid.nodes) ** (N - 1)
    return w


class FrameTag(str, enum.Enum):
    ORIGINAL = "original"      # u(t, x), clock t
    RESCALED_V = "v"           # first rescaling, clock tau
    RESCALED_W = "w"           # second rescaling (y = x/(1+tau)), clock tau
    LOG_TIME = "omega"         # log-time form, clock s = log(1+tau)


@dataclass(frozen=True)
class Frame:
    tag: FrameTag
    clock: float = 0.0

    def __post_init__(self):
        if not (self.clock >= 0.0 and math.isfinite(self.clock)):
            raise InvalidArgumentError(f"frame clock must be >= 0, got {self.clock}")


@dataclass(frozen=True, eq=False)
class SolutionState:
    """Discrete nonnegative profile at one instant of one frame.

    The solver's homogeneous-Dirichlet paths additionally expect the values to
    vanish at the outer boundary node; presets with an unbounded tail
    (the exact translating wave) carry their truncated values there and must
    be evolved with an explicit boundary rule.
    """

    frame: Frame
    grid: Grid
    values: np.ndarray
    params: ModelParams

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.n_nodes,):
            raise InvalidArgumentError(
                f"values shape {vals.shape} does not match grid ({self.grid.n_nodes},)"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("values must be finite")
        if vals.min(initial=0.0) < 0.0:
            raise InvalidArgumentError("values must be nonnegative")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values: np.ndarray, clock: float | None = None) -> "SolutionState":
        frame = self.frame if clock is None else replace(self.frame, clock=clock)
        return SolutionState(frame=frame, grid=self.grid, values=values, params=self.params)


def support_epsilon(values: np.ndarray) -> float:
    """Threshold below which a node counts as outside the support."""
    top = float(np.max(values, initial=0.0))
    return 1e-12 * max(1.0, top)


def support_span(values: np.ndarray, eps: float | None = None) -> tuple[int, int] | None:
    """(first, last) node index above the support threshold, or None."""
    eps = support_epsilon(values) if eps is None else eps
    idx = np.nonzero(values > eps)[0]
    if idx.size == 0:
        return None
    return int(idx[0]), int(idx[-1])


def support_radius_of(values: np.ndarray, grid: Grid) -> float:
    """Largest |node| inside the support, plus half a cell; 0 if empty."""
    span = support_span(values)
    if span is None:
        return 0.0
    lo, hi = span
    return max(abs(grid.nodes[lo]), abs(grid.nodes[hi])) + 0.5 * grid.h


# ---------------------------------------------------------------------------
# Closed-form profiles shared by several modules.
# ---------------------------------------------------------------------------

def sandpile_profile(rho, params: ModelParams):
    """Stationary sandpile profile: ((p-2)/(p-1) (1-|rho|)_+)^m, cusped at 0.

    Unique positive solution of |DW|^{p-1} = W on the unit ball vanishing on
    the boundary; the universal rescaled long-time shape.
    """
    p = params.p
    base = (p - 2.0) / (p - 1.0) * np.maximum(1.0 - np.abs(rho), 0.0)
    return base ** params.m


def wave_profile(z, K: float, params: ModelParams, alpha: float = 0.0):
    """Exact translating-wave profile with interface at z = K.

    For alpha = 0 this is the speed-1 wave of the rescaled flow,
    ((p-2)/(p-1))^m (K - z)_+^m; for alpha > 0 it is the analogous explicit
    wave of the alpha-damped flow, travelling at speed 1/(1+alpha), whose
    amplitude gains the factor (1+alpha)^{-1/(p-2)}.
    """
    p = params.p
    amp = ((p - 2.0) / (p - 1.0)) ** params.m * (1.0 + alpha) ** (-1.0 / (p - 2.0))
    return amp * np.maximum(K - np.asarray(z, dtype=float), 0.0) ** params.m


def bump_profile(rho, r0: float, amplitude: float):
    """Smooth radially nonincreasing bump: A cos^2(pi rho / (2 r0)) inside r0.

    Lipschitz constant pi A / (2 r0) <= 2 A / r0.
    """
    rho = np.abs(np.asarray(rho, dtype=float))
    out = amplitude * np.cos(np.pi * rho / (2.0 * r0)) ** 2
    return np.where(rho < r0, out, 0.0)


# ---------------------------------------------------------------------------
# Initial data presets.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InitialData:
    """Named initial-data preset; see the classmethod constructors.

    `r0` is the declared support radius used for domain-fit checks and for
    the eventual-symmetry diagnostic.
    """

    preset: str
    r0: float = 1.0
    amplitude: float = 1.0
    K: float = 0.0
    R: float | None = None
    T: float | None = None
    table: tuple[np.ndarray, np.ndarray] | None = None

    @classmethod
    def bump(cls, r0: float = 1.0, amplitude: float = 1.0) -> "InitialData":
        if r0 <= 0 or amplitude < 0:
            raise InvalidArgumentError("bump needs r0 > 0 and amplitude >= 0")
        return cls(preset="bump", r0=r0, amplitude=amplitude)

    @classmethod
    def explicit_wave(cls, K: float = 0.0) -> "InitialData":
        return cls(preset="explicit_wave", K=K, r0=math.inf)

    @classmethod
    def cap(cls, R: float | None = None, T: float | None = None) -> "InitialData":
        """Spreading-cap barrier shape; R, T default to the admissible corner."""
        return cls(preset="cap", R=R, T=T)

    @classmethod
    def sandpile(cls) -> "InitialData":
        return cls(preset="sandpile", r0=1.0)

    @classmethod
    def custom(cls, xs, values) -> "InitialData":
        xs = np.asarray(xs, dtype=float)
        values = np.asarray(values, dtype=float)
        if xs.ndim != 1 or xs.shape != values.shape or xs.size < 2:
            raise InvalidArgumentError("custom table needs matching 1-D xs/values")
        if np.any(np.diff(xs) <= 0):
            raise InvalidArgumentError("custom table xs must be strictly increasing")
        if values.min() < 0:
            raise InvalidArgumentError("custom table values must be nonnegative")
        r0 = float(np.max(np.abs(xs[values > 0])) if np.any(values > 0) else 0.0)
        return cls(preset="custom", table=(xs, values), r0=max(r0, 1e-300))


def sample_initial(
    data: InitialData,
    grid: Grid,
    params: ModelParams,
    frame_tag: FrameTag = FrameTag.ORIGINAL,
    clock: float = 0.0,
) -> SolutionState:
    """Sample a preset onto a grid as a state of the requested frame at `clock`.

    Raises DomainTooSmallError when the preset support does not fit strictly
    inside the domain.  The explicit wave is one-sided and unbounded to the
    left, so it is line-only and gets truncated by the domain; its left
    boundary node keeps the closed-form value.
    """
    x = grid.nodes
    if data.preset == "bump":
        if data.r0 >= grid.r_max:
            raise DomainTooSmallError(f"bump support {data.r0} >= r_max {grid.r_max}")
        vals = bump_profile(x, data.r0, data.amplitude)
    elif data.preset == "sandpile":
        if grid.r_max < 1.0:
            raise DomainTooSmallError("sandpile profile needs r_max >= 1")
        vals = sandpile_profile(x, params)
    elif data.preset == "explicit_wave":
        if grid.kind is not GridKind.LINE:
            raise InvalidArgumentError("explicit_wave preset needs a line grid")
        if data.K >= grid.r_max:
            raise DomainTooSmallError("wave interface K must lie inside the domain")
        vals = wave_profile(x, data.K, params)
    elif data.preset == "cap":
        from .waves import cap_parameter_bounds, spreading_cap_values

        r_bound, t_min = cap_parameter_bounds(params)
        R = r_bound if data.R is None else data.R
        T = t_min if data.T is None else data.T
        if R * T >= grid.r_max:
            raise DomainTooSmallError("cap support R*T must fit inside the domain")
        vals = spreading_cap_values(R, T, 0.0, x, params)
    elif data.preset == "custom":
        xs, table = data.table
        if np.max(np.abs(xs[table > 0]), initial=0.0) >= grid.r_max:
            raise DomainTooSmallError("custom table support must fit inside the domain")
        vals = np.interp(x, xs, table, left=0.0, right=0.0)
    else:
        raise InvalidArgumentError(f"unknown preset {data.preset!r}")

    return SolutionState(
        frame=Frame(tag=frame_tag, clock=clock), grid=grid, values=vals, params=params
    )
