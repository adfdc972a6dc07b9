"""Exact, invertible transformations between the four solution frames.

    original  u(t, x)
    v-frame   u = (1 + (p-2) t)^{-1/(p-2)} v(tau, x),  tau = ln(1+(p-2)t)/(p-2)
    w-frame   v = (1 + tau)^{m} w(tau, y),             y   = x / (1 + tau)
    log-time  w(tau, y) = omega(log(1 + tau), y)

All prefactors are strictly positive, so u <-> v preserves supports exactly
and v <-> w scales them by 1/(1+tau).  Transformations never mutate their
input; resampling (v <-> w) uses monotone piecewise-linear interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import (
    Frame,
    FrameTag,
    Grid,
    ModelParams,
    SolutionState,
    support_radius_of,
)
from .errors import DomainTooSmallError, InvalidArgumentError, InvalidFrameError


def tau_of_t(t: float, params: ModelParams) -> float:
    """Logarithmic time tau = ln(1 + (p-2) t) / (p-2)."""
    if t < 0:
        raise InvalidArgumentError(f"t must be >= 0, got {t}")
    p2 = params.p - 2.0
    return math.log1p(p2 * t) / p2


def t_of_tau(tau: float, params: ModelParams) -> float:
    """Exact inverse of tau_of_t: t = (e^{(p-2) tau} - 1) / (p-2)."""
    if tau < 0:
        raise InvalidArgumentError(f"tau must be >= 0, got {tau}")
    p2 = params.p - 2.0
    return math.expm1(p2 * tau) / p2


@dataclass(frozen=True)
class TimeMaps:
    """Bundled time maps for one parameter set (strictly increasing, inverse)."""

    params: ModelParams

    def tau_of_t(self, t: float) -> float:
        return tau_of_t(t, self.params)

    def t_of_tau(self, tau: float) -> float:
        return t_of_tau(tau, self.params)

    def s_of_tau(self, tau: float) -> float:
        if tau < 0:
            raise InvalidArgumentError(f"tau must be >= 0, got {tau}")
        return math.log1p(tau)

    def tau_of_s(self, s: float) -> float:
        if s < 0:
            raise InvalidArgumentError(f"s must be >= 0, got {s}")
        return math.expm1(s)


def _require(state: SolutionState, tag: FrameTag) -> None:
    if state.frame.tag is not tag:
        raise InvalidFrameError(f"expected frame {tag.value}, got {state.frame.tag.value}")


def u_to_v(state: SolutionState) -> SolutionState:
    """First rescaling: v = (1 + (p-2) t)^{1/(p-2)} u on the same grid."""
    _require(state, FrameTag.ORIGINAL)
    p2 = state.params.p - 2.0
    t = state.frame.clock
    factor = (1.0 + p2 * t) ** (1.0 / p2)
    return SolutionState(
        frame=Frame(FrameTag.RESCALED_V, tau_of_t(t, state.params)),
        grid=state.grid,
        values=factor * state.values,
        params=state.params,
    )


def v_to_u(state: SolutionState) -> SolutionState:
    _require(state, FrameTag.RESCALED_V)
    p2 = state.params.p - 2.0
    t = t_of_tau(state.frame.clock, state.params)
    factor = (1.0 + p2 * t) ** (-1.0 / p2)
    return SolutionState(
        frame=Frame(FrameTag.ORIGINAL, t),
        grid=state.grid,
        values=factor * state.values,
        params=state.params,
    )


def _resample(values: np.ndarray, nodes: np.ndarray, sample_at: np.ndarray) -> np.ndarray:
    # np.interp is monotone piecewise linear: no overshoot, keeps nonnegativity,
    # and extends by zero beyond the sampled support.
    return np.interp(sample_at, nodes, values, left=0.0, right=0.0)


def v_to_w(state: SolutionState, w_grid: Grid | None = None) -> SolutionState:
    """Second rescaling: w(tau, y) = v(tau, (1+tau) y) / (1+tau)^m."""
    _require(state, FrameTag.RESCALED_V)
    tau = state.frame.clock
    grid = state.grid if w_grid is None else w_grid
    if grid.kind is not state.grid.kind:
        raise InvalidArgumentError("w-grid must have the same kind as the v-grid")
    if support_radius_of(state.values, state.grid) / (1.0 + tau) > grid.r_max:
        raise DomainTooSmallError("w-grid does not cover the rescaled support")
    factor = (1.0 + tau) ** (-state.params.m)
    vals = factor * _resample(state.values, state.grid.nodes, grid.nodes * (1.0 + tau))
    return SolutionState(
        frame=Frame(FrameTag.RESCALED_W, tau), grid=grid, values=vals, params=state.params
    )


def w_to_v(state: SolutionState, v_grid: Grid | None = None) -> SolutionState:
    _require(state, FrameTag.RESCALED_W)
    tau = state.frame.clock
    grid = state.grid if v_grid is None else v_grid
    if grid.kind is not state.grid.kind:
        raise InvalidArgumentError("v-grid must have the same kind as the w-grid")
    if support_radius_of(state.values, state.grid) * (1.0 + tau) > grid.r_max:
        raise DomainTooSmallError("v-grid does not cover the unscaled support")
    factor = (1.0 + tau) ** state.params.m
    vals = factor * _resample(state.values, state.grid.nodes, grid.nodes / (1.0 + tau))
    return SolutionState(
        frame=Frame(FrameTag.RESCALED_V, tau), grid=grid, values=vals, params=state.params
    )


def w_to_omega(state: SolutionState) -> SolutionState:
    """Log-time relabelling: values unchanged, clock s = log(1 + tau)."""
    _require(state, FrameTag.RESCALED_W)
    return SolutionState(
        frame=Frame(FrameTag.LOG_TIME, math.log1p(state.frame.clock)),
        grid=state.grid,
        values=state.values,
        params=state.params,
    )


def omega_to_w(state: SolutionState) -> SolutionState:
    _require(state, FrameTag.LOG_TIME)
    return SolutionState(
        frame=Frame(FrameTag.RESCALED_W, math.expm1(state.frame.clock)),
        grid=state.grid,
        values=state.values,
        params=state.params,
    )
