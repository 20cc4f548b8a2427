"""Functional-iteration (Picard) solution of attitude, velocity and position.

All functions of time on the interval ``[0, T]`` are Chebyshev series.
Products are formed from values at Chebyshev-Gauss nodes and projected back
onto the series truncated at the configured degree, then integrated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

from .earth import EarthModel, NavState
from .exact import bortz_series, series_terms_for_order
from .navcore import (
    ChebPoly,
    cheb_fit_increments,
    cross,
    dcm_from_quat,
    quat_from_rotvec,
    quat_mul,
    quat_normalize,
    rotate_by_rotvec,
)
from .strapdown import ImuBatch


@dataclass(frozen=True)
class FiterConfig:
    """Iteration controls.  ``None`` degrees/limits resolve from the sample count N."""

    tolerance: float = 1e-16
    max_attitude_iterations: int | None = None  # N + 1
    max_velocity_iterations: int | None = None  # N + 1
    fit_degree: int | None = None  # N - 1 for angular rate and specific force
    attitude_degree: int | None = None  # 2N
    velocity_degree: int | None = None  # 2N
    position_degree: int | None = None  # 2N + 1
    bortz_order: int = 8

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        for name in ("fit_degree", "attitude_degree", "velocity_degree", "position_degree"):
            d = getattr(self, name)
            if d is not None and d < (0 if name == "fit_degree" else 1):
                raise ValueError(f"{name} must be >= 1")

    def resolved(self, n: int) -> "FiterConfig":
        return FiterConfig(
            self.tolerance,
            self.max_attitude_iterations or n + 1,
            self.max_velocity_iterations or n + 1,
            n - 1 if self.fit_degree is None else min(self.fit_degree, n - 1),
            self.attitude_degree or 2 * n,
            self.velocity_degree or 2 * n,
            self.position_degree or 2 * n + 1,
            self.bortz_order,
        )


@dataclass
class FiterSolution:
    sigma: ChebPoly | None = None  # body rotation vector sigma_b(t)
    velocity: ChebPoly | None = None  # NUE velocity v^n(t)
    position: ChebPoly | None = None  # (lat, lon, h)(t)
    sigma_n: ChebPoly | None = None  # navigation-frame rotation vector
    attitude_iterations: int = 0
    velocity_iterations: int = 0
    attitude_residual: float = np.inf
    velocity_residual: float = np.inf
    attitude_converged: bool = False
    velocity_converged: bool = False

    @property
    def converged(self) -> bool:
        return self.attitude_converged and (self.velocity is None or self.velocity_converged)


class _Grid:
    """Chebyshev-Gauss nodes on ``[0, T]`` with projection and integration helpers."""

    def __init__(self, T: float, n_nodes: int):
        k = np.arange(n_nodes)
        self.x = np.sort(np.cos(np.pi * (k + 0.5) / n_nodes))
        self.T = T
        self.t = 0.5 * T * (self.x + 1.0)
        self.vander = C.chebvander(self.x, n_nodes - 1)
        self.inv = np.linalg.inv(self.vander)
        self._integrators = {}

    def project(self, values, degree):
        return self.inv[: degree + 1] @ values

    def integrator(self, degree):
        """Matrix mapping node values to the integral (from 0) of their degree-``degree`` projection."""
        m = self._integrators.get(degree)
        if m is None:
            m = C.chebint(self.inv[: degree + 1], lbnd=-1, scl=0.5 * self.T)
            self._integrators[degree] = m
        return m

    def integrate_values(self, values, degree):
        return self.integrator(degree) @ values

    def values(self, coef):
        return self.vander[:, : coef.shape[0]] @ coef

    def integrate(self, coef):
        return C.chebint(coef, lbnd=-1, scl=0.5 * self.T)


@lru_cache(maxsize=64)
def _grid(T: float, n_nodes: int) -> _Grid:
    return _Grid(T, n_nodes)


@lru_cache(maxsize=None)
def _bortz_coefs(order: int) -> np.ndarray:
    return np.array([float(c) for c in bortz_series(series_terms_for_order(order)).coefs])


def _bortz(s2, order):
    return np.polynomial.polynomial.polyval(s2, _bortz_coefs(order))


def _change(new, old):
    n = max(new.shape[0], old.shape[0])
    a = np.zeros((n,) + new.shape[1:])
    b = np.zeros((n,) + old.shape[1:])
    a[: new.shape[0]] = new
    b[: old.shape[0]] = old
    return float(np.max(np.abs(a - b)))


def _nodes_for(cfg: FiterConfig) -> int:
    return 2 * max(cfg.attitude_degree, cfg.velocity_degree, cfg.position_degree) + 2


def attitude_fiter(batch: ImuBatch, cfg: FiterConfig = FiterConfig()) -> FiterSolution:
    """Picard iteration of the rotation-vector equation from ``sigma = 0``."""
    cfg = cfg.resolved(batch.N)
    T = batch.T
    grid = _grid(T, _nodes_for(cfg))
    w_fit = cheb_fit_increments(batch.dtheta, 0.0, T)
    w_coef = w_fit.coef[: cfg.fit_degree + 1] if cfg.fit_degree < batch.N - 1 else w_fit.coef
    W = grid.values(w_coef)
    d = cfg.attitude_degree
    coef = np.zeros((1, 3))
    S = np.zeros_like(W)
    sol = FiterSolution()
    for it in range(1, cfg.max_attitude_iterations + 1):
        sxw = cross(S, W)
        bracket = _bortz(np.einsum("ij,ij->i", S, S), cfg.bortz_order)
        integrand = W + 0.5 * sxw + bracket[:, None] * cross(S, sxw)
        new = grid.integrate_values(integrand, d - 1)
        sol.attitude_residual = _change(new, coef)
        sol.attitude_iterations = it
        coef = new
        S = grid.values(coef)
        if sol.attitude_residual <= cfg.tolerance:
            sol.attitude_converged = True
            break
    sol.sigma = ChebPoly(0.0, T, coef)
    return sol


def velocity_position_fiter(
    batch: ImuBatch,
    attitude: FiterSolution,
    state: NavState,
    cfg: FiterConfig = FiterConfig(),
    earth: EarthModel = EarthModel(),
) -> FiterSolution:
    """Joint Picard iteration of velocity and position given the body attitude.

    ``v(t) = v(0) + int [C_b^n(t) f - (2 w_ie + w_en) x v + g] dt`` where
    ``C_b^n(t) = C_{n0}^{n(t)} C_b^n(0) C_{b(t)}^{b0}`` and the frame rotation
    ``sigma_n(t)`` is rebuilt from the current velocity/position iterate.
    """
    cfg = cfg.resolved(batch.N)
    T = batch.T
    grid = _grid(T, _nodes_for(cfg))
    f_fit = cheb_fit_increments(batch.dvel, 0.0, T)
    f_coef = f_fit.coef[: cfg.fit_degree + 1] if cfg.fit_degree < batch.N - 1 else f_fit.coef
    Fb = grid.values(f_coef)
    Sb = grid.values(attitude.sigma.coef)
    c0 = dcm_from_quat(state.q)
    Fn0 = rotate_by_rotvec(Sb, Fb) @ c0.T

    dv, dp = cfg.velocity_degree, cfg.position_degree
    p0 = np.array([state.lat, state.lon, state.h])
    v_coef = state.v[None, :].copy()
    p_coef = p0[None, :].copy()
    V = np.broadcast_to(state.v, Fb.shape)
    LAT = np.full(grid.t.shape, state.lat)
    H = np.full(grid.t.shape, state.h)
    r = earth.radius + state.h
    pos_scale = np.array([r, r * np.cos(state.lat), 1.0])
    sol = attitude
    sn_coef = np.zeros((1, 3))
    for it in range(1, cfg.max_velocity_iterations + 1):
        w_ie = earth.earth_rate(LAT)
        w_en = earth.transport_rate(V, LAT, H)
        w_in = w_ie + w_en
        sn_coef = grid.integrate_values(w_in, dv - 1)
        Sn = grid.values(sn_coef)
        sn_coef = grid.integrate_values(w_in + 0.5 * cross(Sn, w_in), dv - 1)
        Sn = grid.values(sn_coef)
        g = earth.gravity_vector(LAT, H)
        integrand = rotate_by_rotvec(-Sn, Fn0) - cross(2.0 * w_ie + w_en, V) + g
        v_new = grid.integrate_values(integrand, dv - 1)
        v_new[0] += state.v
        V = grid.values(v_new)
        rates = np.stack(earth.position_rates(V, LAT, H), axis=-1)
        p_new = grid.integrate_values(rates, dp - 1)
        p_new[0] += p0
        res_v = _change(v_new, v_coef)
        res_p = _change(p_new * pos_scale, p_coef * pos_scale)
        sol.velocity_residual = max(res_v, res_p)
        sol.velocity_iterations = it
        v_coef, p_coef = v_new, p_new
        P = grid.values(p_coef)
        LAT, H = P[:, 0], P[:, 2]
        if sol.velocity_residual <= cfg.tolerance:
            sol.velocity_converged = True
            break
    sol.velocity = ChebPoly(0.0, T, v_coef)
    sol.position = ChebPoly(0.0, T, p_coef)
    sol.sigma_n = ChebPoly(0.0, T, sn_coef)
    return sol


def _end(p: ChebPoly):
    # T_j(1) = 1
    return p.coef.sum(axis=0)


def fiter_step(
    state: NavState,
    batch: ImuBatch,
    cfg: FiterConfig = FiterConfig(),
    earth: EarthModel = EarthModel(),
):
    """One full navigation update; returns ``(new_state, FiterSolution)``."""
    sol = attitude_fiter(batch, cfg)
    sol = velocity_position_fiter(batch, sol, state, cfg, earth)
    q = quat_mul(quat_mul(quat_from_rotvec(-_end(sol.sigma_n)), state.q), quat_from_rotvec(_end(sol.sigma)))
    lat, lon, h = _end(sol.position)
    return NavState(quat_normalize(q), _end(sol.velocity), float(lat), float(lon), float(h)), sol
