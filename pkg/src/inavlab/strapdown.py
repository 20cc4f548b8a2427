"""Traditional, enhanced and ViaGen navigation updates over one interval.

Angular-rate and specific-force polynomials of degree N-1 are recovered from
the N increments by moment matching; the body-frame integrals of each
algorithm are then evaluated in closed form at ``t = T``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .earth import EarthModel, EarthRates, NavState, earth_rates
from .exact import series_terms_for_order
from .navcore import (
    cross,
    dcm_from_quat,
    fit_poly_from_increments,
    quat_from_rotvec,
    quat_mul,
    quat_normalize,
    rotate_by_rotvec,
)

ATTITUDE_KINDS = ("traditional", "enhanced", "fiter")
VELOCITY_KINDS = (
    "first-order",
    "second-order",
    "enhanced-first",
    "enhanced-second",
    "viagen",
    "fiter",
    "vpif-rigorous",
)


@dataclass(frozen=True)
class ImuBatch:
    """N angular and velocity increments over an interval of length ``T``."""

    dtheta: np.ndarray
    dvel: np.ndarray
    T: float

    def __post_init__(self):
        dth = np.atleast_2d(np.asarray(self.dtheta, dtype=float))
        dv = np.atleast_2d(np.asarray(self.dvel, dtype=float))
        if dth.shape != dv.shape or dth.shape[1] != 3 or dth.shape[0] < 1:
            raise ValueError("increments must both be (N, 3) with N >= 1")
        if not self.T > 0:
            raise ValueError("interval length must be positive")
        object.__setattr__(self, "dtheta", dth)
        object.__setattr__(self, "dvel", dv)

    @property
    def N(self) -> int:
        return self.dtheta.shape[0]

    @property
    def alpha(self):
        return self.dtheta.sum(axis=0)

    @property
    def v(self):
        return self.dvel.sum(axis=0)


@dataclass(frozen=True)
class AlgoVariant:
    attitude: str = "traditional"
    velocity: str = "second-order"
    trig_order: int = 8
    frame_rates: str = "start"  # "start" or "mid": where the n-frame rates are evaluated
    label: str = ""

    def __post_init__(self):
        if self.attitude not in ATTITUDE_KINDS:
            raise ValueError(f"unknown attitude algorithm {self.attitude!r}")
        if self.velocity not in VELOCITY_KINDS:
            raise ValueError(f"unknown velocity algorithm {self.velocity!r}")
        if (self.velocity == "fiter") != (self.attitude == "fiter"):
            raise ValueError("functional-iteration velocity and attitude go together")
        if self.frame_rates not in ("start", "mid"):
            raise ValueError("frame_rates must be 'start' or 'mid'")
        if self.trig_order < 1:
            raise ValueError("trig_order must be >= 1")

    @property
    def name(self) -> str:
        return self.label or f"{self.attitude}/{self.velocity}"


# Named algorithm combinations.
VARIANTS = {
    "typical": AlgoVariant("traditional", "second-order", label="Typical"),
    "typical1": AlgoVariant("traditional", "first-order", label="Typical-1"),
    "enhanced": AlgoVariant("enhanced", "enhanced-second", label="Enhanced"),
    "enhanced1": AlgoVariant("enhanced", "enhanced-first", label="Enhanced-1"),
    "viagen": AlgoVariant("traditional", "viagen", trig_order=8, label="ViaGen-8"),
    "viagen1": AlgoVariant("traditional", "viagen", trig_order=1, label="ViaGen-1"),
    "vpif": AlgoVariant("traditional", "vpif-rigorous", label="VPifNav"),
    "fiter": AlgoVariant("fiter", "fiter", label="iNavFIter"),
}


@dataclass
class VelocityUpdateTerms:
    u: np.ndarray  # body-frame transformed specific-force integral
    dv_g: np.ndarray
    dv_fc: np.ndarray


# --------------------------------------------------------------------------
# vector polynomials with float coefficients: rows are powers of t


def _pad(p, n):
    return p if p.shape[0] >= n else np.vstack([p, np.zeros((n - p.shape[0], 3))])


def _padd(*ps):
    n = max(p.shape[0] for p in ps)
    return sum(_pad(p, n) for p in ps)


def _pcross(p, q):
    pairs = cross(p[:, None, :], q[None, :, :])
    out = np.zeros((p.shape[0] + q.shape[0] - 1, 3))
    for i in range(p.shape[0]):
        out[i : i + q.shape[0]] += pairs[i]
    return out


def _pint(p):
    return np.vstack([np.zeros(3), p / np.arange(1, p.shape[0] + 1)[:, None]])


def _pval(p, t):
    return (t ** np.arange(p.shape[0])) @ p


class BodyIntegrals:
    """Closed-form body-frame integrals for one interval.

    ``omega`` and ``force`` are monomial coefficient arrays (rows = powers).
    """

    def __init__(self, omega, force, T):
        self.omega = np.asarray(omega, dtype=float)
        self.force = np.asarray(force, dtype=float)
        self.T = T

    @classmethod
    def from_batch(cls, batch: ImuBatch) -> "BodyIntegrals":
        return cls(
            fit_poly_from_increments(batch.dtheta, batch.T),
            fit_poly_from_increments(batch.dvel, batch.T),
            batch.T,
        )

    @cached_property
    def alpha_p(self):
        return _pint(self.omega)

    @cached_property
    def v_p(self):
        return _pint(self.force)

    @cached_property
    def sigma_trad_p(self):
        return _pint(_padd(self.omega, 0.5 * _pcross(self.alpha_p, self.omega)))

    @property
    def alpha(self):
        return _pval(self.alpha_p, self.T)

    @property
    def v(self):
        return _pval(self.v_p, self.T)

    def sigma_traditional(self):
        return _pval(self.sigma_trad_p, self.T)

    def sigma_enhanced(self):
        st, w = self.sigma_trad_p, self.omega
        corr = _padd(0.5 * _pcross(_padd(st, -self.alpha_p), w), _pcross(st, _pcross(st, w)) / 12.0)
        return self.sigma_traditional() + _pval(_pint(corr), self.T)

    def u_first(self):
        return self.v + _pval(_pint(_pcross(self.alpha_p, self.force)), self.T)

    def second_order_term(self):
        a, v = self.alpha, self.v
        return cross(a, cross(a, v)) / 6.0

    def u_second(self):
        return self.u_first() + self.second_order_term()

    def delta_v1(self):
        return _pval(_pint(_pcross(_padd(self.sigma_trad_p, -self.alpha_p), self.force)), self.T)

    def delta_v2(self):
        st = self.sigma_trad_p
        main = 0.5 * _pval(_pint(_pcross(st, _pcross(st, self.force))), self.T)
        return main - self.second_order_term()

    def u_enhanced_first(self):
        return self.u_first() + self.delta_v1()

    def u_enhanced_second(self):
        return self.u_second() + self.delta_v1() + self.delta_v2()

    def eta(self):
        inner = _padd(_pcross(self.alpha_p, self.force), -_pcross(self.omega, self.v_p))
        return self.v + 0.5 * _pval(_pint(inner), self.T)

    def u_viagen(self, trig_order=8):
        sigma = self.sigma_traditional()
        eta = self.eta()
        c1, c2 = viagen_coefficients(float(sigma @ sigma), trig_order)
        sxe = cross(sigma, eta)
        return eta + c1 * sxe + c2 * cross(sigma, sxe)

    def u(self, velocity: str, trig_order: int = 8):
        if velocity == "first-order":
            return self.u_first()
        if velocity in ("second-order", "vpif-rigorous"):
            return self.u_second()
        if velocity == "enhanced-first":
            return self.u_enhanced_first()
        if velocity == "enhanced-second":
            return self.u_enhanced_second()
        if velocity == "viagen":
            return self.u_viagen(trig_order)
        raise ValueError(f"no closed-form u for {velocity!r}")

    def sigma(self, attitude: str):
        if attitude == "traditional":
            return self.sigma_traditional()
        if attitude == "enhanced":
            return self.sigma_enhanced()
        raise ValueError(f"no closed-form rotation vector for {attitude!r}")


def viagen_coefficients(s2: float, trig_order: int):
    """Series values of ``(1-cos s)/s^2`` and ``(1-sin(s)/s)/s^2`` of the given order."""
    n = series_terms_for_order(trig_order)
    c1 = c2 = 0.0
    term1, term2, p = 0.5, 1.0 / 6.0, 1.0
    for k in range(n):
        c1 += term1 * p
        c2 += term2 * p
        p *= -s2
        term1 /= (2 * k + 3) * (2 * k + 4)
        term2 /= (2 * k + 4) * (2 * k + 5)
    return c1, c2


# --------------------------------------------------------------------------
# interval updates


def _frame_rates(state, earth, variant, body: BodyIntegrals | None = None) -> EarthRates:
    rates = earth_rates(state, earth)
    if variant.frame_rates == "start" or body is None:
        return rates
    # predictor for mid-interval rates
    T = body.T
    v_pred = state.v + 0.5 * T * (rates.g - cross(2 * rates.w_ie + rates.w_en, state.v))
    v_pred = v_pred + 0.5 * (dcm_from_quat(state.q) @ body.v)
    dlat, _, dh = earth.position_rates(0.5 * (state.v + v_pred), state.lat, state.h)
    mid = state.replace(v=v_pred, lat=state.lat + 0.5 * T * dlat, h=state.h + 0.5 * T * dh)
    return earth_rates(mid, earth)


def attitude_update(
    state: NavState,
    batch: ImuBatch,
    variant: AlgoVariant,
    earth: EarthModel = EarthModel(),
    body: BodyIntegrals | None = None,
    rates: EarthRates | None = None,
):
    """Quaternion at the end of the interval.

    ``q(T) = q(-sigma_n) (x) q(0) (x) q(sigma_b)`` with ``sigma_n = T w_in^n``.
    """
    body = body or BodyIntegrals.from_batch(batch)
    rates = rates or _frame_rates(state, earth, variant, body)
    sigma_b = body.sigma(variant.attitude)
    sigma_n = batch.T * rates.w_in
    return quat_mul(quat_mul(quat_from_rotvec(-sigma_n), state.q), quat_from_rotvec(sigma_b))


def velocity_update(
    state: NavState,
    batch: ImuBatch,
    variant: AlgoVariant,
    earth: EarthModel = EarthModel(),
    body: BodyIntegrals | None = None,
    rates: EarthRates | None = None,
):
    """New NUE velocity and the terms that made it up."""
    body = body or BodyIntegrals.from_batch(batch)
    rates = rates or _frame_rates(state, earth, variant, body)
    T = batch.T
    c0 = dcm_from_quat(state.q)
    u = body.u(variant.velocity, variant.trig_order)
    if variant.velocity == "vpif-rigorous":
        return _velocity_vpif(state, body, u, c0, earth, rates)
    dv_g = (rates.g - cross(2 * rates.w_ie + rates.w_en, state.v)) * T
    dv_fc = -0.5 * T * cross(rates.w_in, c0 @ body.v)
    return state.v + c0 @ u + dv_g + dv_fc, VelocityUpdateTerms(u, dv_g, dv_fc)


def _velocity_vpif(state, body, u, c0, earth, rates):
    """Velocity integrated in the frozen start-of-interval frame, then rotated to n(T).

    ``v(T) = C_{n0}^{nT} [v0 + C0 u + int C_{n(t)}^{n0} (g - w_ie x v) dt]`` with
    the frame rotation vector taken linear in time at the mid-interval rate.
    """
    T = body.T
    # mid-interval rates from a first-order predictor
    v_pred = state.v + c0 @ u + (rates.g - cross(2 * rates.w_ie + rates.w_en, state.v)) * T
    dlat, _, dh = earth.position_rates(0.5 * (state.v + v_pred), state.lat, state.h)
    mid = state.replace(v=0.5 * (state.v + v_pred), lat=state.lat + 0.5 * T * dlat, h=state.h + 0.5 * T * dh)
    r = earth_rates(mid, earth)
    # Simpson rule on the gravity/Coriolis integrand in the n(0) frame
    ts = np.array([0.0, 0.5 * T, T])
    vs = state.v + np.outer(ts / T, v_pred - state.v)
    integrand = r.g - cross(r.w_ie, vs)
    integrand = rotate_by_rotvec(np.outer(ts, r.w_in), integrand)
    grav = T / 6.0 * (integrand[0] + 4 * integrand[1] + integrand[2])
    w = state.v + c0 @ u + grav
    v_new = rotate_by_rotvec(-T * r.w_in, w)
    return v_new, VelocityUpdateTerms(u, grav, v_new - w)


def position_update(state: NavState, v_old, v_new, T, earth: EarthModel = EarthModel()):
    """Trapezoidal position update; returns (lat, lon, h)."""
    v_avg = 0.5 * (np.asarray(v_old) + np.asarray(v_new))
    dlat, _, dh = earth.position_rates(v_avg, state.lat, state.h)
    lat_mid = state.lat + 0.5 * T * dlat
    h_mid = state.h + 0.5 * T * dh
    dlat, dlon, dh = earth.position_rates(v_avg, lat_mid, h_mid)
    return state.lat + T * dlat, state.lon + T * dlon, state.h + T * dh


def strapdown_step(state: NavState, batch: ImuBatch, variant: AlgoVariant, earth: EarthModel = EarthModel()):
    """Advance ``state`` over one interval; returns ``(new_state, VelocityUpdateTerms)``."""
    if variant.attitude == "fiter":
        from .fiter import fiter_step

        return fiter_step(state, batch, earth=earth)
    body = BodyIntegrals.from_batch(batch)
    if variant.velocity == "vpif-rigorous":
        base = earth_rates(state, earth)
        v_new, terms = velocity_update(state, batch, variant, earth, body, base)
        # frame rotation over the interval from the mid-interval rate
        mid_v = 0.5 * (state.v + v_new)
        dlat, _, dh = earth.position_rates(mid_v, state.lat, state.h)
        mid = state.replace(v=mid_v, lat=state.lat + 0.5 * batch.T * dlat, h=state.h + 0.5 * batch.T * dh)
        rates = earth_rates(mid, earth)
    else:
        rates = _frame_rates(state, earth, variant, body)
        v_new, terms = velocity_update(state, batch, variant, earth, body, rates)
    q_new = attitude_update(state, batch, variant, earth, body, rates)
    lat, lon, h = position_update(state, state.v, v_new, batch.T, earth)
    return NavState(quat_normalize(q_new), v_new, lat, lon, h), terms
