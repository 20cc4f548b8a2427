"""Earth model, navigation state and frame rates in North-Up-East axes."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .navcore import IDENTITY_QUAT


@dataclass(frozen=True)
class EarthModel:
    """Spherical Earth with constant or latitude-dependent gravity."""

    radius: float = 6378137.0
    rate: float = 7.2921151467e-5
    gravity: float = 9.8
    normal_gravity: bool = False

    def g(self, lat, h):
        """Gravity magnitude (m/s^2)."""
        if not self.normal_gravity:
            return self.gravity + 0.0 * np.asarray(lat, dtype=float)
        s2 = np.sin(lat) ** 2
        return 9.780327 * (1.0 + 0.0053024 * s2 - 0.0000058 * np.sin(2 * lat) ** 2) - 3.086e-6 * h

    def earth_rate(self, lat):
        """``omega_ie^n`` for latitude array (..., ) -> (..., 3)."""
        lat = np.asarray(lat, dtype=float)
        return self.rate * np.stack([np.cos(lat), np.sin(lat), np.zeros_like(lat)], axis=-1)

    def transport_rate(self, v, lat, h):
        """``omega_en^n`` from NUE velocity (..., 3)."""
        v = np.asarray(v, dtype=float)
        r = self.radius + np.asarray(h, dtype=float)
        vn, ve = v[..., 0], v[..., 2]
        return np.stack([ve / r, ve * np.tan(lat) / r, -vn / r], axis=-1)

    def gravity_vector(self, lat, h):
        g = np.asarray(self.g(lat, h), dtype=float)
        z = np.zeros_like(g)
        return np.stack([z, -g, z], axis=-1)

    def position_rates(self, v, lat, h):
        """``(dlat/dt, dlon/dt, dh/dt)`` for NUE velocity."""
        v = np.asarray(v, dtype=float)
        r = self.radius + np.asarray(h, dtype=float)
        return v[..., 0] / r, v[..., 2] / (r * np.cos(lat)), v[..., 1]


@dataclass(frozen=True)
class NavState:
    """Attitude ``q_b^n``, NUE velocity (m/s), latitude/longitude (rad), height (m)."""

    q: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    lat: float = 0.0
    lon: float = 0.0
    h: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        if abs(self.lat) > np.pi / 2:
            raise ValueError("latitude outside [-pi/2, pi/2]")

    def replace(self, **kw) -> "NavState":
        return replace(self, **kw)


@dataclass(frozen=True)
class EarthRates:
    w_ie: np.ndarray
    w_en: np.ndarray
    g: np.ndarray

    @property
    def w_in(self):
        return self.w_ie + self.w_en


def earth_rates(state: NavState, earth: EarthModel = EarthModel()) -> EarthRates:
    return EarthRates(
        earth.earth_rate(state.lat),
        earth.transport_rate(state.v, state.lat, state.h),
        earth.gravity_vector(state.lat, state.h),
    )
