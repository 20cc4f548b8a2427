"""Varying-speed coning flight: analytic truth, IMU synthesis and error evaluation.

The vehicle starts at zero latitude/longitude/height and flies east with
speed ``v0 + (a/w)(1 - cos(w t))`` while the body performs classical coning
``q_n^b = cos(z/2) + sin(z/2) [0, cos(W t), sin(W t)]``.  Gyro and
accelerometer increments are integrals of the exact body rates and specific
force, computed with Gauss-Legendre quadrature.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .earth import EarthModel, NavState
from .fiter import FiterConfig, fiter_step
from .navcore import cross, principal_angle
from .strapdown import VARIANTS, AlgoVariant, ImuBatch, strapdown_step

log = logging.getLogger(__name__)

RECORD_HEADER = ["t", "algorithm", "att_err_rad", "vel_err_mps", "pos_err_m", "we_pos_err_m"]
SWEEP_HEADER = [
    "fc_hz",
    "rel_freq",
    "algorithm",
    "max_att_err_rad",
    "max_vel_err_mps",
    "max_pos_err_m",
    "max_we_pos_err_m",
]


@dataclass(frozen=True)
class ScenarioConfig:
    coning_angle_deg: float = 10.0
    fc: float = 0.037
    fs: float = 100.0
    samples: int = 2
    v0: float = 500.0
    accel: float = 10.0
    accel_freq: float = 0.02
    duration: float = 600.0
    earth: EarthModel = field(default_factory=EarthModel)
    gauss_points: int = 12

    def __post_init__(self):
        if not self.fc > 0:
            raise ValueError("coning frequency must be positive")
        if not self.fs > 0 or self.samples < 1:
            raise ValueError("need a positive sampling rate and at least one sample")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if self.gauss_points < 10:
            raise ValueError("use at least 10 quadrature points")

    @property
    def update_interval(self) -> float:
        return self.samples / self.fs

    @property
    def n_updates(self) -> int:
        return int(round(self.duration / self.update_interval + 1e-9))

    def replace(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)


@dataclass(frozen=True)
class TruthSample:
    t: np.ndarray
    q_nb: np.ndarray  # q_n^b
    v: np.ndarray
    lat: np.ndarray
    lon: np.ndarray
    h: np.ndarray
    omega_nb: np.ndarray

    @property
    def q_bn(self):
        return self.q_nb * np.array([1.0, -1.0, -1.0, -1.0])


@dataclass
class ErrorRecord:
    t: float
    algorithm: str
    att_err: float
    vel_err: float
    pos_err: float
    we_pos_err: float
    converged: bool = True

    def row(self):
        return [repr(float(self.t)), self.algorithm] + [
            repr(float(x)) for x in (self.att_err, self.vel_err, self.pos_err, self.we_pos_err)
        ]


# --------------------------------------------------------------------------
# truth


def _quat_rotate(q, v):
    """Rotate stacked vectors ``v`` by stacked quaternions ``q`` (``q v q*``)."""
    s = q[..., :1]
    u = q[..., 1:]
    uv = cross(u, v)
    return v + 2.0 * s * uv + 2.0 * cross(u, uv)


def truth_at(cfg: ScenarioConfig, t) -> TruthSample:
    """Analytic truth at time(s) ``t``."""
    t = np.asarray(t, dtype=float)
    half = 0.5 * np.deg2rad(cfg.coning_angle_deg)
    c, s = np.cos(half), np.sin(half)
    big_w = 2.0 * np.pi * cfg.fc
    th = big_w * t
    zeros = np.zeros_like(t)
    q_nb = np.stack([np.full_like(t, c), zeros, s * np.cos(th), s * np.sin(th)], axis=-1)
    omega_nb = 2.0 * np.stack(
        [np.full_like(t, -s * s * big_w), c * s * big_w * np.sin(th), -c * s * big_w * np.cos(th)], axis=-1
    )
    a, w = cfg.accel, cfg.accel_freq
    ve = cfg.v0 + (a / w) * (1.0 - np.cos(w * t))
    v = np.stack([zeros, zeros, ve], axis=-1)
    east = cfg.v0 * t + (a / w) * (t - np.sin(w * t) / w)
    lon = east / cfg.earth.radius
    return TruthSample(t, q_nb, v, zeros.copy(), lon, zeros.copy(), omega_nb)


def _truth_rates(cfg: ScenarioConfig, t):
    """Body angular rate ``w_ib^b`` and specific force ``f^b`` at times ``t``."""
    tr = truth_at(cfg, t)
    e = cfg.earth
    w_ie = e.earth_rate(tr.lat)
    w_en = e.transport_rate(tr.v, tr.lat, tr.h)
    a, w = cfg.accel, cfg.accel_freq
    vdot = np.zeros_like(tr.v)
    vdot[..., 2] = a * np.sin(w * np.asarray(t, dtype=float))
    f_n = vdot + cross(2.0 * w_ie + w_en, tr.v) - e.gravity_vector(tr.lat, tr.h)
    w_ib = tr.omega_nb + _quat_rotate(tr.q_nb, w_ie + w_en)
    return w_ib, _quat_rotate(tr.q_nb, f_n)


def synth_increments(cfg: ScenarioConfig, t0, T, n, gauss_points=None):
    """Angular and velocity increments over ``n`` equal subintervals of ``[t0, t0+T]``.

    ``t0`` may be an array of interval starts; results are (..., n, 3).
    """
    g = gauss_points or cfg.gauss_points
    x, wts = np.polynomial.legendre.leggauss(g)
    h = T / n
    t0 = np.asarray(t0, dtype=float)
    starts = t0[..., None] + h * np.arange(n)  # (..., n)
    tq = starts[..., None] + 0.5 * h * (x + 1.0)  # (..., n, g)
    w_ib, f_b = _truth_rates(cfg, tq)
    scale = 0.5 * h * wts[:, None]
    return (w_ib * scale).sum(axis=-2), (f_b * scale).sum(axis=-2)


def synth_imu(cfg: ScenarioConfig, t0: float, T: float | None = None, n: int | None = None) -> ImuBatch:
    T = cfg.update_interval if T is None else T
    n = cfg.samples if n is None else n
    dth, dv = synth_increments(cfg, t0, T, n)
    return ImuBatch(dth, dv, T)


def initial_state(cfg: ScenarioConfig) -> NavState:
    tr = truth_at(cfg, 0.0)
    return NavState(tr.q_bn, tr.v, float(tr.lat), float(tr.lon), float(tr.h))


def evaluate(cfg: ScenarioConfig, state: NavState, t: float, label: str, converged=True) -> ErrorRecord:
    tr = truth_at(cfg, t)
    r = cfg.earth.radius + tr.h
    we = (state.lon - tr.lon) * r * np.cos(tr.lat)
    dn = (state.lat - tr.lat) * r
    du = state.h - tr.h
    return ErrorRecord(
        float(t),
        label,
        float(principal_angle(state.q, tr.q_bn)),
        float(np.linalg.norm(state.v - tr.v)),
        float(np.sqrt(we * we + dn * dn + du * du)),
        float(we),
        converged,
    )


# --------------------------------------------------------------------------
# runs


def resolve_variant(name: str) -> AlgoVariant:
    try:
        return VARIANTS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown algorithm {name!r}; choose from {sorted(VARIANTS)}") from None


def _label(variant: AlgoVariant, n: int) -> str:
    return f"{variant.name} (N={n})"


def run_variant(
    cfg: ScenarioConfig,
    variant: AlgoVariant | str,
    fiter_cfg: FiterConfig = FiterConfig(),
    record_every: int = 1,
) -> list:
    """Navigate the whole scenario with one algorithm; one record per reported epoch."""
    if isinstance(variant, str):
        variant = resolve_variant(variant)
    n_up = cfg.n_updates
    if n_up == 0:
        return []
    T = cfg.update_interval
    starts = T * np.arange(n_up)
    dth, dv = synth_increments(cfg, starts, T, cfg.samples)
    state = initial_state(cfg)
    label = _label(variant, cfg.samples)
    records = []
    converged_run = True
    for k in range(n_up):
        batch = ImuBatch(dth[k], dv[k], T)
        if variant.attitude == "fiter":
            state, sol = fiter_step(state, batch, fiter_cfg, cfg.earth)
            converged_run = converged_run and sol.converged
            ok = sol.converged
        else:
            state, _ = strapdown_step(state, batch, variant, cfg.earth)
            ok = True
        if (k + 1) % record_every == 0 or k + 1 == n_up:
            records.append(evaluate(cfg, state, (k + 1) * T, label, ok))
    if not converged_run:
        log.info("%s: functional iteration stopped at the iteration cap on some intervals", label)
    return records


def run_scenario(cfg: ScenarioConfig, variants, fiter_cfg: FiterConfig = FiterConfig(), record_every: int = 1) -> list:
    out = []
    for v in variants:
        out.extend(run_variant(cfg, v, fiter_cfg, record_every))
    return out


def summarize(records) -> dict:
    """Maximum errors per algorithm label."""
    out = {}
    for r in records:
        m = out.setdefault(r.algorithm, {"att": 0.0, "vel": 0.0, "pos": 0.0, "we": 0.0, "converged": True})
        m["att"] = max(m["att"], r.att_err)
        m["vel"] = max(m["vel"], r.vel_err)
        m["pos"] = max(m["pos"], r.pos_err)
        m["we"] = max(m["we"], abs(r.we_pos_err))
        m["converged"] = m["converged"] and r.converged
    return out


def records_to_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RECORD_HEADER)
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def _sweep_point(args):
    cfg, variants, fiter_cfg = args
    recs = run_scenario(cfg, variants, fiter_cfg, record_every=1)
    rows = []
    for label, m in summarize(recs).items():
        rows.append((cfg.fc, cfg.fc / cfg.fs, label, m["att"], m["vel"], m["pos"], m["we"], m["converged"]))
    return rows


def sweep(cfg: ScenarioConfig, fcs, variants, fiter_cfg: FiterConfig = FiterConfig(), jobs: int = 1, samples=None):
    """Max-error rows for every (coning frequency, algorithm), sorted by (fc, algorithm)."""
    samples = samples or [cfg.samples]
    tasks = [(cfg.replace(fc=float(fc), samples=n), list(variants), fiter_cfg) for fc in fcs for n in samples]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sweep_point, tasks))
    else:
        results = [_sweep_point(t) for t in tasks]
    rows = [r for chunk in results for r in chunk]
    rows.sort(key=lambda r: (r[0], r[2]))
    return rows


def sweep_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for fc, rel, label, att, vel, pos, we, _ in rows:
        w.writerow([repr(float(fc)), repr(float(rel)), label] + [repr(float(x)) for x in (att, vel, pos, we)])
    return buf.getvalue()


def log_frequencies(fmin: float, fmax: float, points: int):
    return np.geomspace(fmin, fmax, points) if points > 1 else np.array([fmin])
