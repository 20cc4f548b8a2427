"""scikit-learn style wrapper around the strapdown update loop.

There is nothing to learn: ``fit`` validates the configuration and the
increment stream and fixes the initial state, ``transform`` integrates a
stream of IMU increments into a trajectory and ``predict`` returns the final
state only.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .earth import EarthModel, NavState
from .fiter import FiterConfig, fiter_step
from .scenario import resolve_variant
from .strapdown import ImuBatch, strapdown_step

STATE_COLUMNS = ("q0", "q1", "q2", "q3", "v_north", "v_up", "v_east", "lat", "lon", "h")


def state_to_row(state: NavState) -> np.ndarray:
    return np.concatenate([state.q, state.v, [state.lat, state.lon, state.h]])


def row_to_state(row) -> NavState:
    row = np.asarray(row, dtype=float)
    return NavState(row[:4], row[4:7], float(row[7]), float(row[8]), float(row[9]))


class StrapdownNavigator(TransformerMixin, BaseEstimator):
    """Integrate IMU increments into attitude, velocity and position.

    Parameters
    ----------
    variant : str
        Algorithm name: ``typical``, ``typical1``, ``enhanced``, ``enhanced1``,
        ``viagen``, ``viagen1``, ``vpif`` or ``fiter``.
    samples : int
        Increments per update interval.
    fs : float
        Sampling rate in Hz; each increment spans ``1/fs`` seconds.
    initial_state : NavState or array-like of length 10, optional
        Start state; defaults to level, at rest, at the origin.
    earth : EarthModel, optional
    tolerance : float
        Functional-iteration tolerance (``fiter`` only).

    Notes
    -----
    ``X`` has one row per sample: three angular increments (rad) followed by
    three velocity increments (m/s), in body axes.  Rows beyond the last full
    update interval are ignored.
    """

    def __init__(self, variant="typical", samples=2, fs=100.0, initial_state=None, earth=None, tolerance=1e-16):
        self.variant = variant
        self.samples = samples
        self.fs = fs
        self.initial_state = initial_state
        self.earth = earth
        self.tolerance = tolerance

    def _check_X(self, X):
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != 6:
            raise ValueError(f"expected 6 columns (3 angular + 3 velocity increments), got {X.shape[1]}")
        return X

    def fit(self, X, y=None):
        self._check_X(X)
        self.variant_ = resolve_variant(self.variant)
        if int(self.samples) < 1 or not self.fs > 0:
            raise ValueError("samples must be >= 1 and fs > 0")
        init = self.initial_state
        if init is None:
            init = NavState()
        elif not isinstance(init, NavState):
            init = row_to_state(init)
        self.initial_state_ = init
        self.earth_ = self.earth or EarthModel()
        self.fiter_config_ = FiterConfig(tolerance=self.tolerance)
        self.n_features_in_ = 6
        return self

    def _navigate(self, X):
        check_is_fitted(self, "initial_state_")
        X = self._check_X(X)
        n = int(self.samples)
        T = n / self.fs
        state = self.initial_state_
        rows, flags = [], []
        for k in range(X.shape[0] // n):
            block = X[k * n : (k + 1) * n]
            batch = ImuBatch(block[:, :3], block[:, 3:], T)
            if self.variant_.attitude == "fiter":
                state, sol = fiter_step(state, batch, self.fiter_config_, self.earth_)
                flags.append(sol.converged)
            else:
                state, _ = strapdown_step(state, batch, self.variant_, self.earth_)
                flags.append(True)
            rows.append(state_to_row(state))
        self.converged_ = np.array(flags, dtype=bool)
        return np.array(rows).reshape(-1, len(STATE_COLUMNS)), state

    def transform(self, X):
        """State after every update interval, shape (n_updates, 10)."""
        return self._navigate(X)[0]

    def predict(self, X):
        """Final state as a length-10 row."""
        traj, state = self._navigate(X)
        return state_to_row(state) if traj.shape[0] == 0 else traj[-1]
