"""Numeric attitude primitives and polynomial fitting utilities.

Quaternions are ``ndarray`` of shape (4,) ordered ``[s, x, y, z]`` (Hamilton
product).  ``dcm_from_quat(q)`` is the matrix ``R`` with ``R v = q v q*``, so
for ``q = q_b^n`` it is ``C_b^n``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C

SMALL_ANGLE = 1e-7

IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


def cross(a, b):
    """Cross product over the last axis; cheaper than ``np.cross`` for small stacks."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a0, a1, a2 = a[..., 0], a[..., 1], a[..., 2]
    b0, b1, b2 = b[..., 0], b[..., 1], b[..., 2]
    return np.stack([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0], axis=-1)


def skew(v):
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def quat_conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_normalize(q):
    return q / np.linalg.norm(q)


def quat_canonical(q):
    """Sign-canonical form with non-negative scalar part."""
    q = np.asarray(q, dtype=float)
    return -q if q[0] < 0 else q


def quat_mul(a, b, normalize=True):
    s1, x1, y1, z1 = a
    s2, x2, y2, z2 = b
    q = np.array(
        [
            s1 * s2 - x1 * x2 - y1 * y2 - z1 * z2,
            s1 * x2 + x1 * s2 + y1 * z2 - z1 * y2,
            s1 * y2 - x1 * z2 + y1 * s2 + z1 * x2,
            s1 * z2 + x1 * y2 - y1 * x2 + z1 * s2,
        ]
    )
    return quat_normalize(q) if normalize else q


def quat_from_rotvec(rv):
    """Unit quaternion ``cos(s/2) + (rv/s) sin(s/2)`` with ``s = |rv|``."""
    rv = np.asarray(rv, dtype=float)
    s2 = float(rv @ rv)
    s = np.sqrt(s2)
    if s < SMALL_ANGLE:
        c = 1.0 - s2 / 8.0 + s2 * s2 / 384.0
        k = 0.5 - s2 / 48.0 + s2 * s2 / 3840.0
    else:
        c = np.cos(0.5 * s)
        k = np.sin(0.5 * s) / s
    return np.concatenate(([c], k * rv))


def rotvec_from_quat(q):
    """Rotation vector with magnitude in ``[0, pi]``."""
    q = quat_canonical(quat_normalize(np.asarray(q, dtype=float)))
    v = q[1:]
    n = np.linalg.norm(v)
    if n < SMALL_ANGLE:
        # 2 atan(n/s)/n expanded for small n
        return (2.0 / q[0]) * (1.0 - n * n / (3.0 * q[0] ** 2)) * v
    return (2.0 * np.arctan2(n, q[0]) / n) * v


def dcm_from_quat(q):
    s, x, y, z = q
    return np.array(
        [
            [s * s + x * x - y * y - z * z, 2 * (x * y - s * z), 2 * (x * z + s * y)],
            [2 * (x * y + s * z), s * s - x * x + y * y - z * z, 2 * (y * z - s * x)],
            [2 * (x * z - s * y), 2 * (y * z + s * x), s * s - x * x - y * y + z * z],
        ]
    )


def quat_from_dcm(m):
    """Inverse of :func:`dcm_from_quat` (Shepperd's method), sign-canonical."""
    m = np.asarray(m, dtype=float)
    tr = np.trace(m)
    cand = np.array([tr, m[0, 0], m[1, 1], m[2, 2]])
    i = int(np.argmax(cand))
    if i == 0:
        s = 0.5 * np.sqrt(1.0 + tr)
        q = [s, (m[2, 1] - m[1, 2]) / (4 * s), (m[0, 2] - m[2, 0]) / (4 * s), (m[1, 0] - m[0, 1]) / (4 * s)]
    elif i == 1:
        x = 0.5 * np.sqrt(1.0 + 2 * m[0, 0] - tr)
        q = [(m[2, 1] - m[1, 2]) / (4 * x), x, (m[0, 1] + m[1, 0]) / (4 * x), (m[0, 2] + m[2, 0]) / (4 * x)]
    elif i == 2:
        y = 0.5 * np.sqrt(1.0 + 2 * m[1, 1] - tr)
        q = [(m[0, 2] - m[2, 0]) / (4 * y), (m[0, 1] + m[1, 0]) / (4 * y), y, (m[1, 2] + m[2, 1]) / (4 * y)]
    else:
        z = 0.5 * np.sqrt(1.0 + 2 * m[2, 2] - tr)
        q = [(m[1, 0] - m[0, 1]) / (4 * z), (m[0, 2] + m[2, 0]) / (4 * z), (m[1, 2] + m[2, 1]) / (4 * z), z]
    return quat_canonical(quat_normalize(np.array(q)))


def rotation_coefficients(s2):
    """``sin(s)/s`` and ``(1-cos s)/s**2`` for ``s2 = s**2`` (array-friendly)."""
    s2 = np.asarray(s2, dtype=float)
    s = np.sqrt(s2)
    small = s < SMALL_ANGLE
    safe = np.where(small, 1.0, s)
    a = np.where(small, 1.0 - s2 / 6.0 + s2 * s2 / 120.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - s2 / 24.0 + s2 * s2 / 720.0, (1.0 - np.cos(safe)) / safe**2)
    return a, b


def rotate_by_rotvec(sigma, v):
    """Apply ``exp([sigma x])`` to ``v``; both may be stacked as (..., 3)."""
    sigma = np.asarray(sigma, dtype=float)
    v = np.asarray(v, dtype=float)
    a, b = rotation_coefficients(np.sum(sigma * sigma, axis=-1))
    sxv = cross(sigma, v)
    return v + a[..., None] * sxv + b[..., None] * cross(sigma, sxv)


def rodrigues(sigma):
    """DCM ``exp([sigma x])``."""
    a, b = rotation_coefficients(float(np.dot(sigma, sigma)))
    k = skew(sigma)
    return np.eye(3) + a * k + b * (k @ k)


def principal_angle(q_est, q_true):
    """Rotation angle of ``q_true^-1 (x) q_est`` in ``[0, pi]``."""
    d = quat_mul(quat_conj(q_true), q_est, normalize=False)
    return 2.0 * np.arctan2(np.linalg.norm(d[1:]), abs(d[0]))


# --------------------------------------------------------------------------
# moment-matching fits


@lru_cache(maxsize=None)
def _moment_inverse(n: int) -> np.ndarray:
    """Inverse of the unit-width subinterval moment matrix, computed exactly."""
    a = [[Fraction((k + 1) ** (j + 1) - k ** (j + 1), j + 1) for j in range(n)] for k in range(n)]
    # Gauss-Jordan in exact arithmetic
    inv = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        inv[col] = [x / p for x in inv[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return np.array([[float(x) for x in row] for row in inv])


def fit_poly_from_increments(increments, T):
    """Monomial coefficients of the degree-(N-1) polynomial matching N increments.

    ``increments`` is (N, 3); the k-th row is the integral of the polynomial
    over ``[(k-1) T/N, k T/N]``.  Returns (N, 3) with row ``j`` the coefficient
    of ``t**j``.
    """
    inc = np.atleast_2d(np.asarray(increments, dtype=float))
    n = inc.shape[0]
    if n < 1:
        raise ValueError("need at least one increment")
    if n > 8:
        warnings.warn(
            f"fitting {n} equispaced increments; the moment system is poorly conditioned",
            RuntimeWarning,
            stacklevel=2,
        )
    h = T / n
    d = _moment_inverse(n) @ inc
    return d / h ** np.arange(1, n + 1)[:, None]


# --------------------------------------------------------------------------
# Chebyshev polynomials on [t0, t1]


@dataclass(frozen=True)
class ChebPoly:
    """Chebyshev series on ``[t0, t1]``; ``coef`` is (d+1,) or (d+1, k)."""

    t0: float
    t1: float
    coef: np.ndarray

    @property
    def degree(self) -> int:
        return self.coef.shape[0] - 1

    @property
    def half_width(self) -> float:
        return 0.5 * (self.t1 - self.t0)

    def to_x(self, t):
        return (2.0 * (np.asarray(t, dtype=float) - self.t0) / (self.t1 - self.t0)) - 1.0

    def __call__(self, t):
        return cheb_eval(self, t)

    def to_monomial(self):
        """Coefficients in powers of ``(t - t0)``, same trailing shape as ``coef``."""
        cols = self.coef.reshape(self.coef.shape[0], -1)
        h = self.half_width
        out = []
        for c in cols.T:
            p = C.cheb2poly(c)  # powers of x, x = (t - t0)/h - 1
            # substitute x = y/h - 1 with y = t - t0
            poly = np.polynomial.Polynomial(p)(np.polynomial.Polynomial([-1.0, 1.0 / h]))
            coefs = np.zeros(len(c))
            coefs[: len(poly.coef)] = poly.coef[: len(c)]
            out.append(coefs)
        return np.array(out).T.reshape(self.coef.shape)


def _check_same(a: ChebPoly, b: ChebPoly):
    if a.t0 != b.t0 or a.t1 != b.t1:
        raise ValueError("Chebyshev operands live on different intervals")


def cheb_fit(t, values, degree, interval=None) -> ChebPoly:
    """Least-squares Chebyshev fit of (t, value) samples."""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if degree >= len(t):
        raise ValueError("degree must be smaller than the number of samples")
    t0, t1 = interval if interval is not None else (float(t.min()), float(t.max()))
    x = 2.0 * (t - t0) / (t1 - t0) - 1.0
    return ChebPoly(t0, t1, C.chebfit(x, values, degree))


def cheb_eval(p: ChebPoly, t):
    x = p.to_x(t)
    v = C.chebval(x, p.coef)
    # chebval puts the trailing coefficient axes first
    return np.moveaxis(v, 0, -1) if p.coef.ndim > 1 and np.ndim(x) > 0 else v


def cheb_integrate(p: ChebPoly) -> ChebPoly:
    """Antiderivative in ``t`` vanishing at ``t0``."""
    return ChebPoly(p.t0, p.t1, C.chebint(p.coef, lbnd=-1, scl=p.half_width))


def cheb_truncate(p: ChebPoly, degree: int) -> ChebPoly:
    return ChebPoly(p.t0, p.t1, p.coef[: degree + 1].copy())


def _columnwise(fn, a, b):
    a2 = a.reshape(a.shape[0], -1)
    b2 = b.reshape(b.shape[0], -1)
    k = max(a2.shape[1], b2.shape[1])
    cols = [fn(a2[:, i % a2.shape[1]], b2[:, i % b2.shape[1]]) for i in range(k)]
    n = max(len(c) for c in cols)
    out = np.zeros((n, k))
    for i, c in enumerate(cols):
        out[: len(c), i] = c
    return out if (a.ndim > 1 or b.ndim > 1) else out[:, 0]


def cheb_mul(a: ChebPoly, b: ChebPoly, truncation: int | None = None) -> ChebPoly:
    """Elementwise product (scalar operands broadcast), truncated at ``truncation``."""
    _check_same(a, b)
    coef = _columnwise(C.chebmul, a.coef, b.coef)
    if truncation is not None:
        coef = coef[: truncation + 1]
    return ChebPoly(a.t0, a.t1, coef)


def cheb_cross(a: ChebPoly, b: ChebPoly, truncation: int | None = None) -> ChebPoly:
    _check_same(a, b)
    ax, ay, az = (ChebPoly(a.t0, a.t1, a.coef[:, i]) for i in range(3))
    bx, by, bz = (ChebPoly(b.t0, b.t1, b.coef[:, i]) for i in range(3))

    def sub(p, q, r, s):
        return C.chebsub(cheb_mul(p, q).coef, cheb_mul(r, s).coef)

    cols = [sub(ay, bz, az, by), sub(az, bx, ax, bz), sub(ax, by, ay, bx)]
    n = max(len(c) for c in cols)
    coef = np.zeros((n, 3))
    for i, c in enumerate(cols):
        coef[: len(c), i] = c
    if truncation is not None:
        coef = coef[: truncation + 1]
    return ChebPoly(a.t0, a.t1, coef)


@lru_cache(maxsize=None)
def _cheb_moment_inverse(n: int) -> np.ndarray:
    # subinterval integrals of T_j over [-1, 1] split into n equal parts, in x units
    edges = np.linspace(-1.0, 1.0, n + 1)
    a = np.empty((n, n))
    for j in range(n):
        e = np.zeros(j + 1)
        e[j] = 1.0
        anti = C.chebint(e)
        vals = C.chebval(edges, anti)
        a[:, j] = np.diff(vals)
    return np.linalg.inv(a)


def cheb_fit_increments(increments, t0, t1) -> ChebPoly:
    """Degree-(N-1) Chebyshev series whose subinterval integrals equal the increments."""
    inc = np.atleast_2d(np.asarray(increments, dtype=float))
    n = inc.shape[0]
    h = 0.5 * (t1 - t0)
    return ChebPoly(t0, t1, _cheb_moment_inverse(n) @ inc / h)
