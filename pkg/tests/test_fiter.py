from fractions import Fraction as F

import numpy as np
import pytest
from conftest import as_float, exact_batch

from inavlab.earth import EarthModel, NavState
from inavlab.fiter import FiterConfig, _bortz, attitude_fiter, fiter_step, velocity_position_fiter
from inavlab.navcore import principal_angle, quat_conj, quat_from_rotvec, quat_mul
from inavlab.scenario import ScenarioConfig, initial_state, synth_imu, truth_at
from inavlab.strapdown import VARIANTS, BodyIntegrals, ImuBatch, strapdown_step
from inavlab.symbolic import EXAMPLE_MOTION, MotionCoefficients, sigma_fiter_converged, u_fiter

INERTIAL = EarthModel(rate=0.0, radius=1e300, gravity=0.0)
WIDE = FiterConfig(
    attitude_degree=12, velocity_degree=12, position_degree=13, max_attitude_iterations=30, max_velocity_iterations=30
)


def rel(a, b):
    return np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(b)


def test_config_resolution_and_validation():
    c = FiterConfig().resolved(4)
    assert (c.max_attitude_iterations, c.max_velocity_iterations) == (5, 5)
    assert (c.fit_degree, c.attitude_degree, c.velocity_degree, c.position_degree) == (3, 8, 8, 9)
    assert c.tolerance == 1e-16
    with pytest.raises(ValueError):
        FiterConfig(tolerance=0)
    with pytest.raises(ValueError):
        FiterConfig(attitude_degree=0)


def test_constant_rate_exact_first_iteration():
    b = ImuBatch(np.tile([0.01, -0.02, 0.005], (2, 1)), np.zeros((2, 3)), 0.02)
    sol = attitude_fiter(b)
    np.testing.assert_allclose(sol.sigma(0.02), [0.02, -0.04, 0.01], atol=1e-18)
    np.testing.assert_allclose(sol.sigma(0.01), [0.01, -0.02, 0.005], atol=1e-18)
    # iterate 2 reproduces iterate 1 exactly
    assert sol.attitude_converged and sol.attitude_iterations == 2 and sol.attitude_residual == 0.0


def test_bortz_bracket_values():
    # four-term series; the first omitted term is s^8/47900160
    s2 = np.array([0.0, 0.01])
    s = 0.1
    exact = (1 - s * np.sin(s) / (2 * (1 - np.cos(s)))) / s**2
    np.testing.assert_allclose(_bortz(s2, 8), [1 / 12, exact], rtol=1e-10)


@pytest.mark.parametrize("T", [0.02, 0.005])
def test_attitude_matches_symbolic(T):
    batch, Tf = exact_batch(EXAMPLE_MOTION, T, 2)
    sol = attitude_fiter(batch, WIDE)
    assert rel(sol.sigma(float(Tf)), as_float(sigma_fiter_converged(EXAMPLE_MOTION, 12)(Tf))) < 1e-12


def test_scaled_motion_monomial_coefficients():
    mc = EXAMPLE_MOTION.scaled(F(1, 1000))
    batch, _ = exact_batch(mc, 1, 2)
    # degree 8 suffices at this scale and keeps the monomial conversion well conditioned
    sol = attitude_fiter(batch, FiterConfig(attitude_degree=8, max_attitude_iterations=30))
    mono = sol.sigma.to_monomial()
    ref = sigma_fiter_converged(mc, 12)
    scale = np.linalg.norm(sol.sigma(1.0))
    # higher coefficients are below the conditioning of the Chebyshev-to-monomial map
    for k in range(1, 6):
        assert np.linalg.norm(mono[k] - as_float(ref[k])) < 1e-12 * scale, k
    for t in (0.25, 0.5, 1.0):
        assert rel(sol.sigma(t), as_float(ref(F(t)))) < 1e-12


def test_velocity_matches_symbolic_inertial():
    batch, Tf = exact_batch(EXAMPLE_MOTION, 0.01, 2)
    sol = velocity_position_fiter(batch, attitude_fiter(batch, WIDE), NavState(), WIDE, INERTIAL)
    assert rel(sol.velocity(float(Tf)), as_float(u_fiter(EXAMPLE_MOTION, 12)(Tf))) < 1e-12


def test_constant_force_no_rotation():
    b = ImuBatch(np.zeros((2, 3)), np.tile([0.1, 0.2, 0.3], (2, 1)), 0.02)
    q0 = quat_from_rotvec([0.1, 0.2, -0.3])
    s = NavState(q=q0, v=np.array([1.0, 0.0, 0.0]))
    new, sol = fiter_step(s, b, FiterConfig(), INERTIAL)
    from inavlab.navcore import dcm_from_quat

    np.testing.assert_allclose(new.v, s.v + dcm_from_quat(q0) @ [0.2, 0.4, 0.6], atol=1e-15)


def test_free_fall():
    e = EarthModel(rate=0.0)
    b = ImuBatch(np.zeros((2, 3)), np.zeros((2, 3)), 0.02)
    new, _ = fiter_step(NavState(), b, FiterConfig(), e)
    assert new.v[1] == pytest.approx(-9.8 * 0.02, abs=1e-12)
    assert new.h == pytest.approx(-0.5 * 9.8 * 0.02**2, abs=1e-12)


def _coning_interval(fc):
    cfg = ScenarioConfig(fc=fc, earth=INERTIAL)
    b = synth_imu(cfg, 0.3)
    q0, q1 = truth_at(cfg, 0.3).q_bn, truth_at(cfg, 0.32).q_bn
    truth = quat_mul(quat_conj(q0), q1)
    fit = principal_angle(quat_from_rotvec(attitude_fiter(b).sigma(b.T)), truth)
    trad = principal_angle(quat_from_rotvec(BodyIntegrals.from_batch(b).sigma_traditional()), truth)
    return fit, trad


@pytest.mark.parametrize("fc", [0.037, 0.185])
def test_coning_single_interval_accuracy(fc):
    fit, trad = _coning_interval(fc)
    assert fit < 1e-12
    assert fit <= trad


@pytest.mark.xfail(strict=True, reason="two-sample fitting error is shared with the traditional algorithm")
def test_coning_single_interval_beats_traditional_by_1e3():
    fit, trad = _coning_interval(1.0)
    assert fit * 1e3 < trad


def test_residuals_non_increasing():
    batch, _ = exact_batch(EXAMPLE_MOTION.scaled(F(1, 10)), 0.05, 2)
    res = []
    for m in range(1, 9):
        sol = attitude_fiter(batch, FiterConfig(max_attitude_iterations=m, attitude_degree=12))
        res.append(sol.attitude_residual)
    assert all(b <= a for a, b in zip(res[1:], res[2:]))


def _doubling_change(fc, starts=np.linspace(0.0, 10.0, 12)):
    cfg = ScenarioConfig(fc=fc)
    worst = 0.0
    for t0 in starts:
        b = synth_imu(cfg, t0)
        base = attitude_fiter(b, FiterConfig(max_attitude_iterations=20))
        wide = attitude_fiter(b, FiterConfig(max_attitude_iterations=20, attitude_degree=8))
        assert base.attitude_converged and wide.attitude_converged
        worst = max(worst, np.linalg.norm(base.sigma(b.T) - wide.sigma(b.T)))
    return worst


@pytest.mark.parametrize("fc", [0.037, 0.185])
def test_truncation_doubling_invariance(fc):
    assert _doubling_change(fc) < 1e-14


@pytest.mark.xfail(strict=True, reason="degree-4 attitude truncation drops a ~1e-12 T_5 term at 1 Hz")
def test_truncation_doubling_invariance_1hz():
    assert _doubling_change(1.0) < 1e-14


def test_defining_integral_equation():
    """Substituting the solution into the right side reproduces it."""
    batch, Tf = exact_batch(EXAMPLE_MOTION.scaled(F(1, 10)), 0.05, 2)
    sol = attitude_fiter(batch, WIDE)
    w = BodyIntegrals.from_batch(batch).omega
    t, wts = np.polynomial.legendre.leggauss(20)
    T = float(Tf)
    tt = 0.5 * T * (t + 1)
    W = (tt[:, None] ** np.arange(w.shape[0])) @ w
    S = sol.sigma(tt)
    sxw = np.cross(S, W)
    rhs = W + 0.5 * sxw + _bortz(np.sum(S * S, axis=1), 8)[:, None] * np.cross(S, sxw)
    integral = 0.5 * T * (wts @ rhs)
    assert np.abs(integral - sol.sigma(T)).max() < 1e-15


def test_solution_fields_and_flags():
    cfg = ScenarioConfig(fc=0.037)
    new, sol = fiter_step(initial_state(cfg), synth_imu(cfg, 0.0), FiterConfig(), cfg.earth)
    assert sol.attitude_iterations <= 3 and sol.velocity_iterations <= 3
    assert sol.converged == (sol.attitude_converged and sol.velocity_converged)
    if not sol.converged:
        assert max(sol.attitude_residual, sol.velocity_residual) > 1e-16
    assert sol.position.coef.shape[1] == 3 and sol.sigma_n is not None
    assert abs(np.linalg.norm(new.q) - 1) < 1e-15
