"""Exact polynomial forms of the attitude and velocity algorithms.

Every algorithm is expressed as a :class:`~inavlab.exact.VecPoly` in ``t``
built from the polynomial angular velocity ``omega(t)`` and specific force
``f(t)``.  Comparing these polynomials with the functional-iteration
reference gives the local error order of each algorithm exactly.

Closed forms are used for linear motion (``omega = a_w + b_w t``,
``f = a_f + b_f t``).  The ``*_integral`` functions give the same quantities
from their defining integrals for polynomial motion of any degree, and double
as an independent check on the closed forms.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import (
    ScalarPoly,
    VecPoly,
    bortz_series,
    fmt_rational,
    one_minus_cos_series,
    one_minus_sinc_series,
    series_terms_for_order,
    sinc_series,
    sp_compose_vec,
    vadd,
    vcross,
    vdot,
    vec,
    vscale,
)

DEFAULT_DMAX = 8
BORTZ_ORDER = 8

_ZERO3 = (Fraction(0),) * 3


@dataclass(frozen=True)
class MotionCoefficients:
    """Polynomial body motion: ``omega(t) = sum omega[k] t**k``, same for ``force``.

    Units are rad/s (and rad/s**(k+1)) for ``omega``, m/s**2 (m/s**(k+2)) for
    ``force``.
    """

    omega: tuple = ()
    force: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "omega", tuple(vec(c) for c in self.omega))
        object.__setattr__(self, "force", tuple(vec(c) for c in self.force))

    @classmethod
    def linear(cls, a_w, b_w, a_f=(0, 0, 0), b_f=(0, 0, 0)) -> "MotionCoefficients":
        return cls((a_w, b_w), (a_f, b_f))

    def _coef(self, seq, k):
        return seq[k] if k < len(seq) else _ZERO3

    @property
    def a_w(self):
        return self._coef(self.omega, 0)

    @property
    def b_w(self):
        return self._coef(self.omega, 1)

    @property
    def a_f(self):
        return self._coef(self.force, 0)

    @property
    def b_f(self):
        return self._coef(self.force, 1)

    @property
    def is_linear(self) -> bool:
        return all(c == _ZERO3 for c in self.omega[2:] + self.force[2:])

    @property
    def omega_poly(self) -> VecPoly:
        return VecPoly(self.omega)

    @property
    def force_poly(self) -> VecPoly:
        return VecPoly(self.force)

    def scaled(self, omega_scale, force_scale=1) -> "MotionCoefficients":
        s, g = Fraction(omega_scale), Fraction(force_scale)
        return MotionCoefficients(
            tuple(vscale(s, c) for c in self.omega), tuple(vscale(g, c) for c in self.force)
        )


# Values used for Tables I and II.
EXAMPLE_MOTION = MotionCoefficients.linear((4, 2, 3), (5, 8, 10), (4, 5, 6), (9, 8, 7))


@dataclass(frozen=True)
class ErrorOrderReport:
    candidate: str
    reference: str
    order: int | None  # None when identical up to the degree cap
    delta: tuple = _ZERO3

    @property
    def identical(self) -> bool:
        return self.order is None


@dataclass
class CoefficientTable:
    title: str
    rows: dict = field(default_factory=dict)  # label -> list of 8 Fractions
    component: int = 0

    def __post_init__(self):
        for label, row in self.rows.items():
            if len(row) != DEFAULT_DMAX:
                raise ValueError(f"row {label!r} must have {DEFAULT_DMAX} entries")

    def as_strings(self) -> dict:
        return {label: [fmt_rational(c) for c in row] for label, row in self.rows.items()}


# --------------------------------------------------------------------------
# attitude


def _alpha(mc: MotionCoefficients) -> VecPoly:
    return mc.omega_poly.integrate()


def _velocity_increment(mc: MotionCoefficients) -> VecPoly:
    return mc.force_poly.integrate()


def sigma_traditional(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Rotation vector from the simplified Goodman-Robinson equation."""
    if not mc.is_linear:
        return sigma_traditional_integral(mc, dmax)
    a, b = mc.a_w, mc.b_w
    return VecPoly([_ZERO3, a, vscale(Fraction(1, 2), b), vscale(Fraction(1, 12), vcross(a, b))])


def sigma_traditional_integral(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """``int (omega + alpha x omega / 2) dt`` for arbitrary polynomial omega."""
    w = mc.omega_poly
    alpha = w.integrate()
    return (w + alpha.cross(w, dmax).scale(Fraction(1, 2))).integrate().truncate(dmax)


def enhanced_attitude_correction(mc: MotionCoefficients) -> VecPoly:
    """Closed-form compensation ``delta sigma`` for linear angular velocity."""
    a, b = mc.a_w, mc.b_w
    ab = vcross(a, b)
    c5 = vadd(vcross(ab, b), vscale(Fraction(1, 3), vcross(a, vcross(ab, a))))
    c6 = vadd(vcross(a, vcross(ab, b)), vscale(Fraction(1, 2), vcross(b, vcross(ab, a))))
    c7 = vadd(vcross(b, vcross(ab, b)), vscale(Fraction(1, 6), vcross(ab, vcross(ab, a))))
    c8 = vcross(ab, vcross(ab, b))
    return VecPoly(
        [_ZERO3] * 5
        + [
            vscale(Fraction(1, 240), c5),
            vscale(Fraction(1, 864), c6),
            vscale(Fraction(1, 2016), c7),
            vscale(Fraction(1, 13824), c8),
        ]
    )


def sigma_enhanced(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Traditional rotation vector plus the enhanced compensation term."""
    if not mc.is_linear:
        return sigma_enhanced_integral(mc, dmax)
    return (sigma_traditional(mc) + enhanced_attitude_correction(mc)).truncate(dmax)


def sigma_enhanced_integral(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Integrate the Bortz right side with the traditional vector substituted and 1/12 bracket."""
    w = mc.omega_poly
    st = sigma_traditional_integral(mc, dmax)
    integrand = (
        w
        + st.cross(w, dmax).scale(Fraction(1, 2))
        + st.cross(st.cross(w, dmax), dmax).scale(Fraction(1, 12))
    )
    return integrand.truncate(dmax - 1).integrate()


def fiter_attitude_step(
    sigma: VecPoly, w: VecPoly, dmax: int = DEFAULT_DMAX, bortz_order: int = BORTZ_ORDER
) -> VecPoly:
    """One Picard pass on the exact rotation-vector equation.

    The integrand is expanded to order ``dmax`` in ``t`` (degrees below
    ``dmax``) and integrated, so the result has degree ``dmax``.
    """
    d = dmax - 1
    bracket = sp_compose_vec(bortz_series(series_terms_for_order(bortz_order)), sigma, d)
    sxw = sigma.cross(w, d)
    integrand = w + sxw.scale(Fraction(1, 2)) + sigma.cross(sxw, d).mul_scalar(bracket, d)
    return integrand.truncate(d).integrate()


def sigma_fiter_iterates(
    mc: MotionCoefficients, iterations: int, dmax: int = DEFAULT_DMAX, bortz_order: int = BORTZ_ORDER
) -> list:
    """All Picard iterates ``sigma^(1) .. sigma^(iterations)`` starting from zero."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if dmax < 2:
        raise ValueError("dmax must be >= 2")
    w = mc.omega_poly
    sigma, out = VecPoly(), []
    for _ in range(iterations):
        sigma = fiter_attitude_step(sigma, w, dmax, bortz_order)
        out.append(sigma)
    return out


def sigma_fiter(
    mc: MotionCoefficients, iterations: int = 8, dmax: int = DEFAULT_DMAX, bortz_order: int = BORTZ_ORDER
) -> VecPoly:
    return sigma_fiter_iterates(mc, iterations, dmax, bortz_order)[-1]


def sigma_fiter_converged(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Iterate to the exact fixed point (at most ``dmax + 1`` passes are needed)."""
    w = mc.omega_poly
    sigma = VecPoly()
    for _ in range(dmax + 2):
        nxt = fiter_attitude_step(sigma, w, dmax)
        if nxt == sigma:
            return nxt
        sigma = nxt
    return sigma


# --------------------------------------------------------------------------
# velocity


def u_first_order(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """``int (I + alpha x) f dt``."""
    if not mc.is_linear:
        return u_first_order_integral(mc, dmax)
    aw, bw, af, bf = mc.a_w, mc.b_w, mc.a_f, mc.b_f
    half, third, eighth = Fraction(1, 2), Fraction(1, 3), Fraction(1, 8)
    v = _velocity_increment(mc)
    extra = VecPoly(
        [
            _ZERO3,
            _ZERO3,
            vscale(half, vcross(aw, af)),
            vscale(third, vadd(vscale(half, vcross(bw, af)), vcross(aw, bf))),
            vscale(eighth, vcross(bw, bf)),
        ]
    )
    return (v + extra).truncate(dmax)


def u_first_order_integral(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    f = mc.force_poly
    return (f + _alpha(mc).cross(f, dmax)).truncate(dmax - 1).integrate()


def _second_order_term(mc: MotionCoefficients, dmax: int) -> VecPoly:
    alpha, v = _alpha(mc), _velocity_increment(mc)
    return alpha.cross(alpha.cross(v, dmax), dmax).scale(Fraction(1, 6))


def u_second_order(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """First-order form plus ``alpha x (alpha x v) / 6``."""
    return (u_first_order(mc, dmax) + _second_order_term(mc, dmax)).truncate(dmax)


def delta_v1(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Implicit error of the first-order velocity correction (linear closed form)."""
    if not mc.is_linear:
        return delta_v1_integral(mc, dmax)
    ab = vcross(mc.a_w, mc.b_w)
    return VecPoly(
        [_ZERO3] * 4
        + [vscale(Fraction(1, 48), vcross(ab, mc.a_f)), vscale(Fraction(1, 60), vcross(ab, mc.b_f))]
    ).truncate(dmax)


def delta_v1_integral(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """``int (sigma_traditional - alpha) x f dt``."""
    st = sigma_traditional_integral(mc, dmax)
    return (st - _alpha(mc)).cross(mc.force_poly, dmax).truncate(dmax - 1).integrate()


def delta_v2(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Implicit error of the second-order velocity correction (linear closed form)."""
    if not mc.is_linear:
        return delta_v2_integral(mc, dmax)
    aw, bw, af, bf = mc.a_w, mc.b_w, mc.a_f, mc.b_f
    X = vcross
    ab = X(aw, bw)

    def total(*terms):
        acc = _ZERO3
        for t in terms:
            acc = vadd(acc, t)
        return acc

    c4 = total(vscale(2, X(aw, X(aw, bf))), vscale(-1, X(aw, X(bw, af))), vscale(-1, X(bw, X(aw, af))))
    c5 = total(
        X(aw, X(bw, bf)),
        X(aw, X(ab, af)),
        X(bw, X(aw, bf)),
        vscale(-2, X(bw, X(bw, af))),
        X(ab, X(aw, af)),
    )
    c6 = total(
        X(aw, X(ab, bf)),
        vscale(Fraction(1, 2), X(bw, X(ab, af))),
        X(ab, X(aw, bf)),
        vscale(Fraction(1, 2), X(ab, X(bw, af))),
    )
    c7 = total(X(bw, X(ab, bf)), X(ab, X(bw, bf)), vscale(Fraction(1, 6), X(ab, X(ab, af))))
    c8 = X(ab, X(ab, bf))
    return VecPoly(
        [_ZERO3] * 4
        + [
            vscale(Fraction(1, 48), c4),
            vscale(Fraction(1, 120), c5),
            vscale(Fraction(1, 144), c6),
            vscale(Fraction(1, 336), c7),
            vscale(Fraction(1, 2304), c8),
        ]
    ).truncate(dmax)


def delta_v2_integral(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """``1/2 int st x (st x f) dt - alpha x (alpha x v) / 6``."""
    st = sigma_traditional_integral(mc, dmax)
    f = mc.force_poly
    main = st.cross(st.cross(f, dmax), dmax).scale(Fraction(1, 2)).truncate(dmax - 1).integrate()
    return (main - _second_order_term(mc, dmax)).truncate(dmax)


def u_enhanced(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """Enhanced second-order form: second order plus both implicit-error terms."""
    return (u_second_order(mc, dmax) + delta_v1(mc, dmax) + delta_v2(mc, dmax)).truncate(dmax)


def u_enhanced_first(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    return (u_first_order(mc, dmax) + delta_v1(mc, dmax)).truncate(dmax)


def velocity_translation_vector(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """``eta = v + 1/2 int (alpha x f - omega x v) dt``."""
    f, w = mc.force_poly, mc.omega_poly
    alpha, v = _alpha(mc), _velocity_increment(mc)
    inner = alpha.cross(f, dmax) - w.cross(v, dmax)
    return (v + inner.truncate(dmax - 1).integrate().scale(Fraction(1, 2))).truncate(dmax)


def u_viagen(mc: MotionCoefficients, trig_order: int = 8, dmax: int = DEFAULT_DMAX) -> VecPoly:
    """ViaGen transformed specific-force integral.

    ``trig_order == 1`` uses the constant coefficients 1/2 and 1/6 and keeps
    the polynomial up to ``dmax``.  For ``trig_order > 1`` the expression with
    the exact trigonometric coefficients is Taylor-expanded in ``t`` to that
    order, i.e. powers ``t**0 .. t**(trig_order-1)``.
    """
    if trig_order < 1:
        raise ValueError("trig_order must be >= 1")
    st = sigma_traditional(mc, dmax)
    eta = velocity_translation_vector(mc, dmax)
    if trig_order == 1:
        c1, c2 = ScalarPoly([Fraction(1, 2)]), ScalarPoly([Fraction(1, 6)])
        d = dmax
    else:
        d = min(dmax, trig_order - 1)
        n = d // 2 + 1
        c1 = sp_compose_vec(one_minus_cos_series(n), st, d)
        c2 = sp_compose_vec(one_minus_sinc_series(n), st, d)
    sxe = st.cross(eta, d)
    out = eta + sxe.mul_scalar(c1, d) + st.cross(sxe, d).mul_scalar(c2, d)
    return out.truncate(d)


def u_fiter(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX, sigma: VecPoly | None = None) -> VecPoly:
    """Exact transformed specific-force integral using the converged rotation vector."""
    if sigma is None:
        sigma = sigma_fiter_converged(mc, dmax)
    f = mc.force_poly
    d = dmax - 1
    n = d // 2 + 1
    s1 = sp_compose_vec(sinc_series(n), sigma, d)
    c1 = sp_compose_vec(one_minus_cos_series(n), sigma, d)
    sxf = sigma.cross(f, d)
    integrand = f + sxf.mul_scalar(s1, d) + sigma.cross(sxf, d).mul_scalar(c1, d)
    return integrand.truncate(d).integrate()


# --------------------------------------------------------------------------
# comparison and tables


def error_order(candidate: VecPoly, reference: VecPoly, candidate_label: str = "", reference_label: str = "") -> ErrorOrderReport:
    """Lowest power of ``t`` whose vector coefficients differ."""
    n = max(len(candidate), len(reference))
    for k in range(n):
        if candidate[k] != reference[k]:
            delta = tuple(c - r for c, r in zip(candidate[k], reference[k]))
            return ErrorOrderReport(candidate_label, reference_label, k, delta)
    return ErrorOrderReport(candidate_label, reference_label, None)


def error_order_pattern(mc: MotionCoefficients, dmax: int = DEFAULT_DMAX) -> dict:
    """Error orders of every algorithm against the functional-iteration reference."""
    sig_ref = sigma_fiter_converged(mc, dmax)
    u_ref = u_fiter(mc, dmax, sig_ref)
    cases = {
        "attitude/Typical": (sigma_traditional(mc, dmax).truncate(dmax), sig_ref),
        "attitude/Enhanced": (sigma_enhanced(mc, dmax), sig_ref),
        "velocity/Typical": (u_second_order(mc, dmax), u_ref),
        "velocity/Enhanced": (u_enhanced(mc, dmax), u_ref),
        "velocity/ViaGen-8": (u_viagen(mc, 8, dmax), u_ref),
        "velocity/ViaGen-1": (u_viagen(mc, 1, dmax), u_ref),
    }
    return {
        label: error_order(cand, ref, label.split("/")[1], "FIterTrue").order
        for label, (cand, ref) in cases.items()
    }


REFERENCE_ORDER_PATTERN = {
    "attitude/Typical": 5,
    "attitude/Enhanced": 6,
    "velocity/Typical": 4,
    "velocity/Enhanced": 4,
    "velocity/ViaGen-8": 5,
    "velocity/ViaGen-1": 4,
}


def expected_order_pattern(mc: MotionCoefficients) -> dict:
    """Order pattern including the two measure-zero degeneracies of linear motion.

    ``a_w . b_w = 0`` removes the enhanced attitude t^6 error term and
    ``a_w x a_f = 0`` removes the t^4 velocity error of the enhanced and
    constant-coefficient ViaGen forms.
    """
    out = dict(REFERENCE_ORDER_PATTERN)
    if vdot(mc.a_w, mc.b_w) == 0:
        out["attitude/Enhanced"] = 7
    if vcross(mc.a_w, mc.a_f) == _ZERO3:
        out["velocity/Enhanced"] = 5
        out["velocity/ViaGen-1"] = 5
    return out


def random_motion(rng: random.Random, low: int = -10, high: int = 10, degree: int = 1) -> MotionCoefficients:
    """Random integer motion with non-parallel leading angular coefficients."""
    while True:
        omega = [tuple(rng.randint(low, high) for _ in range(3)) for _ in range(degree + 1)]
        force = [tuple(rng.randint(low, high) for _ in range(3)) for _ in range(degree + 1)]
        mc = MotionCoefficients(omega, force)
        if vcross(mc.a_w, mc.b_w) != _ZERO3:
            return mc


def random_order_check(trials: int, seed: int = 0, degree: int = 1) -> list:
    """Run :func:`error_order_pattern` on random integer motions; return (mc, pattern) pairs."""
    rng = random.Random(seed)
    return [(mc, error_order_pattern(mc)) for mc in (random_motion(rng, degree=degree) for _ in range(trials))]


def _row(p: VecPoly, component: int) -> list:
    return [p[k][component] for k in range(1, DEFAULT_DMAX + 1)]


def emit_tables(mc: MotionCoefficients = EXAMPLE_MOTION, component: int = 0) -> tuple:
    """Attitude and velocity coefficient tables: rows are algorithms, columns powers t..t^8."""
    t1 = CoefficientTable("Polynomial coefficients of attitude computation", component=component)
    t1.rows["Typical"] = _row(sigma_traditional(mc), component)
    t1.rows["Enhanced"] = _row(sigma_enhanced(mc), component)
    iterates = [_row(s, component) for s in sigma_fiter_iterates(mc, 8)]
    # merge a run of identical trailing iterates into one "l=a,b,..." row
    first_same = len(iterates) - 1
    while first_same > 0 and iterates[first_same - 1] == iterates[-1]:
        first_same -= 1
    for l, row in enumerate(iterates[:first_same], start=1):
        t1.rows[f"FIterTrue (l={l})"] = row
    tail = ",".join(str(l) for l in range(first_same + 1, len(iterates) + 1))
    t1.rows[f"FIterTrue (l={tail})"] = iterates[-1]

    t2 = CoefficientTable("Polynomial coefficients of velocity computation of u", component=component)
    t2.rows["Typical"] = _row(u_second_order(mc), component)
    t2.rows["Enhanced"] = _row(u_enhanced(mc), component)
    t2.rows["ViaGen-1"] = _row(u_viagen(mc, 1), component)
    t2.rows["ViaGen-8"] = _row(u_viagen(mc, 8), component)
    t2.rows["FIterTrue"] = _row(u_fiter(mc), component)
    return t1, t2


def format_table_text(table: CoefficientTable) -> str:
    rows = table.as_strings()
    head = [""] + [f"t^{k}" if k > 1 else "t" for k in range(1, DEFAULT_DMAX + 1)]
    body = [[label] + cells for label, cells in rows.items()]
    widths = [max(len(r[i]) for r in [head] + body) for i in range(len(head))]
    lines = [table.title]
    for r in [head] + body:
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(r, widths))).rstrip())
    return "\n".join(lines)


def format_table_csv(table: CoefficientTable) -> str:
    lines = ["row," + ",".join(f"t{k}" for k in range(1, DEFAULT_DMAX + 1))]
    for label, cells in table.as_strings().items():
        lines.append(f'"{label}",' + ",".join(cells))
    return "\n".join(lines) + "\n"
