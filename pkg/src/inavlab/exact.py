"""Exact rational polynomial algebra in the time variable ``t``.

Scalars are :class:`fractions.Fraction` (arbitrary precision, always in
lowest terms).  :class:`ScalarPoly` holds scalar coefficients, :class:`VecPoly`
holds 3-vector coefficients; index ``k`` is the coefficient of ``t**k``.
Both types are immutable and compare equal regardless of trailing zeros.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence, Union

Rational = Fraction
Number = Union[int, Fraction]
Vec3 = tuple  # tuple[Fraction, Fraction, Fraction]

_ZERO = Fraction(0)
_ZERO3 = (_ZERO, _ZERO, _ZERO)


def rat_arith(a: Number, b: Number, kind: str) -> Fraction:
    """Exact ``a (kind) b`` with ``kind`` one of add, sub, mul, div.

    Raises ZeroDivisionError on division by zero.
    """
    a, b = Fraction(a), Fraction(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        if b == 0:
            raise ZeroDivisionError(f"rational division of {a} by zero")
        return a / b
    raise ValueError(f"unknown arithmetic kind {kind!r}")


def vec(x: Iterable[Number]) -> Vec3:
    v = tuple(Fraction(c) for c in x)
    if len(v) != 3:
        raise ValueError("expected a 3-vector")
    return v


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(c: Number, a: Vec3) -> Vec3:
    return (c * a[0], c * a[1], c * a[2])


def vcross(a: Vec3, b: Vec3) -> Vec3:
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def vdot(a: Vec3, b: Vec3) -> Fraction:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def _strip(coefs: Sequence, zero) -> tuple:
    n = len(coefs)
    while n and coefs[n - 1] == zero:
        n -= 1
    return tuple(coefs[:n])


class ScalarPoly:
    """Polynomial in ``t`` with rational coefficients."""

    __slots__ = ("coefs",)

    def __init__(self, coefs: Iterable[Number] = ()):
        object.__setattr__(self, "coefs", tuple(Fraction(c) for c in coefs))

    def __setattr__(self, name, value):
        raise AttributeError("ScalarPoly is immutable")

    @property
    def degree(self) -> int:
        """Degree ignoring trailing zeros; -1 for the zero polynomial."""
        return len(_strip(self.coefs, _ZERO)) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coefs[k] if 0 <= k < len(self.coefs) else _ZERO

    def __len__(self) -> int:
        return len(self.coefs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScalarPoly):
            return NotImplemented
        return _strip(self.coefs, _ZERO) == _strip(other.coefs, _ZERO)

    def __hash__(self) -> int:
        return hash(_strip(self.coefs, _ZERO))

    def __repr__(self) -> str:
        return f"ScalarPoly({[str(c) for c in self.coefs]})"

    def __add__(self, other: "ScalarPoly") -> "ScalarPoly":
        n = max(len(self), len(other))
        return ScalarPoly(self[k] + other[k] for k in range(n))

    def __sub__(self, other: "ScalarPoly") -> "ScalarPoly":
        n = max(len(self), len(other))
        return ScalarPoly(self[k] - other[k] for k in range(n))

    def __neg__(self) -> "ScalarPoly":
        return ScalarPoly(-c for c in self.coefs)

    def scale(self, c: Number) -> "ScalarPoly":
        return ScalarPoly(c * x for x in self.coefs)

    def mul(self, other: "ScalarPoly", dmax: int | None = None) -> "ScalarPoly":
        if not self.coefs or not other.coefs:
            return ScalarPoly()
        n = len(self) + len(other) - 1
        if dmax is not None:
            n = min(n, dmax + 1)
        out = [_ZERO] * n
        for i, a in enumerate(self.coefs):
            if a == 0 or i >= n:
                continue
            for j, b in enumerate(other.coefs):
                if i + j >= n:
                    break
                out[i + j] += a * b
        return ScalarPoly(out)

    __mul__ = mul

    def truncate(self, dmax: int) -> "ScalarPoly":
        if dmax < 0:
            raise ValueError("dmax must be >= 0")
        return ScalarPoly(self.coefs[: dmax + 1])

    def integrate(self) -> "ScalarPoly":
        return ScalarPoly([_ZERO] + [c / (k + 1) for k, c in enumerate(self.coefs)])

    def derivative(self) -> "ScalarPoly":
        return ScalarPoly(k * c for k, c in enumerate(self.coefs) if k > 0)

    def __call__(self, t: Number):
        acc = _ZERO if isinstance(t, (int, Fraction)) else 0.0
        for c in reversed(self.coefs):
            acc = acc * t + c
        return acc

    def series_div(self, other: "ScalarPoly", n_terms: int) -> "ScalarPoly":
        """Power-series quotient ``self / other`` to ``n_terms`` coefficients.

        ``other[0]`` must be nonzero.
        """
        if other[0] == 0:
            raise ZeroDivisionError("series division needs a nonzero constant term")
        num = [self[k] for k in range(n_terms)]
        out = []
        for k in range(n_terms):
            c = num[k] / other[0]
            out.append(c)
            for j in range(1, n_terms - k):
                num[k + j] -= c * other[j]
        return ScalarPoly(out)


class VecPoly:
    """Polynomial in ``t`` whose coefficients are rational 3-vectors."""

    __slots__ = ("coefs",)

    def __init__(self, coefs: Iterable[Iterable[Number]] = ()):
        object.__setattr__(self, "coefs", tuple(vec(c) for c in coefs))

    def __setattr__(self, name, value):
        raise AttributeError("VecPoly is immutable")

    @classmethod
    def _raw(cls, coefs) -> "VecPoly":
        # coefficients already normalized to tuples of Fraction
        p = cls.__new__(cls)
        object.__setattr__(p, "coefs", tuple(coefs))
        return p

    @classmethod
    def from_components(cls, x: ScalarPoly, y: ScalarPoly, z: ScalarPoly) -> "VecPoly":
        n = max(len(x), len(y), len(z))
        return cls._raw((x[k], y[k], z[k]) for k in range(n))

    def component(self, axis: int) -> ScalarPoly:
        return ScalarPoly(c[axis] for c in self.coefs)

    @property
    def degree(self) -> int:
        return len(_strip(self.coefs, _ZERO3)) - 1

    def __getitem__(self, k: int) -> Vec3:
        return self.coefs[k] if 0 <= k < len(self.coefs) else _ZERO3

    def __len__(self) -> int:
        return len(self.coefs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VecPoly):
            return NotImplemented
        return _strip(self.coefs, _ZERO3) == _strip(other.coefs, _ZERO3)

    def __hash__(self) -> int:
        return hash(_strip(self.coefs, _ZERO3))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in c) + "]" for c in self.coefs)
        return f"VecPoly([{body}])"

    def is_zero(self) -> bool:
        return self.degree < 0

    def __add__(self, other: "VecPoly") -> "VecPoly":
        return vp_linear(self, other, 1)

    def __sub__(self, other: "VecPoly") -> "VecPoly":
        return vp_linear(self, other, -1)

    def __neg__(self) -> "VecPoly":
        return self.scale(-1)

    def scale(self, c: Number) -> "VecPoly":
        c = Fraction(c)
        return VecPoly._raw(vscale(c, x) for x in self.coefs)

    def cross(self, other: "VecPoly", dmax: int | None = None) -> "VecPoly":
        return vp_cross(self, other, dmax)

    def dot(self, other: "VecPoly", dmax: int | None = None) -> ScalarPoly:
        if not self.coefs or not other.coefs:
            return ScalarPoly()
        n = len(self) + len(other) - 1
        if dmax is not None:
            n = min(n, dmax + 1)
        out = [_ZERO] * n
        for i, a in enumerate(self.coefs):
            for j, b in enumerate(other.coefs):
                if i + j >= n:
                    break
                out[i + j] += vdot(a, b)
        return ScalarPoly(out)

    def mul_scalar(self, s: ScalarPoly, dmax: int | None = None) -> "VecPoly":
        """Product with a scalar polynomial."""
        if not self.coefs or not s.coefs:
            return VecPoly()
        n = len(self) + len(s) - 1
        if dmax is not None:
            n = min(n, dmax + 1)
        out = [_ZERO3] * n
        for i, c in enumerate(s.coefs):
            if c == 0:
                continue
            for j, v in enumerate(self.coefs):
                if i + j >= n:
                    break
                out[i + j] = vadd(out[i + j], vscale(c, v))
        return VecPoly._raw(out)

    def integrate(self) -> "VecPoly":
        return vp_integrate(self)

    def derivative(self) -> "VecPoly":
        return VecPoly._raw(vscale(k, c) for k, c in enumerate(self.coefs) if k > 0)

    def truncate(self, dmax: int) -> "VecPoly":
        return vp_truncate(self, dmax)

    def __call__(self, t: Number) -> Vec3:
        acc = _ZERO3
        for c in reversed(self.coefs):
            acc = vadd(vscale(t, acc), c)
        return acc


def vp_linear(p: VecPoly, q: VecPoly, c: Number) -> VecPoly:
    """Return ``p + c*q`` exactly."""
    c = Fraction(c)
    n = max(len(p), len(q))
    return VecPoly._raw(vadd(p[k], vscale(c, q[k])) for k in range(n))


def vp_cross(p: VecPoly, q: VecPoly, dmax: int | None = None) -> VecPoly:
    """Cross product; coefficient of ``t**k`` is the sum of ``p_i x q_j`` over ``i+j=k``."""
    if not p.coefs or not q.coefs:
        return VecPoly()
    n = len(p) + len(q) - 1
    if dmax is not None:
        n = min(n, dmax + 1)
    out = [_ZERO3] * n
    for i, a in enumerate(p.coefs):
        if a == _ZERO3:
            continue
        for j, b in enumerate(q.coefs):
            if i + j >= n:
                break
            out[i + j] = vadd(out[i + j], vcross(a, b))
    return VecPoly._raw(out)


def vp_integrate(p: VecPoly) -> VecPoly:
    """Antiderivative with zero constant term."""
    if not p.coefs:
        return VecPoly()
    return VecPoly._raw([_ZERO3] + [vscale(Fraction(1, k + 1), c) for k, c in enumerate(p.coefs)])


def vp_truncate(p: VecPoly, dmax: int) -> VecPoly:
    if dmax < 0:
        raise ValueError("dmax must be >= 0")
    return VecPoly._raw(p.coefs[: dmax + 1])


def sp_compose_vec(series: ScalarPoly, p: VecPoly, dmax: int) -> ScalarPoly:
    """Substitute ``s = p.p`` into ``sum_k series[k] * s**k``, truncated at ``t**dmax``."""
    s2 = p.dot(p, dmax)
    out = ScalarPoly([series[0]])
    power = ScalarPoly([1])
    for k in range(1, len(series)):
        power = power.mul(s2, dmax)
        if power.degree < 0:
            break
        out = out + power.scale(series[k])
    return out.truncate(dmax)


# Trigonometric coefficient series, as power series in sigma**2.
# Built from exact sin/cos series by series division.

def _sin_series(n: int) -> ScalarPoly:
    # sin(x)/x in powers of x**2
    return ScalarPoly(Fraction((-1) ** k, factorial(2 * k + 1)) for k in range(n))


def _one_minus_cos_series(n: int) -> ScalarPoly:
    # (1 - cos x)/x**2 in powers of x**2
    return ScalarPoly(Fraction((-1) ** k, factorial(2 * k + 2)) for k in range(n))


def sinc_series(n_terms: int) -> ScalarPoly:
    """``sin(s)/s`` as a series in ``s**2``."""
    return _sin_series(n_terms)


def one_minus_cos_series(n_terms: int) -> ScalarPoly:
    """``(1 - cos s)/s**2`` as a series in ``s**2``."""
    return _one_minus_cos_series(n_terms)


def one_minus_sinc_series(n_terms: int) -> ScalarPoly:
    """``(1 - sin(s)/s)/s**2`` as a series in ``s**2``."""
    return ScalarPoly(Fraction((-1) ** k, factorial(2 * k + 3)) for k in range(n_terms))


def bortz_series(n_terms: int) -> ScalarPoly:
    """``(1 - s sin s / (2 (1 - cos s))) / s**2`` as a series in ``s**2``.

    Computed as ``(1/s**2) * (1 - (sin(s)/s) / (2 (1-cos s)/s**2))``.
    """
    ratio = _sin_series(n_terms + 1).series_div(_one_minus_cos_series(n_terms + 1).scale(2), n_terms + 1)
    bracket = ScalarPoly([1]) - ratio
    # bracket[0] == 0; dividing by s**2 shifts down by one
    return ScalarPoly(bracket.coefs[1 : n_terms + 1])


def series_terms_for_order(order: int) -> int:
    """Number of ``s**2`` terms in a Taylor expansion in ``s`` of the given order.

    ``order`` counts terms the MATLAB way: order 8 keeps powers ``s**0 .. s**7``.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    return (order + 1) // 2


def fmt_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
