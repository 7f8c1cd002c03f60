"""Jacobi theta functions as t-series in a nilpotent root.

The elliptic variable enters through ``e^{2 pi i v} -> e^z`` for a degree-2
nilpotent ``z``; ``sin(pi v)`` becomes ``sinh(z/2)`` and ``cos(pi v)`` becomes
``cosh(z/2)``, with the factor 2 of the prefactor kept and the constants
``pi`` and ``sqrt(-1)`` absorbed.  All coefficients therefore stay rational.

With ``t = q^(1/8)``::

    theta (z) = 2 t sinh(z/2) prod_j (1-q^j)(1-q^j e^z)(1-q^j e^-z)
    theta1(z) = 2 t cosh(z/2) prod_j (1-q^j)(1+q^j e^z)(1+q^j e^-z)
    theta2(z) =               prod_j (1-q^j)(1-q^(j-1/2) e^z)(1-q^(j-1/2) e^-z)
    theta3(z) =               prod_j (1-q^j)(1+q^(j-1/2) e^z)(1+q^(j-1/2) e^-z)
"""
from __future__ import annotations

from typing import Callable, Sequence

from .algebra import (
    CycOctic,
    DomainError,
    FormPolynomial,
    FormQSeries,
    Generator,
    PolyRing,
    Rational,
    poly_from_univariate,
    q_cap,
    series_divide,
    series_exp,
    series_invert,
    series_log,
    u_cosh,
    u_exp_series,
    u_sinh,
    u_sinh_over_z,
)

THETA_KINDS = ("theta", "theta1", "theta2", "theta3")


class TransformCheckError(AssertionError):
    """A T-transformation law failed; carries the first differing t-exponent."""

    def __init__(self, kind: str, exponent: int):
        super().__init__(f"T-transformation of {kind} fails at t^{exponent}")
        self.kind = kind
        self.exponent = exponent


def _terms(ring: PolyRing) -> int:
    return ring.cap // 2 + 2


def _check_root(z: FormPolynomial):
    if z.constant():
        raise DomainError("theta argument must be nilpotent")


def _product_body(z: FormPolynomial, tcap: int, sign: int, half: bool) -> FormQSeries:
    """prod_j (1-q^j)(1 + sign e^z q^e_j)(1 + sign e^-z q^e_j), e_j = j or j-1/2."""
    ring = z.ring
    n = _terms(ring)
    ez = poly_from_univariate(z, u_exp_series(n))
    emz = poly_from_univariate(z, u_exp_series(n, -1))
    one = ring.one()
    body = FormQSeries.one(ring, tcap)
    j = 1
    while True:
        e = 8 * j - 4 if half else 8 * j
        if e > tcap:
            break
        # (1 + s e^z x)(1 + s e^-z x) = 1 + s (e^z + e^-z) x + x^2
        factor = {0: one, e: (ez + emz).scale(sign)}
        if 2 * e <= tcap:
            factor[2 * e] = one
        body = body * FormQSeries(ring, tcap, factor)
        if 8 * j <= tcap:
            body = body * FormQSeries.from_rationals(ring, tcap, {0: 1, 8 * j: -1})
        j += 1
    return body


def _theta(kind: str, z: FormPolynomial, tcap: int) -> FormQSeries:
    _check_root(z)
    n = _terms(z.ring)
    if kind == "theta":
        pref = poly_from_univariate(z, u_sinh(n, Rational(1, 2))).scale(2)
        return (_product_body(z, tcap, -1, False) * pref).shift(1)
    if kind == "theta1":
        pref = poly_from_univariate(z, u_cosh(n, Rational(1, 2))).scale(2)
        return (_product_body(z, tcap, 1, False) * pref).shift(1)
    if kind == "theta2":
        return _product_body(z, tcap, -1, True)
    if kind == "theta3":
        return _product_body(z, tcap, 1, True)
    raise ValueError(f"unknown theta kind {kind!r}")


def theta_series(kind: str, z: FormPolynomial, q_order: int) -> FormQSeries:
    """One of the four theta functions at the nilpotent root ``z``."""
    if q_order < 1:
        raise ValueError("q_order must be at least 1")
    return _theta(kind, z, q_cap(q_order))


def theta_prime_at_zero(ring: PolyRing, q_order: int) -> FormQSeries:
    """z-derivative of theta at z = 0, as a constant series in ``ring``.

    Computed by expanding theta over an auxiliary degree-2 generator and
    reading off its linear coefficient.
    """
    aux = PolyRing([Generator("w", 2)], 2)
    th = _theta("theta", aux.gen("w"), q_cap(q_order))
    out = {}
    for n, p in th.entries.items():
        c = p.coefficient({"w": 1})
        if c:
            out[n] = ring.const(c)
    return FormQSeries(ring, q_cap(q_order), out)


def theta_factor_ahat(z: FormPolynomial, q_order: int) -> FormQSeries:
    """z * theta'(0) / theta(z); its q^0 part is (z/2)/sinh(z/2)."""
    _check_root(z)
    tcap = q_cap(q_order + 1)
    ring = z.ring
    # theta(z) = t * z * S(z) * body(z) with S(z) = 2 sinh(z/2)/z
    s = poly_from_univariate(z, u_sinh_over_z(_terms(ring), Rational(1, 2)))
    denom = _product_body(z, tcap, -1, False) * s
    deriv = _theta_prime(ring, tcap)
    numer = FormQSeries(ring, tcap - 1, {n - 1: p for n, p in deriv.entries.items()})
    inv = series_invert(denom).truncate(tcap - 1)
    return (numer * inv).truncate(q_cap(q_order))


def _theta_prime(ring: PolyRing, tcap: int) -> FormQSeries:
    aux = PolyRing([Generator("w", 2)], 2)
    th = _theta("theta", aux.gen("w"), tcap)
    return FormQSeries(ring, tcap, {n: ring.const(p.coefficient({"w": 1})) for n, p in th.entries.items()})


def theta_ratio_line(kind: str, z: FormPolynomial, q_order: int) -> FormQSeries:
    """theta_i(z) / theta_i(0) for i in 1, 2, 3."""
    if kind not in ("theta1", "theta2", "theta3"):
        raise ValueError("line ratios are defined for theta1, theta2, theta3")
    tcap = q_cap(q_order + 1)
    zero = z.ring.zero()
    offset = 1 if kind == "theta1" else 0
    num = _theta(kind, z, tcap)
    den = _theta(kind, zero, tcap)
    return series_divide(num, den, offset).truncate(q_cap(q_order))


def theta_odd_line_factor(z: FormPolynomial, q_order: int) -> FormQSeries:
    """sqrt(-1) theta(z) / (theta1(0) theta2(0) theta3(0)).

    The sqrt(-1) cancels the constant absorbed into sinh, so the result is
    sinh(z/2) prod_j (1-q^j e^z)(1-q^j e^-z)/(1-q^j)^2.
    """
    tcap = q_cap(q_order + 1)
    zero = z.ring.zero()
    num = _theta("theta", z, tcap)
    den = _theta("theta1", zero, tcap) * _theta("theta2", zero, tcap) * _theta("theta3", zero, tcap)
    return series_divide(num, den, 1).truncate(q_cap(q_order))


def theta_product(kind: str, roots: Sequence[FormPolynomial], q_order: int) -> FormQSeries:
    """prod over roots of theta_kind(u); for theta1 the leading power is t^(len(roots))."""
    if not roots:
        raise ValueError("need at least one root")
    tcap = q_cap(q_order)
    out = FormQSeries.one(roots[0].ring, tcap)
    for u in roots:
        out = out * _theta(kind, u, tcap)
    return out


# -- power-sum form of root products ------------------------------------------


def multiplicative_sequence(
    factor: Callable[[FormPolynomial], FormQSeries],
    power_sums: Sequence[FormPolynomial],
    count: int,
    target: PolyRing,
    tcap: int,
) -> FormQSeries:
    """prod_{j=1}^{count} f(x_j) expressed through P_m = sum_j x_j^(2m).

    ``factor`` builds the per-root series f(z) over the auxiliary ring it is
    handed; f must be even in z with constant term 1.  ``power_sums[m-1]`` is
    the image of P_m in ``target``.
    """
    m_max = len(power_sums)
    aux = PolyRing([Generator("z", 2)], max(4 * m_max, 2))
    f = factor(aux.gen("z"))
    if f.tcap < tcap:
        raise ValueError("factor series is truncated below the requested t-cap")
    f = f.truncate(tcap)
    if f.constant_term() != 1:
        raise DomainError("per-root factor must have constant term 1")
    log = series_log(f)
    out = {}
    for n, p in log.entries.items():
        acc = target.zero()
        for vec, c in p.items():
            e = vec[0]
            if e % 2:
                raise DomainError("per-root factor is not even in its root")
            if e == 0:
                acc = acc + target.const(c * count)
            else:
                acc = acc + power_sums[e // 2 - 1].scale(c)
        out[n] = acc
    return series_exp(FormQSeries(target, tcap, out))


def theta_product_powersum(
    kind: str, power_sums: Sequence[FormPolynomial], count: int, target: PolyRing, q_order: int
) -> FormQSeries:
    """prod_{alpha=1}^{count} theta_kind(u_alpha) in power-sum coordinates."""
    tcap = q_cap(q_order)
    if kind == "theta1":
        def factor(z):
            return (_theta("theta1", z, tcap + 1).shift(-1) * Rational(1, 2)).truncate(tcap)

        body = multiplicative_sequence(factor, power_sums, count, target, tcap)
        return (body * Rational(2) ** count).shift(count)
    if kind in ("theta2", "theta3"):
        return multiplicative_sequence(lambda z: _theta(kind, z, tcap), power_sums, count, target, tcap)
    raise ValueError("power-sum products are defined for theta1, theta2, theta3")


def theta_ahat_powersum(power_sums: Sequence[FormPolynomial], count: int, target: PolyRing, q_order: int):
    """prod_j x_j theta'(0)/theta(x_j) in power-sum coordinates."""
    return multiplicative_sequence(
        lambda z: theta_factor_ahat(z, q_order), power_sums, count, target, q_cap(q_order)
    )


# -- T-transformation ----------------------------------------------------------


def _t_substituted(series: FormQSeries) -> dict:
    """Coefficient table of series(zeta * t): exponent -> {monomial: CycOctic}."""
    out = {}
    for n, p in series.entries.items():
        z = CycOctic.zeta_power(n)
        out[n] = {vec: z * c for vec, c in p.items()}
    return out


def _scaled(series: FormQSeries, factor: CycOctic) -> dict:
    return {n: {vec: factor * c for vec, c in p.items()} for n, p in series.entries.items()}


def check_t_transform(kind: str, q_order: int = 3, ring: PolyRing | None = None) -> bool:
    """Verify the tau -> tau+1 law of ``kind`` over Q(zeta_8), up to the cap.

    theta and theta1 pick up a factor zeta; theta2 and theta3 swap.
    Raises TransformCheckError at the first differing t-exponent.
    """
    ring = ring or PolyRing([Generator("z", 2)], 8)
    z = ring.gen(ring.names[0])
    lhs = _t_substituted(theta_series(kind, z, q_order))
    if kind in ("theta", "theta1"):
        rhs = _scaled(theta_series(kind, z, q_order), CycOctic.zeta_power(1))
    elif kind == "theta2":
        rhs = _scaled(theta_series("theta3", z, q_order), CycOctic.zeta_power(0))
    elif kind == "theta3":
        rhs = _scaled(theta_series("theta2", z, q_order), CycOctic.zeta_power(0))
    else:
        raise ValueError(f"unknown theta kind {kind!r}")
    for n in sorted(set(lhs) | set(rhs)):
        a, b = lhs.get(n, {}), rhs.get(n, {})
        for vec in set(a) | set(b):
            if a.get(vec, CycOctic()) != b.get(vec, CycOctic()):
                raise TransformCheckError(kind, n)
    return True


def euler_collapse(ring: PolyRing, q_order: int) -> tuple[FormQSeries, FormQSeries]:
    """(theta1(0) theta2(0) theta3(0), 2 t prod_j (1-q^j)^3) for comparison."""
    from .algebra import euler_product_power

    tcap = q_cap(q_order)
    zero = ring.zero()
    lhs = _theta("theta1", zero, tcap) * _theta("theta2", zero, tcap) * _theta("theta3", zero, tcap)
    rhs = (euler_product_power(ring, tcap, 3) * 2).shift(1)
    return lhs, rhs
