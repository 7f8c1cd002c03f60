"""Chern characters of virtual bundles over interchangeable coordinate backends.

Three backends describe the same characteristic forms:

``roots``
    explicit Chern roots ``x_j`` (tangent), ``c`` (line), ``u_alpha`` (spin
    bundles); complexified bundles get +- root pairs.  Ground truth, but only
    practical up to dimension 12.
``powersum``
    power sums ``P_m = sum_j x_j^(2m)`` of each root family as generators of
    degree 4m.  Exterior and symmetric powers go through Adams operations.
``random``
    a single degree-2 grading generator ``s``; each power sum becomes a
    pseudo-random rational multiple of ``s^(2m)``.  Used for the large
    dimensions, where a form identity is tested by evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb, factorial
from typing import Mapping, Sequence

from .algebra import (
    DomainError,
    FormPolynomial,
    FormQSeries,
    Generator,
    PolyRing,
    Rational,
    poly_exp,
    poly_from_univariate,
    q_cap,
    rational,
    series_exp,
    u_cosh,
    u_exp_series,
    u_inv,
    u_log,
    u_sinh_over_z,
)
from .bundles import (
    Atoms,
    BundleExpr,
    BundleQSeries,
    euler_bundle_series,
    family_series,
    rewrite_reduced,
)

VARIANTS = (
    "Q-even",
    "Q-two-bundle",
    "Q1-even",
    "Q1-two-bundle",
    "Q-odd",
    "Q-two-bundle-odd",
    "Q1-odd",
    "Q1-two-bundle-odd",
)
BACKENDS = ("roots", "powersum", "random")


class GeometryError(ValueError):
    """Inconsistent geometry (dimension parity, l, backend, ...)."""


class ConversionError(ValueError):
    """A form could not be rewritten in power sums (not symmetric or not even)."""


@dataclass(frozen=True)
class GeometrySpec:
    dimension: int
    l: int = 1
    variant: str = "Q-even"
    backend: str = "powersum"
    q_order: int = 3
    seed: int = 1
    spin: bool = False
    xi_rank: int = 2

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise GeometryError(f"unknown variant {self.variant!r}")
        if self.backend not in BACKENDS:
            raise GeometryError(f"unknown backend {self.backend!r}")
        if self.l not in (1, 2, 3):
            raise GeometryError("l must be 1, 2 or 3")
        if self.q_order < 1:
            raise GeometryError("q-order must be at least 1")
        if self.xi_rank not in (1, 2):
            raise GeometryError("xi_rank must be 1 or 2")
        residue = {("Q", False): 0, ("Q1", False): 2, ("Q", True): 3, ("Q1", True): 1}
        if self.dimension < 3 or self.dimension % 4 != residue[(self.family, self.odd)]:
            raise GeometryError(
                f"dimension {self.dimension} does not match variant {self.variant}"
            )

    @property
    def family(self) -> str:
        return "Q1" if self.variant.startswith("Q1") else "Q"

    @property
    def bundles(self) -> int:
        return 2 if "two-bundle" in self.variant else 1

    @property
    def odd(self) -> bool:
        return self.variant.endswith("odd")

    @property
    def k(self) -> int:
        offset = {("Q", False): 0, ("Q1", False): -2, ("Q", True): 1, ("Q1", True): -1}
        return (self.dimension + offset[(self.family, self.odd)]) // 4

    @property
    def form_cap(self) -> int:
        """Largest form degree needed: dim for even, dim-3 for odd variants.

        In the odd case the even forms multiply a transgressed symbol of
        degree 4r-1 >= 3.
        """
        return self.dimension - 3 if self.odd else self.dimension

    @property
    def target_degrees(self) -> list[int]:
        """Form degrees whose components are compared and certified."""
        if not self.odd:
            return [self.dimension]
        return [d for d in range(0, self.form_cap + 1, 2) if d % 4 == (self.dimension + 1) % 4]

    @property
    def atoms(self) -> Atoms:
        return Atoms(self.dimension, self.l, 0 if self.spin else self.xi_rank)

    @property
    def root_pairs(self) -> int:
        return self.dimension // 2

    def with_(self, **changes) -> "GeometrySpec":
        return replace(self, **changes)


# -- pseudo-random rationals -----------------------------------------------------


class Lcg:
    """64-bit linear congruential generator (Knuth's MMIX constants).

    ``rational()`` draws n/d with n in [-99, 99] and d in [1, 9] from the
    high bits of two successive states.
    """

    A = 6364136223846793005
    C = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next(self) -> int:
        self.state = (self.A * self.state + self.C) & self.MASK
        return self.state

    def rational(self) -> Rational:
        n = (self.next() >> 33) % 199 - 99
        d = (self.next() >> 33) % 9 + 1
        return Rational(n, d)


# -- coordinates -------------------------------------------------------------------


@dataclass
class Family:
    """One root family: ``pairs`` +- root pairs of a complexified bundle."""

    name: str
    pairs: int
    rank: int
    roots: list | None
    power_sums: list


def powersum_ring(g: GeometrySpec) -> PolyRing:
    M = g.form_cap // 4
    gens = [Generator(f"P{m}_T", 4 * m, "power-sum") for m in range(1, M + 1)]
    if not g.spin:
        gens.append(Generator("c", 2, "line-class"))
    for i in range(1, g.bundles + 1):
        gens += [Generator(f"P{m}_V{i}", 4 * m, "power-sum") for m in range(1, M + 1)]
    return PolyRing(gens, g.form_cap)


def roots_ring(g: GeometrySpec) -> PolyRing:
    gens = [Generator(f"x{j}", 2) for j in range(1, g.root_pairs + 1)]
    if not g.spin:
        gens.append(Generator("c", 2, "line-class"))
    for i in range(1, g.bundles + 1):
        gens += [Generator(f"u{i}_{a}", 2) for a in range(1, 8 * g.l + 1)]
    return PolyRing(gens, g.form_cap)


@dataclass(frozen=True)
class ConstraintRelation:
    """``target`` := ``replacement`` makes the p1 constraint form vanish."""

    target: str
    replacement: FormPolynomial


def constraint_relation(g: GeometrySpec, ring: PolyRing | None = None) -> ConstraintRelation:
    """P1(V1) = P1(T) - 3c^2 [- P1(V2)] (Q family) or P1(T) - c^2 [- P1(V2)] (Q1)."""
    ring = ring or powersum_ring(g)
    if ring.cap < 4:
        return ConstraintRelation("P1_V1", ring.zero())
    rep = ring.gen("P1_T")
    if not g.spin:
        rep = rep - ring.gen("c") ** 2 * (3 if g.family == "Q" else 1)
    if g.bundles == 2:
        rep = rep - ring.gen("P1_V2")
    return ConstraintRelation("P1_V1", rep)


def random_assignment(g: GeometrySpec, seed: int) -> dict:
    """Values of the free power-sum coordinates, in generator order."""
    ring = powersum_ring(g)
    rel = constraint_relation(g, ring)
    lcg = Lcg(seed)
    values = {}
    for gen in ring.generators:
        if gen.name != rel.target:
            values[gen.name] = lcg.rational()
    values[rel.target] = rel.replacement.evaluate({**values, rel.target: 0}) if ring.cap >= 4 else Rational(0)
    return values


class Coordinates:
    """Backend-specific coordinates of one geometry."""

    def __init__(self, g: GeometrySpec, seed: int | None = None):
        self.geometry = g
        self.backend = g.backend
        self.seed = g.seed if seed is None else seed
        self._ch_cache: dict = {}
        M = g.form_cap // 4
        if g.backend == "roots":
            ring = roots_ring(g)
            self.ring = ring
            self.c = ring.zero() if g.spin else ring.gen("c")
            xs = [ring.gen(f"x{j}") for j in range(1, g.root_pairs + 1)]
            self.families = {"T": Family("T", g.root_pairs, g.dimension, xs, _root_power_sums(xs, M))}
            for i in range(1, g.bundles + 1):
                us = [ring.gen(f"u{i}_{a}") for a in range(1, 8 * g.l + 1)]
                self.families[f"V{i}"] = Family(f"V{i}", 8 * g.l, 16 * g.l, us, _root_power_sums(us, M))
        elif g.backend == "powersum":
            ring = powersum_ring(g)
            self.ring = ring
            self.c = ring.zero() if g.spin else ring.gen("c")
            self.families = {
                "T": Family("T", g.root_pairs, g.dimension, None, [ring.gen(f"P{m}_T") for m in range(1, M + 1)])
            }
            for i in range(1, g.bundles + 1):
                self.families[f"V{i}"] = Family(
                    f"V{i}", 8 * g.l, 16 * g.l, None, [ring.gen(f"P{m}_V{i}") for m in range(1, M + 1)]
                )
        else:
            ring = PolyRing([Generator("s", 2, "grading")], g.form_cap)
            self.ring = ring
            s = ring.gen("s")
            self.values = random_assignment(g, self.seed)

            def img(name, m):
                return (s ** (2 * m)).scale(self.values[name])

            self.c = ring.zero() if g.spin else s.scale(self.values["c"])
            self.families = {
                "T": Family("T", g.root_pairs, g.dimension, None, [img(f"P{m}_T", m) for m in range(1, M + 1)])
            }
            for i in range(1, g.bundles + 1):
                self.families[f"V{i}"] = Family(
                    f"V{i}", 8 * g.l, 16 * g.l, None, [img(f"P{m}_V{i}", m) for m in range(1, M + 1)]
                )

    @property
    def uses_roots(self) -> bool:
        return self.backend == "roots"

    def top_value(self, f: FormPolynomial, degree: int | None = None) -> Rational:
        """Random backend: the coefficient of s^(degree/2)."""
        degree = self.geometry.dimension if degree is None else degree
        return f.coefficient({"s": degree // 2})


def _root_power_sums(roots: Sequence[FormPolynomial], M: int) -> list:
    out = []
    for m in range(1, M + 1):
        acc = roots[0].ring.zero()
        for x in roots:
            acc = acc + x ** (2 * m)
        out.append(acc)
    return out


def _n_terms(ring: PolyRing) -> int:
    return ring.cap // 2 + 2


def _exp_root(rho: FormPolynomial, scale=1) -> FormPolynomial:
    return poly_from_univariate(rho, u_exp_series(_n_terms(rho.ring), scale))


# -- multiplicative genera -----------------------------------------------------------


def even_genus(coeffs: Sequence, fam: Family, ring: PolyRing) -> FormPolynomial:
    """prod_j f(x_j) over the root pairs of ``fam`` for an even f with f(0) = 1.

    Roots backend: literal product.  Otherwise exp(sum_m kappa_m P_m) with
    log f(z) = sum_m kappa_m z^(2m).
    """
    n = _n_terms(ring)
    if fam.roots is not None:
        out = ring.one()
        for x in fam.roots:
            out = out * poly_from_univariate(x, coeffs)
        return out
    log = u_log(list(coeffs) + [0] * max(0, n - len(coeffs)), n)
    acc = ring.zero()
    for e, k in enumerate(log):
        if not k:
            continue
        if e % 2:
            raise DomainError("genus series must be even")
        m = e // 2
        if m <= len(fam.power_sums):
            acc = acc + fam.power_sums[m - 1].scale(k)
    return poly_exp(acc) if acc else ring.one()


def ahat(coords: Coordinates) -> FormPolynomial:
    """A-hat form prod_j (x_j/2)/sinh(x_j/2)."""
    n = _n_terms(coords.ring)
    coeffs = u_inv(u_sinh_over_z(n, Rational(1, 2)), n)
    return even_genus(coeffs, coords.families["T"], coords.ring)


def exp_c_half(coords: Coordinates) -> FormPolynomial:
    return _exp_root(coords.c, Rational(1, 2)) if not coords.c.is_zero() else coords.ring.one()


def spinor_ch(index: int, coords: Coordinates) -> FormPolynomial:
    """ch(Delta(V_index)) = prod_alpha 2 cosh(u_alpha/2)."""
    fam = coords.families[f"V{index}"]
    n = _n_terms(coords.ring)
    return even_genus(u_cosh(n, Rational(1, 2)), fam, coords.ring).scale(2 ** fam.pairs)


# -- Chern characters of bundle expressions -------------------------------------------


def _generator_roots(name: str, coords: Coordinates) -> dict:
    """Root multiset {root: multiplicity} of a basis generator (roots backend)."""
    g = coords.geometry
    ring = coords.ring
    zero = ring.zero()
    if name == "T~":
        xs = coords.families["T"].roots
        out = {}
        for x in xs:
            out[x] = out.get(x, 0) + 1
            out[-x] = out.get(-x, 0) + 1
        out[zero] = out.get(zero, 0) - 2 * len(xs)
        return out
    if name == "X~":
        if g.spin:
            return {}
        c = coords.c
        if g.xi_rank == 2:
            return {c: 1, -c: 1, zero: -2}
        return {c: 1, zero: -1}
    if name.startswith("DV"):
        out = {zero: 1}
        for u in coords.families[f"V{name[2:]}"].roots:
            half = u.scale(Rational(1, 2))
            nxt: dict = {}
            for r, m in out.items():
                for s in (r + half, r - half):
                    nxt[s] = nxt.get(s, 0) + m
            out = nxt
        return out
    if name.startswith("V"):
        out = {}
        for u in coords.families[name].roots:
            out[u] = out.get(u, 0) + 1
            out[-u] = out.get(-u, 0) + 1
        return out
    raise ValueError(f"generator {name!r} has no Chern roots (symbol-only or unknown)")


def _tensor_roots(multisets: Sequence[dict], ring: PolyRing) -> dict:
    out = {ring.zero(): 1}
    for ms in multisets:
        nxt: dict = {}
        for r, m in out.items():
            for s, n in ms.items():
                key = r + s
                nxt[key] = nxt.get(key, 0) + m * n
        out = {r: m for r, m in nxt.items() if m}
    return out


def bundle_roots(e: BundleExpr, coords: Coordinates) -> dict:
    """Root multiset of a plain (Lambda-free) bundle expression."""
    ring = coords.ring
    out: dict = {}
    for mono, c in e.terms.items():
        parts = []
        for k, base in mono:
            if k != 1:
                raise NotImplementedError("root multisets of exterior powers are not needed")
            parts.append(_generator_roots(base[0], coords))
        for r, m in _tensor_roots(parts, ring).items():
            out[r] = out.get(r, 0) + c * m
    return {r: m for r, m in out.items() if m}


def _ch_generator(name: str, coords: Coordinates) -> FormPolynomial:
    g = coords.geometry
    ring = coords.ring
    if name in ("E~", "DE", "E"):
        raise ValueError(f"{name} is symbol-only; its Chern character is not a form")
    if name.startswith("DV"):
        return spinor_ch(int(name[2:]), coords)
    if coords.uses_roots:
        out = ring.zero()
        for r, m in _generator_roots(name, coords).items():
            out = out + _exp_root(r).scale(m)
        return out
    if name == "T~" or name.startswith("V"):
        fam = coords.families["T" if name == "T~" else name]
        out = ring.const(0 if name == "T~" else fam.rank)
        for m, p in enumerate(fam.power_sums, start=1):
            out = out + p.scale(Rational(2, factorial(2 * m)))
        return out
    if name == "X~":
        if g.spin:
            return ring.zero()
        n = _n_terms(ring)
        if g.xi_rank == 2:
            return poly_from_univariate(coords.c, u_cosh(n)).scale(2) - 2
        return _exp_root(coords.c) - 1
    raise ValueError(f"unknown generator {name!r}")


def _lambda_from_adams(chx: FormPolynomial, k: int) -> FormPolynomial:
    """ch(Lambda^k X) from ch(X) by Newton's identity with psi^i."""
    e = [chx.ring.one()]
    for n in range(1, k + 1):
        acc = chx.ring.zero()
        for i in range(1, n + 1):
            term = chx.scale_degrees(i) * e[n - i]
            acc = acc + (term if i % 2 else -term)
        e.append(acc.scale(Rational(1, n)))
    return e[k]


def _lambda_from_roots(roots: Mapping, k: int, ring: PolyRing) -> FormPolynomial:
    """Coefficient of y^k in prod_rho (1 + y e^rho)^m."""
    out = [ring.one()] + [ring.zero()] * k
    for rho, m in roots.items():
        er = _exp_root(rho)
        factor = [ring.one()]
        power = ring.one()
        for j in range(1, k + 1):
            power = power * er
            factor.append(power.scale(_binom(m, j)))
        new = [ring.zero()] * (k + 1)
        for i, a in enumerate(out):
            if a.is_zero():
                continue
            for j in range(0, k + 1 - i):
                new[i + j] = new[i + j] + a * factor[j]
        out = new
    return out[k]


def _binom(m: int, j: int) -> Rational:
    num = Rational(1)
    for i in range(j):
        num *= m - i
    return num / factorial(j)


def ch_letter(letter, coords: Coordinates) -> FormPolynomial:
    if letter in coords._ch_cache:
        return coords._ch_cache[letter]
    k, base = letter
    if k == 1:
        out = _ch_generator(base[0], coords)
    elif coords.uses_roots:
        roots = _tensor_roots([_generator_roots(b, coords) for b in base], coords.ring)
        out = _lambda_from_roots(roots, k, coords.ring)
    else:
        chx = coords.ring.one()
        for b in base:
            chx = chx * _ch_generator(b, coords)
        out = _lambda_from_adams(chx, k)
    coords._ch_cache[letter] = out
    return out


def ch_bundle(e: BundleExpr, coords: Coordinates) -> FormPolynomial:
    """Chern character of a canonical bundle expression, truncated at the form cap."""
    ring = coords.ring
    out = ring.zero()
    for mono, c in e.terms.items():
        term = ring.const(c)
        for letter in mono:
            term = term * ch_letter(letter, coords)
        out = out + term
    return out


def ch_bundle_series(s: BundleQSeries, coords: Coordinates) -> FormQSeries:
    return FormQSeries(coords.ring, s.tcap, {n: ch_bundle(e, coords) for n, e in s.entries.items()})


# -- generating families ---------------------------------------------------------------


def lambda_sym_series(
    e: BundleExpr, kind: str, sign: int, half: bool, coords: Coordinates, tcap: int
) -> FormQSeries:
    """ch of prod_n Lambda_{sign q^e_n}(e) (kind 'L') or prod_n S_{sign q^e_n}(e) (kind 'S').

    e_n = n, or n - 1/2 when ``half``.  Roots backend: product over roots of
    (1 + sign t^e e^rho)^m, resp. (1 - sign t^e e^rho)^(-m).  Otherwise
    exp of the Adams sum log Lambda_y = sum (-1)^(k-1) y^k/k psi^k,
    log S_y = sum y^k/k psi^k.
    """
    if kind not in ("L", "S"):
        raise ValueError("kind must be 'L' or 'S'")
    ring = coords.ring
    exps = []
    n = 1
    while True:
        ex = 8 * n - 4 if half else 8 * n
        if ex > tcap:
            break
        exps.append(ex)
        n += 1
    if coords.uses_roots:
        out = FormQSeries.one(ring, tcap)
        for rho, m in bundle_roots(e, coords).items():
            er = _exp_root(rho)
            for ex in exps:
                K = tcap // ex
                base_sign = sign if kind == "L" else -sign
                power = -m if kind == "S" else m
                entries = {}
                p = ring.one()
                for j in range(0, K + 1):
                    if j:
                        p = p * er
                    coef = _binom(power, j) * base_sign ** j
                    if coef:
                        entries[j * ex] = p.scale(coef)
                out = out * FormQSeries(ring, tcap, entries)
        return out
    chx = ch_bundle(e, coords)
    log = {}
    for ex in exps:
        for k in range(1, tcap // ex + 1):
            coef = Rational(sign ** k, k)
            if kind == "L" and k % 2 == 0:
                coef = -coef
            term = chx.scale_degrees(k).scale(coef)
            log[k * ex] = log[k * ex] + term if k * ex in log else term
    return series_exp(FormQSeries(ring, tcap, log))


def euler_series(coords: Coordinates, tcap: int, power: int) -> FormQSeries:
    from .algebra import euler_product_power

    return euler_product_power(coords.ring, tcap, power)


def build_theta_big_tensor(coords: Coordinates, tcap: int) -> FormQSeries:
    """ch of S(T~) x Lambda_{q^m}(xi~) x Lambda_{q^(r-1/2)}(xi~) x Lambda_{-q^(s-1/2)}(xi~)."""
    T = BundleExpr.gen("T~")
    X = BundleExpr.gen("X~")
    out = lambda_sym_series(T, "S", 1, False, coords, tcap)
    if coords.geometry.spin:
        return out
    out = out * lambda_sym_series(X, "L", 1, False, coords, tcap)
    out = out * lambda_sym_series(X, "L", 1, True, coords, tcap)
    out = out * lambda_sym_series(X, "L", -1, True, coords, tcap)
    return out


def build_q1_tensor(coords: Coordinates, tcap: int) -> FormQSeries:
    """ch of S(T~) x Lambda_{-q^m}(xi~)."""
    out = lambda_sym_series(BundleExpr.gen("T~"), "S", 1, False, coords, tcap)
    if coords.geometry.spin:
        return out
    return out * lambda_sym_series(BundleExpr.gen("X~"), "L", -1, False, coords, tcap)


def build_witten_bracket(
    index: int, coords: Coordinates, tcap: int, normalization: str = "as-built"
) -> FormQSeries:
    """q^l ch(Delta(V) x Lambda_{q^m}(V)) + ch(Lambda_{-q^(r-1/2)}(V)) + ch(Lambda_{q^(s-1/2)}(V)).

    ``normalization='stated'`` subtracts 1, giving the series whose q^0 term is 1
    instead of 2.
    """
    V = BundleExpr.gen(f"V{index}")
    l = coords.geometry.l
    top = lambda_sym_series(V, "L", 1, False, coords, tcap) * spinor_ch(index, coords)
    out = top.shift(8 * l)
    out = out + lambda_sym_series(V, "L", -1, True, coords, tcap)
    out = out + lambda_sym_series(V, "L", 1, True, coords, tcap)
    if normalization == "stated":
        out = out - 1
    elif normalization != "as-built":
        raise ValueError(f"unknown normalization {normalization!r}")
    return out


# -- bundle-level generating series ------------------------------------------------------


def theta_big_tensor_bundles(tcap: int, family: str = "Q", spin: bool = False) -> BundleQSeries:
    T = BundleExpr.gen("T~")
    X = BundleExpr.gen("X~")
    out = family_series(T, "S", 1, False, tcap)
    if spin:
        return out
    if family == "Q":
        out = out * family_series(X, "L", 1, False, tcap)
        out = out * family_series(X, "L", 1, True, tcap)
        out = out * family_series(X, "L", -1, True, tcap)
    else:
        out = out * family_series(X, "L", -1, False, tcap)
    return out


def bracket_bundles(index: int, l: int, tcap: int, normalization: str = "as-built") -> BundleQSeries:
    V = BundleExpr.gen(f"V{index}")
    out = (family_series(V, "L", 1, False, tcap) * BundleExpr.gen(f"DV{index}")).shift(8 * l)
    out = out + family_series(V, "L", -1, True, tcap) + family_series(V, "L", 1, True, tcap)
    if normalization == "stated":
        out = out - 1
    return out


def even_factor_bundles(g: GeometrySpec, tcap: int, normalization: str = "as-built") -> BundleQSeries:
    """Bundle-level series multiplying A-hat(TZ) exp(c/2) in the Q-series of ``g``."""
    out = theta_big_tensor_bundles(tcap, g.family, g.spin)
    out = out * euler_bundle_series(8 * g.l * g.bundles, tcap)
    for i in range(1, g.bundles + 1):
        out = out * bracket_bundles(i, g.l, tcap, normalization)
    return out


def expand_qe(N: int, q_order: int, reduced_path: bool = False) -> list:
    """q-expansion of Q(E) = Q1(E) x Q2(E) x Q3(E) as [(q-power, BundleExpr)].

    By default E_C is carried unreduced with rank N and only reduced at the
    end, so agreement between different N is a genuine check.
    """
    if N < 4 or N % 2:
        raise ValueError("N must be even and at least 4")
    tcap = q_cap(q_order)
    if reduced_path:
        Et = BundleExpr.gen("E~")
    else:
        Et = BundleExpr.gen("E") - N
    series = (
        family_series(Et, "L", 1, False, tcap)
        * family_series(Et, "L", -1, True, tcap)
        * family_series(Et, "L", 1, True, tcap)
        * BundleExpr.gen("DE")
    )
    if not series.is_integral():
        raise AssertionError("half-integral q-powers survived in Q(E)")
    out = []
    for n in range(q_order + 1):
        e = series.q_coefficient(n)
        if not reduced_path:
            e = rewrite_reduced(e, "E", "E~", N)
        out.append((n, e))
    return out


# -- coordinate conversion, constraints, random evaluation --------------------------------


def _family_slots(ring: PolyRing) -> dict:
    """Root-generator indices of each family in a roots ring."""
    fams: dict = {}
    for i, gen in enumerate(ring.generators):
        if gen.name.startswith("x"):
            fams.setdefault("T", []).append(i)
        elif gen.name.startswith("u"):
            fams.setdefault("V" + gen.name[1:].split("_")[0], []).append(i)
    return fams


_PLAMBDA_CACHE: dict = {}


def _p_lambda(n: int, parts: tuple) -> dict:
    """prod_i p_{parts_i}(y_1..y_n) as {exponent tuple: int}."""
    key = (n, parts)
    if key in _PLAMBDA_CACHE:
        return _PLAMBDA_CACHE[key]
    out = {(0,) * n: 1}
    for p in parts:
        nxt: dict = {}
        for vec, c in out.items():
            for j in range(n):
                v = list(vec)
                v[j] += p
                v = tuple(v)
                nxt[v] = nxt.get(v, 0) + c
        out = nxt
    _PLAMBDA_CACHE[key] = out
    return out


def _to_partitions(poly: dict, n: int) -> dict:
    """Write a symmetric polynomial in y_1..y_n (dict exps -> coeff) via power sums."""
    residual = dict(poly)
    result: dict = {}
    while residual:
        vec = max(residual, key=lambda v: (sum(1 for e in v if e), v))
        parts = tuple(sorted((e for e in vec if e), reverse=True))
        canon = parts + (0,) * (n - len(parts))
        c = residual.get(canon)
        if not c:
            raise ConversionError("form is not symmetric in its root family")
        expansion = _p_lambda(n, parts)
        lead = expansion[canon]
        a = c / lead
        result[parts] = result.get(parts, 0) + a
        for v, m in expansion.items():
            nv = residual.get(v, 0) - a * m
            if nv:
                residual[v] = nv
            else:
                residual.pop(v, None)
    return result


def newton_convert(f: FormPolynomial, target: PolyRing) -> FormPolynomial:
    """Rewrite a roots-backend form in the power-sum coordinates of ``target``.

    Every root family (x_j; u1_a; u2_a) is converted independently; the
    line class c is passed through.  Raises ConversionError for odd or
    non-symmetric dependence on a family.
    """
    ring = f.ring
    slots = _family_slots(ring)
    names = ring.names
    c_index = names.index("c") if "c" in names else None
    # key: (c exponent, family-part tuple) where each family part is either an
    # exponent tuple in y = x^2 (unconverted) or ("P", partition).
    state: dict = {}
    fam_order = sorted(slots)
    for vec, coeff in f.items():
        parts = []
        for fam in fam_order:
            ex = tuple(vec[i] for i in slots[fam])
            if any(e % 2 for e in ex):
                raise ConversionError(f"form is odd in the {fam} roots")
            parts.append(tuple(e // 2 for e in ex))
        key = (vec[c_index] if c_index is not None else 0, tuple(parts))
        state[key] = state.get(key, 0) + coeff
    for pos, fam in enumerate(fam_order):
        n = len(slots[fam])
        groups: dict = {}
        for (ce, parts), coeff in state.items():
            rest = parts[:pos] + ((),) + parts[pos + 1:]
            groups.setdefault((ce, rest), {})[parts[pos]] = coeff
        state = {}
        for (ce, rest), poly in groups.items():
            for partition, a in _to_partitions(poly, n).items():
                parts = rest[:pos] + (("P", partition),) + rest[pos + 1:]
                state[(ce, parts)] = state.get((ce, parts), 0) + a
    out = target.zero()
    for (ce, parts), coeff in state.items():
        if not coeff:
            continue
        mono = {}
        if ce:
            mono["c"] = ce
        for fam, (_, partition) in zip(fam_order, parts):
            for m in partition:
                key = f"P{m}_{fam}"
                mono[key] = mono.get(key, 0) + 1
        out = out + target.monomial(mono, coeff)
    return out


def roots_to_powersum(f: FormPolynomial, g: GeometrySpec) -> FormPolynomial:
    return newton_convert(f, powersum_ring(g))


def apply_constraint(f: FormPolynomial, g: GeometrySpec) -> FormPolynomial:
    """Eliminate P1(V1) with the p1 relation of the variant."""
    rel = constraint_relation(g, f.ring)
    if rel.target not in f.ring.names:
        return f
    return f.substitute(rel.target, rel.replacement)


def random_evaluate(f: FormPolynomial, g: GeometrySpec, seed: int) -> Rational:
    """Evaluate a constrained power-sum form at the seeded pseudo-random point."""
    values = random_assignment(g, seed)
    rel = constraint_relation(g, f.ring)
    probe = {name: values.get(name, Rational(0)) for name in f.ring.names}
    if rel.target in f.ring.names:
        for vec, _ in f.items():
            if vec[f.ring.names.index(rel.target)]:
                raise ValueError("apply the constraint before random evaluation")
    return f.evaluate(probe)
