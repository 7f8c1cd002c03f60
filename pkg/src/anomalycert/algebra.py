"""Exact graded polynomial and truncated t-series arithmetic.

Two layered structures carry every computation in the package:

``FormPolynomial``
    A sparse polynomial with rational coefficients in graded, nilpotent
    generators.  Every generator has an even cohomological degree and every
    stored monomial has total degree at most the ring's ``cap``; anything
    above the cap is dropped on construction.

``FormQSeries``
    A truncated power series in ``t = q**(1/8)`` whose coefficients are
    ``FormPolynomial`` values over one common ring.  A q-order of ``n``
    corresponds to the t-exponent ``8 * n``.

Coefficients are ``gmpy2.mpq`` rationals throughout, which are always kept in
lowest terms with a positive denominator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import gmpy2

Rational = gmpy2.mpq

_FIELD_BITS = 8
_FIELD_MASK = (1 << _FIELD_BITS) - 1

GENERATOR_KINDS = ("chern-root", "power-sum", "line-class", "grading")


class AlgebraError(ValueError):
    """Base class for errors raised by the exact-algebra layer."""


class StructuralError(AlgebraError):
    """Operands live over different rings or have different truncation caps."""


class SingularDivisionError(AlgebraError):
    """The divisor has no invertible constant term."""


class DomainError(AlgebraError):
    """An argument violates the domain of exp, log or a root substitution."""


def rational(value) -> Rational:
    """Coerce ints, Fractions, strings and mpq values to an exact rational."""
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted in exact arithmetic")
    return Rational(value)


def to_fraction(value: Rational) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    kind: str = "chern-root"

    def __post_init__(self):
        if self.degree <= 0 or self.degree % 2:
            raise AlgebraError(f"generator {self.name!r} needs a positive even degree")
        if self.kind not in GENERATOR_KINDS:
            raise AlgebraError(f"unknown generator kind {self.kind!r}")
        if self.kind in ("chern-root", "line-class") and self.degree != 2:
            raise AlgebraError(f"{self.kind} generator {self.name!r} must have degree 2")
        if self.kind == "power-sum" and self.degree % 4:
            raise AlgebraError(f"power-sum generator {self.name!r} must have degree 4m")


class PolyRing:
    """An ordered set of generators together with a degree cap.

    Monomials are packed into a single integer, one 8-bit exponent field per
    generator, so multiplying monomials is integer addition.
    """

    def __init__(self, generators: Iterable[Generator], cap: int):
        self.generators = tuple(generators)
        if cap < 0 or cap % 2:
            raise AlgebraError("degree cap must be a non-negative even integer")
        self.cap = cap
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise AlgebraError("duplicate generator names")
        self.index = {name: i for i, name in enumerate(names)}
        self._signature = (tuple((g.name, g.degree, g.kind) for g in self.generators), cap)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self._signature == other._signature

    def __hash__(self):
        return hash(self._signature)

    def __repr__(self):
        names = ", ".join(g.name for g in self.generators)
        return f"PolyRing([{names}], cap={self.cap})"

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self.generators)

    def pack(self, exponents: Sequence[int]) -> int:
        if len(exponents) != len(self.generators):
            raise StructuralError("exponent vector length does not match the ring")
        key = 0
        for i, e in enumerate(exponents):
            if e < 0 or e > _FIELD_MASK:
                raise AlgebraError(f"exponent {e} out of range")
            key |= e << (_FIELD_BITS * i)
        return key

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> (_FIELD_BITS * i)) & _FIELD_MASK for i in range(len(self.generators)))

    def degree_of(self, exponents: Sequence[int]) -> int:
        return sum(e * g.degree for e, g in zip(exponents, self.generators))

    def with_cap(self, cap: int) -> "PolyRing":
        return PolyRing(self.generators, cap)

    # convenience constructors
    def zero(self) -> "FormPolynomial":
        return FormPolynomial(self, {})

    def one(self) -> "FormPolynomial":
        return self.const(1)

    def const(self, value) -> "FormPolynomial":
        value = rational(value)
        return FormPolynomial(self, {0: {0: value}} if value else {})

    def gen(self, name: str) -> "FormPolynomial":
        i = self.index[name]
        d = self.generators[i].degree
        if d > self.cap:
            return self.zero()
        return FormPolynomial(self, {d: {1 << (_FIELD_BITS * i): Rational(1)}})

    def monomial(self, exponents: Mapping[str, int], coeff=1) -> "FormPolynomial":
        vec = [0] * len(self.generators)
        for name, e in exponents.items():
            vec[self.index[name]] = e
        d = self.degree_of(vec)
        coeff = rational(coeff)
        if d > self.cap or not coeff:
            return self.zero()
        return FormPolynomial(self, {d: {self.pack(vec): coeff}})


def _clean(terms: dict, cap: int) -> dict:
    out = {}
    for d, bucket in terms.items():
        if d > cap:
            continue
        kept = {k: c for k, c in bucket.items() if c}
        if kept:
            out[d] = kept
    return out


class FormPolynomial:
    """Sparse exact polynomial in graded generators, truncated at ``ring.cap``.

    Terms are bucketed by total degree: ``terms[d][key] = coefficient``.
    Instances are treated as immutable.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict, *, _trusted: bool = False):
        self.ring = ring
        self.terms = terms if _trusted else _clean(terms, ring.cap)

    # -- inspection -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return sum(len(b) for b in self.terms.values())

    def constant(self) -> Rational:
        return self.terms.get(0, {}).get(0, Rational(0))

    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def items(self) -> Iterator[tuple[tuple[int, ...], Rational]]:
        """Yield (exponent vector, coefficient) in canonical order."""
        for d in sorted(self.terms):
            bucket = self.terms[d]
            for key in sorted(bucket):
                yield self.ring.unpack(key), bucket[key]

    def coefficient(self, exponents: Mapping[str, int] | Sequence[int]) -> Rational:
        if isinstance(exponents, Mapping):
            vec = [0] * len(self.ring.generators)
            for name, e in exponents.items():
                vec[self.ring.index[name]] = e
        else:
            vec = list(exponents)
        d = self.ring.degree_of(vec)
        return self.terms.get(d, {}).get(self.ring.pack(vec), Rational(0))

    def __eq__(self, other):
        if isinstance(other, FormPolynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)) or type(other) is type(Rational(0)):
            return self == self.ring.const(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, tuple(self.items())))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for vec, c in self.items():
            mono = "*".join(
                g.name if e == 1 else f"{g.name}^{e}"
                for g, e in zip(self.ring.generators, vec)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic -----------------------------------------------------
    def _check(self, other: "FormPolynomial"):
        if self.ring != other.ring:
            raise StructuralError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")

    def _coerce(self, other) -> "FormPolynomial":
        if isinstance(other, FormPolynomial):
            self._check(other)
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = {d: dict(b) for d, b in self.terms.items()}
        for d, bucket in other.terms.items():
            tgt = out.setdefault(d, {})
            for k, c in bucket.items():
                tgt[k] = tgt.get(k, 0) + c
        return FormPolynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return FormPolynomial(
            self.ring, {d: {k: -c for k, c in b.items()} for d, b in self.terms.items()}, _trusted=True
        )

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, factor) -> "FormPolynomial":
        factor = rational(factor)
        if not factor:
            return self.ring.zero()
        return FormPolynomial(
            self.ring, {d: {k: c * factor for k, c in b.items()} for d, b in self.terms.items()}, _trusted=True
        )

    def __mul__(self, other):
        if not isinstance(other, FormPolynomial):
            return self.scale(other)
        self._check(other)
        cap = self.ring.cap
        out: dict = {}
        for da, ta in self.terms.items():
            for db, tb in other.terms.items():
                d = da + db
                if d > cap:
                    continue
                bucket = out.setdefault(d, {})
                get = bucket.get
                for ka, ca in ta.items():
                    for kb, cb in tb.items():
                        k = ka + kb
                        bucket[k] = get(k, 0) + ca * cb
        return FormPolynomial(self.ring, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            raise AlgebraError("negative powers are not polynomial; use poly_inverse")
        result, base = self.ring.one(), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- graded structure ------------------------------------------------
    def degree_component(self, d: int) -> "FormPolynomial":
        if d < 0 or d > self.ring.cap:
            raise AlgebraError(f"degree {d} outside [0, {self.ring.cap}]")
        bucket = self.terms.get(d)
        return FormPolynomial(self.ring, {d: dict(bucket)} if bucket else {}, _trusted=True)

    def top(self) -> "FormPolynomial":
        return self.degree_component(self.ring.cap)

    def is_homogeneous(self, d: int) -> bool:
        return all(k == d for k in self.terms)

    def scale_degrees(self, j: int) -> "FormPolynomial":
        """Multiply the degree-2d component by j**d (the Adams operation on forms)."""
        return FormPolynomial(
            self.ring,
            {d: {k: c * j ** (d // 2) for k, c in b.items()} for d, b in self.terms.items()},
        )

    def restrict(self, degrees: Iterable[int]) -> "FormPolynomial":
        keep = set(degrees)
        return FormPolynomial(self.ring, {d: dict(b) for d, b in self.terms.items() if d in keep}, _trusted=True)

    # -- substitution ----------------------------------------------------
    def map_into(self, target: PolyRing, images: Mapping[str, "FormPolynomial"]) -> "FormPolynomial":
        """Ring homomorphism sending each generator to ``images[name]``.

        Generators missing from ``images`` map to the generator of the same
        name in ``target``.  Images should be homogeneous of the generator's
        degree for the grading to be respected, though this is not enforced.
        """
        gens = self.ring.generators
        imgs = []
        for g in gens:
            if g.name in images:
                img = images[g.name]
                if img.ring != target:
                    raise StructuralError(f"image of {g.name} lives in the wrong ring")
                imgs.append(img)
            else:
                imgs.append(target.gen(g.name))
        powers: list[list[FormPolynomial]] = [[target.one()] for _ in gens]

        def power(i, e):
            cache = powers[i]
            while len(cache) <= e:
                cache.append(cache[-1] * imgs[i])
            return cache[e]

        acc: dict = {}
        result = target.zero()
        for vec, c in self.items():
            term = target.const(c)
            for i, e in enumerate(vec):
                if e:
                    term = term * power(i, e)
                    if term.is_zero():
                        break
            if not term.is_zero():
                for d, b in term.terms.items():
                    tgt = acc.setdefault(d, {})
                    for k, v in b.items():
                        tgt[k] = tgt.get(k, 0) + v
        if acc:
            result = FormPolynomial(target, acc)
        return result

    def substitute(self, name: str, replacement: "FormPolynomial") -> "FormPolynomial":
        return self.map_into(self.ring, {name: replacement})

    def evaluate(self, values: Mapping[str, object]) -> Rational:
        """Evaluate at rational generator values; all generators must be assigned."""
        vals = [rational(values[g.name]) for g in self.ring.generators]
        total = Rational(0)
        for vec, c in self.items():
            term = c
            for v, e in zip(vals, vec):
                if e:
                    term *= v ** e
            total += term
        return total

    def audit(self) -> bool:
        """True iff the stored representation is canonical."""
        for d, bucket in self.terms.items():
            if d > self.ring.cap or not bucket:
                return False
            for k, c in bucket.items():
                if not c or self.ring.degree_of(self.ring.unpack(k)) != d:
                    return False
                if c.denominator <= 0 or gmpy2.gcd(c.numerator, c.denominator) != 1:
                    return False
        return True


def _min_positive_degree(ring: PolyRing) -> int:
    return min((g.degree for g in ring.generators), default=2)


def _nilpotency_bound(ring: PolyRing) -> int:
    return ring.cap // _min_positive_degree(ring) + 1


def poly_exp(f: FormPolynomial) -> FormPolynomial:
    if f.constant():
        raise DomainError("exp needs a polynomial with zero constant term")
    result, term = f.ring.one(), f.ring.one()
    for k in range(1, _nilpotency_bound(f.ring) + 1):
        term = (term * f).scale(Rational(1, k))
        if term.is_zero():
            break
        result = result + term
    return result


def poly_log(f: FormPolynomial) -> FormPolynomial:
    if f.constant() != 1:
        raise DomainError("log needs a polynomial with constant term 1")
    n = f - 1
    result, power = f.ring.zero(), f.ring.one()
    for k in range(1, _nilpotency_bound(f.ring) + 1):
        power = power * n
        if power.is_zero():
            break
        result = result + power.scale(Rational((-1) ** (k + 1), k))
    return result


def poly_inverse(f: FormPolynomial) -> FormPolynomial:
    c = f.constant()
    if not c:
        raise SingularDivisionError("polynomial has zero constant term")
    cinv = 1 / c
    m = (f - c).scale(-cinv)
    result, power = f.ring.one(), f.ring.one()
    for _ in range(_nilpotency_bound(f.ring)):
        power = power * m
        if power.is_zero():
            break
        result = result + power
    return result.scale(cinv)


def poly_from_univariate(z: FormPolynomial, coeffs: Sequence) -> FormPolynomial:
    """Sum of coeffs[k] * z**k, for a nilpotent z (Horner form, truncated)."""
    if z.constant():
        raise DomainError("substituted argument must be nilpotent")
    result = z.ring.zero()
    for c in reversed(list(coeffs)):
        result = result * z + c
    return result


# -- univariate rational coefficient lists -----------------------------------
# Small helpers for the one-variable expansions (sinh, cosh, log cosh, ...)
# that the theta and characteristic-class code substitutes into generators.


def u_mul(a: Sequence, b: Sequence, n: int) -> list:
    out = [Rational(0)] * n
    for i, x in enumerate(a[:n]):
        if x:
            for j, y in enumerate(b[: n - i]):
                out[i + j] += x * y
    return out


def u_inv(a: Sequence, n: int) -> list:
    if not a or not a[0]:
        raise SingularDivisionError("univariate series has zero constant term")
    out = [Rational(0)] * n
    out[0] = 1 / rational(a[0])
    for k in range(1, n):
        s = sum((rational(a[i]) * out[k - i] for i in range(1, min(k, len(a) - 1) + 1)), Rational(0))
        out[k] = -s * out[0]
    return out


def u_log(a: Sequence, n: int) -> list:
    if rational(a[0]) != 1:
        raise DomainError("univariate log needs constant term 1")
    a = [rational(x) for x in a] + [Rational(0)] * max(0, n - len(a))
    out = [Rational(0)] * n
    for k in range(1, n):
        s = k * a[k] - sum((i * out[i] * a[k - i] for i in range(1, k)), Rational(0))
        out[k] = s / k
    return out


def u_exp_series(n: int, scale=1) -> list:
    """Coefficients of exp(scale * z)."""
    scale = rational(scale)
    return [scale ** k / factorial(k) for k in range(n)]


def u_sinh_over_z(n: int, scale=1) -> list:
    """Coefficients of sinh(scale*z)/(scale*z) (even powers only)."""
    scale = rational(scale)
    return [scale ** k / factorial(k + 1) if k % 2 == 0 else Rational(0) for k in range(n)]


def u_cosh(n: int, scale=1) -> list:
    scale = rational(scale)
    return [scale ** k / factorial(k) if k % 2 == 0 else Rational(0) for k in range(n)]


def u_sinh(n: int, scale=1) -> list:
    scale = rational(scale)
    return [scale ** k / factorial(k) if k % 2 == 1 else Rational(0) for k in range(n)]


# -- truncated t-series -------------------------------------------------------


def q_cap(q_order: int) -> int:
    """t-cap for a q-order: all t-exponents up to 8*q_order + 7."""
    if q_order < 0:
        raise AlgebraError("q-order must be non-negative")
    return 8 * q_order + 7


class FormQSeries:
    """Truncated series in t = q^(1/8) with FormPolynomial coefficients."""

    __slots__ = ("ring", "tcap", "entries")

    def __init__(self, ring: PolyRing, tcap: int, entries: Mapping[int, FormPolynomial] | None = None):
        self.ring = ring
        self.tcap = tcap
        clean = {}
        for n, p in (entries or {}).items():
            if n < 0:
                raise AlgebraError("negative t-exponents are not supported")
            if n > tcap:
                continue
            if p.ring != ring:
                raise StructuralError("coefficient ring mismatch")
            if not p.is_zero():
                clean[n] = p
        self.entries = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, ring: PolyRing, tcap: int, value) -> "FormQSeries":
        if not isinstance(value, FormPolynomial):
            value = ring.const(value)
        return cls(ring, tcap, {0: value})

    @classmethod
    def one(cls, ring: PolyRing, tcap: int) -> "FormQSeries":
        return cls.constant(ring, tcap, 1)

    @classmethod
    def from_rationals(cls, ring: PolyRing, tcap: int, coeffs: Mapping[int, object]) -> "FormQSeries":
        return cls(ring, tcap, {n: ring.const(c) for n, c in coeffs.items()})

    @classmethod
    def monomial(cls, ring: PolyRing, tcap: int, n: int, value=1) -> "FormQSeries":
        if not isinstance(value, FormPolynomial):
            value = ring.const(value)
        return cls(ring, tcap, {n: value})

    # -- inspection --------------------------------------------------------
    def coefficient(self, n: int) -> FormPolynomial:
        return self.entries.get(n, self.ring.zero())

    def q_coefficient(self, n: int) -> FormPolynomial:
        return self.coefficient(8 * n)

    def exponents(self) -> list[int]:
        return sorted(self.entries)

    def valuation(self) -> int | None:
        return min(self.entries) if self.entries else None

    def is_integral(self) -> bool:
        return all(n % 8 == 0 for n in self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, FormQSeries):
            return NotImplemented
        return self.ring == other.ring and self.tcap == other.tcap and self.entries == other.entries

    def __repr__(self):
        if not self.entries:
            return f"0 + O(t^{self.tcap + 1})"
        parts = [f"({self.entries[n]})*t^{n}" for n in sorted(self.entries)]
        return " + ".join(parts) + f" + O(t^{self.tcap + 1})"

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: "FormQSeries"):
        if self.ring != other.ring:
            raise StructuralError("series ring mismatch")
        if self.tcap != other.tcap:
            raise StructuralError(f"t-cap mismatch: {self.tcap} vs {other.tcap}")

    def _coerce(self, other) -> "FormQSeries":
        if isinstance(other, FormQSeries):
            self._check(other)
            return other
        return FormQSeries.constant(self.ring, self.tcap, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.entries)
        for n, p in other.entries.items():
            out[n] = out[n] + p if n in out else p
        return FormQSeries(self.ring, self.tcap, out)

    __radd__ = __add__

    def __neg__(self):
        return FormQSeries(self.ring, self.tcap, {n: -p for n, p in self.entries.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, FormPolynomial):
            if other.ring != self.ring:
                raise StructuralError("series ring mismatch")
            return FormQSeries(self.ring, self.tcap, {n: p * other for n, p in self.entries.items()})
        if not isinstance(other, FormQSeries):
            return FormQSeries(self.ring, self.tcap, {n: p.scale(other) for n, p in self.entries.items()})
        self._check(other)
        out: dict = {}
        for i, a in self.entries.items():
            for j, b in other.entries.items():
                n = i + j
                if n > self.tcap:
                    continue
                prod = a * b
                out[n] = out[n] + prod if n in out else prod
        return FormQSeries(self.ring, self.tcap, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return series_invert(self) ** (-n)
        result, base = FormQSeries.one(self.ring, self.tcap), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- structure -----------------------------------------------------------
    def shift(self, k: int) -> "FormQSeries":
        """Multiply by t**k (k may be negative if the low coefficients vanish)."""
        if k < 0 and self.entries and min(self.entries) + k < 0:
            raise AlgebraError("shift would create negative t-exponents")
        return FormQSeries(self.ring, self.tcap, {n + k: p for n, p in self.entries.items()})

    def truncate(self, tcap: int) -> "FormQSeries":
        if tcap > self.tcap:
            raise AlgebraError("cannot extend a truncated series")
        return FormQSeries(self.ring, tcap, self.entries)

    def map_coefficients(self, fn: Callable[[FormPolynomial], FormPolynomial], ring: PolyRing | None = None):
        ring = ring or self.ring
        return FormQSeries(ring, self.tcap, {n: fn(p) for n, p in self.entries.items()})

    def degree_component(self, d: int) -> "FormQSeries":
        return self.map_coefficients(lambda p: p.degree_component(d))

    def scale_degrees(self, j: int) -> "FormQSeries":
        return self.map_coefficients(lambda p: p.scale_degrees(j))

    def substitute_t(self, power: int, sign: int = 1) -> "FormQSeries":
        """Replace t by sign * t**power."""
        out = {}
        for n, p in self.entries.items():
            m = n * power
            if m <= self.tcap:
                out[m] = p if sign > 0 or n % 2 == 0 else -p
        return FormQSeries(self.ring, self.tcap, out)

    def constant_term(self) -> Rational:
        return self.coefficient(0).constant()


def series_invert(f: FormQSeries, offset: int = 0) -> FormQSeries:
    """Inverse of ``f / t**offset``.

    ``f`` must vanish below ``t**offset`` and its ``t**offset`` coefficient
    must have a nonzero constant part.  Since the top ``offset`` coefficients
    of ``f / t**offset`` are unknown, the result is truncated at
    ``f.tcap - offset``.
    """
    if offset:
        if any(n < offset for n in f.entries):
            raise SingularDivisionError(f"series does not vanish below t^{offset}")
        f = FormQSeries(f.ring, f.tcap - offset, {n - offset: p for n, p in f.entries.items()})
    f0 = f.coefficient(0)
    if not f0.constant():
        raise SingularDivisionError("leading coefficient is not invertible")
    g0 = poly_inverse(f0)
    g = {0: g0}
    support = sorted(n for n in f.entries if n > 0)
    for n in range(1, f.tcap + 1):
        acc = None
        for i in support:
            if i > n:
                break
            gi = g.get(n - i)
            if gi is None:
                continue
            term = f.entries[i] * gi
            acc = term if acc is None else acc + term
        if acc is not None and not acc.is_zero():
            val = -(g0 * acc)
            if not val.is_zero():
                g[n] = val
    return FormQSeries(f.ring, f.tcap, g)


def series_divide(num: FormQSeries, den: FormQSeries, offset: int = 0) -> FormQSeries:
    """Quotient of two series that both carry the factor t**offset.

    The result is an offset-0 series truncated at ``tcap - offset``.
    """
    num._check(den)
    if offset and any(n < offset for n in num.entries):
        raise SingularDivisionError(f"numerator does not vanish below t^{offset}")
    inv = series_invert(den, offset)
    shifted = FormQSeries(num.ring, num.tcap - offset, {n - offset: p for n, p in num.entries.items()})
    return shifted * inv


def series_exp(f: FormQSeries) -> FormQSeries:
    """exp of a series whose t^0 coefficient has zero constant term."""
    f0 = f.coefficient(0)
    if f0.constant():
        raise DomainError("exp needs zero constant term")
    g = {0: poly_exp(f0)}
    support = sorted(n for n in f.entries if n > 0)
    for n in range(1, f.tcap + 1):
        acc = None
        for i in support:
            if i > n:
                break
            gi = g.get(n - i)
            if gi is None:
                continue
            term = (f.entries[i] * gi).scale(i)
            acc = term if acc is None else acc + term
        if acc is not None:
            val = acc.scale(Rational(1, n))
            if not val.is_zero():
                g[n] = val
    return FormQSeries(f.ring, f.tcap, g)


def series_log(f: FormQSeries) -> FormQSeries:
    """log of a series whose t^0 coefficient has constant term 1."""
    f0 = f.coefficient(0)
    if f0.constant() != 1:
        raise DomainError("log needs constant term 1")
    f0inv = poly_inverse(f0)
    h = {}
    h0 = poly_log(f0)
    if not h0.is_zero():
        h[0] = h0
    for n in range(1, f.tcap + 1):
        acc = f.coefficient(n).scale(n)
        for i in list(h):
            if 1 <= i < n and (n - i) in f.entries:
                acc = acc - (h[i] * f.entries[n - i]).scale(i)
        if not acc.is_zero():
            val = (acc * f0inv).scale(Rational(1, n))
            if not val.is_zero():
                h[n] = val
    return FormQSeries(f.ring, f.tcap, h)


def series_from_univariate(z: FormPolynomial, coeffs: Sequence, tcap: int) -> FormQSeries:
    return FormQSeries.constant(z.ring, tcap, poly_from_univariate(z, coeffs))


def euler_product_power(ring: PolyRing, tcap: int, power: int) -> FormQSeries:
    """(prod_{n>=1} (1 - q^n))**power as a t-series (power may be negative)."""
    base = FormQSeries.one(ring, tcap)
    n = 1
    while 8 * n <= tcap:
        base = base * FormQSeries.from_rationals(ring, tcap, {0: 1, 8 * n: -1})
        n += 1
    return base ** power


# -- cyclotomic coefficients -----------------------------------------------------


class CycOctic:
    """a + b*z + c*z^2 + d*z^3 with z a primitive 8th root of unity (z^4 = -1)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = (0, 0, 0, 0)):
        if len(coeffs) != 4:
            raise AlgebraError("CycOctic needs exactly four coordinates")
        self.coeffs = tuple(rational(c) for c in coeffs)

    @classmethod
    def zeta_power(cls, n: int) -> "CycOctic":
        n %= 8
        coeffs = [0, 0, 0, 0]
        coeffs[n % 4] = 1 if n < 4 else -1
        return cls(coeffs)

    def __add__(self, other):
        other = _as_cyc(other)
        return CycOctic([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycOctic([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_cyc(other))

    def __mul__(self, other):
        other = _as_cyc(other)
        out = [Rational(0)] * 4
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if not b:
                    continue
                k = i + j
                if k >= 4:
                    out[k - 4] -= a * b
                else:
                    out[k] += a * b
        return CycOctic(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _as_cyc(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return "CycOctic(" + ", ".join(str(c) for c in self.coeffs) + ")"

    def is_zero(self) -> bool:
        return not any(self.coeffs)


def _as_cyc(x) -> CycOctic:
    if isinstance(x, CycOctic):
        return x
    if isinstance(x, (int, Fraction)) or type(x) is type(Rational(0)):
        return CycOctic([x, 0, 0, 0])
    raise TypeError(f"cannot coerce {type(x).__name__} to CycOctic")
