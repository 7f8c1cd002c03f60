"""Canonical virtual bundles and their generating series.

A ``BundleExpr`` is an integer combination of tensor monomials.  Each
monomial is a sorted tuple of *letters*; a letter ``(k, base)`` stands for
``Lambda^k`` of the tensor product of the basis generators in ``base``
(``k == 1`` letters always hold a single generator).  Symmetric powers are
rewritten through ``S_t = 1 / Lambda_{-t}`` so that Lambda-letters are the
only non-linear factors and equality is structural.

Basis generators::

    T~    reduced complexified tangent bundle  T_C Z - dim Z
    X~    reduced complexified line bundle     xi_C - rank xi_C
    E~    reduced complexified trivial bundle  E_C - N
    V1,V2 complexified spin bundles V_C (unreduced)
    DV1,DV2  spinor bundles Delta(V)
    DE    spinor bundle Delta(E)

The tangent, line and E bundles are carried in reduced form so that
expansions written in reduced bundles never mention a rank; the rank only
enters through the atom constructors of ``Atoms``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable, Mapping, Sequence

Letter = tuple  # (k, base-tuple)
Monomial = tuple  # sorted tuple of letters

REDUCED = ("T~", "X~", "E~")
SYMBOL_ONLY = ("E~", "DE")


def _letter(k: int, base: Sequence[str]) -> Letter:
    base = tuple(sorted(base))
    if k == 1 and len(base) != 1:
        raise ValueError("degree-1 letters hold a single generator")
    return (k, base)


def _is_plain(mono: Monomial) -> bool:
    return all(k == 1 for k, _ in mono)


class BundleExpr:
    """Integer combination of tensor monomials in canonical form."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self.terms = {m: int(c) for m, c in (terms or {}).items() if c}

    # -- constructors ----------------------------------------------------
    @classmethod
    def const(cls, n: int) -> "BundleExpr":
        return cls({(): n})

    @classmethod
    def gen(cls, name: str) -> "BundleExpr":
        return cls({(_letter(1, (name,)),): 1})

    # -- inspection ------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            other = BundleExpr.const(other)
        if not isinstance(other, BundleExpr):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=lambda m: (len(m), m))

    def generators(self) -> set[str]:
        out = set()
        for mono in self.terms:
            for _, base in mono:
                out.update(base)
        return out

    def __repr__(self):
        return format_bundle(self)

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return BundleExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return BundleExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return BundleExpr({m: c * other for m, c in self.terms.items()})
        other = _coerce(other)
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = tuple(sorted(ma + mb))
                out[m] = out.get(m, 0) + ca * cb
        return BundleExpr(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = BundleExpr.const(1)
        for _ in range(n):
            out = out * self
        return out


def _coerce(x) -> BundleExpr:
    if isinstance(x, BundleExpr):
        return x
    if isinstance(x, int):
        return BundleExpr.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to BundleExpr")


def format_bundle(e: BundleExpr) -> str:
    if e.is_zero():
        return "0"

    def letter(l):
        k, base = l
        inner = "*".join(base)
        return inner if k == 1 else f"L{k}({inner})"

    parts = []
    for mono in e.monomials():
        c = e.terms[mono]
        body = "*".join(letter(l) for l in mono)
        if not body:
            parts.append(str(c))
        elif c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        else:
            parts.append(f"{c}*{body}")
    return " + ".join(parts).replace("+ -", "- ")


# -- lambda-ring operations -----------------------------------------------------


def _ymul(a: list, b: list, K: int) -> list:
    out = [BundleExpr() for _ in range(K + 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j in range(0, K + 1 - i):
            if j < len(b) and not b[j].is_zero():
                out[i + j] = out[i + j] + x * b[j]
    return out


def _yinv(a: list, K: int) -> list:
    """Inverse of a y-series with constant term 1."""
    if a[0] != BundleExpr.const(1):
        raise ValueError("y-series inverse needs constant term 1")
    out = [BundleExpr.const(1)] + [BundleExpr() for _ in range(K)]
    for n in range(1, K + 1):
        acc = BundleExpr()
        for i in range(1, n + 1):
            if i < len(a) and not a[i].is_zero():
                acc = acc + a[i] * out[n - i]
        out[n] = -acc
    return out


def _monomial_lambda(mono: Monomial, K: int) -> list:
    """[Lambda^0(M), ..., Lambda^K(M)] for a single tensor monomial M."""
    out = [BundleExpr.const(1)] + [BundleExpr() for _ in range(K)]
    if mono == ():
        if K >= 1:
            out[1] = BundleExpr.const(1)
        return out
    if not _is_plain(mono):
        if len(mono) == 1 and K >= 1:
            out[1] = BundleExpr({mono: 1})
            if K >= 2:
                raise NotImplementedError("exterior powers of exterior powers are not supported")
            return out
        raise NotImplementedError("exterior powers of monomials with Lambda-letters are not supported")
    base = tuple(sorted(name for _, (name,) in mono))
    for j in range(1, K + 1):
        if j == 1:
            out[1] = BundleExpr({mono: 1})
        else:
            out[j] = BundleExpr({(_letter(j, base),): 1})
    return out


def lambda_series(x: BundleExpr, K: int) -> list:
    """Coefficients Lambda^0(x) .. Lambda^K(x) of Lambda_y(x)."""
    out = [BundleExpr.const(1)] + [BundleExpr() for _ in range(K)]
    for mono, n in sorted(x.terms.items()):
        s = _monomial_lambda(mono, K)
        if n < 0:
            s = _yinv(s, K)
        for _ in range(abs(n)):
            out = _ymul(out, s, K)
    return out


def sym_series(x: BundleExpr, K: int) -> list:
    """Coefficients S^0(x) .. S^K(x) of S_y(x) = 1/Lambda_{-y}(x)."""
    lam = lambda_series(x, K)
    neg = [e if i % 2 == 0 else -e for i, e in enumerate(lam)]
    return _yinv(neg, K)


def lam(k: int, x: BundleExpr) -> BundleExpr:
    return lambda_series(x, k)[k]


def sym(k: int, x: BundleExpr) -> BundleExpr:
    return sym_series(x, k)[k]


# -- atoms bound to a geometry ---------------------------------------------------


@dataclass(frozen=True)
class Atoms:
    """Bundle atoms with the ranks of one geometry.

    ``xi_rank`` is 2 for the complexified real line bundle (roots +-c) and 1
    for the alternative reading in which xi_C is the complex line itself.
    """

    dim: int
    l: int = 1
    xi_rank: int = 2
    N: int = 4

    @property
    def T(self) -> BundleExpr:
        return BundleExpr.gen("T~") + self.dim

    @property
    def Tt(self) -> BundleExpr:
        return BundleExpr.gen("T~")

    @property
    def Xi(self) -> BundleExpr:
        return BundleExpr.gen("X~") + self.xi_rank

    @property
    def Xit(self) -> BundleExpr:
        return BundleExpr.gen("X~")

    def V(self, i: int = 1) -> BundleExpr:
        return BundleExpr.gen(f"V{i}")

    def DV(self, i: int = 1) -> BundleExpr:
        return BundleExpr.gen(f"DV{i}")

    @property
    def E(self) -> BundleExpr:
        return BundleExpr.gen("E~") + self.N

    @property
    def Et(self) -> BundleExpr:
        return BundleExpr.gen("E~")

    @property
    def DE(self) -> BundleExpr:
        return BundleExpr.gen("DE")

    def trivial(self, n: int) -> BundleExpr:
        return BundleExpr.const(n)

    def generator_rank(self, name: str) -> int:
        if name in REDUCED:
            return 0
        if name == "T":
            return self.dim
        if name == "X":
            return self.xi_rank
        if name == "E":
            return self.N
        if name.startswith("DV"):
            return 2 ** (8 * self.l)
        if name.startswith("V"):
            return 16 * self.l
        if name == "DE":
            if self.N % 2:
                raise ValueError("Delta(E) needs even N")
            return 2 ** (self.N // 2)
        raise KeyError(f"unknown generator {name!r}")

    def rank(self, e: BundleExpr) -> int:
        total = 0
        for mono, c in e.terms.items():
            r = 1
            for k, base in mono:
                br = 1
                for g in base:
                    br *= self.generator_rank(g)
                r *= comb(br, k)
            total += c * r
        return total

    def tilde(self, e: BundleExpr) -> BundleExpr:
        return e - self.rank(e)


# -- q-series of bundles ------------------------------------------------------------


class BundleQSeries:
    """Truncated t-series (t = q^(1/8)) with BundleExpr coefficients."""

    __slots__ = ("tcap", "entries")

    def __init__(self, tcap: int, entries: Mapping[int, BundleExpr] | None = None):
        self.tcap = tcap
        self.entries = {n: e for n, e in (entries or {}).items() if n <= tcap and not e.is_zero()}

    @classmethod
    def one(cls, tcap: int) -> "BundleQSeries":
        return cls(tcap, {0: BundleExpr.const(1)})

    def coefficient(self, n: int) -> BundleExpr:
        return self.entries.get(n, BundleExpr())

    def q_coefficient(self, n: int) -> BundleExpr:
        return self.coefficient(8 * n)

    def is_integral(self) -> bool:
        return all(n % 8 == 0 for n in self.entries)

    def __eq__(self, other):
        return isinstance(other, BundleQSeries) and self.tcap == other.tcap and self.entries == other.entries

    def __add__(self, other):
        if isinstance(other, (int, BundleExpr)):
            other = BundleQSeries(self.tcap, {0: _coerce(other)})
        if other.tcap != self.tcap:
            raise ValueError("t-cap mismatch")
        out = dict(self.entries)
        for n, e in other.entries.items():
            out[n] = out[n] + e if n in out else e
        return BundleQSeries(self.tcap, out)

    def __neg__(self):
        return BundleQSeries(self.tcap, {n: -e for n, e in self.entries.items()})

    def __sub__(self, other):
        if isinstance(other, (int, BundleExpr)):
            other = BundleQSeries(self.tcap, {0: _coerce(other)})
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, BundleExpr)):
            return BundleQSeries(self.tcap, {n: e * other for n, e in self.entries.items()})
        if other.tcap != self.tcap:
            raise ValueError("t-cap mismatch")
        out: dict = {}
        for i, a in self.entries.items():
            for j, b in other.entries.items():
                if i + j <= self.tcap:
                    p = a * b
                    out[i + j] = out[i + j] + p if i + j in out else p
        return BundleQSeries(self.tcap, out)

    __rmul__ = __mul__

    def shift(self, k: int) -> "BundleQSeries":
        return BundleQSeries(self.tcap, {n + k: e for n, e in self.entries.items()})

    def __pow__(self, n: int):
        out = BundleQSeries.one(self.tcap)
        for _ in range(n):
            out = out * self
        return out

    def __repr__(self):
        return " + ".join(f"[{self.entries[n]}]t^{n}" for n in sorted(self.entries)) or "0"


def family_series(x: BundleExpr, kind: str, sign: int, half: bool, tcap: int) -> BundleQSeries:
    """prod_n Lambda_{sign q^e_n}(x) (kind 'L') or prod_n S_{sign q^e_n}(x) (kind 'S').

    e_n runs over n (integral family) or n - 1/2 (half-integral family).
    """
    out = BundleQSeries.one(tcap)
    n = 1
    while True:
        e = 8 * n - 4 if half else 8 * n
        if e > tcap:
            break
        K = tcap // e
        coeffs = lambda_series(x, K) if kind == "L" else sym_series(x, K)
        factor = {j * e: c * (sign ** j) for j, c in enumerate(coeffs)}
        out = out * BundleQSeries(tcap, factor)
        n += 1
    return out


def euler_bundle_series(power: int, tcap: int) -> BundleQSeries:
    """(prod_n (1 - q^n))^power with integer (trivial-bundle) coefficients."""
    base = BundleQSeries.one(tcap)
    n = 1
    while 8 * n <= tcap:
        base = base * BundleQSeries(tcap, {0: BundleExpr.const(1), 8 * n: BundleExpr.const(-1)})
        n += 1
    if power < 0:
        raise ValueError("negative powers are not needed for bundle series")
    return base ** power


def parse_bundle(text: str, atoms: Atoms) -> BundleExpr:
    """Evaluate a small bundle expression language.

    Names: T, Tt, Xi, Xit, V1, V2, DV1, DV2, E, Et, DE; functions L(k, x),
    S(k, x), tilde(x); integers; ``+ - *``.  Used for reference statements
    and CLI inspection.
    """
    env = {
        "T": atoms.T, "Tt": atoms.Tt, "Xi": atoms.Xi, "Xit": atoms.Xit,
        "V1": atoms.V(1), "V2": atoms.V(2), "V": atoms.V(1),
        "DV1": atoms.DV(1), "DV2": atoms.DV(2), "DV": atoms.DV(1),
        "E": atoms.E, "Et": atoms.Et, "DE": atoms.DE,
        "L": lambda k, x: lam(k, _coerce(x)),
        "S": lambda k, x: sym(k, _coerce(x)),
        "tilde": lambda x: atoms.tilde(_coerce(x)),
    }
    import ast

    tree = ast.parse(text, mode="eval")
    for node in ast.walk(tree):
        if not isinstance(
            node,
            (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Name, ast.Call, ast.Constant, ast.Load,
             ast.Add, ast.Sub, ast.Mult, ast.USub, ast.UAdd, ast.Pow),
        ):
            raise ValueError(f"unsupported syntax in bundle expression: {type(node).__name__}")
    return _coerce(eval(compile(tree, "<bundle>", "eval"), {"__builtins__": {}}, env))


def rewrite_reduced(e: BundleExpr, name: str, reduced: str, rank: int) -> BundleExpr:
    """Re-express an unreduced generator through its reduced form.

    ``name`` = ``reduced`` + rank, hence Lambda^k(name) expands as
    sum_j C(rank, k-j) Lambda^j(reduced).
    """
    red = BundleExpr.gen(reduced)

    def image(letter):
        k, base = letter
        if name not in base:
            return BundleExpr({(letter,): 1})
        if base != (name,):
            raise NotImplementedError("only exterior powers of a single generator can be reduced")
        series = lambda_series(red, k)
        return bundle_sum(series[j] * comb(rank, k - j) for j in range(k + 1))

    out = BundleExpr()
    for mono, c in e.terms.items():
        term = BundleExpr.const(c)
        for letter in mono:
            term = term * image(letter)
        out = out + term
    return out


def bundle_sum(items: Iterable[BundleExpr]) -> BundleExpr:
    out = BundleExpr()
    for e in items:
        out = out + e
    return out
