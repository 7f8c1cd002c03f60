"""Level-one Eisenstein series, weight bases and coefficient relations.

A level-one modular form of weight w is a polynomial in E4 and E6, so its
q-expansion is determined by its first ``d`` coefficients (d = dimension of
the weight-w space).  ``coefficient_relation`` expresses the higher
coefficients through the leading ones; these relations are the anomaly
constants (480, 61920, -264, ...).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import Rational


class ModularError(ValueError):
    pass


def divisor_power_sum(n: int, k: int) -> int:
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


@dataclass(frozen=True)
class EisensteinSeries:
    weight: int
    coefficients: tuple


def eisenstein(weight: int, q_order: int) -> EisensteinSeries:
    """E4 = 1 + 240 sum sigma_3(n) q^n, E6 = 1 - 504 sum sigma_5(n) q^n."""
    if weight == 4:
        scale, k = 240, 3
    elif weight == 6:
        scale, k = -504, 5
    else:
        raise ModularError(f"unsupported Eisenstein weight {weight}")
    coeffs = [1] + [scale * divisor_power_sum(n, k) for n in range(1, q_order + 1)]
    return EisensteinSeries(weight, tuple(coeffs))


def _mul(a, b, n):
    out = [0] * (n + 1)
    for i, x in enumerate(a[: n + 1]):
        for j, y in enumerate(b[: n + 1 - i]):
            out[i + j] += x * y
    return out


def _power(a, e, n):
    out = [1] + [0] * n
    for _ in range(e):
        out = _mul(out, a, n)
    return out


def dimension(w: int) -> int:
    """Dimension of the level-one weight-w space (w even, w >= 0)."""
    if w < 0 or w % 2 or w == 2:
        return 0
    return w // 12 + (0 if w % 12 == 2 else 1)


@dataclass(frozen=True)
class ModularWeightBasis:
    weight: int
    pairs: tuple
    expansions: tuple

    def __len__(self):
        return len(self.pairs)


def basis(w: int, q_order: int) -> ModularWeightBasis:
    """All E4^a E6^b with 4a + 6b = w, largest a first."""
    if w < 0 or w % 2:
        raise ModularError("weight must be even and non-negative")
    e4 = eisenstein(4, q_order).coefficients
    e6 = eisenstein(6, q_order).coefficients
    pairs, expansions = [], []
    for a in range(w // 4, -1, -1):
        rest = w - 4 * a
        if rest % 6 == 0:
            b = rest // 6
            pairs.append((a, b))
            expansions.append(tuple(_mul(_power(e4, a, q_order), _power(e6, b, q_order), q_order)))
    return ModularWeightBasis(w, tuple(pairs), tuple(expansions))


@dataclass(frozen=True)
class CoefficientRelation:
    """a_j = sum_i rows[j - d][i] * a_i for d <= j <= q_order."""

    weight: int
    size: int
    rows: tuple

    def constants(self) -> list:
        """Flattened relation constants, e.g. [480, 61920] or [196560, -24]."""
        if self.size == 1:
            return [row[0] for row in self.rows]
        return list(self.rows[0])

    def residuals(self, coeffs) -> list:
        """a_j - prediction for each available relation (forms or numbers)."""
        out = []
        for j, row in enumerate(self.rows, start=self.size):
            if j >= len(coeffs):
                break
            pred = coeffs[0] * row[0]
            for i in range(1, len(row)):
                pred = pred + coeffs[i] * row[i]
            out.append(coeffs[j] - pred)
        return out


def _solve(matrix, rhs):
    """Exact Gauss-Jordan solve of a small square system."""
    n = len(matrix)
    m = [[Fraction(x) for x in row] + [Fraction(r)] for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ModularError("singular system in coefficient relation")
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def coefficient_relation(w: int, q_order: int = 3) -> CoefficientRelation:
    """Express a_d .. a_{q_order} of any weight-w form through a_0 .. a_{d-1}.

    Writing f = sum_b lambda_b B_b over the basis, the leading coefficients
    give lambda = M^-1 a, and a_j = sum_b lambda_b B_b[j].
    """
    bas = basis(w, q_order)
    d = len(bas)
    if d == 0:
        raise ModularError(f"no level-one forms of weight {w}")
    if d > q_order:
        raise ModularError("q-order too small for this weight")
    assert d == dimension(w)
    # M[i][b] = B_b[i] for i < d
    M = [[bas.expansions[b][i] for b in range(d)] for i in range(d)]
    rows = []
    for j in range(d, q_order + 1):
        # a_j = sum_b B_b[j] lambda_b = sum_b B_b[j] sum_i Minv[b][i] a_i
        target = [bas.expansions[b][j] for b in range(d)]
        # solve M^T y = target, then a_j = sum_i y_i a_i
        Mt = [[M[i][b] for i in range(d)] for b in range(d)]
        y = _solve(Mt, target)
        rows.append(tuple(Rational(v.numerator, v.denominator) for v in y))
    return CoefficientRelation(w, d, tuple(rows))


def weight_of(g) -> int:
    """4l + 2k for single-bundle variants, 8l + 2k for two-bundle variants."""
    return 4 * g.l * g.bundles + 2 * g.k
