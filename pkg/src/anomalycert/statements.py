"""Printed expansion and theorem statements, as bundle expressions.

These are the expressions the engine re-derives and compares against.  They
are written in the small language of ``bundles.parse_bundle``: reduced
atoms ``Tt``, ``Xit``, ``Et``; unreduced ``T``, ``V`` (= ``V1``), ``V2``;
spinor bundles ``DV``, ``DV2``, ``DE``; ``L(k, x)`` and ``S(k, x)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

# q^1 coefficient of ch(Theta(T_C Z, xi_C))
THETA_Q1 = "Tt + 2*L(2, Xit) - Xit*Xit + Xit"

# q^2 coefficient of ch(Theta(T_C Z, xi_C))
THETA_B = (
    "S(2, Tt) + Tt + (2*L(2, Xit) - Xit*Xit + Xit)*Tt + L(2, Xit)*L(2, Xit)"
    " + 2*L(4, Xit) - 2*Xit*L(3, Xit) + 2*Xit*L(2, Xit) - Xit*Xit*Xit + Xit + L(2, Xit)"
)

# q^1 coefficient of the Q1 tensor S(T~) x Lambda_{-q^m}(xi~)
THETA1_Q1 = "Tt - Xit"


def euler_coefficients(l: int) -> list:
    """Printed coefficients of (prod (1-q^n))^(8l) through q^2."""
    return [1, -8 * l, 4 * l * (8 * l - 3)]


def bracket_expansion(l: int) -> dict:
    """Printed expansion of the spinor bracket: {t-exponent: expression}.

    The printed constant term is 1; the two half-integral families each
    contribute 1, so the derived constant term is 2.
    """
    out = {0: "1", 8: "2*L(2, V)", 16: "2*(L(4, V) + V*V)"}
    extra = {8 * l: "DV", 8 * (l + 1): "DV*V", 8 * (l + 2): "DV*(L(2, V) + V)"}
    for n, e in extra.items():
        out[n] = f"{out[n]} + {e}" if n in out else e
    return out


Q_L1_Q1 = f"{THETA_Q1} - 8 + 2*L(2, V) + DV"
Q_L2_Q1 = f"{THETA_Q1} - 16 + 2*L(2, V)"
Q_TWO_Q1 = f"{THETA_Q1} - 16 + 2*L(2, V1) + DV1 + 2*L(2, V2) + DV2"
Q1_L1_Q1 = f"{THETA1_Q1} - 8 + 2*L(2, V) + DV"
Q1_L2_Q1 = f"{THETA1_Q1} - 16 + 2*L(2, V)"
Q1_TWO_Q1 = f"{THETA1_Q1} - 16 + 2*L(2, V1) + DV1 + 2*L(2, V2) + DV2"

B1 = (
    f"20 + ({THETA_B}) - 8*({THETA_Q1}) - 8*(2*L(2, V) + DV)"
    f" + (2*L(2, V) + DV)*({THETA_Q1}) + DV*V + 2*L(4, V) + 2*V*V"
)
B2 = (
    f"104 + ({THETA_B}) - 16*({THETA_Q1}) - 32*L(2, V) + DV"
    f" + 2*L(2, V)*({THETA_Q1}) + 2*L(4, V) + 2*V*V"
)
B3 = (
    "20 - 7*Tt + L(2, Xit) + 7*Xit - Tt*Xit + S(2, Tt) - 8*(2*L(2, V) + DV)"
    " + DV*V + 2*L(4, V) + 2*V*V"
)

QE_Q0 = "DE"
QE_Q1 = "DE*(Et + 2*L(2, Et) - Et*Et)"


@dataclass(frozen=True)
class SeriesStatement:
    """A printed q-expansion of the even factor multiplying A-hat exp(c/2)."""

    key: str
    title: str
    variant: str
    l: int
    coefficients: dict  # q-power -> expression
    dimension: int = 8


SERIES_STATEMENTS = (
    SeriesStatement("L-Q-l1", "Q-series expansion, l = 1", "Q-even", 1, {0: "1", 1: Q_L1_Q1, 2: B1}),
    SeriesStatement("L-Q-l2", "Q-series expansion, l = 2", "Q-even", 2, {0: "1", 1: Q_L2_Q1, 2: B2}),
    SeriesStatement(
        "L-Q-two-bundle", "two-bundle Q-series expansion, l = 1", "Q-two-bundle", 1, {0: "1", 1: Q_TWO_Q1}, 12
    ),
    SeriesStatement("L-Q1-l1", "Q1-series expansion, l = 1", "Q1-even", 1, {0: "1", 1: Q1_L1_Q1, 2: B3}, 10),
    SeriesStatement("L-Q1-l2", "Q1-series expansion, l = 2", "Q1-even", 2, {0: "1", 1: Q1_L2_Q1}, 10),
)


@dataclass(frozen=True)
class TheoremStatement:
    """One printed anomaly cancellation formula.

    ``relations`` lists (lhs, [(constant, rhs expression), ...]): the form
    {A-hat e^(c/2) ch(lhs)} equals sum constant * {A-hat e^(c/2) ch(rhs)}.
    """

    relations: tuple
    text: str


def _single(lhs, r, text, second=None):
    rel = [(lhs, ((r[0], "1"),))]
    if second is not None:
        rel.append((second, ((r[1], "1"),)))
    return TheoremStatement(tuple(rel), text)


def _pair(lhs, a, b, rhs, text):
    return TheoremStatement(((lhs, ((a, "1"), (b, rhs))),), text)


THEOREM_STATEMENTS = {
    "T2.3-1": _single(Q_L1_Q1, (480, 61920), "{Ae ch(T~+2L2xi~-xi~xi~+xi~-8+2L2V+DV)} = 480{Ae}; {Ae ch(B1)} = 61920{Ae}", B1),
    "T2.3-2": _single(Q_L1_Q1, (-264,), "{Ae ch(T~+2L2xi~-xi~xi~+xi~-8+2L2V+DV)} = -264{Ae}"),
    "T2.3-3": _pair(B1, 196560, -24, "T - 24 + 2*L(2, V) + DV", "{A ch(B1)} = 196560{A} - 24{A ch(T-24+2L2V+DV)}"),
    "T2.3-4": _single(Q_L1_Q1, (-24,), "{Ae ch(T~+2L2xi~-xi~xi~+xi~-8+2L2V+DV)} = -24{Ae}"),
    "T2.3-5": _pair(B2, 196560, -24, Q_L2_Q1, "{Ae ch(B2)} = 196560{Ae} - 24{Ae ch(-16+T~+2L2xi~-xi~xi~+xi~+2L2V)}"),
    "T2.3-6": _single(Q_L2_Q1, (-24,), "{Ae ch(-16+T~+2L2xi~-xi~xi~+xi~+2L2V)} = -24{Ae}"),
    "T2.5": _single(Q_TWO_Q1, (-24,), "{Ae ch(T~+2L2xi~-xi~xi~+xi~-16+2L2V1+DV1+2L2V2+DV2)} = -24{Ae}"),
    "T2.8-1": _single(Q1_L1_Q1, (480, 61920), "{Ae ch(T~-xi~-8+2L2V+DV)} = 480{Ae}; {Ae ch(B3)} = 61920{Ae}", B3),
    "T2.8-2": _single(Q1_L1_Q1, (-264,), "{Ae ch(T~-xi~-8+2L2V+DV)} = -264{Ae}"),
    "T2.8-3": _pair(B3, 196560, -24, "T - 26 + 2*L(2, V) + DV", "{A ch(B3)} = 196560{A} - 24{A ch(T-26+2L2V+DV)}"),
    "T2.8-4": _single(Q1_L1_Q1, (-24,), "{Ae ch(T~-xi~-8+2L2V+DV)} = -24{Ae}"),
    "T2.8-5": _single(Q1_L2_Q1, (-24,), "{Ae ch(T~-xi~-16+2L2V)} = -24{Ae}"),
    "T2.9": _single(Q1_TWO_Q1, (-24,), "{Ae ch(T~-xi~-16+2L2V1+DV1+2L2V2+DV2)} = -24{Ae}"),
}

# Odd identities: LHS = {Ae [sym(QE_Q1) + ch(even_q1) sym(DE)]}, RHS = r {Ae sym(DE)}
ODD_EVEN_Q1 = {
    ("Q", 1, 1): Q_L1_Q1,
    ("Q", 2, 1): Q_L2_Q1,
    ("Q", 1, 2): Q_TWO_Q1,
    ("Q1", 1, 1): Q1_L1_Q1,
    ("Q1", 2, 1): Q1_L2_Q1,
    ("Q1", 1, 2): Q1_TWO_Q1,
}
