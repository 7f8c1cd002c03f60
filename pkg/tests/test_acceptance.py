"""Acceptance gate: one test (and one printed PASS/FAIL line) per criterion.

Criterion 5 does not pass as stated: the printed q^2 coefficient of the
l = 1 Q1 expansion omits a cross term.  The lemma is still checked exactly;
its failure is recorded with a strict xfail so the suite stays green while
the criterion line reports FAIL.
"""
import random
from fractions import Fraction

import pytest

from anomalycert.algebra import Generator, PolyRing, q_cap
from anomalycert.bundles import BundleExpr
from anomalycert.chern import GeometrySpec, even_factor_bundles
from anomalycert.modular import basis, coefficient_relation, eisenstein
from anomalycert.theta import check_t_transform, euler_collapse, theta_series
from anomalycert.verifier import (
    REGISTRY,
    build_q_full,
    emit_odd_identity,
    verify_expansion_lemmas,
    verify_sides_equal,
    verify_theorem,
)

import oracles

EVEN_IDS = ["T2.3-1", "T2.3-2", "T2.3-3", "T2.3-4", "T2.3-5", "T2.3-6", "T2.5",
            "T2.8-1", "T2.8-2", "T2.8-3", "T2.8-4", "T2.8-5", "T2.9"]
ODD_IDS = [f"T3.2-{i}" for i in range(1, 11)]
ODD_CONSTANTS = [480, -264, -24, -24, -24, 480, -264, -24, -24, -24]


def report(capsys, n, ok, message):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} — {message}")


@pytest.fixture(scope="module")
def lemmas():
    return {c.id: c for c in verify_expansion_lemmas()}


def test_criterion_1_eisenstein(capsys):
    e4 = list(eisenstein(4, 3).coefficients)
    e6 = list(eisenstein(6, 3).coefficients)
    ok = (e4 == [1, 240, 2160, 6720] and e6 == [1, -504, -16632, -122976]
          and e4 == oracles.eisenstein(4, 3) and e6 == oracles.eisenstein(6, 3))
    report(capsys, 1, ok, f"E4 = {e4}, E6 = {e6} through q^3")
    assert ok


def test_criterion_2_weight8(capsys):
    consts = coefficient_relation(8, 3).constants()
    ok = consts[:2] == [480, 61920]
    report(capsys, 2, ok, f"weight 8: a1 = {consts[0]} a0, a2 = {consts[1]} a0")
    assert ok


def test_criterion_3_weight10_14(capsys):
    c10 = coefficient_relation(10, 3).constants()[0]
    c14 = coefficient_relation(14, 3).constants()[0]
    ok = (c10, c14) == (-264, -24)
    report(capsys, 3, ok, f"weight 10: a1 = {c10} a0; weight 14: a1 = {c14} a0")
    assert ok


def test_criterion_4_weight12(capsys):
    consts = coefficient_relation(12, 3).constants()
    e4, e6 = oracles.eisenstein(4, 2), oracles.eisenstein(6, 2)
    e4_cubed = oracles.mul(oracles.mul(e4, e4, 2), e4, 2)
    e6_squared = oracles.mul(e6, e6, 2)
    # a2 = A a0 + B a1 must hold on both basis forms
    A, B = oracles.cramer2(1, e4_cubed[1], 1, e6_squared[1], e4_cubed[2], e6_squared[2])
    assert basis(12, 2).pairs == ((3, 0), (0, 2))
    ok = consts == [196560, -24] == [A, B]
    report(capsys, 4, ok, f"weight 12: a2 = {consts[0]} a0 + ({consts[1]}) a1; 2x2 oracle gives {A}, {B}")
    assert ok


def test_criterion_5_expansion_lemmas(capsys, lemmas):
    others = {k: c.passed for k, c in lemmas.items() if k != "L-Q1-l1"}
    euler = [lemmas["L-euler-l1"].details["coefficients"], lemmas["L-euler-l2"].details["coefficients"]]
    assert all(others.values()), [k for k, v in others.items() if not v]
    assert euler == [[1, -8, 4 * 1 * (8 - 3)], [1, -16, 4 * 2 * (16 - 3)]]
    b3 = lemmas["L-Q1-l1"]
    ok = b3.passed
    report(capsys, 5, ok,
           f"{len(others)}/{len(lemmas)} lemmas re-derived (Euler coefficients {euler}); L-Q1-l1 "
           f"{b3.verdict}: derived q^2 minus printed = {b3.details['q2_difference']} "
           f"(the printed coefficient omits the (T~ - X~)(2 L2(V) + DV) cross term)")


@pytest.mark.xfail(strict=True, reason="printed q^2 coefficient of the l=1 Q1 expansion omits a cross term")
def test_criterion_5_q1_l1_lemma(lemmas):
    assert lemmas["L-Q1-l1"].passed


SYMBOLIC = [(8, 1, "Q-even"), (12, 1, "Q-even"), (12, 2, "Q-even"), (10, 1, "Q1-even"), (14, 1, "Q1-even")]
RANDOM = [(16, 1, "Q-even"), (20, 1, "Q-even"), (22, 1, "Q1-even"), (19, 1, "Q-odd"), (21, 1, "Q1-odd")]


def test_criterion_6_side_equality(capsys):
    results = []
    for dim, l, variant in SYMBOLIC:
        cert = verify_sides_equal(GeometrySpec(dim, l, variant), 2, "powersum")
        results.append((f"{variant}({dim},{l})", cert.passed and cert.orders_checked == [0, 1, 2]))
    for dim, l, variant in RANDOM:
        cert = verify_sides_equal(GeometrySpec(dim, l, variant), 2, "random")
        results.append((f"{variant}({dim},{l})", cert.passed and len(cert.seeds) >= 5))
    ok = all(r for _, r in results)
    report(capsys, 6, ok, "q^0..q^2 agree: " + ", ".join(n for n, r in results if r)
           + "; symbolic for dims <= 14, random with 5 seeds above")
    assert ok


def test_criterion_7_theorem_registry(capsys):
    certs = [verify_theorem(t) for t in EVEN_IDS]
    ok = all(c.passed and c.computed == list(REGISTRY[c.id].expected) for c in certs)
    ok = ok and all("analytic content not checked" in c.details["corollaries"] for c in certs)
    summary = ", ".join(f"{c.id}={'/'.join(map(str, c.computed))}" for c in certs)
    report(capsys, 7, ok, f"{sum(c.passed for c in certs)}/{len(certs)} pass: {summary}")
    assert ok


def test_criterion_8_odd_layer(capsys):
    certs = [emit_odd_identity(t) for t in ODD_IDS]
    computed = [c.computed[0] for c in certs]
    ok = all(c.passed for c in certs) and computed == ODD_CONSTANTS
    report(capsys, 8, ok, f"{sum(c.passed for c in certs)}/{len(certs)} pass at symbol level, constants {computed}")
    assert ok


def _ring_axioms_hold(trials=25):
    rng = random.Random(0)
    ring = PolyRing([Generator("a", 2), Generator("b", 2)], 12)
    gens = [ring.gen("a"), ring.gen("b")]

    def rand():
        out = ring.zero()
        for _ in range(3):
            term = ring.one().scale(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
            for _ in range(rng.randint(0, 3)):
                term = term * rng.choice(gens)
            out = out + term
        return out

    for _ in range(trials):
        x, y, z = rand(), rand(), rand()
        if not (x * y == y * x and (x * y) * z == x * (y * z) and x * (y + z) == x * y + x * z):
            return False
    return True


def test_criterion_9_property_suites(capsys):
    checks = {}
    concentration = True
    for g, cls in ((GeometrySpec(8, 1, "Q-even"), 0), (GeometrySpec(10, 1, "Q1-even"), 2)):
        full = build_q_full(g, "theta", 2)
        concentration &= all(d % 4 == cls for n in full.entries for d in full.coefficient(n).degrees())
    checks["mod-4 concentration"] = concentration
    checks["half-integral cancellation"] = all(
        build_q_full(g, side, 2).is_integral() and even_factor_bundles(g, q_cap(2)).is_integral()
        for g in (GeometrySpec(8, 1, "Q-even"), GeometrySpec(10, 1, "Q1-even")) for side in ("theta", "bundle"))
    ring = PolyRing([Generator("z", 2)], 8)
    z = ring.gen("z")
    checks["theta parity"] = all(
        theta_series(k, z, 2).map_coefficients(lambda p: p.substitute("z", -z)) == theta_series(k, z, 2) * s
        for k, s in (("theta", -1), ("theta1", 1), ("theta2", 1), ("theta3", 1)))
    lhs, rhs = euler_collapse(ring, 3)
    checks["Euler collapse"] = lhs == rhs
    checks["T-transformation"] = all(check_t_transform(k, q_order=2) for k in ("theta", "theta1", "theta2", "theta3"))
    checks["backend agreement"] = verify_theorem("T2.3-1").details["readings"][0]["roots_cross_check"] == "agree"
    x, y = BundleExpr.gen("T~"), BundleExpr.gen("X~")
    checks["ring axioms"] = _ring_axioms_hold() and (x + y) * (x - y) == x * x - y * y
    ok = all(checks.values())
    report(capsys, 9, ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in checks.items())
           + " (full suites in the per-module tests)")
    assert ok


def test_criterion_10_excluded_analytic_content(capsys):
    certs = [verify_theorem(t) for t in ("T2.3-1", "T2.8-1")] + [emit_odd_identity("T3.2-1")]
    ok = all(any("analytic content not checked" in a for a in c.assumptions) for c in certs)
    ok = ok and all("analytic content not checked" in c.details["corollaries"] for c in certs[:2])
    report(capsys, 10, ok, "eta-invariant congruences and index computations excluded; "
           "certificates carry corollary flags 'analytic content not checked'")
    assert ok
