"""Assembly of the Q-series, expansion checks and theorem certificates.

Every Q-series is built two ways:

* bundle side -- A-hat(TZ) exp(c/2) times Chern characters of the bundle
  generating series (``chern`` module);
* theta side -- products of theta-function ratios (``theta`` module).

Theorems are certified from the theta side: the top-degree q-coefficients
a_0, a_1, ... are constrained by the p1 relation of the variant and must
satisfy the Eisenstein coefficient relation of the weight.  The relation
constants are also solved directly from the data and compared with the
printed constants.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .algebra import FormPolynomial, FormQSeries, Rational, q_cap, to_fraction
from .bundles import (
    Atoms,
    BundleExpr,
    BundleQSeries,
    euler_bundle_series,
    family_series,
    format_bundle,
    parse_bundle,
    rewrite_reduced,
)
from .chern import (
    Coordinates,
    GeometryError,
    GeometrySpec,
    ahat,
    apply_constraint,
    bracket_bundles,
    build_q1_tensor,
    build_theta_big_tensor,
    build_witten_bracket,
    ch_bundle,
    euler_series,
    even_factor_bundles,
    exp_c_half,
    expand_qe,
    newton_convert,
    powersum_ring,
    theta_big_tensor_bundles,
)
from .modular import basis, coefficient_relation, weight_of
from .statements import (
    ODD_EVEN_Q1,
    QE_Q0,
    QE_Q1,
    SERIES_STATEMENTS,
    THEOREM_STATEMENTS,
    THETA_B,
    THETA_Q1,
    bracket_expansion,
    euler_coefficients,
)
from .theta import (
    theta_ahat_powersum,
    theta_factor_ahat,
    theta_odd_line_factor,
    theta_product,
    theta_product_powersum,
    theta_ratio_line,
)

RANDOM_SEEDS = 5

ASSUMPTIONS_EVEN = (
    "modularity of the Q-series under the p1 constraint is consumed as a hypothesis (not proved)",
    "p1(Z) = P1(TZ), p1(xi_R) = c^2, p1(V) = P1(V)",
    "index and eta-invariant corollaries: analytic content not checked",
)
ASSUMPTIONS_ODD = ASSUMPTIONS_EVEN + (
    "Z is simply connected",
    "c3(E, g, d) = 0",
    "the transgressed character ch(Q(E), g, d) is modular of weight 2r in degree 4r-1 (opaque symbol)",
)


class RegistryError(KeyError):
    pass


@dataclass
class Certificate:
    id: str
    kind: str
    dimension: int | None = None
    l: int | None = None
    variant: str | None = None
    weight: int | None = None
    basis: list = field(default_factory=list)
    expected: list = field(default_factory=list)
    computed: list | None = None
    orders_checked: list = field(default_factory=list)
    backend: str = "symbolic"
    seeds: list = field(default_factory=list)
    assumptions: list = field(default_factory=list)
    verdict: str = "fail"
    residual: str = ""
    ms: float | None = None
    reading: str | None = None
    statement: str = ""
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


# -- Q-series builders -----------------------------------------------------------------


def theta_side(co: Coordinates, q_order: int) -> FormQSeries:
    """Theta-function form of the Q-series (all form degrees)."""
    g = co.geometry
    ring = co.ring
    tcap = q_cap(q_order)
    T = co.families["T"]
    if co.uses_roots:
        out = FormQSeries.one(ring, tcap)
        for x in T.roots:
            out = out * theta_factor_ahat(x, q_order)
    else:
        out = theta_ahat_powersum(T.power_sums, T.pairs, ring, q_order)
    if g.family == "Q":
        for kind in ("theta1", "theta2", "theta3"):
            out = out * theta_ratio_line(kind, co.c, q_order)
    else:
        out = out * theta_odd_line_factor(co.c, q_order)
    for i in range(1, g.bundles + 1):
        fam = co.families[f"V{i}"]
        acc = FormQSeries(ring, tcap, {})
        for kind in ("theta1", "theta2", "theta3"):
            if co.uses_roots:
                acc = acc + theta_product(kind, fam.roots, q_order)
            else:
                acc = acc + theta_product_powersum(kind, fam.power_sums, fam.pairs, ring, q_order)
        out = out * acc
    return out


def bundle_side(co: Coordinates, q_order: int, normalization: str = "as-built") -> FormQSeries:
    """Bundle form of the Q-series: A-hat exp(c/2) ch(...) (all form degrees)."""
    g = co.geometry
    tcap = q_cap(q_order)
    out = build_theta_big_tensor(co, tcap) if g.family == "Q" else build_q1_tensor(co, tcap)
    out = out * euler_series(co, tcap, 8 * g.l * g.bundles)
    for i in range(1, g.bundles + 1):
        out = out * build_witten_bracket(i, co, tcap, normalization)
    return out * (ahat(co) * exp_c_half(co))


def build_q_full(g: GeometrySpec, side: str, q_order: int | None = None, normalization: str = "as-built",
                 coords: Coordinates | None = None) -> FormQSeries:
    co = coords or Coordinates(g)
    q_order = g.q_order if q_order is None else q_order
    if side == "theta":
        series = theta_side(co, q_order)
    elif side == "bundle":
        series = bundle_side(co, q_order, normalization)
    else:
        raise ValueError(f"unknown side {side!r}")
    if not series.is_integral():
        raise AssertionError("assembled Q-series has fractional q-powers")
    return series


def target_part(g: GeometrySpec, f: FormPolynomial) -> FormPolynomial:
    return f.restrict(g.target_degrees)


def build_q(g: GeometrySpec, side: str, q_order: int | None = None, normalization: str = "as-built",
            coords: Coordinates | None = None) -> FormQSeries:
    """Q-series restricted to its certified degrees (top degree for even dimensions)."""
    series = build_q_full(g, side, q_order, normalization, coords)
    return series.map_coefficients(lambda p: target_part(g, p))


# -- side equality -----------------------------------------------------------------------


def default_backend(g: GeometrySpec) -> str:
    return "random" if g.dimension >= 15 else "powersum"


def _seeds(g: GeometrySpec, backend: str, seed: int | None = None) -> list:
    base = g.seed if seed is None else seed
    return [base + i for i in range(RANDOM_SEEDS)] if backend == "random" else []


def _first_difference(a: FormQSeries, b: FormQSeries) -> int | None:
    for n in sorted(set(a.entries) | set(b.entries)):
        if a.coefficient(n) != b.coefficient(n):
            return n
    return None


def verify_sides_equal(g: GeometrySpec, q_order: int | None = None, backend: str | None = None,
                       seed: int | None = None) -> Certificate:
    """Bundle side and theta side agree in the certified degrees at every q-power."""
    t0 = time.perf_counter()
    backend = backend or g.backend
    q_order = g.q_order if q_order is None else q_order
    g = g.with_(backend=backend)
    seeds = _seeds(g, backend, seed)
    runs = [Coordinates(g, s) for s in seeds] if seeds else [Coordinates(g)]
    cert = Certificate(
        id=f"S-{g.variant}-{g.dimension}-l{g.l}" + ("-spin" if g.spin else ""),
        kind="sides",
        dimension=g.dimension, l=g.l, variant=g.variant, weight=weight_of(g),
        orders_checked=list(range(q_order + 1)), backend=backend, seeds=seeds,
        assumptions=[], reading="spin" if g.spin else "spin-c",
        statement="bundle-side and theta-side Q-series agree in the certified degrees",
    )
    failures, stray = [], set()
    for co in runs:
        bside = build_q_full(g, "bundle", q_order, coords=co)
        tside = build_q_full(g, "theta", q_order, coords=co)
        top_b = bside.map_coefficients(lambda p: target_part(g, p))
        top_t = tside.map_coefficients(lambda p: target_part(g, p))
        n = _first_difference(top_b, top_t)
        if n is not None:
            failures.append((co.seed, n))
        for m in sorted(set(bside.entries) | set(tside.entries)):
            diff = bside.coefficient(m) - tside.coefficient(m)
            stray.update(diff.degrees())
    cert.details["full_form_residual_degrees"] = sorted(stray)
    target_classes = {d % 4 for d in g.target_degrees}
    cert.details["residual_degrees_off_target_class"] = all(d % 4 not in target_classes for d in stray)
    if failures:
        seed_, n = failures[0]
        cert.verdict = "fail"
        cert.residual = f"first difference at q^{n // 8}" + (f" (seed {seed_})" if seeds else "")
    else:
        cert.verdict = "pass" if cert.details["residual_degrees_off_target_class"] else "fail"
        cert.residual = "zero" if cert.verdict == "pass" else "full-form residual inside certified degree class"
    cert.ms = round((time.perf_counter() - t0) * 1000, 1)
    return cert


# -- relation solving --------------------------------------------------------------------


def _as_vector(a) -> dict:
    if isinstance(a, FormPolynomial):
        return {vec: c for vec, c in a.items()}
    return dict(a)


def solve_relation_rows(coeffs: list, size: int) -> list | None:
    """Solve a_j = sum_{i<size} y_i a_i for every j >= size from the data itself.

    ``coeffs`` are FormPolynomials (symbolic backends) or {seed: value}
    tables (random backend).  Returns None when a_0..a_{size-1} are
    degenerate (e.g. identically zero), otherwise the solved rows, each
    verified on every coordinate; a row is None if no constant relation fits.
    """
    vecs = [_as_vector(a) for a in coeffs]
    keys = sorted(set().union(*[set(v) for v in vecs]))
    lead = vecs[:size]
    if size == 1:
        pivots = [k for k in keys if lead[0].get(k)]
        if not pivots:
            return None
        chosen = [pivots[0]]
    else:
        chosen = None
        for i, k1 in enumerate(keys):
            for k2 in keys[i + 1:]:
                det = lead[0].get(k1, 0) * lead[1].get(k2, 0) - lead[1].get(k1, 0) * lead[0].get(k2, 0)
                if det:
                    chosen = [k1, k2]
                    break
            if chosen:
                break
        if chosen is None:
            return None
    rows = []
    for j in range(size, len(vecs)):
        if size == 1:
            y = [vecs[j].get(chosen[0], 0) / lead[0][chosen[0]]]
        else:
            k1, k2 = chosen
            a, b = lead[0].get(k1, 0), lead[1].get(k1, 0)
            c, d = lead[0].get(k2, 0), lead[1].get(k2, 0)
            det = a * d - b * c
            r1, r2 = vecs[j].get(k1, 0), vecs[j].get(k2, 0)
            y = [(r1 * d - b * r2) / det, (a * r2 - r1 * c) / det]
        ok = all(
            vecs[j].get(k, 0) == sum((y[i] * lead[i].get(k, 0) for i in range(size)), Rational(0)) for k in keys
        )
        rows.append(tuple(Rational(v) for v in y) if ok else None)
    return rows


def _flatten(rows, size) -> list:
    if size == 1:
        return [r[0] if r is not None else None for r in rows]
    return list(rows[0]) if rows and rows[0] is not None else [None, None]


def _num(x):
    if x is None:
        return None
    f = to_fraction(Rational(x))
    return f.numerator if f.denominator == 1 else str(f)


def _describe(f) -> str:
    text = str(f)
    return text if len(text) <= 240 else text[:237] + "..."


# -- theorem registry ---------------------------------------------------------------------


@dataclass(frozen=True)
class RegistryEntry:
    id: str
    dimension: int
    l: int
    variant: str
    expected: tuple
    readings: tuple = ("spin-c",)
    note: str = ""

    def geometry(self, reading: str = "spin-c", backend: str = "powersum", q_order: int = 3,
                 seed: int = 1) -> GeometrySpec:
        return GeometrySpec(self.dimension, self.l, self.variant, backend, q_order, seed, spin=(reading == "spin"))

    @property
    def odd(self) -> bool:
        return self.variant.endswith("odd")


VACUOUS_NOTE = "with c = 0 the sinh line factor vanishes, so the Q1-series is identically zero"

REGISTRY = {
    e.id: e
    for e in (
        RegistryEntry("T2.3-1", 8, 1, "Q-even", (480, 61920)),
        RegistryEntry("T2.3-2", 12, 1, "Q-even", (-264,)),
        RegistryEntry("T2.3-3", 16, 1, "Q-even", (196560, -24), ("spin",)),
        RegistryEntry("T2.3-4", 20, 1, "Q-even", (-24,)),
        RegistryEntry("T2.3-5", 8, 2, "Q-even", (196560, -24), ("spin-c", "spin")),
        RegistryEntry("T2.3-6", 12, 2, "Q-even", (-24,)),
        RegistryEntry("T2.5", 12, 1, "Q-two-bundle", (-24,)),
        RegistryEntry("T2.8-1", 10, 1, "Q1-even", (480, 61920)),
        RegistryEntry("T2.8-2", 14, 1, "Q1-even", (-264,)),
        RegistryEntry("T2.8-3", 18, 1, "Q1-even", (196560, -24), ("spin", "spin-c"), VACUOUS_NOTE),
        RegistryEntry("T2.8-4", 22, 1, "Q1-even", (-24,)),
        RegistryEntry("T2.8-5", 14, 2, "Q1-even", (-24,)),
        RegistryEntry("T2.9", 14, 1, "Q1-two-bundle", (-24,)),
        RegistryEntry("T3.2-1", 7, 1, "Q-odd", (480,)),
        RegistryEntry("T3.2-2", 11, 1, "Q-odd", (-264,)),
        RegistryEntry("T3.2-3", 19, 1, "Q-odd", (-24,)),
        RegistryEntry("T3.2-4", 11, 2, "Q-odd", (-24,)),
        RegistryEntry("T3.2-5", 11, 1, "Q-two-bundle-odd", (-24,)),
        RegistryEntry("T3.2-6", 9, 1, "Q1-odd", (480,)),
        RegistryEntry("T3.2-7", 13, 1, "Q1-odd", (-264,)),
        RegistryEntry("T3.2-8", 21, 1, "Q1-odd", (-24,)),
        RegistryEntry("T3.2-9", 13, 2, "Q1-odd", (-24,)),
        RegistryEntry("T3.2-10", 13, 1, "Q1-two-bundle-odd", (-24,)),
    )
}


def registry_entry(theorem_id: str) -> RegistryEntry:
    try:
        return REGISTRY[theorem_id]
    except KeyError:
        raise RegistryError(f"unknown theorem id {theorem_id!r}") from None


def _top_coefficients(g: GeometrySpec, co: Coordinates, series: FormQSeries, q_order: int) -> list:
    out = []
    for n in range(q_order + 1):
        top = series.q_coefficient(n).degree_component(g.dimension)
        if co.backend == "random":
            out.append(co.top_value(top))
        else:
            if co.uses_roots:
                top = newton_convert(top, powersum_ring(g))
            out.append(apply_constraint(top, g))
    return out


def _literal_statement_residuals(entry: RegistryEntry, g: GeometrySpec, co: Coordinates) -> list:
    """{Ae ch(lhs)} - sum c {Ae ch(rhs)} in top degree, constrained, for each printed relation."""
    stmt = THEOREM_STATEMENTS[entry.id]
    atoms = g.atoms
    prefactor = ahat(co) * exp_c_half(co)

    def top(expr):
        f = (prefactor * ch_bundle(parse_bundle(expr, atoms), co)).degree_component(g.dimension)
        if co.backend == "random":
            return co.top_value(f)
        if co.uses_roots:
            f = newton_convert(f, powersum_ring(g))
        return apply_constraint(f, g)

    out = []
    for lhs, terms in stmt.relations:
        res = top(lhs)
        for const, rhs in terms:
            res = res - top(rhs) * Rational(const)
        out.append(res)
    return out


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, FormPolynomial) else x == 0


def _certify_reading(entry: RegistryEntry, reading: str, backend: str, q_order: int, seed: int,
                     cross_check: bool) -> dict:
    g = entry.geometry(reading, backend, q_order, seed)
    w = weight_of(g)
    rel = coefficient_relation(w, q_order)
    seeds = _seeds(g, backend, seed)
    runs = [Coordinates(g, s) for s in seeds] if seeds else [Coordinates(g)]
    per_run, literal = [], []
    for co in runs:
        series = build_q_full(g, "theta", q_order, coords=co)
        per_run.append(_top_coefficients(g, co, series, q_order))
        if entry.id in THEOREM_STATEMENTS:
            literal.append(_literal_statement_residuals(entry, g, co))
    if seeds:
        coeffs = [{s: run[n] for s, run in zip(seeds, per_run)} for n in range(q_order + 1)]
    else:
        coeffs = per_run[0]
    # residuals of the Eisenstein relation
    residuals = []
    for j, row in enumerate(rel.rows, start=rel.size):
        if seeds:
            res = {s: coeffs[j][s] - sum((row[i] * coeffs[i][s] for i in range(rel.size)), Rational(0)) for s in seeds}
            residuals.append(next((v for v in res.values() if v), Rational(0)))
        else:
            pred = coeffs[0].ring.zero()
            for i in range(rel.size):
                pred = pred + coeffs[i].scale(row[i])
            residuals.append(coeffs[j] - pred)
    rows = solve_relation_rows(coeffs, rel.size)
    vacuous = rows is None
    result = {
        "reading": reading,
        "geometry": g,
        "relation": rel,
        "rows": rows,
        "vacuous": vacuous,
        "relation_holds": all(_is_zero(r) for r in residuals),
        "first_residual": next(((j, r) for j, r in enumerate(residuals, start=rel.size) if not _is_zero(r)), None),
        "seeds": seeds,
        "a0_zero": all(_is_zero(a) for a in ([coeffs[0]] if not seeds else coeffs[0].values())),
    }
    if literal:
        result["literal_statement_holds"] = all(_is_zero(x) for run in literal for x in run)
        result["literal_residual"] = next((_describe(x) for run in literal for x in run if not _is_zero(x)), "zero")
    if cross_check:
        gr = g.with_(backend="roots")
        cor = Coordinates(gr)
        series_r = build_q_full(gr, "theta", q_order, coords=cor)
        coeffs_r = _top_coefficients(gr, cor, series_r, q_order)
        result["roots_cross_check"] = "agree" if coeffs_r == coeffs else "disagree"
    return result


def _wants_cross_check(entry: RegistryEntry, backend: str) -> bool:
    return backend == "powersum" and 8 <= entry.dimension <= 12 and entry.l == 1 and entry.variant.endswith("even")


def custom_entry(dimension: int, l: int = 1, variant: str = "Q-even", base_id: str | None = None,
                 readings: tuple = ("spin-c",), q_order: int = 3) -> RegistryEntry:
    """An ad-hoc entry whose expected constants are those of its weight's relation."""
    g = GeometrySpec(dimension, l, variant, "powersum", q_order)
    rel = coefficient_relation(weight_of(g), q_order)
    consts = [_num(x) for x in rel.constants()]
    if g.odd and rel.size != 1:
        raise GeometryError(f"weight {rel.weight} has a {rel.size}-dimensional space; odd identities need one ratio")
    expected = tuple(consts[:1] if g.odd else consts[:2])
    name = f"{base_id}@" if base_id else "custom-"
    return RegistryEntry(f"{name}{variant}-{dimension}-l{l}", dimension, l, variant, expected, readings)


def xi_convention_report(g: GeometrySpec, q_order: int = 2) -> dict:
    """Which reading of xi_C (rank 2: xi_R tensor C; rank 1: xi itself) passes the side check."""
    return {
        f"rank{r}": verify_sides_equal(g.with_(xi_rank=r, backend="powersum"), q_order).verdict for r in (2, 1)
    }


def verify_theorem(theorem_id: str, backend: str | None = None, q_order: int = 3, seed: int = 1,
                   cross_check: bool | None = None) -> Certificate:
    """Certify one registry entry; odd entries are delegated to ``emit_odd_identity``."""
    return verify_entry(registry_entry(theorem_id), backend, q_order, seed, cross_check)


def verify_entry(entry: RegistryEntry, backend: str | None = None, q_order: int = 3, seed: int = 1,
                 cross_check: bool | None = None) -> Certificate:
    if entry.odd:
        return emit_odd_identity(entry, backend=backend, q_order=q_order, seed=seed)
    t0 = time.perf_counter()
    probe = entry.geometry(entry.readings[0], "powersum", q_order, seed)
    backend = backend or default_backend(probe)
    if cross_check is None:
        cross_check = _wants_cross_check(entry, backend)
    w = weight_of(probe)
    rel = coefficient_relation(w, q_order)
    rel_constants = [_num(x) for x in rel.constants()]
    expected = list(entry.expected)
    checkable = expected[: len(rel_constants)]
    readings = [_certify_reading(entry, r, backend, q_order, seed, cross_check) for r in entry.readings]
    principal = next((r for r in readings if not r["vacuous"]), readings[0])
    computed_rows = principal["rows"]
    computed = None if computed_rows is None else [_num(x) for x in _flatten(computed_rows, rel.size)]
    stmt = THEOREM_STATEMENTS.get(entry.id)
    cert = Certificate(
        id=entry.id, kind="theorem", dimension=entry.dimension, l=entry.l, variant=entry.variant, weight=w,
        basis=[list(p) for p in basis(w, q_order).pairs], expected=expected,
        computed=computed[: len(checkable)] if computed else None,
        orders_checked=list(range(q_order + 1)), backend=backend, seeds=principal["seeds"],
        assumptions=list(ASSUMPTIONS_EVEN), reading=principal["reading"],
        statement=stmt.text if stmt else f"weight-{w} coefficient relation of the {entry.variant} series",
    )
    problems = []
    if rel_constants[: len(checkable)] != checkable:
        problems.append(f"registry constants {checkable} differ from the weight-{w} relation {rel_constants}")
    if len(checkable) < len(expected):
        cert.details["unchecked_constants"] = expected[len(checkable):]
    details_readings = []
    for r in readings:
        info = {
            "reading": r["reading"],
            "relation_holds": r["relation_holds"],
            "vacuous": r["vacuous"],
            "solved_rows": None if r["rows"] is None else [
                None if row is None else [_num(x) for x in row] for row in r["rows"]
            ],
        }
        if "literal_statement_holds" in r:
            info["literal_statement_holds"] = r["literal_statement_holds"]
            info["literal_statement_residual"] = r["literal_residual"]
        if "roots_cross_check" in r:
            info["roots_cross_check"] = r["roots_cross_check"]
            if r["roots_cross_check"] != "agree":
                problems.append(f"roots and power-sum backends disagree ({r['reading']})")
        details_readings.append(info)
        if not r["relation_holds"]:
            j, res = r["first_residual"]
            problems.append(f"relation for a_{j} fails ({r['reading']}): {_describe(res)}")
        elif not r["vacuous"]:
            got = [_num(x) for x in _flatten(r["rows"], rel.size)][: len(checkable)]
            if got != checkable:
                problems.append(f"solved constants {got} differ from {checkable} ({r['reading']})")
    cert.details["readings"] = details_readings
    built = even_factor_bundles(probe, q_cap(1), "as-built")
    cert.details["normalization"] = (
        "verdict uses the series as built; literal_statement_* evaluates the printed statement, "
        "whose q^0 term omits the bracket's constant 2"
    )
    cert.details["as_built_q0"] = format_bundle(built.q_coefficient(0))
    cert.details["as_built_q1"] = format_bundle(built.q_coefficient(1))
    cert.details["relation_rows"] = [[_num(x) for x in row] for row in rel.rows]
    if cross_check:
        conv = xi_convention_report(probe)
        cert.details["xi_convention"] = conv
    if entry.note:
        cert.details["note"] = entry.note
    if all(r["vacuous"] for r in readings):
        cert.details["vacuous"] = True
    cert.details["corollaries"] = "index divisibility and eta-invariant congruences: analytic content not checked"
    cert.verdict = "fail" if problems else "pass"
    cert.residual = "; ".join(problems) if problems else "zero"
    cert.ms = round((time.perf_counter() - t0) * 1000, 1)
    return cert


# -- odd-dimensional symbol layer -----------------------------------------------------------


class TransgressionSymbol:
    """Formal odd-degree symbol ch(W, g, d) of a bundle W built from E atoms.

    Linear in W by construction: the symbol is stored as the canonical
    BundleExpr of W itself.
    """

    __slots__ = ("bundle",)

    def __init__(self, bundle: BundleExpr):
        for name in bundle.generators():
            if name not in ("E~", "DE", "E"):
                raise ValueError("transgression symbols are built from E atoms only")
        self.bundle = bundle

    def __add__(self, other):
        return TransgressionSymbol(self.bundle + other.bundle)

    def __eq__(self, other):
        return isinstance(other, TransgressionSymbol) and self.bundle == other.bundle

    def __hash__(self):
        return hash(self.bundle)

    def __repr__(self):
        return f"sym({format_bundle(self.bundle)})"


class OddCoefficient:
    """Sum of (even bundle) x (transgression symbol) terms, times A-hat exp(c/2)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    @classmethod
    def product(cls, even: BundleExpr, sym: TransgressionSymbol) -> "OddCoefficient":
        out = {}
        for m1, c1 in even.terms.items():
            for m2, c2 in sym.bundle.terms.items():
                out[(m1, m2)] = out.get((m1, m2), 0) + c1 * c2
        return cls(out)

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return OddCoefficient(out)

    def __sub__(self, other):
        return self + OddCoefficient({k: -v for k, v in other.terms.items()})

    def __eq__(self, other):
        return isinstance(other, OddCoefficient) and self.terms == other.terms

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (m1, m2), c in sorted(self.terms.items()):
            parts.append(f"{c}*[{format_bundle(BundleExpr({m1: 1}))}]sym({format_bundle(BundleExpr({m2: 1}))})")
        return " + ".join(parts)


def odd_series(g: GeometrySpec, q_order: int, normalization: str, N: int) -> list:
    """Symbol-valued q-coefficients of the odd Q-series (A-hat exp(c/2) implicit)."""
    tcap = q_cap(q_order)
    even = even_factor_bundles(g, tcap, normalization)
    qe = dict(expand_qe(N, q_order))
    out = []
    for n in range(q_order + 1):
        acc = OddCoefficient()
        for i in range(n + 1):
            acc = acc + OddCoefficient.product(even.q_coefficient(i), TransgressionSymbol(qe[n - i]))
        out.append(acc)
    return out


def emit_odd_identity(theorem, backend: str | None = None, q_order: int = 3, seed: int = 1) -> Certificate:
    """Certify an odd-dimensional identity at the symbol level.

    ``theorem`` is a registry id or a ``RegistryEntry``.
    """
    entry = theorem if isinstance(theorem, RegistryEntry) else registry_entry(theorem)
    if not entry.odd:
        raise RegistryError(f"{entry.id} is not an odd-dimensional entry")
    t0 = time.perf_counter()
    g = entry.geometry("spin-c", "powersum", q_order, seed)
    w = weight_of(g)
    rel = coefficient_relation(w, q_order)
    atoms = Atoms(g.dimension, g.l)
    problems = []

    stated = odd_series(g, 1, "stated", 4)
    stated6 = odd_series(g, 1, "stated", 6)
    built = odd_series(g, 1, "as-built", 4)
    if stated != stated6:
        problems.append("symbol expansion depends on N")

    sym_de = TransgressionSymbol(parse_bundle(QE_Q0, atoms))
    sym_qe1 = TransgressionSymbol(parse_bundle(QE_Q1, atoms))
    printed_even = ODD_EVEN_Q1.get((g.family, g.l, g.bundles))
    rhs = OddCoefficient.product(BundleExpr.const(1), sym_de)
    if stated[0] != rhs:
        problems.append(f"q^0 symbol mismatch: {stated[0] - rhs}")
    if printed_even is not None:
        even_q1 = parse_bundle(printed_even, atoms)
        lhs = OddCoefficient.product(BundleExpr.const(1), sym_qe1) + OddCoefficient.product(even_q1, sym_de)
        if stated[1] != lhs:
            problems.append(f"q^1 symbol mismatch: {stated[1] - lhs}")
        statement = f"{{Ae [sym({QE_Q1}) + ch({printed_even}) sym(DE)]}} = {entry.expected[0]} {{Ae sym(DE)}}"
    else:
        statement = f"{{Ae q^1-symbol}} = {entry.expected[0]} {{Ae sym(DE)}} (no printed left-hand side)"

    constant = rel.constants()[0]
    if _num(constant) != entry.expected[0]:
        problems.append(f"weight-{w} relation gives {_num(constant)}, printed {entry.expected[0]}")

    sides_backend = backend or default_backend(g)
    sides = verify_sides_equal(g, q_order, sides_backend, seed)
    if not sides.passed:
        problems.append(f"even factor: bundle and theta sides differ ({sides.residual})")

    scale = 2 ** g.bundles
    cert = Certificate(
        id=entry.id, kind="odd", dimension=entry.dimension, l=entry.l, variant=entry.variant, weight=w,
        basis=[list(p) for p in basis(w, q_order).pairs], expected=list(entry.expected), computed=[_num(constant)],
        orders_checked=[0, 1], backend="symbol", seeds=sides.seeds, assumptions=list(ASSUMPTIONS_ODD),
        reading="spin-c", statement=statement,
    )
    cert.details = {
        "q0_symbol": repr(stated[0]),
        "q1_symbol": repr(stated[1]),
        "N_values": [4, 6],
        "even_factor_sides": {"backend": sides.backend, "verdict": sides.verdict, "seeds": sides.seeds,
                              "degrees": g.target_degrees},
        "normalization": (
            f"structural match uses the printed normalization (bracket constant term 1); the series as built "
            f"has q^0 symbol {scale} sym(DE), and modularity then gives a_1 = {_num(constant)} a_0 for "
            f"a_0 = {scale} {{Ae sym(DE)}}"
        ),
        "as_built_q1_symbol": repr(built[1]),
        "literal_statement": "not decidable at symbol level; the same q^0 normalization fails in the even case",
    }
    cert.verdict = "fail" if problems else "pass"
    cert.residual = "; ".join(problems) if problems else "zero"
    cert.ms = round((time.perf_counter() - t0) * 1000, 1)
    return cert


# -- expansion lemmas -------------------------------------------------------------------------


def _lemma(id_, statement, problems, details=None, orders=None) -> Certificate:
    return Certificate(
        id=id_, kind="lemma", statement=statement, orders_checked=orders or [],
        verdict="fail" if problems else "pass", residual="; ".join(problems) if problems else "zero",
        details=details or {},
    )


def _numeric_check(bundle: BundleQSeries, built: FormQSeries, co: Coordinates) -> bool:
    for n in range(bundle.tcap + 1):
        if ch_bundle(bundle.coefficient(n), co) != built.coefficient(n):
            return False
    return True


def _theta_unreduced(tcap: int, dim: int, xi_rank: int) -> BundleQSeries:
    """Theta bundle from unreduced T and xi generators, reduced afterwards."""
    T = BundleExpr.gen("T") - dim
    X = BundleExpr.gen("X") - xi_rank
    s = (family_series(T, "S", 1, False, tcap) * family_series(X, "L", 1, False, tcap)
         * family_series(X, "L", 1, True, tcap) * family_series(X, "L", -1, True, tcap))
    return BundleQSeries(tcap, {
        n: rewrite_reduced(rewrite_reduced(e, "T", "T~", dim), "X", "X~", xi_rank) for n, e in s.entries.items()
    })


def verify_expansion_lemmas(q_order: int = 2) -> list:
    """Re-derive the printed bundle expansions; structural and Chern-character comparison."""
    certs = []
    tcap = q_cap(q_order)
    atoms = Atoms(8, 1)
    g8 = GeometrySpec(8, 1, "Q-even", "powersum")
    co8 = Coordinates(g8)

    # Theta(T_C Z, xi_C)
    theta = theta_big_tensor_bundles(tcap)
    problems = []
    if theta.q_coefficient(0) != BundleExpr.const(1):
        problems.append("q^0 term is not 1")
    if theta.q_coefficient(1) != parse_bundle(THETA_Q1, atoms):
        problems.append(f"q^1 differs by {theta.q_coefficient(1) - parse_bundle(THETA_Q1, atoms)}")
    if q_order >= 2 and theta.q_coefficient(2) != parse_bundle(THETA_B, atoms):
        problems.append(f"q^2 differs from B by {theta.q_coefficient(2) - parse_bundle(THETA_B, atoms)}")
    for n in (8, 12):
        if _theta_unreduced(tcap, n, 2) != theta:
            problems.append(f"unreduced derivation differs (dim {n})")
    if not _numeric_check(theta, build_theta_big_tensor(co8, tcap), co8):
        problems.append("Chern character of the expansion differs from the built series")
    certs.append(_lemma("L-theta", "ch(Theta) = 1 + q ch(T~+2L2xi~-xi~xi~+xi~) + q^2 ch(B) + O(q^3)", problems,
                        {"q1": format_bundle(theta.q_coefficient(1)), "q2": format_bundle(theta.q_coefficient(2))},
                        list(range(q_order + 1))))

    # Euler product powers
    for l in (1, 2):
        s = euler_bundle_series(8 * l, tcap)
        got = [s.q_coefficient(n).terms.get((), 0) for n in range(3)]
        num = euler_series(co8, tcap, 8 * l)
        got_num = [num.q_coefficient(n).constant() for n in range(3)]
        want = euler_coefficients(l)
        problems = [] if got == want and got_num == want else [f"derived {got}, printed {want}"]
        certs.append(_lemma(f"L-euler-l{l}", f"(prod(1-q^n))^{8 * l} = {want[0]} {want[1]:+}q {want[2]:+}q^2 + O(q^3)",
                            problems, {"coefficients": got}, [0, 1, 2]))

    # spinor bracket
    for l in (1, 2):
        br = bracket_bundles(1, l, tcap)
        printed = bracket_expansion(l)
        problems, diffs = [], {}
        for n in range(tcap + 1):
            want = parse_bundle(printed[n], atoms) if n in printed else BundleExpr()
            got = br.coefficient(n)
            if n == 0:
                diffs["q0_derived"] = format_bundle(got)
                diffs["q0_printed"] = format_bundle(want)
                got = got - 1
            if got != want:
                problems.append(f"t^{n}: derived minus printed = {got - want}")
        g = GeometrySpec(8, l, "Q-even", "powersum")
        co = Coordinates(g)
        if not _numeric_check(br, build_witten_bracket(1, co, tcap), co):
            problems.append("Chern character of the expansion differs from the built bracket")
        diffs["normalization"] = "two half-integral families each contribute 1 at q^0; compared after subtracting 1"
        certs.append(_lemma(f"L-bracket-l{l}", "spinor bracket expansion through q^2", problems, diffs,
                            list(range(q_order + 1))))

    # printed Q-series expansions (printed normalization)
    for st in SERIES_STATEMENTS:
        g = GeometrySpec(st.dimension, st.l, st.variant, "powersum")
        at = Atoms(st.dimension, st.l)
        stated = even_factor_bundles(g, tcap, "stated")
        built = even_factor_bundles(g, tcap, "as-built")
        problems, details = [], {"q0_as_built": format_bundle(built.q_coefficient(0))}
        for n, expr in st.coefficients.items():
            if n > q_order:
                continue
            diff = stated.q_coefficient(n) - parse_bundle(expr, at)
            if not diff.is_zero():
                problems.append(f"q^{n}: derived minus printed = {diff}")
                details[f"q{n}_difference"] = format_bundle(diff)
        certs.append(_lemma(st.key, st.title, problems, details, sorted(st.coefficients)))

    # Q(E)
    problems, details = [], {}
    exp4, exp6 = expand_qe(4, q_order), expand_qe(6, q_order)
    reduced = expand_qe(4, q_order, reduced_path=True)
    if exp4 != exp6:
        problems.append("N = 4 and N = 6 expansions differ")
    if exp4 != reduced:
        problems.append("unreduced and reduced derivations differ")
    at = Atoms(7, 1)
    if exp4[0][1] != parse_bundle(QE_Q0, at):
        problems.append(f"q^0: {exp4[0][1]}")
    if exp4[1][1] != parse_bundle(QE_Q1, at):
        problems.append(f"q^1 differs by {exp4[1][1] - parse_bundle(QE_Q1, at)}")
    details["q1"] = format_bundle(exp4[1][1])
    certs.append(_lemma("L-QE", "Q(E) = DE + q DE(E~+2L2E~-E~E~) + O(q^2)", problems, details, [0, 1]))
    return certs


def verify_all(backend: str | None = None, q_order: int = 3, seed: int = 1) -> list:
    return [verify_theorem(t, backend, q_order, seed) for t in REGISTRY]
