"""Command-line entry point: ``anomalycert verify | list | expand``.

Exit codes: 0 when every selected certificate passes, 2 when any fails (or
the report cannot be written), 1 for usage errors such as an unknown
theorem id or an invalid geometry.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from .algebra import q_cap
from .bundles import format_bundle
from .chern import BACKENDS, VARIANTS, GeometryError, GeometrySpec, expand_qe, even_factor_bundles
from .modular import ModularError, coefficient_relation, weight_of
from .report import write_report
from .verifier import (
    REGISTRY,
    RegistryError,
    build_q,
    build_q_full,
    custom_entry,
    registry_entry,
    verify_entry,
    verify_expansion_lemmas,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
FORMATS = ("json", "markdown")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    theorems: list = field(default_factory=lambda: ["all"])
    dimension: int | None = None
    l: int | None = None
    variant: str | None = None
    backend: str | None = None
    q_order: int = 3
    seed: int = 1
    output: str | None = None
    format: str = "json"
    lemmas: bool = False
    timing: bool = False
    jobs: int = 1

    @property
    def has_override(self) -> bool:
        return any(v is not None for v in (self.dimension, self.l, self.variant))

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(**data)

    def to_argv(self) -> list:
        argv = ["verify"]
        for t in self.theorems:
            argv += ["--theorem", t]
        for flag, value in (("--dimension", self.dimension), ("--l", self.l), ("--variant", self.variant),
                            ("--backend", self.backend), ("--output", self.output)):
            if value is not None:
                argv += [flag, str(value)]
        argv += ["--q-order", str(self.q_order), "--seed", str(self.seed), "--format", self.format,
                 "--jobs", str(self.jobs)]
        if self.lemmas:
            argv.append("--lemmas")
        if self.timing:
            argv.append("--timing")
        return argv

    def entries(self) -> list:
        """Resolve the theorem filter and overrides; raises UsageError before any computation."""
        if self.q_order < 1:
            raise UsageError("--q-order must be at least 1")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        ids = list(REGISTRY) if self.theorems in (["all"], []) else self.theorems
        try:
            entries = [registry_entry(t) for t in ids]
        except RegistryError as exc:
            raise UsageError(str(exc.args[0])) from None
        if self.has_override:
            if self.theorems not in (["all"], []) and len(entries) != 1:
                raise UsageError("geometry overrides apply to a single --theorem")
            base = entries[0] if self.theorems not in (["all"], []) else None
            if base is None and self.dimension is None:
                raise UsageError("--dimension is required without --theorem")
            try:
                entries = [custom_entry(
                    self.dimension if self.dimension is not None else base.dimension,
                    self.l if self.l is not None else (base.l if base else 1),
                    self.variant or (base.variant if base else "Q-even"),
                    base.id if base else None,
                    base.readings if base else ("spin-c",),
                    self.q_order,
                )]
            except (GeometryError, ModularError) as exc:
                raise UsageError(str(exc)) from None
        for e in entries:
            try:
                coefficient_relation(weight_of(e.geometry(e.readings[0])), self.q_order)
            except ModularError as exc:
                raise UsageError(f"{e.id}: {exc}") from None
        return entries


def _run_entry(args):
    entry, backend, q_order, seed = args
    return verify_entry(entry, backend, q_order, seed)


def run_verify(cfg: RunConfig) -> tuple[int, bytes]:
    entries = cfg.entries()
    work = [(e, cfg.backend, cfg.q_order, cfg.seed) for e in entries]
    if cfg.jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            certs = list(pool.map(_run_entry, work))
    else:
        certs = [_run_entry(w) for w in work]
    if cfg.lemmas:
        certs = verify_expansion_lemmas(min(cfg.q_order, 2)) + certs
    options = {k: v for k, v in cfg.to_dict().items() if k not in ("output", "format", "timing", "jobs")}
    data = write_report(certs, cfg.format, options, cfg.timing)
    code = EXIT_OK if all(c.passed for c in certs) else EXIT_FAIL
    return code, data


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anomalycert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="certify registry entries")
    v.add_argument("--theorem", action="append", default=None,
                   help="registry id (repeatable, comma-separated, or 'all'; default all)")
    v.add_argument("--dimension", type=int)
    v.add_argument("--l", type=int, choices=(1, 2, 3))
    v.add_argument("--variant", choices=VARIANTS)
    v.add_argument("--backend", choices=BACKENDS)
    v.add_argument("--q-order", type=_positive, default=3)
    v.add_argument("--seed", type=int, default=1)
    v.add_argument("--output", "-o")
    v.add_argument("--format", choices=FORMATS, default="json")
    v.add_argument("--lemmas", action="store_true", help="also run the expansion lemma checks")
    v.add_argument("--timing", action="store_true", help="record wall-clock ms per certificate")
    v.add_argument("--jobs", type=_positive, default=1)

    sub.add_parser("list", help="print the theorem registry")

    e = sub.add_parser("expand", help="print a q-expansion for inspection")
    e.add_argument("--dimension", type=int, default=8)
    e.add_argument("--l", type=int, choices=(1, 2, 3), default=1)
    e.add_argument("--variant", choices=VARIANTS, default="Q-even")
    e.add_argument("--side", choices=("theta", "bundle", "bundles", "qe"), default="bundles",
                   help="theta/bundle: forms; bundles: even factor as virtual bundles; qe: Q(E)")
    e.add_argument("--backend", choices=BACKENDS, default="powersum")
    e.add_argument("--q-order", type=_positive, default=2)
    e.add_argument("--seed", type=int, default=1)
    e.add_argument("--normalization", choices=("as-built", "stated"), default="as-built")
    e.add_argument("--spin", action="store_true")
    e.add_argument("--full", action="store_true", help="all form degrees instead of the certified ones")
    e.add_argument("--N", type=int, default=4, help="rank of E for --side qe")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    theorems = []
    for item in ns.theorem or ["all"]:
        theorems += [t.strip() for t in item.split(",") if t.strip()]
    if "all" in theorems:
        if len(theorems) > 1:
            raise UsageError("'all' cannot be combined with other ids")
        theorems = ["all"]
    return RunConfig(theorems, ns.dimension, ns.l, ns.variant, ns.backend, ns.q_order, ns.seed, ns.output,
                     ns.format, ns.lemmas, ns.timing, ns.jobs)


def run_list() -> str:
    lines = [f"{'id':<9} {'dim':>3} {'l':>2} {'variant':<18} {'weight':>6}  expected    readings"]
    for e in REGISTRY.values():
        w = weight_of(e.geometry(e.readings[0]))
        exp = "/".join(str(x) for x in e.expected)
        lines.append(f"{e.id:<9} {e.dimension:>3} {e.l:>2} {e.variant:<18} {w:>6}  {exp:<11} {','.join(e.readings)}")
    return "\n".join(lines) + "\n"


def run_expand(ns: argparse.Namespace) -> str:
    if ns.side == "qe":
        try:
            return "".join(f"q^{n}: {format_bundle(e)}\n" for n, e in expand_qe(ns.N, ns.q_order))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        g = GeometrySpec(ns.dimension, ns.l, ns.variant, ns.backend, ns.q_order, ns.seed, ns.spin)
    except GeometryError as exc:
        raise UsageError(str(exc)) from None
    if ns.side == "bundles":
        s = even_factor_bundles(g, q_cap(ns.q_order), ns.normalization)
        return "".join(f"q^{n}: {format_bundle(s.q_coefficient(n))}\n" for n in range(ns.q_order + 1))
    builder = build_q_full if ns.full else build_q
    series = builder(g, ns.side, ns.q_order, ns.normalization)
    return "".join(f"q^{n}: {series.q_coefficient(n)}\n" for n in range(ns.q_order + 1))


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if ns.command == "list":
            sys.stdout.write(run_list())
            return EXIT_OK
        if ns.command == "expand":
            sys.stdout.write(run_expand(ns))
            return EXIT_OK
        cfg = config_from_args(ns)
        code, data = run_verify(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cfg.output:
            with open(cfg.output, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except OSError as exc:
        print(f"error: cannot write report: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return code


if __name__ == "__main__":
    sys.exit(main())
