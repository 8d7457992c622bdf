"""``kontext`` command line.

Exit codes: 0 ok, 1 I/O, 2 schema/parse, 3 validation (legality or
realization), 4 bad argument (unknown atom, bad premise, missing vector),
10 no two-valued measure exists, 11 contradictory premises.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from importlib import resources

from . import config
from .greechie import (
    Diagram,
    DiagramError,
    LegalityWarning,
    MissingCoordinatesError,
    SchemaError,
    UnknownAtomError,
    ValidationError,
    make_bug,
    make_star,
    parse,
    realize_check,
    serialize,
    to_dot,
)
from .qrng import DEFAULT_BOUNDS, QrngConfig, sample, write_bits
from .ray_space import GeometryError, born_probability, complete_context
from .valuations import ContradictionError, classify, enumerate_two_valued, to_dimacs

EXIT_OK = 0
EXIT_IO = 1
EXIT_SCHEMA = 2
EXIT_VALIDATION = 3
EXIT_ARGUMENT = 4
EXIT_NO_MEASURE = 10
EXIT_CONTRADICTION = 11


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    tolerance: float = config.DEFAULT_TOLERANCE
    seed: int = 0
    n: int = 1
    output_format: str = "json"
    bounds: tuple[float, float] = DEFAULT_BOUNDS

    def __post_init__(self) -> None:
        if not self.tolerance > 0:
            raise CliError(EXIT_ARGUMENT, f"tolerance must be positive, got {self.tolerance}")
        if self.subcommand == "qrng" and self.n < 1:
            raise CliError(EXIT_ARGUMENT, f"--n must be at least 1, got {self.n}")


def _out(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _err(text: str) -> None:
    sys.stderr.write(f"kontext: {text}\n")


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def load_diagram(path: str) -> Diagram:
    """Read and parse a diagram file, translating failures into exit codes.

    ``bundled:NAME`` reads one of the packaged fixtures (bug, star1, star3, star7).
    """
    try:
        if path.startswith("bundled:"):
            name = path.split(":", 1)[1]
            text = resources.files("kontext.data").joinpath(f"{name}.json").read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except (OSError, FileNotFoundError) as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from None
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", LegalityWarning)
            diag = parse(text)
        for w in caught:
            _err(f"warning: {w.message}")
        return diag
    except ValidationError as exc:
        raise CliError(EXIT_VALIDATION, f"{path}: {exc}") from None
    except (SchemaError, GeometryError, DiagramError) as exc:
        raise CliError(EXIT_SCHEMA, f"{path}: {exc}") from None


def _require_atom(diag: Diagram, atom_id: str) -> None:
    if atom_id not in diag:
        raise CliError(EXIT_ARGUMENT, f"unknown atom {atom_id!r}")


def _ray(diag: Diagram, atom_id: str):
    _require_atom(diag, atom_id)
    try:
        return diag.ray_of(atom_id)
    except MissingCoordinatesError as exc:
        raise CliError(EXIT_ARGUMENT, str(exc)) from None


def cmd_validate(args, run: RunConfig) -> int:
    diag = load_diagram(args.diagram)
    report = {"atoms": len(diag.atoms), "blocks": len(diag.blocks), "dimension": diag.dimension}
    if diag.is_coordinatized:
        rc = realize_check(diag, run.tolerance)
        report["max_residual"] = rc.max_residual
        if not rc.ok:
            v = rc.violations[0]
            raise CliError(
                EXIT_VALIDATION,
                f"realization: atoms {v.a} and {v.b} of block {v.block} overlap by {v.overlap:.12f}",
            )
    report["valid"] = True
    if run.output_format == "json":
        _out(_dumps(report))
    else:
        _out("\n".join(f"{k:<14}{report[k]}" for k in sorted(report)))
    return EXIT_OK


def cmd_measures(args, run: RunConfig) -> int:
    diag = load_diagram(args.diagram)
    measures = enumerate_two_valued(diag)
    if args.count_only:
        _out(str(len(measures)))
    elif run.output_format == "json":
        _out(json.dumps([dict(sorted(m.items())) for m in measures], sort_keys=True))
    else:
        ids = sorted(diag.atom_ids)
        width = max(len(x) for x in ids)
        rows = [" ".join(x.rjust(width) for x in ids)]
        rows += [" ".join(str(m[x]).rjust(width) for x in ids) for m in measures]
        _out("\n".join(rows))
    if not measures:
        _err("no two-valued measure exists on this diagram")
        return EXIT_NO_MEASURE
    return EXIT_OK


def parse_premise(text: str) -> tuple[str, int]:
    atom, sep, value = text.rpartition("=")
    if not sep or not atom or value not in ("0", "1"):
        raise CliError(EXIT_ARGUMENT, f"bad premise {text!r}; expected ATOM=0 or ATOM=1")
    return atom, int(value)


def cmd_classify(args, run: RunConfig) -> int:
    diag = load_diagram(args.diagram)
    premises: dict[str, int] = {}
    for item in args.set or []:
        atom, value = parse_premise(item)
        _require_atom(diag, atom)
        if premises.get(atom, value) != value:
            raise CliError(EXIT_ARGUMENT, f"atom {atom!r} set to both 0 and 1")
        premises[atom] = value
    try:
        report = classify(diag, premises)
    except ContradictionError as exc:
        if run.output_format == "json":
            _out(_dumps({"contradiction": {"reason": exc.reason, "witness": exc.witness}}))
        _err(f"contradictory premises: {exc}")
        return EXIT_CONTRADICTION
    if run.output_format == "json":
        _out(_dumps(report.to_dict()))
    else:
        width = max(len(x) for x in diag.atom_ids)
        _out("\n".join(f"{x:<{width}}  {s.value}" for x, s in sorted(report.status.items())))
    return EXIT_OK


def cmd_born(args, run: RunConfig) -> int:
    diag = load_diagram(args.diagram)
    p = born_probability(_ray(diag, args.prep), _ray(diag, args.target))
    _out(f"{p:.12f}")
    return EXIT_OK


def _resolve_ref(ref: str):
    path, sep, atom = ref.rpartition(":")
    if not sep or not path or not atom:
        raise CliError(EXIT_ARGUMENT, f"expected FILE:ATOM, got {ref!r}")
    return _ray(load_diagram(path), atom)


def cmd_qrng(args, run: RunConfig) -> int:
    c = _resolve_ref(args.prep)
    b = _resolve_ref(args.target)
    if c.dim != b.dim:
        raise CliError(EXIT_ARGUMENT, "preparation and target have different dimensions")
    try:
        basis = complete_context([b], run.tolerance)
        cfg = QrngConfig(c, basis, 0, run.seed, run.n, run.bounds)
    except ValueError as exc:
        raise CliError(EXIT_ARGUMENT, str(exc)) from None
    result = sample(cfg)
    if not result.certified:
        lo, hi = cfg.bounds
        _err(f"warning: overlap {result.overlap:.12f} outside certification bounds "
             f"[{lo:.12f}, {hi:.12f}]")
    if args.bits_out:
        try:
            write_bits(args.bits_out, result.bits)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.bits_out}: {exc}") from None
    doc = result.to_dict()
    doc["frequency"] = round(doc["frequency"], 12)
    doc["overlap"] = round(doc["overlap"], 12)
    if run.output_format == "json":
        _out(_dumps(doc))
    else:
        _out("\n".join(f"{k:<14}{doc[k]}" for k in sorted(doc)))
    return EXIT_OK


def cmd_export(args, run: RunConfig) -> int:
    diag = load_diagram(args.diagram)
    _out(to_dimacs(diag) if args.dimacs else to_dot(diag, args.name))
    return EXIT_OK


def cmd_generate(args, run: RunConfig) -> int:
    if args.kind == "bug":
        diag = make_bug(coordinatize=not args.bare)
    else:
        if args.n is None or args.n < 1:
            raise CliError(EXIT_ARGUMENT, "generate star needs -n N with N >= 1")
        diag = make_star(args.n, coordinatize=not args.bare)
    _out(serialize(diag).rstrip("\n"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    def shared(parser: argparse.ArgumentParser, tol_default, fmt_default) -> None:
        parser.add_argument("--tolerance", type=float, default=tol_default,
                            help="orthogonality tolerance (default: $KONTEXT_TOLERANCE or 1e-9)")
        parser.add_argument("--format", choices=("json", "table"), dest="output_format",
                            default=fmt_default)

    # accepted before or after the subcommand; subparser defaults must not clobber
    common = argparse.ArgumentParser(add_help=False)
    shared(common, argparse.SUPPRESS, argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="kontext", description=__doc__.splitlines()[0])
    shared(p, None, "json")
    sub = p.add_subparsers(dest="subcommand", required=True)
    _add_parser = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add_parser(*a, parents=[common], **kw)

    s = sub.add_parser("validate", help="check schema, Greechie legality and realization")
    s.add_argument("diagram")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("measures", help="enumerate two-valued measures")
    s.add_argument("diagram")
    s.add_argument("--count-only", action="store_true")
    s.set_defaults(func=cmd_measures)

    s = sub.add_parser("classify", help="classify atoms relative to premises")
    s.add_argument("diagram")
    s.add_argument("--set", action="append", metavar="ATOM=VALUE")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("born", help="Born probability of TARGET given PREP")
    s.add_argument("diagram")
    s.add_argument("prep")
    s.add_argument("target")
    s.set_defaults(func=cmd_born)

    s = sub.add_parser("qrng", help="simulate the QRNG")
    s.add_argument("--prep", required=True, metavar="FILE:ATOM")
    s.add_argument("--target", required=True, metavar="FILE:ATOM")
    s.add_argument("--n", type=int, default=100000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bounds", type=float, nargs=2, metavar=("LOWER", "UPPER"))
    s.add_argument("--bits-out", metavar="PATH", help="write packed target bits, MSB first")
    s.set_defaults(func=cmd_qrng)

    s = sub.add_parser("export", help="render the diagram")
    s.add_argument("diagram")
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true", help="Graphviz DOT (default)")
    fmt.add_argument("--dimacs", action="store_true", help="exactly-one-per-block CNF")
    s.add_argument("--name", default="greechie")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("generate", help="print a named configuration as JSON")
    s.add_argument("kind", choices=("bug", "star"))
    s.add_argument("-n", type=int)
    s.add_argument("--bare", action="store_true", help="omit coordinates")
    s.set_defaults(func=cmd_generate)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = args.tolerance if args.tolerance is not None else config.tolerance_from_env()
        run = RunConfig(
            subcommand=args.subcommand,
            inputs=[v for k in ("diagram", "prep", "target") if isinstance(v := getattr(args, k, None), str)],
            tolerance=tol,
            seed=getattr(args, "seed", 0),
            n=args.n if args.subcommand == "qrng" else 1,
            output_format=args.output_format,
            bounds=tuple(args.bounds) if getattr(args, "bounds", None) else DEFAULT_BOUNDS,
        )
    except ValueError as exc:
        _err(str(exc))
        return EXIT_ARGUMENT
    except CliError as exc:
        _err(str(exc))
        return exc.code
    previous = config.get_tolerance()
    config.set_tolerance(run.tolerance)
    try:
        return args.func(args, run)
    except CliError as exc:
        _err(str(exc))
        return exc.code
    except UnknownAtomError as exc:
        _err(str(exc))
        return EXIT_ARGUMENT
    finally:
        config.set_tolerance(previous)


if __name__ == "__main__":
    sys.exit(main())
