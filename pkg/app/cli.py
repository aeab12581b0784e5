"""Command line entry point: ``python -m app.cli <subcommand>``.

Exit status is 0 when everything passed, 1 when a suite reported a failed
check and 2 on malformed input or usage errors.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Type, TypeVar

from pydantic import BaseModel, ValidationError

from app.config import settings
from app.core import catalog
from app.core.errors import MalformedInputError, TorsionAlgebraError
from app.core.exterior import endo_form
from app.core.liealg import LieSubalgebra, decompose, stabilizer
from app.core.reductive import canonical, connection_report
from app.models.schemas import (
    AlgebraResponse,
    AltFormSchema,
    DecompositionResponse,
    HolonomyResponse,
    LieSubalgebraSchema,
    Listing,
    ModelBundleSchema,
    NomizuMapSchema,
    ReductiveModelSchema,
    SuiteReportSchema,
    matrix_to_wire,
)
from app.services.verify import list_suites, run_suite

logger = logging.getLogger(__name__)

S = TypeVar("S", bound=BaseModel)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError(f"tolerance must be positive, got {raw}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON on stdout")
    common.add_argument("--mode", choices=("exact", "float"), default=settings.MODE,
                        help=f"scalar mode (default: {settings.MODE})")
    common.add_argument("--tol", type=_positive_float, default=settings.TOL,
                        help=f"float tolerance (default: {settings.TOL})")
    common.add_argument("--seed", type=int, default=settings.SEED, help=f"sampling seed (default: {settings.SEED})")
    common.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")

    parser = argparse.ArgumentParser(prog="skew-torsion", description="Algebra of parallel skew torsion.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run a check suite")
    p.add_argument("suite", help="suite name or 'all'")

    p = sub.add_parser("stabilizer", parents=[common], help="stabilizer algebra of a form")
    p.add_argument("--form", type=Path, required=True, help="AltForm JSON file")

    p = sub.add_parser("decompose", parents=[common], help="irreducible splitting of a Lie subalgebra action")
    p.add_argument("--algebra", type=Path, required=True, help="LieSubalgebra JSON file")

    p = sub.add_parser("holonomy", parents=[common], help="holonomy of an invariant connection")
    p.add_argument("--model", type=Path, required=True, help="ReductiveModel JSON file")
    p.add_argument("--nomizu", type=Path, help="NomizuMap JSON file (canonical connection if omitted)")

    p = sub.add_parser("model", parents=[common], help="build a catalog model")
    p.add_argument("name", choices=sorted(catalog.MODEL_BUILDERS))
    p.add_argument("--param", action="append", default=[], metavar="K=V", help="model parameter, repeatable")
    p.add_argument("--dump", type=Path, help="write the bundle JSON to this file")

    sub.add_parser("list", parents=[common], help="list suites and catalog models")

    p = sub.add_parser("serve", parents=[common], help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _load(path: Path, schema: Type[S]) -> S:
    try:
        text = path.read_text()
    except OSError as exc:
        raise MalformedInputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return schema.model_validate_json(text)
    except ValidationError as exc:
        raise MalformedInputError(_describe(path, exc)) from exc


def _describe(path, exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{path}: {loc}: {err['msg']}")
    return "\n".join(lines)


def _emit(args, payload: BaseModel, text: Sequence[str]) -> None:
    if args.json:
        print(payload.model_dump_json(indent=2))
    else:
        for line in text:
            print(line)


def _basis_lines(g: LieSubalgebra) -> List[str]:
    return [f"  {endo_form(b, g.gram)!r}" for b in g.basis]


def cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, tol=args.tol, mode=args.mode)
    lines = []
    for c in report.checks:
        line = f"{c.status.upper():4}  {c.id}"
        if c.status != "pass":
            line += f"  observed {c.observed}, expected {c.expected or 0}"
            if c.detail:
                line += f" ({c.detail})"
            line += f"\n      {c.anchor}"
        lines.append(line)
    lines.append(f"{report.suite}: {report.passed} passed, {report.failed} failed, {report.skipped} skipped "
                 f"({report.mode}, seed {report.seed})")
    _emit(args, SuiteReportSchema.from_report(report), lines)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_stabilizer(args) -> int:
    form = _load(args.form, AltFormSchema).to_form()
    if args.mode == "float":
        form = form.as_float()
    g = stabilizer(form)
    _emit(args, AlgebraResponse(dimension=g.dimension, algebra=LieSubalgebraSchema.from_algebra(g)),
          [f"dimension {g.dimension}", "basis (as 2-forms):", *_basis_lines(g)])
    return EXIT_OK


def cmd_decompose(args) -> int:
    g = _load(args.algebra, LieSubalgebraSchema).to_algebra()
    if args.mode == "float":
        g = g.as_float()
    rep = decompose(g, seed=args.seed)
    payload = DecompositionResponse(dims=rep.dims, irreducible=rep.irreducible, isotypic=rep.isotypic,
                                    commutantDims=rep.commutant_dims,
                                    blocks=[matrix_to_wire(b) for b in rep.blocks], seed=rep.seed)
    lines = [f"dimensions {rep.dims}"]
    for i, dim in enumerate(rep.dims):
        kind = "irreducible" if rep.irreducible[i] else "reducible"
        lines.append(f"  block {i}: dim {dim}, {kind}, commutant dim {rep.commutant_dims[i]}")
    lines.append(f"isotypic classes {rep.isotypic}")
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_holonomy(args) -> int:
    model = _load(args.model, ReductiveModelSchema).to_model()
    lam = canonical(model) if args.nomizu is None else _load(args.nomizu, NomizuMapSchema).to_nomizu()
    if args.mode == "float":
        model, lam = model.as_float(), lam.as_float()
    report = connection_report(model, lam)
    hol = report.holonomy
    payload = HolonomyResponse(
        dimension=hol.dimension, holonomy=LieSubalgebraSchema.from_algebra(hol), metric=report.metric,
        torsionForm=None if report.torsion_form is None else AltFormSchema.from_form(report.torsion_form))
    lines = [f"holonomy dimension {hol.dimension}", f"metric {report.metric}"]
    if report.torsion_form is not None:
        lines.append(f"torsion {report.torsion_form!r}")
    lines += ["basis (as 2-forms):", *_basis_lines(hol)]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_model(args) -> int:
    bundle = catalog.build(args.name, catalog.parse_params(args.name, args.param))
    if args.mode == "float":
        bundle = bundle.as_float()
    payload = ModelBundleSchema.from_bundle(bundle)
    if args.dump:
        args.dump.write_text(payload.model_dump_json(indent=2))
        logger.info("wrote %s", args.dump)
    lines = [f"{bundle.name}: dimension {bundle.dim}",
             f"params {', '.join(f'{k}={v}' for k, v in bundle.params.items()) or 'none'}",
             f"torsion {bundle.tau!r}",
             f"tensors {', '.join(bundle.tensors) or 'none'}"]
    if bundle.model is not None:
        lines.append(f"dim h = {bundle.model.dim_h}, dim m = {bundle.model.dim_m}")
    lines += bundle.notes
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_list(args) -> int:
    suites = list_suites()
    if args.json:
        print(Listing(suites=suites, models=sorted(catalog.MODEL_BUILDERS)).model_dump_json(indent=2))
        return EXIT_OK
    print("suites:")
    for name, count in suites.items():
        print(f"  {name:20} {count} checks")
    print("models:")
    for name, spec in catalog.MODEL_BUILDERS.items():
        params = f" [{', '.join(spec.params)}]" if spec.params else ""
        print(f"  {name:20} {spec.description}{params}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    uvicorn.run("app.main:app", host=args.host, port=args.port, reload=False)
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "stabilizer": cmd_stabilizer,
    "decompose": cmd_decompose,
    "holonomy": cmd_holonomy,
    "model": cmd_model,
    "list": cmd_list,
    "serve": cmd_serve,
}


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    try:
        return COMMANDS[args.command](args)
    except TorsionAlgebraError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(_describe("<input>", exc), file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
