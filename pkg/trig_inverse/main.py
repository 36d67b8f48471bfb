import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from trig_inverse.config import TOLERANCE_NAMES, Settings, get_settings
from trig_inverse.gauss import spectrum, zero_eigenvalue_count
from trig_inverse.model import MatrixKind, OutputDocument, TrigMatrix, reports_summary
from trig_inverse.ntheory import DomainError
from trig_inverse.trigmat import build_matrix, explicit_inverse, hat_coefficients
from trig_inverse.utils.functions import complex_pair, dump_json, format_complex, format_float, identity_residual
from trig_inverse.verify import CheckName, sweep

logger = logging.getLogger("trig_inverse")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    """Malformed command line beyond what argparse catches."""
    pass


def _matrix_payload(matrix: TrigMatrix) -> Dict[str, Any]:
    return {
        "dimension": matrix.dimension,
        "representatives": list(matrix.representatives.members),
        "entries": [
            [{"sign": e.sign, "index": e.index, "value": e.value} for e in row]
            for row in matrix.entries
        ],
    }


def cmd_build(n: int, kind: MatrixKind, settings: Settings) -> OutputDocument:
    """The matrix with a (sign, index, value) triple per entry."""
    matrix = build_matrix(n, kind)
    return OutputDocument(
        schema_version=settings.schema_version,
        command="build",
        parameters={"n": n, "kind": MatrixKind(kind).value},
        payload=_matrix_payload(matrix),
    )


def cmd_invert(n: int, kind: MatrixKind, symbolic: bool, settings: Settings) -> OutputDocument:
    """
    The exact coefficient table (symbolic) or the float inverse with its reconstruction residual.

    Raises:
        SingularMatrixError: the matrix is singular; the message names the criterion
    """
    kind = MatrixKind(kind)
    if symbolic:
        coefficients = hat_coefficients(n, kind)
        letter = "s" if kind is MatrixKind.SINE else "c"
        payload = {
            "denominator": coefficients.denominator,
            "basis": [f"{letter}_{m}" for m in coefficients.representatives.members],
            "coefficients": [
                {"index": l, "numerators": list(row)}
                for l, row in zip(coefficients.representatives.members, coefficients.numerators)
            ],
        }
    else:
        inverse = explicit_inverse(n, kind)
        matrix = build_matrix(n, kind)
        payload = _matrix_payload(inverse)
        payload["reconstruction_residual"] = identity_residual(matrix.values @ inverse.values)
    return OutputDocument(
        schema_version=settings.schema_version,
        command="invert",
        parameters={"n": n, "kind": kind.value, "symbolic": symbolic},
        payload=payload,
    )


def cmd_eigen(n: int, kind: MatrixKind, settings: Settings) -> OutputDocument:
    """Eigenvalues labelled by their characters, plus |det| = prod |λ|."""
    data = spectrum(n, kind)
    return OutputDocument(
        schema_version=settings.schema_version,
        command="eigen",
        parameters={"n": n, "kind": data.kind.value},
        payload={
            "eigenvalues": [
                {"character": list(chi.exponents), "conductor": chi.conductor, "value": complex_pair(lam)}
                for chi, lam in data.pairs
            ],
            "abs_determinant": float(np.prod(np.abs(data.eigenvalues))),
            "zero_eigenvalues": zero_eigenvalue_count(data, settings),
        },
    )


def cmd_verify(
    n_min: int,
    n_max: int,
    checks: Optional[Sequence[CheckName]],
    settings: Settings,
    workers: Optional[int] = None,
    progress: bool = False,
    timings: bool = False,
) -> Tuple[OutputDocument, int]:
    """Run the sweep; the exit code is 0 exactly when no check failed."""
    reports = sweep(n_min, n_max, checks, settings=settings, workers=workers, progress=progress)
    summary = reports_summary(reports)
    exclude = None if timings else {"elapsed_seconds"}
    document = OutputDocument(
        schema_version=settings.schema_version,
        command="verify",
        parameters={
            "from": n_min,
            "to": n_max,
            "checks": [CheckName(c).value for c in checks] if checks else [c.value for c in CheckName],
        },
        payload={
            "summary": summary.model_dump(),
            "reports": [r.model_dump(mode="json", exclude=exclude) for r in reports],
        },
    )
    return document, EXIT_OK if summary.ok else EXIT_CHECK_FAILED


def _frames(document: OutputDocument) -> List[Tuple[str, pd.DataFrame]]:
    """Tabular views of a document for the table and csv formats."""
    payload = document.payload
    if document.command == "verify":
        return [("reports", pd.DataFrame(payload["reports"]))]
    if document.command == "eigen":
        frame = pd.DataFrame(
            {
                "character": [str(e["character"]) for e in payload["eigenvalues"]],
                "conductor": [e["conductor"] for e in payload["eigenvalues"]],
                "eigenvalue": [format_complex(complex(*e["value"])) for e in payload["eigenvalues"]],
            }
        )
        return [("eigenvalues", frame)]
    if "coefficients" in payload:
        hat = "ŝ" if document.parameters["kind"] == MatrixKind.SINE.value else "ĉ"
        frame = pd.DataFrame(
            [row["numerators"] for row in payload["coefficients"]],
            index=[f"{hat}_{row['index']}" for row in payload["coefficients"]],
            columns=payload["basis"],
        )
        return [(f"numerators over {payload['denominator']}", frame)]
    labels = payload["representatives"]
    letter = "s" if document.parameters["kind"] == MatrixKind.SINE.value else "c"
    if document.command == "invert":
        letter = "ŝ" if letter == "s" else "ĉ"
    symbols = pd.DataFrame(
        [[f"{'-' if e['sign'] < 0 else ''}{letter}_{e['index']}" for e in row] for row in payload["entries"]],
        index=labels,
        columns=labels,
    )
    values = pd.DataFrame([[e["value"] for e in row] for row in payload["entries"]], index=labels, columns=labels)
    return [("symbols", symbols), ("values", values)]


def render(document: OutputDocument, fmt: str) -> bytes:
    if fmt == "json":
        return dump_json(document.model_dump(mode="json"))
    parts = []
    for title, frame in _frames(document):
        if fmt == "csv":
            parts.append(frame.to_csv(index=document.command != "verify", float_format=format_float))
        else:
            parts.append(f"# {title}\n{frame.to_string(float_format=format_float)}\n")
    return "\n".join(parts).encode("utf-8")


def _parse_tolerances(items: Optional[List[str]]) -> Dict[str, float]:
    overrides = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects NAME=VALUE, got {item!r}")
        if not name.endswith("_tolerance"):
            name = f"{name}_tolerance"
        if name not in TOLERANCE_NAMES:
            raise UsageError(f"unknown tolerance {name!r}; choose from {', '.join(TOLERANCE_NAMES)}")
        try:
            overrides[name] = float(value)
        except ValueError:
            raise UsageError(f"tolerance {name} is not a number: {value!r}")
    return overrides


def _parse_checks(text: Optional[str]) -> Optional[List[CheckName]]:
    if text is None:
        return None
    names = [part.strip() for part in text.split(",") if part.strip()]
    if names == ["all"]:
        return None
    try:
        return [CheckName(name) for name in names]
    except ValueError:
        raise UsageError(f"unknown check in {text!r}; choose from {', '.join(c.value for c in CheckName)}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trig-inverse",
        description="Sine/cosine matrices over reduced residues mod n: inverses, spectra and verification.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="INFO with -v, DEBUG with -vv")
    sub = parser.add_subparsers(dest="command", required=True)

    def matrix_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--n", type=int, required=True, help="Modulus n >= 3")
        p.add_argument("--kind", choices=[k.value for k in MatrixKind], required=True)
        p.add_argument("--format", choices=["json", "table", "csv"], default="json")

    matrix_args(sub.add_parser("build", help="Build S or C"))
    invert = sub.add_parser("invert", help="Explicit inverse of S or C")
    matrix_args(invert)
    invert.add_argument("--symbolic", action="store_true", help="Exact coefficient table of ŝ_l / ĉ_l")
    matrix_args(sub.add_parser("eigen", help="Eigenvalues via Gauss sums"))

    verify = sub.add_parser("verify", help="Identity and oracle sweep")
    verify.add_argument("--from", dest="n_min", type=int, required=True)
    verify.add_argument("--to", dest="n_max", type=int, required=True)
    verify.add_argument("--checks", default=None, help=f"Comma-separated subset of: {', '.join(c.value for c in CheckName)}")
    verify.add_argument("--tol", action="append", metavar="NAME=VALUE", help="Override a tolerance, e.g. matrix=1e-9")
    verify.add_argument("--workers", type=int, default=None)
    verify.add_argument("--format", choices=["json", "table", "csv"], default="json")
    verify.add_argument("--timings", action="store_true", help="Include elapsed times (output no longer reproducible)")
    verify.add_argument("--progress", action="store_true", help="Progress bar on stderr")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Configure logging
    logging.basicConfig(
        level=[get_settings().log_level, "INFO", "DEBUG"][min(args.verbose, 2)],
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        if args.command == "verify":
            overrides = _parse_tolerances(args.tol)
            settings = Settings(**overrides) if overrides else get_settings()
            checks = _parse_checks(args.checks)
            if not 3 <= args.n_min <= args.n_max:
                raise UsageError(f"need 3 <= --from <= --to, got {args.n_min}..{args.n_max}")
            if args.workers is not None and args.workers < 1:
                raise UsageError("--workers must be positive")
        else:
            settings = get_settings()
    except (UsageError, ValidationError) as e:
        logger.error(f"Usage error: {e}")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    code = EXIT_OK
    try:
        if args.command == "build":
            document = cmd_build(args.n, args.kind, settings)
        elif args.command == "invert":
            document = cmd_invert(args.n, args.kind, args.symbolic, settings)
        elif args.command == "eigen":
            document = cmd_eigen(args.n, args.kind, settings)
        else:
            document, code = cmd_verify(
                args.n_min, args.n_max, checks, settings,
                workers=args.workers, progress=args.progress, timings=args.timings,
            )
    except DomainError as e:
        logger.error(str(e))
        return EXIT_DOMAIN

    sys.stdout.buffer.write(render(document, args.format))
    sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
