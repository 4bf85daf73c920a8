import argparse
import logging

from apps.cli.commands.common import (
    EXIT_OK,
    EXIT_UNSTABLE,
    add_model_arguments,
    emit_json,
    model_kernel_branch,
    model_parameters,
)
from apps.cli.schemas.kernels import KernelSchema
from apps.cli.schemas.oracle import OracleOutput, OracleReportSchema, SearchSpecSchema
from apps.worker.analysis.oracle import SearchSpec, default_search_spec, grid_min_symbol
from apps.worker.spectral.linearization import build_symbol

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("oracle", help="brute-force minimum of the spectral symbol")
    add_model_arguments(parser)
    parser.add_argument("--radius", type=float, help="search radius (default: coercivity radius)")
    parser.add_argument("--points", type=int, help="coarse points per axis (>= 512)")
    parser.add_argument("--refine-iterations", type=int)
    parser.set_defaults(handler=cmd_oracle)


def cmd_oracle(args: argparse.Namespace) -> int:
    model, kernel, branch = model_kernel_branch(args)
    symbol = build_symbol(model, kernel, branch)

    default = default_search_spec(symbol)
    spec = SearchSpec(
        reduction=default.reduction,
        radius=args.radius if args.radius is not None else default.radius,
        coarse_points=args.points if args.points is not None else default.coarse_points,
        refine_iterations=args.refine_iterations or default.refine_iterations,
    )
    report = grid_min_symbol(symbol, spec)

    emit_json(
        OracleOutput(
            problem=args.problem,
            kernel=KernelSchema.model_validate(kernel),
            parameters=model_parameters(args),
            branch=branch,
            search=SearchSpecSchema.model_validate(spec),
            report=OracleReportSchema.model_validate(report),
        )
    )
    return EXIT_UNSTABLE if report.unstable else EXIT_OK
