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
from apps.cli.schemas.verdicts import ClassifyOutput, DerivationSchema, VerdictSchema
from apps.worker.scoring.stability_criteria import classify

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("classify", help="analytic stability verdict for a constant state")
    add_model_arguments(parser)
    parser.set_defaults(handler=cmd_classify)


def cmd_classify(args: argparse.Namespace) -> int:
    """Verdict JSON on stdout; exit 0 stable, 10 unstable (for the selected branch)"""
    model, kernel, branch = model_kernel_branch(args)
    result = classify(model, kernel)
    selected = result.select(branch)

    verdicts = [result.branch1] + ([result.branch2] if result.branch2 is not None else [])
    emit_json(
        ClassifyOutput(
            problem=args.problem,
            kernel=KernelSchema.model_validate(kernel),
            parameters=model_parameters(args),
            selected_branch=branch,
            verdict=VerdictSchema.model_validate(selected),
            verdicts=[VerdictSchema.model_validate(v) for v in verdicts],
            derivation=DerivationSchema.model_validate(result.derivation),
        )
    )
    return EXIT_OK if selected.stable else EXIT_UNSTABLE
