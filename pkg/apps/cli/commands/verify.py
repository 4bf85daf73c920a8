import argparse

from apps.cli.commands.common import EXIT_OK, EXIT_UNSTABLE, emit_json
from apps.cli.schemas.sweeps import DisagreementSchema, VerifySummary
from apps.worker.analysis.sampling import PERTURBATIONS
from apps.worker.scoring.verdict import TheoremTag
from apps.worker.spectral.kernels import parse_family
from apps.worker.spectral.linearization import ModelP1
from apps.worker.tasks.verify_agreement import run_verification


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="classifier/oracle agreement on random draws")
    parser.add_argument(
        "--theorem",
        required=True,
        choices=[t.value for t in TheoremTag if t is not TheoremTag.POSITIVE_KERNEL],
    )
    parser.add_argument("--count", type=int, default=20, help="random parameter draws")
    parser.add_argument("--seed", type=int, help="RNG seed (default: NSL_SEED)")
    parser.add_argument("--deltas", type=float, nargs="+", default=list(PERTURBATIONS))
    parser.add_argument("--window-family", default="window1d", help="kernel for T1")
    parser.add_argument("--gaussian-dim", type=int, default=1, help="dimension for T4")
    parser.set_defaults(handler=cmd_verify)


def _parameters(model) -> dict:
    names = ("k", "a", "b") if isinstance(model, ModelP1) else ("d", "a", "b")
    return {name: getattr(model, name) for name in names}


def cmd_verify(args: argparse.Namespace) -> int:
    """Agreement counts as JSON; exit 0 on full agreement, 10 otherwise"""
    summary = run_verification(
        TheoremTag(args.theorem),
        args.count,
        seed=args.seed,
        deltas=tuple(args.deltas),
        window_family=parse_family(args.window_family),
        gaussian_dim=args.gaussian_dim,
    )
    emit_json(
        VerifySummary(
            theorem=summary.theorem,
            seed=summary.seed,
            cases=summary.cases,
            agreements=summary.agreements,
            disagreements=[
                DisagreementSchema(
                    parameters={**_parameters(o.case.model), "alpha": o.case.kernel.alpha},
                    delta=o.case.delta,
                    classifier_stable=o.classifier_stable,
                    oracle_stable=o.oracle_stable,
                    oracle_min=o.oracle_min,
                )
                for o in summary.disagreements
            ],
            deltas=tuple(args.deltas),
        )
    )
    return EXIT_OK if summary.all_agree else EXIT_UNSTABLE
