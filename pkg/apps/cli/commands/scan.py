import argparse
import json
import logging
import sys
from pathlib import Path

from apps.cli.commands.common import EXIT_OK, add_model_arguments, kernel_from_args, model_parameters
from apps.cli.schemas.sweeps import SweepSpecSchema
from apps.errors import ArgumentError
from apps.worker.export.csv_export import export_sweep_csv
from apps.worker.tasks.run_sweep import DEFAULT_OUTPUTS, SweepOutput, SweepParameter, SweepSpec, run_sweep

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("scan", help="parameter sweep to CSV")
    add_model_arguments(parser, require_problem=False)
    parser.add_argument("--spec", help="sweep request JSON file")
    parser.add_argument("--param", choices=[p.value for p in SweepParameter])
    parser.add_argument("--lo", type=float)
    parser.add_argument("--hi", type=float)
    parser.add_argument("--steps", type=int)
    parser.add_argument("--log", action="store_true", help="geometric spacing")
    parser.add_argument(
        "--outputs",
        nargs="+",
        choices=[o.value for o in SweepOutput],
        default=[o.value for o in DEFAULT_OUTPUTS],
    )
    parser.add_argument("--out", help="CSV path (default: stdout)")
    parser.set_defaults(handler=cmd_scan)


def spec_from_args(args: argparse.Namespace) -> SweepSpec:
    if args.spec:
        payload = json.loads(Path(args.spec).read_text(encoding="utf-8"))
        return SweepSpecSchema.model_validate(payload).to_spec()

    missing = [flag for flag in ("problem", "param", "lo", "hi", "steps") if getattr(args, flag) is None]
    if missing:
        raise ArgumentError(f"scan needs --spec or all of: {', '.join('--' + m for m in missing)}")

    parameter = SweepParameter(args.param)
    # the swept value stands in until each row replaces it
    if parameter is SweepParameter.ALPHA:
        args.alpha = args.lo
    if parameter is SweepParameter.N:
        args.N = args.lo
    fixed = {k: v for k, v in model_parameters(args).items() if k != parameter.value}

    return SweepSpec(
        problem=args.problem,
        kernel=kernel_from_args(args),
        parameter=parameter,
        lo=args.lo,
        hi=args.hi,
        steps=args.steps,
        log=args.log,
        fixed=fixed,
        outputs=tuple(SweepOutput(o) for o in args.outputs),
        branch=args.branch or 1,
    )


def cmd_scan(args: argparse.Namespace) -> int:
    """CSV rows in sweep order plus a '# disagreements=N' line"""
    spec = spec_from_args(args)
    rows = run_sweep(spec)
    text = export_sweep_csv(rows, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK
