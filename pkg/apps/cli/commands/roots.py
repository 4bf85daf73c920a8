import argparse
import math

from apps.cli.commands.common import EXIT_OK, emit_json
from apps.cli.schemas.verdicts import RootOutput
from apps.errors import ArgumentError
from apps.worker.analysis.scalar_roots import (
    lemma7_artifacts,
    lemma7_function,
    lemma8_s0,
    solve_z1,
)
from apps.worker.spectral.linearization import stationary_p2


def register(subparsers) -> None:
    parser = subparsers.add_parser("roots", help="special roots z1, x*, s0")
    parser.add_argument("target", choices=["z1", "xstar", "s0"])
    parser.add_argument("--a", dest="a", type=float)
    parser.add_argument("--b", dest="b", type=float)
    parser.add_argument("--c1", type=float, help="larger constant state, instead of --a")
    parser.set_defaults(handler=cmd_roots)


def _c1_and_b(args: argparse.Namespace):
    if args.b is None:
        raise ArgumentError(f"roots {args.target} needs --b")
    if args.c1 is not None:
        return args.c1, args.b
    if args.a is None:
        raise ArgumentError(f"roots {args.target} needs --a or --c1")
    c1, _, _ = stationary_p2(args.a, args.b)
    return c1, args.b


def cmd_roots(args: argparse.Namespace) -> int:
    if args.target == "z1":
        result = solve_z1()
        output = RootOutput(
            target="z1",
            root=result.root,
            residual=result.residual,
            iterations=result.iterations,
            bracket=(math.pi, 1.5 * math.pi),
        )
    elif args.target == "xstar":
        c1, b = _c1_and_b(args)
        artifacts = lemma7_artifacts(c1, b)
        output = RootOutput(
            target="xstar",
            root=artifacts.x_star,
            residual=lemma7_function(artifacts.x_star, c1, b),
            bracket=(artifacts.x1, b),
            x1=artifacts.x1,
            x2=artifacts.x2,
        )
    else:
        c1, b = _c1_and_b(args)
        result = lemma8_s0(c1, b)
        output = RootOutput(
            target="s0",
            root=result.root,
            residual=result.residual,
            iterations=result.iterations,
            bracket=result.bracket,
        )
    emit_json(output)
    return EXIT_OK
