"""Model and kernel flags shared by classify, oracle, scan and simulate"""
import argparse
import sys
from typing import Dict, Optional, Tuple

from pydantic import BaseModel

from apps.errors import ArgumentError
from apps.worker.spectral.kernels import KernelSpec, parse_family
from apps.worker.spectral.linearization import Model, make_model

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_UNSTABLE = 10
EXIT_SIM_MISMATCH = 11


def add_model_arguments(parser: argparse.ArgumentParser, require_problem: bool = True) -> None:
    group = parser.add_argument_group("model")
    group.add_argument("--problem", choices=["p1", "p2"], required=require_problem)
    group.add_argument("--kernel", help="kernel family, e.g. exp1d, gaussian, window1d")
    group.add_argument("--alpha", type=float, default=1.0)
    group.add_argument("--N", dest="N", type=float, help="window half-width")
    group.add_argument("--dim", type=int, help="ambient dimension (gaussian only)")
    group.add_argument("--a", dest="a", type=float)
    group.add_argument("--b", dest="b", type=float)
    group.add_argument("--d", dest="d", type=float, help="diffusion coefficient (problem 2)")
    group.add_argument("--k", dest="k", type=float, help="reaction rate (problem 1)")
    group.add_argument("--branch", type=int, choices=[1, 2], help="constant state c1 or c2 (problem 2)")


def kernel_from_args(args: argparse.Namespace) -> KernelSpec:
    if not args.kernel:
        raise ArgumentError("--kernel is required")
    return KernelSpec(
        family=parse_family(args.kernel),
        alpha=args.alpha,
        window_half_width=args.N,
        dim=args.dim,
    )


def model_parameters(args: argparse.Namespace) -> Dict[str, float]:
    """Model flags that were given, in a fixed order"""
    names = ("k", "a", "b") if args.problem == "p1" else ("d", "a", "b")
    return {name: getattr(args, name) for name in names if getattr(args, name) is not None}


def model_from_parameters(problem: str, params: Dict[str, float]) -> Model:
    if params.get("a") is None or params.get("b") is None:
        raise ArgumentError("Model parameters a and b are required")
    return make_model(problem, a=params["a"], b=params["b"], k=params.get("k"), d=params.get("d"))


def model_from_args(args: argparse.Namespace) -> Model:
    return model_from_parameters(args.problem, model_parameters(args))


def branch_from_args(args: argparse.Namespace) -> Optional[int]:
    if args.problem == "p1":
        if args.branch not in (None, 1):
            raise ArgumentError("Problem 1 has a single constant state; drop --branch")
        return None
    return args.branch or 1


def model_kernel_branch(args: argparse.Namespace) -> Tuple[Model, KernelSpec, Optional[int]]:
    return model_from_args(args), kernel_from_args(args), branch_from_args(args)


def emit_json(payload: BaseModel) -> None:
    sys.stdout.write(payload.model_dump_json(indent=2))
    sys.stdout.write("\n")
