import argparse
import json
import logging
from pathlib import Path

from apps.cli.commands.common import (
    EXIT_OK,
    EXIT_SIM_MISMATCH,
    add_model_arguments,
    emit_json,
    model_kernel_branch,
    model_from_parameters,
    model_parameters,
)
from apps.cli.schemas.kernels import KernelSchema
from apps.cli.schemas.simulation import SimConfigSchema, SimSummary
from apps.errors import ArgumentError, DomainError
from apps.worker.analysis.oracle import grid_min_symbol
from apps.worker.export.csv_export import export_simulation_csv
from apps.worker.scoring.stability_criteria import classify
from apps.worker.simulation.spectral_sim import make_sim_config, simulate_nonlinear
from apps.worker.spectral.linearization import build_symbol

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="nonlinear pseudospectral run with rate fit")
    add_model_arguments(parser, require_problem=False)
    parser.add_argument("--config", help="simulation request JSON file")
    parser.add_argument("--grid-points", type=int)
    parser.add_argument("--dt", type=float)
    parser.add_argument("--t-final", type=float)
    parser.add_argument("--amplitude-ratio", type=float)
    parser.add_argument("--box-half-length", type=float)
    parser.add_argument("--out", help="time-series CSV path")
    parser.set_defaults(handler=cmd_simulate)


def request_from_args(args: argparse.Namespace) -> SimConfigSchema:
    if args.config:
        payload = json.loads(Path(args.config).read_text(encoding="utf-8"))
        return SimConfigSchema.model_validate(payload)
    if args.problem is None:
        raise ArgumentError("simulate needs --config or --problem")
    model, kernel, branch = model_kernel_branch(args)
    return SimConfigSchema(
        problem=args.problem,
        kernel=KernelSchema.model_validate(kernel),
        parameters=model_parameters(args),
        branch=branch,
        grid_points=args.grid_points,
        amplitude_ratio=args.amplitude_ratio,
        dt=args.dt,
        t_final=args.t_final,
        box_half_length=args.box_half_length,
    )


def reference_verdict(model, kernel, branch, symbol):
    """(stable, source): the analytic verdict when one exists, else the oracle's"""
    try:
        return classify(model, kernel).select(branch).stable, "classifier"
    except DomainError as exc:
        logger.info(f"No analytic verdict ({exc}); using the oracle")
        return not grid_min_symbol(symbol).unstable, "oracle"


def cmd_simulate(args: argparse.Namespace) -> int:
    """Summary JSON on stdout; exit 0 when the rate sign matches the verdict, 11 otherwise"""
    request = request_from_args(args)
    params = request.parameters
    model = model_from_parameters(request.problem, params)
    kernel = request.kernel.to_spec()
    branch = None if request.problem == "p1" else (request.branch or 1)
    symbol = build_symbol(model, kernel, branch)

    cfg = make_sim_config(
        symbol,
        seed_frequency=request.seed_frequency,
        grid_points=request.grid_points,
        amplitude_ratio=request.amplitude_ratio,
        dt=request.dt,
        t_final=request.t_final,
        box_half_length=request.box_half_length,
    )
    result = simulate_nonlinear(cfg)
    if args.out:
        export_simulation_csv(result, args.out)

    stable, source = reference_verdict(model, kernel, branch, symbol)
    rate = result.measured_rate
    matches = rate is not None and ((rate <= 0) if stable else (rate > 0))
    if not matches:
        logger.warning(f"Simulated rate {rate!r} does not match the {source} verdict (stable={stable})")

    emit_json(
        SimSummary(
            problem=request.problem,
            kernel=request.kernel,
            parameters=params,
            branch=branch,
            grid_points=cfg.grid_points,
            box_half_length=cfg.box_half_length,
            dt=cfg.dt,
            t_final=cfg.t_final,
            mode=list(cfg.mode),
            seed_frequency=list(cfg.seed_frequency),
            predicted_rate=result.predicted_rate,
            measured_rate=rate,
            fit_window=result.fit_window,
            blew_up=result.blew_up,
            steps=result.steps,
            reference_stable=stable,
            reference_source=source,
            rate_sign_matches=matches,
        )
    )
    return EXIT_OK if matches else EXIT_SIM_MISMATCH
