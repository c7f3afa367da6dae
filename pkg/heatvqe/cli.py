"""
HeatVQE command line.

    heatvqe direct    --samples 20 --seed 1
    heatvqe direct    --landscape --grid 30 --out landscape.csv
    heatvqe hadamard  --ansatz cba --c 2.0 --n 2..8 --target 0.99 --out fig5.csv
    heatvqe ata       --n 2..8 --c 0.1,0.5,1,2 --target 0.99 --mode exact --out fig10.csv
    heatvqe ata-noise --p 0..1 --p-points 5 --out fig12.csv
    heatvqe campaign  fig7 --samples 1000 --out fig7.csv
    heatvqe summarize fig10.csv --y depth
    heatvqe evolve    --solver ata --n 3 --c 2 --steps 4 --out trajectory.csv
    heatvqe list

Exit codes: 0 success, 1 runtime failure, 2 configuration error, 3 cap violation.
"""

import argparse
import csv
import logging
import sys
from typing import Optional, Sequence

import numpy as np

from .campaigns import get_all_campaign_names, get_campaigns, run_campaign
from .campaigns.evolve_campaign import cosine_profile
from .config import CAP_ENV_VAR, MODES, CampaignConfig, cap_qubits, make_rng, stream_id
from .errors import CapExceededError, ConfigError, HeatVQEError, SummaryError
from .modules.direct_vqe import build_hamiltonian, demo_problem, minimize, refine_minima, scan_landscape
from .modules.heat import GridParams, HeatProblem, time_step_evolve
from .modules.solvers import get_solver_class, get_solvers
from .modules.statevector import Backend
from .records import summarize

logger = logging.getLogger("HeatVQE.CLI")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CAP = 3


def print_progress(message: str, level: str = "INFO"):
    """Print progress message."""
    prefix = {
        "INFO": "\033[94m•\033[0m",
        "OK": "\033[92m✓\033[0m",
        "WARN": "\033[93m!\033[0m",
        "ERROR": "\033[91m✗\033[0m",
        "PROGRESS": "\033[96m→\033[0m",
        "HEADER": "\033[95m■\033[0m",
    }.get(level, "•")
    print(f"  {prefix} {message}")


def parse_int_range(text: str) -> tuple:
    """'2..8' -> (2, ..., 8); '2,4,6' -> (2, 4, 6); '3' -> (3,)."""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
            if high < low:
                raise ConfigError(f"empty range {text!r}")
            return tuple(range(low, high + 1))
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigError(f"cannot parse integer range {text!r}") from e


def parse_float_list(text: str, points: Optional[int] = None) -> tuple:
    """'0.1,0.5' -> (0.1, 0.5); '0..1' with points=5 -> linspace(0, 1, 5)."""
    try:
        if ".." in text:
            low, high = (float(part) for part in text.split("..", 1))
            if points is None or points < 2:
                raise ConfigError(f"range {text!r} needs a point count >= 2")
            return tuple(float(v) for v in np.linspace(low, high, points))
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigError(f"cannot parse number list {text!r}") from e


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", help="qubit counts, e.g. 2..8 or 2,4,6")
    parser.add_argument("--c", help="grid parameters, e.g. 0.1,0.5,1,2")
    parser.add_argument("--samples", type=int, help="random right-hand sides per point")
    parser.add_argument("--c-samples", type=int, help="uniformly drawn c values per point")
    parser.add_argument("--shots", type=int, default=0)
    parser.add_argument("--mode", choices=MODES, default="exact")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--target", type=float, help="fidelity target")
    parser.add_argument("--max-depth", type=int, help="ansatz tree depth cap")
    parser.add_argument("--layer-cap", type=int, default=64)
    parser.add_argument("--budget", type=int, default=1000, help="optimizer evaluations per start")
    parser.add_argument("--optimizer", default="Nelder-Mead")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatvqe", description="Variational heat-equation solvers")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("direct", help="two-qubit direct VQE demonstration")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--shots", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="exact")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=1000)
    p.add_argument("--out", help="optional CSV of per-sample results, or of the grid with --landscape")
    p.add_argument("--landscape", action="store_true", help="scan E(theta1, theta2) for one random b instead")
    p.add_argument("--grid", type=int, default=30, help="landscape points per angle")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("hadamard", help="layer scaling of the Hadamard-test VQE (fig5)")
    _add_common(p)
    p.add_argument("--ansatz", default="cba")

    p = sub.add_parser("ata", help="ansatz tree depth scaling (fig10)")
    _add_common(p)

    p = sub.add_parser("ata-noise", help="ansatz tree under depolarizing noise (fig12)")
    _add_common(p)
    p.add_argument("--p", default="0..1", help="noise levels, e.g. 0..1 or 0,0.5,1")
    p.add_argument("--p-points", type=int, default=5)

    p = sub.add_parser("campaign", help="run any figure campaign")
    p.add_argument("name", help="campaign name (see 'heatvqe list')")
    _add_common(p)
    p.add_argument("--ansatz")
    p.add_argument("--p")
    p.add_argument("--p-points", type=int, default=5)
    p.add_argument("--grid", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--solver", action="append", dest="solvers")
    p.add_argument("--eps-tilde", type=float)
    p.add_argument("--simulate", action="store_true", help="fig13: grow every tree instead of the closed form")

    p = sub.add_parser("summarize", help="log-log / semi-log fits of a campaign CSV")
    p.add_argument("csv")
    p.add_argument("--x", default="n")
    p.add_argument("--y")
    p.add_argument("--group", default="c")

    p = sub.add_parser("evolve", help="implicit time stepping with one solver")
    p.add_argument("--solver", default="ata")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--problem", help="JSON problem file (overrides --n/--c)")
    p.add_argument("--target", type=float, default=0.99)
    p.add_argument("--max-depth", type=int)
    p.add_argument("--out", help="trajectory CSV (step,index,value)")

    sub.add_parser("list", help="list campaigns and solvers")
    return parser


def config_from_args(figure: str, args) -> CampaignConfig:
    p_values = None
    if getattr(args, "p", None):
        p_values = parse_float_list(args.p, args.p_points)
    extra = {"simulate": True} if getattr(args, "simulate", False) else {}
    solvers = getattr(args, "solvers", None)
    return CampaignConfig(
        figure=figure,
        qubits=parse_int_range(args.n) if args.n else None,
        c_values=parse_float_list(args.c) if args.c else None,
        samples=args.samples,
        c_samples=args.c_samples,
        mode=args.mode,
        shots=args.shots,
        seed=args.seed,
        workers=args.workers,
        out=args.out,
        target=args.target,
        max_depth=args.max_depth,
        layer_cap=args.layer_cap,
        ansatz=getattr(args, "ansatz", None),
        p_values=p_values,
        grid=getattr(args, "grid", None),
        steps=getattr(args, "steps", None),
        solvers=tuple(solvers) if solvers else None,
        eps_tilde=getattr(args, "eps_tilde", None),
        optimizer=args.optimizer,
        budget=args.budget,
        extra=extra,
    )


def cmd_campaign(figure: str, args) -> int:
    if figure not in get_all_campaign_names():
        raise ConfigError(f"unknown campaign {figure!r}; available: {', '.join(get_all_campaign_names())}")
    config = config_from_args(figure, args)
    print_progress(f"Campaign {figure}", "HEADER")
    result = run_campaign(config, logger=logger)
    print_progress(f"{len(result.records)} rows -> {result.csv_path}", "OK")
    print_progress(f"Summary -> {result.summary_path} ({result.wall_time:.1f}s)", "INFO")
    return EXIT_OK


def cmd_direct(args) -> int:
    if args.mode == "shots" and args.shots < 1:
        raise ConfigError("shots mode needs --shots >= 1")
    if args.landscape:
        return cmd_landscape(args)
    print_progress(f"Direct VQE demonstration, {args.samples} random b", "HEADER")
    rows = []
    for sample in range(args.samples):
        rng = make_rng(args.seed, stream_id("direct"), sample)
        a, b = demo_problem(rng)
        backend = Backend.sampled(args.shots, int(rng.integers(2 ** 31))) if args.mode == "shots" else Backend.exact()
        result = minimize(build_hamiltonian(a, b), backend=backend, rng=rng, budget=args.budget, logger=logger)
        rows.append((sample, result))
        level = "OK" if result.converged else "WARN"
        print_progress(f"b#{sample}: E={result.energy:.3e} fidelity={result.fidelity:.6f}", level)
    good = sum(1 for _, r in rows if r.energy < 1e-6 and (r.fidelity or 0) >= 0.999)
    print_progress(f"{good}/{len(rows)} runs reached E < 1e-6 with fidelity >= 0.999", "INFO")
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["sample", "theta1", "theta2", "theta3", "energy", "fidelity", "converged"])
            for sample, r in rows:
                writer.writerow([sample, repr(r.point.theta1), repr(r.point.theta2), repr(r.point.theta3),
                                 repr(float(r.energy)), repr(float(r.fidelity or 0.0)), str(r.converged).lower()])
        print_progress(f"Results -> {args.out}", "OK")
    return EXIT_OK


def cmd_landscape(args) -> int:
    if args.grid < 2:
        raise ConfigError(f"--grid must be >= 2, got {args.grid}")
    if args.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {args.workers}")
    rng = make_rng(args.seed, stream_id("direct"), 0)
    a, b = demo_problem(rng)
    backend = Backend.sampled(args.shots, int(rng.integers(2 ** 31))) if args.mode == "shots" else Backend.exact()
    print_progress(f"Energy landscape on a {args.grid}x{args.grid} grid", "HEADER")
    hamiltonian = build_hamiltonian(a, b)
    scan = scan_landscape(hamiltonian, args.grid, backend, workers=args.workers)
    minima = refine_minima(scan, hamiltonian)
    for point in minima:
        print_progress(f"minimum at theta1={point.theta1:.4f} theta2={point.theta2:.4f}", "OK")
    print_progress(f"{len(minima)} minimum/minima below 1e-3", "INFO")
    if args.out:
        count = scan.write_csv(args.out)
        print_progress(f"{count} grid points -> {args.out}", "OK")
    return EXIT_OK


def cmd_summarize(args) -> int:
    print_progress(f"Summary of {args.csv}", "HEADER")
    for fit in summarize(args.csv, x=args.x, y=args.y, group_by=args.group, logger=logger):
        print_progress(
            f"{fit.group or 'series'}: slope(log-log)={fit.slope_loglog:.4f} "
            f"residual={fit.residual_loglog:.2e} | slope(semi-log)={fit.slope_semilog:.4f} "
            f"residual={fit.residual_semilog:.2e} -> {fit.classification}"
            f"{' (censored points: %d)' % fit.censored if fit.censored else ''}",
            "OK",
        )
    return EXIT_OK


def cmd_evolve(args) -> int:
    try:
        if args.problem:
            problem = HeatProblem.load(args.problem)
        else:
            problem = HeatProblem(GridParams.from_c(args.n, args.c, args.steps), cosine_profile(args.n))
    except (OSError, ValueError, KeyError) as e:
        raise ConfigError(f"invalid problem: {e}") from e
    if problem.grid.c <= 0:
        raise ConfigError(f"time evolution needs c > 0, got {problem.grid.c}")
    try:
        solver = get_solver_class(args.solver)
    except KeyError as e:
        raise ConfigError(str(e)) from e
    options = {"target": args.target, "max_depth": args.max_depth} if args.solver == "ata" else None
    print_progress(f"Evolving n={problem.grid.n} c={problem.grid.c:g} with {args.solver}", "HEADER")
    traj = time_step_evolve(problem, solver, n_tau=args.steps if not args.problem else None,
                            options=options, logger=logger)
    for step, eps in enumerate(traj.infidelity, start=1):
        print_progress(f"step {step}: eps={eps:.3e}", "PROGRESS")
    print_progress(f"Growth bound {traj.bound:g}: {'holds' if traj.bound_holds() else 'violated'}",
                   "OK" if traj.bound_holds() else "WARN")
    if args.out:
        traj.write_csv(args.out)
        print_progress(f"Trajectory -> {args.out}", "OK")
    return EXIT_OK


def cmd_list(args) -> int:
    print_progress("Campaigns", "HEADER")
    for campaign in get_campaigns():
        print_progress(f"{campaign['name']}: {campaign['description']}", "INFO")
    print_progress("Solvers", "HEADER")
    for solver in get_solvers():
        print_progress(f"{solver['name']} [{solver['operator']}]: {solver['description']}", "INFO")
    print_progress(f"Dense cap: {cap_qubits()} qubits ({CAP_ENV_VAR})", "INFO")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "direct":
            return cmd_direct(args)
        if args.command == "hadamard":
            return cmd_campaign("fig5", args)
        if args.command == "ata":
            return cmd_campaign("fig10", args)
        if args.command == "ata-noise":
            return cmd_campaign("fig12", args)
        if args.command == "campaign":
            return cmd_campaign(args.name, args)
        if args.command == "summarize":
            return cmd_summarize(args)
        if args.command == "evolve":
            return cmd_evolve(args)
        return cmd_list(args)
    except CapExceededError as e:
        print_progress(str(e), "ERROR")
        return EXIT_CAP
    except (ConfigError, SummaryError) as e:
        print_progress(str(e), "ERROR")
        return EXIT_CONFIG
    except HeatVQEError as e:
        logger.error(f"[CLI] {e}")
        print_progress(str(e), "ERROR")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
