"""Command-line front end.

    eda-lab dynamics --config exp.yaml [--out-dir DIR] [--format csv|json]
    eda-lab bounds   --config grid.yaml
    eda-lab simulate --config exp.yaml [--seed N]
    eda-lab compare  --config exp.yaml

Exit status: 0 on success, 2 for configuration errors, 3 when the engine or
any simulated replication fails to reach d = 0 within its iteration cap.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, dynamics, theory
from .config import ExperimentConfig, load_config
from .errors import ConfigError, DomainError
from .fitness import d_of
from .reporting import metadata, write_json, write_table
from .selection import TOURNAMENT_FAIR, TOURNAMENT_PAPER, TRUNCATION, SelectionSchema
from .simulator import RNG_NAME, monte_carlo

logger = logging.getLogger("eda_lab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3

TRAJECTORY_COLUMNS = ("n", "d", "realized_drift", "predicted_drift", "closed_form_d")
BOUNDS_COLUMNS = (
    "d0", "mu",
    "truncation_bound", "truncation_tau_real", "truncation_tau_iterations",
    "tournament_bound", "tournament_tau_real", "tournament_tau_iterations",
    "truncation_bound_dominates", "tournament_bound_dominates",
)
TRIAL_COLUMNS = ("replication", "n", "d_hat", "mean_fitness")
COMPARISON_COLUMNS = ("n", "mean_d_hat", "engine_d", "mean_abs_error")
COMPARE_COLUMNS = (
    "n", "d_truncation", "closed_truncation", "d_tournament_paper",
    "closed_tournament_paper", "d_tournament_fair", "closed_tournament_fair",
)


def closed_form(schema: SelectionSchema, d0: float, n: int) -> float:
    if schema.kind == TRUNCATION:
        return theory.truncation_d(d0, schema.mu, n)
    if schema.kind == TOURNAMENT_PAPER:
        return theory.tournament_d(d0, n)
    return theory.fair_tournament_d(d0, n)


def _closed_form_or_none(schema, d0, n):
    try:
        return closed_form(schema, d0, n)
    except DomainError:
        return None


def _meta(cfg: ExperimentConfig, **extra) -> dict:
    return metadata(cfg.digest(), cfg.seed, **extra)


def cmd_dynamics(cfg: ExperimentConfig) -> int:
    dist0 = cfg.initial_distribution()
    d0 = float(d_of(dist0, cfg.problem))
    traj = dynamics.run(dist0, cfg.schema, cfg.problem, max_iters=cfg.engine_max_iters)
    rows = traj.rows()
    for row in rows:
        row["closed_form_d"] = _closed_form_or_none(cfg.schema, d0, row["n"])
    report = theory.bound_report(d0, cfg.schema, engine_tau=traj.tau)
    if cfg.schema.kind == TOURNAMENT_FAIR:
        report.note += "; closed_form_d column is d0**(2**n)"

    meta = _meta(cfg)
    write_table(cfg.out_dir / "trajectory", rows, TRAJECTORY_COLUMNS, meta, cfg.fmt)
    write_json(cfg.out_dir / "report.json", {"report": report.to_dict(),
                                             "problem": cfg.problem.describe(),
                                             "schema": cfg.schema.describe()}, meta)
    if not traj.converged:
        logger.error("engine did not reach d = 0 within %d iterations", traj.max_iters)
        return EXIT_NOT_CONVERGED
    logger.info("engine tau = %d (closed form %s)", traj.tau, report.exact_tau_iterations)
    return EXIT_OK


def bounds_rows(d0s, mus) -> list[dict]:
    rows = []
    for d0 in d0s:
        t_bound = theory.tournament_upper_bound(d0)
        t_real, t_iter = theory.tournament_exact_tau(d0)
        for mu in mus:
            bound = theory.truncation_upper_bound(d0, mu)
            real, iters = theory.truncation_exact_tau(d0, mu)
            rows.append({
                "d0": d0, "mu": mu,
                "truncation_bound": bound, "truncation_tau_real": real,
                "truncation_tau_iterations": iters,
                "tournament_bound": t_bound, "tournament_tau_real": t_real,
                "tournament_tau_iterations": t_iter,
                "truncation_bound_dominates": bound >= real,
                "tournament_bound_dominates": t_bound >= t_real,
            })
    return rows


def cmd_bounds(cfg: ExperimentConfig) -> int:
    if cfg.grid is None:
        raise ConfigError("grid: missing section (needs d0 and mu lists)")
    rows = bounds_rows(cfg.grid["d0"], cfg.grid["mu"])
    write_table(cfg.out_dir / "bounds", rows, BOUNDS_COLUMNS, _meta(cfg), cfg.fmt)
    return EXIT_OK


def cmd_simulate(cfg: ExperimentConfig) -> int:
    if cfg.simulation is None:
        raise ConfigError("simulation: missing section")
    sim = cfg.simulation
    dist0 = cfg.initial_distribution()
    if cfg.initial["kind"] != "uniform":
        logger.warning("the simulator always starts from a uniform sample; "
                       "the engine comparison uses initial.d0")
    summary = monte_carlo(cfg.problem, sim, dist0=dist0)
    meta = _meta(cfg, rng=RNG_NAME, seed_stream="replication k uses (seed + k) mod 2**64")

    trial_rows = [
        {"replication": k, "n": n, "d_hat": dh, "mean_fitness": mf}
        for k, trial in enumerate(summary.trials)
        for n, (dh, mf) in enumerate(zip(trial.d_hat_trajectory, trial.expected_fitness_trajectory))
    ]
    write_table(cfg.out_dir / "trials", trial_rows, TRIAL_COLUMNS, meta, cfg.fmt)
    cmp_rows = [
        {"n": n, "mean_d_hat": m, "engine_d": e, "mean_abs_error": a}
        for n, (m, e, a) in enumerate(zip(summary.mean_d_hat, summary.engine_d, summary.mean_abs_error))
    ]
    write_table(cfg.out_dir / "comparison", cmp_rows, COMPARISON_COLUMNS, meta, cfg.fmt)

    d0 = float(d_of(dist0, cfg.problem))
    report = theory.bound_report(d0, cfg.schema, engine_tau=summary.engine_tau)
    payload = {
        "problem": cfg.problem.describe(),
        "schema": cfg.schema.describe(),
        "population_size": sim.population_size,
        "parent_count": sim.parents(),
        "max_iters": sim.iteration_cap(cfg.problem),
        "stopping_time": summary.stopping_time_stats(),
        "theory": report.to_dict(),
        "stopping_times": summary.stopping_times,
        "seeds": [t.seed_used for t in summary.trials],
    }
    write_json(cfg.out_dir / "summary.json", payload, meta)
    if summary.not_reached:
        logger.error("%d of %d replications did not converge", summary.not_reached, len(summary.trials))
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig) -> int:
    """Engine and closed form side by side for all three selection rules."""
    mu = cfg.schema.mu if cfg.schema.kind == TRUNCATION else 0.5
    schemas = {
        "truncation": SelectionSchema.truncation(mu),
        "tournament_paper": SelectionSchema.tournament("paper"),
        "tournament_fair": SelectionSchema.tournament("fair"),
    }
    dist0 = cfg.initial_distribution()
    d0 = float(d_of(dist0, cfg.problem))
    trajs = {name: dynamics.run(dist0, s, cfg.problem, max_iters=cfg.engine_max_iters)
             for name, s in schemas.items()}
    length = max(len(t.d) for t in trajs.values())
    rows = []
    for n in range(length):
        row = {"n": n}
        for name, s in schemas.items():
            d = trajs[name].d
            row[f"d_{name}"] = float(d[n]) if n < len(d) else 0.0
            row[f"closed_{name}"] = _closed_form_or_none(s, d0, n)
        rows.append(row)
    meta = _meta(cfg)
    write_table(cfg.out_dir / "compare", rows, COMPARE_COLUMNS, meta, cfg.fmt)
    reports = {name: theory.bound_report(d0, s, engine_tau=trajs[name].tau).to_dict()
               for name, s in schemas.items()}
    write_json(cfg.out_dir / "compare_report.json", {"reports": reports}, meta)
    if not all(t.converged for t in trajs.values()):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


COMMANDS = {
    "dynamics": cmd_dynamics,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def u64(text: str) -> int:
    val = int(text)
    if not 0 <= val < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return val


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eda-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment config (YAML or JSON)")
        p.add_argument("--out-dir", help="output directory (overrides output.dir)")
        p.add_argument("--seed", type=u64, help="base seed (overrides simulation.seed)")
        p.add_argument("--format", choices=("csv", "json"), help="table format (overrides output.format)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config, out_dir=args.out_dir, seed=args.seed, fmt=args.format)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
