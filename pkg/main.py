import logging
from pathlib import Path
from config import Config
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table
import numpy as np
import pandas as pd
from fractions import Fraction
import sys
import argparse

from src.bench import (
    BenchmarkRunner,
    CaseSpec,
    Example,
    example_domain,
    fit_trend,
    parse_spacing,
    physical_spacing,
    results_frame,
    run_suite,
    write_suite,
)
from src.exceptions import BenchError, ConfigParseError, InvalidCase
from src.geometry import build_node_cloud, build_structured_mesh
from src.utils import ensure_columns, safe_read_csv, write_json

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

console = Console()


def setup_logging(config: Config):
    """Configure logging with both file and console output."""
    formatter = logging.Formatter('%(levelname)s: %(message)s')

    console_handler = RichHandler(rich_tracebacks=True, show_time=False)
    file_handler = logging.FileHandler(config.log_file)

    console_handler.setFormatter(formatter)
    file_handler.setFormatter(formatter)

    logging.basicConfig(
        level=config.log_level,
        handlers=[console_handler, file_handler],
        force=True,
    )

    return logging.getLogger(__name__)


def _fmt(value) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return "-"
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


def print_results(rows) -> None:
    """Render result rows the way the comparison tables read."""
    frame = results_frame(rows)
    table = Table(title="Results")
    columns = ["example", "dh", "method", "field", "LSE", "L2", "RMSE", "MRE", "CN", "RT", "OSP", "status"]
    for col in columns:
        table.add_column(col, justify="right" if col not in ("example", "method", "field", "status") else "left")
    for record in frame.to_dict("records"):
        table.add_row(*[_fmt(record.get(col)) for col in columns])
    console.print(table)


def _case_from_args(args, config: Config):
    entry = {
        "example": args.example,
        "method": args.method,
        "dh": args.dh,
        "random_nodes": args.random,
        "seed": args.seed,
        "tps_beta": args.tps_beta,
        "fixed_c": args.fixed_c,
        "shape_rule": args.shape_rule,
        "trace": args.trace,
    }
    if args.dt is not None:
        entry["dt"] = args.dt
    if args.tf is not None:
        entry["tf"] = args.tf
    final_time = None if args.tf is not None else config.final_time_override
    return CaseSpec.from_dict(entry, final_time)


def command_run(args, config: Config, logger: logging.Logger) -> int:
    case = _case_from_args(args, config)
    row = BenchmarkRunner(config).run_case(case)
    out_dir = config.output_folder
    write_suite([row], out_dir)
    write_json(row.to_dict(), out_dir / "result.json")
    if row.geometry is not None:
        write_json(row.geometry, out_dir / "mesh.json")
    if row.optimizer_trace is not None:
        row.optimizer_trace.to_csv(out_dir / "optimizer_trace.csv", index=False)
    if row.time_trace is not None:
        row.time_trace.to_csv(out_dir / "time_trace.csv", index=False)
    print_results([row])
    return EXIT_OK


def command_suite(args, config: Config, logger: logging.Logger) -> int:
    suite_file = Path(args.config) if args.config else config.default_suite_file
    rows = run_suite(suite_file, config.output_folder, config)
    print_results(rows)
    failed = [row for row in rows if not row.ok]
    if failed:
        logger.error(f"{len(failed)} of {len(rows)} cases failed")
        return EXIT_NUMERICAL
    return EXIT_OK


def _numeric(column: pd.Series) -> np.ndarray:
    """Numbers, or spacing labels such as "1/8"."""
    try:
        return pd.to_numeric(column).to_numpy(dtype=float)
    except (ValueError, TypeError):
        return column.map(lambda v: float(Fraction(str(v)))).to_numpy(dtype=float)


def command_trend(args, config: Config, logger: logging.Logger) -> int:
    df = safe_read_csv(args.input)
    if df is None:
        raise ConfigParseError(f"Cannot read {args.input}")
    df = ensure_columns(df, [args.x, args.y])
    points = np.column_stack([_numeric(df[args.x]), _numeric(df[args.y])])
    fit = fit_trend(points, args.transform)
    console.print(f"slope m = {fit.slope:.4f}, intercept = {fit.intercept:.4f} over {fit.n_points} points")
    return EXIT_OK


def command_describe(args, config: Config, logger: logging.Logger) -> int:
    example = Example(args.example)
    domain = example_domain(example)
    dh = physical_spacing(example, parse_spacing(args.dh))
    table = Table(title=f"{example.value} at dh={args.dh}")
    for col in ("discretization", "interior", "dirichlet", "neumann", "elements"):
        table.add_column(col)
    for order in (1, 2):
        counts = build_structured_mesh(domain, dh, order).counts()
        table.add_row(f"FEM O({order})", *[str(counts[k]) for k in ("interior", "dirichlet", "neumann", "elements")])
    counts = build_node_cloud(domain, dh).counts()
    table.add_row("RBFCM", *[str(counts[k]) for k in ("interior", "dirichlet", "neumann")], "-")
    console.print(table)
    console.print("Convergence slopes are read from the L2 column.")
    console.print("LSE sums element volume differences and converges one order faster.")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description='FEM vs Kansa RBF benchmark suite')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='Run a single case')
    run.add_argument('--example', required=True, help='P-Dir, P-DirNeu-L, P-Unsteady, S-Colliding or S-Unsteady-L')
    run.add_argument('--method', required=True, help='FEM1, FEM2, RBF-MQ or RBF-TPS')
    run.add_argument('--dh', required=True, help='Grid spacing, e.g. 1/8')
    run.add_argument('--random', action='store_true', help='Random interior nodes (RBF only)')
    run.add_argument('--seed', type=int, default=1)
    run.add_argument('--tf', type=float, default=None, help='Final time of unsteady examples')
    run.add_argument('--dt', type=float, default=None, help='Time step of unsteady examples')
    run.add_argument('--fixed-c', type=float, default=None, help='Skip the optimizer and use this MQ shape parameter')
    run.add_argument('--shape-rule', choices=['hardy', 'franke'], default=None)
    run.add_argument('--tps-beta', type=int, default=4)
    run.add_argument('--trace', action='store_true', help='Record optimizer and time step traces')
    run.add_argument('--out', default=None, help='Output directory')

    suite = sub.add_parser('suite', help='Run a suite file')
    suite.add_argument('--config', default=None, help='Suite JSON (default config/full_suite.json)')
    suite.add_argument('--out', default=None, help='Output directory')

    trend = sub.add_parser('trend', help='Fit a log-log trend to two CSV columns')
    trend.add_argument('--in', dest='input', required=True)
    trend.add_argument('--x', required=True)
    trend.add_argument('--y', required=True)
    trend.add_argument('--transform', choices=['log-log', 'linear'], default='log-log')
    trend.add_argument('--out', default=None)

    describe = sub.add_parser('describe', help='Print node and element counts')
    describe.add_argument('--example', required=True)
    describe.add_argument('--dh', required=True)
    describe.add_argument('--out', default=None)
    return parser


COMMANDS = {
    'run': command_run,
    'suite': command_suite,
    'trend': command_trend,
    'describe': command_describe,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = Config(args.out)
    logger = setup_logging(config)
    logger.info(f"Starting {args.command}")

    try:
        return COMMANDS[args.command](args, config, logger)
    except (ConfigParseError, InvalidCase) as e:
        logger.critical(f"Configuration error: {str(e)}", exc_info=True)
        return EXIT_CONFIG
    except (BenchError, np.linalg.LinAlgError, FloatingPointError) as e:
        logger.critical(f"Numerical failure: {str(e)}", exc_info=True)
        return EXIT_NUMERICAL
    except ValueError as e:
        logger.critical(f"Invalid argument: {str(e)}", exc_info=True)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
