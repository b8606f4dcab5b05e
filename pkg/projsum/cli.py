"""
Command-line entry: spectrum, density, experiment and selftest.

Exit codes: 0 pass, 2 usage or config error, 3 statistical assertion failure.
"""
import argparse
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path

from projsum import __version__, config, densities, reports, stats
from projsum.ensembles import (
    DegenerateSampleError,
    EnsembleParams,
    SeedSpec,
    sample_jacobi_spectrum,
    sample_sum_matrix,
    self_adjoint_eigenvalues,
)
from projsum.spectra import predicted_spectrum, spectrum_from_eigenvalues

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_ASSERTION = 3
EXIT_NUMERICAL = 4

# ANSI yellow for assertion failures (still readable if no ANSI)
YELLOW = "\033[33m"
RESET = "\033[0m"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def cmd_spectrum(args: argparse.Namespace) -> int:
    params = EnsembleParams.from_ranks(
        args.n, args.p, args.q, args.theta, args.beta, allow_overfull=args.allow_overfull
    )
    seed = SeedSpec(args.seed, 0)
    if args.path == "jacobi":
        spec = predicted_spectrum(sample_jacobi_spectrum(params, seed), params)
    else:
        values = self_adjoint_eigenvalues(sample_sum_matrix(params, seed))
        spec = spectrum_from_eigenvalues(values, params)
    reports.write_spectrum_csv(args.out, spec)
    print(f"Wrote {params.N} eigenvalues ({args.path} path) to {args.out}")
    return EXIT_OK


def cmd_density(args: argparse.Namespace) -> int:
    use_sum = args.p is not None or args.q is not None
    use_jacobi = args.s is not None or args.t is not None
    if use_sum == use_jacobi:
        raise ValueError("give either --p and --q (sum) or --s and --t (Jacobi)")
    if use_sum:
        if args.p is None or args.q is None:
            raise ValueError("--p and --q must both be given")
        p, q = sorted((args.p, args.q))
        shape = densities.limit_shape_sum(densities.LimitParams(p, q))
    else:
        s = 0.0 if args.s is None else args.s
        t = 0.0 if args.t is None else args.t
        shape = densities.limit_shape_jacobi(s, t)
    mass = reports.write_density_csv(args.out, shape, args.grid_points)
    print(f"Wrote density grid to {args.out} (mass {mass:.9f})")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    mode = args.mode.replace("-", "_")
    values = reports.read_config_file(args.config) if args.config else {}
    cfg = reports.build_experiment_config(mode, values, seed=args.seed)
    out_dir: Path = args.out_dir
    manifest = reports.RunManifest(config=cfg.to_dict(), started_at=_now())

    report = stats.run_experiment(cfg)

    report_path = out_dir / "report.json"
    samples_path = out_dir / "samples.csv"
    manifest_path = out_dir / "manifest.json"
    reports.write_json(report_path, reports.check_report(report.to_dict()))
    header, rows = report.summary.sample_table()
    reports.write_csv(samples_path, header, rows)
    manifest.finished_at = _now()
    manifest.output_paths = [str(report_path), str(samples_path), str(manifest_path)]
    reports.write_json(manifest_path, manifest.to_dict())

    for result in report.assertions:
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[result.passed]
        line = f"[{status}] {result.name}: {result.value:.6g} (want {result.threshold})"
        if result.passed is False:
            print(f"{YELLOW}{line}{RESET}", file=sys.stderr)
        else:
            print(line)
    print(f"Report written to {report_path}")
    return EXIT_OK if report.passed else EXIT_ASSERTION


def cmd_selftest(args: argparse.Namespace) -> int:
    from projsum import acceptance

    return EXIT_OK if acceptance.run_all(seed=args.seed) else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="projsum",
        description="Spectra of sums of random projections P + theta Q: sampling, limit shapes, experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="Sample one spectrum of P + theta Q and write it as CSV.")
    sp.add_argument("--n", type=int, required=True, help="Ambient dimension N")
    sp.add_argument("--p", type=int, required=True, help="Rank of P")
    sp.add_argument("--q", type=int, required=True, help="Rank of Q")
    sp.add_argument("--theta", type=float, default=1.0, help="Scalar theta (default: 1)")
    sp.add_argument("--beta", type=int, choices=(1, 2), default=2, help="1 real, 2 complex (default: 2)")
    sp.add_argument("--seed", type=int, default=0, help="Master seed (default: 0)")
    sp.add_argument("--path", choices=("direct", "jacobi"), default="direct", help="Sampling path (default: direct)")
    sp.add_argument("--allow-overfull", action="store_true", help="Accept p + q > N (direct path only)")
    sp.add_argument("--out", type=Path, default=Path("spectrum.csv"), help="Output CSV (default: spectrum.csv)")
    sp.set_defaults(func=cmd_spectrum)

    dp = sub.add_parser("density", help="Write the limiting density on a grid (sum or Jacobi shape).")
    dp.add_argument("--p", type=float, help="Rank fraction of P (sum shape)")
    dp.add_argument("--q", type=float, help="Rank fraction of Q (sum shape)")
    dp.add_argument("--s", type=float, help="Exponent ratio of x (Jacobi shape)")
    dp.add_argument("--t", type=float, help="Exponent ratio of 1 - x (Jacobi shape)")
    dp.add_argument("--grid-points", type=int, default=200, help="Grid points (default: 200)")
    dp.add_argument("--out", type=Path, default=Path("density.csv"), help="Output CSV (default: density.csv)")
    dp.set_defaults(func=cmd_density)

    ep = sub.add_parser("experiment", help="Run a seeded Monte Carlo experiment.")
    ep.add_argument(
        "--mode",
        required=True,
        choices=[m.replace("_", "-") for m in stats.MODES],
        help="Experiment mode",
    )
    ep.add_argument("--config", type=Path, help="key = value config file (defaults per mode)")
    ep.add_argument("--seed", type=int, help="Master seed (overrides the config file)")
    ep.add_argument(
        "--out-dir",
        type=Path,
        default=config.OUTPUT_DIR,
        help=f"Output directory (default: PROJSUM_OUTPUT_DIR or {config.OUTPUT_DIR})",
    )
    ep.set_defaults(func=cmd_experiment)

    st = sub.add_parser("selftest", help="Run the reduced-scale acceptance suite.")
    st.add_argument("--seed", type=int, default=20240601, help="Master seed")
    st.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"Error: cannot write output: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DegenerateSampleError, densities.IntegrationError) as e:
        print(f"Error: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
