"""Command-line entry point: ``fracsplit --experiment ... --out results.csv``."""

from __future__ import annotations

import argparse
import logging
import sys

from .experiments import EXPERIMENTS, METHODS, ExperimentSpec, emit_coefficients, run
from .rational import DEFAULT_KAPPA, DEFAULT_MU


def _grid(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    try:
        dims = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected N or N1xN2") from None
    if len(dims) == 1:
        dims *= 2
    if len(dims) != 2:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}, expected N or N1xN2")
    return dims[0], dims[1]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fracsplit",
        description="Fractional diffusion experiments on the unit square; results as CSV.")
    p.add_argument("--experiment", choices=EXPERIMENTS, default="stationary_table")
    p.add_argument("--grid", type=_grid, default=(256, 256), metavar="N[xN2]",
                   help="grid intervals per direction (default 256)")
    p.add_argument("--alpha", type=float, nargs="+", default=[0.25, 0.5, 0.75])
    p.add_argument("--m", type=int, nargs="+", default=[50, 100, 200],
                   help="numbers of rational terms")
    p.add_argument("--method", choices=METHODS, default="simpson")
    p.add_argument("--mu", type=float, default=DEFAULT_MU, help="Gauss-Jacobi scale")
    p.add_argument("--kappa", type=float, default=DEFAULT_KAPPA, help="Simpson exponent")
    p.add_argument("--sigma", type=float, default=1.0, help="scheme weight")
    p.add_argument("--tau", type=float, nargs="+", default=None,
                   help="time steps (default: T/10, plus T/20 and T/40 for convergence_order)")
    p.add_argument("--T", type=float, default=0.1, help="final time")
    p.add_argument("--tol", type=float, default=1e-12, help="relative tolerance of shifted solves")
    p.add_argument("--ordering", choices=("forward", "symmetrized"), default="forward")
    p.add_argument("--levels", type=int, default=10, help="recorded time levels for evolution")
    p.add_argument("--samples", type=int, default=1000, help="points for scalar_profile")
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p.add_argument("--emit-coeffs", metavar="DIR",
                   help="also write the rational coefficients of every cell to DIR")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    taus = args.tau
    if taus is None:
        divisors = (10, 20, 40) if args.experiment == "convergence_order" else (10,)
        taus = [args.T / d for d in divisors]
    return ExperimentSpec(
        experiment=args.experiment, n1=args.grid[0], n2=args.grid[1],
        alphas=tuple(args.alpha), ms=tuple(args.m), method=args.method,
        mu=args.mu, kappa=args.kappa, sigma=args.sigma, taus=tuple(taus), T=args.T,
        tol=args.tol, ordering=args.ordering, levels=args.levels, samples=args.samples)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        spec = spec_from_args(args)
    except ValueError as exc:
        parser.error(str(exc))

    if args.emit_coeffs:
        emit_coefficients(spec, args.emit_coeffs)
    table = run(spec)
    table.write_csv(sys.stdout if args.out == "-" else args.out)
    for cell, message in table.failures:
        print(f"failed {cell}: {message}", file=sys.stderr)
    return 0 if table.ok else 1


if __name__ == "__main__":
    sys.exit(main())
