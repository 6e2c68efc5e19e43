# main.py
from gaussian_petz import cli
from gaussian_petz.utils.errors import EXIT_MALFORMED
from gaussian_petz.utils.config import (
    DEFAULT_CUTOFF,
    DEFAULT_GRID,
    DEFAULT_ORACLE_TOL,
    DEFAULT_QUAD_POINTS,
    DEFAULT_QUAD_RANGE,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TOP_K,
    REVERSAL_TOL,
    SEARCH_EXECUTOR,
    VERIFY_TOL,
    Colors,
)
import argparse, sys


def build_parser():
    parser = argparse.ArgumentParser(description="Gaussian Petz recovery toolkit")
    parser.add_argument('--no-color', action='store_true', help='Plain log output (default: colored)')
    sub = parser.add_subparsers(dest='command', required=True)

    petz = sub.add_parser('petz', help='Construct the Petz recovery channel of (sigma, N)')
    petz.add_argument('--state', required=True, help='sigma as JSON {modes, mean, cov}')
    petz.add_argument('--channel', required=True, help='N as JSON {X, Y, delta}')
    petz.add_argument('--out', default=None, help='Output file (default: stdout)')
    petz.add_argument('--tol', type=float, default=REVERSAL_TOL, help='Reversal certificate tolerance')

    verify = sub.add_parser('verify', help='Check the Petz identity on a lattice of displacements')
    verify.add_argument('--state', required=True)
    verify.add_argument('--channel', required=True)
    verify.add_argument('--grid', type=int, default=DEFAULT_GRID)
    verify.add_argument('--tol', type=float, default=VERIFY_TOL)
    verify.add_argument('--out', default=None)
    verify.add_argument('--fault', action='store_true', help='Corrupt Y_P by +0.5 I (negative control)')

    search = sub.add_parser('search', help='Randomized search for negative recovery deficits')
    search.add_argument('--seed', type=int, default=DEFAULT_SEED)
    search.add_argument('--samples', type=int, default=DEFAULT_SAMPLES)
    search.add_argument('--modes', type=int, default=1, help='1 or 2')
    search.add_argument('--out', default=None)
    search.add_argument('--top-k', type=int, default=DEFAULT_TOP_K)
    search.add_argument('--threads', type=int, default=None, help='Search workers (default: GAUSS_PETZ_THREADS or 1)')
    search.add_argument('--executor', choices=['process', 'thread'], default=SEARCH_EXECUTOR,
                        help='Run workers in processes or threads')
    search.add_argument('--archive', default=None, help='sqlite file to archive the run in')

    bound = sub.add_parser('bound', help='Evaluate the fidelity-of-recovery lower bound')
    bound.add_argument('--rho', required=True)
    bound.add_argument('--sigma', required=True)
    bound.add_argument('--channel', required=True)
    bound.add_argument('--quad-points', type=int, default=DEFAULT_QUAD_POINTS)
    bound.add_argument('--quad-range', type=float, default=DEFAULT_QUAD_RANGE)
    bound.add_argument('--out', default=None)

    oracle = sub.add_parser('oracle', help='Cross-check closed forms against the dense Fock oracle')
    oracle.add_argument('--cutoff', type=int, default=DEFAULT_CUTOFF)
    oracle.add_argument('--tol', type=float, default=DEFAULT_ORACLE_TOL)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # usage errors are malformed input, not the non-faithful status 2
        return EXIT_MALFORMED if e.code else 0
    colors = None if args.no_color else Colors
    if args.command == 'petz':
        return cli.run_petz(args.state, args.channel, args.out, args.tol, colors=colors)
    if args.command == 'verify':
        return cli.run_verify(args.state, args.channel, args.grid, args.tol, fault=args.fault,
                              out_path=args.out, colors=colors)
    if args.command == 'search':
        return cli.search_counterexamples(args.seed, args.samples, args.modes, args.out, top_k=args.top_k,
                                          threads=args.threads, archive=args.archive, executor=args.executor,
                                          colors=colors)
    if args.command == 'bound':
        return cli.run_bound(args.rho, args.sigma, args.channel, args.quad_points, args.quad_range,
                             out_path=args.out, colors=colors)
    return cli.run_oracle_suite(args.cutoff, args.tol, colors=colors)


# Entry point
if __name__ == "__main__":
    sys.exit(main())
