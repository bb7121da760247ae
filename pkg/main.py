#!/usr/bin/env python3
"""
SteinBounds - Stein operators and variance bounds for univariate distributions

Features:
- Pseudo-inverse Stein operators on intervals and integer lattices
- Klaassen-type lower and upper variance bounds
- Alternating variance expansions with iterated Γ_k weights
- Covariance kernel and Stein factor profiles
- A property suite that checks every identity numerically

Usage:
    python main.py COMMAND [OPTIONS]

Commands:
    bounds      Lower/upper variance bounds for one test function
    expand      Variance expansion to a given order
    kernel      Grid of K(x, x') and K(x, x')/p(x)
    factors     Grid of the Stein factor R(x)
    verify      Run the property suite
"""

import argparse
import logging
import sys

from cli import EXIT_INVALID, RunSpec, run
from numerics import ValidationError


def add_common(parser: argparse.ArgumentParser, needs_dist: bool = True):
    if needs_dist:
        parser.add_argument('--dist', required=True, help='Inline spec (normal:0,1, poisson:lambda=3) or JSON file')
        parser.add_argument('--ell', help='Shift 0, -1, +1, or a sequence such as +- or 1,-1 '
                                          '(write --ell=-+ when it starts with a minus)')
        parser.add_argument('--exact', action='store_true', help='Rational arithmetic on finite lattices')
    parser.add_argument('--output', choices=['json', 'csv'], default='json', help='Report format')
    parser.add_argument('--out', help='Write the report to this path instead of stdout')
    parser.add_argument('--seed', type=int, default=0, help='Random seed (default 0)')
    parser.add_argument('--verbose', action='store_true', help='Debug logging from the library')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="SteinBounds - Stein operators and variance bounds",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
    python main.py bounds --dist poisson:lambda=3 --f id --ell -1
    python main.py expand --dist normal:0,1 --g x^4 --n 4
    python main.py kernel --dist binomial:20,0.2 --ell 1 --at 4 --output csv
    python main.py factors --dist normal:0,1 --grid=-4:4:0.1
    python main.py expand --dist poisson:3 --g x^2 --n 2 --ell=-+
    python main.py verify --quick
        """
    )
    commands = parser.add_subparsers(dest='command', required=True)

    bounds = commands.add_parser('bounds', help='Klaassen lower/upper variance bounds')
    add_common(bounds)
    bounds.add_argument('--f', dest='function', default='id', help='Test function (id, x^2, exp(-x), sin, ind<=m)')
    bounds.add_argument('--c', help='Function c of the lower bound (default L(Id - mean))')
    bounds.add_argument('--h', help='Function h of the upper bound (default Id)')

    expand = commands.add_parser('expand', help='Variance expansion with sandwich flags')
    add_common(expand)
    expand.add_argument('--g', dest='function', default='id', help='Function whose variance is expanded')
    expand.add_argument('--n', dest='order', type=int, default=2, help='Expansion order')
    expand.add_argument('--method', choices=['auto', 'family', 'lemma', 'nested'], default='auto',
                        help='How the Gamma_k weights are evaluated')
    expand.add_argument('--h', help='Standardizing function for every order (default Id)')
    expand.add_argument('--mc', dest='monte_carlo', action='store_true',
                        help='Also estimate the remainder by Monte Carlo')
    expand.add_argument('--samples', type=int, default=100_000, help='Monte Carlo sample size')

    kernel = commands.add_parser('kernel', help="Kernel profile x' -> K(x, x')/p(x)")
    add_common(kernel)
    kernel.add_argument('--at', help='Comma-separated first arguments x (default: the mean)')
    kernel.add_argument('--grid', help='Range a:b:step of second arguments')

    factors = commands.add_parser('factors', help='Stein factor profile R(x)')
    add_common(factors)
    factors.add_argument('--grid', help='Range a:b:step')

    verify = commands.add_parser('verify', help='Run the property suite')
    add_common(verify, needs_dist=False)
    verify.add_argument('--quick', action='store_true', help='Reduced test matrix')
    return parser


def main(argv=None) -> int:
    """Main entry point"""
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    fields = {key: value for key, value in vars(args).items() if key not in ('verbose', 'dist')}
    fields['distribution'] = getattr(args, 'dist', None)
    try:
        spec = RunSpec.build(**fields)
        return run(spec)
    except ValidationError as e:
        print(f"❌ Invalid arguments: {e.message} {e.context.get('detail', '')}", file=sys.stderr)
        return EXIT_INVALID
    except KeyboardInterrupt:
        print("\n👋 SteinBounds stopped", file=sys.stderr)
        return EXIT_INVALID
    except Exception as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
