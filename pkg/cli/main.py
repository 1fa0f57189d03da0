import argparse
import logging
import sys
from typing import List, Optional

from core.logger import logger, set_console_level
from .commands import ExitCode, cmd_eval, cmd_roundtrip, cmd_synth, cmd_verify


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsplayer",
        description="QSP phase factors by nonlinear Fourier analysis",
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='debug output on stderr')
    parser.add_argument('-q', '--quiet', action='store_true', help='warnings and errors only')
    parser.add_argument('--profile', default=None, help='precision profile (fast, standard, precise or custom)')

    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser('synth', help='compute phases for a signal')
    synth.add_argument('signal', nargs='?', default=None, help='signal file (JSON)')
    synth.add_argument('--chebyshev', default=None, help='inline Chebyshev coefficients c0,c1,...')
    synth.add_argument('--constant', type=float, default=None, help='inline constant signal')
    synth.add_argument('--epsilon', type=float, default=None, help='margin below 2^(-1/2)')
    synth.add_argument('--grid', type=int, default=None, help='grid size N (power of two)')
    synth.add_argument('--tol', type=float, default=None, help='target weighted residual')
    synth.add_argument('--dmax', type=int, default=None, help='maximum degree')
    synth.add_argument('--tol-fp', type=float, default=None, help='fixed-point tolerance')
    synth.add_argument('-o', '--out', default=None, help='phase file (default: stdout)')
    synth.set_defaults(handler=cmd_synth)

    evaluate = sub.add_parser('eval', help='evaluate Im u_d for a phase file')
    evaluate.add_argument('phases', help='phase file (JSON)')
    evaluate.add_argument('--x', default=None, help='comma separated abscissae in [-1, 1]')
    evaluate.add_argument('--grid', type=int, default=None, help='evaluate at x_j = cos(pi j / N)')
    evaluate.add_argument('--degree', type=int, default=None, help='degree d (default: file degree)')
    evaluate.add_argument('-o', '--out', default=None, help='CSV file (default: stdout)')
    evaluate.set_defaults(handler=cmd_eval)

    verify = sub.add_parser('verify', help='check a phase file')
    verify.add_argument('phases', help='phase file (JSON)')
    verify.add_argument('signal', nargs='?', default=None, help='signal file the phases were built for')
    verify.add_argument('--plancherel-tol', type=float, default=None)
    verify.set_defaults(handler=cmd_verify)

    roundtrip = sub.add_parser('roundtrip', help='random one-sided sequence -> forward -> strip')
    roundtrip.add_argument('--width', type=int, default=50)
    roundtrip.add_argument('--seed', type=int, default=None)
    roundtrip.add_argument('--norm-cap', type=float, default=0.2, help='entries drawn in the disk of this radius')
    roundtrip.add_argument('--grid', type=int, default=None)
    roundtrip.set_defaults(handler=cmd_roundtrip)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags; that code is reserved for non-convergence
        return ExitCode.OK if e.code == 0 else ExitCode.INPUT

    if args.verbose:
        set_console_level(logging.DEBUG)
    elif args.quiet:
        set_console_level(logging.WARNING)
    else:
        set_console_level(logging.INFO)

    try:
        return int(args.handler(args))
    except KeyboardInterrupt:
        logger.error("Interrupted")
        return ExitCode.INPUT


if __name__ == "__main__":
    sys.exit(main())
