"""
Command-Line Interface Module

Argument parsing, validation and the subcommands of the analyzer:
bk, t-matrix, classify, verify, weyl, spectrum and xcheck.

Machine output (JSON, CSV, LaTeX) goes to standard output; status lines and
errors go to standard error. Exit codes: 0 success, 1 input error,
2 verification or check failure.
"""

import argparse
import logging
import os
import sys

import pandas as pd

from . import __version__
from .errors import InternalDefect, InvalidExtension, KreinError
from .exact_linalg import format_rational, inertia, parse_rational, rank
from .extension_classify import ensure_valid, negative_squares
from .data_loader import load_job
from .reporting import (
    dumps_json,
    frame_table,
    frame_to_csv,
    latex_pmatrix,
    matrix_table,
    matrix_to_csv,
    records_table,
    stamp_text,
)
from .spectral_scan import (
    ScanConfig,
    count_negative_eigenvalues,
    grid_dump,
    negative_grid,
    positive_eigenvalues_in,
)
from .triplet_core import (
    Polynomial,
    TripletSpec,
    build_BK,
    build_blocks,
    build_T,
    boundary_conditions_latex,
    exact_weyl_at_zero,
    gamma_matrices,
    green_identity_check,
    kernel_membership_check,
    second_order_RK_crosscheck,
    taylor_transport_check,
    verify_selfadjoint_identities,
)
from .weyl_numeric import friedrichs_divergence_check, weyl_limit_scan, weyl_M

# Fix Windows console encoding for emojis
if sys.platform == 'win32':
    try:
        sys.stdout.reconfigure(encoding='utf-8')
        sys.stderr.reconfigure(encoding='utf-8')
    except (AttributeError, OSError):
        pass

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_CHECK_FAILED = 2

FORMATS = ('json', 'csv', 'latex', 'table')

_STATUS_PREFIX = {
    'error': ('❌ ERROR:', 'ERROR:'),
    'warning': ('⚠️  Warning:', 'Warning:'),
    'success': ('✅', 'OK:'),
    'info': ('🔎', 'Info:'),
}


def status(kind, message):
    """Print a status line on standard error; NO_COLOR selects plain prefixes."""
    colored, plain = _STATUS_PREFIX[kind]
    prefix = plain if os.environ.get('NO_COLOR') else colored
    print(f"{prefix} {message}", file=sys.stderr)


def configure_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        stream=sys.stderr,
        format='%(levelname)s %(name)s: %(message)s',
    )


class _ArgumentParser(argparse.ArgumentParser):
    """argparse with the input-error exit code instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        status('error', message)
        sys.exit(EXIT_INPUT_ERROR)


def _spectral_value(text):
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(' ', ''))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a real or complex number: {text!r}") from None


def _add_interval(parser, n_required=True):
    parser.add_argument('--n', type=int, required=n_required, default=None,
                        help='Half-order n of (-1)^n d^(2n)/dx^(2n)')
    parser.add_argument('--a', type=str, default='0', help='Left endpoint, rational (default: 0)')
    parser.add_argument('--b', type=str, default='1', help='Right endpoint, rational (default: 1)')


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', help='Log debug records to standard error')
    common.add_argument('--stamp-version', action='store_true',
                        help='Add the analyzer version to the output (JSON field or comment line)')
    common.add_argument('--format', choices=FORMATS, default='json',
                        help='Output format (default: json)')

    parser = _ArgumentParser(
        prog='krein-analyzer',
        description='Krein Extension Analyzer - exact B_K and extension classification',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Krein boundary operator for y'''' on (0, 1)
  python main.py bk --n 2 --a 0 --b 1 --format latex

  # Classify an extension given by a job file
  python main.py classify job.json

  # Exact verification suite up to n = 6
  python main.py verify --n-max 6

  # Weyl function at z = -1 and its limit at zero
  python main.py weyl --n 1 --z -1
  python main.py weyl --n 1 --limit-scan 6 --format csv

  # Count negative eigenvalues and compare with the exact prediction
  python main.py spectrum job.json --check-against-inertia
        """
    )
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    bk = commands.add_parser('bk', parents=[common], help='Exact Krein boundary operator B_K')
    _add_interval(bk)
    bk.add_argument('--with-t', action='store_true', help='Also emit the transport matrix T')

    t_matrix = commands.add_parser('t-matrix', parents=[common], help='Transport matrix T and its blocks')
    _add_interval(t_matrix)
    t_matrix.add_argument('--blocks', action='store_true', help='Emit T1, T2, Q and S instead of T')
    t_matrix.add_argument('--conditions', action='store_true',
                          help='Emit the Krein boundary conditions as a LaTeX cases block')

    classify = commands.add_parser('classify', parents=[common], help='Negative squares of A_{C,D}')
    classify.add_argument('job', help='Job file (JSON with n, a, b and C, D or extension)')

    verify = commands.add_parser('verify', parents=[common], help='Exact verification suite')
    verify.add_argument('--n-max', type=int, default=4, help='Largest n to verify (default: 4)')
    verify.add_argument('--a', type=str, default='0', help='Left endpoint, rational (default: 0)')
    verify.add_argument('--b', type=str, default='1', help='Right endpoint, rational (default: 1)')

    weyl = commands.add_parser('weyl', parents=[common], help='Weyl function M(z)')
    _add_interval(weyl)
    mode = weyl.add_mutually_exclusive_group(required=True)
    mode.add_argument('--z', type=_spectral_value,
                      help='Spectral parameter; complex values as --z=-1+2j')
    mode.add_argument('--exact-zero', action='store_true', help='Exact M(0) in rational arithmetic')
    mode.add_argument('--limit-scan', type=int, metavar='K',
                      help='Convergence table at x = -10^-k, k = 1..K')
    mode.add_argument('--divergence', type=float, nargs='+', metavar='X',
                      help='Minimum eigenvalue of M(x) along decreasing negative x')

    spectrum = commands.add_parser('spectrum', parents=[common], help='Eigenvalue scan of A_{C,D}')
    spectrum.add_argument('job', help='Job file (JSON with n, a, b and C, D or extension)')
    spectrum.add_argument('--lambda-min', type=float, default=None,
                          help='Negative scan floor (default: -1e4 * (b-a)^(-2n))')
    spectrum.add_argument('--grid-points', type=int, default=ScanConfig.grid_points,
                          help=f'Grid size (default: {ScanConfig.grid_points})')
    spectrum.add_argument('--bisect-tol', type=float, default=ScanConfig.bisect_tol,
                          help='Relative bisection tolerance')
    spectrum.add_argument('--nullity-tol', type=float, default=ScanConfig.nullity_tol,
                          help='Relative singular-value threshold')
    spectrum.add_argument('--check-against-inertia', action='store_true',
                          help='Exit 2 unless the count equals the exact negative squares')
    spectrum.add_argument('--window', type=float, nargs=2, metavar=('LO', 'HI'), default=None,
                          help='Also list positive eigenvalues in (LO, HI)')
    spectrum.add_argument('--grid-dump', type=str, default=None, metavar='PATH',
                          help='Write the negative-grid determinant samples as CSV')

    xcheck = commands.add_parser('xcheck', parents=[common],
                                 help='R_K = S T S and exact M(0) = B_K cross-checks')
    xcheck.add_argument('--n-max', type=int, default=6, help='Largest n for exact M(0) = B_K (default: 6)')
    xcheck.add_argument('--a', type=str, default='0', help='Left endpoint, rational (default: 0)')
    xcheck.add_argument('--b', type=str, default='1', help='Right endpoint, rational (default: 1)')

    return parser


def parse_arguments(argv=None):
    """
    Parse and validate command-line arguments.

    Returns:
        argparse.Namespace: Parsed arguments, with `spec` set for commands
        that take an interval
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    validate_arguments(args)
    return args


def _fail(message, *details):
    status('error', message)
    for line in details:
        print(f"   {line}", file=sys.stderr)
    sys.exit(EXIT_INPUT_ERROR)


def validate_arguments(args):
    """
    Validate command-line arguments and build the interval spec.

    Raises:
        SystemExit: Exit code 1 with a message on standard error
    """
    args.spec = None
    if args.command in ('bk', 't-matrix', 'weyl'):
        try:
            args.spec = TripletSpec(args.n, args.a, args.b)
        except KreinError as exc:
            _fail(f"{type(exc).__name__}: {exc}")

    if args.command in ('verify', 'xcheck'):
        if args.n_max < 1:
            _fail(f"--n-max must be at least 1, got {args.n_max}")
        try:
            TripletSpec(1, args.a, args.b)
        except KreinError as exc:
            _fail(f"{type(exc).__name__}: {exc}")

    if args.command == 'weyl':
        if args.limit_scan is not None and args.limit_scan < 1:
            _fail(f"--limit-scan must be at least 1, got {args.limit_scan}")
        if args.format == 'latex' and not args.exact_zero:
            _fail("LaTeX output is only available for exact matrices (use --exact-zero)")

    if args.command == 'spectrum':
        if args.window is not None and not 0 < args.window[0] < args.window[1]:
            _fail(f"--window needs 0 < LO < HI, got {args.window[0]} {args.window[1]}")
        try:
            args.scan_config = ScanConfig(
                lambda_min=args.lambda_min,
                grid_points=args.grid_points,
                bisect_tol=args.bisect_tol,
                nullity_tol=args.nullity_tol,
            )
        except KreinError as exc:
            _fail(f"{type(exc).__name__}: {exc}")

    if args.command in ('classify', 'spectrum', 'verify', 'xcheck') and args.format == 'latex':
        _fail(f"LaTeX output is not available for '{args.command}'")


# Output


def _spec_fields(spec):
    return {'n': spec.n, 'a': format_rational(spec.a), 'b': format_rational(spec.b)}


def emit(args, document=None, text=None):
    """Write a JSON document or preformatted text to standard output."""
    if args.format == 'json':
        if args.stamp_version:
            document = dict(document, version=__version__)
        output = dumps_json(document)
    else:
        output = text if text.endswith('\n') else text + '\n'
        if args.stamp_version:
            output = stamp_text(output, args.format, __version__)
    sys.stdout.write(output)


def _render_matrices(args, named):
    """Emit (name, RationalMatrix) pairs in the requested format."""
    fmt = args.format
    if fmt == 'json':
        if len(named) == 1:
            document = dict(named[0][1].to_json(), **_spec_fields(args.spec))
        else:
            document = dict(_spec_fields(args.spec), **{name: m.to_json() for name, m in named})
        emit(args, document=document)
    elif fmt == 'latex':
        emit(args, text=',\n'.join(f"{name}={latex_pmatrix(m)}" for name, m in named))
    elif fmt == 'csv':
        if len(named) == 1:
            emit(args, text=matrix_to_csv(named[0][1]))
        else:
            emit(args, text=''.join(f"# {name}\n{matrix_to_csv(m)}" for name, m in named))
    else:
        emit(args, text='\n'.join(f"{name}:\n{matrix_table(m)}" for name, m in named))


# Commands


def cmd_bk(args):
    named = []
    if args.with_t:
        named.append(('T', build_T(args.spec)))
    named.append(('B_K', build_BK(args.spec)))
    _render_matrices(args, named)
    return EXIT_OK


def cmd_t_matrix(args):
    spec = args.spec
    if args.conditions:
        latex = boundary_conditions_latex(spec)
        if args.format == 'json':
            emit(args, document=dict(_spec_fields(spec), conditions=latex))
        else:
            emit(args, text=latex)
        return EXIT_OK
    if args.blocks:
        _render_matrices(args, list(zip(('T_1', 'T_2', 'Q', 'S'), build_blocks(spec))))
    else:
        _render_matrices(args, [('T', build_T(spec))])
    return EXIT_OK


def _load_valid_job(path):
    job = load_job(path)
    ensure_valid(job.params, job.spec)
    return job


def cmd_classify(args):
    job = _load_valid_job(args.job)
    report = negative_squares(job.params, job.spec)
    if args.format == 'json':
        emit(args, document=dict(_spec_fields(job.spec), **report.to_dict()))
    else:
        counts = report.classifier_inertia
        rows = [[job.spec.n, report.kappa, counts.n_neg, counts.n_zero, counts.n_pos,
                 report.nonnegative, report.posdef_verdict.value]]
        headers = ['n', 'kappa', 'n_neg', 'n_zero', 'n_pos', 'nonnegative', 'posdef']
        if args.format == 'csv':
            emit(args, text=frame_to_csv(pd.DataFrame(rows, columns=headers)))
        else:
            emit(args, text=records_table(rows, headers))
    return EXIT_OK


def _check(name, passed, detail=''):
    return {'name': name, 'passed': bool(passed), 'detail': detail}


def verify_spec(spec):
    """
    Run every exact check for one spec.

    Returns:
        list: Check records (name, passed, detail)
    """
    n = spec.n
    size = spec.dimension
    bk = build_BK(spec)
    gamma = gamma_matrices(spec)
    t_matrix = build_T(spec)
    checks = [_check(c.name, c.passed, c.detail) for c in verify_selfadjoint_identities(spec).checks]

    checks.append(_check('bk_symmetric', bk.is_symmetric()))
    checks.append(_check('exact_weyl_at_zero_equals_bk', exact_weyl_at_zero(spec) == bk))
    checks.append(_check('gamma_surjective', rank(gamma.stacked()) == 2 * size))

    kernel_basis = [Polynomial.monomial(m) for m in range(size)]
    bad = [p.degree for p in kernel_basis if not taylor_transport_check(spec, p, t_matrix)]
    checks.append(_check('taylor_transport', not bad, f"failed for degrees {bad}" if bad else ''))
    bad = [p.degree for p in kernel_basis if not kernel_membership_check(spec, p, bk, gamma)]
    checks.append(_check('kernel_membership', not bad, f"failed for degrees {bad}" if bad else ''))

    monomials = [Polynomial.monomial(m) for m in range(size + 4)]
    bad = [
        (f.degree, g.degree)
        for f in monomials for g in monomials
        if not green_identity_check(spec, f, g, gamma).holds
    ]
    checks.append(_check('green_identity', not bad, f"failed for degree pairs {bad[:5]}" if bad else ''))

    nullity = inertia(bk).n_zero
    checks.append(_check('bk_nullity', nullity == n, f"n_zero={nullity}, expected {n}"))

    if n == 1:
        crosscheck = second_order_RK_crosscheck(spec.a, spec.b)
        checks.append(_check('second_order_rk', crosscheck.equal))
    return checks


def cmd_verify(args):
    results = []
    for n in range(1, args.n_max + 1):
        spec = TripletSpec(n, args.a, args.b)
        try:
            checks = verify_spec(spec)
        except InternalDefect as exc:
            checks = [_check('internal_defect', False, str(exc))]
        results.append({'n': n, 'passed': all(c['passed'] for c in checks), 'checks': checks})

    passed = all(r['passed'] for r in results)
    if args.format == 'json':
        emit(args, document={'a': format_rational(parse_rational(args.a)),
                             'b': format_rational(parse_rational(args.b)),
                             'passed': passed, 'results': results})
    else:
        rows = [[r['n'], c['name'], c['passed'], c['detail']] for r in results for c in r['checks']]
        headers = ['n', 'check', 'passed', 'detail']
        if args.format == 'csv':
            emit(args, text=frame_to_csv(pd.DataFrame(rows, columns=headers)))
        else:
            emit(args, text=records_table(rows, headers))

    if not passed:
        failed = [f"n={r['n']}: {c['name']}" for r in results for c in r['checks'] if not c['passed']]
        status('error', f"Verification failed ({len(failed)} check(s)): {', '.join(failed[:10])}")
        return EXIT_CHECK_FAILED
    status('success', f"All checks passed for n = 1..{args.n_max}")
    return EXIT_OK


def cmd_weyl(args):
    spec = args.spec
    if args.exact_zero:
        _render_matrices(args, [('M(0)', exact_weyl_at_zero(spec))])
        return EXIT_OK

    if args.limit_scan is not None:
        frame = weyl_limit_scan(spec, range(1, args.limit_scan + 1))
    elif args.divergence is not None:
        report = friedrichs_divergence_check(spec, args.divergence)
        if report.truncated:
            status('warning', 'Sample truncated: the jet transport overflowed')
        if args.format == 'json':
            emit(args, document=dict(_spec_fields(spec), rows=report.table.to_dict('records'),
                                     truncated=report.truncated,
                                     strictly_decreasing=report.strictly_decreasing))
            return EXIT_OK
        frame = report.table
    else:
        sample = weyl_M(spec, args.z)
        if args.format == 'json':
            document = dict(_spec_fields(spec), **sample.to_dict())
            document['symmetry_defect'] = sample.symmetry_defect()
            emit(args, document=document)
        elif args.format == 'csv':
            emit(args, text=pd.DataFrame(sample.M).to_csv(index=False, header=False))
        else:
            emit(args, text=records_table(sample.M.tolist(), []))
        return EXIT_OK

    if args.format == 'json':
        emit(args, document=dict(_spec_fields(spec), rows=frame.to_dict('records')))
    elif args.format == 'csv':
        emit(args, text=frame_to_csv(frame))
    else:
        emit(args, text=frame_table(frame))
    return EXIT_OK


def cmd_spectrum(args):
    job = _load_valid_job(args.job)
    config = args.scan_config
    report = count_negative_eigenvalues(job.params, job.spec, config)
    for message in report.warnings:
        status('warning', message)

    document = dict(_spec_fields(job.spec), scan=report.to_dict())
    exit_code = EXIT_OK

    if args.window is not None:
        roots = positive_eigenvalues_in(job.params, job.spec, args.window[0], args.window[1], config)
        document['window'] = {
            'lo': args.window[0],
            'hi': args.window[1],
            'roots': [{'lambda': r.value, 'nullity': r.nullity} for r in roots],
        }

    if args.grid_dump:
        frame = grid_dump(job.params, job.spec, negative_grid(job.spec, config))
        frame.to_csv(args.grid_dump, index=False)
        status('info', f"Grid samples saved to: {args.grid_dump}")

    if args.check_against_inertia:
        kappa = negative_squares(job.params, job.spec).kappa
        agrees = kappa == report.negative_count
        document['prediction'] = {'kappa': kappa, 'agrees': agrees}
        if agrees:
            status('success', f"Scan count {report.negative_count} matches kappa = {kappa}")
        else:
            status('error', f"Scan count {report.negative_count} disagrees with kappa = {kappa}")
            exit_code = EXIT_CHECK_FAILED

    if args.format == 'json':
        emit(args, document=document)
    else:
        rows = [[r.value, r.nullity] for r in report.roots]
        if args.format == 'csv':
            emit(args, text=frame_to_csv(pd.DataFrame(rows, columns=['lambda', 'nullity'])))
        else:
            emit(args, text=records_table(rows, ['lambda', 'nullity'])
                 + f"\nnegative_count: {report.negative_count}"
                 + f"\nkernel_dim_at_zero: {report.kernel_dim_at_zero}")
    return exit_code


def cmd_xcheck(args):
    crosscheck = second_order_RK_crosscheck(args.a, args.b)
    agreement = []
    for n in range(1, args.n_max + 1):
        spec = TripletSpec(n, args.a, args.b)
        agreement.append({'n': n, 'equal': exact_weyl_at_zero(spec) == build_BK(spec)})
    passed = crosscheck.equal and all(row['equal'] for row in agreement)

    if args.format == 'json':
        emit(args, document={
            'rk_crosscheck': {'R_K': crosscheck.rk.to_json(), 'STS': crosscheck.st_s.to_json(),
                              'equal': crosscheck.equal},
            'exact_vs_block': agreement,
            'passed': passed,
        })
    else:
        rows = [['R_K = S T S', 1, crosscheck.equal]]
        rows += [['M(0) = B_K', row['n'], row['equal']] for row in agreement]
        headers = ['check', 'n', 'equal']
        if args.format == 'csv':
            emit(args, text=frame_to_csv(pd.DataFrame(rows, columns=headers)))
        else:
            emit(args, text=records_table(rows, headers))

    if not passed:
        status('error', 'Cross-check failed')
        return EXIT_CHECK_FAILED
    return EXIT_OK


COMMANDS = {
    'bk': cmd_bk,
    't-matrix': cmd_t_matrix,
    'classify': cmd_classify,
    'verify': cmd_verify,
    'weyl': cmd_weyl,
    'spectrum': cmd_spectrum,
    'xcheck': cmd_xcheck,
}


def main(argv=None):
    """
    Parse arguments, run one command and map errors onto exit codes.

    Returns:
        int: 0 success, 1 input error, 2 verification or check failure
    """
    args = parse_arguments(argv)
    configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except InvalidExtension as exc:
        status('error', 'InvalidExtension: the (C, D) pair is not admissible')
        for violation in exc.violations:
            print(f"   - {violation}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except InternalDefect as exc:
        status('error', f"InternalDefect: {exc}")
        return EXIT_CHECK_FAILED
    except KreinError as exc:
        status('error', f"{type(exc).__name__}: {exc}")
        return EXIT_INPUT_ERROR
    except KeyboardInterrupt:
        status('warning', 'Interrupted by user.')
        return EXIT_INPUT_ERROR
