"""
This module is the command line entry point of the package.
It builds a RunConfig from a JSON document and flags, runs one subcommand and writes CSV or JSON tables.
"""
import argparse
import csv
import io
import json
import math
import sys
from logger import log
from .config import RunConfig, parse_point
from .constants import (
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    EXIT_VALIDATION_ERROR,
    FLOAT_FORMAT,
    KERNEL_TABLE_HEADER,
    OUTPUT_FORMATS,
    REPORT_HEADER,
)
from .exceptions import (
    CalibrationMismatch,
    ConfigurationError,
    DerivativeOrderNotSupported,
    FactorizationFailed,
    IndefiniteMassMatrix,
    InvalidDimension,
    InvalidParameters,
    MonomialCeilingExceeded,
    PointOutsideSimplex,
    QuadratureOrderTooSmall,
)
from .kernels import KernelMethod, christoffel, kernel_integral_form, kernel_sum_eval, kernel_vertex_closed_form
from .oracle import verification_suite
from .polycore import dims, enumerate_degree
from .simplex_basis import BasisSpec, simplex_vertex
from .simplex_mass import KernelTable, VertexMassModel, face_limit_table
from .uvarov_engine import UvarovEngine

VALIDATION_ERRORS = (
    ConfigurationError,
    DerivativeOrderNotSupported,
    InvalidDimension,
    InvalidParameters,
    MonomialCeilingExceeded,
    PointOutsideSimplex,
    QuadratureOrderTooSmall,
)
NUMERICAL_ERRORS = (CalibrationMismatch, FactorizationFailed, IndefiniteMassMatrix)


class _Parser(argparse.ArgumentParser):
    """Argument parser raising ConfigurationError instead of exiting."""

    def error(self, message):
        raise ConfigurationError(message)


def _coordinates(raw: str, name: str) -> list:
    try:
        return [float(value) for value in raw.split(',')]
    except ValueError as exception:
        raise ConfigurationError(f"Option {name} must be comma-separated numbers, got {raw!r}") from exception


def _integers(raw: str, name: str) -> list:
    try:
        return [int(value) for value in raw.split(',')]
    except ValueError as exception:
        raise ConfigurationError(f"Option {name} must be comma-separated integers, got {raw!r}") from exception


def _format_value(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return format(value, FLOAT_FORMAT)
    return value


def emit_table(rows, fmt: str = "csv", destination: str = None, header: tuple = KERNEL_TABLE_HEADER) -> None:
    """
    Write rows as CSV (floats with 17 significant digits) or as a JSON array of row objects.

    Args:
        :param rows (KernelTable | iterable): A KernelTable, or objects with as_dict(), or dictionaries.
        :param fmt (str): 'csv' or 'json'.
        :param destination (str): File path; None writes to stdout.
        :param header (tuple): Column order.

    Raises:
        ConfigurationError: If the format is unknown or the destination cannot be written.

    Examples:
        >>> emit_table([], "csv", header=("n", "value"))
        n,value
    """
    if fmt not in OUTPUT_FORMATS:
        raise ConfigurationError(f"Output format must be one of {OUTPUT_FORMATS}, got {fmt!r}")
    if isinstance(rows, KernelTable):
        rows = rows.rows
    records = [row.as_dict() if hasattr(row, 'as_dict') else dict(row) for row in rows]
    buffer = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(header)
        for record in records:
            writer.writerow([_format_value(record[key]) for key in header])
    else:
        json.dump([{key: _json_value(record[key]) for key in header} for record in records], buffer, indent=2)
        buffer.write('\n')
    if destination is None:
        sys.stdout.write(buffer.getvalue())
        return
    try:
        with open(destination, 'w', encoding='utf-8', newline='') as handle:
            handle.write(buffer.getvalue())
    except OSError as exception:
        log.error('[Uvarov.Cli]: cannot write %s: %s', destination, exception)
        raise ConfigurationError(f"Cannot write output {destination}: {exception}") from exception
    log.info('[Uvarov.Cli]: %s rows written to %s', len(records), destination)


def _run_config(args) -> RunConfig:
    """Load the --config document and apply the command line overrides."""
    document = RunConfig.load_document(args.config) if args.config else {}
    if not isinstance(document, dict):
        raise ConfigurationError("Configuration must be a JSON object")
    if args.d is not None:
        document['d'] = args.d
    if args.sigma is not None:
        document.pop('kappa', None)
        document['sigma'] = args.sigma
    if args.kappa is not None:
        document.pop('sigma', None)
        document['kappa'] = _coordinates(args.kappa, '--kappa')
    if args.M is not None:
        document['mass'] = {'vertices': True, 'M': args.M}
    if getattr(args, 'n', None) is not None:
        document.pop('max_degree', None)
        document['degrees'] = [args.n]
    if getattr(args, 'degrees', None) is not None:
        document.pop('max_degree', None)
        document['degrees'] = _integers(args.degrees, '--degrees')
    if args.point:
        points = []
        for index, raw in enumerate(args.point):
            point_id, _, coords = raw.rpartition('=')
            points.append({'id': point_id or f"p{index + 1}", 'coords': _coordinates(coords, '--point')})
        document['points'] = points
    output = dict(document.get('output') or {})
    if args.format is not None:
        output['format'] = args.format
    if args.out is not None:
        output['path'] = args.out
    document['output'] = output
    return RunConfig.from_dict(document)


def _point_option(args, name: str, config: RunConfig):
    raw = getattr(args, name)
    if raw is None:
        raise ConfigurationError(f"Option --{name} is required")
    return parse_point(_coordinates(raw, f"--{name}"), config.d, name)


def _default_points(d: int) -> list:
    centroid = [1.0 / (d + 1)] * d
    edge = [0.5] + [0.0] * (d - 1)
    return [('centroid', centroid), ('edge', edge), ('vertex', simplex_vertex(d, 1).tolist())]


def _emit(config: RunConfig, rows, header: tuple) -> None:
    emit_table(rows, config.output_format, config.output_path, header)


def _run_dims(args) -> int:
    if args.d is None or args.n is None:
        raise ConfigurationError("dims needs --d and --n")
    r, total = dims(args.d, args.n)
    sys.stdout.write(f"r={r},total={total}\n")
    return EXIT_OK


def _run_basis(args) -> int:
    config = _run_config(args)
    n = config.max_degree
    x = _point_option(args, 'x', config)
    spec = BasisSpec(params=config.params(), max_degree=n)
    layout = enumerate_degree(config.d, n)
    rows = [{'n': n, 'alpha': '-'.join(str(e) for e in alpha.exponents), 'value': float(value)}
            for alpha, value in zip(layout.indices, spec.evaluate(n, x))]
    _emit(config, rows, ('n', 'alpha', 'value'))
    return EXIT_OK


def _vertex_index(y, d: int) -> int:
    for i in range(1, d + 2):
        if all(abs(a - b) <= 1e-12 for a, b in zip(y, simplex_vertex(d, i))):
            return i
    raise ConfigurationError("The closed form needs --y at a vertex of the simplex")


def _run_kernel(args) -> int:
    config = _run_config(args)
    x = _point_option(args, 'x', config)
    y = _point_option(args, 'y', config)
    spec = BasisSpec(params=config.params(), max_degree=config.max_degree)
    method = KernelMethod(args.method)
    rows = []
    for n in config.degrees:
        if method is KernelMethod.CLOSED_FORM:
            value = kernel_vertex_closed_form(spec, n, x, _vertex_index(y, config.d))
        elif method is KernelMethod.INTEGRAL_FORM:
            value = kernel_integral_form(spec, n, x, y)
        else:
            value = kernel_sum_eval(spec, n, x, y)
        rows.append({'n': n, 'method': method.value, 'value': value.value})
    _emit(config, rows, ('n', 'method', 'value'))
    return EXIT_OK


def _engine(config: RunConfig) -> tuple:
    mass = config.mass_spec()
    if mass is None:
        raise ConfigurationError("This command needs mass conditions (--M or a 'mass' section)")
    spec = BasisSpec(params=config.params(), max_degree=config.max_degree)
    return spec, UvarovEngine(provider=spec, mass=mass)


def _run_modified_kernel(args) -> int:
    config = _run_config(args)
    x = _point_option(args, 'x', config)
    y = _point_option(args, 'y', config)
    _, engine = _engine(config)
    rows = []
    for n in config.degrees:
        base = engine.base_kernel(n, x, y)
        modified = engine.modified_sum_kernel(n, x, y)
        rows.append({'n': n, 'K_base': base, 'K_nu': modified, 'diff': modified - base})
    _emit(config, rows, ('n', 'K_base', 'K_nu', 'diff'))
    return EXIT_OK


def _run_christoffel(args) -> int:
    config = _run_config(args)
    x = _point_option(args, 'x', config)
    spec = BasisSpec(params=config.params(), max_degree=config.max_degree)
    engine = UvarovEngine(provider=spec, mass=config.mass_spec()) if config.mass is not None else None
    rows = []
    for n in config.degrees:
        base = christoffel(spec, n, x)
        rows.append({'n': n, 'christoffel_base': base,
                     'christoffel_nu': engine.christoffel(n, x) if engine is not None else base})
    _emit(config, rows, ('n', 'christoffel_base', 'christoffel_nu'))
    return EXIT_OK


def _run_asymptotics(args) -> int:
    config = _run_config(args)
    params = config.params()
    if not params.is_symmetric:
        raise ConfigurationError("asymptotics needs a symmetric weight (sigma)")
    masses = config.asymptotic_masses
    if not masses:
        if config.mass is None or config.mass.vertex_mass is None:
            raise ConfigurationError("asymptotics needs vertex masses (--M, mass.vertices or asymptotic_masses)")
        masses = (config.mass.vertex_mass,)
    points = [(pid, x.tolist()) for pid, x in config.points] or _default_points(config.d)
    spec = BasisSpec(params=params, max_degree=config.max_degree)
    rows = []
    for mass in masses:
        table = face_limit_table(VertexMassModel(d=config.d, sigma=params.sigma, M=mass), spec, config.degrees, points)
        for point_id, limits in table.limits.items():
            log.info('[Uvarov.Cli]: M=%s point %s limits base=%.17g nu=%.17g converged=%s',
                     mass, point_id, limits['base'].value, limits['nu'].value, limits['nu'].converged)
        log.info('[Uvarov.Cli]: vertex limit candidates %s', table.candidates)
        rows.extend(table.rows)
    _emit(config, rows, KERNEL_TABLE_HEADER)
    return EXIT_OK


def _run_verify(args) -> int:
    config = _run_config(args)
    mass = config.mass_spec()
    if mass is None:
        raise ConfigurationError("verify needs mass conditions (--M or a 'mass' section)")
    points = [x for _, x in config.points] or [x for _, x in _default_points(config.d)]
    spec = BasisSpec(params=config.params(), max_degree=config.max_degree)
    report = verification_suite(spec, mass, config.degrees, points, config.tolerance)
    _emit(config, report.rows(), REPORT_HEADER)
    for message in report.diagnostics:
        sys.stderr.write(f"uvarov-mvop: {message}\n")
    return EXIT_OK if report.passed else EXIT_NUMERICAL_FAILURE


COMMANDS = {
    'dims': _run_dims,
    'basis': _run_basis,
    'kernel': _run_kernel,
    'modified-kernel': _run_modified_kernel,
    'christoffel': _run_christoffel,
    'asymptotics': _run_asymptotics,
    'verify': _run_verify,
}


def build_parser() -> argparse.ArgumentParser:
    """The argument parser with one subparser per command."""
    common = _Parser(add_help=False)
    common.add_argument('--config', help="UTF-8 JSON run configuration")
    common.add_argument('--d', type=int, help="dimension of the simplex")
    common.add_argument('--sigma', type=float, help="symmetric Jacobi exponent")
    common.add_argument('--kappa', help="comma-separated Jacobi exponents kappa_1..kappa_{d+1}")
    common.add_argument('--M', type=float, help="equal mass at every vertex")
    common.add_argument('--point', action='append', help="evaluation point [ID=]x1,x2,... (repeatable)")
    common.add_argument('--format', choices=OUTPUT_FORMATS, help="output format")
    common.add_argument('--out', help="output file, stdout when omitted")
    parser = _Parser(prog='uvarov-mvop', description="Uvarov-modified orthogonal polynomials on the simplex")
    commands = parser.add_subparsers(dest='command', required=True)
    dims_parser = commands.add_parser('dims', help="dimensions r_n and total of degree n")
    dims_parser.add_argument('--d', type=int)
    dims_parser.add_argument('--n', type=int)
    for name, help_text in (('basis', "orthonormal basis block at a point"),
                            ('kernel', "kernel K_n(W; x, y) of the base weight"),
                            ('modified-kernel', "kernel K_n(nu; x, y) with masses"),
                            ('christoffel', "Christoffel functions at a point")):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument('--n', type=int, help="degree")
        sub.add_argument('--degrees', help="comma-separated degrees")
        sub.add_argument('--x', help="point x, Cartesian or barycentric")
        if name in ('kernel', 'modified-kernel'):
            sub.add_argument('--y', help="point y, Cartesian or barycentric")
        if name == 'kernel':
            sub.add_argument('--method', choices=[m.value for m in KernelMethod], default=KernelMethod.BASIS_SUM.value)
    asymptotics = commands.add_parser('asymptotics', parents=[common], help="sweep of the kernel asymptotics")
    asymptotics.add_argument('--degrees', help="comma-separated degrees")
    verify = commands.add_parser('verify', parents=[common], help="verification suite against the oracle")
    verify.add_argument('--degrees', help="comma-separated degrees")
    return parser


def dispatch(argv=None) -> int:
    """
    Run one subcommand and map the outcome to an exit code.

    Returns:
        (int): 0 on success, 1 on a validation error, 2 on a numerical failure;
            failures print a single-line diagnostic to stderr.
    """
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except NUMERICAL_ERRORS as exception:
        log.error('[Uvarov.Cli]: numerical failure: %s', exception.message)
        sys.stderr.write(f"uvarov-mvop: {exception.message}\n")
        return EXIT_NUMERICAL_FAILURE
    except VALIDATION_ERRORS as exception:
        log.error('[Uvarov.Cli]: invalid input: %s', exception.message)
        sys.stderr.write(f"uvarov-mvop: {exception.message}\n")
        return EXIT_VALIDATION_ERROR
    except SystemExit as exit_request:
        return int(exit_request.code or 0)


def main() -> None:
    """Console script entry point."""
    sys.exit(dispatch(sys.argv[1:]))
