"""
This module parses run configurations from UTF-8 JSON documents
and reads the sweep parallelism setting from the environment.
"""
import json
import math
import os
from dataclasses import dataclass
import numpy as np
from logger import log
from .constants import BARYCENTRIC_TOLERANCE, OUTPUT_FORMATS, THREADS_ENV_VAR, VERIFY_TOLERANCE
from .exceptions import ConfigurationError
from .polycore import MultiIndex
from .simplex_basis import SimplexJacobiParams, simplex_vertex
from .uvarov_engine import MassSpec


def sweep_workers() -> int:
    """
    Thread count for sweeps from UVAROV_MVOP_THREADS; None (automatic) when unset or 0.

    Raises:
        ConfigurationError: If the variable is not a nonnegative integer.
    """
    raw = os.environ.get(THREADS_ENV_VAR, "").strip()
    if not raw:
        return None
    try:
        value = int(raw)
    except ValueError as exception:
        log.error('[Uvarov.Config]: %s=%s is not an integer', THREADS_ENV_VAR, raw)
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be a nonnegative integer, got {raw!r}") from exception
    if value < 0:
        raise ConfigurationError(f"{THREADS_ENV_VAR} must be a nonnegative integer, got {value}")
    return value or None


def _number(value, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        log.error('[Uvarov.Config]: field %s is not a finite number: %s', name, value)
        raise ConfigurationError(f"Field '{name}' must be a finite number, got {value!r}")
    return float(value)


def _integer(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        log.error('[Uvarov.Config]: field %s is not an integer: %s', name, value)
        raise ConfigurationError(f"Field '{name}' must be an integer, got {value!r}")
    return value


def parse_point(coords, d: int, name: str = "point") -> np.ndarray:
    """
    Convert Cartesian (d entries) or barycentric (d + 1 entries summing to 1) coordinates to a Cartesian point.

    Raises:
        ConfigurationError: If the coordinates have the wrong length, are not finite,
            or barycentric coordinates do not sum to 1.

    Examples:
        >>> parse_point([0.25, 0.25, 0.5], 2)
        array([0.25, 0.25])
    """
    if not isinstance(coords, (list, tuple)):
        raise ConfigurationError(f"Field '{name}' must be a list of coordinates, got {coords!r}")
    values = [_number(v, name) for v in coords]
    if len(values) == d:
        return np.array(values)
    if len(values) == d + 1:
        if abs(math.fsum(values) - 1.0) > BARYCENTRIC_TOLERANCE:
            log.error('[Uvarov.Config]: barycentric coordinates %s do not sum to 1', values)
            raise ConfigurationError(f"Barycentric coordinates of '{name}' must sum to 1, got {math.fsum(values)!r}")
        return np.array(values[:d])
    raise ConfigurationError(f"Field '{name}' needs {d} Cartesian or {d + 1} barycentric coordinates, got {len(values)}")


@dataclass(frozen=True)
class MassConfig:
    """
    Mass conditions of a run: equal masses at the vertices, or explicit points and weights.

    Attributes:
        vertex_mass (float): The mass M at every vertex; None for explicit points.
        points (tuple): Explicit Cartesian mass points.
        matrix (tuple): Rows of the weight matrix Lambda.
        deriv_orders (tuple): Derivative orders per point, or None for the plain case.
    """
    vertex_mass: float = None
    points: tuple = ()
    matrix: tuple = ()
    deriv_orders: tuple = None


@dataclass(frozen=True)
class RunConfig:
    """
    A run of the command line tool.

    Attributes:
        d (int): Dimension.
        kappa (tuple): The d + 1 Jacobi exponents.
        mass (MassConfig): The mass conditions; None for the base measure only.
        degrees (tuple): Degrees to evaluate.
        points (tuple): Pairs (point_id, Cartesian point).
        tolerance (float): Verification tolerance.
        asymptotic_masses (tuple): Vertex masses compared in the limit sweep.
        output_path (str): Destination of the table; None for stdout.
        output_format (str): 'csv' or 'json'.

    Methods:
        from_dict: Validate a parsed JSON document.
        from_file: Read and validate a UTF-8 JSON file.
        params: The simplex weight.
        mass_spec: The MassSpec of the configured mass conditions.

    Raises:
        ConfigurationError: If a field is missing or malformed.

    Examples:
        >>> config = RunConfig.from_dict({"d": 2, "sigma": 0, "max_degree": 3})
        >>> config.degrees
        (0, 1, 2, 3)
    """
    d: int
    kappa: tuple
    mass: MassConfig = None
    degrees: tuple = (0,)
    points: tuple = ()
    tolerance: float = VERIFY_TOLERANCE
    asymptotic_masses: tuple = ()
    output_path: str = None
    output_format: str = "csv"

    @classmethod
    def from_dict(cls, data: dict) -> 'RunConfig':
        """Validate a parsed JSON document."""
        if not isinstance(data, dict):
            raise ConfigurationError("Configuration must be a JSON object")
        if 'd' not in data:
            log.error('[Uvarov.Config]: field d is missing')
            raise ConfigurationError("Field 'd' is required")
        d = _integer(data['d'], 'd')
        if d < 1:
            raise ConfigurationError(f"Field 'd' must be at least 1, got {d}")
        kappa = cls._parse_kappa(data, d)
        degrees = cls._parse_degrees(data)
        points = []
        for index, entry in enumerate(data.get('points', [])):
            if isinstance(entry, dict):
                point_id = str(entry.get('id', f"p{index + 1}"))
                coords = entry.get('coords')
            else:
                point_id, coords = f"p{index + 1}", entry
            points.append((point_id, parse_point(coords, d, f"points[{index}]")))
        ids = [pid for pid, _ in points]
        if len(set(ids)) != len(ids):
            raise ConfigurationError(f"Point ids must be unique, got {ids}")
        tolerance = _number(data.get('tolerance', VERIFY_TOLERANCE), 'tolerance')
        if tolerance <= 0.0:
            raise ConfigurationError(f"Field 'tolerance' must be positive, got {tolerance}")
        masses = tuple(_number(m, 'asymptotic_masses') for m in data.get('asymptotic_masses', []))
        output = data.get('output', {}) or {}
        if not isinstance(output, dict):
            raise ConfigurationError("Field 'output' must be an object")
        output_format = output.get('format', 'csv')
        if output_format not in OUTPUT_FORMATS:
            raise ConfigurationError(f"Output format must be one of {OUTPUT_FORMATS}, got {output_format!r}")
        config = cls(
            d=d,
            kappa=kappa,
            mass=cls._parse_mass(data.get('mass'), d),
            degrees=degrees,
            points=tuple(points),
            tolerance=tolerance,
            asymptotic_masses=masses,
            output_path=output.get('path'),
            output_format=output_format,
        )
        log.info('[Uvarov.Config]: configuration loaded for d=%s kappa=%s degrees=%s', d, kappa, degrees)
        return config

    @staticmethod
    def load_document(path: str) -> dict:
        """Read a UTF-8 JSON document without validating it."""
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                return json.load(handle)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exception:
            log.error('[Uvarov.Config]: cannot read configuration %s: %s', path, exception)
            raise ConfigurationError(f"Cannot read configuration {path}: {exception}") from exception

    @classmethod
    def from_file(cls, path: str) -> 'RunConfig':
        """Read and validate a UTF-8 JSON file."""
        return cls.from_dict(cls.load_document(path))

    @staticmethod
    def _parse_kappa(data: dict, d: int) -> tuple:
        if 'kappa' in data and 'sigma' in data:
            raise ConfigurationError("Give either 'kappa' or 'sigma', not both")
        if 'kappa' in data:
            kappa = data['kappa']
            if not isinstance(kappa, list) or len(kappa) != d + 1:
                raise ConfigurationError(f"Field 'kappa' must list d + 1 = {d + 1} numbers")
            values = tuple(_number(k, 'kappa') for k in kappa)
        else:
            values = (_number(data.get('sigma', 0.0), 'sigma'),) * (d + 1)
        if any(k < 0.0 for k in values):
            raise ConfigurationError(f"kappa entries must be nonnegative, got {values}")
        return values

    @staticmethod
    def _parse_degrees(data: dict) -> tuple:
        if 'degrees' in data:
            raw = data['degrees']
            if not isinstance(raw, list) or not raw:
                raise ConfigurationError("Field 'degrees' must be a nonempty list")
            degrees = sorted(set(_integer(n, 'degrees') for n in raw))
        else:
            top = _integer(data.get('max_degree', 0), 'max_degree')
            degrees = list(range(top + 1))
        if degrees[0] < 0:
            raise ConfigurationError(f"Degrees must be nonnegative, got {degrees[0]}")
        return tuple(degrees)

    @staticmethod
    def _parse_mass(raw, d: int) -> MassConfig:
        if raw is None:
            return None
        if not isinstance(raw, dict):
            raise ConfigurationError("Field 'mass' must be an object")
        if raw.get('vertices'):
            vertex_mass = _number(raw.get('M', 1.0), 'mass.M')
            if vertex_mass < 0.0:
                raise ConfigurationError(f"Vertex mass must be nonnegative, got {vertex_mass}")
            return MassConfig(vertex_mass=vertex_mass)
        if 'points' not in raw:
            raise ConfigurationError("Field 'mass' needs 'vertices' or 'points'")
        points = tuple(parse_point(p, d, f"mass.points[{i}]") for i, p in enumerate(raw['points']))
        if not points:
            raise ConfigurationError("Field 'mass.points' must not be empty")
        count = len(points)
        if 'matrix' in raw:
            matrix = raw['matrix']
            if not isinstance(matrix, list) or len(matrix) != count or any(
                    not isinstance(row, list) or len(row) != count for row in matrix):
                raise ConfigurationError(f"Field 'mass.matrix' must be {count} x {count}")
            rows = tuple(tuple(_number(v, 'mass.matrix') for v in row) for row in matrix)
        else:
            diagonal = raw.get('diagonal', [1.0] * count)
            if not isinstance(diagonal, list) or len(diagonal) != count:
                raise ConfigurationError(f"Field 'mass.diagonal' must list {count} numbers")
            weights = [_number(v, 'mass.diagonal') for v in diagonal]
            rows = tuple(tuple(weights[i] if i == j else 0.0 for j in range(count)) for i in range(count))
        orders = raw.get('deriv_orders')
        if orders is not None:
            if not isinstance(orders, list) or len(orders) != count:
                raise ConfigurationError(f"Field 'mass.deriv_orders' must list {count} multi-indices")
            orders = tuple(tuple(_integer(e, 'mass.deriv_orders') for e in order) for order in orders)
            if any(len(order) != d or min(order) < 0 for order in orders):
                raise ConfigurationError(f"Derivative orders must be {d} nonnegative integers each")
        return MassConfig(points=points, matrix=rows, deriv_orders=orders)

    @property
    def max_degree(self) -> int:
        """Highest configured degree."""
        return max(self.degrees)

    def params(self) -> SimplexJacobiParams:
        """The simplex weight."""
        return SimplexJacobiParams(self.d, self.kappa)

    def mass_spec(self) -> MassSpec:
        """The configured mass conditions as a MassSpec; None without masses."""
        if self.mass is None:
            return None
        if self.mass.vertex_mass is not None:
            vertices = [simplex_vertex(self.d, i) for i in range(1, self.d + 2)]
            return MassSpec.uniform(vertices, self.mass.vertex_mass)
        orders = None
        if self.mass.deriv_orders is not None:
            orders = tuple(MultiIndex(order) for order in self.mass.deriv_orders)
        return MassSpec(points=np.array(self.mass.points), mass_matrix=np.array(self.mass.matrix),
                        deriv_orders=orders)
