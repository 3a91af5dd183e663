"""
A test that verifies the modification engine against the exact oracle across dimensions, weights and mass layouts.
"""
import numpy as np
import pytest
from uvarov import (
    BasisSpec,
    MassSpec,
    NuInnerProduct,
    SimplexJacobiParams,
    UvarovEngine,
    VertexMassModel,
    build_oracle,
    equivalence_report,
)


def _points(d: int) -> list:
    rng = np.random.default_rng(1000 + d)
    centroid = np.full(d, 1.0 / (d + 1))
    edge = np.zeros(d)
    edge[0] = 0.5
    return [centroid, edge, np.eye(d)[0]] + [rng.dirichlet(np.ones(d + 1))[:d] for _ in range(2)]


def _mass(d: int, layout: str) -> MassSpec:
    vertices = VertexMassModel(d=d, sigma=0.0, M=1.0).vertices()
    if layout == 'coupled':
        # I + (J - I) / 4 is positive definite for every d
        return MassSpec(points=vertices, mass_matrix=0.75 * np.eye(d + 1) + 0.25 * np.ones((d + 1, d + 1)))
    if layout == 'gradient':
        points = [np.full(d, 1.0 / (d + 2)), np.full(d, 0.4 / d)]
        orders = [tuple(1 if j == 0 else 0 for j in range(d)), tuple(1 if j == d - 1 else 0 for j in range(d))]
        return MassSpec.diagonal(points, [1.0, 0.5], deriv_orders=orders)
    return MassSpec.uniform(vertices, float(layout))


@pytest.mark.order(1)
@pytest.mark.parametrize("d, top", [(1, 8), (2, 8), (3, 6)])
@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.5])
@pytest.mark.parametrize("layout", ['0.5', '1', '5', 'coupled', 'gradient'])
def test_engine_against_oracle(d, top, sigma, layout):
    """
    Checking nu-orthogonality, span, Gram blocks and kernels against the exact oracle
    """
    mass = _mass(d, layout)
    params = SimplexJacobiParams.symmetric(d, sigma)
    engine = UvarovEngine(provider=BasisSpec(params=params, max_degree=top), mass=mass)
    system = build_oracle(NuInnerProduct(base=params, mass=mass, exact=True), top)
    report = equivalence_report(system, engine, _points(d))
    assert report.passed, [entry for entry in report.entries if not entry.passed]
    for n in range(top + 1):
        identities = engine.matrix_identity_residuals(n)
        assert max(identities.values()) <= 1e-10, (n, identities)
