import numpy as np
import pytest

from wildarc.dynamics import PiecewiseDiffeo, fixed_point_census
from wildarc.knots import TubeChart, build_knot, shipped_knot


@pytest.fixture(scope="session")
def curves():
    return {n: build_knot(shipped_knot(n)) for n in (0, 1, 2)}


@pytest.fixture(scope="session")
def charts(curves):
    return {n: TubeChart(c) for n, c in curves.items()}


@pytest.fixture(scope="session")
def diffeos():
    return {n: PiecewiseDiffeo.for_spec(shipped_knot(n)) for n in (0, 1, 2)}


@pytest.fixture(scope="session")
def census(diffeos):
    return {n: fixed_point_census(f) for n, f in diffeos.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def tube_samples(chart, count, rng, t_range=(0.0, 1.0), rmax=2.0):
    """Random chart points (t, y2, y3) with y2^2 + y3^2 <= rmax^2 and their R^3 images."""
    t = rng.uniform(*t_range, size=count)
    rho = rmax * np.sqrt(rng.uniform(size=count))
    ang = rng.uniform(0, 2 * np.pi, size=count)
    y = np.stack([t, rho * np.cos(ang), rho * np.sin(ang)], axis=1)
    return y, chart.embed(y)
