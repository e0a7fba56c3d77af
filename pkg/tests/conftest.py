import numpy as np
import pytest

from pim.manifolds import get_case
from pim.pointcloud import PointCloud

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_cloud(rng, n=200, d=2, k=2, boundary=10):
    pts = rng.uniform(0.0, 1.0, (n, d))
    V = rng.uniform(0.5, 1.5, n) / n
    bidx = np.sort(rng.choice(n, boundary, replace=False))
    A = rng.uniform(0.5, 1.5, boundary) / max(boundary, 1)
    return PointCloud(pts, k, V, bidx, A)


@pytest.fixture(params=["interval", "circle", "sphere", "disk"])
def case_cloud(request):
    case = get_case(request.param)
    n = {"interval": 300, "circle": 300, "sphere": 500, "disk": 400}[request.param]
    return case, case.sample(n)
