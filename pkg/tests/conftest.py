import numpy as np
import pytest

from geofirm.operators import GeodesicBall, GeodesicSegment, Halfspace, Subtree
from geofirm.spaces import Euclidean, PoincareDisk, SphericalCap, StarTree, TreePoint

SPACES = {
    "euclidean2": lambda: Euclidean(2),
    "euclidean3": lambda: Euclidean(3),
    "poincare": lambda: PoincareDisk(),
    "cap": lambda: SphericalCap(1.0, 0.3),
    "tree": lambda: StarTree((1.0, 1.0, 1.0)),
}
CAT0_SPACES = ("euclidean2", "euclidean3", "poincare", "tree")


@pytest.fixture(params=sorted(SPACES))
def space(request):
    return SPACES[request.param]()


@pytest.fixture(params=CAT0_SPACES)
def cat0_space(request):
    return SPACES[request.param]()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def convex_sets(space):
    """A few sets per space, all containing ``space.origin()``."""
    o = space.origin()
    if isinstance(space, StarTree):
        return [GeodesicBall(o, 0.4), Subtree((0, 2), {0: 0.5}),
                GeodesicSegment(TreePoint(0, 0.6), TreePoint(1, 0.3))]
    sets = [GeodesicBall(o, 0.3)]
    if isinstance(space, Euclidean):
        n = np.zeros(space.dim)
        n[0] = 1.0
        sets.append(Halfspace(n, 0.2))
    rng = np.random.default_rng(0)
    a = space.sample(rng, 0.3)
    sets.append(GeodesicSegment(a, space.geodesic_point(a, o, 1.0)))
    return sets


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
