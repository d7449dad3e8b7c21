import math

import mpmath
import numpy as np
import pytest
from conftest import SPACES
from hypothesis import given, settings
from hypothesis import strategies as st

from geofirm.errors import DomainError
from geofirm.operators import GeodesicSegment
from geofirm.spaces import (CAT0, HUB, Euclidean, PoincareDisk, SpaceParams, SphericalCap,
                            StarTree, TreePoint, check_perpendicular, ohta_constant,
                            point_from_coords, space_from_descriptor, verify_p_convexity)


def poincare_distance_mp(x, y):
    """arccosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))) at 50 digits."""
    mpmath.mp.dps = 50
    x = [mpmath.mpf(float(v)) for v in x]
    y = [mpmath.mpf(float(v)) for v in y]
    diff = sum((a - b) ** 2 for a, b in zip(x, y))
    nx = sum(a * a for a in x)
    ny = sum(b * b for b in y)
    return float(mpmath.acosh(1 + 2 * diff / ((1 - nx) * (1 - ny))))


class TestParams:
    def test_cat0_constants(self):
        assert CAT0.p == 2 and CAT0.c == 2

    @pytest.mark.parametrize("p,c", [(1.0, 1.0), (2.0, 0.0), (2.0, 2.5), (3.0, 2.0)])
    def test_invalid(self, p, c):
        with pytest.raises(DomainError):
            SpaceParams(p, c)

    def test_ohta_value(self):
        assert ohta_constant(1.0, 0.3) == pytest.approx((math.pi - 0.6) * math.tan(0.3), rel=1e-15)

    def test_spherical_cap_declares_ohta_constant(self):
        cap = SphericalCap(1.0, 0.3)
        assert cap.p == 2
        assert cap.c == pytest.approx(ohta_constant(1.0, 0.3))
        assert cap.diameter < math.pi / 2

    def test_cat0_kinds(self):
        for s in (Euclidean(3), PoincareDisk(), StarTree()):
            assert s.is_cat0


class TestDistance:
    def test_euclidean_pythagoras(self):
        assert Euclidean(2).distance([0, 0], [3, 4]) == pytest.approx(5.0)

    def test_poincare_origin(self):
        P = PoincareDisk()
        assert P.distance([0, 0], [0.5, 0]) == pytest.approx(1.0986122886681098, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_poincare_matches_extended_precision(self, seed):
        P = PoincareDisk()
        rng = np.random.default_rng(seed)
        x, y = P.sample(rng), P.sample(rng)
        assert P.distance(x, y) == pytest.approx(poincare_distance_mp(x, y), abs=1e-10)

    def test_tree_through_hub(self):
        T = StarTree((1, 1, 1))
        assert T.distance(TreePoint(0, 0.3), TreePoint(1, 0.4)) == pytest.approx(0.7)
        assert T.distance(TreePoint(0, 0.3), TreePoint(0, 0.8)) == pytest.approx(0.5)

    def test_tree_hub_aliases(self):
        T = StarTree()
        assert T.point((2, 0.0)) == HUB
        assert T.distance(TreePoint(1, 0.0), HUB) == 0.0

    def test_cap_spherical_law(self):
        cap = SphericalCap(4.0, 0.1)
        x = cap.origin()
        y = cap.exp(x, np.array([0.2, 0.0, 0.0]))
        assert cap.distance(x, y) == pytest.approx(0.2, abs=1e-12)

    def test_metric_axioms(self, space, rng):
        for _ in range(200):
            x, y, z = space.sample(rng), space.sample(rng), space.sample(rng)
            dxy = space.distance(x, y)
            assert dxy == pytest.approx(space.distance(y, x), abs=1e-12)
            assert dxy <= space.distance(x, z) + space.distance(z, y) + 1e-10
            assert space.distance(x, x) <= 1e-10

    def test_membership(self):
        with pytest.raises(DomainError):
            PoincareDisk().point([0.8, 0.7])
        with pytest.raises(DomainError):
            StarTree((1, 1)).point((0, 1.5))
        with pytest.raises(DomainError):
            SphericalCap(1.0, 0.3).point([1.0, 0.0, 0.0])


class TestGeodesics:
    def test_endpoints(self, space, rng):
        x, y = space.sample(rng), space.sample(rng)
        assert space.same_point(space.geodesic_point(x, y, 0.0), x)
        assert space.same_point(space.geodesic_point(x, y, 1.0), y)

    def test_euclidean_midpoint(self):
        m = Euclidean(2).geodesic_point([0, 0], [2, 0], 0.5)
        np.testing.assert_allclose(m, [1, 0])

    def test_poincare_midpoint_bisection_oracle(self):
        P = PoincareDisk()
        x, y = np.zeros(2), np.array([0.5, 0.0])
        lo, hi = 0.0, 0.5
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if P.distance(x, [mid, 0]) < P.distance([mid, 0], y):
                lo = mid
            else:
                hi = mid
        m = P.geodesic_point(x, y, 0.5)
        assert m[0] == pytest.approx(lo, abs=1e-12)
        assert m[0] == pytest.approx(0.2679491924311227, abs=1e-12)
        assert abs(m[1]) < 1e-15

    def test_distance_split(self, space, rng):
        for _ in range(10_000 if space.kind != "spherical_cap" else 3000):
            x, y, t = space.sample(rng), space.sample(rng), float(rng.random())
            m, d = space.geodesic_point(x, y, t), space.distance(x, y)
            assert abs(space.distance(x, m) - t * d) <= 1e-10
            assert abs(space.distance(m, y) - (1 - t) * d) <= 1e-10

    def test_t_outside_interval(self, space, rng):
        x, y = space.sample(rng), space.sample(rng)
        with pytest.raises(DomainError):
            space.geodesic_point(x, y, 1.5)


class TestConvexity:
    def test_all_spaces(self, space):
        assert verify_p_convexity(space, 3000, seed=1) >= -1e-9

    def test_euclidean_equality_family(self):
        # the parallelogram law makes the inequality tight for collinear z
        E = Euclidean(1)
        x, y, z, t = np.array([0.0]), np.array([1.0]), np.array([3.0]), 0.25
        m = E.geodesic_point(x, y, t)
        rhs = (1 - t) * 9 + t * 4 - t * (1 - t) * 1
        assert E.distance(z, m) ** 2 == pytest.approx(rhs, abs=1e-14)

    def test_wrong_constant_detected(self):
        # a cap claimed CAT(0) must fail somewhere
        cap = SphericalCap(1.0, 0.3)
        cap.params = CAT0
        assert verify_p_convexity(cap, 3000, seed=2) < -1e-9

    def test_zero_samples(self):
        with pytest.raises(ValueError):
            verify_p_convexity(Euclidean(2), 0)


class TestPerpendicular:
    def test_euclidean_axes(self):
        E = Euclidean(2)
        gx = (np.array([-1.0, 0]), np.array([1.0, 0]))
        gy = (np.array([0, -1.0]), np.array([0, 1.0]))
        o = np.zeros(2)
        assert check_perpendicular(E, gx, gy, o) and check_perpendicular(E, gy, gx, o)

    def test_euclidean_45(self):
        E = Euclidean(2)
        gx = (np.array([-1.0, 0]), np.array([1.0, 0]))
        gd = (np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
        assert not check_perpendicular(E, gx, gd, np.zeros(2))

    def test_poincare_diameters(self):
        P = PoincareDisk()
        gx = (np.array([-0.8, 0]), np.array([0.8, 0]))
        gy = (np.array([0, -0.8]), np.array([0, 0.8]))
        o = np.zeros(2)
        assert check_perpendicular(P, gx, gy, o, grid=41)
        assert check_perpendicular(P, gy, gx, o, grid=41)

    def test_segment_must_pass_through(self):
        E = Euclidean(2)
        g = (np.array([1.0, 1.0]), np.array([2.0, 1.0]))
        with pytest.raises(DomainError):
            check_perpendicular(E, g, g, np.zeros(2))

    @pytest.mark.parametrize("name", ["poincare", "cap", "tree"])
    def test_symmetric_at_projection_feet(self, name):
        space = SPACES[name]()
        rng = np.random.default_rng(3)
        for _ in range(60):
            a, b, x = space.sample(rng), space.sample(rng), space.sample(rng)
            foot = GeodesicSegment(a, b).project(space, x)
            if space.distance(foot, x) < 1e-6:
                continue
            gamma, eta = (x, foot), (a, b)
            assert check_perpendicular(space, gamma, eta, foot, grid=11, tol=1e-7)
            assert check_perpendicular(space, eta, gamma, foot, grid=11, tol=1e-7)


class TestSampling:
    def test_euclidean_radius(self, rng):
        E = Euclidean(3)
        assert all(np.linalg.norm(E.sample(rng, 2.0)) <= 2.0 for _ in range(500))

    def test_poincare_radius(self, rng):
        P = PoincareDisk()
        assert all(np.linalg.norm(P.sample(rng)) <= 0.9 for _ in range(500))

    def test_tree_points_valid(self, rng):
        T = StarTree((1.0, 2.0))
        for _ in range(500):
            p = T.sample(rng)
            assert 0 <= p.edge < 2 and 0 <= p.offset <= T.edges[p.edge]

    def test_seed_determinism(self, space):
        a = space.coords(space.sample(7))
        b = space.coords(space.sample(7))
        assert a == b


class TestDescriptors:
    def test_round_trip(self, space, rng):
        again = space_from_descriptor(space.descriptor())
        assert again == space
        x = space.sample(rng)
        assert space.same_point(point_from_coords(space, space.coords(x)), x)
