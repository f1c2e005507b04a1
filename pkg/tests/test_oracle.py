"""Ground-truth generators are themselves cross-checked here."""

import numpy as np
import pytest

from planesep import oracle
from planesep.geometry import Plane


class TestSieve:
    def test_counts_25_primes_below_100(self):
        table = oracle.sieve(100)
        assert table.count() == 25
        assert list(table.primes()[:4]) == [2, 3, 5, 7]

    def test_edge_flags(self):
        table = oracle.sieve(10)
        assert table.is_prime[2]
        assert not table.is_prime[1]
        assert not table.is_prime[0]
        assert not table.is_prime[9]

    def test_rejects_tiny_limit(self):
        with pytest.raises(ValueError):
            oracle.sieve(1)

    def test_agrees_with_trial_division_to_1e5(self):
        limit = 100_000
        table = oracle.sieve(limit)
        nums = np.arange(limit + 1)
        composite = np.zeros(limit + 1, dtype=bool)
        for d in range(2, int(limit**0.5) + 1):
            composite |= (nums % d == 0) & (nums > d)
        trial = ~composite
        trial[:2] = False
        assert np.array_equal(table.is_prime, trial)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_prime_counts_track_n_over_log_n(self, n):
        exact = oracle.sieve(10**n).count()
        estimate = 10**n / (n * np.log(10))
        assert abs(estimate / exact - 1.0) <= 0.15


class TestVerifySeparation:
    def test_fails_on_identical_points(self):
        pts = np.array([[1.0, 2.0], [1.0, 2.0]])
        planes = [Plane(np.array([1.0, 0.0]))]
        verdict = oracle.verify_separation(pts, planes, 1e-9)
        assert not verdict.ok
        assert verdict.collisions

    def test_fails_on_incident_point(self):
        pts = np.array([[2.0, 0.0], [0.0, 3.0]])
        planes = [Plane(np.array([-0.5, 0.0]))]  # passes through x=2
        verdict = oracle.verify_separation(pts, planes, 1e-9)
        assert not verdict.ok
        assert (0, 0) in verdict.incidences

    def test_passes_on_clean_split(self):
        pts = np.array([[0.0, 0.0], [4.0, 0.0]])
        planes = [Plane(np.array([-0.5, 0.0]))]  # x = 2
        assert oracle.verify_separation(pts, planes, 1e-9).ok

    def test_no_planes_many_points_collides(self):
        pts = np.array([[0.0], [1.0], [2.0]])
        verdict = oracle.verify_separation(pts, np.empty((0, 1)), 1e-9)
        assert not verdict.ok

    def test_single_point_trivially_ok(self):
        verdict = oracle.verify_separation(np.array([[1.0, 1.0]]), [], 1e-9)
        assert verdict.ok


class TestCoordinatePlanes:
    def test_nine_thresholds_separate_the_digits(self):
        planes = oracle.coordinate_plane_separator(1)
        assert len(planes) == 9
        pts = np.arange(10.0)[:, None]
        assert oracle.verify_separation(pts, planes, 1e-9).ok

    def test_18_planes_separate_all_two_digit_points(self):
        planes = oracle.coordinate_plane_separator(2)
        assert len(planes) == 18
        pts = np.array([[x, y] for x in range(10) for y in range(10)], dtype=float)
        assert oracle.verify_separation(pts, planes, 1e-9).ok

    def test_count_scales_with_base_and_dims(self):
        assert len(oracle.coordinate_plane_separator(3, base=4)) == 9

    def test_any_two_digit_points_split_by_some_axis_threshold(self):
        rng = np.random.default_rng(0)
        planes = oracle.coordinate_plane_separator(3)
        mat = np.stack([p.alpha for p in planes])
        for _ in range(100):
            a, b = rng.integers(0, 10, size=(2, 3)).astype(float)
            if np.array_equal(a, b):
                continue
            sa = (1.0 + mat @ a) > 0
            sb = (1.0 + mat @ b) > 0
            assert not np.array_equal(sa, sb)
