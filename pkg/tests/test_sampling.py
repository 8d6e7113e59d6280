"""Sample schedules, steering matrices, data matrices, and compression."""

import math

import numpy as np
import numpy.testing as npt
import pytest

from modalcs import (
    DataMatrix,
    DimensionMismatch,
    InvalidArgument,
    JlMatrix,
    ModalBasis,
    SampleSchedule,
    build_data_matrix,
    build_steering,
    compress,
    draw_jl_matrix,
    jl_tail_rate,
    random_schedule,
    rng_from_seed,
    spawn_seeds,
    uniform_schedule,
)


class TestRngPlumbing:
    def test_rng_reproducible(self):
        a = rng_from_seed(99).normal(size=8)
        b = rng_from_seed(99).normal(size=8)
        npt.assert_array_equal(a, b)

    def test_spawn_seeds_deterministic_and_distinct(self):
        seeds = spawn_seeds(123, 64)
        npt.assert_array_equal(seeds, spawn_seeds(123, 64))
        assert seeds.dtype == np.uint64
        assert len(set(int(s) for s in seeds)) == 64

    def test_spawned_streams_differ_from_parent(self):
        child = spawn_seeds(5, 3)
        assert not np.array_equal(
            rng_from_seed(int(child[0])).normal(size=4),
            rng_from_seed(5).normal(size=4),
        )


class TestUniformSchedule:
    def test_three_samples(self):
        schedule = uniform_schedule(0.1, 3)
        npt.assert_allclose(schedule.times, [0.0, 0.1, 0.2], rtol=1e-15)
        assert schedule.scheme == "uniform"
        assert schedule.n_samples == 3

    @pytest.mark.parametrize("t_s, m, t_max", [(0.1, 21, 2.0), (0.03, 202, 6.03)])
    def test_t_max(self, t_s, m, t_max):
        assert uniform_schedule(t_s, m).t_max == pytest.approx(t_max, rel=1e-12)

    def test_single_sample_allowed(self):
        schedule = uniform_schedule(0.5, 1)
        assert schedule.t_max == 0.0
        npt.assert_array_equal(schedule.times, [0.0])

    @pytest.mark.parametrize("t_s, m", [(0.0, 3), (-0.1, 3), (0.1, 0)])
    def test_invalid_arguments(self, t_s, m):
        with pytest.raises(InvalidArgument):
            uniform_schedule(t_s, m)


class TestRandomSchedule:
    def test_sorted_within_range(self):
        schedule = random_schedule(2.0, 50, seed=4)
        assert schedule.scheme == "random"
        assert np.all(np.diff(schedule.times) > 0)
        assert schedule.times[0] >= 0.0 and schedule.times[-1] <= 2.0
        assert schedule.seed == 4

    def test_deterministic_per_seed(self):
        a = random_schedule(3.0, 20, seed=8)
        b = random_schedule(3.0, 20, seed=8)
        npt.assert_array_equal(a.times, b.times)
        assert not np.array_equal(a.times, random_schedule(3.0, 20, seed=9).times)

    def test_draws_are_uniform_on_average(self):
        # Mean of M = 1e5 i.i.d. U(0, t_max) draws: t_max/2 +/- 3 sigma/sqrt(M).
        t_max, m = 4.0, 100_000
        schedule = random_schedule(t_max, m, seed=2)
        tol = 3.0 * t_max / math.sqrt(12.0 * m)
        assert abs(schedule.times.mean() - t_max / 2.0) < tol


class TestSampleScheduleValidation:
    def test_rejects_unsorted_times(self):
        with pytest.raises(InvalidArgument):
            SampleSchedule(np.array([0.0, 0.5, 0.4]), "random", 1.0)

    def test_rejects_times_outside_range(self):
        with pytest.raises(InvalidArgument):
            SampleSchedule(np.array([0.0, 1.5]), "random", 1.0)

    def test_rejects_off_grid_uniform_times(self):
        with pytest.raises(InvalidArgument):
            SampleSchedule(np.array([0.0, 0.1, 0.21]), "uniform", 0.2, t_s=0.1)

    def test_rejects_unknown_scheme(self):
        with pytest.raises(InvalidArgument):
            SampleSchedule(np.array([0.0]), "jittered", 0.0)


class TestBuildSteering:
    def test_single_sample_constant_rows(self):
        schedule = uniform_schedule(1.0, 1)
        steering = build_steering([1.0, 2.0], schedule)
        npt.assert_allclose(steering.entries, np.ones((2, 1)))
        npt.assert_allclose(np.linalg.norm(steering.entries, axis=1), 1.0)

    def test_on_grid_rows_orthonormal(self):
        m, t_s = 64, 0.2
        schedule = uniform_schedule(t_s, m)
        freqs = 2 * np.pi * np.array([3.0, 11.0, 27.0]) / (m * t_s)
        steering = build_steering(freqs, schedule)
        gram = steering.entries @ steering.entries.conj().T
        npt.assert_allclose(gram, np.eye(3), atol=1e-10)

    def test_first_set_off_grid_leakage_bounded(self, set1_basis):
        schedule = uniform_schedule(0.1, 21)
        steering = build_steering(set1_basis.frequencies, schedule)
        gram = steering.entries @ steering.entries.conj().T
        assert np.linalg.norm(gram - np.eye(4), 2) < 1.0

    def test_rejects_nonpositive_frequencies(self):
        with pytest.raises(InvalidArgument):
            build_steering([1.0, -2.0], uniform_schedule(0.1, 4))

    def test_entry_modulus_enforced(self):
        from modalcs import SteeringMatrix

        schedule = uniform_schedule(0.1, 2)
        with pytest.raises(InvalidArgument):
            SteeringMatrix(np.ones((1, 2)), np.array([1.0]), schedule)


class TestBuildDataMatrix:
    def test_single_mode_two_samples(self):
        basis = ModalBasis(np.eye(1), np.array([np.pi]), np.array([1.0]))
        data = build_data_matrix(basis, uniform_schedule(1.0, 2))
        npt.assert_allclose(data.entries, [[1.0, -1.0]], atol=1e-12)
        assert data.kind == "raw"

    def test_factorization_identity(self, set1_basis):
        # V = Psi (sqrt(M) diag A) S for the steering matrix of the same inputs.
        schedule = random_schedule(2.0, 17, seed=6)
        data = build_data_matrix(set1_basis, schedule)
        steering = build_steering(set1_basis.frequencies, schedule)
        m = schedule.n_samples
        via_steering = (
            set1_basis.mode_shapes
            @ (math.sqrt(m) * np.diag(set1_basis.amplitudes))
            @ steering.entries
        )
        npt.assert_allclose(data.entries, via_steering, atol=1e-12)

    def test_requires_amplitudes(self):
        basis = ModalBasis(np.eye(2), np.array([2.0, 1.0]))
        with pytest.raises(InvalidArgument):
            build_data_matrix(basis, uniform_schedule(0.1, 4))

    def test_kind_validation(self):
        with pytest.raises(InvalidArgument):
            DataMatrix(np.zeros((2, 3)), "folded")


class TestJlMatrices:
    def test_bernoulli_entries(self):
        phi = draw_jl_matrix(4, 4, "bernoulli", seed=1)
        npt.assert_array_equal(np.abs(phi.entries), 0.5)

    def test_gaussian_scale(self):
        phi = draw_jl_matrix(2000, 100, "gaussian", seed=2)
        assert phi.entries.std() == pytest.approx(0.1, rel=0.05)

    def test_shape_constraint(self):
        with pytest.raises(InvalidArgument):
            draw_jl_matrix(4, 5)
        with pytest.raises(InvalidArgument):
            JlMatrix(np.ones((2, 3)), "gaussian")

    @pytest.mark.parametrize("kind", ["gaussian", "bernoulli"])
    def test_norm_preserved_in_expectation(self, kind):
        # E || Phi* x ||^2 = ||x||^2 for a fixed unit vector.
        rng = rng_from_seed(44)
        x = rng.normal(size=12) + 1j * rng.normal(size=12)
        x /= np.linalg.norm(x)
        norms = [
            np.linalg.norm(draw_jl_matrix(12, 6, kind, seed=s).entries.T @ x) ** 2
            for s in range(1000)
        ]
        assert np.mean(norms) == pytest.approx(1.0, abs=0.05)

    def test_gaussian_tail_bound(self):
        # P(| ||Phi* x||^2 - 1 | >= eps) <= 4 exp(-M' f(eps)) at eps = 0.5.
        m_prime, eps, trials = 200, 0.5, 2000
        rng = rng_from_seed(7)
        x = rng.normal(size=m_prime) + 1j * rng.normal(size=m_prime)
        x /= np.linalg.norm(x)
        hits = 0
        for s in range(trials):
            phi = draw_jl_matrix(m_prime, m_prime, "gaussian", seed=10_000 + s)
            hits += abs(np.linalg.norm(phi.entries.T @ x) ** 2 - 1.0) >= eps
        bound = 4.0 * math.exp(-m_prime * jl_tail_rate(eps))
        se = math.sqrt(max(bound, 1.0 / trials) / trials)
        assert hits / trials <= bound + 3.0 * se


class TestCompress:
    def test_identity_compression_is_noop(self, set1_basis):
        data = build_data_matrix(set1_basis, uniform_schedule(0.1, 8))
        compressed = compress(data, JlMatrix.identity(8))
        npt.assert_array_equal(compressed.entries, data.entries)
        assert compressed.kind == "compressed"

    def test_matches_rowwise_application(self, set1_basis):
        data = build_data_matrix(set1_basis, uniform_schedule(0.002, 1001))
        phi = draw_jl_matrix(1001, 32, "gaussian", seed=3)
        compressed = compress(data, phi)
        assert compressed.shape == (4, 32)
        for row in range(4):
            npt.assert_allclose(
                compressed.entries[row], phi.entries.T @ data.entries[row], atol=1e-10
            )

    def test_single_row_linearity(self):
        basis = ModalBasis(np.eye(1), np.array([2.0]), np.array([1.5]))
        data = build_data_matrix(basis, uniform_schedule(0.1, 16))
        phi = draw_jl_matrix(16, 4, "bernoulli", seed=5)
        doubled = DataMatrix(2.0 * data.entries, "raw", schedule=data.schedule)
        npt.assert_allclose(
            compress(doubled, phi).entries, 2.0 * compress(data, phi).entries, atol=1e-12
        )

    def test_compressed_input_rejected(self, set1_basis):
        data = build_data_matrix(set1_basis, uniform_schedule(0.1, 8))
        compressed = compress(data, JlMatrix.identity(8))
        with pytest.raises(InvalidArgument):
            compress(compressed, JlMatrix.identity(8))

    def test_dimension_mismatch(self, set1_basis):
        data = build_data_matrix(set1_basis, uniform_schedule(0.1, 8))
        with pytest.raises(DimensionMismatch):
            compress(data, draw_jl_matrix(9, 3, seed=0))

    def test_seed_recorded(self, set1_basis):
        data = build_data_matrix(set1_basis, uniform_schedule(0.1, 8))
        compressed = compress(data, draw_jl_matrix(8, 4, seed=77))
        assert compressed.compression_seed == 77
