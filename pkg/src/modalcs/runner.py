"""Experiment runners: five synthetic protocols plus the real-data comparison.

Each runner is a pure function of its validated config: all randomness flows
through per-point child seeds spawned from the config seed, so repeated runs
produce byte-identical tables.  Sweep points are independent units of work;
rows are sorted by sweep key before the table is assembled, so execution
order never matters.
"""

from __future__ import annotations

import math

import numpy as np

from .baselines import fdd_peaks, sparse_reconstruct, welch_csd
from .bounds import gershgorin_uniform_bound, gram_deviation
from .config import ExperimentConfig, build_basis
from .errors import ConfigError
from .estimator import (
    align_and_error,
    aligned_distance,
    estimate_modes,
    frequency_spectra,
)
from .results import ResultTable, load_sensor_csv
from .sampling import (
    DataMatrix,
    build_data_matrix,
    build_steering,
    compress,
    draw_jl_matrix,
    random_schedule,
    spawn_seeds,
    uniform_schedule,
)

# Fixed scheme order within one sweep point.
_SCHEME_RANK = {"uniform": 0, "random": 1}


def run_experiment(config: ExperimentConfig) -> ResultTable:
    try:
        runner = _RUNNERS[config.experiment]
    except KeyError:
        raise ConfigError(f"unknown experiment {config.experiment!r}") from None
    return runner(config)


def _samples_for(t_max: float, t_s: float) -> int:
    return int(math.floor(t_max / t_s + 1e-9)) + 1


def _point_errors(basis, schedule) -> np.ndarray:
    data = build_data_matrix(basis, schedule)
    return align_and_error(estimate_modes(data), basis)


def _run_sweep(config: ExperimentConfig) -> ResultTable:
    """exp1/exp2: sweep t_max with uniform and seed-matched random schedules.

    Both schemes use the same M at each t_max.  Grid points with fewer
    samples than modes are skipped (the estimator needs M >= N), so the
    emitted sweep starts at the first feasible nonzero t_max.  Each grid
    position owns one child seed whether or not it is skipped, keeping the
    random draws at a given t_max independent of the grid's lower edge.
    """
    basis = build_basis(config)
    n = basis.n_dof
    t_s = config.sampling["t_s"]
    start = config.sampling.get("t_max_start", 0.0)
    step = config.sampling["t_max_step"]
    stop = config.sampling["t_max_stop"]
    n_points = int(round((stop - start) / step)) + 1
    seeds = spawn_seeds(config.seed, n_points)

    rows = []
    for i in range(n_points):
        t_max = round(start + i * step, 10)
        m = _samples_for(t_max, t_s)
        if m < n or t_max <= 0.0:
            continue
        schedules = (
            ("uniform", None, uniform_schedule(t_s, m)),
            ("random", int(seeds[i]), random_schedule(t_max, m, int(seeds[i]))),
        )
        for scheme, seed, schedule in schedules:
            errors = _point_errors(basis, schedule)
            steering = build_steering(basis.frequencies, schedule)
            gersh = (
                gershgorin_uniform_bound(basis.frequencies, t_s, m)
                if scheme == "uniform"
                else None
            )
            rows.append(
                (t_max, m, scheme, seed)
                + tuple(float(e) for e in errors)
                + (float(errors.max()), gram_deviation(steering), gersh)
            )
    rows.sort(key=lambda r: (r[0], _SCHEME_RANK[r[2]]))
    columns = ("t_max", "m", "scheme", "seed") + tuple(
        f"err_mode{k}" for k in range(1, n + 1)
    ) + ("max_err", "gram_deviation", "gershgorin")
    return ResultTable(config.experiment, columns, tuple(rows), config.as_dict())


def _run_exp3(config: ExperimentConfig) -> ResultTable:
    """Sweep M; compare random schedules at matched vs. extended t_max.

    For each M the uniform reference uses t_max = (M-1) t_s.  Random
    schedules are drawn n_trials times at the matched t_max and n_trials
    times at t_max + extension; the table reports the mean over trials of
    the max aligned error.
    """
    basis = build_basis(config)
    t_s = config.sampling["t_s"]
    extension = config.sampling.get("extension", 2.0)
    m_values = sorted(config.sampling["m_values"])
    n_trials = config.n_trials
    point_seeds = spawn_seeds(config.seed, len(m_values))

    rows = []
    for i, m in enumerate(m_values):
        t_max_u = round((m - 1) * t_s, 10)
        t_max_e = round(t_max_u + extension, 10)
        err_uniform = _point_errors(basis, uniform_schedule(t_s, m)).max()
        trial_seeds = spawn_seeds(int(point_seeds[i]), 2 * n_trials)

        def _mean_max(t_max: float, seeds) -> float:
            maxima = [
                _point_errors(basis, random_schedule(t_max, m, int(s))).max()
                for s in seeds
            ]
            return float(np.mean(maxima))

        rows.append(
            (
                m,
                t_max_u,
                t_max_e,
                float(err_uniform),
                _mean_max(t_max_u, trial_seeds[:n_trials]),
                _mean_max(t_max_e, trial_seeds[n_trials:]),
                n_trials,
            )
        )
    rows.sort(key=lambda r: r[0])
    columns = (
        "m",
        "t_max_uniform",
        "t_max_extended",
        "err_uniform_max",
        "err_random_matched_mean_max",
        "err_random_extended_mean_max",
        "n_trials",
    )
    return ResultTable("exp3", columns, tuple(rows), config.as_dict())


def _run_exp4(config: ExperimentConfig) -> ResultTable:
    """Sub-Nyquist uniform sampling vs. super-Nyquist sampling + compression.

    The compressed branch draws n_phi_seeds Gaussian matrices; per-seed rows
    are followed by a mean row whose err_mode columns average per mode and
    whose max_err averages the per-seed maxima.
    """
    basis = build_basis(config)
    n = basis.n_dof
    t_max = config.sampling["t_max"]
    t_s_sub = config.sampling["t_s_sub"]
    t_s_super = config.sampling["t_s_super"]
    m_prime = config.sampling["m_prime"]

    m_sub = _samples_for(t_max, t_s_sub)
    errors_sub = _point_errors(basis, uniform_schedule(t_s_sub, m_sub))

    m_super = _samples_for(t_max, t_s_super)
    data_super = build_data_matrix(basis, uniform_schedule(t_s_super, m_super))
    phi_seeds = spawn_seeds(config.seed, config.n_phi_seeds)
    per_seed = []
    for seed in phi_seeds:
        phi = draw_jl_matrix(m_super, m_prime, "gaussian", int(seed))
        errors = align_and_error(estimate_modes(compress(data_super, phi)), basis)
        per_seed.append((int(seed), errors))

    def _row(variant, seed, t_s, m, m_pr, errors, max_err):
        return (variant, seed, t_s, m, m_pr) + tuple(
            float(e) for e in errors
        ) + (float(max_err),)

    rows = [_row("uniform_sub", None, t_s_sub, m_sub, None, errors_sub, errors_sub.max())]
    for seed, errors in per_seed:
        rows.append(_row("compressed", seed, t_s_super, m_super, m_prime, errors, errors.max()))
    stacked = np.array([e for _, e in per_seed])
    rows.append(
        _row(
            "compressed_mean",
            None,
            t_s_super,
            m_super,
            m_prime,
            stacked.mean(axis=0),
            stacked.max(axis=1).mean(),
        )
    )
    columns = ("variant", "seed", "t_s", "m", "m_prime") + tuple(
        f"err_mode{k}" for k in range(1, n + 1)
    ) + ("max_err",)
    return ResultTable("exp4", columns, tuple(rows), config.as_dict())


def _run_exp5(config: ExperimentConfig) -> ResultTable:
    """Frequency estimation from the right singular vectors' padded FFTs.

    Estimated mode k (singular-value order) is paired with the true mode of
    k-th largest amplitude; the tolerance column is the unpadded FFT
    resolution 2 pi / t_max.
    """
    basis = build_basis(config)
    t_s = config.sampling["t_s"]
    m = _samples_for(config.sampling["t_max"], t_s)
    zpf = config.sampling.get("zero_pad_factor", 8)

    data = build_data_matrix(basis, uniform_schedule(t_s, m))
    estimate = estimate_modes(data)
    omega, mags = frequency_spectra(estimate, t_s, zpf)
    peak_bins = np.argmax(mags, axis=1)
    omega_est = omega[peak_bins]

    t_max_u = (m - 1) * t_s
    tolerance = 2.0 * np.pi / t_max_u
    rank = np.argsort(-np.abs(basis.amplitudes), kind="stable")
    rows = []
    for k in range(basis.n_dof):
        true = float(basis.frequencies[rank[k]])
        est = float(omega_est[k])
        rows.append((k + 1, true, est, abs(est - true), float(tolerance)))
    columns = ("mode", "omega_true", "omega_est", "abs_error", "tolerance")
    extras = {
        "spectrum_omega": omega,
        "spectrum_magnitudes": mags,
        "spectrum_peak_bins": peak_bins,
    }
    return ResultTable("exp5", columns, tuple(rows), config.as_dict(), extras)


def _phase_aligned_real(vec: np.ndarray, reference: np.ndarray) -> np.ndarray:
    inner = np.vdot(vec, reference)
    if np.abs(inner) > 0.0:
        vec = vec * (inner / np.abs(inner))
    return np.real(vec)


def _run_realdata(config: ExperimentConfig) -> ResultTable:
    """Compressed-domain SVD vs. sparse reconstruction + FDD on sensor data.

    The benchmark is the dominant-peak FDD modes of the uncompressed data.
    Both compressed methods see the same Gaussian matrix.  Estimated modes
    pair with benchmark modes by rank: k-th singular value against k-th
    highest spectral peak.
    """
    samples = load_sensor_csv(config.data_path, header=config.header)
    n_sensors, m = samples.shape
    t_s = config.sampling["t_s"]
    m_prime = config.sampling["m_prime"]
    n_bench = config.n_benchmark_modes

    bench_freqs, bench_shapes = fdd_peaks(welch_csd(samples, t_s), n_bench)

    phi = draw_jl_matrix(m, m_prime, "gaussian", config.seed)
    schedule = uniform_schedule(t_s, m)
    raw = DataMatrix(samples.astype(complex), "raw", schedule=schedule)
    compressed = compress(raw, phi)

    estimate = estimate_modes(compressed)
    svd_shapes = estimate.mode_shapes_hat[:, :n_bench]

    reconstructed = np.empty((n_sensors, m))
    for l in range(n_sensors):
        recovery = sparse_reconstruct(compressed.entries[l], phi)
        reconstructed[l] = recovery.signal.real
    csfdd_freqs, csfdd_shapes = fdd_peaks(welch_csd(reconstructed, t_s), n_bench)

    rows = []
    shapes = {"benchmark": [], "svd_y": [], "cs_fdd": []}
    for k in range(n_bench):
        bench = bench_shapes[:, k]
        err_svd = aligned_distance(svd_shapes[:, k], bench)
        err_csfdd = aligned_distance(csfdd_shapes[:, k], bench)
        rows.append((k + 1, float(bench_freqs[k]), float(err_svd), float(err_csfdd)))
        shapes["benchmark"].append(np.real(bench).tolist())
        shapes["svd_y"].append(_phase_aligned_real(svd_shapes[:, k], bench).tolist())
        shapes["cs_fdd"].append(_phase_aligned_real(csfdd_shapes[:, k], bench).tolist())
    columns = ("mode", "benchmark_freq", "err_svd", "err_csfdd")
    extras = {"shapes": shapes, "csfdd_freqs": csfdd_freqs}
    return ResultTable("realdata", columns, tuple(rows), config.as_dict(), extras)


_RUNNERS = {
    "exp1": _run_sweep,
    "exp2": _run_sweep,
    "exp3": _run_exp3,
    "exp4": _run_exp4,
    "exp5": _run_exp5,
    "realdata": _run_realdata,
}
