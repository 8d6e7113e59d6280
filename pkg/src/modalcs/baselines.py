"""Reference methods the subspace estimator is benchmarked against.

Two baselines: frequency-domain decomposition (Welch cross-spectra plus
peak picking) for operational modal analysis, and a basis-pursuit style
sparse reconstruction that recovers a frequency-sparse signal from its
compressed samples before any modal processing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.signal

from .errors import (
    DimensionMismatch,
    InsufficientPeaks,
    InvalidArgument,
    NoConvergence,
    ShapeError,
)

_HERMITIAN_TOL = 1e-9
_PSD_TOL = 1e-9
_FEASIBLE_RTOL = 1e-8


@dataclass(frozen=True)
class CsdCube:
    """Cross-spectral density matrices, one per frequency bin.

    ``matrices`` has shape (F, N, N) with ``matrices[i]`` Hermitian positive
    semidefinite at angular frequency ``frequencies[i]`` (rad/s, ascending).
    """

    frequencies: np.ndarray
    matrices: np.ndarray

    def __post_init__(self):
        freqs = np.asarray(self.frequencies, dtype=float)
        mats = np.asarray(self.matrices, dtype=complex)
        if freqs.ndim != 1 or mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise ShapeError("expected (F,) frequencies and (F, N, N) matrices")
        if mats.shape[0] != freqs.size:
            raise DimensionMismatch("one matrix per frequency bin required")
        if np.any(np.diff(freqs) <= 0.0):
            raise InvalidArgument("frequencies must be strictly increasing")
        scale = max(1.0, float(np.abs(mats).max()) if mats.size else 1.0)
        if np.abs(mats - mats.conj().transpose(0, 2, 1)).max() > _HERMITIAN_TOL * scale:
            raise InvalidArgument("spectral matrices must be Hermitian")
        evals = np.linalg.eigvalsh(mats)
        floor = -_PSD_TOL * max(1.0, float(evals.max()))
        if evals.min() < floor:
            raise InvalidArgument("spectral matrices must be positive semidefinite")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "matrices", mats)

    @property
    def n_channels(self) -> int:
        return self.matrices.shape[1]


def welch_csd(samples, t_s: float, nperseg: int | None = None) -> CsdCube:
    """Welch estimate of the full cross-spectral matrix from (N, M) samples.

    Hann window, half-overlap, no detrending; frequencies are returned in
    rad/s.  The default segment length is the smallest power of two at or
    above M/8, which keeps enough averages for the matrices to be well
    conditioned without washing out closely spaced peaks.
    """
    u = np.asarray(samples, dtype=float)
    if u.ndim != 2:
        raise ShapeError("samples must be (n_channels, n_samples)")
    if t_s <= 0.0:
        raise InvalidArgument("t_s must be > 0")
    m = u.shape[1]
    if nperseg is None:
        nperseg = min(m, 1 << max(3, int(np.ceil(np.log2(max(m // 8, 1))))))
    if not 1 <= nperseg <= m:
        raise InvalidArgument("nperseg must lie in [1, n_samples]")
    freqs_hz, pxy = scipy.signal.csd(
        u[:, None, :],
        u[None, :, :],
        fs=1.0 / t_s,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        detrend=False,
    )
    return CsdCube(2.0 * np.pi * freqs_hz, np.moveaxis(pxy, -1, 0))


def _canonical_phase_vector(v: np.ndarray) -> np.ndarray:
    pivot = v[int(np.argmax(np.abs(v)))]
    if pivot != 0.0:
        v = v * (pivot.conjugate() / abs(pivot))
    return v


def fdd_peaks(cube: CsdCube, n_modes: int) -> tuple[np.ndarray, np.ndarray]:
    """Frequency-domain decomposition: peaks of the top spectral eigenvalue.

    Returns (peak_frequencies, shapes) with shapes of size (N, n_modes),
    ordered by descending peak height.  Peaks are strict interior local
    maxima of the largest eigenvalue curve; the mode shape at a peak is the
    corresponding eigenvector, phase-aligned so its largest entry is real
    positive.  Raises InsufficientPeaks when the curve has fewer maxima than
    requested.
    """
    if n_modes < 1:
        raise InvalidArgument("n_modes must be >= 1")
    evals, evecs = np.linalg.eigh(cube.matrices)
    top = evals[:, -1]
    interior = np.arange(1, top.size - 1)
    mask = (top[interior] > top[interior - 1]) & (top[interior] > top[interior + 1])
    peak_idx = interior[mask]
    if peak_idx.size < n_modes:
        raise InsufficientPeaks(
            f"found {peak_idx.size} spectral peaks, need {n_modes}"
        )
    order = peak_idx[np.argsort(-top[peak_idx], kind="stable")][:n_modes]
    shapes = np.empty((cube.n_channels, n_modes), dtype=complex)
    for j, idx in enumerate(order):
        shapes[:, j] = _canonical_phase_vector(evecs[idx, :, -1])
    return cube.frequencies[order], shapes


@dataclass(frozen=True)
class SparseRecovery:
    """Result of a compressed-domain sparse reconstruction.

    ``coefficients`` live in the unitary DFT basis; ``signal`` is their time
    domain synthesis.  ``l1_history`` records the coefficient l1 norm after
    every inner iteration, grouped by threshold stage; within each stage the
    norm never increases (up to roundoff), which is checked on construction.
    """

    coefficients: np.ndarray
    signal: np.ndarray
    converged: bool
    relative_residual: float
    l1_history: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        for stage in self.l1_history:
            arr = np.asarray(stage)
            if arr.size > 1:
                rises = np.diff(arr)
                if rises.max() > 1e-8 * max(1.0, float(arr[0])):
                    raise NoConvergence("l1 norm increased within a threshold stage")


def sparse_reconstruct(measurements, phi, n_stages: int = 30,
                       iters_per_stage: int = 10, threshold_ratio: float = 0.7,
                       tol: float = 1e-8) -> SparseRecovery:
    """Recover a frequency-sparse length-M signal u from y = Phi^T u.

    Works in the unitary DFT basis u = W alpha and drives alpha toward the
    minimum-l1 feasible point by alternating complex soft thresholding with
    reprojection onto the affine constraint set {alpha : A alpha = y},
    A = Phi^T W.  The threshold starts at 0.9 max|A^+ y| and decays
    geometrically by ``threshold_ratio`` per stage, a standard fixed-point
    continuation schedule.  All iterates after a projection are feasible, so
    the returned residual measures only the linear-solve accuracy.
    """
    y = np.asarray(measurements, dtype=complex)
    entries = np.asarray(getattr(phi, "entries", phi), dtype=float)
    if y.ndim != 1 or entries.ndim != 2:
        raise ShapeError("measurements must be (M',), phi must be (M, M')")
    m, m_prime = entries.shape
    if y.size != m_prime:
        raise DimensionMismatch(
            f"measurement length {y.size} does not match phi columns {m_prime}"
        )
    if not (n_stages >= 1 and iters_per_stage >= 1 and 0.0 < threshold_ratio < 1.0):
        raise InvalidArgument("need n_stages, iters_per_stage >= 1 and ratio in (0, 1)")

    root_m = np.sqrt(m)

    def apply_a(alpha):
        return entries.T @ (root_m * np.fft.ifft(alpha))

    def apply_a_star(z):
        return np.fft.fft(entries @ z) / root_m

    # A A* = Phi^T Phi since the DFT factor is unitary.
    try:
        gram = scipy.linalg.cho_factor(entries.T @ entries)
    except np.linalg.LinAlgError as exc:
        raise InvalidArgument("compression matrix is rank deficient") from exc

    def project(alpha):
        return alpha + apply_a_star(scipy.linalg.cho_solve(gram, y - apply_a(alpha)))

    y_norm = float(np.linalg.norm(y))
    if y_norm == 0.0:
        zeros = np.zeros(m, dtype=complex)
        return SparseRecovery(zeros, zeros.copy(), True, 0.0, ())

    alpha = apply_a_star(scipy.linalg.cho_solve(gram, y))  # min-norm feasible start
    theta = 0.9 * float(np.abs(alpha).max())
    history = []
    for _ in range(n_stages):
        stage = []
        for _ in range(iters_per_stage):
            mags = np.abs(alpha)
            with np.errstate(divide="ignore", invalid="ignore"):
                shrink = np.where(mags > theta, 1.0 - theta / mags, 0.0)
            alpha = project(alpha * shrink)
            stage.append(float(np.abs(alpha).sum()))
        history.append(tuple(stage))
        theta *= threshold_ratio

    residual = float(np.linalg.norm(y - apply_a(alpha)))
    rel = residual / y_norm
    return SparseRecovery(
        alpha,
        root_m * np.fft.ifft(alpha),
        bool(rel <= tol),
        rel,
        tuple(history),
    )
