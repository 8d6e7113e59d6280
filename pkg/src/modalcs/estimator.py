"""Mode-shape and frequency estimation from the data matrix SVD.

The rank-N truncated SVD of the N x M data matrix (or its compressed N x M'
counterpart) estimates the mode shapes as left singular vectors.  When rows
of the right factor are sampled on a uniform grid, each approximates a
complex exponential at one modal frequency, so a zero-padded FFT peak pick
recovers the frequencies.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument, NonUniformSchedule, ShapeError
from .mdof import ModalBasis
from .sampling import DataMatrix, SampleSchedule

_UNITARY_TOL = 1e-9
_RECONSTRUCTION_RTOL = 1e-8


@dataclass(frozen=True)
class ModeEstimate:
    """Truncated-SVD factors of a data matrix.

    ``mode_shapes_hat`` holds the N left singular vectors (columns), phase-
    normalized so each column's largest-magnitude entry is real positive.
    ``right_factors_hat`` holds the N leading right singular vectors as rows.
    ``reliable`` flags singular values above the numerical-rank floor;
    estimates for trailing zero singular values are returned but flagged
    rather than raised on.
    """

    mode_shapes_hat: np.ndarray
    singular_values: np.ndarray
    right_factors_hat: np.ndarray
    schedule: SampleSchedule | None = None
    kind: str = "raw"

    def __post_init__(self):
        u = np.asarray(self.mode_shapes_hat, dtype=complex)
        s = np.asarray(self.singular_values, dtype=float)
        vh = np.asarray(self.right_factors_hat, dtype=complex)
        n = u.shape[0]
        if u.shape != (n, n) or s.shape != (n,) or vh.shape[0] != n:
            raise ShapeError("inconsistent factor shapes")
        if np.any(s < 0.0) or np.any(np.diff(s) > 0.0):
            raise InvalidArgument("singular values must be non-negative and descending")
        if np.abs(u.conj().T @ u - np.eye(n)).max() > _UNITARY_TOL:
            raise InvalidArgument("left singular vectors are not orthonormal")
        if np.abs(vh @ vh.conj().T - np.eye(n)).max() > _UNITARY_TOL:
            raise InvalidArgument("right factor rows are not orthonormal")
        object.__setattr__(self, "mode_shapes_hat", u)
        object.__setattr__(self, "singular_values", s)
        object.__setattr__(self, "right_factors_hat", vh)

    @property
    def n_modes(self) -> int:
        return self.mode_shapes_hat.shape[0]

    @property
    def reliable(self) -> np.ndarray:
        s = self.singular_values
        floor = max(self.right_factors_hat.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        return s > floor


def _canonical_phase(u: np.ndarray, vh: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Rotate each left vector so its largest entry is real positive; the
    # inverse rotation goes into the matching right row, preserving U S Vh.
    u = u.copy()
    vh = vh.copy()
    for j in range(u.shape[1]):
        i = int(np.argmax(np.abs(u[:, j])))
        pivot = u[i, j]
        if np.abs(pivot) > 0.0:
            phase = pivot / np.abs(pivot)
            u[:, j] *= np.conj(phase)
            vh[j, :] *= phase
    return u, vh


def estimate_modes(data: DataMatrix) -> ModeEstimate:
    """Rank-N truncated SVD of the data matrix.

    Requires N <= M (more samples than degrees of freedom).  The truncation
    rank is always N; a data matrix of lower numerical rank yields trailing
    zero singular values whose mode estimates the ``reliable`` mask flags.
    """
    entries = data.entries
    n, m = entries.shape
    if n > m:
        raise ShapeError(f"need at least as many samples as modes, got N={n} > M={m}")
    u, s, vh = np.linalg.svd(entries, full_matrices=False)
    u, vh = _canonical_phase(u, vh)
    est = ModeEstimate(u, s, vh, schedule=data.schedule, kind=data.kind)
    # Reconstruction post-condition: the truncation is exact for rank <= N.
    scale = np.linalg.norm(entries, 2)
    err = np.linalg.norm(entries - (u * s) @ vh, 2)
    if scale > 0.0 and err > _RECONSTRUCTION_RTOL * scale:
        raise InvalidArgument(f"SVD reconstruction error {err:.3e} exceeds tolerance")
    return est


def aligned_distance(estimate_vec, truth_vec) -> float:
    """min over |c| = 1 of || truth - c * estimate ||_2, in [0, sqrt(2)].

    Both vectors are assumed unit norm; the minimum is attained at the phase
    of their inner product.  Evaluated as an explicit difference norm: the
    algebraically equal sqrt(2 - 2|<est, truth>|) cancels catastrophically
    near zero and cannot resolve distances below sqrt(eps) ~ 1.5e-8.
    """
    est = np.asarray(estimate_vec, dtype=complex)
    truth = np.asarray(truth_vec, dtype=complex)
    inner = np.vdot(est, truth)
    phase = inner / np.abs(inner) if np.abs(inner) > 0.0 else 1.0
    return float(np.linalg.norm(truth - phase * est))


def align_and_error(estimate: ModeEstimate, truth: ModalBasis) -> np.ndarray:
    """Per-mode aligned errors between estimated and true mode shapes.

    Estimated mode k (descending singular value) is paired with the true
    mode of k-th largest amplitude magnitude; ties keep the basis order.
    The returned vector is indexed by that rank, which matches the modal
    numbering used by the experiment tables (largest amplitude first).
    Phase alignment is optimal per mode, so values land in [0, sqrt(2)].
    """
    if truth.amplitudes is None:
        raise InvalidArgument("truth basis needs amplitudes to rank modes")
    if estimate.n_modes != truth.n_dof:
        raise ShapeError("estimate and truth disagree on the number of modes")
    order = np.argsort(-np.abs(truth.amplitudes), kind="stable")
    errors = np.empty(truth.n_dof)
    for k, idx in enumerate(order):
        errors[k] = aligned_distance(estimate.mode_shapes_hat[:, k], truth.mode_shapes[:, idx])
    return errors


def greedy_correlation_match(estimate: ModeEstimate, truth: ModalBasis) -> np.ndarray:
    """Diagnostic matcher: greedily pair estimates to truth by |inner product|.

    Returns an array p with p[k] = index of the true mode assigned to
    estimated mode k.  Not used by align_and_error, whose contract is the
    amplitude-rank pairing; this helps detect mode swaps when debugging.
    """
    corr = np.abs(truth.mode_shapes.T.astype(complex).conj() @ estimate.mode_shapes_hat)
    n = corr.shape[0]
    assignment = np.full(n, -1)
    taken = np.zeros(n, dtype=bool)
    # Visit pairs by descending correlation.
    flat = np.argsort(-corr, axis=None)
    for pos in flat:
        t_idx, e_idx = divmod(int(pos), n)
        if assignment[e_idx] < 0 and not taken[t_idx]:
            assignment[e_idx] = t_idx
            taken[t_idx] = True
    return assignment


def frequency_spectra(estimate: ModeEstimate, t_s: float, zero_pad_factor: int = 8):
    """Zero-padded FFT magnitude of each right-factor row.

    Returns (omega, magnitudes) with omega the length-K grid 2 pi k / (K t_s)
    for K = zero_pad_factor * M and magnitudes of shape (N, K).  Only valid
    for estimates from raw, uniformly sampled data.
    """
    if estimate.kind != "raw":
        raise NonUniformSchedule(
            "frequency estimation needs the raw data matrix; compressed right "
            "factors live in the projected domain"
        )
    sched = estimate.schedule
    if sched is None or sched.scheme != "uniform":
        raise NonUniformSchedule("frequency estimation requires a uniform schedule")
    if t_s <= 0.0 or zero_pad_factor < 1:
        raise InvalidArgument("t_s must be > 0 and zero_pad_factor >= 1")
    m = estimate.right_factors_hat.shape[1]
    k = zero_pad_factor * m
    omega = 2.0 * np.pi * np.arange(k) / (k * t_s)
    mags = np.abs(np.fft.fft(estimate.right_factors_hat, n=k, axis=1))
    return omega, mags


def estimate_frequencies(estimate: ModeEstimate, t_s: float, zero_pad_factor: int = 8) -> np.ndarray:
    """Peak frequency of each right-factor row, in singular-value order.

    The resolution is one padded FFT bin, 2 pi / (zero_pad_factor * M * t_s);
    no sub-bin interpolation is applied.  Frequencies above 2 pi / t_s alias
    and cannot be distinguished, matching the underlying sampling.
    """
    omega, mags = frequency_spectra(estimate, t_s, zero_pad_factor)
    return omega[np.argmax(mags, axis=1)]
