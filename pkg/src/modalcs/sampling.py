"""Sampling schedules, steering/data matrices, and random compression.

The analytic response sampled at times t_1 < ... < t_M forms the N x M data
matrix [V] whose factorization [V] = [Psi] (sqrt(M) diag(A)) [S] drives the
whole estimation pipeline.  [S] is the steering matrix of unit-norm rows
e^{i w_n t_m} / sqrt(M); its Gram deviation from the identity is what the
sampling theorems control.  Compression multiplies [V] on the right by a
random M x M' matrix with the distributional Johnson-Lindenstrauss property.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidArgument, ShapeError
from .mdof import ModalBasis

_UNIFORM_KINDS = ("uniform", "random")
_JL_KINDS = ("gaussian", "bernoulli", "identity")


def rng_from_seed(seed: int) -> np.random.Generator:
    """Counter-based generator used for every stochastic operation."""
    return np.random.Generator(np.random.Philox(seed))


def spawn_seeds(seed: int, n: int) -> np.ndarray:
    """Derive n independent 64-bit child seeds from a master seed."""
    return np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)


@dataclass(frozen=True)
class SampleSchedule:
    """Strictly increasing sample times on [0, t_max].

    ``scheme`` is "uniform" (t_m = (m-1) t_s, t_max = (M-1) t_s) or "random"
    (i.i.d. uniform draws over [0, t_max], sorted).  ``seed`` records the
    draw for random schedules.
    """

    times: np.ndarray
    scheme: str
    t_max: float
    t_s: float | None = None
    seed: int | None = None

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        if times.ndim != 1 or times.size < 1:
            raise InvalidArgument("times must be a non-empty 1-d array")
        if self.scheme not in _UNIFORM_KINDS:
            raise InvalidArgument(f"unknown scheme {self.scheme!r}")
        if np.any(np.diff(times) <= 0.0):
            raise InvalidArgument("times must be strictly increasing")
        if times[0] < 0.0 or times[-1] > self.t_max + 1e-12 * max(1.0, self.t_max):
            raise InvalidArgument("times must lie within [0, t_max]")
        if self.scheme == "uniform":
            if self.t_s is None or self.t_s <= 0.0:
                raise InvalidArgument("uniform schedule requires t_s > 0")
            if times.size > 1 and np.any(times != np.arange(times.size) * self.t_s):
                raise InvalidArgument("uniform times must equal (m-1)*t_s exactly")
        object.__setattr__(self, "times", times)

    @property
    def n_samples(self) -> int:
        return self.times.size


def uniform_schedule(t_s: float, m: int) -> SampleSchedule:
    """M samples at t_m = (m-1) t_s for m = 1..M."""
    if not t_s > 0.0:
        raise InvalidArgument("t_s must be > 0")
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    times = np.arange(m) * t_s
    return SampleSchedule(times, "uniform", t_max=float((m - 1) * t_s), t_s=t_s)


def random_schedule(t_max: float, m: int, seed: int) -> SampleSchedule:
    """M i.i.d. uniform draws over [0, t_max], sorted ascending.

    Exact collisions (probability zero in theory, possible in floats) are
    resolved by redrawing from the same stream, keeping the result a
    deterministic function of the seed.
    """
    if not t_max > 0.0:
        raise InvalidArgument("t_max must be > 0")
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    rng = rng_from_seed(seed)
    while True:
        times = np.sort(rng.uniform(0.0, t_max, size=m))
        if m == 1 or np.all(np.diff(times) > 0.0):
            break
    return SampleSchedule(times, "random", t_max=float(t_max), seed=int(seed))


@dataclass(frozen=True)
class SteeringMatrix:
    """[S]_{n,m} = e^{i w_n t_m} / sqrt(M); every entry has modulus 1/sqrt(M)."""

    entries: np.ndarray
    frequencies: np.ndarray
    schedule: SampleSchedule

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        freqs = np.asarray(self.frequencies, dtype=float)
        n, m = entries.shape
        if freqs.shape != (n,) or m != self.schedule.n_samples:
            raise DimensionMismatch("steering entries disagree with frequencies/schedule")
        if np.abs(np.abs(entries) - 1.0 / np.sqrt(m)).max() > 1e-12:
            raise InvalidArgument("steering entries must all have modulus 1/sqrt(M)")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "frequencies", freqs)

    @property
    def shape(self):
        return self.entries.shape


def build_steering(frequencies, schedule: SampleSchedule) -> SteeringMatrix:
    """Steering matrix for the given frequencies and schedule.

    Rows have unit Euclidean norm by construction.  Frequencies must be
    strictly positive; ordering is the caller's business.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.ndim != 1 or np.any(freqs <= 0.0):
        raise InvalidArgument("frequencies must be a 1-d array of positive values")
    m = schedule.n_samples
    entries = np.exp(1j * np.outer(freqs, schedule.times)) / np.sqrt(m)
    return SteeringMatrix(entries, freqs, schedule)


@dataclass(frozen=True)
class DataMatrix:
    """Sampled (or compressed) analytic response with its provenance.

    ``kind`` is "raw" for N x M sampled responses or "compressed" for
    N x M' products with a compression matrix.  The schedule rides along so
    downstream frequency estimation can refuse non-uniform inputs.
    """

    entries: np.ndarray
    kind: str
    schedule: SampleSchedule | None = None
    compression_seed: int | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2:
            raise ShapeError("data matrix must be 2-d")
        if self.kind not in ("raw", "compressed"):
            raise InvalidArgument(f"unknown data-matrix kind {self.kind!r}")
        if self.kind == "raw" and self.schedule is not None:
            if entries.shape[1] != self.schedule.n_samples:
                raise DimensionMismatch("column count disagrees with the schedule")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape


def build_data_matrix(basis: ModalBasis, schedule: SampleSchedule) -> DataMatrix:
    """[V] with columns v(t_m) = sum_n psi_n A_n e^{i w_n t_m}.

    Equals [Psi] (sqrt(M) diag(A)) [S] for the steering matrix of the same
    frequencies and schedule.
    """
    if basis.amplitudes is None:
        raise InvalidArgument("basis has no amplitudes; use with_amplitudes() first")
    phases = np.exp(1j * np.outer(basis.frequencies, schedule.times))
    v = (basis.mode_shapes * basis.amplitudes) @ phases
    return DataMatrix(v, "raw", schedule=schedule)


@dataclass(frozen=True)
class JlMatrix:
    """Random compression matrix of shape M x M' with M' <= M.

    Entry scaling gives E ||Phi* x||^2 = ||x||^2 for any fixed x: Gaussian
    entries are N(0, 1/M'), Bernoulli entries are +/- 1/sqrt(M').
    """

    entries: np.ndarray
    kind: str
    seed: int | None = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2:
            raise ShapeError("compression matrix must be 2-d")
        m, m_prime = entries.shape
        if m_prime > m:
            raise InvalidArgument(f"M'={m_prime} must not exceed M={m}")
        if self.kind not in _JL_KINDS:
            raise InvalidArgument(f"unknown compression kind {self.kind!r}")
        object.__setattr__(self, "entries", entries)

    @property
    def shape(self):
        return self.entries.shape

    @classmethod
    def identity(cls, m: int) -> "JlMatrix":
        """Degenerate M' = M case, useful as a no-op in tests."""
        return cls(np.eye(m), "identity")


def draw_jl_matrix(m: int, m_prime: int, kind: str = "gaussian", seed: int = 0) -> JlMatrix:
    """Draw an M x M' compression matrix of the given kind."""
    if m_prime < 1 or m_prime > m:
        raise InvalidArgument(f"need 1 <= M' <= M, got M'={m_prime}, M={m}")
    rng = rng_from_seed(seed)
    if kind == "gaussian":
        entries = rng.normal(0.0, 1.0 / np.sqrt(m_prime), size=(m, m_prime))
    elif kind == "bernoulli":
        entries = (2.0 * rng.integers(0, 2, size=(m, m_prime)) - 1.0) / np.sqrt(m_prime)
    else:
        raise InvalidArgument(f"cannot draw kind {kind!r}")
    return JlMatrix(entries, kind, seed=int(seed))


def compress(data: DataMatrix, phi: JlMatrix) -> DataMatrix:
    """[Y] = [V] [Phi]; each row of [V] is compressed by the same [Phi].

    The matrix product is cross-checked against explicit row-by-row
    application, which must agree to near machine precision.
    """
    if data.kind != "raw":
        raise InvalidArgument("only raw data matrices can be compressed")
    if data.entries.shape[1] != phi.entries.shape[0]:
        raise DimensionMismatch(
            f"data has {data.entries.shape[1]} columns but Phi has "
            f"{phi.entries.shape[0]} rows"
        )
    y = data.entries @ phi.entries
    rowwise = np.vstack([row @ phi.entries for row in data.entries])
    scale = max(1.0, np.abs(y).max())
    if np.abs(y - rowwise).max() > 1e-10 * scale:
        raise InvalidArgument("row-wise compression disagrees with the matrix product")
    return DataMatrix(y, "compressed", schedule=data.schedule, compression_seed=phi.seed)
