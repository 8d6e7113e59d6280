"""Sampling requirements and mode-shape error bounds.

Three sampling regimes are covered: uniform grids (Dirichlet-kernel Gram
analysis), i.i.d. random times (a Chernoff eigenvalue sandwich), and random
compression (a distributional Johnson-Lindenstrauss tail).  Each regime has
a requirements calculator that turns (N, frequency separations, tolerance)
into a sampling plan, plus diagnostics that measure how far an actual
steering matrix deviates from orthonormal rows.

All logarithms are natural.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgument
from .sampling import SteeringMatrix

EULER_GAMMA = float(np.euler_gamma)
ROOT2 = math.sqrt(2.0)

# ln(floor(N/2)) + 1.01 upper-bounds the harmonic number H_{floor(N/2)}
# (see harmonic_number_bounds); the 1.01 absorbs gamma + the bracket slack.
_HARMONIC_PAD = 1.01


def psinc(x, m: int):
    """Periodic sinc (Dirichlet kernel) sin(m x / 2) / (m sin(x / 2)).

    At the removable singularities x = 2 pi k the value is (-1)^(k (m - 1)).
    Accepts scalars or arrays; m is the number of samples in the kernel.
    """
    if m < 1:
        raise InvalidArgument("m must be >= 1")
    x = np.asarray(x, dtype=float)
    # Reduce to r = x - 2 pi k, which is exact up to rounding of 2 pi k and
    # keeps sin(r/2) well away from catastrophic cancellation at multiples.
    k = np.round(x / (2.0 * math.pi))
    r = x - 2.0 * math.pi * k
    sign = np.where((k.astype(np.int64) * (m - 1)) % 2 == 0, 1.0, -1.0)
    with np.errstate(invalid="ignore"):
        core = np.where(r == 0.0, 1.0, np.sin(m * r / 2.0) / (m * np.sin(r / 2.0)))
    out = sign * core
    return float(out) if out.ndim == 0 else out


def kl_div(a: float, b: float) -> float:
    """Binary KL divergence D(a || b) in nats, with 0 log 0 taken as 0."""
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"a must lie in [0, 1], got {a}")
    if not 0.0 < b < 1.0:
        raise DomainError(f"b must lie in (0, 1), got {b}")
    total = 0.0
    if a > 0.0:
        total += a * math.log(a / b)
    if a < 1.0:
        total += (1.0 - a) * math.log((1.0 - a) / (1.0 - b))
    return total


def _euler_diff(n: int) -> float:
    """H_n - ln n - gamma without catastrophic cancellation.

    Direct subtraction loses ~1e-15 absolute, which swamps the upper-bracket
    margin of 1/(72 n^3) once n is past ~1e4.  Above the crossover the
    Euler-Maclaurin tail gives the difference to full relative precision;
    below it the margin is wide enough for compensated subtraction.
    """
    if n >= 64:
        # truncation < 1/(240 n^8), far under the bracket margin at n = 64
        n2 = float(n) * float(n)
        return 1.0 / (2.0 * n) - 1.0 / (12.0 * n2) + 1.0 / (120.0 * n2 * n2) - 1.0 / (
            252.0 * n2 * n2 * n2
        )
    terms = [1.0 / k for k in range(1, n + 1)]
    return math.fsum(terms + [-math.log(n), -EULER_GAMMA])


def harmonic_number_bounds(n: int) -> tuple[float, float, float]:
    """Harmonic number H_n with analytic brackets on H_n - ln n - gamma.

    Returns (lower, h_n, upper) where

        lower = 1 / (2n + 1/(1 - gamma) - 2) <= H_n - ln n - gamma
              < upper = 1 / (2n + 1/3)

    and the lower bound is attained only at n = 1.  The bracket is verified
    internally against a cancellation-free evaluation of the difference;
    recomputing it as h_n - ln(n) - gamma in doubles is too noisy to resolve
    the upper margin beyond n ~ 1e4.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    h_n = float(np.sum(1.0 / np.arange(1, n + 1, dtype=float)))
    lower = 1.0 / (2.0 * n + 1.0 / (1.0 - EULER_GAMMA) - 2.0)
    upper = 1.0 / (2.0 * n + 1.0 / 3.0)
    diff = _euler_diff(n)
    if not (lower - 1e-14 <= diff < upper):
        raise DomainError(
            f"harmonic bracket violated at n={n}: {lower} <= {diff} < {upper}"
        )
    return lower, h_n, upper


@dataclass(frozen=True)
class SamplingPlan:
    """Sampling parameters sufficient for a target Gram deviation epsilon.

    ``t_s`` is None for the random scheme (no grid); ``tau`` is None for the
    uniform scheme (no failure probability).
    """

    scheme: str
    n_modes: int
    t_max_min: float
    m_min: int
    epsilon: float
    t_s: float | None = None
    tau: float | None = None

    def __post_init__(self):
        if self.scheme not in ("uniform", "random"):
            raise InvalidArgument(f"unknown scheme {self.scheme!r}")
        if not (self.t_max_min > 0.0 and self.m_min >= self.n_modes):
            raise InvalidArgument("plan must have t_max_min > 0 and m_min >= n_modes")


def _check_common(n: int, epsilon: float) -> float:
    if n < 2:
        raise DomainError("n must be >= 2")
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    return math.log(n // 2) + _HARMONIC_PAD


def uniform_requirements(n: int, delta_min: float, delta_max: float, epsilon: float) -> SamplingPlan:
    """Uniform-grid plan: T_s = pi / delta_max and

        t_max >= 2 pi (ln floor(N/2) + 1.01) / (epsilon delta_min)
        M     >= max(2 (ln floor(N/2) + 1.01) / epsilon * delta_max/delta_min + 1, N)

    guaranteeing gram_deviation(S) <= epsilon for any N frequencies whose
    pairwise separations lie in [delta_min, delta_max].
    """
    log_term = _check_common(n, epsilon)
    if not 0.0 < delta_min <= delta_max:
        raise DomainError("need 0 < delta_min <= delta_max")
    t_s = math.pi / delta_max
    t_max_min = 2.0 * math.pi * log_term / (epsilon * delta_min)
    m_raw = 2.0 * log_term / epsilon * (delta_max / delta_min) + 1.0
    m_min = max(int(math.ceil(m_raw)), n)
    return SamplingPlan("uniform", n, t_max_min, m_min, epsilon, t_s=t_s)


def random_requirements(n: int, delta_min: float, epsilon: float, tau: float) -> SamplingPlan:
    """Random-time plan: with probability at least 1 - tau,

        t_max >= 40 (ln floor(N/2) + 1.01) / (epsilon delta_min)
        M     >  max((ln N + ln(2/tau)) / min(D1, D2), N)

    puts every eigenvalue of [S][S]* inside (1 - epsilon, 1 + epsilon).
    D1, D2 are binary KL divergences comparing the target deviation
    (1 +/- epsilon)/N against the expected one (1 +/- epsilon/10)/N.
    """
    log_term = _check_common(n, epsilon)
    if not delta_min > 0.0:
        raise DomainError("delta_min must be > 0")
    if not 0.0 < tau < 1.0:
        raise DomainError("tau must lie in (0, 1)")
    if (1.0 + epsilon) / n > 1.0:
        raise DomainError("(1 + epsilon)/n must not exceed 1; the KL bound is undefined")
    t_max_min = 40.0 * log_term / (epsilon * delta_min)
    d1 = kl_div((1.0 + epsilon) / n, (1.0 + epsilon / 10.0) / n)
    d2 = kl_div((1.0 - epsilon) / n, (1.0 - epsilon / 10.0) / n)
    m_bound = max((math.log(n) + math.log(2.0 / tau)) / min(d1, d2), float(n))
    m_min = int(math.floor(m_bound)) + 1  # strict inequality
    return SamplingPlan("random", n, t_max_min, m_min, epsilon, tau=tau)


def jl_tail_rate(epsilon: float) -> float:
    """Exponent rate f(eps) = eps^2/4 - eps^3/6 of the compression tail bound.

    A matrix with the distributional JL property satisfies, for fixed x,
    Pr[| ||Phi* x||^2 - ||x||^2 | > eps ||x||^2] <= 4 exp(-M' f(eps)).
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    return epsilon**2 / 4.0 - epsilon**3 / 6.0


def jl_requirements(k: int, epsilon_prime: float, delta_fail: float) -> int:
    """Columns M' needed to epsilon'-preserve a k-dimensional subspace:

        M' >= (2 k ln(42 / eps') + ln(4 / delta)) / f(eps' / sqrt(2))

    rounded up.  Decreasing in epsilon_prime and increasing in k.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if not 0.0 < epsilon_prime < 1.0:
        raise DomainError("epsilon_prime must lie in (0, 1)")
    if not 0.0 < delta_fail < 1.0:
        raise DomainError("delta_fail must lie in (0, 1)")
    numerator = 2.0 * k * math.log(42.0 / epsilon_prime) + math.log(4.0 / delta_fail)
    return int(math.ceil(numerator / jl_tail_rate(epsilon_prime / ROOT2)))


def sep_values(magnitudes, epsilon: float) -> np.ndarray:
    """Amplitude-separation factors sep_n(epsilon) for every mode.

        sep_n = max_{l != n} sqrt(2) |A_l| |A_n|
                / min_{c in [-1, 1]} | |A_l|^2 - |A_n|^2 (1 + c epsilon) |

    The inner minimum of the affine-in-c expression is zero when the sign
    changes over [-1, 1] (then sep_n = inf) and otherwise sits at one of the
    endpoints.  Modes with identical magnitudes also give inf.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie in (0, 1)")
    mags = np.abs(np.asarray(magnitudes, dtype=float))
    if mags.ndim != 1 or mags.size < 2:
        raise InvalidArgument("need at least two magnitudes")
    if np.any(mags == 0.0) or not np.all(np.isfinite(mags)):
        raise InvalidArgument("magnitudes must be finite and nonzero")
    n = mags.size
    out = np.empty(n)
    for i in range(n):
        best = 0.0
        for l in range(n):
            if l == i:
                continue
            g_lo = mags[l] ** 2 - mags[i] ** 2 * (1.0 - epsilon)
            g_hi = mags[l] ** 2 - mags[i] ** 2 * (1.0 + epsilon)
            denom = 0.0 if g_lo * g_hi <= 0.0 else min(abs(g_lo), abs(g_hi))
            num = ROOT2 * mags[l] * mags[i]
            best = max(best, math.inf if denom == 0.0 else num / denom)
        out[i] = best
    return out


def mode_error_bound(magnitudes, epsilon: float, n: int, variant: str = "uniform") -> float:
    """Per-mode aligned error bound min{sqrt(2), eps sqrt(1+eps)/sqrt(1-eps) sep_n(eps)}.

    ``magnitudes`` are |A_n| for the uniform/random variants and the singular
    values of the uncompressed data matrix for the compressed variant; the
    formula is the same, only the inputs differ.  ``n`` indexes magnitudes.
    """
    if variant not in ("uniform", "random", "compressed"):
        raise InvalidArgument(f"unknown variant {variant!r}")
    seps = sep_values(magnitudes, epsilon)
    if not 0 <= n < seps.size:
        raise InvalidArgument(f"mode index {n} out of range")
    factor = epsilon * math.sqrt(1.0 + epsilon) / math.sqrt(1.0 - epsilon)
    return min(ROOT2, factor * seps[n])


def gram_deviation(steering: SteeringMatrix) -> float:
    """Spectral norm of [S][S]* - [I], the perturbation the bounds control."""
    s = steering.entries
    gram = s @ s.conj().T
    return float(np.linalg.norm(gram - np.eye(s.shape[0]), 2))


def gershgorin_uniform_bound(frequencies, t_s: float, m: int) -> float:
    """Gershgorin radius of the uniform-schedule Gram perturbation:

        max_l sum_{n != l} | psinc(|w_l - w_n| T_s, M) |

    This dominates gram_deviation for any T_s because the off-diagonal Gram
    entries have exactly these magnitudes.  A warning is issued when
    T_s > pi / delta_max, outside the region the sampling theorem addresses.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.ndim != 1 or freqs.size < 2:
        raise InvalidArgument("need at least two frequencies")
    if t_s <= 0.0 or m < 1:
        raise InvalidArgument("t_s must be > 0 and m >= 1")
    diffs = np.abs(freqs[:, None] - freqs[None, :])
    delta_max = diffs.max()
    # Relative slack keeps the exact theorem rate T_s = pi/delta_max from
    # warning through rounding in the recomputed gap.
    if t_s > math.pi / delta_max * (1.0 + 1e-9):
        warnings.warn(
            "T_s exceeds pi/delta_max; the bound is still valid as a Gershgorin "
            "radius but the sampling theorem does not apply",
            stacklevel=2,
        )
    kernel = np.abs(psinc(diffs * t_s, m))
    np.fill_diagonal(kernel, 0.0)
    return float(kernel.sum(axis=1).max())


def _unnormalized_sinc(x: np.ndarray) -> np.ndarray:
    """sin(x)/x with limit 1 at 0, exactly zero at nonzero multiples of pi."""
    k = np.round(x / math.pi)
    r = x - math.pi * k
    sign = np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        away = sign * np.sin(r) / x
    return np.where(k == 0, np.sinc(x / math.pi), away)


@dataclass(frozen=True)
class ExpectedGram:
    """Gershgorin radius of E[S S* - I] under random sampling, with the
    closed-form harmonic-sum bound that dominates it."""

    radius: float
    closed_form: float


def expected_gram_random(frequencies, t_max: float) -> ExpectedGram:
    """Expected Gram perturbation for i.i.d. uniform times on [0, t_max].

    The (l, n) off-diagonal entry of E[S S*] has magnitude
    |sinc((w_l - w_n) t_max / 2)| (unnormalized sinc), giving a Gershgorin
    radius that the chained bound 4 (ln floor(N/2) + 1.01) / (delta_min t_max)
    always dominates; that dominance is asserted here.
    """
    freqs = np.sort(np.asarray(frequencies, dtype=float))
    if freqs.ndim != 1 or freqs.size < 2:
        raise InvalidArgument("need at least two frequencies")
    if t_max <= 0.0:
        raise InvalidArgument("t_max must be > 0")
    gaps = np.diff(freqs)
    if np.any(gaps <= 0.0):
        raise InvalidArgument("frequencies must be distinct")
    delta_min = gaps.min()
    args = (freqs[:, None] - freqs[None, :]) * t_max / 2.0
    kernel = np.abs(_unnormalized_sinc(args))
    np.fill_diagonal(kernel, 0.0)
    radius = float(kernel.sum(axis=1).max())
    n = freqs.size
    closed_form = 4.0 * (math.log(n // 2) + _HARMONIC_PAD) / (delta_min * t_max)
    if radius > closed_form * (1.0 + 1e-12):
        raise InvalidArgument(
            f"Gershgorin radius {radius} exceeds the closed form {closed_form}"
        )
    return ExpectedGram(radius, closed_form)


@dataclass(frozen=True)
class BoundReport:
    """Measured Gram deviation next to the per-mode error bounds it implies."""

    variant: str
    sep: np.ndarray
    error_bounds: np.ndarray
    gram_deviation: float
    gershgorin: float | None = None

    def __post_init__(self):
        if self.variant not in ("uniform", "random", "compressed"):
            raise InvalidArgument(f"unknown variant {self.variant!r}")
        bounds = np.asarray(self.error_bounds, dtype=float)
        if np.any(bounds < 0.0) or np.any(bounds > ROOT2 * (1.0 + 1e-12)):
            raise InvalidArgument("error bounds must lie in [0, sqrt(2)]")
        if self.gershgorin is not None and self.gershgorin < self.gram_deviation - 1e-12:
            raise InvalidArgument("Gershgorin radius cannot undercut the measured deviation")
        object.__setattr__(self, "error_bounds", bounds)
        object.__setattr__(self, "sep", np.asarray(self.sep, dtype=float))


def bound_report(steering: SteeringMatrix, magnitudes, epsilon: float,
                 variant: str = "uniform") -> BoundReport:
    """Evaluate the bounds machinery against a concrete steering matrix.

    Magnitudes are ranked descending internally so bound index k matches the
    amplitude-rank ordering used by align_and_error.
    """
    mags = np.abs(np.asarray(magnitudes, dtype=float))
    mags = mags[np.argsort(-mags, kind="stable")]
    seps = sep_values(mags, epsilon)
    bounds = np.array([mode_error_bound(mags, epsilon, k, variant) for k in range(mags.size)])
    dev = gram_deviation(steering)
    gersh = None
    if steering.schedule.scheme == "uniform":
        gersh = gershgorin_uniform_bound(
            steering.frequencies, steering.schedule.t_s, steering.schedule.n_samples
        )
    return BoundReport(variant, seps, bounds, dev, gersh)
