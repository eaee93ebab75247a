"""Matrix diffusion: path-wise simulation and Monte Carlo averages.

The object of study is an N x N Hermitian matrix whose independent
real degrees of freedom (the diagonal x_ii, and x_ij, y_ij above it,
packed as H_ij = (x_ij + i y_ij)/sqrt(2)) perform independent Brownian
motions of variance tau/N. Because the process is Gaussian with
independent increments, the endpoint law at time tau is available in
one shot: H = H_0 + sqrt(tau) X with X drawn once from the stationary
Gaussian unitary weight exp(-(N/2) Tr X^2). `step_diffusion` walks the
path, `sample_static` jumps to the endpoint; both sample the same law,
which is itself a testable statement.

Averages over this ensemble are what the deterministic evaluators
compute exactly: mc_acp and mc_aicp estimate <det(z - H)> and
<1/det(z - H)> from eigenvalue samples, and empirical_density the
mean spectral measure. Every estimate is reproducible: trial k draws
from a stream keyed by (seed, k) alone, so results are independent of
execution order and chunking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .sources import SourceSpectrum

__all__ = [
    "HermitianState",
    "McEstimate",
    "step_diffusion",
    "sample_static",
    "eigenvalues",
    "mc_acp",
    "mc_aicp",
    "empirical_density",
]


def _as_source(source) -> SourceSpectrum:
    return SourceSpectrum.null(source) if isinstance(source, int) else source


@dataclass(frozen=True)
class HermitianState:
    """A Hermitian matrix together with its diffusion clock.

    entries must be exactly Hermitian with a real diagonal: every
    constructor in this module builds increments as U + conj(U).T plus
    a real diagonal, so the invariant holds to the bit, not to a
    tolerance. The array is stored as passed; eigenvalue extraction
    rechecks the invariant in case it was mutated in place.
    """

    entries: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise PreconditionError(f"entries must be square, got {entries.shape}")
        if not np.array_equal(entries, entries.conj().T):
            raise PreconditionError("entries are not Hermitian")
        if self.time < 0:
            raise PreconditionError(f"time must be >= 0, got {self.time}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "time", float(self.time))

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its statistical uncertainty.

    std_error is the sample standard deviation of the per-trial values
    divided by sqrt(trials); for complex samples the deviation is
    measured in modulus.
    """

    value: complex
    std_error: float
    trials: int

    def __post_init__(self):
        if self.std_error < 0:
            raise PreconditionError("std_error must be >= 0")
        if self.trials < 1:
            raise PreconditionError("trials must be >= 1")


def _hermitian_noise(n: int, scale: float, rng) -> np.ndarray:
    """Hermitian Gaussian matrix, each real degree of freedom ~ N(0, scale^2)."""
    upper = np.zeros((n, n), dtype=complex)
    iu = np.triu_indices(n, 1)
    x = rng.normal(0.0, scale, size=len(iu[0]))
    y = rng.normal(0.0, scale, size=len(iu[0]))
    upper[iu] = (x + 1j * y) / math.sqrt(2.0)
    noise = upper + upper.conj().T
    noise[np.diag_indices(n)] = rng.normal(0.0, scale, size=n)
    return noise


def step_diffusion(state: HermitianState, dt: float, rng) -> HermitianState:
    """Advance the matrix Brownian motion by dt.

    The increments are exact Gaussians, not an Euler approximation:
    the endpoint law is right for any step size, and step count only
    matters when the path itself is wanted.
    """
    if dt < 0:
        raise PreconditionError(f"dt must be >= 0, got {dt}")
    if dt == 0:
        return state
    n = state.dimension
    increment = _hermitian_noise(n, math.sqrt(dt / n), rng)
    return HermitianState(entries=state.entries + increment, time=state.time + dt)


def sample_static(source, tau: float, rng) -> HermitianState:
    """One endpoint draw H_0 + sqrt(tau) X without walking the path.

    X carries the unitary-invariant Gaussian weight exp(-(N/2) Tr X^2):
    real diagonal of variance 1/N, off-diagonal components of variance
    1/(2N) each after the 1/sqrt(2) packing.
    """
    source = _as_source(source)
    if tau <= 0:
        raise PreconditionError(f"tau must be > 0, got {tau}")
    n = source.dimension
    h0 = np.diag(np.array(source.eigenvalue_list(), dtype=complex))
    return HermitianState(
        entries=h0 + _hermitian_noise(n, math.sqrt(tau / n), rng), time=float(tau)
    )


def eigenvalues(state: HermitianState) -> np.ndarray:
    """Sorted real spectrum of the state.

    Rechecks exact Hermiticity first: the stored array is mutable in
    place, and a silently symmetrized wrong answer is worse than an
    error.
    """
    entries = state.entries
    if not np.array_equal(entries, entries.conj().T):
        raise DomainError("state entries were mutated and are no longer Hermitian")
    return np.linalg.eigvalsh(entries)


def _trial_rng(seed: int, trial: int):
    # counter-based stream keyed by (seed, trial): no sequential coupling
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))
    )


def _eigen_samples(source: SourceSpectrum, tau: float, trials: int, seed: int):
    """Eigenvalues of `trials` independent endpoint draws, row per trial."""
    n = source.dimension
    out = np.empty((trials, n), dtype=float)
    block = 2048
    for start in range(0, trials, block):
        stop = min(start + block, trials)
        stack = np.empty((stop - start, n, n), dtype=complex)
        for t in range(start, stop):
            stack[t - start] = sample_static(source, tau, _trial_rng(seed, t)).entries
        out[start:stop] = np.linalg.eigvalsh(stack)
    return out


def _det_estimates(lam: np.ndarray, z_list, sign: float, trials: int):
    results = []
    for z in z_list:
        # log form: sum of log-magnitudes and phases, re-exponentiated,
        # so the running product never over- or underflows mid-way
        logdet = np.sum(np.log(np.asarray(z, dtype=complex) - lam), axis=1)
        vals = np.exp(sign * logdet)
        mean = complex(np.mean(vals))
        spread = float(np.std(vals, ddof=1)) if trials > 1 else 0.0
        results.append(
            McEstimate(value=mean, std_error=spread / math.sqrt(trials), trials=trials)
        )
    return results


def mc_acp(source, tau: float, z_list, trials: int, seed: int) -> list:
    """Monte Carlo estimate of <det(z - H)> at each z.

    The determinant is evaluated through the sampled eigenvalues as
    prod (z - lambda_i). Deterministic given the seed.
    """
    source = _as_source(source)
    if trials < 2:
        raise PreconditionError(f"trials must be >= 2, got {trials}")
    lam = _eigen_samples(source, tau, trials, seed)
    return _det_estimates(lam, z_list, 1.0, trials)


def mc_aicp(source, tau: float, z_list, trials: int, seed: int, im_floor=None) -> list:
    """Monte Carlo estimate of <1/det(z - H)> at each z.

    The inverse determinant has heavy tails as z approaches the real
    axis, where a single near-eigenvalue sample can dominate the mean.
    Points with |Im z| below im_floor (default 0.1 sqrt(tau)) are
    refused rather than estimated badly.
    """
    source = _as_source(source)
    if trials < 2:
        raise PreconditionError(f"trials must be >= 2, got {trials}")
    if im_floor is None:
        im_floor = 0.1 * math.sqrt(tau)
    if im_floor <= 0:
        raise PreconditionError(f"im_floor must be > 0, got {im_floor}")
    for z in z_list:
        if abs(complex(z).imag) < im_floor:
            raise PreconditionError(
                f"z = {z} has |Im z| < im_floor = {im_floor:g}; the inverse "
                "determinant average is heavy-tailed that close to the axis "
                "(pass im_floor explicitly to override the 0.1 sqrt(tau) default)"
            )
    lam = _eigen_samples(source, tau, trials, seed)
    return _det_estimates(lam, z_list, -1.0, trials)


def empirical_density(source, tau: float, samples: int, bins: int, seed: int):
    """Histogram of pooled eigenvalues from independent endpoint draws.

    Returns (bin_edges, heights) with the heights normalized so the
    histogram integrates to one, matching the unit-mass convention of
    the limiting density.
    """
    source = _as_source(source)
    if samples < 1:
        raise PreconditionError(f"samples must be >= 1, got {samples}")
    if bins < 2:
        raise PreconditionError(f"bins must be >= 2, got {bins}")
    pooled = _eigen_samples(source, tau, samples, seed).ravel()
    heights, edges = np.histogram(pooled, bins=bins, density=True)
    return edges, heights
