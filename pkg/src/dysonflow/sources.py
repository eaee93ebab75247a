"""Initial-condition spectra for the matrix diffusion.

A source spectrum is the eigenvalue content of the deterministic matrix
the diffusion starts from: distinct real locations a_i with integer
multiplicities m_i summing to the matrix dimension N. The two transforms
of the starting polynomial that everything downstream consumes are

    pi_0(z)    = prod_i (z - a_i)^{m_i}          (characteristic polynomial)
    theta_0(z) = prod_i (z - a_i)^{-m_i}         (its reciprocal)
    G_0(z)     = sum_i (m_i / N) / (z - a_i)     (Cauchy transform of the
                                                  normalized counting measure)

The null spectrum (single source at 0 with multiplicity N) and the
symmetric two-source spectrum (+-a, each N/2) cover every special case
treated analytically; general spectra feed the quadrature paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError

__all__ = ["SourceSpectrum"]


@dataclass(frozen=True)
class SourceSpectrum:
    """Distinct real source locations with positive integer multiplicities.

    Attributes
    ----------
    locations : tuple of float
        Distinct eigenvalues a_i of the starting matrix.
    multiplicities : tuple of int
        Corresponding m_i >= 1; sum(m_i) is the matrix dimension N.
    """

    locations: tuple = field(default=(0.0,))
    multiplicities: tuple = field(default=(1,))

    def __post_init__(self):
        locs = tuple(float(a) for a in self.locations)
        mults = tuple(int(m) for m in self.multiplicities)
        if len(locs) != len(mults):
            raise PreconditionError(
                f"{len(locs)} locations but {len(mults)} multiplicities"
            )
        if not locs:
            raise PreconditionError("a source spectrum needs at least one location")
        if any(m < 1 for m in mults):
            raise PreconditionError(f"multiplicities must be >= 1, got {mults}")
        if len(set(locs)) != len(locs):
            raise PreconditionError(f"source locations must be distinct, got {locs}")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "multiplicities", mults)

    # ----- constructors --------------------------------------------------

    @staticmethod
    def null(n: int) -> "SourceSpectrum":
        """All N eigenvalues at the origin."""
        if n < 1:
            raise PreconditionError(f"dimension must be >= 1, got {n}")
        return SourceSpectrum((0.0,), (n,))

    @staticmethod
    def symmetric_pair(a: float, n: int) -> "SourceSpectrum":
        """Eigenvalues +-a with multiplicity N/2 each; N must be even."""
        if n < 2 or n % 2:
            raise PreconditionError(
                f"symmetric pair needs an even dimension >= 2, got {n}"
            )
        if a == 0:
            raise PreconditionError("use null() for a source pair at 0")
        a = float(a)
        return SourceSpectrum((-a, a), (n // 2, n // 2))

    @staticmethod
    def parse(text: str) -> "SourceSpectrum":
        """Parse 'a1:m1,a2:m2,...'; a bare 'a' means multiplicity 1."""
        locs, mults = [], []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                a_str, m_str = part.split(":", 1)
                locs.append(float(a_str))
                mults.append(int(m_str))
            else:
                locs.append(float(part))
                mults.append(1)
        if not locs:
            raise PreconditionError(f"could not parse source spectrum from {text!r}")
        return SourceSpectrum(tuple(locs), tuple(mults))

    # ----- basic queries -------------------------------------------------

    @property
    def dimension(self) -> int:
        return sum(self.multiplicities)

    @property
    def is_null(self) -> bool:
        return self.locations == (0.0,)

    def eigenvalue_list(self) -> np.ndarray:
        """Length-N real vector with each a_i repeated m_i times."""
        return np.repeat(
            np.asarray(self.locations, dtype=float),
            np.asarray(self.multiplicities, dtype=int),
        )

    # ----- transforms of the starting polynomial --------------------------

    def char_poly(self, z):
        """pi_0(z) = prod (z - a_i)^{m_i}, vectorized over z."""
        z = np.asarray(z)
        out = np.ones_like(z, dtype=complex)
        for a, m in zip(self.locations, self.multiplicities):
            out = out * (z - a) ** m
        return out

    def char_poly_reciprocal(self, z):
        """theta_0(z) = prod (z - a_i)^{-m_i}, vectorized over z."""
        z = np.asarray(z)
        out = np.ones_like(z, dtype=complex)
        for a, m in zip(self.locations, self.multiplicities):
            out = out * (z - a) ** (-m)
        return out

    def green0(self, z):
        """G_0(z) = (1/N) sum m_i / (z - a_i), vectorized over z."""
        z = np.asarray(z, dtype=complex)
        n = self.dimension
        out = np.zeros_like(z)
        for a, m in zip(self.locations, self.multiplicities):
            out = out + (m / n) / (z - a)
        return out

    def char_poly_coefficients(self) -> np.ndarray:
        """Monic coefficient vector of pi_0, highest power first."""
        coeffs = np.array([1.0])
        for a, m in zip(self.locations, self.multiplicities):
            for _ in range(m):
                coeffs = np.convolve(coeffs, [1.0, -a])
        return coeffs

    def __str__(self):
        return ",".join(
            f"{a:g}:{m}" for a, m in zip(self.locations, self.multiplicities)
        )
