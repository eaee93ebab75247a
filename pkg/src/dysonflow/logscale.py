"""Complex numbers carried as (log magnitude, unit-ish mantissa) pairs.

Determinant averages of N x N matrices grow like exp(c*N); at N = 1024
the interesting comparisons happen around exp(+-500), far outside double
range. Everything upstream of a final ratio therefore works with

    value = mantissa * exp(log_scale)

where log_scale is a real double and the mantissa is a complex double
kept in the annulus 1 <= |m| < e (or exactly 0). Ratios and relative
errors then reduce to mantissa arithmetic plus a real subtraction of
scales, which never overflows.

Only the handful of operations the evaluators need are implemented:
construction from a plain complex or from (log, mantissa), multiply,
divide, add, ratio-to-float, and conversion back to complex when the
scale is small enough.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ScaledComplex", "scaled_sum"]


def _normalize(log_scale: float, mantissa: complex) -> tuple[float, complex]:
    if mantissa == 0:
        return 0.0, 0j
    shift = math.floor(math.log(abs(mantissa)))
    if shift != 0:
        mantissa *= math.exp(-shift)
        log_scale += shift
    # One correction pass: floor(log|m|) can land on the wrong side by
    # one unit when |m| sits within rounding of a power of e.
    a = abs(mantissa)
    if a >= math.e:
        mantissa /= math.e
        log_scale += 1.0
    elif a < 1.0:
        mantissa *= math.e
        log_scale -= 1.0
    return log_scale, mantissa


@dataclass(frozen=True)
class ScaledComplex:
    """A complex value mantissa * exp(log_scale) with |mantissa| in [1, e).

    The zero value is represented as (0.0, 0j) exactly.
    """

    log_scale: float
    mantissa: complex

    # ----- construction -------------------------------------------------

    @staticmethod
    def from_complex(z: complex) -> "ScaledComplex":
        z = complex(z)
        if z == 0:
            return ScaledComplex(0.0, 0j)
        return ScaledComplex(*_normalize(0.0, z))

    @staticmethod
    def from_log(log_scale: float, mantissa: complex) -> "ScaledComplex":
        if mantissa == 0:
            return ScaledComplex(0.0, 0j)
        return ScaledComplex(*_normalize(float(log_scale), complex(mantissa)))

    @staticmethod
    def exp(w: complex) -> "ScaledComplex":
        """exp(w) for arbitrary complex w, without overflow."""
        w = complex(w)
        return ScaledComplex.from_log(w.real, cmath.exp(1j * w.imag))

    # ----- predicates ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    # ----- arithmetic ----------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, ScaledComplex):
            if self.is_zero or other.is_zero:
                return ScaledComplex(0.0, 0j)
            return ScaledComplex.from_log(
                self.log_scale + other.log_scale, self.mantissa * other.mantissa
            )
        return self * ScaledComplex.from_complex(other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ScaledComplex):
            if other.is_zero:
                raise ZeroDivisionError("division by scaled zero")
            if self.is_zero:
                return ScaledComplex(0.0, 0j)
            return ScaledComplex.from_log(
                self.log_scale - other.log_scale, self.mantissa / other.mantissa
            )
        return self / ScaledComplex.from_complex(other)

    def __add__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        # Add in the frame of the larger scale; the smaller term is
        # damped by exp(negative), which underflows harmlessly to 0.
        if self.log_scale >= other.log_scale:
            big, small = self, other
        else:
            big, small = other, self
        delta = small.log_scale - big.log_scale
        damp = math.exp(delta) if delta > -745.0 else 0.0
        return ScaledComplex.from_log(
            big.log_scale, big.mantissa + small.mantissa * damp
        )

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero:
            return self
        return ScaledComplex(self.log_scale, -self.mantissa)

    def __sub__(self, other):
        if not isinstance(other, ScaledComplex):
            other = ScaledComplex.from_complex(other)
        return self + (-other)

    def conjugate(self) -> "ScaledComplex":
        return ScaledComplex(self.log_scale, self.mantissa.conjugate())

    # ----- extraction ----------------------------------------------------

    def to_complex(self) -> complex:
        """Plain complex value; raises OverflowError if it cannot fit."""
        if self.is_zero:
            return 0j
        if self.log_scale > 700.0:
            raise OverflowError(
                f"scaled value exp({self.log_scale:.1f}) exceeds double range"
            )
        return self.mantissa * math.exp(self.log_scale)

    def abs_log(self) -> float:
        """log|value|, or -inf for zero."""
        if self.is_zero:
            return -math.inf
        return self.log_scale + math.log(abs(self.mantissa))

    def ratio(self, other: "ScaledComplex") -> complex:
        """self / other as a plain complex; safe when scales nearly cancel."""
        q = self / other
        return q.to_complex()

    def __repr__(self):
        if self.is_zero:
            return "ScaledComplex(0)"
        return f"ScaledComplex(exp({self.log_scale:.6g}) * {self.mantissa!r})"


def scaled_sum(log_mag, mantissa, weights=None) -> ScaledComplex:
    """sum_k weights_k * mantissa_k * exp(log_mag_k), overflow-free.

    The terms are rescaled into the frame of the largest contributing
    log magnitude before summing, so individual terms may sit anywhere
    in exp(+-1e8) territory. Entries with zero mantissa or -inf log
    magnitude drop out. This is the complex-weighted analogue of
    logsumexp and is what every quadrature node sum goes through.
    """
    log_mag = np.asarray(log_mag, dtype=float)
    mantissa = np.asarray(mantissa, dtype=complex)
    contrib = mantissa if weights is None else mantissa * np.asarray(weights)
    mask = (contrib != 0) & (log_mag > -math.inf)
    if not np.any(mask):
        return ScaledComplex(0.0, 0j)
    peak = float(np.max(log_mag[mask]))
    total = complex(np.sum(contrib[mask] * np.exp(log_mag[mask] - peak)))
    return ScaledComplex.from_log(peak, total)
