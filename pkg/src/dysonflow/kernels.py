"""Finite-N spectral kernel from multiple orthogonal functions.

The eigenvalue process started from a degenerate spectrum is described
by a kernel built out of two families indexed by multiplicity vectors
m = (m_1, ..., m_d) over the source eigenvalues:

    Pi_m(y)    = sqrt(N/2 pi tau) integral dq e^{-N(q-iy)^2/2tau} pi_0(-iq),
    Theta_m(x) = sqrt(N/2 pi tau) loop du   e^{-N(u-x)^2/2tau} theta_0(u),

with pi_0(u) = prod (u - a_i)^{m_i}, theta_0 = 1/pi_0, the loop running
clockwise around all sources, and N the full matrix dimension in every
heat factor regardless of |m|. The kernel sums the two families up a
nested chain of multiplicity vectors that fills the sources one
coordinate at a time:

    K_N(x, y) = sum_{i=0}^{N-1} Theta_{chain[i+1]}(x) Pi_{chain[i]}(y).

For the symmetric two-source start the chain sum telescopes: summing
pi_0^{(i)}(-iq) theta_0^{(i+1)}(u) over the chain is a pair of
geometric series whose closed form is

    I(q, u) = (1/(u+iq)) (1 - (-q^2-a^2)^{N/2} / (u^2-a^2)^{N/2}),

and the leading 1/(u+iq) drops when the u-loop stays clear of the
imaginary axis (the integrand is then analytic inside), leaving the
double-integral closed form `kernel_bh`. Comparing the summed kernel
against that closed form, term count against two quadratures, is the
strongest internal consistency check in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    PreconditionError,
)
from .sources import SourceSpectrum

__all__ = [
    "MultiplicityChain",
    "theta_fn",
    "pi_fn",
    "kernel",
    "kernel_bh",
    "source_sum_identity",
]


def _as_source(source) -> SourceSpectrum:
    return SourceSpectrum.null(source) if isinstance(source, int) else source


@dataclass(frozen=True)
class MultiplicityChain:
    """Nested ladder of multiplicity vectors from zero to the source.

    sequence[i] has total weight i; each step raises exactly one
    coordinate by one, and coordinates fill in source order: the first
    eigenvalue fills to its multiplicity before the second starts.
    """

    base: SourceSpectrum
    sequence: tuple

    def __post_init__(self):
        seq = tuple(tuple(int(c) for c in vec) for vec in self.sequence)
        object.__setattr__(self, "sequence", seq)
        mults = self.base.multiplicities
        if len(seq) != self.base.dimension + 1:
            raise PreconditionError(
                f"chain must have N+1 vectors, got {len(seq)} for N = "
                f"{self.base.dimension}"
            )
        if any(len(vec) != len(mults) for vec in seq):
            raise PreconditionError("chain vectors must match the source arity")
        if any(c != 0 for c in seq[0]):
            raise PreconditionError("chain must start at the zero vector")
        if seq[-1] != tuple(mults):
            raise PreconditionError("chain must end at the source multiplicities")
        for i, (prev, cur) in enumerate(zip(seq, seq[1:])):
            diffs = [c - p for p, c in zip(prev, cur)]
            if sorted(diffs) != [0] * (len(diffs) - 1) + [1]:
                raise PreconditionError(f"step {i} is not a unit increment")
            j = diffs.index(1)
            # nested fill: a coordinate may grow only once all earlier
            # ones are complete and no later one has started
            if any(prev[k] != mults[k] for k in range(j)) or any(
                prev[k] != 0 for k in range(j + 1, len(diffs))
            ):
                raise PreconditionError(f"step {i} breaks the nested fill order")
        if any(sum(vec) != i for i, vec in enumerate(seq)):
            raise PreconditionError("chain norms must step 0, 1, ..., N")

    @classmethod
    def nested(cls, source) -> "MultiplicityChain":
        source = _as_source(source)
        vec = [0] * len(source.multiplicities)
        seq = [tuple(vec)]
        for j, m in enumerate(source.multiplicities):
            for _ in range(m):
                vec[j] += 1
                seq.append(tuple(vec))
        return cls(base=source, sequence=tuple(seq))


def _check_m_vec(source: SourceSpectrum, m_vec) -> tuple:
    m = tuple(int(c) for c in m_vec)
    if len(m) != len(source.locations):
        raise PreconditionError(
            f"multiplicity vector has arity {len(m)}, source has "
            f"{len(source.locations)}"
        )
    if any(c < 0 for c in m):
        raise PreconditionError("multiplicity vector entries must be >= 0")
    return m


def _default_loop(source: SourceSpectrum, tau: float):
    locs = source.locations
    n = source.dimension
    center = 0.5 * (locs[0] + locs[-1])
    s = max(1.0, math.sqrt(tau))
    # keep the loop height at the heat-kernel width when that is the
    # smaller: the Gaussian grows like e^{N ry^2 / 2 tau} up the loop
    ry = min(0.75 * s, 3.0 * math.sqrt(2.0 * tau / n))
    rx = 0.5 * (locs[-1] - locs[0]) + 0.75 * s
    return ((center, rx, ry),)


def _check_enclosure(source: SourceSpectrum, pieces):
    for a in source.locations:
        inside = sum(
            1 for c, rx, ry in pieces if ((a - c) / rx) ** 2 < 1.0
        )
        if inside != 1:
            raise ConfigurationError(
                f"loop must wind once around every source; eigenvalue {a} is "
                f"inside {inside} pieces"
            )


def _loop_trapezoid(f, pieces, rtol=1e-10):
    """Clockwise loop integral over ellipse pieces, periodic trapezoid.

    Spectrally accurate for integrands analytic near the loop; node
    count doubles until the value settles. The zero floor comes from
    the largest integrand magnitude seen, so an entire integrand
    converges to its exact zero instead of chasing relative error.
    """
    previous = None
    m = 128
    while m <= 16384:
        total = 0.0 + 0.0j
        scale = 0.0
        for c, rx, ry in pieces:
            t = 2.0 * math.pi * np.arange(m) / m
            u = c + rx * np.cos(t) - 1j * ry * np.sin(t)
            du = -rx * np.sin(t) - 1j * ry * np.cos(t)
            vals = f(u) * du
            scale = max(scale, float(np.max(np.abs(vals))) * 2.0 * math.pi)
            total += np.sum(vals) * (2.0 * math.pi / m)
        if previous is not None:
            if abs(total - previous) <= rtol * abs(total) + 1e-13 * scale:
                return total
        previous = total
        m *= 2
    raise ConvergenceError(
        "loop quadrature did not settle; the integrand is probably too "
        "sharp for the loop height",
        best=previous,
    )


def theta_fn(source, m_vec, tau: float, x: float, *, loop=None) -> complex:
    """Type-I transform: clockwise loop integral of the heat kernel
    against theta_0(u) = prod (u - a_i)^{-m_i}.

    For real x this is the jump of the corresponding inverse
    characteristic polynomial across the axis. The full source
    dimension N sets the heat kernel width even when |m| < N. The loop
    is a sequence of (center, rx, ry) ellipse pieces, each clockwise,
    jointly winding once around every source.
    """
    source = _as_source(source)
    m = _check_m_vec(source, m_vec)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    x = float(x)
    n = source.dimension
    pieces = tuple(loop) if loop is not None else _default_loop(source, tau)
    _check_enclosure(source, pieces)
    locs = np.array(source.locations)
    powers = np.array(m)

    def integrand(u):
        base = u[:, None] - locs[None, :]
        return np.exp(
            -n * (u - x) ** 2 / (2.0 * tau)
            - np.sum(powers[None, :] * np.log(base), axis=1)
        )

    prefactor = math.sqrt(n / (2.0 * math.pi * tau))
    return prefactor * _loop_trapezoid(integrand, pieces)


def pi_fn(source, m_vec, tau: float, x: float) -> complex:
    """Type-II transform: the heat flow of prod (x - a_i)^{m_i}.

    A Gauss quadrature that is exact, not approximate: the rotated
    integrand is a polynomial in the integration variable, so a rule
    of matching degree integrates it without truncation error. The
    result is the monic degree-|m| member of the family, with the full
    source dimension N in the heat kernel.
    """
    source = _as_source(source)
    m = _check_m_vec(source, m_vec)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    x = float(x)
    total = sum(m)
    if total == 0:
        return 1.0 + 0.0j
    n = source.dimension
    nodes, weights = np.polynomial.hermite.hermgauss(total // 2 + 2)
    s = math.sqrt(2.0 * tau / n)
    zeta = x - 1j * s * nodes
    vals = np.ones_like(zeta)
    for a, mi in zip(source.locations, m):
        vals = vals * (zeta - a) ** mi
    return complex(np.sum(weights * vals) / math.sqrt(math.pi))


def kernel(source, tau: float, x: float, y: float, *, loop=None) -> complex:
    """Finite-N kernel as the chain sum of Theta and Pi pairs.

    K_N(x, y) = sum_i Theta_{chain[i+1]}(x) Pi_{chain[i]}(y) over the
    nested multiplicity chain. Terms vary over orders of magnitude, so
    they are accumulated pairwise rather than left to right.
    """
    source = _as_source(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    chain = MultiplicityChain.nested(source).sequence
    n = source.dimension
    terms = np.array(
        [
            theta_fn(source, chain[i + 1], tau, x, loop=loop)
            * pi_fn(source, chain[i], tau, y)
            for i in range(n)
        ]
    )
    return complex(np.sum(terms))


def _gl_panels(half_width: float, panels: int):
    nodes, weights = np.polynomial.legendre.leggauss(16)
    edges = np.linspace(-half_width, half_width, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1] - edges[0])
    t = (mid[:, None] + half * nodes[None, :]).ravel()
    w = np.broadcast_to(half * weights[None, :], (panels, 16)).ravel()
    return t, w


def kernel_bh(a: float, n: int, tau: float, x: float, y: float, *, loop=None) -> complex:
    """Closed-form double integral for the symmetric two-source kernel.

    K(x, y) = -(N/2 pi tau) loop du integral dq
              [(-q^2-a^2)^{N/2} / (u^2-a^2)^{N/2}] (1/(u+iq))
              e^{-N(u-x)^2/2tau - N(q-iy)^2/2tau}.

    The identity behind it (see `source_sum_identity`) splits the
    chain sum as 1/(u+iq) minus this ratio term; the split is only
    valid when the standalone 1/(u+iq) piece integrates to zero, i.e.
    when the u-loop never meets the imaginary axis where its pole
    u = -iq lives for real q. The default loop is therefore a pair of
    clockwise circles of radius a/2 around each source, which keeps
    |Re u| >= a/2 everywhere. The q-line additionally bends away from
    the pole at q = iu by a fixed imaginary shift, legal because the
    shift never crosses it (the sign is chosen per u), so the double
    integrand stays uniformly smooth down to very small a.
    """
    if a <= 0:
        raise PreconditionError(f"source separation must be > 0, got {a}")
    if n < 2 or n % 2:
        raise PreconditionError(f"dimension must be even and >= 2, got {n}")
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    x = float(x)
    y = float(y)
    half = n // 2
    pieces = (
        tuple(loop)
        if loop is not None
        else ((-a, 0.5 * a, 0.5 * a), (a, 0.5 * a, 0.5 * a))
    )
    _check_enclosure(SourceSpectrum.symmetric_pair(a, n), pieces)
    shift = 0.5 * math.sqrt(2.0 * tau / n)
    hw = math.sqrt(92.0 * tau / n) + 2.0 * (shift + abs(y)) + a + 1.0

    def level_value(m_u: int, panels: int) -> complex:
        q0, wq = _gl_panels(hw, panels)
        total = 0.0 + 0.0j
        for c, rx, ry in pieces:
            t = 2.0 * math.pi * np.arange(m_u) / m_u
            u = c + rx * np.cos(t) - 1j * ry * np.sin(t)
            du = (-rx * np.sin(t) - 1j * ry * np.cos(t)) * (2.0 * math.pi / m_u)
            for start in range(0, m_u, 64):
                ub = u[start : start + 64, None]
                q = q0[None, :] - 1j * shift * np.sign(ub.real)
                denom = ub + 1j * q
                if np.min(np.abs(denom)) < 1e-6:
                    raise ConfigurationError(
                        "loop comes within 1e-6 of the inner pole u = -iq; "
                        "choose loop pieces that keep clear of the "
                        "imaginary axis"
                    )
                ratio = (-q * q - a * a) ** half / (ub * ub - a * a) ** half
                gauss = np.exp(
                    -n * (ub - x) ** 2 / (2.0 * tau)
                    - n * (q - 1j * y) ** 2 / (2.0 * tau)
                )
                total += np.sum(
                    du[start : start + 64, None] * wq[None, :] * ratio * gauss / denom
                )
        return total

    previous = None
    m_u, panels = 64, 24
    for _ in range(5):
        value = level_value(m_u, panels)
        if previous is not None and abs(value - previous) <= 1e-9 * abs(value) + 1e-250:
            return complex(-n / (2.0 * math.pi * tau) * value)
        previous = value
        m_u *= 2
        panels *= 2
    raise ConvergenceError(
        "double quadrature did not settle; try a taller or wider loop",
        best=previous,
    )


def source_sum_identity(q, u, a: float, n: int):
    """Both sides of the chain-sum telescope for the symmetric pair.

    lhs is the literal double geometric sum over the nested chain,
    rhs the closed form

        (1/(u+iq)) (1 - (-q^2-a^2)^{N/2} / (u^2-a^2)^{N/2}).

    Returned as a pair so tests difference them; nothing is asserted
    here.
    """
    if a <= 0:
        raise PreconditionError(f"source separation must be > 0, got {a}")
    if n < 2 or n % 2:
        raise PreconditionError(f"dimension must be even and >= 2, got {n}")
    q = complex(q)
    u = complex(u)
    if u == a or u == -a or u == -1j * q:
        raise DomainError(f"(q, u) = ({q}, {u}) sits on a pole of the identity")
    half = n // 2
    s1 = sum((-1j * q - a) ** j / (u - a) ** (j + 1) for j in range(half))
    s2 = ((-1j * q - a) / (u - a)) ** half * sum(
        (-1j * q + a) ** j / (u + a) ** (j + 1) for j in range(half)
    )
    lhs = s1 + s2
    rhs = (1.0 / (u + 1j * q)) * (
        1.0 - (-q * q - a * a) ** half / (u * u - a * a) ** half
    )
    return complex(lhs), complex(rhs)
