"""Complex contour quadrature with overflow-safe accumulation.

All the transform evaluations in this package reduce to integrals of
strongly peaked analytic functions along deformable paths: truncated
straight lines with Gaussian decay, closed loops around pole clusters,
and pairs of rays meeting at a saddle point. Three contour shapes cover
every case:

    line   -- straight segment through a point, trapezoid rule.
              Spectrally accurate for analytic integrands decaying at
              the truncation points.
    loop   -- ellipse, periodic trapezoid rule. Spectrally accurate for
              integrands analytic in an annulus around the path.
    rays   -- a chain: entry ray from infinity, optional straight
              segments, exit ray to infinity. Gauss-Legendre on each
              leg, which handles the one-sided peak a ray anchored at a
              saddle produces (plain trapezoid only reaches h^2 there
              because of the corner).

Node counts double until two successive evaluations agree to a relative
tolerance; the last disagreement is the reported error estimate. Sums
are accumulated through scaled_sum, so integrands may reach exp(+-1e6)
as long as they are supplied in (log magnitude, mantissa) form.

A separate Gauss-Hermite rule with weights carried in log form supports
the exact finite-node realizations of heat evolution on polynomials; at
large node counts the extreme classical weights underflow doubles, so
they are reconstructed from a scale-carried three-term recurrence.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, roots_hermite

from .errors import ConvergenceError, PreconditionError
from .logscale import ScaledComplex, scaled_sum

__all__ = [
    "ContourSpec",
    "QuadratureResult",
    "contour_quadrature",
    "gauss_hermite_log",
]

_NEG_INF = float("-inf")


# ===== quadrature rules ====================================================


_GL_ORDER = 16


@lru_cache(maxsize=8)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_nodes(n_total: int):
    """Composite Gauss-Legendre on [0, 1]: fixed order, doubled panels.

    Single-panel rules of growing order would need eigendecompositions
    of matching size; fixed-order panels keep cost linear in the node
    count while the composite rule still converges at order 2*_GL_ORDER.
    """
    panels = max(1, n_total // _GL_ORDER)
    x, w = _leggauss(_GL_ORDER)
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


@lru_cache(maxsize=32)
def gauss_hermite_log(n: int):
    """Gauss-Hermite nodes with log weights, usable at any order.

    Returns (nodes, log_weights) for the rule

        integral exp(-s^2) g(s) ds  ~=  sum_k exp(log_w_k) g(s_k),

    exact for polynomials g of degree <= 2n-1. The classical weights
    underflow double precision once the extreme nodes pass |s| ~ 27, so
    the weights are rebuilt from

        w_k = 2^(n-1) n! sqrt(pi) / (n^2 H_{n-1}(s_k)^2)

    with log|H_{n-1}(s_k)| obtained by running the three-term recurrence
    H_{k+1} = 2s H_k - 2k H_{k-1} in carried-scale form.
    """
    if n < 1:
        raise PreconditionError(f"Gauss-Hermite order must be >= 1, got {n}")
    if n <= 300:
        # The eigenvalue-method weights are the most accurate available
        # in doubles (~3e-14) and stay inside the exponent range here.
        nodes, w = np.polynomial.hermite.hermgauss(n)
        return nodes, np.log(w)
    nodes, _ = roots_hermite(n)
    if n == 1:
        return nodes, np.array([0.5 * math.log(math.pi)])
    # H_k(s) = sign * exp(L); consecutive Hermite polynomials share no
    # zeros, so the max of the two scales is always finite.
    s = nodes
    l_prev = np.zeros_like(s)
    m_prev = np.ones_like(s)
    with np.errstate(divide="ignore"):
        l_cur = np.log(np.abs(2.0 * s))
    m_cur = np.sign(2.0 * s)
    for k in range(1, n - 1):
        base = np.maximum(l_cur, l_prev)
        t = 2.0 * s * m_cur * np.exp(l_cur - base) - 2.0 * k * m_prev * np.exp(
            l_prev - base
        )
        l_prev, m_prev = l_cur, m_cur
        with np.errstate(divide="ignore"):
            l_cur = base + np.log(np.abs(t))
        m_cur = np.sign(t)
    log_w = (
        (n - 1) * math.log(2.0)
        + gammaln(n + 1)
        + 0.5 * math.log(math.pi)
        - 2.0 * math.log(n)
        - 2.0 * l_cur
    )
    return nodes, log_w


# ===== contour descriptions ================================================


@dataclass(frozen=True)
class ContourSpec:
    """Geometric description of an integration path.

    Build instances through the constructors; the fields mean different
    things per kind and are not meant to be filled by hand.
    """

    kind: str
    point: complex = 0j
    direction: complex = 1 + 0j
    half_width: float = 0.0
    semi_axes: tuple = (1.0, 1.0)
    orientation: int = 1
    angles: tuple = ()
    radii: tuple = ()
    vertices: tuple = ()

    @staticmethod
    def shifted_line(point, half_width, direction=1 + 0j) -> "ContourSpec":
        """Straight path point + direction*t, t in [-half_width, half_width].

        direction is normalized; the integrand must have decayed at both
        ends of the window for the trapezoid rule to keep spectral
        accuracy.
        """
        d = complex(direction)
        if d == 0:
            raise PreconditionError("line direction must be nonzero")
        if half_width <= 0:
            raise PreconditionError(f"half_width must be > 0, got {half_width}")
        return ContourSpec(
            kind="line",
            point=complex(point),
            direction=d / abs(d),
            half_width=float(half_width),
        )

    @staticmethod
    def closed_loop(center, semi_axes, orientation=1) -> "ContourSpec":
        """Ellipse around center; orientation +1 counterclockwise, -1 clockwise."""
        p, q = semi_axes
        if p <= 0 or q <= 0:
            raise PreconditionError(f"semi-axes must be positive, got {semi_axes}")
        if orientation not in (1, -1):
            raise PreconditionError(f"orientation must be +-1, got {orientation}")
        return ContourSpec(
            kind="loop",
            point=complex(center),
            semi_axes=(float(p), float(q)),
            orientation=int(orientation),
        )

    @staticmethod
    def ray_pair(vertex, angle_in, angle_out, radii) -> "ContourSpec":
        """Path from infinity*e^{i angle_in} into vertex, out to infinity*e^{i angle_out}.

        radii gives the truncation length of each ray, chosen by the
        caller from the known decay of the integrand.
        """
        return ContourSpec.ray_chain((vertex,), angle_in, angle_out, radii)

    @staticmethod
    def ray_chain(vertices, angle_in, angle_out, radii) -> "ContourSpec":
        """Entry ray to vertices[0], straight segments, exit ray from vertices[-1]."""
        verts = tuple(complex(v) for v in vertices)
        if not verts:
            raise PreconditionError("ray chain needs at least one vertex")
        r_in, r_out = radii
        if r_in <= 0 or r_out <= 0:
            raise PreconditionError(f"ray radii must be positive, got {radii}")
        return ContourSpec(
            kind="rays",
            angles=(float(angle_in), float(angle_out)),
            radii=(float(r_in), float(r_out)),
            vertices=verts,
        )

    def legs(self):
        """Decompose into ('seg', z0, z1) and ('ray', vertex, angle, R, sign)."""
        if self.kind != "rays":
            raise PreconditionError(f"legs() only applies to ray chains, not {self.kind}")
        out = [("ray", self.vertices[0], self.angles[0], self.radii[0], -1)]
        for z0, z1 in zip(self.vertices, self.vertices[1:]):
            out.append(("seg", z0, z1))
        out.append(("ray", self.vertices[-1], self.angles[1], self.radii[1], +1))
        return out


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a contour integral plus how much to trust it.

    error_estimate is relative: the change in the last node doubling,
    floored by the size of the largest truncated tail sample. A value of
    exactly 0 means successive refinements agreed to all carried digits.
    cancellation is log(largest node term / result): the node sum loses
    about cancellation/ln(10) decimal digits, so exp(cancellation) times
    machine epsilon bounds the reachable relative accuracy.
    """

    value: ScaledComplex
    error_estimate: float
    nodes_used: int
    cancellation: float = 0.0

    def to_complex(self) -> complex:
        return self.value.to_complex()


# ===== node generation =====================================================


def _line_nodes(spec: ContourSpec, m: int):
    t = np.linspace(-spec.half_width, spec.half_width, m)
    h = 2.0 * spec.half_width / (m - 1)
    w = np.full(m, h, dtype=complex) * spec.direction
    w[0] *= 0.5
    w[-1] *= 0.5
    return spec.point + spec.direction * t, w, np.array([0, m - 1])


def _loop_nodes(spec: ContourSpec, m: int):
    p, q = spec.semi_axes
    th = np.arange(m) * (2.0 * math.pi / m)
    z = spec.point + p * np.cos(th) + 1j * q * np.sin(th)
    dz = -p * np.sin(th) + 1j * q * np.cos(th)
    w = dz * (2.0 * math.pi / m) * spec.orientation
    return z, w, np.array([], dtype=int)


def _rays_nodes(spec: ContourSpec, m: int):
    x, wx = _panel_nodes(m)
    k = x.size
    pts, wts, ends = [], [], []
    offset = 0
    for leg in spec.legs():
        if leg[0] == "seg":
            _, z0, z1 = leg
            pts.append(z0 + (z1 - z0) * x)
            wts.append(wx * (z1 - z0))
        else:
            _, v, ang, radius, sign = leg
            e = cmath.exp(1j * ang)
            pts.append(v + e * radius * x)
            wts.append(wx * radius * e * sign)
            ends.append(offset + k - 1)
        offset += k
    return np.concatenate(pts), np.concatenate(wts), np.array(ends, dtype=int)


_BUILDERS = {"line": _line_nodes, "loop": _loop_nodes, "rays": _rays_nodes}
_START = {"line": 65, "loop": 64, "rays": 48}


# ===== engine ==============================================================


def _evaluate(integrand, pts, scaled):
    if scaled:
        log_mag, mant = integrand(pts)
        return np.asarray(log_mag, dtype=float), np.asarray(mant, dtype=complex)
    with np.errstate(under="ignore"):
        v = np.asarray(integrand(pts), dtype=complex)
    # Complex division by a subnormal magnitude overflows inside numpy,
    # so anything below the normal range is dropped outright; in the
    # plain protocol such nodes are >300 decades under the peak anyway.
    mag = np.abs(v)
    ok = mag > 1e-300
    safe = np.where(ok, mag, 1.0)
    log_mag = np.where(ok, np.log(safe), _NEG_INF)
    mant = np.where(ok, v / safe, 0j)
    return log_mag, mant


def contour_quadrature(
    spec: ContourSpec,
    integrand,
    *,
    scaled: bool = False,
    rtol: float = 1e-12,
    max_nodes: int = 1 << 17,
    start_nodes: int | None = None,
    strict: bool = False,
) -> QuadratureResult:
    """Integrate along a contour with node doubling until self-consistent.

    Parameters
    ----------
    spec : ContourSpec
        Path to integrate along.
    integrand : callable
        Vectorized. Either pts -> complex values, or with scaled=True
        pts -> (log_magnitude, mantissa) arrays for integrands outside
        double range.
    scaled : bool
        Select the (log, mantissa) integrand protocol.
    rtol : float
        Target relative agreement between successive node doublings.
    max_nodes : int
        Refinement stops once the next doubling would exceed this.
    start_nodes : int, optional
        Initial resolution; defaults per contour kind.
    strict : bool
        Raise ConvergenceError instead of returning a result whose
        error_estimate missed rtol.
    """
    try:
        build = _BUILDERS[spec.kind]
    except KeyError:
        raise PreconditionError(f"unknown contour kind {spec.kind!r}") from None
    m = start_nodes or _START[spec.kind]
    prev = None
    best_rel = math.inf
    stagnant = 0
    while True:
        pts, wts, end_idx = build(spec, m)
        log_mag, mant = _evaluate(integrand, pts, scaled)
        value = scaled_sum(log_mag, mant, wts)

        with np.errstate(divide="ignore"):
            term_log = log_mag + np.log(np.abs(wts))
        peak_term = float(np.max(term_log))
        cancel = 0.0
        if not value.is_zero and math.isfinite(peak_term):
            cancel = max(0.0, peak_term - value.abs_log())

        # Size of the largest sample at a truncation endpoint, relative
        # to the result: a floor on how much the cut tail can be trusted.
        tail = 0.0
        if end_idx.size and not value.is_zero:
            tail_log = float(np.max(term_log[end_idx])) - value.abs_log()
            tail = math.exp(min(tail_log, 700.0))

        if prev is not None:
            diff = value - prev
            if diff.is_zero:
                rel = 0.0
            elif value.is_zero:
                rel = math.inf
            else:
                rel = math.exp(min(diff.abs_log() - value.abs_log(), 700.0))
            estimate = max(rel, tail)
            if rel <= rtol:
                return QuadratureResult(value, estimate, len(pts), cancel)
            # Doubling a spectral rule should slash the disagreement;
            # when it stops doing so the remaining error is roundoff
            # (cancellation floor) and further nodes cannot help.
            if rel > 0.25 * best_rel:
                stagnant += 1
            else:
                stagnant = 0
            best_rel = min(best_rel, rel)
            if stagnant >= 2 or 2 * m > max_nodes:
                if strict:
                    raise ConvergenceError(
                        f"quadrature stalled at {len(pts)} nodes with relative "
                        f"estimate {estimate:.3e} (target {rtol:.1e})",
                        best=value,
                        achieved=estimate,
                    )
                return QuadratureResult(value, estimate, len(pts), cancel)
        prev = value
        m *= 2
