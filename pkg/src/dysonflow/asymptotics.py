"""Microscopic scaling limits at the spectral edge and at a closing gap.

Zoomed to the right scale, the transform pair loses all memory of the
start and collapses onto two universal special functions:

  * soft edge, window z = 2 sqrt(tau) + eta n^{-2/3}:

        pi_n    ~  tau^{n/2} sqrt(2 pi) n^{1/6} e^{ n/2 + eta n^{1/3}/sqrt(tau)} Ai(eta/sqrt(tau))
        theta_n ~  i tau^{-n/2} sqrt(2 pi) n^{1/6} e^{-n/2 - eta n^{1/3}/sqrt(tau)}
                     * w Ai(w eta/sqrt(tau)),        w = e^{-2 pi i/3}  (upper branch)

    with Ai the standard Airy function, Ai(0) = 3^{-2/3}/Gamma(2/3).
    The rotation w multiplies the argument AND the value: it is the
    Jacobian of turning the descent path into the Airy path, and the
    lower branch is the complex conjugate.

  * cusp of the symmetric +-a start, window z = eta n^{-3/4} at
    tau = a^2 + kappa n^{-1/2}:

        pi_n    ~  n^{1/4}/sqrt(2 pi) (ia)^{ n} P( kappa/2a^2,          eta/a)
        theta_n ~  n^{1/4}/sqrt(2 pi) (ia)^{-n} e^{i pi/4}
                                                P(i kappa/2a^2, e^{-i pi/4} eta/a)

    with P(x, y) = Int_R exp(-t^4/4 + x t^2 + i t y) dt the Pearcey
    integral, P(0,0) = sqrt(2) Gamma(1/4) / 2. Again theta picks up the
    path-rotation phases; the lower branch is the conjugate.

Both special functions are themselves computed by the package's contour
engine, on paths that mirror the descent structure of the finite-n
integrals. Window exponents are recorded as exact rationals: the offset
exponent alpha and the time exponent live on the family
spacing = n^{-k/(1+k)} with k = 2 at an edge and k = 3 at a cusp.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gamma as _gamma

from .contours import ContourSpec, contour_quadrature
from .errors import DomainError, PreconditionError
from .evaluators import acp, aicp, cusp_contour, edge_contour
from .logscale import ScaledComplex
from .sources import SourceSpectrum

__all__ = [
    "airy",
    "airy_series",
    "pearcey",
    "ScalingWindow",
    "spacing_exponent",
    "edge_window",
    "cusp_window",
    "acp_edge_profile",
    "acp_edge_limit",
    "aicp_edge_profile",
    "aicp_edge_limit",
    "acp_cusp_profile",
    "acp_cusp_limit",
    "aicp_cusp_profile",
    "aicp_cusp_limit",
    "pearcey_quarter",
]

_OMEGA = cmath.exp(2j * math.pi / 3)


# ===== Airy function by contour integration ================================


def _airy_radius(x_abs: float) -> float:
    # r^3/3 - |x| r >= 50, smallest such r, padded
    r = max(6.0, (150.0 + 3.0 * x_abs * 6.0) ** (1.0 / 3.0))
    for _ in range(40):
        f = r * r * r / 3.0 - x_abs * r - 50.0
        if f > 0:
            break
        r *= 1.3
    return 1.3 * r


def _airy_path(x: complex, vertex: complex, angle_in: float, angle_out: float) -> complex:
    radius = _airy_radius(abs(x) + abs(vertex) ** 2)
    spec = ContourSpec.ray_pair(vertex, angle_in, angle_out, (radius, radius))

    def integrand(t):
        w = 1j * (t * t * t / 3.0 + x * t)
        return w.real, np.exp(1j * w.imag)

    result = contour_quadrature(spec, integrand, scaled=True, rtol=1e-13)
    return result.to_complex() / (2.0 * math.pi)


def airy(x) -> complex:
    """Standard Airy function Ai via saddle-adapted contour integration.

    Ai(x) = (1/2 pi) Int exp(i (t^3/3 + x t)) dt over a path from
    infinity e^{5 i pi/6} to infinity e^{i pi/6}. Within |arg x| < pi/3
    the path bends through the single decaying saddle i sqrt(x) and
    every sample sits below the answer scale. Elsewhere both saddles
    matter, so the path runs ray - segment - ray through the two of
    them; for real negative x the whole middle segment has unit
    modulus, which is as well conditioned as an oscillatory integral
    gets. Tiny |x| keeps the plain path through the origin.

    Real x comes back real (Schwarz symmetry). |x| > 30 is refused:
    out there the exponent swings past what the node budget resolves,
    and the asymptotic expansions are the right tool anyway.
    """
    x = complex(x)
    if abs(x) > 30.0:
        raise DomainError(
            f"|x| = {abs(x):.3g} is past the quadrature range (30); "
            "use the asymptotic regime instead"
        )
    value = _airy_dispatch(x)
    return value.real if x.imag == 0.0 else value


def _airy_dispatch(x: complex) -> complex:
    if abs(x) < 0.7:
        return _airy_path(x, 0j, 5.0 * math.pi / 6.0, math.pi / 6.0)
    if abs(cmath.phase(x)) <= math.pi / 3.0 + 0.02:
        vertex = 1j * cmath.sqrt(x)
        return _airy_path(x, vertex, 5.0 * math.pi / 6.0, math.pi / 6.0)
    s_plus = 1j * cmath.sqrt(x)
    s_minus = -s_plus
    left, right = (s_plus, s_minus) if s_plus.real <= s_minus.real else (s_minus, s_plus)
    radius = _airy_radius(abs(x) + abs(s_plus) ** 2)
    spec = ContourSpec.ray_chain(
        (left, right), 5.0 * math.pi / 6.0, math.pi / 6.0, (radius, radius)
    )

    def integrand(t):
        w = 1j * (t * t * t / 3.0 + x * t)
        return w.real, np.exp(1j * w.imag)

    result = contour_quadrature(spec, integrand, scaled=True, rtol=1e-13)
    return result.to_complex() / (2.0 * math.pi)


def airy_series(x, terms: int = 120) -> complex:
    """Maclaurin evaluation Ai = c1 f - c2 g; reference for small |x|.

    f and g are the standard regular solutions with f(0)=g'(0)=1; the
    series converges everywhere but loses digits past |x| ~ 8, which is
    exactly why the contour route exists. Kept as an independent check.
    """
    x = complex(x)
    c1 = 3.0 ** (-2.0 / 3.0) / _gamma(2.0 / 3.0)
    c2 = 3.0 ** (-1.0 / 3.0) / _gamma(1.0 / 3.0)
    f_term, g_term = 1.0 + 0j, x
    f_sum, g_sum = f_term, g_term
    x3 = x * x * x
    for k in range(1, terms):
        f_term = f_term * x3 * (3.0 * k - 2.0) / ((3.0 * k) * (3.0 * k - 1.0) * (3.0 * k - 2.0))
        g_term = g_term * x3 * (3.0 * k - 1.0) / ((3.0 * k + 1.0) * (3.0 * k) * (3.0 * k - 1.0))
        f_sum += f_term
        g_sum += g_term
        if abs(f_term) + abs(g_term) < 1e-18 * (abs(f_sum) + abs(g_sum) + 1.0):
            break
    return c1 * f_sum - c2 * g_sum


def _airy_rotated(x: complex, side: int) -> complex:
    """w Ai(w x) with w = e^{-2 pi i/3 * side}, as one direct contour.

    Rotating the integration variable absorbs both the Jacobian and the
    prefactor: for side=+1 the result is (1/2 pi) times the integral of
    e^{i(s^3/3 + x s)} from infinity e^{i pi/6} to infinity e^{-i pi/2}.
    Direct evaluation avoids composing two separately computed factors.
    """
    if side >= 0:
        return _airy_path(x, 0j, math.pi / 6.0, -math.pi / 2.0)
    # t = e^{+2 pi i/3} s maps the defining path to these two sectors;
    # mirroring the upper angles instead would enter through a growth
    # sector of the rotated exponent
    return _airy_path(x, 0j, -math.pi / 2.0, 5.0 * math.pi / 6.0)


# ===== Pearcey integral ====================================================


def _pearcey_radius(x, y) -> float:
    m = max(abs(x), abs(y), 1.0)
    return 8.0 + 2.0 * math.sqrt(m) + 1.5 * m ** (1.0 / 3.0)


def pearcey(x, y, *, route: str = "line") -> complex:
    """Pearcey integral P(x, y) = Int_R exp(-t^4/4 + x t^2 + i t y) dt.

    Entire in both arguments; P(0, 0) = sqrt(2) Gamma(1/4) / 2. Two
    interchangeable discretizations are kept deliberately: "line" is
    the trapezoid rule on the real axis, "rays" tilts the two half
    lines by pi/12 inside the decay wedge and uses Gauss-Legendre. They
    share no nodes or weights, which makes their agreement a meaningful
    cross-check.
    """
    x, y = complex(x), complex(y)
    radius = _pearcey_radius(x, y)

    def integrand(t):
        w = -(t**4) / 4.0 + x * t * t + 1j * t * y
        return w.real, np.exp(1j * w.imag)

    if route == "line":
        spec = ContourSpec.shifted_line(0j, radius)
    elif route == "rays":
        tilt = math.pi / 12.0
        spec = ContourSpec.ray_pair(0j, math.pi - tilt, tilt, (radius, radius))
    else:
        raise PreconditionError(f"unknown pearcey route {route!r}")
    result = contour_quadrature(spec, integrand, scaled=True, rtol=1e-13)
    return result.to_complex()


def pearcey_quarter(x, y, *, side: int = 1) -> complex:
    """Quarter-turn companion of the Pearcey integral.

    Same integrand exp(-t^4/4 + x t^2 + i t y), but integrated along a
    quarter turn between adjacent decay wedges of t^4 instead of across
    the real line: side=+1 runs from infinity e^{i pi/2} through 0 out
    to +infinity, side=-1 from -infinity through 0 down to infinity
    e^{-i pi/2}. These contours are homologically independent of the
    real line, so this is not a rotation of pearcey(); it is the class
    the reciprocal transform selects at a closing gap, where the path
    must enter and leave through the same half plane. Splicing two
    quarter turns recovers the full line:

        pearcey_quarter(x, y) + i*pearcey_quarter(-x, i*y) = pearcey(x, y).
    """
    x, y = complex(x), complex(y)
    radius = _pearcey_radius(x, y)

    def integrand(t):
        w = -(t**4) / 4.0 + x * t * t + 1j * t * y
        return w.real, np.exp(1j * w.imag)

    if side >= 0:
        spec = ContourSpec.ray_pair(0j, math.pi / 2.0, 0.0, (radius, radius))
    else:
        spec = ContourSpec.ray_pair(0j, math.pi, -math.pi / 2.0, (radius, radius))
    result = contour_quadrature(spec, integrand, scaled=True, rtol=1e-13)
    return result.to_complex()


# ===== scaling windows =====================================================


def spacing_exponent(k: int) -> Fraction:
    """Exponent of the natural spacing n^(-k/(1+k)) at a k-fold merge."""
    if k < 2:
        raise DomainError(
            f"merge order must be >= 2 (k=2 edge, k=3 gap closure), got {k}"
        )
    return Fraction(-k, 1 + k)


_WINDOW_ORDERS = {"airy-edge": 2, "pearcey-cusp": 3}


@dataclass(frozen=True)
class ScalingWindow:
    """A microscopic window around a degenerate point of the flow.

    Pins the base point (z_c, tau_c), the matrix size, and the exact
    rational exponents: z = z_c + eta n^alpha, the special-function
    coordinate carries n^beta, and gamma (cusp only) scales the time
    offset tau = tau_c + kappa n^gamma. The exponents are not free:
    alpha (1 + k) = -k and beta = alpha / k = -(1 + alpha), with merge
    order k = 2 at an edge and k = 3 at a gap closure.
    """

    kind: str
    n: int
    z_c: float
    tau_c: float
    alpha: Fraction
    beta: Fraction
    gamma: Fraction | None = None

    def __post_init__(self):
        if self.kind not in _WINDOW_ORDERS:
            raise PreconditionError(
                f"kind must be one of {sorted(_WINDOW_ORDERS)}, got {self.kind!r}"
            )
        if self.n < 1:
            raise PreconditionError(f"matrix size must be >= 1, got {self.n}")
        if self.tau_c <= 0:
            raise PreconditionError(f"base time must be > 0, got {self.tau_c}")
        k = self.k
        if self.alpha != spacing_exponent(k) or self.alpha * (1 + k) != -k:
            raise PreconditionError(
                f"offset exponent {self.alpha} breaks alpha(1+k) = -k at k={k}"
            )
        if self.beta != self.alpha / k or self.beta != -(1 + self.alpha):
            raise PreconditionError(
                f"coordinate exponent {self.beta} breaks beta = alpha/k = -(1+alpha)"
            )
        if self.kind == "airy-edge" and self.gamma is not None:
            raise PreconditionError("an edge window does not pin the time offset")
        if self.kind == "pearcey-cusp" and self.gamma != Fraction(-1, 2):
            raise PreconditionError(
                f"a gap window scales its time offset as n^(-1/2), got {self.gamma}"
            )

    @property
    def k(self) -> int:
        """Merge order behind the exponents: 2 at an edge, 3 at a gap."""
        return _WINDOW_ORDERS[self.kind]


def edge_window(n: int, tau: float) -> ScalingWindow:
    """Soft-edge window at z_c = 2 sqrt(tau): spacing n^(-2/3)."""
    return ScalingWindow(
        "airy-edge", n, 2.0 * math.sqrt(tau), tau, Fraction(-2, 3), Fraction(-1, 3)
    )


def cusp_window(n: int, a: float) -> ScalingWindow:
    """Gap-closing window at the origin of the +-a source, tau_c = a^2."""
    return ScalingWindow(
        "pearcey-cusp",
        n,
        0.0,
        a * a,
        Fraction(-3, 4),
        Fraction(-1, 4),
        Fraction(-1, 2),
    )


# ===== finite-n profiles against their limits ==============================


def _require_off_axis(eta: complex):
    if eta.imag == 0:
        raise DomainError(
            "the reciprocal transform has no value on the axis; "
            "give the window coordinate a small imaginary part"
        )


_SIDE_SIGNS = {"upper": 1, "lower": -1}
_SIDE_LIFT = 0.01


def _lift_window_point(eta, side: str) -> complex:
    """Move a window coordinate off the axis toward the requested branch.

    Real coordinates get a fixed +-0.01i nudge in window units. The
    nudge must live in the window, not in z: a fixed Im z would blow up
    under the n^{-alpha} magnification and drag the special-function
    argument off to infinity with n.
    """
    if side not in _SIDE_SIGNS:
        raise PreconditionError(f"side must be 'upper' or 'lower', got {side!r}")
    sign = _SIDE_SIGNS[side]
    eta = complex(eta)
    if eta.imag == 0.0:
        return complex(eta.real, sign * _SIDE_LIFT)
    if eta.imag * sign < 0.0:
        raise PreconditionError(
            f"window coordinate {eta} lies on the opposite branch to side={side!r}"
        )
    return eta


def _acp_edge_rescaled(eta, tau: float, n: int) -> complex:
    """pi_n at z = 2 sqrt(tau) + eta n^{-2/3}, divided by its edge prefactor.

    The remaining profile converges to Ai(eta/sqrt(tau)) at rate n^{-1/3}.
    """
    eta = complex(eta)
    z = 2.0 * math.sqrt(tau) + eta * n ** (-2.0 / 3.0)
    value = acp(n, tau, z, method="recurrence").scaled
    log_pref = (
        0.5 * n * math.log(tau)
        + 0.5 * math.log(2.0 * math.pi)
        + math.log(n) / 6.0
        + 0.5 * n
    )
    pref = ScaledComplex.exp(complex(log_pref) + eta * n ** (1.0 / 3.0) / math.sqrt(tau))
    return (value / pref).to_complex()


def acp_edge_limit(eta, tau: float) -> complex:
    return airy(complex(eta) / math.sqrt(tau))


def acp_edge_profile(n: int, tau: float, etas) -> list[tuple]:
    """Edge scan of pi_n against its Airy limit.

    Each window coordinate eta lands at z = 2 sqrt(tau) + eta n^{-2/3};
    the value is stripped of the edge prefactor in log space and paired
    with Ai(eta/sqrt(tau)). Returns (eta, rescaled, limit) triples; for
    real eta the limit is real. The gap closes like n^{-1/3}, and only
    through the combination eta/sqrt(tau).
    """
    return [
        (eta, _acp_edge_rescaled(eta, tau, n), acp_edge_limit(eta, tau))
        for eta in etas
    ]


def _aicp_edge_rescaled(eta, tau: float, n: int) -> complex:
    """theta_n at z = 2 sqrt(tau) + eta n^{-2/3}, over its edge prefactor.

    Branch chosen by sign(Im eta). Converges to aicp_edge_limit(eta, tau)
    at rate n^{-1/3}; evaluated on the bent descent contour, which keeps
    every node at or below the answer scale regardless of n.
    """
    eta = complex(eta)
    _require_off_axis(eta)
    side = 1 if eta.imag > 0 else -1
    z = 2.0 * math.sqrt(tau) + eta * n ** (-2.0 / 3.0)
    value = aicp(n, tau, z, contour=edge_contour(tau, side)).scaled
    log_pref = (
        -0.5 * n * math.log(tau)
        + 0.5 * math.log(2.0 * math.pi)
        + math.log(n) / 6.0
        - 0.5 * n
    )
    pref = ScaledComplex.exp(
        complex(log_pref) - eta * n ** (1.0 / 3.0) / math.sqrt(tau)
    ) * ScaledComplex.from_complex(1j * side)
    return (value / pref).to_complex()


def aicp_edge_profile(n: int, tau: float, etas, side: str = "upper") -> list[tuple]:
    """Edge scan of theta_n against the rotated-Airy limit.

    Real coordinates are lifted off the axis by +-0.01i toward the
    requested branch; the lifted coordinate is what comes back in the
    (eta, rescaled, limit) triple, with both members evaluated there,
    so the comparison is like against like. Upper and lower scans are
    complex conjugates of one another. Rate n^{-1/3}.
    """
    out = []
    for eta in etas:
        lifted = _lift_window_point(eta, side)
        out.append(
            (lifted, _aicp_edge_rescaled(lifted, tau, n), aicp_edge_limit(lifted, tau))
        )
    return out


def aicp_edge_limit(eta, tau: float) -> complex:
    """Rotated Airy limit w Ai(w eta/sqrt(tau)), w = e^{-2 pi i/3 sign(Im eta)}."""
    eta = complex(eta)
    _require_off_axis(eta)
    side = 1 if eta.imag > 0 else -1
    return _airy_rotated(eta / math.sqrt(tau), side)


def _acp_cusp_rescaled(eta, kappa: float, a: float, n: int) -> complex:
    """pi_n at z = eta n^{-3/4}, tau = a^2 + kappa n^{-1/2}, over the prefactor.

    Converges to P(kappa/2a^2, eta/a) at rate n^{-1/2}. The +-a source
    needs even n; the evaluation runs through the even-coefficient heat
    series, which has no cancellation in this window.
    """
    eta = complex(eta)
    if n % 2:
        raise PreconditionError(f"symmetric cusp needs even n, got {n}")
    tau = a * a + kappa / math.sqrt(n)
    if tau <= 0:
        raise DomainError(f"time offset kappa={kappa} drives tau nonpositive")
    z = eta * n ** (-3.0 / 4.0)
    src = SourceSpectrum.symmetric_pair(a, n)
    value = acp(src, tau, z, method="series").scaled
    # (ia)^n = (-1)^(n/2) a^n for even n
    sign = -1.0 if (n // 2) % 2 else 1.0
    pref = ScaledComplex.from_log(
        0.25 * math.log(n) - 0.5 * math.log(2.0 * math.pi) + n * math.log(a),
        sign + 0j,
    )
    return (value / pref).to_complex()


def acp_cusp_limit(eta, kappa: float, a: float) -> complex:
    return pearcey(kappa / (2.0 * a * a), complex(eta) / a)


def acp_cusp_profile(n: int, a: float, kappas, etas) -> list[tuple]:
    """Gap scan of pi_n against the Pearcey limit, row-major over (kappa, eta).

    Each pair lands at z = eta n^{-3/4}, tau = a^2 + kappa n^{-1/2};
    the value is stripped of its prefactor in log space and paired with
    P(kappa/2a^2, eta/a). Returns (kappa, eta, rescaled, limit)
    quadruples. Needs even n; rate n^{-1/2}.
    """
    if n % 2:
        raise PreconditionError(f"symmetric cusp needs even n, got {n}")
    return [
        (kappa, eta, _acp_cusp_rescaled(eta, kappa, a, n), acp_cusp_limit(eta, kappa, a))
        for kappa in kappas
        for eta in etas
    ]


def _aicp_cusp_rescaled(eta, kappa: float, a: float, n: int) -> complex:
    """theta_n at z = eta n^{-3/4}, tau = a^2 + kappa n^{-1/2}, over the prefactor.

    Branch chosen by sign(Im eta); evaluated on the wedge contour
    through the gap. Converges to aicp_cusp_limit at rate n^{-1/2}.
    """
    eta = complex(eta)
    _require_off_axis(eta)
    if n % 2:
        raise PreconditionError(f"symmetric cusp needs even n, got {n}")
    side = 1 if eta.imag > 0 else -1
    tau = a * a + kappa / math.sqrt(n)
    if tau <= 0:
        raise DomainError(f"time offset kappa={kappa} drives tau nonpositive")
    z = eta * n ** (-3.0 / 4.0)
    src = SourceSpectrum.symmetric_pair(a, n)
    value = aicp(src, tau, z, contour=cusp_contour(a, tau, n, side, z_max=abs(z))).scaled
    sign = -1.0 if (n // 2) % 2 else 1.0
    pref = ScaledComplex.from_log(
        0.25 * math.log(n) - 0.5 * math.log(2.0 * math.pi) - n * math.log(a),
        sign + 0j,
    )
    return (value / pref).to_complex()


def aicp_cusp_profile(n: int, a: float, kappas, etas, side: str = "upper") -> list[tuple]:
    """Gap scan of theta_n against the quarter-turn Pearcey limit.

    Row-major over (kappa, eta) like acp_cusp_profile; real eta entries
    are lifted off the axis by +-0.01i toward the requested branch and
    the lifted coordinate is returned. Upper and lower scans are
    complex conjugates. Rate n^{-1/2}.
    """
    if n % 2:
        raise PreconditionError(f"symmetric cusp needs even n, got {n}")
    out = []
    for kappa in kappas:
        for eta in etas:
            lifted = _lift_window_point(eta, side)
            out.append(
                (
                    kappa,
                    lifted,
                    _aicp_cusp_rescaled(lifted, kappa, a, n),
                    aicp_cusp_limit(lifted, kappa, a),
                )
            )
    return out


def aicp_cusp_limit(eta, kappa: float, a: float) -> complex:
    """Quarter-turn Pearcey limit of the reciprocal transform at the gap.

    e^{i pi/4} pearcey_quarter(i kappa/2a^2, e^{-i pi/4} eta/a, side)
    with side following sign(Im eta). The through-gap path enters and
    leaves through one half plane, which lands the limit on the quarter
    turn rather than the real-line Pearcey; the imaginary first
    argument and the pi/4 rotations are the same wedge geometry. Both
    branches use identical arguments, only the turn flips, and their
    values are complex conjugates of one another at conjugate eta.
    """
    eta = complex(eta)
    _require_off_axis(eta)
    side = 1 if eta.imag > 0 else -1
    rot = cmath.exp(-1j * math.pi / 4.0)
    return cmath.exp(1j * math.pi / 4.0) * pearcey_quarter(
        1j * kappa / (2.0 * a * a), rot * eta / a, side=side
    )
