"""Evaluators for the averaged characteristic polynomial and its reciprocal.

For an n x n Hermitian matrix diffusing from a deterministic start H_0,

    pi_n(z, tau)    = < det(z - H_tau) >
    theta_n(z, tau) = < det(z - H_tau)^(-1) >

Averaging the determinant turns the matrix diffusion into scalar heat
flow: pi satisfies d_tau pi = -(1/2n) d_zz pi (an antidiffusion, which
is well posed here because pi is a polynomial in z), while theta
satisfies d_tau theta = +(1/2n) d_zz theta. Both have exact integral
representations against the starting data,

    pi_n(z, tau)    = sqrt(n/2 pi tau) Int_R   exp(-n (q - iz)^2 / 2 tau) pi_0(-iq) dq
    theta_n(z, tau) = sqrt(n/2 pi tau) Int_G+- exp(-n (q -  z)^2 / 2 tau) theta_0(q) dq

where G+ runs left to right above the poles of theta_0 (used when
Im z > 0) and G- below (Im z < 0). The two boundary values disagree on
the real axis; there is no continuous extension through the cut.

Evaluation routes, chosen for conditioning rather than generality:

  * Gauss-Hermite quadrature realizes the pi integral exactly (finite
    rule, the integrand is e^{-s^2} times a polynomial). Works for any
    source, but near a spectral edge the node sum cancels like
    exp(0.19 n), so it is the small-to-moderate n route.
  * The null source makes pi_n a rescaled monic Hermite polynomial;
    its three-term recurrence is stable at any n.
  * The symmetric two-source start (+-a) keeps pi_n even; heat flow
    acts term by term on the even coefficients with a fixed sign
    pattern, so the coefficient series evaluates without cancellation
    near the origin at any n.
  * theta integrates on a horizontal line through z while z is far
    enough from the axis, and on saddle-anchored bent contours near the
    edge and the cusp, where the line rule would cancel like e^{c n}.

Everything returns ScaledComplex: at n = 1024 the interesting values
live around exp(+-n/2 log tau +- n/2) and do not fit a double.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, wofz

from .contours import ContourSpec, contour_quadrature, gauss_hermite_log
from .errors import ConvergenceError, DomainError, PreconditionError
from .logscale import ScaledComplex, scaled_sum
from .sources import SourceSpectrum

__all__ = [
    "PolynomialEvaluation",
    "acp",
    "acp_hermite_recurrence",
    "acp_pair_series",
    "aicp",
    "aicp_cauchy_null",
    "edge_contour",
    "cusp_contour",
    "pde_residual",
    "PdeResidual",
    "cole_hopf",
]


@dataclass(frozen=True)
class PolynomialEvaluation:
    """A pi_n or theta_n value as mantissa * exp(log_scale).

    value has magnitude in [1, e) (or is exactly 0); log_scale spans the
    exp(+-n/2 log tau +- n/2) growth that a bare double cannot. method
    records which evaluation route produced the number: quadrature,
    recurrence, series, cauchy-transform, or monte-carlo.
    """

    value: complex
    log_scale: float
    method: str

    @property
    def scaled(self) -> ScaledComplex:
        return ScaledComplex(self.log_scale, self.value)

    def to_complex(self) -> complex:
        return self.scaled.to_complex()


def _wrap(value: ScaledComplex, method: str) -> PolynomialEvaluation:
    return PolynomialEvaluation(value.mantissa, value.log_scale, method)


# ===== averaged characteristic polynomial ==================================


def _hermite_order(n: int) -> int:
    # exact for polynomial degree <= 2k-1; degree is n, plus margin
    return (n + 1 + 1) // 2 + 4


def _char_poly_log(source: SourceSpectrum, pts: np.ndarray):
    """log|pi_0| and unit phase of the starting polynomial, vectorized.

    A point sitting exactly on a source gives log -inf with unit
    phase: a zero of the polynomial, an honest sample for the forward
    transform. Callers inverting the polynomial must treat -inf as the
    pole it becomes.
    """
    log_mag = np.zeros(pts.shape, dtype=float)
    phase = np.zeros(pts.shape, dtype=float)
    for a, m in zip(source.locations, source.multiplicities):
        d = pts - a
        with np.errstate(divide="ignore"):
            log_mag += m * np.log(np.abs(d))
        phase += m * np.angle(d)
    return log_mag, np.exp(1j * phase)


def acp_quadrature(source: SourceSpectrum, tau: float, z: complex) -> ScaledComplex:
    """Exact Gauss-Hermite realization of the heat integral for pi_n.

    The rule is exact up to floating point: the integrand is e^{-s^2}
    times a degree-n polynomial and the order is chosen above n/2 + 1.
    Beware the conditioning note in the module docstring for large n
    near an edge.
    """
    n = source.dimension
    nodes, log_w = gauss_hermite_log(_hermite_order(n))
    pts = z - 1j * math.sqrt(2.0 * tau / n) * nodes
    log_mag, mant = _char_poly_log(source, pts)
    total = scaled_sum(log_w + log_mag, mant)
    return total * ScaledComplex.from_complex(1.0 / math.sqrt(math.pi))


def _hermite_scaled(n: int, tau: float, z: complex) -> ScaledComplex:
    if n < 1:
        raise PreconditionError(f"dimension must be >= 1, got {n}")
    z = complex(z)
    p_prev = ScaledComplex.from_complex(1.0)
    p_cur = ScaledComplex.from_complex(z)
    zs = ScaledComplex.from_complex(z)
    for k in range(1, n):
        p_next = zs * p_cur - ScaledComplex.from_complex(k * tau / n) * p_prev
        p_prev, p_cur = p_cur, p_next
    return p_cur


def acp_hermite_recurrence(n: int, tau: float, z: complex) -> PolynomialEvaluation:
    """Null-source pi_n via the monic three-term recurrence.

    p_0 = 1, p_1 = z, p_{k+1} = z p_k - (k tau / n) p_{k-1}. Carried in
    scaled form; stable at any n and any z. The independent oracle for
    the quadrature route at the null source.
    """
    return _wrap(_hermite_scaled(n, tau, z), "recurrence")


def _pair_series_log_coeffs(a: float, tau: float, n: int):
    """Even coefficients of pi_n for the +-a source, in (log, sign) form.

    pi_0 = (z^2 - a^2)^{n/2}; applying the heat sum to each even power
    gives, for the z^{2k} coefficient,

        b_k = (-1)^{n/2-k} sum_j  C(n/2, k+j) a^{n-2k-2j}
                                  (tau/2n)^j (2k+2j)! / (j! (2k)!)

    in which every summand is positive: the j-sum is a clean logsumexp
    and only the overall sign alternates with k.
    """
    if n % 2 or n < 2:
        raise PreconditionError(f"two-source start needs even dimension, got {n}")
    n2 = n // 2
    log_a = math.log(abs(a))
    log_t = math.log(tau / (2.0 * n))
    log_b = np.empty(n2 + 1)
    sign = np.empty(n2 + 1)
    ln_n2 = gammaln(n2 + 1)
    for k in range(n2 + 1):
        j = np.arange(0, n2 - k + 1)
        terms = (
            ln_n2
            - gammaln(k + j + 1)
            - gammaln(n2 - k - j + 1)
            + (n - 2 * k - 2 * j) * log_a
            + j * log_t
            + gammaln(2 * k + 2 * j + 1)
            - gammaln(j + 1)
            - gammaln(2 * k + 1)
        )
        peak = terms.max()
        log_b[k] = peak + math.log(np.sum(np.exp(terms - peak)))
        sign[k] = -1.0 if (n2 - k) % 2 else 1.0
    return log_b, sign


def acp_pair_series(a: float, n: int, tau: float, z: complex) -> ScaledComplex:
    """pi_n for the symmetric +-a source as an even power series in z.

    Near the origin the series terms decay immediately and carry a
    deterministic sign, so this stays accurate at n where quadrature
    has long cancelled itself away. Valid at any z in exact arithmetic;
    in floats, bulk evaluation at |z| ~ a costs a few digits.
    """
    z = complex(z)
    log_b, sign = _pair_series_log_coeffs(a, tau, n)
    k = np.arange(log_b.size)
    if z == 0:
        return ScaledComplex.from_log(log_b[0], sign[0] + 0j)
    log_z = math.log(abs(z))
    phase = cmath.phase(z)
    total = scaled_sum(log_b + 2 * k * log_z, sign * np.exp(2j * k * phase))
    return total


def _acp_scaled(source, tau, z, method: str = "auto") -> tuple[ScaledComplex, str]:
    if isinstance(source, int):
        source = SourceSpectrum.null(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    n = source.dimension
    pair = (
        len(source.locations) == 2
        and source.locations[0] == -source.locations[1]
        and source.multiplicities[0] == source.multiplicities[1]
    )
    if method == "auto":
        if source.is_null:
            method = "recurrence"
        elif pair and (n > 128 and abs(z) < 0.75 * abs(source.locations[1])):
            method = "series"
        else:
            method = "quadrature"
    if method == "recurrence":
        if not source.is_null:
            raise PreconditionError("recurrence route requires the null source")
        return _hermite_scaled(n, tau, z), method
    if method == "series":
        if not pair:
            raise PreconditionError("series route requires a symmetric +-a source")
        return acp_pair_series(abs(source.locations[1]), n, tau, z), method
    if method == "quadrature":
        return acp_quadrature(source, tau, z), method
    raise PreconditionError(f"unknown acp method {method!r}")


def acp(source, tau, z, *, method: str = "auto") -> PolynomialEvaluation:
    """Averaged characteristic polynomial < det(z - H_tau) >.

    Parameters
    ----------
    source : SourceSpectrum or int
        Starting spectrum; an int means the null start of that dimension.
    tau : float
        Diffusion time, > 0.
    z : complex
    method : {"auto", "quadrature", "recurrence", "series"}
        auto picks the stable route: recurrence for the null source,
        the coefficient series for a symmetric pair near the origin at
        large n, Gauss-Hermite quadrature otherwise.
    """
    value, used = _acp_scaled(source, tau, z, method)
    return _wrap(value, used)


# ===== averaged inverse characteristic polynomial ==========================


def edge_contour(tau: float, side: int = 1) -> ContourSpec:
    """Bent descent path for theta_n near the right spectral edge (null source).

    Enters horizontally at height +-sqrt(3 tau) (where the Gaussian
    still controls the tail), descends along the local steepest-descent
    ray into the degenerate saddle at sqrt(tau), and exits along the
    real axis. Every sample is at most the saddle value: no
    cancellation at any n. side=+1 is the Im z > 0 branch.
    """
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    s = 1 if side >= 0 else -1
    root = math.sqrt(tau)
    top = 1j * s * math.sqrt(3.0) * root
    r_in = 4.0 * root + 10.0 * root
    r_out = 3.0 * root + 10.0 * root
    return ContourSpec.ray_chain((top, root), math.pi, 0.0, (r_in, r_out))


def cusp_contour(a: float, tau: float, n: int, side: int = 1, z_max: float = 0.0) -> ContourSpec:
    """Wedge path for theta_n near the closing gap of the +-a source.

    Two rays through the origin at 45 degrees (upper wedge for the
    Im z > 0 branch, mirrored below). Along the diagonals the Gaussian
    factor is purely oscillatory and decay comes from the poles,
    |q^2 - a^2|^{-n/2} ~ r^{-n}; the truncation radius solves that
    power-law tail against the cross term the small z reintroduces.
    """
    if a <= 0 or tau <= 0:
        raise DomainError("cusp contour needs a > 0 and tau > 0")
    s = 1 if side >= 0 else -1
    # (n/4) log(1 + (r/a)^4) - n z_max r / tau >= 46  by bisection
    def margin(r):
        return 0.25 * n * math.log1p((r / a) ** 4) - n * z_max * r / tau - 46.0

    lo, hi = a, 64.0 * a
    while margin(hi) < 0:
        hi *= 2.0
        if hi > 1e6 * a:
            raise ConvergenceError("cusp truncation radius diverged")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if margin(mid) < 0:
            lo = mid
        else:
            hi = mid
    radius = hi * 1.25
    return ContourSpec.ray_pair(
        0.0, s * 3.0 * math.pi / 4.0, s * math.pi / 4.0, (radius, radius)
    )


def _aicp_on_contour(z, tau, source, spec, rtol):
    n = source.dimension
    pref = -0.5 * n / tau

    def integrand(q):
        w = (q - z) ** 2
        log_pi, mant_pi = _char_poly_log(source, q)
        if np.any(np.isneginf(log_pi)):
            raise DomainError("integration contour passes through a source eigenvalue")
        # 1/pi_0: negate the log magnitude, conjugate the unit phase
        return pref * w.real - log_pi, np.exp(1j * pref * w.imag) * np.conj(mant_pi)

    start = None
    if spec.kind == "line":
        # a pole at distance d below the line prints a spike of width d
        # on it; begin with nodes that fine, or the first doublings
        # alias the spike and trip the stagnation bail-out
        dmin = math.inf
        for a in source.locations:
            u = ((a - spec.point) / spec.direction).real
            t = min(max(u, -spec.half_width), spec.half_width)
            dmin = min(dmin, abs(a - (spec.point + spec.direction * t)))
        if dmin <= 1e-12 * max(1.0, abs(spec.point)):
            raise DomainError("integration line passes through a source eigenvalue")
        start = int(min(32768.0, max(65.0, 8.0 * spec.half_width / dmin)))
    result = contour_quadrature(spec, integrand, scaled=True, rtol=rtol, start_nodes=start)
    roundoff = 2.2e-16 * math.exp(min(result.cancellation, 80.0))
    if result.error_estimate > 1e-6 or roundoff > 1e-6:
        raise ConvergenceError(
            f"theta quadrature on this contour is not trustworthy: doubling "
            f"estimate {result.error_estimate:.2e}, cancellation floor "
            f"{roundoff:.2e}. Near the axis use edge_contour or cusp_contour.",
            best=result.value,
            achieved=max(result.error_estimate, roundoff),
        )
    scale = ScaledComplex.from_complex(math.sqrt(n / (2.0 * math.pi * tau)))
    return result.value * scale


def _aicp_scaled(source, tau, z, contour=None, rtol: float = 1e-12) -> ScaledComplex:
    if isinstance(source, int):
        source = SourceSpectrum.null(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    z = complex(z)
    if z.imag == 0:
        raise DomainError("no boundary value on the real axis; give Im z != 0")
    n = source.dimension
    if contour is None:
        delta = math.sqrt(tau / n)
        if abs(z.imag) < delta:
            raise DomainError(
                f"z is {abs(z.imag):.3g} from the axis; the line rule needs "
                f"|Im z| >= {delta:.3g} at n={n}. Pass contour=edge_contour(...) "
                "or cusp_contour(...) for near-axis windows."
            )
        dmin = min(abs(z - a) for a in source.locations)
        if tau * (n + 1.0) < 1e-17 * dmin * dmin:
            # theta_0 is constant to double precision across the whole
            # Gaussian (relative Taylor correction ~ tau (n+1) / dmin^2),
            # and the line nodes would quantize at this width anyway
            log_pi, mant = _char_poly_log(source, np.array([z]))
            return ScaledComplex.from_log(-float(log_pi[0]), complex(np.conj(mant[0])))
        # e^{-n t^2 / 2 tau} < 1e-21 past t = sqrt(100 tau / n); the pole
        # factor only decays further out, so the window is the Gaussian's
        half_width = math.sqrt(100.0 * tau / n)
        contour = ContourSpec.shifted_line(z, half_width)
    return _aicp_on_contour(z, tau, source, contour, rtol)


def aicp(source, tau, z, *, contour: ContourSpec | None = None, rtol: float = 1e-12) -> PolynomialEvaluation:
    """Averaged reciprocal characteristic polynomial < 1 / det(z - H_tau) >.

    The default path is the horizontal line through z, which matches
    the boundary-value branch for the sign of Im z. That rule needs z
    to clear the axis by at least one Gaussian width (|Im z| >=
    sqrt(tau/n), twice the half-width delta the contour placement is
    based on); closer than that, pass an explicit contour -
    edge_contour or cusp_contour cover the two scaling windows.

    There is no value ON the real axis: the two branches differ by a
    jump, and asking for Im z = 0 raises DomainError.
    """
    return _wrap(_aicp_scaled(source, tau, z, contour, rtol), "quadrature")


def _aicp_cauchy_scaled(n: int, tau: float, z) -> ScaledComplex:
    """Downward ladder behind aicp_cauchy_null, in scaled form.

    The Cauchy transforms q_k(z) = Int p_k(q) w(q) / (z - q) dq of the
    monic Hermite family (weight w = e^{-n q^2 / 2 tau}) obey the same
    three-term recurrence as the polynomials, with the inhomogeneous
    step q_1 = z q_0 - W folding in the total weight W, and

        theta_n = q_{n-1} / h_{n-1},   h_k = sqrt(2 pi tau / n) (tau/n)^k k!.

    The q_k are the minimal solution of the recurrence, so the ladder
    runs DOWNWARD from a trial seed high above n and is then pinned to
    the exact q_0 = -i pi w_F(z / (sigma sqrt 2)) (upper half plane;
    the lower branch is its reflection). The starting level doubles
    until two runs agree, which keeps the route reference-grade at any
    z off the axis. No quadrature is involved.
    """
    if n < 1:
        raise PreconditionError(f"dimension must be >= 1, got {n}")
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    z = complex(z)
    if z.imag == 0:
        raise DomainError("no boundary value on the real axis; give Im z != 0")
    conj = z.imag < 0
    if conj:
        z = z.conjugate()
    sigma = math.sqrt(tau / n)
    q0 = ScaledComplex.from_complex(-1j * math.pi * wofz(z / (sigma * math.sqrt(2.0))))
    zs = ScaledComplex.from_complex(z)

    def descend(start: int) -> ScaledComplex:
        hi = ScaledComplex(0.0, 0j)
        cur = ScaledComplex.from_complex(1.0)
        got = None
        for k in range(start, 0, -1):
            lower = (zs * cur - hi) / ScaledComplex.from_complex(k * tau / n)
            hi, cur = cur, lower
            if k - 1 == n - 1:
                got = cur
        # cur now holds the trial q_0; rescale so it matches the seed
        return got / cur * q0 if n > 1 else q0

    start = n + 24
    theta_prev = None
    while True:
        qn1 = descend(start)
        log_h = (
            0.5 * math.log(2.0 * math.pi * tau / n)
            + (n - 1) * math.log(tau / n)
            + float(gammaln(n))
        )
        theta = qn1 / ScaledComplex.from_log(log_h, 1.0 + 0j)
        if theta_prev is not None:
            diff = theta - theta_prev
            if diff.is_zero or diff.abs_log() - theta.abs_log() < math.log(1e-14):
                break
        if start > n + 400:
            raise ConvergenceError(
                "downward ladder failed to settle; z may sit too close to the axis"
            )
        theta_prev = theta
        start += 48
    return theta.conjugate() if conj else theta


def aicp_cauchy_null(n: int, tau: float, z) -> PolynomialEvaluation:
    """theta_n for the null source via the Cauchy-transform ladder.

    Independent of every quadrature route: no contour, no nodes. See
    _aicp_cauchy_scaled for the downward-recursion construction.
    """
    return _wrap(_aicp_cauchy_scaled(n, tau, z), "cauchy-transform")


# ===== diffusion-equation residual =========================================


@dataclass(frozen=True)
class PdeResidual:
    """Finite-difference defect of the evolution equation at one (z, tau).

    residual = d_tau F - s (1/2n) d_zz F with every stencil value first
    divided by the center value, so |residual| reads as a relative
    defect even when the center is exp(1e4) large; s = -1 for pi, +1
    for theta. wrong_sign carries the defect with s flipped, which
    stays O(1) whenever the equation is actually discriminating - the
    control for the sign conventions. dtau and dzz are the normalized
    derivatives themselves.
    """

    residual: complex
    wrong_sign: complex
    dtau: complex
    dzz: complex


def _richardson_second(fm2, fm1, f0, fp1, fp2, h):
    d_h = (fp2 - 2.0 * f0 + fm2) / (4.0 * h * h)
    d_h2 = (fp1 - 2.0 * f0 + fm1) / (h * h)
    return (4.0 * d_h2 - d_h) / 3.0


def _richardson_first(fm2, fm1, fp1, fp2, h):
    d_h = (fp2 - fm2) / (4.0 * h)
    d_h2 = (fp1 - fm1) / (2.0 * h)
    return (4.0 * d_h2 - d_h) / 3.0


def pde_residual(
    evaluator,
    source,
    tau: float,
    z,
    h_z: float = 1e-3,
    h_tau: float | None = None,
    *,
    method: str = "auto",
    contour: ContourSpec | None = None,
) -> PdeResidual:
    """Verify the diffusion equation for pi or theta at one point.

    evaluator is "acp" or "aicp" (the functions themselves also work).
    All stencil values are divided by the center value before
    differencing, so the check is meaningful even when F ~ exp(1e4).
    One Richardson step on central differences leaves O(h^4) truncation,
    comfortably under the target at h_z = 1e-3; the tau step defaults
    to the z step. For theta the whole z stencil must stay on one side
    of the axis.
    """
    if isinstance(source, int):
        source = SourceSpectrum.null(source)
    name = getattr(evaluator, "__name__", evaluator)
    ht = h_z if h_tau is None else h_tau
    if h_z <= 0 or ht <= 0:
        raise PreconditionError(f"steps must be > 0, got h_z={h_z}, h_tau={ht}")
    if name == "acp":
        fn = lambda zz, tt: _acp_scaled(source, tt, zz, method)[0]
        sign = -1.0
    elif name == "aicp":
        if abs(complex(z).imag) <= 2.0 * h_z:
            raise DomainError(
                "theta stencil would cross the real axis; shrink h_z or move z"
            )
        fn = lambda zz, tt: _aicp_scaled(source, tt, zz, contour)
        sign = +1.0
    else:
        raise PreconditionError(f"evaluator must be 'acp' or 'aicp', not {name!r}")
    n = source.dimension
    center = fn(z, tau)
    rel = lambda v: v.ratio(center)
    tz = [rel(fn(z + d, tau)) for d in (-2 * h_z, -h_z, h_z, 2 * h_z)]
    tt = [rel(fn(z, tau + d)) for d in (-2 * ht, -ht, ht, 2 * ht)]
    dzz = _richardson_second(tz[0], tz[1], 1.0 + 0j, tz[2], tz[3], h_z)
    dtau = _richardson_first(tt[0], tt[1], tt[2], tt[3], ht)
    diffusive = dzz / (2.0 * n)
    if abs(dtau) + abs(diffusive) == 0:
        raise ConvergenceError("both derivative terms vanished; stencil too coarse")
    return PdeResidual(
        residual=dtau - sign * diffusive,
        wrong_sign=dtau + sign * diffusive,
        dtau=dtau,
        dzz=dzz,
    )


def cole_hopf(source, n: int, tau: float, z, h_z: float = 1e-5, *, method: str = "auto") -> complex:
    """Logarithmic derivative field f = (1/n) d_z log pi_n(z, tau).

    This is the finite-n smoothing of the limiting Green's function: as
    n grows it converges to the characteristic-flow solution away from
    the support edges. n is kept explicit because it also scales the
    derivative; it must agree with the source dimension.
    """
    if isinstance(source, int):
        source = SourceSpectrum.null(source)
    if source.dimension != n:
        raise PreconditionError(
            f"n={n} disagrees with the source dimension {source.dimension}"
        )
    if h_z <= 0:
        raise PreconditionError(f"step must be > 0, got {h_z}")
    hi = _acp_scaled(source, tau, z + h_z, method)[0]
    lo = _acp_scaled(source, tau, z - h_z, method)[0]
    if hi.is_zero or lo.is_zero:
        raise DomainError("pi_n vanishes inside the stencil; move z or shrink h_z")
    return cmath.log(hi.ratio(lo)) / (2.0 * h_z * n)
