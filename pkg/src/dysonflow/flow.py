"""Large-dimension limit of the spectral flow: resolvent, density, caustics.

At infinite dimension the resolvent of the diffusing matrix obeys the
complex Burgers equation, and the method of characteristics solves it
implicitly through the starting Cauchy transform:

    G(z, tau) = G_0(xi)   along   z = xi + tau G_0(xi).

Each z off the axis is reached by exactly one characteristic carrying
the branch that decays like 1/z at infinity. On the axis the map folds;
the fold points (caustics) are the moving support edges, fixed by
1 + tau G_0'(xi_c) = 0, and the boundary jump across the support
carries the spectral density. For the symmetric two-source start the
two support intervals drift toward each other and join: the inner
caustic pair coalesces at the origin when tau reaches a^2, the same
degeneration the microscopic window magnifies into the Pearcey class.

Everything here is the N -> infinity end of what the exact evaluators
compute at finite N; cole_hopf is the bridge between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BranchAmbiguityError,
    ConvergenceError,
    DomainError,
    PreconditionError,
)
from .sources import SourceSpectrum

__all__ = [
    "GreenEvaluation",
    "CausticSet",
    "green0",
    "solve_characteristics",
    "density",
    "caustics",
    "support_intervals",
    "merge_point",
    "saddle_exponent",
]


def _as_source(source) -> SourceSpectrum:
    return SourceSpectrum.null(source) if isinstance(source, int) else source


def _weights(source: SourceSpectrum):
    n = source.dimension
    return [(a, m / n) for a, m in zip(source.locations, source.multiplicities)]


def green0(source, xi) -> complex:
    """Starting Cauchy transform G_0(xi) = sum_i (m_i/N) / (xi - a_i).

    The initial condition the characteristics transport. Undefined at
    the source eigenvalues themselves.
    """
    source = _as_source(source)
    xi = complex(xi)
    if any(xi == complex(a) for a in source.locations):
        raise DomainError(f"xi = {xi} sits on a source eigenvalue")
    return complex(source.green0(xi))


def _green0_prime(source: SourceSpectrum, xi) -> complex:
    return -sum(w / (xi - a) ** 2 for a, w in _weights(source))


@dataclass(frozen=True)
class GreenEvaluation:
    """Resolvent value with its branch certificate.

    value is G(z, tau) on the branch continued in from G ~ 1/z at
    infinity; root_index locates the selected label xi in the
    lexicographically sorted root list of the characteristic
    polynomial; residual is |z - xi - tau G_0(xi)| at that label, kept
    below 1e-10 max(1, |z|) by construction.
    """

    value: complex
    root_index: int
    residual: float

    def __post_init__(self):
        if self.residual < 0:
            raise PreconditionError("residual is a distance, must be >= 0")


def _characteristic_roots(source: SourceSpectrum, tau: float, z: complex) -> np.ndarray:
    """All labels xi with z = xi + tau G_0(xi).

    Clearing denominators gives
    (xi - z) prod_j (xi - a_j) + tau sum_i w_i prod_{j != i} (xi - a_j) = 0,
    one degree higher than the number of distinct sources.
    """
    locs = source.locations
    base = np.poly(locs)
    poly = np.polymul(np.array([1.0, -z], dtype=complex), base)
    for i, (a, w) in enumerate(_weights(source)):
        term = np.atleast_1d(np.poly(locs[:i] + locs[i + 1 :]))
        poly[len(poly) - len(term) :] += tau * w * term
    return np.roots(poly)


def _track_leg(source, tau, start, end, xi, base_steps=16):
    """Follow the tracked label from start to end along a straight leg.

    Each accepted step requires the label's motion to stay well inside
    the gap to the runner-up root; otherwise the step is bisected in
    place. Two candidates within 1e-12 of each other is a genuine
    branch collision and raises immediately.
    """
    todo = [start + (end - start) * k / base_steps for k in range(base_steps, 0, -1)]
    prev = start
    while todo:
        w = todo[-1]
        roots = _characteristic_roots(source, tau, w)
        dist = np.abs(roots - xi)
        order = np.argsort(dist)
        nearest = complex(roots[order[0]])
        if len(roots) > 1:
            runner = complex(roots[order[1]])
            gap = abs(nearest - runner)
            if gap < 1e-12:
                raise BranchAmbiguityError(
                    f"characteristic labels collide near z = {w:.6g}",
                    candidates=(nearest, runner),
                )
            if dist[order[0]] > 0.25 * gap:
                mid = 0.5 * (prev + w)
                if abs(w - prev) < 1e-13 * (1.0 + abs(w)):
                    raise BranchAmbiguityError(
                        f"branch tracking pinched between roots near z = {w:.6g}",
                        candidates=(nearest, runner),
                    )
                todo.append(mid)
                continue
        xi = nearest
        prev = w
        todo.pop()
    return xi


def solve_characteristics(source, tau: float, z) -> GreenEvaluation:
    """Resolvent G(z, tau) by continuation from the 1/z branch.

    The implicit equation z = xi + tau G_0(xi) has several labels; the
    physical one is continuous from xi ~ z at large |z|, so the solver
    walks a path from z_0 = z (1 + R/|z|) down to z tracking the
    nearest root. Real z must lie outside the support (on it the two
    boundary values disagree); the path then detours through the upper
    half plane whenever the straight segment would cross the support.
    The result carries its own certificate: residual is the defect of
    the implicit equation at the returned label.
    """
    source = _as_source(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    z = complex(z)
    spread = max(abs(a) for a in source.locations)
    big = 100.0 * max(1.0, spread, 2.0 * math.sqrt(tau))
    if z.imag == 0.0:
        intervals = support_intervals(caustics(source, tau))
        if any(lo <= z.real <= hi for lo, hi in intervals):
            raise DomainError(
                f"z = {z.real:g} lies on the spectrum support; the boundary "
                "values from above and below disagree there"
            )
        direction = z / abs(z) if z != 0 else -1.0
        z0 = z + big * direction
        a, b = sorted((z.real, z0.real))
        if any(a <= hi and lo <= b for lo, hi in intervals):
            lift = 1j * max(1.0, spread, 2.0 * math.sqrt(tau))
            waypoints = [z0, z0 + lift, z + lift, z]
        else:
            waypoints = [z0, z]
    else:
        waypoints = [z * (1.0 + big / abs(z)), z]
    xi = complex(waypoints[0] - tau * source.green0(waypoints[0]))
    for a, b in zip(waypoints, waypoints[1:]):
        xi = _track_leg(source, tau, a, b, xi)
    # Newton polish on the uncleared equation; quadratic once tracked
    target = 1e-13 * max(1.0, abs(z))
    for _ in range(50):
        defect = xi + tau * complex(source.green0(xi)) - z
        if abs(defect) <= target:
            break
        slope = 1.0 + tau * _green0_prime(source, xi)
        if slope == 0:
            break
        step = defect / slope
        xi -= step
        if abs(step) <= 1e-16 * (1.0 + abs(xi)):
            break
    residual = abs(xi + tau * complex(source.green0(xi)) - z)
    if residual > 1e-10 * max(1.0, abs(z)):
        raise ConvergenceError(
            f"characteristic label did not certify: residual {residual:.3g}",
            best=complex(source.green0(xi)),
            achieved=residual,
        )
    value = complex(source.green0(xi))
    if z.imag != 0.0 and value.imag * z.imag > 0 and abs(value.imag) > 1e-12 * (
        1.0 + abs(value)
    ):
        raise ConvergenceError(
            "tracked branch violates the resolvent sign Im G = -sign Im z",
            best=value,
        )
    roots = sorted(_characteristic_roots(source, tau, z), key=lambda r: (r.real, r.imag))
    root_index = min(range(len(roots)), key=lambda i: abs(roots[i] - xi))
    return GreenEvaluation(value=value, root_index=root_index, residual=residual)


# ===== caustics ============================================================


@dataclass(frozen=True)
class CausticSet:
    """Real fold points of the characteristic map at one time.

    labels are the xi_c solving 1 + tau G_0'(xi_c) = 0, ascending;
    positions are their images z_c = xi_c + tau G_0(xi_c), the support
    edges. merged reports a connected support: trivially true for the
    null source, and true for the symmetric pair from the moment the
    inner edge pair has coalesced.
    """

    positions: tuple
    labels: tuple
    merged: bool

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(float(p) for p in self.positions))
        object.__setattr__(self, "labels", tuple(float(x) for x in self.labels))


def _symmetric_pair_arm(source: SourceSpectrum):
    """|a| if the source is the +-a pair with equal weights, else None."""
    if len(source.locations) != 2:
        return None
    lo, hi = source.locations
    if lo != -hi or source.multiplicities[0] != source.multiplicities[1]:
        return None
    return abs(hi)


def _fold_labels_generic(source: SourceSpectrum, tau: float):
    # prod_j (xi - a_j)^2 = tau sum_i w_i prod_{j != i} (xi - a_j)^2
    locs = source.locations
    base = np.poly(locs)
    lhs = np.polymul(base, base).astype(float)
    for i, (a, w) in enumerate(_weights(source)):
        term = np.atleast_1d(np.poly(locs[:i] + locs[i + 1 :]))
        sq = np.atleast_1d(np.polymul(term, term))
        lhs[len(lhs) - len(sq) :] -= tau * w * sq
    roots = np.roots(lhs)
    scale = max(1.0, max(abs(a) for a in locs), math.sqrt(tau))
    labels = []
    for r in roots:
        if abs(r.imag) > 1e-7 * scale:
            continue
        xi = r.real
        # Newton on 1 + tau G0' against its derivative pins each label
        for _ in range(60):
            h = 1.0 + tau * _green0_prime(source, xi).real
            hp = 2.0 * tau * sum(w / (xi - a) ** 3 for a, w in _weights(source))
            if hp == 0:
                break
            step = h / hp
            xi -= step
            if abs(step) < 1e-15 * scale:
                break
        if abs(1.0 + tau * _green0_prime(source, xi).real) < 1e-9:
            labels.append(xi)
    labels.sort()
    out = []
    for xi in labels:
        if not out or abs(xi - out[-1]) > 1e-8 * scale:
            out.append(xi)
    return out


def caustics(source, tau: float) -> CausticSet:
    """Support edges at time tau: the real folds of the characteristic map.

    Null source: xi_c = +-sqrt(tau), giving z_c = +-2 sqrt(tau). The
    symmetric pair reduces to (xi^2 - a^2)^2 = tau (xi^2 + a^2), a
    quadratic in xi^2 solved in closed form so the degenerate merge is
    exact: the inner pair +-sqrt(u_-) lives while u_- > 0, becomes the
    single label 0 exactly at tau = a^2, and is gone after. Any other
    source goes through the cleared polynomial with Newton-polished
    real roots.
    """
    source = _as_source(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    arm = _symmetric_pair_arm(source)
    if source.is_null:
        s = math.sqrt(tau)
        labels = [-s, s]
        merged = True
    elif arm is not None:
        a2 = arm * arm
        disc = math.sqrt(tau * tau + 8.0 * a2 * tau)
        u_plus = 0.5 * ((2.0 * a2 + tau) + disc)
        u_minus = 0.5 * ((2.0 * a2 + tau) - disc)
        labels = [-math.sqrt(u_plus), math.sqrt(u_plus)]
        if u_minus > 0.0:
            s = math.sqrt(u_minus)
            labels += [-s, s]
        elif u_minus == 0.0:
            labels.append(0.0)
        merged = u_minus <= 0.0
        labels.sort()
    else:
        labels = _fold_labels_generic(source, tau)
        merged = len(labels) <= 3
    positions = [xi + tau * complex(source.green0(xi)).real for xi in labels]
    return CausticSet(positions=tuple(positions), labels=tuple(labels), merged=merged)


def support_intervals(caustic_set: CausticSet) -> list:
    """Support components bounded by the fold positions.

    A merged support is the single interval spanning the extremes;
    otherwise the sorted edges pair off in consecutive twos. Certified
    for the null and symmetric two-source families.
    """
    p = sorted(caustic_set.positions)
    if not p:
        return []
    if caustic_set.merged or len(p) % 2:
        return [(p[0], p[-1])]
    return [(p[k], p[k + 1]) for k in range(0, len(p), 2)]


# ===== density and merge ===================================================


def density(source, tau: float, lam: float) -> float:
    """Limiting spectral density at lambda, normalized to unit mass.

    Boundary value of the resolvent from below the axis, taken by two
    evaluations at eps and eps/2 and linear extrapolation to the axis
    (exact to O(eps^2) where G is analytic). Points at or outside the
    support edges return exactly 0; the density vanishes continuously
    there, so no limit is lost.
    """
    source = _as_source(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    lam = float(lam)
    inside = any(
        lo < lam < hi for lo, hi in support_intervals(caustics(source, tau))
    )
    if not inside:
        return 0.0
    eps = 1e-6 * max(1.0, math.sqrt(tau))
    g1 = solve_characteristics(source, tau, complex(lam, -eps)).value
    g2 = solve_characteristics(source, tau, complex(lam, -eps / 2.0)).value
    extrapolated = 2.0 * g2.imag - g1.imag
    return max(extrapolated, 0.0) / math.pi


def merge_point(source) -> tuple:
    """Time and place where the two support components join.

    The symmetric pair's inner fold points drift together and coalesce
    on the axis. Bisection on the merged flag of `caustics` pins the
    time; the inner pair's midpoint gives the place. Nothing here
    assumes the closed-form answer (0, a^2); it falls out.
    """
    source = _as_source(source)
    arm = _symmetric_pair_arm(source)
    if arm is None:
        raise PreconditionError(
            "only the symmetric two-source merge is certified; "
            f"got source {source}"
        )
    lo, hi = 0.5 * arm * arm, 2.0 * arm * arm
    while caustics(source, lo).merged:
        lo *= 0.5
        if lo < 1e-30 * arm * arm:
            raise ConvergenceError("no unmerged time found; source degenerate?")
    while not caustics(source, hi).merged:
        hi *= 2.0
        if hi > 1e30 * arm * arm:
            raise ConvergenceError("support never merges; source degenerate?")
    for _ in range(200):
        if hi - lo <= 1e-10 * arm * arm:
            break
        mid = 0.5 * (lo + hi)
        if caustics(source, mid).merged:
            hi = mid
        else:
            lo = mid
    inner = sorted(caustics(source, lo).positions)[1:3]
    return 0.5 * (inner[0] + inner[1]), 0.5 * (lo + hi)


# ===== saddle landscape ====================================================


def saddle_exponent(source, tau: float, z, p, kind: str = "aicp") -> complex:
    """Per-dimension exponent of the heat-integral integrand at point p.

    kind="aicp": f(p) = -(p - z)^2 / 2 tau - sum_i w_i log(p - a_i),
    whose stationary points solve z = p + tau G_0(p) - the saddles ARE
    the characteristic labels, which is what makes this worth mapping.
    kind="acp" is the companion transform in the rotated variable:
    f(p) = -(p - iz)^2 / 2 tau + sum_i w_i log(-ip - a_i). Principal
    logs; their seams are part of the landscape.
    """
    source = _as_source(source)
    if tau <= 0:
        raise DomainError(f"diffusion time must be > 0, got {tau}")
    z = complex(z)
    p = complex(p)
    if kind == "aicp":
        if any(p == complex(a) for a in source.locations):
            raise DomainError(f"p = {p} sits on a source eigenvalue")
        return -((p - z) ** 2) / (2.0 * tau) - sum(
            w * np.log(p - a) for a, w in _weights(source)
        )
    if kind == "acp":
        if any(-1j * p == complex(a) for a in source.locations):
            raise DomainError(f"-ip = {-1j * p} sits on a source eigenvalue")
        return -((p - 1j * z) ** 2) / (2.0 * tau) + sum(
            w * np.log(-1j * p - a) for a, w in _weights(source)
        )
    raise PreconditionError(f"kind must be 'acp' or 'aicp', not {kind!r}")
