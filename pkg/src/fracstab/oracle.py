"""Winding-number zero counting for the characteristic function.

The principal-branch characteristic function is analytic on the cut
plane, so the number of zeros with positive real part equals the total
argument turning of Q around the positively-oriented boundary of a
right-half-plane region between an inner semicircle (radius epsilon,
excluding the origin) and an outer one (radius R, enclosing all zeros),
divided by 2*pi.  Both radii are certified analytically:

  * epsilon small enough that the interior terms cannot move Q away
    from its value at 0 by more than half |Q(0)| anywhere in the inner
    half-disk, so no zero hides inside;
  * R large enough that the leading term dominates twice the sum of the
    others, so no zero lies outside.

Sampling along the contour refines adaptively until consecutive
argument changes stay below pi/2, then the accumulated turning must sit
within 0.01 of an integer multiple of 2*pi, else the count is refused
(SamplingInconclusive).  A companion scan locates the roots of the
imaginary part on the positive axis first and rejects contours through
an axis zero (ZeroOnAxis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charfn import GeneralCharFn, SimpleCharFn, _axis_parts
from .errors import SamplingInconclusive, ZeroAtOrigin, ZeroOnAxis

__all__ = [
    "ContourSpec",
    "WindingResult",
    "AxisRoot",
    "auto_contour",
    "count_rhp_zeros",
    "scan_imaginary_axis",
]

AXIS_ZERO_REL_TOL = 1e-9
TURNING_RESIDUAL_TOL = 0.01


@dataclass(frozen=True)
class ContourSpec:
    epsilon: float
    radius: float
    samples_per_unit_angle: int = 64
    samples_per_unit_log_length: int = 64
    max_samples: int = 2**20


@dataclass(frozen=True)
class WindingResult:
    zero_count: int
    total_turning: float
    residual: float
    contour: ContourSpec
    segment_turning: dict
    samples_used: int
    min_abs_on_contour: float


@dataclass(frozen=True)
class AxisRoot:
    """A root of the imaginary part on the positive axis, with the value
    the real part takes there."""

    omega: float
    real_part: float


def _active_axis_terms(terms):
    """(exponent, |weight|) pairs that actually contribute to the
    imaginary part on the axis."""
    out = []
    for e, k in terms:
        w = k * math.sin(e * math.pi / 2)
        if w != 0.0:
            out.append((e, w))
    return out


def _axis_scan_bounds(active):
    """Certified bracket [lo, hi] outside which the imaginary part
    cannot vanish (lowest/highest active term dominates).

    Near-equal neighbor exponents make the dominance radii blow up
    (the exponent gap appears as a reciprocal power); clamping keeps
    the log grid finite, and nothing is lost because zeros of the full
    function that close to 0 or infinity are excluded separately by
    the contour radii certificates.
    """
    active = sorted(active)
    e_lo, w_lo = active[0]
    e_hi, w_hi = active[-1]
    rest_hi = sum(abs(w) for e, w in active[:-1])
    rest_lo = sum(abs(w) for e, w in active[1:])
    # above hi: |w_hi| w^e_hi > rest * w^e2 for w > (rest/|w_hi|+1)^(1/(e_hi-e2))
    e2_hi = active[-2][0]
    hi = max(1.0, (rest_hi / abs(w_hi) + 1.0) ** (1.0 / (e_hi - e2_hi)))
    # below lo: lowest term dominates
    e2_lo = active[1][0]
    lo = min(
        1.0,
        (abs(w_lo) / (rest_lo + abs(w_lo))) ** (1.0 / (e2_lo - e_lo)),
    )
    lo = max(lo * 0.5, 1e-30)
    hi = min(hi * 2.0, 1e30)
    return lo, hi


def _bisect_axis_root(terms, lo, hi, f_lo):
    """Bisection on the imaginary part to 1e-12 relative width."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hi - lo <= 1e-12 * mid:
            break
        f_mid = _axis_parts(terms, mid)[1]
        if f_mid == 0.0:
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _scan_axis_terms(terms, omega_max=None, points_per_decade=160):
    """All bracketed roots of the imaginary part on (0, omega_max]."""
    active = _active_axis_terms(terms)
    if len(active) < 2:
        return []  # single-signed: no positive root
    lo, hi = _axis_scan_bounds(active)
    if omega_max is not None:
        hi = max(omega_max, lo * 2.0)
    n = max(256, int(points_per_decade * math.log10(hi / lo)) + 1)
    grid = np.geomspace(lo, hi, n)
    vals = _axis_parts(terms, grid)[1]
    roots = []
    for i in range(n - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            if i == 0 or vals[i - 1] != 0.0:
                roots.append(float(grid[i]))
            continue
        if b != 0.0 and (a < 0.0) != (b < 0.0):
            roots.append(_bisect_axis_root(terms, float(grid[i]), float(grid[i + 1]), a))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return [AxisRoot(w, _axis_parts(terms, w)[0]) for w in roots]


def scan_imaginary_axis(q: SimpleCharFn | GeneralCharFn, omega_max: float | None = None):
    """Roots of Im Q(i*omega) for omega > 0, each refined by bisection,
    paired with Re Q there.  The default upper bound is certified from
    term dominance."""
    terms = q.terms() if isinstance(q, SimpleCharFn) else q.terms
    return _scan_axis_terms(terms, omega_max=omega_max)


def auto_contour(q: GeneralCharFn) -> ContourSpec:
    """Radii certified so the annular region contains every zero with
    positive real part and excludes none."""
    k0 = abs(q.constant)
    interior = [(e, abs(k)) for e, k in q.terms if e > 0.0]
    ssum = sum(k for _, k in interior)
    e_min = min(e for e, _ in interior)
    eps = 1e-2
    for _ in range(1000):
        if ssum * eps**e_min <= 0.5 * k0:
            break
        eps *= 0.5
    else:
        raise SamplingInconclusive("could not certify an inner radius")

    e4 = q.lead_exponent
    lower = [(e, abs(k)) for e, k in q.terms[1:]]
    slow = sum(k for _, k in lower)
    e2 = max((e for e, _ in lower), default=0.0)
    radius = max(1.0, (2.0 * slow) ** (1.0 / (e4 - e2))) if slow > 0 else 1.0
    for _ in range(200):
        if not math.isfinite(radius):
            raise SamplingInconclusive("outer radius overflow")
        if radius**e4 >= 2.0 * sum(k * radius**e for e, k in lower):
            break
        radius *= 2.0
    else:
        raise SamplingInconclusive("could not certify an outer radius")
    return ContourSpec(epsilon=eps, radius=radius)


class _Budget:
    def __init__(self, cap):
        self.cap = cap
        self.used = 0

    def spend(self, n):
        self.used += n
        if self.used > self.cap:
            raise SamplingInconclusive(
                f"sample budget {self.cap} exhausted while refining the contour"
            )


def _wrap_pi(d):
    return (d + math.pi) % (2.0 * math.pi) - math.pi


def _segment_turning(qfun, params, to_points, budget):
    """Accumulated argument change along one parametrized segment,
    refining any step whose wrapped argument jump reaches pi/2."""
    budget.spend(len(params))
    vals = qfun(to_points(params))
    for _ in range(64):
        mags = np.abs(vals)
        if mags.min() == 0.0:
            raise ZeroOnAxis("characteristic function vanishes on the contour")
        diffs = _wrap_pi(np.diff(np.angle(vals)))
        bad = np.abs(diffs) >= math.pi / 2
        if not bad.any():
            break
        idx = np.flatnonzero(bad)
        budget.spend(len(idx))
        mids = 0.5 * (params[idx] + params[idx + 1])
        new_vals = qfun(to_points(mids))
        params = np.insert(params, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new_vals)
    else:
        raise SamplingInconclusive("argument jumps persist after refinement")
    turning = float(_wrap_pi(np.diff(np.angle(vals))).sum())
    return turning, float(np.abs(vals).min()), to_points(params), vals


def count_rhp_zeros(
    q: GeneralCharFn,
    contour: ContourSpec | None = None,
    samples_out: list | None = None,
) -> WindingResult:
    """Count zeros with positive real part (with multiplicity).

    Preconditions checked here: Q(0) != 0 (else ZeroAtOrigin) and no
    certified zero on the imaginary axis (else ZeroOnAxis).  The count
    carries an integer-residual certificate: the turning must land
    within 0.01 winding of an integer.
    """
    scale = q.coeff_scale()
    if abs(q.constant) <= 1e-12 * (1.0 + scale):
        raise ZeroAtOrigin("constant term vanishes: zero at s = 0")
    for root in _scan_axis_terms(q.terms):
        if abs(root.real_part) <= AXIS_ZERO_REL_TOL * scale:
            raise ZeroOnAxis(
                f"certified zero near s = {root.omega:.6g}i "
                f"(|Re Q| = {abs(root.real_part):.3g})"
            )

    spec = contour if contour is not None else auto_contour(q)
    eps, radius = spec.epsilon, spec.radius
    budget = _Budget(spec.max_samples)

    n_arc = max(33, int(spec.samples_per_unit_angle * math.pi) + 1)
    n_axis = max(33, int(spec.samples_per_unit_log_length * math.log(radius / eps)) + 1)

    down_axis = np.linspace(math.log(radius), math.log(eps), n_axis)
    up_axis = np.linspace(math.log(eps), math.log(radius), n_axis)
    inner_phi = np.linspace(math.pi / 2, -math.pi / 2, n_arc)
    outer_phi = np.linspace(-math.pi / 2, math.pi / 2, n_arc)

    segments = {
        "axis_upper": (down_axis, lambda p: 1j * np.exp(p)),
        "inner_arc": (inner_phi, lambda p: eps * np.exp(1j * p)),
        "axis_lower": (up_axis, lambda p: -1j * np.exp(p)),
        "outer_arc": (outer_phi, lambda p: radius * np.exp(1j * p)),
    }

    turning = {}
    min_abs = math.inf
    for name, (params, to_points) in segments.items():
        t, m, pts, vals = _segment_turning(q, params, to_points, budget)
        turning[name] = t
        min_abs = min(min_abs, m)
        if samples_out is not None:
            samples_out.append((name, pts, vals))

    total = sum(turning.values())
    winding = total / (2.0 * math.pi)
    count = round(winding)
    residual = abs(winding - count)
    if residual > TURNING_RESIDUAL_TOL:
        raise SamplingInconclusive(
            f"turning {winding:.4f} windings is not close to an integer"
        )
    if count < 0:
        raise SamplingInconclusive(f"negative winding {count}; contour unsound")
    return WindingResult(
        zero_count=int(count),
        total_turning=total,
        residual=residual,
        contour=spec,
        segment_turning=turning,
        samples_used=budget.used,
        min_abs_on_contour=min_abs,
    )
