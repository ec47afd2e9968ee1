"""Algebraic stability criteria and the aggregated assessment.

Each check inspects coefficient signs and exponent arithmetic of the
characteristic function and returns a CriterionResult.  A criterion is
*applicable* when its structural preconditions hold (zero/sign pattern,
exponent ordering, leading exponent below 2, threshold gates); the
constant-term inequality then decides Stable versus no conclusion.
Applicable criteria never lie: a Stable verdict certifies no zeros with
nonnegative real part, an Unstable verdict certifies at least one.

`assess` runs everything, aggregates an overall verdict, and optionally
cross-checks against the winding-number zero count.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .charfn import (
    GeneralCharFn,
    SimpleCharFn,
    build_general,
    sine_ratios,
    to_simple,
)
from .errors import (
    CriterionOracleMismatch,
    InternalContradiction,
    NotReducible,
    SamplingInconclusive,
    SineRatiosUndefined,
    ZeroAtOrigin,
    ZeroOnAxis,
)
from .model import MultiOrderSystem

__all__ = [
    "Verdict",
    "CriterionResult",
    "StabilityReport",
    "check_det_sign",
    "check_high_order_middle_sign",
    "check_gap_bounded",
    "check_strict_ladder",
    "check_one_term",
    "check_two_term",
    "assess",
]


class Verdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    NOT_ASYMPTOTICALLY_STABLE = "not_asymptotically_stable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class CriterionResult:
    criterion: str
    applicable: bool
    verdict: Verdict
    witness: dict = field(default_factory=dict)
    note: str = ""


def _result(criterion, applicable, verdict=Verdict.INCONCLUSIVE, witness=None, note=""):
    return CriterionResult(criterion, applicable, verdict, witness or {}, note)


def check_det_sign(q: GeneralCharFn) -> CriterionResult:
    """Sign of det A read off the constant term.

    Positive determinant forces a real positive zero (Q(0) < 0 while
    Q -> +inf along the positive real axis): Unstable.  Zero determinant
    puts a zero at the origin: not asymptotically stable.  Negative
    determinant alone decides nothing.
    """
    det = q.matrix_det
    tol = 1e-12 * (1.0 + q.coeff_scale())
    if det > tol:
        return _result(
            "det_sign", True, Verdict.UNSTABLE, {"det": det},
            note="positive determinant gives a real zero in the right half-plane",
        )
    if abs(det) <= tol:
        return _result(
            "det_sign", True, Verdict.NOT_ASYMPTOTICALLY_STABLE, {"det": det},
            note="zero determinant puts a characteristic zero at the origin",
        )
    return _result("det_sign", True, Verdict.INCONCLUSIVE, {"det": det})


def check_high_order_middle_sign(q: GeneralCharFn) -> CriterionResult:
    """Instability test for leading exponent >= 2.

    Requires det A < 0 and Q(s) = s^p4 - sum c_k s^(e_k) - det A with
    every interior exponent in (0, 2), every c_k >= 0, and at least two
    distinct c_k values.  Then the imaginary part of Q on the upper axis
    is single-signed, forcing exactly two zeros in the right half-plane.
    A single surviving interior term can never satisfy the distinctness
    requirement and is rejected as written.
    """
    crit = "high_order_middle_sign"
    det = q.matrix_det
    tol = 1e-12 * (1.0 + q.coeff_scale())
    interior = q.terms[1:-1]
    if q.lead_exponent < 2.0 or not det < -tol:
        return _result(crit, False)
    if len(interior) < 2:
        return _result(crit, False, note="needs two interior terms with distinct weights")
    cs = [-k for _, k in interior]
    if any(c < 0.0 for c in cs):
        return _result(crit, False, note="interior coefficient with the wrong sign")
    if not all(0.0 < e < 2.0 for e, _ in interior):
        return _result(crit, False, note="interior exponent outside (0, 2)")
    if not max(cs) > min(cs):
        return _result(crit, False, note="interior weights all equal")
    return _result(
        crit, True, Verdict.UNSTABLE,
        {"det": det, "expected_rhp_zeros": 2.0},
        note="single-signed imaginary part on the axis yields two right-half-plane zeros",
    )


def _sign_pattern(q: SimpleCharFn):
    """Classify each reduced coefficient as -1, 0, +1, or None when its
    magnitude falls inside the ambiguity band."""
    tol = q.effective_zero_tol
    out = []
    for v in (q.a, q.b, q.c, q.d):
        if v == 0.0:
            out.append(0)
        elif abs(v) <= tol:
            out.append(None)
        else:
            out.append(1 if v > 0 else -1)
    return out


_EPS = 1e-12  # slack on non-strict comparisons


def check_gap_bounded(q: SimpleCharFn) -> CriterionResult:
    """Stability from nonpositive interior coefficients plus exponent
    gap bounds: d < 0, a,b,c <= 0, p1..p3 <= 1, p4 - p3 < 1,
    |p1 + p3 - p4| <= 1, |p2 + p3 - p4| <= 1."""
    crit = "nonpositive_gap_bounded"
    sa, sb, sc, sd = _sign_pattern(q)
    if None in (sa, sb, sc, sd):
        return _result(crit, False, note="coefficient sign inside ambiguity band")
    signs_ok = sa <= 0 and sb <= 0 and sc <= 0 and sd < 0
    gaps_ok = (
        q.p1 <= 1.0 + _EPS
        and q.p2 <= 1.0 + _EPS
        and q.p3 <= 1.0 + _EPS
        and q.p4 - q.p3 < 1.0
        and abs(q.p1 + q.p3 - q.p4) <= 1.0 + _EPS
        and abs(q.p2 + q.p3 - q.p4) <= 1.0 + _EPS
    )
    if not (signs_ok and gaps_ok):
        return _result(crit, False)
    return _result(crit, True, Verdict.STABLE, {"d": q.d})


def check_strict_ladder(q: SimpleCharFn) -> CriterionResult:
    """Stability from a strict exponent ladder under 2 with nonpositive
    coefficients: 0 < p1 < p2 < p3 < p4 < 2, a,b,c <= 0, d < 0."""
    crit = "nonpositive_strict_ladder"
    sa, sb, sc, sd = _sign_pattern(q)
    if None in (sa, sb, sc, sd):
        return _result(crit, False, note="coefficient sign inside ambiguity band")
    ladder = 0.0 < q.p1 < q.p2 < q.p3 < q.p4 < 2.0
    if not (ladder and sa <= 0 and sb <= 0 and sc <= 0 and sd < 0):
        return _result(crit, False)
    return _result(crit, True, Verdict.STABLE, {"d": q.d})


def _single_term_threshold(coef: float, p: float, p4: float, comp: float, direct: float):
    """Constant-term bound for one positive interior term at exponent p:
    the single axis root of the imaginary part is
    w0 = (coef*direct)^(1/(p4-p)), and stability needs
    d < -coef * comp * (coef*direct)^(p/(p4-p))."""
    w0 = (coef * direct) ** (1.0 / (p4 - p))
    threshold = -coef * comp * (coef * direct) ** (p / (p4 - p))
    return w0, threshold


def check_one_term(q: SimpleCharFn) -> list[CriterionResult]:
    """Single positive interior coefficient criteria (low, mid, high
    slot).  Applicable when the other two interior coefficients vanish,
    the survivor is positive, and p4 < 2; the strict threshold
    inequality on d then decides Stable."""
    names = ("one_term_low", "one_term_mid", "one_term_high")
    sa, sb, sc, _ = _sign_pattern(q)
    if abs(q.p4 - 2.0) <= 1e-12:
        raise SineRatiosUndefined("leading exponent 2: sine ratios undefined")
    patterns = (
        (sc, sb, sa, q.c, q.p1, 0),  # low slot active
        (sb, sa, sc, q.b, q.p2, 1),  # mid slot active
        (sa, sb, sc, q.a, q.p3, 2),  # high slot active
    )
    out = []
    ratios = sine_ratios(q) if q.p4 < 2.0 else None
    for name, (active, other1, other2, coef, p, idx) in zip(names, patterns):
        if q.p4 > 2.0:
            out.append(_result(name, False, note="leading exponent above 2"))
            continue
        if None in (active, other1, other2):
            out.append(_result(name, False, note="coefficient sign inside ambiguity band"))
            continue
        if not (active == 1 and other1 == 0 and other2 == 0):
            out.append(_result(name, False))
            continue
        w0, threshold = _single_term_threshold(
            coef, p, q.p4, ratios.complement[idx], ratios.direct[idx]
        )
        witness = {"threshold": threshold, "axis_root": w0, "d": q.d}
        if q.d < threshold:
            out.append(_result(name, True, Verdict.STABLE, witness))
        else:
            out.append(_result(name, True, Verdict.INCONCLUSIVE, witness,
                               note="constant term above the certified threshold"))
    return out


def check_two_term(q: SimpleCharFn) -> list[CriterionResult]:
    """Two positive interior coefficients with one slot empty.

    Needs a strict interior ladder p1 < p2 < p3, p4 < 2, and the summed
    direct ratios of the two active slots above 1 (which pushes the last
    axis root beyond omega = 1 so the exponent ordering argument holds).
    The non-strict threshold inequality on d then decides Stable.  When
    the low+mid pair is active the bounding exponent denominator is
    p4 - p2; otherwise it is p4 - p3.
    """
    sa, sb, sc, _ = _sign_pattern(q)
    if abs(q.p4 - 2.0) <= 1e-12:
        raise SineRatiosUndefined("leading exponent 2: sine ratios undefined")
    specs = (
        ("two_term_low_mid", sa, sb, sc),
        ("two_term_low_high", sb, sa, sc),
        ("two_term_mid_high", sc, sa, sb),
    )
    out = []
    ladder = 0.0 < q.p1 < q.p2 < q.p3
    ratios = sine_ratios(q) if q.p4 < 2.0 else None
    for name, empty, act1, act2 in specs:
        if q.p4 > 2.0:
            out.append(_result(name, False, note="leading exponent above 2"))
            continue
        if None in (empty, act1, act2):
            out.append(_result(name, False, note="coefficient sign inside ambiguity band"))
            continue
        if not ladder:
            out.append(_result(name, False, note="interior exponents not strictly ordered"))
            continue
        if not (empty == 0 and act1 == 1 and act2 == 1):
            out.append(_result(name, False))
            continue
        rc, rd = ratios.complement, ratios.direct
        if name == "two_term_low_mid":
            gate = q.b * rd[1] + q.c * rd[0]
            denom = q.p4 - q.p2
            threshold = (
                -q.b * gate ** (q.p2 / denom) * rc[1]
                - q.c * gate ** (q.p1 / denom) * rc[0]
            )
        elif name == "two_term_low_high":
            gate = q.a * rd[2] + q.c * rd[0]
            denom = q.p4 - q.p3
            threshold = (
                -q.a * gate ** (q.p3 / denom) * rc[2]
                - q.c * gate ** (q.p1 / denom) * rc[0]
            )
        else:
            gate = q.a * rd[2] + q.b * rd[1]
            denom = q.p4 - q.p3
            threshold = (
                -q.a * gate ** (q.p3 / denom) * rc[2]
                - q.b * gate ** (q.p2 / denom) * rc[1]
            )
        if not gate > 1.0:
            out.append(_result(name, False, witness={"gate": gate},
                               note="summed direct ratios not above 1"))
            continue
        witness = {"threshold": threshold, "gate": gate, "d": q.d}
        if q.d <= threshold:
            out.append(_result(name, True, Verdict.STABLE, witness))
        else:
            out.append(_result(name, True, Verdict.INCONCLUSIVE, witness,
                               note="constant term above the certified threshold"))
    return out


@dataclass(frozen=True)
class StabilityReport:
    general: GeneralCharFn
    simple: SimpleCharFn | None
    criteria: tuple[CriterionResult, ...]
    overall: Verdict
    oracle_zero_count: int | None = None
    oracle_note: str = ""
    notes: tuple[str, ...] = ()

    def fired(self) -> list[CriterionResult]:
        return [
            r for r in self.criteria
            if r.applicable and r.verdict is not Verdict.INCONCLUSIVE
        ]


def _aggregate(criteria) -> Verdict:
    stable = [r for r in criteria if r.applicable and r.verdict is Verdict.STABLE]
    unstable = [r for r in criteria if r.applicable and r.verdict is Verdict.UNSTABLE]
    nas = [
        r for r in criteria
        if r.applicable and r.verdict is Verdict.NOT_ASYMPTOTICALLY_STABLE
    ]
    if stable and unstable:
        raise InternalContradiction(
            "criteria disagree: "
            + ", ".join(f"{r.criterion}={r.verdict.value}" for r in stable + unstable)
        )
    if unstable:
        return Verdict.UNSTABLE
    if stable:
        return Verdict.STABLE
    if nas:
        return Verdict.NOT_ASYMPTOTICALLY_STABLE
    return Verdict.INCONCLUSIVE


def _cross_check(criteria, zero_count: int | None, axis_zero: bool) -> None:
    """Fired criteria must agree with the oracle count."""
    for r in criteria:
        if not r.applicable:
            continue
        if r.verdict is Verdict.STABLE and (zero_count not in (None, 0) or axis_zero):
            raise CriterionOracleMismatch(
                f"{r.criterion} certified stable but oracle found "
                f"{'an axis zero' if axis_zero else f'{zero_count} zero(s)'}"
            )
        if r.verdict is Verdict.UNSTABLE and zero_count == 0:
            raise CriterionOracleMismatch(
                f"{r.criterion} certified unstable but oracle found no zeros"
            )


def assess(
    system: MultiOrderSystem,
    *,
    with_oracle: bool = True,
    contour=None,
) -> StabilityReport:
    """Run every criterion on the system's characteristic function and
    aggregate.  With the oracle enabled, the winding-number count is
    attached and checked against every fired verdict
    (CriterionOracleMismatch on disagreement)."""
    q = build_general(system)
    notes: list[str] = []
    criteria: list[CriterionResult] = [
        check_det_sign(q),
        check_high_order_middle_sign(q),
    ]
    simple = None
    try:
        simple = to_simple(q)
    except NotReducible:
        notes.append("not reducible to the four-term shape; reduced-form criteria skipped")
    if simple is not None:
        try:
            criteria.append(check_gap_bounded(simple))
            criteria.append(check_strict_ladder(simple))
            criteria.extend(check_one_term(simple))
            criteria.extend(check_two_term(simple))
        except SineRatiosUndefined:
            notes.append("leading exponent equals 2; ratio-based criteria skipped")

    overall = _aggregate(criteria)

    zero_count = None
    oracle_note = ""
    if with_oracle:
        from .oracle import count_rhp_zeros  # deferred to avoid import cycle

        axis_zero = False
        try:
            res = count_rhp_zeros(q, contour=contour)
            zero_count = res.zero_count
        except ZeroAtOrigin:
            oracle_note = "zero at origin; winding count skipped"
        except ZeroOnAxis as exc:
            axis_zero = True
            oracle_note = f"zero on the imaginary axis: {exc}"
        except SamplingInconclusive as exc:
            oracle_note = f"sampling inconclusive: {exc}"
        _cross_check(criteria, zero_count, axis_zero)

    return StabilityReport(
        general=q,
        simple=simple,
        criteria=tuple(criteria),
        overall=overall,
        oracle_zero_count=zero_count,
        oracle_note=oracle_note,
        notes=tuple(notes),
    )
