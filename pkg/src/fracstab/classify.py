"""Coefficient-vanishing classification of reducible systems.

Six coefficients of the general characteristic function can vanish: the
three diagonal entries A11, A22, A33 (killing the pairwise-sum
exponents) and the three principal minors M1, M2, M3 (killing the single
order exponents).  Reducibility to the four-term shape needs three of
the six to vanish, giving the 20 enumerated cases below.  Each case
carries the closed-form exponent triple (p1, p2, p3) of the three terms
that generically survive, expressed in the derivative orders.

A matrix may satisfy several cases at once (extra coincidences); all
matches are reported.  The predicted exponents equal the structural ones
obtained from the reduction whenever the instance is generic for its
case; degenerate instances (more vanishing than the case demands, or
colliding exponents) are surfaced through the comparison fields of
`classification_report` rather than silently reconciled.
"""

from __future__ import annotations

from dataclasses import dataclass

from .charfn import build_general, to_simple, SimpleCharFn
from .errors import NotReducible
from .model import MultiOrderSystem

__all__ = [
    "CaseMatch",
    "CASE_CONDITIONS",
    "classify",
    "extract_simple",
    "classification_report",
]

# Condition keys: d1/d2/d3 = diagonal entry vanishes, m1/m2/m3 = the
# complementary principal-minor identity Aii*Ajj = Aij*Aji holds.
CASE_CONDITIONS: dict[int, frozenset[str]] = {
    1: frozenset({"d1", "d2", "d3"}),
    2: frozenset({"d1", "d2", "m1"}),
    3: frozenset({"d1", "d2", "m2"}),
    4: frozenset({"d1", "d2", "m3"}),
    5: frozenset({"d1", "d3", "m1"}),
    6: frozenset({"d1", "d3", "m2"}),
    7: frozenset({"d1", "d3", "m3"}),
    8: frozenset({"d2", "d3", "m1"}),
    9: frozenset({"d2", "d3", "m2"}),
    10: frozenset({"d2", "d3", "m3"}),
    11: frozenset({"d1", "m1", "m2"}),
    12: frozenset({"d1", "m3", "m2"}),
    13: frozenset({"d1", "m3", "m1"}),
    14: frozenset({"d2", "m1", "m2"}),
    15: frozenset({"d2", "m3", "m2"}),
    16: frozenset({"d2", "m3", "m1"}),
    17: frozenset({"d3", "m1", "m2"}),
    18: frozenset({"d3", "m3", "m2"}),
    19: frozenset({"d3", "m3", "m1"}),
    20: frozenset({"m1", "m2", "m3"}),
}


def _sorted_pair_sums(alpha):
    """All three pairwise order sums, ascending."""
    a1, a2, a3 = alpha
    return sorted((a1 + a2, a1 + a3, a2 + a3))


def predicted_exponents(case_id: int, alpha) -> tuple[float, float, float]:
    """Closed-form surviving exponent triple for a case, ascending."""
    a1, a2, a3 = alpha
    if case_id == 1:
        return tuple(sorted(alpha))
    if case_id == 2:
        lo, hi = min(a2, a3), max(a1 + a2, a3)
        return (lo, a1 + 2 * a2 + a3 - lo - hi, hi)
    if case_id == 3:
        lo, hi = min(a1, a3), max(a1 + a2, a3)
        return (lo, 2 * a1 + a2 + a3 - lo - hi, hi)
    if case_id == 4:
        return (min(a1, a2), max(a1, a2), a1 + a2)
    if case_id == 5:
        lo, hi = min(a2, a3), max(a1 + a3, a2)
        return (lo, a1 + a2 + 2 * a3 - lo - hi, hi)
    if case_id == 6:
        return (min(a1, a3), max(a1, a3), a1 + a3)
    if case_id == 7:
        lo, hi = min(a1, a2), max(a1 + a3, a2)
        return (lo, 2 * a1 + a2 + a3 - lo - hi, hi)
    if case_id == 8:
        return (min(a2, a3), max(a2, a3), a2 + a3)
    if case_id == 9:
        lo, hi = min(a1, a3), max(a1, a2 + a3)
        return (lo, a1 + a2 + 2 * a3 - lo - hi, hi)
    if case_id == 10:
        lo, hi = min(a1, a2), max(a1, a2 + a3)
        return (lo, a1 + 2 * a2 + a3 - lo - hi, hi)
    if case_id == 11:
        lo, hi = min(a1 + a2, a3), max(a1 + a2, a1 + a3)
        return (lo, 2 * a1 + a2 + 2 * a3 - lo - hi, hi)
    if case_id == 12:
        return (a1, min(a1 + a2, a1 + a3), max(a1 + a2, a1 + a3))
    if case_id == 13:
        lo, hi = min(a1 + a3, a2), max(a1 + a2, a1 + a3)
        return (lo, 2 * a1 + 2 * a2 + a3 - lo - hi, hi)
    if case_id == 14:
        lo, hi = min(a1 + a2, a3), max(a2 + a3, a1 + a2)
        return (lo, a1 + 2 * a2 + 2 * a3 - lo - hi, hi)
    if case_id == 15:
        lo, hi = min(a2 + a3, a1), max(a1 + a2, a2 + a3)
        return (lo, 2 * a1 + 2 * a2 + a3 - lo - hi, hi)
    if case_id == 16:
        return (a2, min(a1 + a2, a2 + a3), max(a2 + a3, a1 + a2))
    if case_id == 17:
        return (a3, min(a2 + a3, a1 + a3), max(a1 + a3, a2 + a3))
    if case_id == 18:
        lo, hi = min(a2 + a3, a1), max(a1 + a3, a2 + a3)
        return (lo, 2 * a1 + a2 + 2 * a3 - lo - hi, hi)
    if case_id == 19:
        lo, hi = min(a1 + a3, a2), max(a1 + a3, a2 + a3)
        return (lo, a1 + 2 * a2 + 2 * a3 - lo - hi, hi)
    if case_id == 20:
        return tuple(_sorted_pair_sums(alpha))
    raise ValueError(f"unknown case id {case_id}")


@dataclass(frozen=True)
class CaseMatch:
    """One satisfied case: its id, the closed-form exponent prediction,
    and the worst residual among its defining equalities."""

    case_id: int
    conditions: frozenset[str]
    predicted: tuple[float, float, float]
    residual: float


def _condition_residuals(matrix) -> dict[str, float]:
    a = matrix.array
    return {
        "d1": abs(a[0, 0]),
        "d2": abs(a[1, 1]),
        "d3": abs(a[2, 2]),
        # literal equality residuals, even where a vanishing diagonal
        # already forces one side to zero
        "m1": abs(a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]),
        "m2": abs(a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0]),
        "m3": abs(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]),
    }


def classify(system: MultiOrderSystem, *, tol: float | None = None) -> list[CaseMatch]:
    """All cases whose defining equalities hold within tolerance,
    ascending by case id."""
    if tol is None:
        fro = system.matrix.frobenius()
        tol = 1e-10 * (1.0 + fro * fro)
    residuals = _condition_residuals(system.matrix)
    alpha = system.order.alpha
    matches = []
    for case_id, keys in CASE_CONDITIONS.items():
        worst = max(residuals[k] for k in keys)
        if worst <= tol:
            matches.append(
                CaseMatch(
                    case_id=case_id,
                    conditions=keys,
                    predicted=predicted_exponents(case_id, alpha),
                    residual=worst,
                )
            )
    return matches


def extract_simple(system: MultiOrderSystem) -> SimpleCharFn:
    """Reduce the system's characteristic function to the four-term
    shape (raises NotReducible when more than three interior terms
    survive)."""
    return to_simple(build_general(system))


def classification_report(system: MultiOrderSystem) -> dict:
    """Matches plus the predicted-vs-structural exponent comparison.

    Structural exponents come from the actual reduction and always take
    precedence downstream; a case prediction can disagree when the
    matrix vanishes beyond the case's own conditions (the comparison
    fields make that visible instead of hiding it).
    """
    matches = classify(system)
    structural = None
    not_reducible = False
    try:
        simple = extract_simple(system)
        structural = (simple.p1, simple.p2, simple.p3)
    except NotReducible:
        not_reducible = True
    entries = []
    for m in matches:
        agrees = None
        if structural is not None:
            agrees = all(
                abs(p - s) <= 1e-12 for p, s in zip(m.predicted, structural)
            )
        entries.append(
            {
                "case": m.case_id,
                "conditions": sorted(m.conditions),
                "residual": m.residual,
                "predicted": m.predicted,
                "agrees_with_structural": agrees,
            }
        )
    return {
        "matches": entries,
        "structural": structural,
        "not_reducible": not_reducible,
    }
