"""Fractional characteristic function of a 3x3 multi-order system.

For orders (a1, a2, a3) and matrix A the characteristic function is

    Q(s) = det(diag(s^a1, s^a2, s^a3) - A),

expanded over the principal branch of s^p (arg s in (-pi, pi]).  The
expansion always has eight structural terms:

    s^(a1+a2+a3)
    - A11 s^(a2+a3) - A22 s^(a1+a3) - A33 s^(a1+a2)
    + M1 s^a1 + M2 s^a2 + M3 s^a3
    - det A

where Mk is the principal 2x2 minor complementary to Akk.  Merging equal
exponents and dropping negligible coefficients yields `GeneralCharFn`;
when at most three interior terms survive, the function reduces to the
four-term shape

    Q(s) = s^p4 - a s^p3 - b s^p2 - c s^p1 - d,   0 < p1 <= p2 <= p3 < p4,

held by `SimpleCharFn`.  The system is asymptotically stable exactly when
Q has no zero with nonnegative real part.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NotReducible, SineRatiosUndefined
from .model import MultiOrderSystem

__all__ = [
    "GeneralCharFn",
    "SimpleCharFn",
    "SineRatios",
    "MERGE_TOL",
    "build_general",
    "to_simple",
    "sine_ratios",
    "axis_real_from_ratios",
]

# Exponents closer than this merge into one term.
MERGE_TOL = 1e-12


def _eval_terms(terms, s):
    """Evaluate sum(k * s**e) on the principal branch.

    Scalar path uses exact compensated summation of real and imaginary
    parts; array input is evaluated vectorized.
    """
    if isinstance(s, np.ndarray):
        sc = s.astype(complex)
        out = np.zeros(s.shape, dtype=complex)
        for e, k in terms:
            out += k * np.power(sc, e)
        return out
    s = complex(s)
    vals = [k * (s**e if s != 0 else (1.0 + 0j if e == 0 else 0j)) for e, k in terms]
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def _axis_parts(terms, omega):
    """Real and imaginary parts of Q(i*omega) for omega > 0.

    On the upper imaginary axis s = i*omega has arg pi/2, so each term
    contributes k * omega**e * (cos(e*pi/2) + i sin(e*pi/2)).
    """
    if isinstance(omega, np.ndarray):
        re = np.zeros_like(omega)
        im = np.zeros_like(omega)
        for e, k in terms:
            p = k * omega**e
            re += p * math.cos(e * math.pi / 2)
            im += p * math.sin(e * math.pi / 2)
        return re, im
    re = []
    im = []
    for e, k in terms:
        p = k * float(omega) ** e
        re.append(p * math.cos(e * math.pi / 2))
        im.append(p * math.sin(e * math.pi / 2))
    return math.fsum(re), math.fsum(im)


@dataclass(frozen=True)
class GeneralCharFn:
    """Merged term list of Q, exponents strictly decreasing.

    The first term is always (a1+a2+a3, 1.0) and the last is
    (0.0, -det A); the constant is kept even when it vanishes.
    """

    terms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        es = [e for e, _ in self.terms]
        if any(y >= x for x, y in zip(es, es[1:])):
            raise ValueError("exponents must decrease strictly")
        if self.terms[0][1] != 1.0:
            raise ValueError("leading coefficient must be 1")
        if self.terms[-1][0] != 0.0:
            raise ValueError("term list must end with the constant term")

    @property
    def lead_exponent(self) -> float:
        return self.terms[0][0]

    @property
    def constant(self) -> float:
        return self.terms[-1][1]

    @property
    def matrix_det(self) -> float:
        """det A recovered from the constant term."""
        return -self.constant

    def __call__(self, s):
        return _eval_terms(self.terms, s)

    def axis_real(self, omega):
        return _axis_parts(self.terms, omega)[0]

    def axis_imag(self, omega):
        return _axis_parts(self.terms, omega)[1]

    def coeff_scale(self) -> float:
        return float(sum(abs(k) for _, k in self.terms))

    def describe(self) -> str:
        parts = []
        for e, k in self.terms:
            if e == 0.0:
                frag = f"{k:g}"
            elif k == 1.0:
                frag = f"s^{e:g}"
            else:
                frag = f"{abs(k):g} s^{e:g}"
            if not parts:
                parts.append(frag)
            else:
                parts.append(("- " if k < 0 else "+ ") + frag.lstrip("-"))
        return " ".join(parts)


def build_general(system: MultiOrderSystem, *, drop_tol: float | None = None) -> GeneralCharFn:
    """Expand det(diag(s^a) - A) into a merged, pruned term list.

    Exponents within MERGE_TOL collapse (coefficients summed); interior
    coefficients with magnitude <= drop_tol are removed.  The default
    drop tolerance scales with the squared Frobenius norm because the
    interior coefficients are products of two matrix entries.
    """
    a1, a2, a3 = system.order.alpha
    m = system.matrix
    if drop_tol is None:
        fro = m.frobenius()
        drop_tol = 1e-12 * (1.0 + fro * fro)

    raw = [
        (a1 + a2 + a3, 1.0),
        (a2 + a3, -m[0, 0]),
        (a1 + a3, -m[1, 1]),
        (a1 + a2, -m[2, 2]),
        (a1, m.principal_minor(0)),
        (a2, m.principal_minor(1)),
        (a3, m.principal_minor(2)),
        (0.0, -m.det()),
    ]
    raw.sort(key=lambda t: -t[0])

    merged: list[list[float]] = []
    for e, k in raw:
        if merged and merged[-1][0] - e <= MERGE_TOL:
            merged[-1][1] += k
        else:
            merged.append([e, k])

    lead_e = merged[0][0]
    out = [(lead_e, merged[0][1])]
    for e, k in merged[1:-1]:
        if abs(k) > drop_tol:
            out.append((e, k))
    out.append((0.0, merged[-1][1]))
    return GeneralCharFn(terms=tuple((float(e), float(k)) for e, k in out))


@dataclass(frozen=True)
class SimpleCharFn:
    """Four-term reduced shape Q(s) = s^p4 - a s^p3 - b s^p2 - c s^p1 - d.

    Exponents satisfy 0 < p1 <= p2 <= p3 < p4.  `zero_tol` is the
    magnitude below which a coefficient counts as absent when criteria
    gate on sign patterns; reductions inherit the drop tolerance used to
    prune the general form.
    """

    p1: float
    p2: float
    p3: float
    p4: float
    a: float
    b: float
    c: float
    d: float
    zero_tol: float | None = None

    def __post_init__(self):
        if not (0.0 < self.p1 <= self.p2 <= self.p3 < self.p4):
            raise ValueError("exponents must satisfy 0 < p1 <= p2 <= p3 < p4")

    @property
    def effective_zero_tol(self) -> float:
        if self.zero_tol is not None:
            return self.zero_tol
        biggest = max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))
        return 1e-12 * (1.0 + biggest)

    def terms(self) -> tuple[tuple[float, float], ...]:
        """Back to general-term form, dropping zero coefficients except
        the mandatory leading and constant entries.  Slots sharing an
        exponent (possible for hand-built instances) merge."""
        interior = sorted(
            ((self.p3, -self.a), (self.p2, -self.b), (self.p1, -self.c)),
            key=lambda t: -t[0],
        )
        acc: list[list[float]] = []
        for e, k in interior:
            if acc and acc[-1][0] == e:
                acc[-1][1] += k
            else:
                acc.append([e, k])
        out = [(self.p4, 1.0)]
        out.extend((e, k) for e, k in acc if k != 0.0)
        out.append((0.0, -self.d))
        return tuple(out)

    def __call__(self, s):
        return _eval_terms(self.terms(), s)

    def axis_real(self, omega):
        """Re Q(i*omega):  w^p4 cos(p4 pi/2) - a w^p3 cos(p3 pi/2)
        - b w^p2 cos(p2 pi/2) - c w^p1 cos(p1 pi/2) - d."""
        return _axis_parts(self.terms(), omega)[0]

    def axis_imag(self, omega):
        """Im Q(i*omega); has no constant contribution."""
        return _axis_parts(self.terms(), omega)[1]

    def coeff_scale(self) -> float:
        return 1.0 + abs(self.a) + abs(self.b) + abs(self.c) + abs(self.d)

    def describe(self) -> str:
        parts = [f"s^{self.p4:g}"]
        for coef, e in ((self.a, self.p3), (self.b, self.p2), (self.c, self.p1)):
            if coef != 0.0:
                parts.append(f"{'+' if coef < 0 else '-'} {abs(coef):g} s^{e:g}")
        if self.d != 0.0:
            parts.append(f"{'+' if self.d < 0 else '-'} {abs(self.d):g}")
        return " ".join(parts)


def to_simple(q: GeneralCharFn) -> SimpleCharFn:
    """Reduce a general form to the four-term shape.

    At most three interior terms may survive pruning (otherwise
    NotReducible is raised).  Present terms fill the exponent slots in
    ascending order; empty slots take coefficient 0 and duplicate the
    highest present interior exponent, or p4/2 when no interior term
    survives at all, keeping the slot ordering invariant intact.
    """
    interior = list(q.terms[1:-1])
    if len(interior) > 3:
        raise NotReducible(
            f"{len(interior)} interior terms survive; at most 3 allowed"
        )
    interior.sort(key=lambda t: t[0])
    p4 = q.lead_exponent
    filler = interior[-1][0] if interior else p4 / 2.0
    exps = [filler] * 3
    coefs = [0.0] * 3
    for slot, (e, k) in enumerate(interior):
        exps[slot] = e
        coefs[slot] = -k
    biggest = max([abs(k) for _, k in q.terms[1:-1]] + [abs(q.constant)], default=0.0)
    return SimpleCharFn(
        p1=exps[0],
        p2=exps[1],
        p3=exps[2],
        p4=p4,
        a=coefs[2],
        b=coefs[1],
        c=coefs[0],
        d=-q.constant,
        zero_tol=1e-12 * (1.0 + biggest),
    )


@dataclass(frozen=True)
class SineRatios:
    """Sine-ratio constants attached to the reduced form.

    complement[i] = sin((p4 - p_{i+1}) pi/2) / sin(p4 pi/2)
    direct[i]     = sin(p_{i+1} pi/2) / sin(p4 pi/2)

    At a root of the imaginary part on the axis, the real part collapses
    to -a w^p3 complement[2] - b w^p2 complement[1]
       - c w^p1 complement[0] - d,
    which is what the sufficient stability thresholds bound.
    """

    complement: tuple[float, float, float]
    direct: tuple[float, float, float]


def sine_ratios(q: SimpleCharFn) -> SineRatios:
    """Compute the ratio constants; undefined when p4 = 2."""
    if abs(q.p4 - 2.0) <= 1e-12:
        raise SineRatiosUndefined("normalizing sine vanishes at leading exponent 2")
    s4 = math.sin(q.p4 * math.pi / 2)
    ps = (q.p1, q.p2, q.p3)
    return SineRatios(
        complement=tuple(math.sin((q.p4 - p) * math.pi / 2) / s4 for p in ps),
        direct=tuple(math.sin(p * math.pi / 2) / s4 for p in ps),
    )


def axis_real_from_ratios(q: SimpleCharFn, omega: float, ratios: SineRatios | None = None) -> float:
    """Value the real part takes at an imaginary-part root, via the
    sine-ratio identity (valid only where axis_imag vanishes)."""
    if ratios is None:
        ratios = sine_ratios(q)
    r1, r2, r3 = ratios.complement
    return math.fsum(
        [
            -q.a * omega**q.p3 * r3,
            -q.b * omega**q.p2 * r2,
            -q.c * omega**q.p1 * r1,
            -q.d,
        ]
    )
