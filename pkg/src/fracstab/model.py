"""Value types for three-dimensional multi-order fractional systems.

A system couples three scalar Caputo derivatives of possibly different
orders alpha_k in (0, 1] through a constant 3x3 matrix, an optional
per-component forcing term, and an optional polynomial nonlinearity:

    D^{alpha_k} x_k(t) = (A x(t))_k + f_k(t) + g_k(x(t)),   k = 1, 2, 3.

Everything here is a plain immutable container plus `validate`, which
checks the numeric contracts and returns the system unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadForcingTable,
    BadNonlinearity,
    NonFiniteEntry,
    OrderOutOfRange,
)

__all__ = [
    "MultiOrder",
    "SystemMatrix",
    "ZeroForcing",
    "ConstantForcing",
    "PiecewisePowerForcing",
    "TableForcing",
    "PolynomialTerm",
    "NonlinearitySpec",
    "MultiOrderSystem",
    "validate",
]


@dataclass(frozen=True)
class MultiOrder:
    """The triple of derivative orders (alpha_1, alpha_2, alpha_3)."""

    alpha: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))

    @property
    def total(self) -> float:
        """Sum of the three orders; the leading exponent of the
        characteristic function."""
        return self.alpha[0] + self.alpha[1] + self.alpha[2]

    def ascending_indices(self) -> tuple[int, int, int]:
        """Indices that sort the orders ascending; ties keep original
        component order."""
        return tuple(sorted(range(3), key=lambda i: (self.alpha[i], i)))


class SystemMatrix:
    """Immutable wrapper around the 3x3 coupling matrix."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.shape != (3, 3):
            raise NonFiniteEntry(f"matrix must be 3x3, got shape {a.shape}")
        a.setflags(write=False)
        self._a = a

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __getitem__(self, ij):
        return float(self._a[ij])

    def principal_minor(self, k: int) -> float:
        """Determinant of the 2x2 block left after deleting row and
        column k (0-based)."""
        i, j = [m for m in range(3) if m != k]
        a = self._a
        return float(a[i, i] * a[j, j] - a[i, j] * a[j, i])

    def det(self) -> float:
        """Determinant by cofactor expansion along the first row.

        Kept explicit (not a library call) so the constant term of the
        characteristic function shares arithmetic with the principal
        minors; tests cross-check against numpy.linalg.det.
        """
        a = self._a
        return float(
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )

    def frobenius(self) -> float:
        return float(np.sqrt((self._a * self._a).sum()))

    def __repr__(self):
        return f"SystemMatrix({self._a.tolist()!r})"


@dataclass(frozen=True)
class ZeroForcing:
    """f(t) = 0."""

    def value(self, t: float) -> float:
        return 0.0

    def grid(self, t: np.ndarray) -> np.ndarray:
        return np.zeros_like(t)


@dataclass(frozen=True)
class ConstantForcing:
    """f(t) = value."""

    const: float

    def value(self, t: float) -> float:
        return self.const

    def grid(self, t: np.ndarray) -> np.ndarray:
        return np.full_like(t, self.const)


@dataclass(frozen=True)
class PiecewisePowerForcing:
    """f(t) = constant_before for t < t_break, t**exponent_after after.

    The break must later land on the integration grid; that is checked
    by the solver, not here.
    """

    t_break: float
    constant_before: float
    exponent_after: float

    def value(self, t: float) -> float:
        if t < self.t_break:
            return self.constant_before
        return float(t) ** self.exponent_after

    def grid(self, t: np.ndarray) -> np.ndarray:
        out = np.full_like(t, self.constant_before)
        after = t >= self.t_break
        out[after] = t[after] ** self.exponent_after
        return out


@dataclass(frozen=True)
class TableForcing:
    """Piecewise-linear interpolation of sampled values; constant
    extrapolation beyond the sampled range."""

    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(v) for v in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    def value(self, t: float) -> float:
        return float(np.interp(t, self.times, self.values))

    def grid(self, t: np.ndarray) -> np.ndarray:
        return np.interp(t, self.times, self.values)


ForcingSpec = ZeroForcing | ConstantForcing | PiecewisePowerForcing | TableForcing


@dataclass(frozen=True)
class PolynomialTerm:
    """coefficient * x1**e1 * x2**e2 * x3**e3 with integer exponents."""

    coefficient: float
    exponents: tuple[int, int, int]


@dataclass(frozen=True)
class NonlinearitySpec:
    """Per-component polynomial perturbations of total degree >= 2.

    terms[k] is the tuple of monomials added to component k.
    """

    terms: tuple[tuple[PolynomialTerm, ...], tuple[PolynomialTerm, ...], tuple[PolynomialTerm, ...]]

    def value(self, x: np.ndarray) -> np.ndarray:
        out = np.zeros(3)
        for k in range(3):
            for term in self.terms[k]:
                e = term.exponents
                out[k] += term.coefficient * x[0] ** e[0] * x[1] ** e[1] * x[2] ** e[2]
        return out

    def jacobian(self, x: np.ndarray) -> np.ndarray:
        jac = np.zeros((3, 3))
        for k in range(3):
            for term in self.terms[k]:
                e = term.exponents
                for i in range(3):
                    if e[i] == 0:
                        continue
                    d = term.coefficient * e[i] * x[i] ** (e[i] - 1)
                    for j in range(3):
                        if j != i:
                            d *= x[j] ** e[j]
                    jac[k, i] += d
        return jac

    def is_empty(self) -> bool:
        return all(len(t) == 0 for t in self.terms)


def _zero_forcing_triple():
    return (ZeroForcing(), ZeroForcing(), ZeroForcing())


@dataclass(frozen=True)
class MultiOrderSystem:
    """A complete system instance: orders, coupling matrix, forcing,
    optional nonlinearity, and initial state."""

    order: MultiOrder
    matrix: SystemMatrix
    forcing: tuple[ForcingSpec, ForcingSpec, ForcingSpec] = field(
        default_factory=_zero_forcing_triple
    )
    nonlinearity: NonlinearitySpec | None = None
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))

    @property
    def is_linear(self) -> bool:
        return self.nonlinearity is None or self.nonlinearity.is_empty()

    @property
    def is_unforced(self) -> bool:
        return all(isinstance(f, ZeroForcing) for f in self.forcing)


def _check_forcing(f: ForcingSpec) -> None:
    if isinstance(f, ZeroForcing):
        return
    if isinstance(f, ConstantForcing):
        if not math.isfinite(f.const):
            raise BadForcingTable("constant forcing value must be finite")
        return
    if isinstance(f, PiecewisePowerForcing):
        for v in (f.t_break, f.constant_before, f.exponent_after):
            if not math.isfinite(v):
                raise BadForcingTable("piecewise power forcing parameter not finite")
        if f.t_break < 0:
            raise BadForcingTable("forcing breakpoint must be nonnegative")
        if f.t_break == 0 and f.exponent_after < 0:
            raise BadForcingTable(
                "power-law tail with negative exponent blows up at t = 0"
            )
        return
    if isinstance(f, TableForcing):
        if len(f.times) < 2 or len(f.times) != len(f.values):
            raise BadForcingTable("forcing table needs matching t/value samples")
        if not all(math.isfinite(v) for v in f.times + f.values):
            raise BadForcingTable("forcing table contains non-finite samples")
        if any(b <= a for a, b in zip(f.times, f.times[1:])):
            raise BadForcingTable("forcing table times must increase strictly")
        return
    raise BadForcingTable(f"unknown forcing kind {type(f).__name__}")


def validate(system: MultiOrderSystem) -> MultiOrderSystem:
    """Check the numeric contracts; return the same instance (idempotent)."""
    for a in system.order.alpha:
        if not (0.0 < a <= 1.0):  # also rejects NaN
            raise OrderOutOfRange(f"derivative order {a!r} outside (0, 1]")
    if not np.isfinite(system.matrix.array).all():
        raise NonFiniteEntry("matrix contains a non-finite entry")
    if not all(math.isfinite(v) for v in system.x0):
        raise NonFiniteEntry("initial state contains a non-finite entry")
    for f in system.forcing:
        _check_forcing(f)
    if system.nonlinearity is not None:
        for comp in system.nonlinearity.terms:
            for term in comp:
                if not math.isfinite(term.coefficient):
                    raise NonFiniteEntry("nonlinearity coefficient not finite")
                if len(term.exponents) != 3 or any(
                    (not isinstance(e, int)) or e < 0 for e in term.exponents
                ):
                    raise BadNonlinearity(
                        "monomial exponents must be nonnegative integers"
                    )
                if sum(term.exponents) < 2:
                    raise BadNonlinearity(
                        "nonlinear terms must have total degree >= 2"
                    )
    return system
