"""Product-integration trapezoidal solver for multi-order systems.

Each component k obeys a Caputo derivative of order alpha_k, so its
Volterra form is

    x_k(t) = x_k(0) + I^{alpha_k} g_k(t),
    g(t) = A x(t) + f(t) + phi(x(t)),

and the integral is discretized on a uniform grid t_n = n h by the
product trapezoidal rule (piecewise-linear interpolation of g under the
power-law kernel):

    x_{k,n} = x_k(0) + scale_k * (sum_{j<n} psi_k(n-j) g_{k,j}
                                  + delta_k(n) g_{k,0} + g_{k,n}),
    scale_k = h**alpha_k / Gamma(alpha_k + 2).

The kernel weights, with p = alpha + 1:

    psi(m)   = (m+1)**p - 2 m**p + (m-1)**p      (m >= 1), psi(0) = 1,
    delta(n) = n**p + (alpha+1) n**alpha - (n+1)**p,

collapse to the classical trapezoidal rule when alpha = 1 (psi = 2,
delta = -1, scale = h/2), exactly in floating point because everything
is integer-valued there.  For alpha < 1 and large m the direct formulas
lose most of their bits to cancellation (psi(m) ~ p(p-1) m**(p-2)), so
binomial-series forms take over at m >= 100 where their truncation
error sits below double rounding.

The g_{k,n} appearing on both sides makes each step implicit.  Linear
systems are advanced by one precomputed 3x3 solve; a nonlinearity is
handled by a damped Newton iteration with a fixed-point fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    GridMisaligned,
    LinearPartNotCertified,
    NewtonDivergence,
    StepTooLarge,
)
from .model import MultiOrderSystem, PiecewisePowerForcing, validate

__all__ = [
    "SolverConfig",
    "Trajectory",
    "DecayDiagnostic",
    "BasinRun",
    "fractional_weights",
    "integrate",
    "decay_diagnostic",
    "simulate_nonlinear_basin",
]

SERIES_CUTOVER = 100


@dataclass(frozen=True)
class SolverConfig:
    step: float
    t_end: float
    newton_tol: float = 1e-12
    newton_max_iter: int = 50

    def __post_init__(self):
        if not (self.step > 0.0 and math.isfinite(self.step)):
            raise ConfigError(f"step must be positive and finite, got {self.step!r}")
        if not (self.t_end > 0.0 and math.isfinite(self.t_end)):
            raise ConfigError(f"t_end must be positive and finite, got {self.t_end!r}")

    @property
    def n_steps(self) -> int:
        n = round(self.t_end / self.step)
        if n < 1 or abs(n * self.step - self.t_end) > 1e-9 * self.step:
            raise ConfigError(
                f"t_end {self.t_end} is not an integer multiple of step {self.step}"
            )
        return n


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid solution samples: t has shape (N+1,), x has shape
    (3, N+1) with one row per component."""

    t: np.ndarray
    x: np.ndarray

    def norms(self) -> np.ndarray:
        return np.sqrt((self.x * self.x).sum(axis=0))

    def value_at(self, t: float) -> np.ndarray:
        i = int(round((t - self.t[0]) / (self.t[1] - self.t[0])))
        i = min(max(i, 0), len(self.t) - 1)
        return self.x[:, i].copy()


def _binom_real(p: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (p - i) / (i + 1)
    return out


def fractional_weights(alpha: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoidal kernel weights (psi, delta) for orders in (0, 1].

    psi[m] for m = 0..n (psi[0] = 1 is the weight of the newest sample)
    and delta[m], the correction applied to the oldest sample at step m
    (delta[0] unused).  Direct formulas below the cancellation cutover,
    binomial series beyond it; alpha = 1 stays on the exact direct path
    throughout.
    """
    p = alpha + 1.0
    m = np.arange(n + 1, dtype=float)
    cut = n + 1 if alpha == 1.0 else min(SERIES_CUTOVER, n + 1)

    psi = np.empty(n + 1)
    delta = np.empty(n + 1)
    psi[0] = 1.0
    delta[0] = 0.0

    lo = m[1:cut]
    psi[1:cut] = (lo + 1.0) ** p - 2.0 * lo**p + (lo - 1.0) ** p
    delta[1:cut] = lo**p + p * lo**alpha - (lo + 1.0) ** p

    if cut <= n:
        hi = m[cut:]
        inv2 = hi**-2.0
        # psi(m) = 2 m^p sum_{j>=1} C(p, 2j) m^(-2j)
        s = np.zeros_like(hi)
        for j in range(4, 0, -1):
            s = (s + _binom_real(p, 2 * j)) * inv2
        psi[cut:] = 2.0 * hi**p * s
        # delta(n) = -n^p sum_{k>=2} C(p, k) n^(-k)
        inv = hi**-1.0
        s = np.zeros_like(hi)
        for k in range(9, 1, -1):
            s = (s + _binom_real(p, k)) * inv
        delta[cut:] = -(hi**p) * s * inv
    return psi, delta


def _forcing_grid(system: MultiOrderSystem, t: np.ndarray, step: float) -> np.ndarray:
    for f in system.forcing:
        if isinstance(f, PiecewisePowerForcing) and f.t_break > 0.0:
            ratio = f.t_break / step
            if abs(ratio - round(ratio)) > 1e-9:
                raise GridMisaligned(
                    f"forcing break {f.t_break} does not land on the step grid "
                    f"(step {step})"
                )
    return np.vstack([f.grid(t) for f in system.forcing])


def _newton_step(system, scale, target, x_prev, cfg):
    """Solve x = target + scale * (A x + phi(x)) for one implicit step."""
    a = system.matrix.array
    phi = system.nonlinearity

    def residual(x):
        return x - target - scale * (a @ x + phi.value(x))

    x = x_prev.copy()
    r = residual(x)
    rnorm = float(np.linalg.norm(r))
    tol = cfg.newton_tol * (1.0 + float(np.linalg.norm(target)))
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(cfg.newton_max_iter):
            if rnorm <= tol:
                return x
            jac = np.eye(3) - scale[:, None] * (a + phi.jacobian(x))
            try:
                dx = np.linalg.solve(jac, -r)
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            while lam >= 1.0 / 1024.0:
                x_new = x + lam * dx
                r_new = residual(x_new)
                rn = float(np.linalg.norm(r_new))
                if not math.isfinite(rn):
                    rn = math.inf
                if rn < rnorm or rn <= tol:
                    x, r, rnorm = x_new, r_new, rn
                    break
                lam *= 0.5
            else:
                break
    if rnorm <= tol:
        return x
    # fixed-point fallback for the cases where the Jacobian is a poor
    # guide (strong damping usually means scale is tiny anyway); iterates
    # are allowed to overflow silently because the finiteness check is
    # the divergence detector
    x = x_prev.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(200):
            x_new = target + scale * (a @ x + phi.value(x))
            if not np.isfinite(x_new).all():
                break
            if float(np.linalg.norm(x_new - x)) <= tol:
                return x_new
            x = x_new
    raise NewtonDivergence(
        f"implicit step failed to converge below {tol:.3g} "
        f"(residual {rnorm:.3g}); reduce the step"
    )


def integrate(system: MultiOrderSystem, config: SolverConfig) -> Trajectory:
    """Advance the system from t = 0 to t_end on a uniform grid."""
    validate(system)
    n = config.n_steps
    h = config.step
    t = np.arange(n + 1) * h
    alpha = system.order.alpha
    scale = np.array([h**a / math.gamma(a + 2.0) for a in alpha])
    a_mat = system.matrix.array
    x0 = np.array(system.x0)
    f_grid = _forcing_grid(system, t, h)
    phi = None if system.is_linear else system.nonlinearity

    # psirev[k, i] = psi_k(n - i): makes the history weight slice for
    # step m a contiguous suffix aligned with g[:, :m]
    psirev = np.empty((3, n))
    delta = np.empty((3, n + 1))
    for k in range(3):
        psi_k, delta_k = fractional_weights(alpha[k], n)
        psirev[k] = psi_k[n:0:-1]
        delta[k] = delta_k

    minv = None
    if phi is None:
        try:
            minv = np.linalg.inv(np.eye(3) - scale[:, None] * a_mat)
        except np.linalg.LinAlgError as exc:
            raise StepTooLarge(
                f"I - scale*A is singular at step {h}; choose a different step"
            ) from exc

    x = np.empty((3, n + 1))
    g = np.empty((3, n + 1))
    x[:, 0] = x0
    g0 = a_mat @ x0 + f_grid[:, 0]
    if phi is not None:
        g0 = g0 + phi.value(x0)
    g[:, 0] = g0

    for m in range(1, n + 1):
        hist = np.einsum("ki,ki->k", psirev[:, n - m :], g[:, :m])
        target = x0 + scale * (hist + delta[:, m] * g[:, 0] + f_grid[:, m])
        if phi is None:
            x_m = minv @ target
        else:
            x_m = _newton_step(system, scale, target, x[:, m - 1], config)
        x[:, m] = x_m
        g[:, m] = a_mat @ x_m + f_grid[:, m]
        if phi is not None:
            g[:, m] += phi.value(x_m)
    return Trajectory(t=t, x=x)


@dataclass(frozen=True)
class DecayDiagnostic:
    """Algebraic-decay check: scaled(t) = t**nu * |x(t)| over a time
    window, split into four equal log-time quarters.  A plateau means
    the last quarter's sup stays within a factor of 2 of the third
    quarter's, so the scaled curve has stopped drifting."""

    nu: float
    sup: float
    sup_q3: float
    sup_q4: float
    plateau: bool
    t_window: np.ndarray
    scaled: np.ndarray


def decay_diagnostic(traj: Trajectory, nu: float, window: tuple[float, float]) -> DecayDiagnostic:
    t_lo, t_hi = float(window[0]), float(window[1])
    if not (0.0 < t_lo < t_hi):
        raise ConfigError(f"window must satisfy 0 < lo < hi, got {window!r}")
    mask = (traj.t >= t_lo) & (traj.t <= t_hi)
    tw = traj.t[mask]
    if len(tw) < 8:
        raise ConfigError("window covers too few grid points for a quartered check")
    scaled = tw**nu * traj.norms()[mask]
    edges = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), 5))
    q3 = scaled[(tw >= edges[2]) & (tw <= edges[3])]
    q4 = scaled[(tw >= edges[3]) & (tw <= edges[4])]
    if len(q3) == 0 or len(q4) == 0:
        raise ConfigError("a log-time quarter contains no samples; widen the window")
    sup_q3 = float(q3.max())
    sup_q4 = float(q4.max())
    plateau = 0.5 * sup_q3 <= sup_q4 <= 2.0 * sup_q3
    return DecayDiagnostic(
        nu=nu,
        sup=float(scaled.max()),
        sup_q3=sup_q3,
        sup_q4=sup_q4,
        plateau=plateau,
        t_window=tw,
        scaled=scaled,
    )


@dataclass(frozen=True)
class BasinRun:
    radius: float
    trajectory: Trajectory
    diagnostic: DecayDiagnostic


def _certify_linear_part(system: MultiOrderSystem) -> None:
    from .criteria import Verdict, assess
    from .model import MultiOrderSystem as _Sys

    linear = _Sys(order=system.order, matrix=system.matrix)
    report = assess(linear, with_oracle=True)
    if report.overall is Verdict.STABLE:
        return
    if report.oracle_zero_count == 0:
        return
    raise LinearPartNotCertified(
        "the linear part is not certified stable (no criterion fired Stable "
        f"and the zero count is {report.oracle_zero_count!r}); a basin sweep "
        "would not be interpretable"
    )


def simulate_nonlinear_basin(
    system: MultiOrderSystem,
    radii,
    config: SolverConfig,
    nu: float,
    window: tuple[float, float],
) -> list[BasinRun]:
    """Rerun the system from scaled-down initial states and attach a
    decay diagnostic to each run.

    The initial direction is the configured state normalized (falling
    back to the diagonal direction when it is zero); each radius gives
    x(0) = radius * direction.  Requires the linear part to be
    certified stable first, otherwise the sweep proves nothing.
    """
    _certify_linear_part(system)
    x0 = np.array(system.x0)
    norm = float(np.linalg.norm(x0))
    direction = x0 / norm if norm > 0.0 else np.ones(3) / math.sqrt(3.0)
    runs = []
    for r in radii:
        r = float(r)
        if r <= 0.0:
            raise ConfigError(f"basin radius must be positive, got {r}")
        scaled_system = MultiOrderSystem(
            order=system.order,
            matrix=system.matrix,
            forcing=system.forcing,
            nonlinearity=system.nonlinearity,
            x0=tuple(r * direction),
        )
        traj = integrate(scaled_system, config)
        diag = decay_diagnostic(traj, nu, window)
        runs.append(BasinRun(radius=r, trajectory=traj, diagnostic=diag))
    return runs
