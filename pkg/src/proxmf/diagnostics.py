"""Machine checks for the solver's convergence certificate.

A damped run started at the priors is guaranteed three things: the
objective decreases by at least ``lam/2`` times the squared step, the
gradient norm is bounded by a computable constant times the step norm,
and every iterate stays inside a computable box.  The functions here
evaluate each guarantee on a recorded trace, estimate the asymptotic
rate regime from the tail of the trace, and test positive definiteness
of the Hessian at the limit (which is what makes the rate geometric).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import EnergyModel, EnergyBounds, IterateBox, energy_bounds, iterate_box
from .objective import MeanFieldState, hessian
from .solver import CONVERGED, IterationTrace

RATE_LINEAR = "linear"
RATE_SUBLINEAR = "sublinear"
RATE_INCONCLUSIVE = "inconclusive"

# Distances below this are float noise around the limit proxy and are
# excluded from rate fits.
_DISTANCE_FLOOR = 1e-13
_MIN_FIT_POINTS = 5
_FIT_QUALITY_THRESHOLD = 0.98

# Eigenvalues above this count as strictly positive curvature.
_EIGENVALUE_FLOOR = 1e-10


class TraceTooShortError(ValueError):
    """The trace does not contain enough sweeps for the requested check."""


@dataclass(frozen=True)
class AnalysisConstants:
    """Model-level constants entering the convergence certificate.

    mean_energy_lipschitz:
        Bound on the gradient norm of the expected energy
        (``max(0, upper energy bound) * sqrt(n)``).
    penalty_grad_lipschitz:
        Slope bound for the log-odds difference over the confinement box
        (``max_i 1/lower_i + 1/(1 - upper_i)``).
    gradient_bound_coeff:
        The constant relating gradient norm to step norm:
        ``2 * penalty_grad_lipschitz + sqrt(n - 1) * mean_energy_lipschitz``.
    """

    bounds: EnergyBounds
    box: IterateBox
    mean_energy_lipschitz: float
    penalty_grad_lipschitz: float
    gradient_bound_coeff: float


def compute_constants(
    model: EnergyModel, max_exact_n: int = 20
) -> AnalysisConstants:
    """Compute the certificate constants for a model."""
    model.validate()
    bounds = energy_bounds(model, max_exact_n=max_exact_n)
    box = iterate_box(model, bounds)
    n = model.n
    # A negative upper energy bound would make the stated formula
    # negative; the gradient-of-mean-energy bound is only informative at
    # zero or above, so clamp there.
    k_energy = max(bounds.upper, 0.0) * math.sqrt(n)
    k_penalty = float(np.max(1.0 / box.lower + 1.0 / (1.0 - box.upper)))
    coeff = 2.0 * k_penalty + math.sqrt(max(n - 1, 0)) * k_energy
    return AnalysisConstants(
        bounds=bounds,
        box=box,
        mean_energy_lipschitz=k_energy,
        penalty_grad_lipschitz=k_penalty,
        gradient_bound_coeff=coeff,
    )


@dataclass(frozen=True)
class CheckEntry:
    """Outcome of one per-sweep inequality: slack <= 0 means it held."""

    sweep: int
    passed: bool
    slack: float


@dataclass(frozen=True)
class CheckReport:
    name: str
    entries: tuple[CheckEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def worst_slack(self) -> float:
        return max((e.slack for e in self.entries), default=float("-inf"))

    @property
    def failing_sweeps(self) -> tuple[int, ...]:
        return tuple(e.sweep for e in self.entries if not e.passed)


def _require_sweeps(trace: IterationTrace, needed: int, check: str) -> None:
    if trace.sweeps < needed:
        raise TraceTooShortError(
            f"trace too short for {check}: has {trace.sweeps} sweep(s), "
            f"needs at least {needed}"
        )


def check_sufficient_decrease(
    trace: IterationTrace, lam: float, tol: float = 1e-10
) -> CheckReport:
    """Verify the damped-descent inequality on every consecutive pair.

    For each recorded transition, the next objective value plus
    ``lam/2`` times the squared step must not exceed the previous
    objective value, up to relative slack ``tol``.
    """
    _require_sweeps(trace, 2, "sufficient-decrease check")
    entries = []
    recs = trace.records
    for prev, cur in zip(recs, recs[1:]):
        step_sq = float(np.sum((cur.q - prev.q) ** 2))
        lhs = cur.g + 0.5 * lam * step_sq
        rhs = prev.g + tol * (1.0 + abs(prev.g))
        slack = lhs - rhs
        entries.append(CheckEntry(cur.sweep, slack <= 0.0, slack))
    return CheckReport("sufficient_decrease", tuple(entries))


def check_gradient_bound(
    trace: IterationTrace, constants: AnalysisConstants, tol: float = 1e-9
) -> CheckReport:
    """Verify the gradient-versus-step bound at every post-sweep state.

    Checks ``grad_norm <= coeff * step_norm * (1 + tol) + 1e-12`` for
    each sweep, with the step norm recomputed from consecutive
    snapshots.  Meaningful for prior-initialized runs (the box behind
    the constant only confines those).
    """
    _require_sweeps(trace, 2, "gradient-bound check")
    coeff = constants.gradient_bound_coeff
    entries = []
    recs = trace.records
    for prev, cur in zip(recs, recs[1:]):
        step = float(np.linalg.norm(cur.q - prev.q))
        slack = cur.grad_norm - (coeff * step * (1.0 + tol) + 1e-12)
        entries.append(CheckEntry(cur.sweep, slack <= 0.0, slack))
    return CheckReport("gradient_bound", tuple(entries))


def check_box_membership(
    trace: IterationTrace, box: IterateBox, tol: float = 1e-12
) -> CheckReport:
    """Verify every recorded state lies inside the confinement box.

    The guarantee is conditional on the starting state being inside the
    box; a failure on a run flagged ``init_within_box=False`` indicates
    nothing about the solver.
    """
    if not trace.records:
        raise ValueError("trace has no records")
    entries = []
    for rec in trace.records:
        below = float(np.max(box.lower - rec.q))
        above = float(np.max(rec.q - box.upper))
        slack = max(below, above) - tol
        entries.append(CheckEntry(rec.sweep, slack <= 0.0, slack))
    return CheckReport("box_membership", tuple(entries))


@dataclass(frozen=True)
class RateFitReport:
    """Asymptotic rate classification fitted to the trace tail.

    ``regime`` is ``"linear"`` (geometric decay, ``tau`` set),
    ``"sublinear"`` (power-law decay, ``exponent_estimate`` set: the
    implied Lojasiewicz exponent in (1/2, 1)) or ``"inconclusive"``.
    """

    regime: str
    tau: Optional[float]
    exponent_estimate: Optional[float]
    fit_quality: float
    window: int
    reason: Optional[str] = None


def _fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line fit returning (slope, intercept, r_squared)."""
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    dy = y - ym
    denom = float(np.sum(dx * dx))
    if denom == 0.0:
        return 0.0, float(ym), 0.0
    slope = float(np.sum(dx * dy)) / denom
    intercept = float(ym - slope * xm)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum(dy**2))
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else 0.0
    else:
        r2 = 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def fit_rate(trace: IterationTrace, window: int) -> RateFitReport:
    """Classify the tail decay of distances to the limit point.

    Uses the final iterate as the limit proxy and the last ``window``
    sweeps before it as fit data.  Distances below the float-noise floor
    are dropped.  A geometric model (log-distance linear in sweep index)
    and a power-law model (log-distance linear in log sweep index) are
    fitted by least squares; the better one wins if its fit quality
    reaches the threshold, with the geometric model preferred on ties.
    """
    if trace.reason != CONVERGED:
        raise ValueError(
            f"rate fit requires a converged trace, got reason {trace.reason!r}"
        )
    total = trace.sweeps
    if not 1 <= window <= total - 1:
        raise ValueError(
            f"window must be in [1, {total - 1}] for this trace, got {window}"
        )
    limit = trace.records[-1].q
    ts = []
    ds = []
    for rec in trace.records[total - window : total]:
        d = float(np.linalg.norm(rec.q - limit))
        if d >= _DISTANCE_FLOOR:
            ts.append(rec.sweep)
            ds.append(d)

    def inconclusive(reason: str, quality: float = 0.0) -> RateFitReport:
        return RateFitReport(
            regime=RATE_INCONCLUSIVE,
            tau=None,
            exponent_estimate=None,
            fit_quality=quality,
            window=window,
            reason=reason,
        )

    if len(ds) < _MIN_FIT_POINTS:
        return inconclusive(
            f"only {len(ds)} usable distances (need {_MIN_FIT_POINTS})"
        )

    t = np.asarray(ts, dtype=float)
    log_d = np.log(np.asarray(ds))
    geo_slope, _, geo_r2 = _fit_line(t, log_d)
    pow_slope, _, pow_r2 = _fit_line(np.log(t), log_d)

    geo_valid = geo_slope < 0.0
    pow_valid = pow_slope < 0.0
    if geo_valid and (geo_r2 >= pow_r2 or not pow_valid):
        if geo_r2 >= _FIT_QUALITY_THRESHOLD:
            return RateFitReport(
                regime=RATE_LINEAR,
                tau=math.exp(geo_slope),
                exponent_estimate=None,
                fit_quality=geo_r2,
                window=window,
            )
        return inconclusive("geometric fit below quality threshold", geo_r2)
    if pow_valid:
        if pow_r2 >= _FIT_QUALITY_THRESHOLD:
            decay = -pow_slope
            theta = (1.0 + decay) / (1.0 + 2.0 * decay)
            return RateFitReport(
                regime=RATE_SUBLINEAR,
                tau=None,
                exponent_estimate=theta,
                fit_quality=pow_r2,
                window=window,
            )
        return inconclusive("power-law fit below quality threshold", pow_r2)
    return inconclusive("distances are not decreasing over the window")


def check_second_order(
    model: EnergyModel, state: MeanFieldState
) -> tuple[bool, float]:
    """Smallest Hessian eigenvalue at ``state`` and whether it is positive.

    Positive definiteness at the limit point is the condition under
    which the asymptotic rate is geometric.  Uses a dense symmetric
    eigendecomposition, so intended for moderate ``n``.
    """
    if model.n > 1000:
        raise ValueError(
            f"dense eigendecomposition limited to 1000 variables, got {model.n}"
        )
    h = hessian(model, state)
    min_eig = float(np.linalg.eigvalsh(h)[0])
    return min_eig > _EIGENVALUE_FLOOR, min_eig
