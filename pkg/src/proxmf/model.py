"""Binary energy models: sparse multilinear energies over {0,1}^n.

An :class:`EnergyModel` bundles the number of variables, the energy
polynomial (a list of ``(variables, coefficient)`` terms) and strictly
interior Bernoulli prior means.  The target distribution it induces is

    P(x) = exp(-energy(x)) * prod_i prior_i(x_i) / Z,

and everything downstream (objective, solver, diagnostics) is phrased in
terms of this model.  Models are immutable and safe to share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .numerics import logit, sigmoid

ENUMERATION_LIMIT = 20

Term = tuple[tuple[int, ...], float]


class ModelError(ValueError):
    """A model invariant is violated; the message names the first one."""


@dataclass(frozen=True, eq=True)
class EnergyModel:
    """Sparse multilinear energy over ``n`` binary variables.

    ``terms`` maps each variable subset (a strictly increasing index
    tuple; the empty tuple is a constant offset) to a finite real
    coefficient.  ``priors`` are the Bernoulli prior means, each strictly
    inside (0, 1).
    """

    n: int
    terms: tuple[Term, ...]
    priors: tuple[float, ...]

    def __init__(self, n: int, terms: Sequence, priors: Sequence):
        object.__setattr__(self, "n", n)
        object.__setattr__(
            self, "terms", tuple((tuple(vs), float(c)) for vs, c in terms)
        )
        object.__setattr__(self, "priors", tuple(float(p) for p in priors))

    def validate(self) -> None:
        """Raise :class:`ModelError` on the first violated invariant."""
        if not isinstance(self.n, int) or self.n < 1:
            raise ModelError(f"n must be a positive integer, got {self.n!r}")
        if len(self.priors) != self.n:
            raise ModelError(
                f"expected {self.n} priors, got {len(self.priors)}"
            )
        for i, p in enumerate(self.priors):
            if not math.isfinite(p) or not 0.0 < p < 1.0:
                raise ModelError(
                    f"prior not interior: priors[{i}] = {p!r} is outside (0, 1)"
                )
        seen: set[tuple[int, ...]] = set()
        for k, (vs, c) in enumerate(self.terms):
            for j in vs:
                if not isinstance(j, (int, np.integer)) or isinstance(j, bool):
                    raise ModelError(
                        f"variable index not an integer in terms[{k}]: {j!r}"
                    )
                if not 0 <= j < self.n:
                    raise ModelError(
                        f"variable index out of range in terms[{k}]: "
                        f"{j} not in [0, {self.n})"
                    )
            if any(a >= b for a, b in zip(vs, vs[1:])):
                raise ModelError(
                    f"varset not strictly increasing in terms[{k}]: {vs}"
                )
            if vs in seen:
                raise ModelError(f"duplicate varset in terms[{k}]: {vs}")
            seen.add(vs)
            if not math.isfinite(c):
                raise ModelError(
                    f"non-finite coefficient in terms[{k}]: {c!r}"
                )

    @cached_property
    def priors_array(self) -> np.ndarray:
        arr = np.array(self.priors, dtype=float)
        arr.flags.writeable = False
        return arr

    @cached_property
    def prior_logits(self) -> np.ndarray:
        arr = logit(self.priors_array)
        arr.flags.writeable = False
        return arr

    @cached_property
    def terms_by_variable(self) -> tuple[tuple[tuple[float, np.ndarray], ...], ...]:
        """For each variable i: the terms containing i, as (coeff, other indices)."""
        buckets: list[list[tuple[float, np.ndarray]]] = [[] for _ in range(self.n)]
        for vs, c in self.terms:
            for j in vs:
                others = np.array([k for k in vs if k != j], dtype=np.intp)
                others.flags.writeable = False
                buckets[j].append((c, others))
        return tuple(tuple(b) for b in buckets)


def energy(model: EnergyModel, x) -> float:
    """Evaluate the energy polynomial at a binary configuration ``x``."""
    x = np.asarray(x)
    if x.shape != (model.n,):
        raise ValueError(
            f"configuration has shape {x.shape}, expected ({model.n},)"
        )
    xf = x.astype(float)
    total = 0.0
    for vs, c in model.terms:
        prod = 1.0
        for j in vs:
            prod *= xf[j]
        total += c * prod
    return float(total)


def energy_table(model: EnergyModel) -> np.ndarray:
    """Energies of all 2^n configurations; configuration ``k`` sets
    variable ``i`` to bit ``i`` of ``k``.

    Refuses models with more than ``ENUMERATION_LIMIT`` variables.
    """
    if model.n > ENUMERATION_LIMIT:
        raise ValueError(
            f"enumeration limited to {ENUMERATION_LIMIT} variables, "
            f"got n = {model.n}"
        )
    idx = np.arange(1 << model.n, dtype=np.uint32)
    vals = np.zeros(idx.shape[0], dtype=float)
    for vs, c in model.terms:
        if not vs:
            vals += c
            continue
        mask = np.uint32(0)
        for j in vs:
            mask |= np.uint32(1) << np.uint32(j)
        vals += c * ((idx & mask) == mask)
    return vals


@dataclass(frozen=True)
class EnergyBounds:
    """Enclosure ``lower <= energy(x) <= upper`` over all configurations.

    ``mode`` is ``"exact"`` (both endpoints attained, found by
    enumeration) or ``"interval"`` (coefficient-sign bound, always
    enclosing the exact range).
    """

    lower: float
    upper: float
    mode: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(
                f"lower bound {self.lower} exceeds upper bound {self.upper}"
            )
        if self.mode not in ("exact", "interval"):
            raise ValueError(f"unknown bounds mode {self.mode!r}")

    @property
    def spread(self) -> float:
        return self.upper - self.lower


def energy_bounds(model: EnergyModel, max_exact_n: int = ENUMERATION_LIMIT) -> EnergyBounds:
    """Bound the energy over all configurations.

    Exact by enumeration when ``n <= max_exact_n``; otherwise the
    interval bound: the constant offset plus the sum of each remaining
    coefficient's possible contribution (``min(0, c)`` / ``max(0, c)``).
    """
    if model.n <= min(max_exact_n, ENUMERATION_LIMIT):
        vals = energy_table(model)
        return EnergyBounds(float(vals.min()), float(vals.max()), "exact")
    lower = 0.0
    upper = 0.0
    for vs, c in model.terms:
        if not vs:
            lower += c
            upper += c
        else:
            lower += min(0.0, c)
            upper += max(0.0, c)
    return EnergyBounds(lower, upper, "interval")


@dataclass(frozen=True)
class IterateBox:
    """Per-coordinate interval that confines prior-initialized solver runs.

    Both endpoint vectors are strictly inside (0, 1); the box collapses
    to the priors exactly when the energy bounds are degenerate.
    """

    lower: np.ndarray = field(repr=False)
    upper: np.ndarray = field(repr=False)

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).copy()
        hi = np.asarray(self.upper, dtype=float).copy()
        if lo.shape != hi.shape:
            raise ValueError("box endpoint vectors have mismatched shapes")
        if np.any(lo > hi):
            raise ValueError("box has lower > upper in some coordinate")
        if np.any(lo <= 0.0) or np.any(hi >= 1.0):
            raise ValueError("box endpoints must be strictly inside (0, 1)")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    def contains(self, q, tol: float = 0.0) -> bool:
        q = np.asarray(q, dtype=float)
        return bool(
            np.all(q >= self.lower - tol) and np.all(q <= self.upper + tol)
        )


def iterate_box(model: EnergyModel, bounds: EnergyBounds) -> IterateBox:
    """Compute the confinement box implied by an energy enclosure.

    Each coordinate interval is the prior log-odds shifted down/up by the
    energy spread and mapped back through the logistic.  A zero spread
    returns the priors themselves, exactly.
    """
    p0 = model.priors_array
    spread = bounds.spread
    if spread == 0.0:
        return IterateBox(p0.copy(), p0.copy())
    base = logit(p0)
    lo = sigmoid(base - spread)
    hi = sigmoid(base + spread)
    # Guard against logistic saturation for extreme spreads so the box
    # stays strictly interior and reciprocals of its endpoints are finite.
    lo = np.maximum(lo, 1e-300)
    hi = np.minimum(hi, 1.0 - 1e-16)
    return IterateBox(lo, hi)
