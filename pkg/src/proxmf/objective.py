"""The variational objective and its exact enumeration counterpart.

For a product distribution with Bernoulli means ``q`` the objective is

    objective(q) = mean_energy(q) + sum_i bernoulli_kl(q_i, prior_i),

which equals the divergence of the product distribution from the model's
target distribution up to the additive constant ``log Z``.  The
enumeration oracle :func:`exact_kl` computes that divergence and ``log Z``
directly, providing the independent cross-check used throughout the test
suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ENUMERATION_LIMIT, EnergyModel, energy_table
from .numerics import log_sum_exp, logit


@dataclass(frozen=True, eq=False)
class MeanFieldState:
    """Vector of Bernoulli means, each strictly inside (0, 1)."""

    q: np.ndarray = field(repr=False)

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.ndim != 1:
            raise ValueError(f"state must be a vector, got shape {q.shape}")
        if not np.all(np.isfinite(q)):
            raise ValueError("state contains non-finite entries")
        if np.any(q <= 0.0) or np.any(q >= 1.0):
            raise ValueError("state entries must lie strictly inside (0, 1)")
        q.flags.writeable = False
        object.__setattr__(self, "q", q)

    def __len__(self) -> int:
        return self.q.shape[0]

    def replace_coord(self, i: int, value: float) -> "MeanFieldState":
        q = self.q.copy()
        q[i] = value
        return MeanFieldState(q)


@dataclass(frozen=True)
class ExactKL:
    """Result of brute-force enumeration: ``log Z`` and the exact divergence."""

    log_z: float
    kl: float


def _check_dims(model: EnergyModel, state: MeanFieldState) -> None:
    if len(state) != model.n:
        raise ValueError(
            f"state has {len(state)} coordinates, model has {model.n}"
        )


def mean_energy(model: EnergyModel, state: MeanFieldState) -> float:
    """Expected energy under the product distribution.

    This is the multilinear extension of the energy polynomial: each term
    contributes its coefficient times the product of the means of its
    variables.
    """
    _check_dims(model, state)
    q = state.q
    total = 0.0
    for vs, c in model.terms:
        prod = 1.0
        for j in vs:
            prod *= q[j]
        total += c * prod
    return float(total)


def conditional_gap(model: EnergyModel, state: MeanFieldState, i: int) -> float:
    """Expected-energy gap between clamping variable ``i`` to 1 versus 0.

    Equals the partial derivative of :func:`mean_energy` in coordinate
    ``i``: the sum over terms containing ``i`` of the coefficient times
    the product of the remaining means.
    """
    _check_dims(model, state)
    if not 0 <= i < model.n:
        raise IndexError(f"variable index {i} out of range [0, {model.n})")
    q = state.q
    total = 0.0
    for c, others in model.terms_by_variable[i]:
        total += c * float(np.prod(q[others]))
    return float(total)


def bernoulli_kl(q, q0):
    """KL divergence between Bernoulli(q) and Bernoulli(q0), elementwise.

    Nonnegative, zero iff ``q == q0``, and 1-strongly convex in ``q`` on
    (0, 1).  This single primitive plays two roles: summed against the
    priors it is the entropy part of the objective, and against the
    previous iterate it is the per-coordinate proximal penalty.
    """
    q = np.asarray(q, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    out = q * (np.log(q) - np.log(q0)) + (1.0 - q) * (
        np.log1p(-q) - np.log1p(-q0)
    )
    return out if out.ndim else float(out)


def bernoulli_kl_grad(q, q0):
    """Derivative of :func:`bernoulli_kl` in ``q``: the log-odds difference."""
    q = np.asarray(q, dtype=float)
    q0 = np.asarray(q0, dtype=float)
    out = np.asarray(
        (np.log(q) - np.log1p(-q)) - (np.log(q0) - np.log1p(-q0))
    )
    return out if out.ndim else float(out)


def objective(model: EnergyModel, state: MeanFieldState) -> float:
    """Variational objective: expected energy plus prior-divergence terms."""
    _check_dims(model, state)
    entropy = float(np.sum(bernoulli_kl(state.q, model.priors_array)))
    return mean_energy(model, state) + entropy


def gradient(model: EnergyModel, state: MeanFieldState) -> np.ndarray:
    """Gradient of the objective at a strictly interior state."""
    _check_dims(model, state)
    gaps = np.array(
        [conditional_gap(model, state, i) for i in range(model.n)]
    )
    return gaps + logit(state.q) - model.prior_logits


def hessian(model: EnergyModel, state: MeanFieldState) -> np.ndarray:
    """Hessian of the objective; exactly symmetric by construction.

    The multilinear energy has no pure second derivatives, so the
    diagonal is ``1/q_i + 1/(1-q_i)`` from the entropy terms alone; the
    (i, j) entry sums, over terms containing both variables, the
    coefficient times the product of the other means.
    """
    _check_dims(model, state)
    q = state.q
    h = np.zeros((model.n, model.n))
    for vs, c in model.terms:
        if len(vs) < 2:
            continue
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                prod = 1.0
                for k in vs:
                    if k != vs[a] and k != vs[b]:
                        prod *= q[k]
                h[vs[a], vs[b]] += c * prod
                h[vs[b], vs[a]] += c * prod
    diag = 1.0 / q + 1.0 / (1.0 - q)
    h[np.diag_indices(model.n)] = diag
    return h


def exact_kl(model: EnergyModel, state: MeanFieldState) -> ExactKL:
    """Exact divergence and ``log Z`` by full enumeration of {0,1}^n.

    ``Z`` is accumulated through log-sum-exp so large energies cannot
    overflow.  The reduction order is fixed, so results are bitwise
    reproducible.  Refuses models beyond the enumeration limit.
    """
    _check_dims(model, state)
    if model.n > ENUMERATION_LIMIT:
        raise ValueError(
            f"exact enumeration limited to {ENUMERATION_LIMIT} variables, "
            f"got n = {model.n}"
        )
    energies = energy_table(model)
    idx = np.arange(1 << model.n, dtype=np.uint32)

    log_p0 = np.zeros(idx.shape[0])
    log_q = np.zeros(idx.shape[0])
    p0 = model.priors_array
    q = state.q
    for i in range(model.n):
        bit = (idx >> np.uint32(i)) & np.uint32(1)
        on = bit == 1
        log_p0 += np.where(on, np.log(p0[i]), np.log1p(-p0[i]))
        log_q += np.where(on, np.log(q[i]), np.log1p(-q[i]))

    log_z = log_sum_exp(-energies + log_p0)
    log_p = -energies + log_p0 - log_z
    kl = float(np.sum(np.exp(log_q) * (log_q - log_p)))
    return ExactKL(log_z=log_z, kl=max(kl, 0.0))
