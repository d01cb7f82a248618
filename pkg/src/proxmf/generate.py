"""Seeded model and state generators.

All randomness flows through ``numpy.random.default_rng`` (PCG64) with
an explicit seed, so generated artifacts are reproducible across runs
and machines.
"""

from __future__ import annotations

import math

import numpy as np

from .model import EnergyModel
from .objective import MeanFieldState

GENERATOR_ID = "numpy-default-rng-pcg64"


def ising_grid_model(n: int, seed: int, coupling: float = 1.0) -> EnergyModel:
    """Pairwise +/-coupling terms on a near-square grid of ``n`` sites.

    Sites are laid out row-major on a ``rows x cols`` grid with
    ``rows = floor(sqrt(n))``; each horizontal and vertical neighbor pair
    gets a coupling of magnitude ``coupling`` with a seeded random sign.
    Priors are uniform 0.5.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    rows = max(1, int(math.isqrt(n)))
    cols = (n + rows - 1) // rows
    terms = []
    for site in range(n):
        r, c = divmod(site, cols)
        right = site + 1
        if c + 1 < cols and right < n:
            sign = 1.0 if rng.integers(0, 2) else -1.0
            terms.append(((site, right), sign * coupling))
        down = site + cols
        if down < n:
            sign = 1.0 if rng.integers(0, 2) else -1.0
            terms.append(((site, down), sign * coupling))
    return EnergyModel(n=n, terms=terms, priors=[0.5] * n)


def random_poly_model(
    n: int,
    seed: int,
    n_terms: int | None = None,
    max_arity: int = 3,
    coeff_scale: float = 1.0,
    uniform_priors: bool = True,
) -> EnergyModel:
    """Random sparse polynomial: uniform coefficients on random small varsets.

    Draws ``n_terms`` (default ``2 n``) candidate terms with arity
    1..``max_arity`` and coefficients uniform on
    ``[-coeff_scale, coeff_scale]``; duplicate varsets keep the first
    draw.  Priors are 0.5 unless ``uniform_priors`` is false, in which
    case they are drawn uniform on [0.15, 0.85].
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    count = 2 * n if n_terms is None else n_terms
    terms: dict[tuple[int, ...], float] = {}
    for _ in range(count):
        arity = int(rng.integers(1, min(max_arity, n) + 1))
        vs = tuple(sorted(int(v) for v in rng.choice(n, size=arity, replace=False)))
        if vs not in terms:
            terms[vs] = float(rng.uniform(-coeff_scale, coeff_scale))
    if uniform_priors:
        priors = [0.5] * n
    else:
        priors = [float(p) for p in rng.uniform(0.15, 0.85, size=n)]
    return EnergyModel(n=n, terms=list(terms.items()), priors=priors)


def random_state(
    model: EnergyModel,
    rng: np.random.Generator,
    low: float = 0.05,
    high: float = 0.95,
) -> MeanFieldState:
    """Random strictly interior state, away from the unit-interval edges."""
    return MeanFieldState(rng.uniform(low, high, size=model.n))
