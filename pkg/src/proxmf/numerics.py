"""Small numerically-careful kernels shared across the package.

Everything here accepts scalars or numpy arrays and never forms
``exp`` of a large positive argument.
"""

from __future__ import annotations

import numpy as np

# Clamp targets keeping downstream reciprocals and logits finite.
_MIN_PROB = 1e-300
_MAX_PROB = 1.0 - 1e-16


def sigmoid(z):
    """Overflow-safe logistic ``1 / (1 + exp(-z))``.

    Computed as ``exp(-logaddexp(0, -z))`` so the exponential argument is
    always <= 0.  Saturates to exactly 0.0 / 1.0 only past |z| ~ 745.
    """
    z = np.asarray(z, dtype=float)
    out = np.exp(-np.logaddexp(0.0, -z))
    return out if out.ndim else float(out)


def logit(p):
    """Log-odds ``log(p / (1 - p))`` for p strictly inside (0, 1)."""
    p = np.asarray(p, dtype=float)
    out = np.log(p) - np.log1p(-p)
    return out if out.ndim else float(out)


def clamp_open_unit(p):
    """Clamp values into the open interval (0, 1).

    Only rescues float saturation at the endpoints; values already
    interior pass through unchanged.
    """
    p = np.asarray(p, dtype=float)
    out = np.clip(p, _MIN_PROB, _MAX_PROB)
    return out if out.ndim else float(out)


def log_sum_exp(values: np.ndarray) -> float:
    """``log(sum(exp(values)))`` with the usual max shift.

    Uses a single fixed-order numpy reduction so repeated calls on the
    same input are bitwise reproducible.
    """
    values = np.asarray(values, dtype=float)
    m = float(np.max(values))
    if not np.isfinite(m):
        return m
    return m + float(np.log(np.sum(np.exp(values - m))))
