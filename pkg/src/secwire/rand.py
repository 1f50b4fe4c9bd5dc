"""Deterministic RNG plumbing.

Every stochastic entry point takes an integer seed and derives generators
through SeedSequence, so results depend only on (seed, call structure) and
never on evaluation order or thread count.
"""

from __future__ import annotations

import numpy as np


def as_rng(seed) -> np.random.Generator:
    """Pass Generators through; anything else seeds a fresh one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def substream(*entropy: int) -> np.random.Generator:
    """Child generator keyed by a tuple of integers (seed, trial index, ...)."""
    return np.random.default_rng(np.random.SeedSequence([int(e) for e in entropy]))


def inverse_cdf_sample(cum: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Map uniform draws through a CDF row or matrix of per-draw CDF rows.

    cum has shape (m,) or (len(draws), m); returns int64 indices in [0, m).
    """
    if cum.ndim == 1:
        idx = np.searchsorted(cum, draws, side="right")
    else:
        idx = (cum <= draws[:, None]).sum(axis=1)
    return np.minimum(idx, cum.shape[-1] - 1).astype(np.int64)
