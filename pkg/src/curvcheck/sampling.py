"""Deterministic trial sampling.

Every randomized routine draws its per-trial generator from
SeedSequence(root).spawn(trials), so results are reproducible bit-for-bit
regardless of how trials are scheduled across threads.
"""

from __future__ import annotations

import os

import numpy as np

SCALE_LADDER = (0.1, 1.0, 10.0)
DEFAULT_SEED = 20260214
_KINDS = ("gauss", "gauss", "gauss", "spike", "indicator")


def resolve_seed(seed=None) -> int:
    """CLI seed if given, else CURVCHECK_SEED from the environment, else the
    package default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("CURVCHECK_SEED")
    if env is not None:
        return int(env)
    return DEFAULT_SEED


def trial_rngs(root_seed: int, trials: int) -> list[np.random.Generator]:
    seqs = np.random.SeedSequence(int(root_seed)).spawn(trials)
    return [np.random.default_rng(s) for s in seqs]


def trial_function(rng: np.random.Generator, n: int, trial_index: int) -> np.ndarray:
    """One test function per trial: Gaussian amplitudes cycling through the
    scale ladder, interleaved with spike and indicator shapes."""
    kind = _KINDS[trial_index % len(_KINDS)]
    if kind == "gauss":
        scale = SCALE_LADDER[(trial_index // len(_KINDS)) % len(SCALE_LADDER)]
        return rng.normal(scale=scale, size=n)
    t = rng.normal() * SCALE_LADDER[int(rng.integers(len(SCALE_LADDER)))]
    f = np.zeros(n)
    if kind == "spike":
        f[int(rng.integers(n))] = t
    else:
        mask = rng.integers(0, 2, size=n).astype(bool)
        f[mask] = t
    return f


def gaussian_functions(rng: np.random.Generator, n: int, count: int,
                       scale: float = 1.0) -> np.ndarray:
    return rng.normal(scale=scale, size=(count, n))


def random_density(rng: np.random.Generator, pi: np.ndarray) -> np.ndarray:
    """Strictly positive f with integral 1 against pi."""
    f = np.exp(rng.normal(size=len(pi)))
    return f / float(f @ pi)


def random_nonvanishing(rng: np.random.Generator, n: int) -> np.ndarray:
    """f with no zero entries (signs allowed); used by the Nash inequality."""
    f = rng.normal(size=n)
    f = f + np.sign(f) * 0.05
    f[f == 0] = 0.05
    return f
