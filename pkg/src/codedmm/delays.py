"""Straggler delay distributions, harmonic numbers, and order statistics.

Worker delays follow a shifted exponential: a sub-task scaled by alpha takes
at least 1/alpha time units and then an exponential tail with rate
alpha * lambda, where lambda is the straggling rate of the cluster. The
expected k-th order statistic of n such delays has the closed harmonic form
a + (b / lambda)(H_n - H_{n-k}).

Randomness is counter-based: Philox lets every trial own a fixed-width slice
of one logical stream, so experiment results are independent of batching and
execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codes import Scheme

# Philox-4x64 emits 4 doubles per counter increment, so per-trial slices are
# padded to a multiple of 4 to keep trial starts addressable via advance().
UNIFORMS_PER_BLOCK = 4


def harmonic(n):
    """H_n, the n-th harmonic number; H_0 = 0."""
    if n < 0:
        raise ValueError(f"harmonic number undefined for n={n}")
    return math.fsum(1.0 / i for i in range(1, n + 1))


@dataclass(frozen=True)
class DelayModel:
    """Shifted-scaled exponential delay: shift + scale * Exp(1) / rate."""

    straggling_rate: float  # lambda
    shift: float  # a
    scale: float  # b

    def __post_init__(self):
        for name in ("straggling_rate", "shift", "scale"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value}")


def scale_parameter(choice):
    """Sub-task scale alpha: how many times smaller one worker's task is.

    Column-split schemes shrink one operand (alpha = p); polynomial and
    product codes shrink both (alpha = p^2).
    """
    if choice.scheme in (Scheme.POLYNOMIAL, Scheme.PRODUCT):
        return choice.partitions**2
    return choice.partitions


def subtask_delay_model(alpha, lam):
    """Delay model for a 1/alpha sized sub-task in a rate-lam cluster."""
    return DelayModel(straggling_rate=lam, shift=1.0 / alpha, scale=1.0 / alpha)


def expected_kth_order_statistic(model, n, k):
    """Exact mean of the k-th smallest of n i.i.d. delays."""
    if not 1 <= k <= n:
        raise ValueError(f"order statistic k={k} outside 1..{n}")
    gap = harmonic(n) - harmonic(n - k)
    return model.shift + model.scale * gap / model.straggling_rate


def delay_from_uniform(model, u):
    """Map uniform draws in [0, 1) to delays by the inverse CDF."""
    return model.shift + model.scale * (-np.log1p(-np.asarray(u))) / model.straggling_rate


def sample_delay(model, rng):
    """One delay draw from a seeded generator."""
    return float(delay_from_uniform(model, rng.random()))


def _trial_stride(per_trial):
    blocks = -(-per_trial // UNIFORMS_PER_BLOCK)
    return UNIFORMS_PER_BLOCK * blocks


def trial_uniforms(seed, n_trials, per_trial, first_trial=0):
    """Uniform draws for a contiguous run of trials, chunk-invariant.

    Returns an (n_trials, per_trial) array. Trial t always reads the same
    slice of the Philox stream keyed by seed, so splitting a run into any
    sequence of chunks reproduces the exact same numbers.
    """
    stride = _trial_stride(per_trial)
    bits = np.random.Philox(key=seed)
    if first_trial:
        bits.advance(first_trial * (stride // UNIFORMS_PER_BLOCK))
    block = np.random.Generator(bits).random((n_trials, stride))
    return block[:, :per_trial]


def trial_rng(seed, trial, per_trial):
    """Generator positioned at one trial's slice of the stream.

    Drawing per_trial uniforms from it reproduces trial_uniforms row
    `trial` exactly.
    """
    stride = _trial_stride(per_trial)
    bits = np.random.Philox(key=seed)
    bits.advance(trial * (stride // UNIFORMS_PER_BLOCK))
    return np.random.Generator(bits)
