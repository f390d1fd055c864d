"""Finite photon statistics for the pointer readout.

Photons of one bin are shared equally between three analyzer settings:
{+, -}, {L, R} and {1, 0}. Each photon first survives post-selection with
the success probability and is then routed to one port of its setting.

Random streams are numpy ``PCG64`` generators seeded by
``SeedSequence(seed, spawn_key=(stream,))``, so bin ``i`` of a scan always
draws from stream ``i`` regardless of evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coupling import PointerProbs, correction_coefficient, reconstruct_strong

__all__ = [
    "ShotPlan",
    "Counts",
    "Estimate",
    "rng_for",
    "sample_counts",
    "reconstruct_from_counts",
    "sample_record",
]

DETECTORS = ("+", "-", "L", "R", "1")


@dataclass(frozen=True)
class ShotPlan:
    photons_per_bin: int
    seed: int = 0

    def __post_init__(self):
        if int(self.photons_per_bin) != self.photons_per_bin or self.photons_per_bin < 1:
            raise ValueError("photons_per_bin must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    @property
    def per_setting(self) -> tuple[int, int, int]:
        """Photons sent into the {+,-}, {L,R} and {1,0} settings."""
        q, r = divmod(self.photons_per_bin, 3)
        return tuple(q + (i < r) for i in range(3))


@dataclass(frozen=True)
class Counts:
    plus: int
    minus: int
    left: int
    right: int
    one: int
    zero: int
    sent: tuple[int, int, int]

    @property
    def postselected(self) -> int:
        return self.plus + self.minus + self.left + self.right + self.one + self.zero

    def as_dict(self) -> dict:
        return {"+": self.plus, "-": self.minus, "L": self.left, "R": self.right,
                "1": self.one, "0": self.zero}


@dataclass(frozen=True)
class Estimate:
    value: complex
    stderr: float
    missing: bool = False


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(stream),))))


def _validate(probs: PointerProbs, success_prob: float) -> float:
    vals = (probs.p_plus, probs.p_minus, probs.p_l, probs.p_r, probs.p_one)
    if min(vals) < 0:
        raise ValueError(f"negative probability in {probs}")
    if not 0.0 <= success_prob <= 1.0:
        raise ValueError(f"success probability {success_prob} outside [0, 1]")
    total = probs.total
    if total == 0:
        return 0.0
    tol = 1 + 1e-9
    if (probs.p_l + probs.p_r) / total > tol or probs.p_one / total > tol:
        raise ValueError(f"pointer probabilities inconsistent: {probs}")
    return total


def sample_counts(probs: PointerProbs, success_prob: float, plan: ShotPlan,
                  stream: int = 0) -> Counts:
    """Draw detector counts for one bin."""
    total = _validate(probs, success_prob)
    rng = rng_for(plan.seed, stream)
    sent = plan.per_setting
    if total == 0 or success_prob == 0:
        return Counts(0, 0, 0, 0, 0, 0, sent)
    passed = rng.binomial(sent, success_prob)
    plus = rng.binomial(passed[0], min(probs.p_plus / total, 1.0))
    left = rng.binomial(passed[1], min(probs.p_l / total, 1.0))
    one = rng.binomial(passed[2], min(probs.p_one / total, 1.0))
    return Counts(int(plus), int(passed[0] - plus), int(left), int(passed[1] - left),
                  int(one), int(passed[2] - one), sent)


def reconstruct_from_counts(counts: Counts, plan: ShotPlan, scheme) -> Estimate:
    """Plug empirical joint frequencies into the strong readout.

    The standard error combines the multinomial variances of the three
    independent settings by the delta method. A bin with no post-selected
    photons is returned as missing (NaN), not estimated.
    """
    n_pm, n_lr, n_one = counts.sent
    if counts.postselected == 0:
        return Estimate(complex(np.nan, np.nan), float("nan"), missing=True)
    pp, pm = counts.plus / n_pm, counts.minus / n_pm
    pl, pr = counts.left / n_lr, counts.right / n_lr
    p1 = counts.one / n_one
    est = PointerProbs(pp, pm, pl, pr, p1)
    value = reconstruct_strong(est, scheme)

    var_x = (pp + pm - (pp - pm) ** 2) / n_pm
    var_y = (pl + pr - (pl - pr) ** 2) / n_lr
    var_1 = p1 * (1 - p1) / n_one
    c = correction_coefficient(scheme)
    var = var_x / 4 + var_y / 4 + abs(c) ** 2 * var_1
    return Estimate(value, float(np.sqrt(var)))


def sample_record(record, plan: ShotPlan, scheme_for_bin) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample and reconstruct every bin of a :class:`MeasurementRecord`.

    ``scheme_for_bin(i)`` returns the readout scheme for the i-th scanned bin.
    Returns (estimates, standard errors, missing mask).
    """
    values, errs, missing = [], [], []
    for i, probs in enumerate(record.probs):
        counts = sample_counts(probs, min(probs.total, 1.0), plan, stream=int(record.bins[i]))
        est = reconstruct_from_counts(counts, plan, scheme_for_bin(i))
        values.append(est.value)
        errs.append(est.stderr)
        missing.append(est.missing)
    return np.asarray(values), np.asarray(errs), np.asarray(missing)
