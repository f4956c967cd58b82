"""Likelihood-ratio verifier under the Gaussian observation model.

Both hypotheses are modelled as N(mean, sigma^2 I): mean U for a
legitimate vehicle, mean V for a spoofer. NLoS bias is deliberately not
part of the model.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, EmptyInputError, InvalidParameterError
from .metrics import compute_metrics
from .scenario import mean_toa

LEGITIMATE = "legitimate"
MALICIOUS = "malicious"


@dataclass(frozen=True)
class LrtDetector:
    thermal_noise_std: float = 300.0
    threshold: float = 1.0

    def __post_init__(self):
        if not self.thermal_noise_std > 0:
            raise InvalidParameterError("thermal_noise_std must be > 0")
        if not self.threshold > 0:
            raise InvalidParameterError("threshold must be > 0")

    @property
    def log_threshold(self):
        return math.log(self.threshold)


def _check_shapes(y, u, v):
    y, u, v = (np.asarray(a, dtype=float) for a in (y, u, v))
    if not (y.shape == u.shape == v.shape):
        raise DimensionError(f"shape mismatch: y {y.shape}, u {u.shape}, v {v.shape}")
    return y, u, v


def log_likelihood_ratio(det, y, u, v):
    """log p(y|H1) - log p(y|H0) = -(||y - v||^2 - ||y - u||^2) / (2 sigma^2).

    Works row-wise on (..., N) arrays.
    """
    y, u, v = _check_shapes(y, u, v)
    d1 = np.sum((y - v) ** 2, axis=-1)
    d0 = np.sum((y - u) ** 2, axis=-1)
    llr = -(d1 - d0) / (2.0 * det.thermal_noise_std ** 2)
    return float(llr) if np.ndim(llr) == 0 else llr


def decide_batch(det, y, u, v):
    """Boolean array, True where the sample is judged malicious (ties included)."""
    return np.asarray(log_likelihood_ratio(det, y, u, v)) >= det.log_threshold


def decide(det, y, u, v):
    return MALICIOUS if log_likelihood_ratio(det, y, u, v) >= det.log_threshold else LEGITIMATE


def undecidable_geometry(u, v):
    """True where U and V coincide exactly, so the test cannot separate them."""
    u, v = np.asarray(u), np.asarray(v)
    return np.all(u == v, axis=-1)


def evaluate_lrt(det, dataset, scenario=None, prior_h1=0.5):
    """Run the detector over a dataset and score it.

    V for each sample is the far-field attacker mean of its claimed ToA, so
    ``scenario`` is accepted for interface symmetry but not needed.
    Returns ``(report, decisions, undecidable)``.
    """
    if len(dataset) == 0:
        raise EmptyInputError("cannot evaluate the LRT on an empty dataset")
    u = dataset.claimed_toa
    v = mean_toa(u)
    decisions = decide_batch(det, dataset.observed_toa, u, v)
    report = compute_metrics(decisions, dataset.labels, prior_h1)
    return report, decisions, undecidable_geometry(u, v)
