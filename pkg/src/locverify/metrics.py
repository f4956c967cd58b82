"""False-positive rate, detection rate and Total Error.

Total Error is the prior-weighted Bayes error

    xi = p(H0) * alpha + p(H1) * (1 - beta)

with alpha the fraction of legitimate vehicles flagged malicious and beta
the fraction of malicious vehicles flagged malicious.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EmptyInputError, InvalidParameterError
from .scenario import mean_toa

EMPIRICAL = "empirical"

CSV_HEADER = "method,n_bs,sigma_ns,nlos_ns,po_test,alpha,beta,total_error,n"


@dataclass(frozen=True)
class MetricsReport:
    alpha: float
    beta: float
    total_error: float
    prior_h0: float
    prior_h1: float
    n_legit: int
    n_malicious: int
    undefined_flags: frozenset = field(default_factory=frozenset)

    @property
    def n(self):
        return self.n_legit + self.n_malicious

    def csv_row(self, method, n_bs, sigma_ns, nlos_ns, po_test):
        """One row matching :data:`CSV_HEADER`; undefined values print as ``nan``."""
        return ",".join(
            [method, str(n_bs), _fmt(sigma_ns), _fmt(nlos_ns), _fmt(po_test),
             _fmt(self.alpha), _fmt(self.beta), _fmt(self.total_error), str(self.n)]
        )


def _fmt(value):
    return "nan" if value is None else f"{value:.6f}"


def compute_metrics(decisions, labels, prior_h1=0.5):
    """Aggregate binary decisions against ground-truth labels.

    ``decisions`` and ``labels`` use 1 for malicious and 0 for legitimate
    (booleans are accepted). ``prior_h1`` is either a probability or
    ``"empirical"``, in which case the priors are the label proportions and
    the Total Error reduces to the plain misclassification rate.

    A rate whose class is absent is reported as ``None`` and flagged. The
    Total Error is still defined if the missing class carries zero prior.
    """
    decisions = np.asarray(decisions).astype(bool).ravel()
    labels = np.asarray(labels).ravel()
    if decisions.shape != labels.shape:
        raise DimensionError(f"{decisions.size} decisions vs {labels.size} labels")
    if labels.size == 0:
        raise EmptyInputError("no decisions to score")
    labels = labels.astype(bool)

    n_mal = int(labels.sum())
    n_legit = labels.size - n_mal
    if prior_h1 == EMPIRICAL:
        prior_h1 = n_mal / labels.size
    elif not 0.0 <= prior_h1 <= 1.0:
        raise InvalidParameterError(f"prior_h1 must lie in [0, 1], got {prior_h1}")
    prior_h0 = 1.0 - prior_h1

    flags = set()
    alpha = beta = None
    if n_legit:
        alpha = int(np.count_nonzero(decisions & ~labels)) / n_legit
    else:
        flags.add("alpha_undefined")
    if n_mal:
        beta = int(np.count_nonzero(decisions & labels)) / n_mal
    else:
        flags.add("beta_undefined")

    miss_term = 0.0 if prior_h1 == 0 else (None if beta is None else prior_h1 * (1.0 - beta))
    fa_term = 0.0 if prior_h0 == 0 else (None if alpha is None else prior_h0 * alpha)
    if miss_term is None or fa_term is None:
        total = None
        flags.add("total_error_undefined")
    else:
        total = fa_term + miss_term
    return MetricsReport(alpha, beta, total, prior_h0, prior_h1, n_legit, n_mal, frozenset(flags))


def q_function(x):
    """Standard Gaussian upper tail, Q(x) = P(Z > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def analytic_lrt_error(u, v, sigma):
    """Exact Total Error of the unit-threshold LRT with equal priors and no NLoS.

    Under equal isotropic covariance the log-likelihood ratio is linear in
    the observation, so it is Gaussian under both hypotheses and the error
    is Q(||v - u|| / (2 sigma)).
    """
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be > 0, got {sigma}")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionError(f"u has shape {u.shape}, v has shape {v.shape}")
    return q_function(float(np.linalg.norm(v - u)) / (2.0 * sigma))


def binomial_se(p, n):
    """Standard error of a Monte Carlo proportion."""
    return math.sqrt(p * (1.0 - p) / n)


def roc_sweep(det, dataset, thresholds, scenario=None):
    """(threshold, alpha, beta) for each LRT threshold in ascending order."""
    from .lrt import log_likelihood_ratio

    thresholds = [float(t) for t in thresholds]
    if any(t <= 0 for t in thresholds):
        raise InvalidParameterError("LRT thresholds must be positive")
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise InvalidParameterError("thresholds must be sorted ascending")
    if len(dataset) == 0:
        raise EmptyInputError("cannot sweep an empty dataset")

    u = dataset.claimed_toa
    llr = np.asarray(log_likelihood_ratio(det, dataset.observed_toa, u, mean_toa(u)))
    out = []
    for lam in thresholds:
        rep = compute_metrics(llr >= math.log(lam), dataset.labels, 0.5)
        out.append((lam, rep.alpha, rep.beta))
    return out
