"""Noisy ToA observations for legitimate and spoofing vehicles.

Legitimate:  Y_i = U_i + phi_i + X_i, phi_i ~ Exp(mean=nlos_std) i.i.d. per BS.
Malicious:   Y_i = mean(U) + b + X_i, b ~ Exp(mean=attacker_common_bias_std)
             drawn once per vehicle (b = 0 when that std is 0).
Thermal noise X_i ~ N(0, thermal_noise_std^2) i.i.d. per BS.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import scenario as sc
from .errors import EmptyInputError, InvalidParameterError
from .sampling import exponential_from_uniform, make_rng, standard_normal

LEGITIMATE = 0
MALICIOUS = 1


@dataclass(frozen=True)
class ChannelParams:
    thermal_noise_std: float = 300.0
    nlos_std: float = 0.0
    attacker_common_bias_std: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.thermal_noise_std) and self.thermal_noise_std > 0):
            raise InvalidParameterError("thermal_noise_std must be > 0")
        if not (math.isfinite(self.nlos_std) and self.nlos_std >= 0):
            raise InvalidParameterError("nlos_std must be >= 0")
        if not (math.isfinite(self.attacker_common_bias_std) and self.attacker_common_bias_std >= 0):
            raise InvalidParameterError("attacker_common_bias_std must be >= 0")


@dataclass(frozen=True)
class LabeledSample:
    claimed: sc.Location
    claimed_toa: np.ndarray
    observed_toa: np.ndarray
    label: int


@dataclass(eq=False)
class Dataset:
    """Column-oriented collection of labeled ToA samples.

    Samples are stored as arrays; indexing or iterating yields
    :class:`LabeledSample` views.
    """

    claimed_xy: np.ndarray  # (n, 2)
    claimed_toa: np.ndarray  # (n, N), U
    observed_toa: np.ndarray  # (n, N), Y
    labels: np.ndarray  # (n,), 0 = legitimate, 1 = malicious
    params: ChannelParams = field(default_factory=ChannelParams)
    scenario: sc.Scenario = None
    seed: int = None
    malicious_fraction: float = None

    def __post_init__(self):
        self.claimed_xy = np.asarray(self.claimed_xy, dtype=float).reshape(-1, 2)
        self.claimed_toa = np.asarray(self.claimed_toa, dtype=float)
        self.observed_toa = np.asarray(self.observed_toa, dtype=float)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        n = len(self.labels)
        if self.claimed_toa.ndim != 2 or self.claimed_toa.shape != self.observed_toa.shape:
            raise InvalidParameterError("claimed and observed ToA must be equal-shaped (n, N) arrays")
        if self.claimed_toa.shape[0] != n or self.claimed_xy.shape[0] != n:
            raise InvalidParameterError("all dataset columns must have the same length")
        if not np.all((self.labels == 0) | (self.labels == 1)):
            raise InvalidParameterError("labels must be 0 or 1")

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, i):
        x, y = self.claimed_xy[i]
        return LabeledSample(
            claimed=sc.Location(float(x), float(y)),
            claimed_toa=self.claimed_toa[i],
            observed_toa=self.observed_toa[i],
            label=int(self.labels[i]),
        )

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def n_bs(self):
        return self.claimed_toa.shape[1]

    @property
    def n_malicious(self):
        return int(self.labels.sum())

    @property
    def n_legit(self):
        return len(self) - self.n_malicious

    @property
    def samples(self):
        return list(self)

    @property
    def attacker_mean(self):
        """V for every sample, shape (n, N)."""
        return sc.mean_toa(self.claimed_toa)

    def head(self, n):
        """The first ``n`` samples as a new dataset sharing metadata."""
        return self.subset(slice(0, n))

    def subset(self, index):
        return Dataset(
            self.claimed_xy[index],
            self.claimed_toa[index],
            self.observed_toa[index],
            self.labels[index],
            params=self.params,
            scenario=self.scenario,
            seed=self.seed,
            malicious_fraction=self.malicious_fraction,
        )


def _nlos_bias(params, rng, shape):
    if params.nlos_std == 0:
        return np.zeros(shape)
    return exponential_from_uniform(rng.random(shape), 1.0 / params.nlos_std)


def _attacker_bias(params, rng, n):
    if params.attacker_common_bias_std == 0:
        return np.zeros(n)
    return exponential_from_uniform(rng.random(n), 1.0 / params.attacker_common_bias_std)


def observe_legitimate(scenario, params, claimed, rng):
    """One observation vector Y from an honest vehicle at ``claimed``."""
    u = sc.claimed_toa_vector(scenario, claimed)
    phi = _nlos_bias(params, rng, u.shape)
    return u + phi + params.thermal_noise_std * standard_normal(rng, u.shape)


def observe_malicious(scenario, params, claimed, rng):
    """One observation vector Y from a far-field spoofer claiming ``claimed``."""
    v = sc.attacker_mean_vector(scenario, claimed)
    b = _attacker_bias(params, rng, 1)[0]
    return v + b + params.thermal_noise_std * standard_normal(rng, v.shape)


def generate_dataset(scenario, params, n_samples, malicious_fraction, rng=None, seed=None):
    """Simulate ``n_samples`` labeled vehicles.

    Each vehicle is malicious independently with probability
    ``malicious_fraction``. Pass either an explicit ``rng`` or a ``seed``;
    with a seed the stream is :func:`make_rng(seed)` and the seed is
    recorded on the dataset. Draw order is fixed: labels, claimed
    positions, NLoS biases, attacker biases, thermal noise.
    """
    if n_samples < 1:
        raise EmptyInputError("n_samples must be >= 1")
    if not 0.0 <= malicious_fraction <= 1.0:
        raise InvalidParameterError(f"malicious_fraction must lie in [0, 1], got {malicious_fraction}")
    if rng is None:
        if seed is None:
            raise InvalidParameterError("generate_dataset needs an rng or a seed")
        rng = make_rng(seed)

    n, n_bs = int(n_samples), scenario.n_bs
    labels = (rng.random(n) < malicious_fraction).astype(np.int64)
    xy = sc.sample_claimed_locations(scenario, rng, n)
    u = sc.toa_matrix(scenario, xy)
    phi = _nlos_bias(params, rng, (n, n_bs))
    b = _attacker_bias(params, rng, n)
    noise = params.thermal_noise_std * standard_normal(rng, (n, n_bs))

    malicious = labels[:, None] == MALICIOUS
    mean = np.where(malicious, sc.mean_toa(u) + b[:, None], u + phi)
    return Dataset(
        claimed_xy=xy,
        claimed_toa=u,
        observed_toa=mean + noise,
        labels=labels,
        params=params,
        scenario=scenario,
        seed=seed,
        malicious_fraction=float(malicious_fraction),
    )
