"""Feed-forward verifier: 2N inputs -> tanh hidden layer -> one linear output.

Inputs are the claimed ToA vector followed by the observed one. The network
regresses the label (0 legitimate, 1 malicious) under mean-squared error,
trained by full-batch gradient descent with validation-failure early
stopping.
"""

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DimensionError, EmptyInputError, InvalidParameterError, TrainingDivergedError
from .metrics import EMPIRICAL, compute_metrics
from .sampling import derive_seed, make_rng

LEGITIMATE = "legitimate"
MALICIOUS = "malicious"

RAW = "raw"
RESIDUAL = "residual"


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 2000
    max_validation_failures: int = 6
    validation_fraction: float = 0.15
    learning_rate: float = 0.1
    init_scale: float = 0.5
    seed: int = 0
    hidden_units: int = 10
    feature_mode: str = RAW
    # pools too small to carve out a validation sample train for a fixed budget
    min_validation_pool: int = 7
    small_pool_epochs: int = 200

    def __post_init__(self):
        if self.max_epochs < 1:
            raise InvalidParameterError("max_epochs must be >= 1")
        if self.max_validation_failures < 1:
            raise InvalidParameterError("max_validation_failures must be >= 1")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise InvalidParameterError("validation_fraction must lie in [0, 1)")
        if not self.learning_rate > 0:
            raise InvalidParameterError("learning_rate must be > 0")
        if not self.init_scale > 0:
            raise InvalidParameterError("init_scale must be > 0")
        if self.hidden_units < 1:
            raise InvalidParameterError("hidden_units must be >= 1")
        if self.feature_mode not in (RAW, RESIDUAL):
            raise InvalidParameterError(f"unknown feature_mode {self.feature_mode!r}")


@dataclass(eq=False)
class MlpModel:
    w1: np.ndarray  # (H, 2N)
    b1: np.ndarray  # (H,)
    w2: np.ndarray  # (1, H)
    b2: float
    feature_mean: np.ndarray  # (2N,)
    feature_std: np.ndarray  # (2N,)
    decision_threshold: float = 0.5
    feature_mode: str = RAW

    def __post_init__(self):
        self.w1 = np.atleast_2d(np.asarray(self.w1, dtype=float))
        self.b1 = np.asarray(self.b1, dtype=float).reshape(-1)
        self.w2 = np.asarray(self.w2, dtype=float).reshape(1, -1)
        self.b2 = float(self.b2)
        self.feature_mean = np.asarray(self.feature_mean, dtype=float).reshape(-1)
        self.feature_std = np.asarray(self.feature_std, dtype=float).reshape(-1)
        hidden, n_in = self.w1.shape
        if self.b1.shape != (hidden,) or self.w2.shape != (1, hidden):
            raise DimensionError("hidden-layer shapes disagree")
        if self.feature_mean.shape != (n_in,) or self.feature_std.shape != (n_in,):
            raise DimensionError("standardization statistics must match the input width")
        if np.any(self.feature_std <= 0):
            raise InvalidParameterError("feature_std entries must be > 0")

    @property
    def n_inputs(self):
        return self.w1.shape[1]

    @property
    def n_bs(self):
        return self.n_inputs // 2

    def params(self):
        return {"w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": np.array(self.b2)}

    def to_json(self):
        """Flat JSON with every float written to 17 significant digits."""
        fields = [
            ("n_bs", str(self.n_bs)),
            ("decision_threshold", _num(self.decision_threshold)),
            ("feature_mode", json.dumps(self.feature_mode)),
            ("w1", _arr(self.w1.ravel())),
            ("b1", _arr(self.b1)),
            ("w2", _arr(self.w2.ravel())),
            ("b2", _num(self.b2)),
            ("feature_mean", _arr(self.feature_mean)),
            ("feature_std", _arr(self.feature_std)),
        ]
        return "{\n" + ",\n".join(f'  "{k}": {v}' for k, v in fields) + "\n}\n"

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        n_in = 2 * int(doc["n_bs"])
        w1 = np.asarray(doc["w1"], dtype=float).reshape(-1, n_in)
        return cls(
            w1=w1,
            b1=doc["b1"],
            w2=doc["w2"],
            b2=doc["b2"],
            feature_mean=doc["feature_mean"],
            feature_std=doc["feature_std"],
            decision_threshold=doc.get("decision_threshold", 0.5),
            feature_mode=doc.get("feature_mode", RAW),
        )


def _num(x):
    return format(float(x), ".17g")


def _arr(values):
    return "[" + ", ".join(_num(x) for x in values) + "]"


def featurize(sample, mode=RAW):
    """[U; Y] for one sample (or [U; Y - U] in residual mode)."""
    u = np.asarray(sample.claimed_toa, dtype=float)
    y = np.asarray(sample.observed_toa, dtype=float)
    return featurize_arrays(u, y, mode)


def featurize_arrays(u, y, mode=RAW):
    if u.shape != y.shape:
        raise DimensionError(f"claimed ToA {u.shape} vs observed ToA {y.shape}")
    second = y - u if mode == RESIDUAL else y
    return np.concatenate([u, second], axis=-1)


def featurize_dataset(dataset, mode=RAW):
    return featurize_arrays(dataset.claimed_toa, dataset.observed_toa, mode)


def standardization(features):
    """Column mean and std; zero-variance columns get std 1."""
    mean = features.mean(axis=0)
    std = features.std(axis=0)
    std[std == 0] = 1.0
    return mean, std


def _hidden(params, z):
    return np.tanh(z @ params["w1"].T + params["b1"])


def _score(params, z):
    return _hidden(params, z) @ params["w2"][0] + params["b2"]


def forward(model, features):
    """Network score for one feature vector (scalar) or a batch (n,)."""
    x = np.asarray(features, dtype=float)
    if x.shape[-1] != model.n_inputs:
        raise DimensionError(f"expected {model.n_inputs} features, got {x.shape[-1]}")
    z = (x - model.feature_mean) / model.feature_std
    score = _score(model.params(), z)
    return float(score) if score.ndim == 0 else score


def loss_and_gradients(params, z, targets):
    """Mean-squared error over standardized inputs and its backprop gradients."""
    h = _hidden(params, z)
    err = h @ params["w2"][0] + params["b2"] - targets
    loss = float(np.mean(err ** 2))
    g = 2.0 * err / len(targets)
    dh = np.outer(g, params["w2"][0]) * (1.0 - h ** 2)
    grads = {
        "w1": dh.T @ z,
        "b1": dh.sum(axis=0),
        "w2": (h.T @ g)[None, :],
        "b2": np.array(g.sum()),
    }
    return loss, grads


def _mse(params, z, targets):
    return float(np.mean((_score(params, z) - targets) ** 2))


@dataclass
class TrainResult:
    model: MlpModel
    epochs_run: int
    best_epoch: int
    train_loss: list = field(default_factory=list)
    validation_loss: list = field(default_factory=list)


def fit(dataset, cfg=TrainConfig()):
    """Train a verifier and return the model together with its loss history.

    ``validation_loss[k]`` is the validation MSE after ``k`` updates
    (``k = 0`` is the initialization); the returned weights are those with
    the lowest entry.
    """
    if len(dataset) == 0:
        raise EmptyInputError("cannot train on an empty dataset")
    features = featurize_dataset(dataset, cfg.feature_mode)
    targets = dataset.labels.astype(float)
    mean, std = standardization(features)
    z = (features - mean) / std
    n, n_in = z.shape

    rng = make_rng(cfg.seed)
    n_val = int(math.floor(cfg.validation_fraction * n)) if n >= cfg.min_validation_pool else 0
    if n_val:
        order = rng.permutation(n)
        val_idx, train_idx = order[:n_val], order[n_val:]
        max_epochs = cfg.max_epochs
    else:
        val_idx, train_idx = None, np.arange(n)
        max_epochs = cfg.max_epochs if n >= cfg.min_validation_pool else cfg.small_pool_epochs

    s = cfg.init_scale
    params = {
        "w1": rng.uniform(-s, s, (cfg.hidden_units, n_in)),
        "b1": rng.uniform(-s, s, cfg.hidden_units),
        "w2": rng.uniform(-s, s, (1, cfg.hidden_units)),
        "b2": np.array(rng.uniform(-s, s)),
    }
    z_tr, t_tr = z[train_idx], targets[train_idx]

    train_hist, val_hist = [], []
    best = {k: v.copy() for k, v in params.items()}
    best_epoch, best_val, failures = 0, math.inf, 0
    if n_val:
        best_val = _mse(params, z[val_idx], targets[val_idx])
        val_hist.append(best_val)

    epoch = 0
    for epoch in range(1, max_epochs + 1):
        with np.errstate(over="ignore", invalid="ignore"):
            loss, grads = loss_and_gradients(params, z_tr, t_tr)
        if not math.isfinite(loss):
            raise TrainingDivergedError(epoch)
        train_hist.append(loss)
        for k in params:
            params[k] = params[k] - cfg.learning_rate * grads[k]
        if not n_val:
            continue
        val = _mse(params, z[val_idx], targets[val_idx])
        if not math.isfinite(val):
            raise TrainingDivergedError(epoch)
        val_hist.append(val)
        if val < best_val:
            best_val, best_epoch, failures = val, epoch, 0
            best = {k: v.copy() for k, v in params.items()}
        else:
            failures += 1
            if failures >= cfg.max_validation_failures:
                break

    if not n_val:
        best, best_epoch = params, epoch
    if not all(np.all(np.isfinite(v)) for v in best.values()):
        raise TrainingDivergedError(epoch)
    model = MlpModel(
        w1=best["w1"], b1=best["b1"], w2=best["w2"], b2=float(best["b2"]),
        feature_mean=mean, feature_std=std, feature_mode=cfg.feature_mode,
    )
    return TrainResult(model, epoch, best_epoch, train_hist, val_hist)


def train(dataset, cfg=TrainConfig()):
    return fit(dataset, cfg).model


def predict(model, dataset):
    """Boolean array, True where the sample is classified malicious."""
    scores = forward(model, featurize_dataset(dataset, model.feature_mode))
    return np.asarray(scores) >= model.decision_threshold


def classify(model, sample):
    score = forward(model, featurize(sample, model.feature_mode))
    return MALICIOUS if score >= model.decision_threshold else LEGITIMATE


@dataclass(frozen=True)
class CurvePoint:
    second: int
    total_error: float
    alpha: float
    beta: float


@dataclass
class LearningCurve:
    points: list = field(default_factory=list)

    def __len__(self):
        return len(self.points)

    @property
    def seconds(self):
        return np.array([p.second for p in self.points])

    @property
    def total_error(self):
        return np.array([np.nan if p.total_error is None else p.total_error for p in self.points])

    def plateau(self, tail=0.1):
        """Median Total Error over the last ``tail`` fraction of the curve."""
        values = self.total_error
        k = max(1, int(round(tail * len(values))))
        return float(np.nanmedian(values[-k:]))


def incremental_training_runs(train_stream, test_sets, cfg, max_seconds, prior_h1=EMPIRICAL):
    """Learning curves for several test sets sharing one training schedule.

    At second ``t`` a freshly initialized network is trained on the first
    ``t`` stream samples, with seed derived from ``cfg.seed`` and ``t``, and
    then scored on every test set.
    """
    if max_seconds < 1:
        raise InvalidParameterError("max_seconds must be >= 1")
    if len(train_stream) < max_seconds:
        raise InvalidParameterError(
            f"training stream has {len(train_stream)} samples, need {max_seconds}"
        )
    curves = [LearningCurve() for _ in test_sets]
    features = [featurize_dataset(ts, cfg.feature_mode) for ts in test_sets]
    for t in range(1, max_seconds + 1):
        model = train(train_stream.head(t), replace(cfg, seed=derive_seed(cfg.seed, t)))
        for curve, x, ts in zip(curves, features, test_sets):
            decisions = np.asarray(forward(model, x)) >= model.decision_threshold
            rep = compute_metrics(decisions, ts.labels, prior_h1)
            curve.points.append(CurvePoint(t, rep.total_error, rep.alpha, rep.beta))
    return curves


def incremental_training_run(train_stream, test_set, cfg, max_seconds, prior_h1=EMPIRICAL):
    return incremental_training_runs(train_stream, [test_set], cfg, max_seconds, prior_h1)[0]
