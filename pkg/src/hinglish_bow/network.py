"""Feedforward ReLU classifier with a 3-way softmax head, trained from scratch.

Examples are rows: a batch is an ``(n, input_dim)`` float64 matrix and the
gold labels are an int array of canonical label indices. Layer ``i`` holds
``weights`` of shape ``(out, in)`` and ``biases`` of shape ``(out,)``.
"""

from __future__ import annotations

import copy
import dataclasses
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .corpus import Label

log = logging.getLogger(__name__)

NUM_CLASSES = 3
PROB_FLOOR = 1e-12
MODEL_HEADER = "model v1"
OPTIMIZERS = ("adam", "sgd")


class DimensionError(ValueError):
    pass


class TrainingDivergedError(ArithmeticError):
    pass


@dataclass(frozen=True)
class NetworkConfig:
    input_dim: int
    num_layers: int = 2
    hidden_size: int = 300
    output_dim: int = NUM_CLASSES
    seed: int = 0
    learning_rate: float = 1e-3
    epochs: int = 30
    batch_size: int = 32
    optimizer: str = "adam"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    l2_weight_decay: float = 0.0

    def __post_init__(self):
        problems = []
        if self.input_dim < 1:
            problems.append("input_dim must be positive")
        if self.num_layers < 2:
            problems.append("num_layers must be >= 2")
        if self.hidden_size < 1:
            problems.append("hidden_size must be positive")
        if self.output_dim != NUM_CLASSES:
            problems.append(f"output_dim is fixed at {NUM_CLASSES}")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must fit in an unsigned 64-bit integer")
        if not self.learning_rate > 0:
            problems.append("learning_rate must be positive")
        if self.epochs < 1:
            problems.append("epochs must be positive")
        if self.batch_size < 1:
            problems.append("batch_size must be positive")
        if self.optimizer not in OPTIMIZERS:
            problems.append(f"optimizer must be one of {OPTIMIZERS}")
        if not (0 <= self.adam_beta1 < 1 and 0 <= self.adam_beta2 < 1):
            problems.append("adam betas must lie in [0, 1)")
        if not self.adam_epsilon > 0:
            problems.append("adam_epsilon must be positive")
        if not self.l2_weight_decay >= 0:
            problems.append("l2_weight_decay must be non-negative")
        if problems:
            raise ValueError("invalid network config: " + "; ".join(problems))

    def layer_shapes(self) -> list[tuple[int, int]]:
        dims = [self.input_dim] + [self.hidden_size] * (self.num_layers - 1) + [self.output_dim]
        return [(dims[i + 1], dims[i]) for i in range(self.num_layers)]


@dataclass
class LayerParams:
    weights: np.ndarray
    biases: np.ndarray


@dataclass
class Network:
    layers: list[LayerParams]
    config: NetworkConfig

    @property
    def input_dim(self) -> int:
        return self.layers[0].weights.shape[1]

    def parameters(self) -> list[np.ndarray]:
        """Flat [W1, b1, W2, b2, ...] view; the arrays are the live parameters."""
        out = []
        for layer in self.layers:
            out += [layer.weights, layer.biases]
        return out

    def copy(self) -> "Network":
        return copy.deepcopy(self)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            dump_network(self, f)

    @classmethod
    def load(cls, path) -> "Network":
        with open(path, encoding="utf-8") as f:
            return load_network(f)


@dataclass
class TrainReport:
    train_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_epoch: int = -1

    def to_text(self) -> str:
        lines = ["epoch\ttrain_loss\tval_accuracy"]
        for i, (loss, acc) in enumerate(zip(self.train_loss, self.val_accuracy)):
            lines.append(f"{i}\t{loss!r}\t{acc!r}")
        lines.append(f"best_epoch={self.best_epoch}")
        if self.best_epoch >= 0:
            lines.append(f"best_val_accuracy={self.val_accuracy[self.best_epoch]:.6f}")
        return "\n".join(lines) + "\n"


def init_network(config: NetworkConfig) -> Network:
    """Uniform(-s, s) weights with s = sqrt(6 / (fan_in + fan_out)); zero biases."""
    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(0,)))
    layers = []
    for out_dim, in_dim in config.layer_shapes():
        s = math.sqrt(6.0 / (in_dim + out_dim))
        layers.append(LayerParams(rng.uniform(-s, s, size=(out_dim, in_dim)), np.zeros(out_dim)))
    return Network(layers, config)


def _as_batch(net: Network, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DimensionError(f"expected feature vectors of length {net.input_dim}, got shape {x.shape}")
    return X, single


def _forward_all(net: Network, X: np.ndarray):
    """Return (hidden pre-activations, layer inputs, logits)."""
    inputs = [X]
    pre = []
    a = X
    for layer in net.layers[:-1]:
        z = a @ layer.weights.T + layer.biases
        pre.append(z)
        a = np.maximum(z, 0.0)
        inputs.append(a)
    out = net.layers[-1]
    return pre, inputs, a @ out.weights.T + out.biases


def forward(net: Network, x) -> np.ndarray:
    """Logits for one feature vector (shape (3,)) or a batch (shape (n, 3))."""
    X, single = _as_batch(net, x)
    logits = _forward_all(net, X)[2]
    return logits[0] if single else logits


def softmax(logits) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(probs, gold) -> float:
    p = float(np.asarray(probs, dtype=np.float64)[int(gold)])
    return 0.0 - math.log(max(p, PROB_FLOOR))


def _mean_loss(probs: np.ndarray, y: np.ndarray) -> float:
    picked = probs[np.arange(len(y)), y]
    return float(-np.log(np.maximum(picked, PROB_FLOOR)).mean())


def _check_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    if len(y) != n:
        raise DimensionError(f"{n} examples but {len(y)} labels")
    if len(y) and (y.min() < 0 or y.max() >= NUM_CLASSES):
        raise ValueError("labels must be canonical indices 0..2")
    return y


def loss(net: Network, X, y) -> float:
    """Mean cross-entropy of the network over a batch."""
    X, _ = _as_batch(net, X)
    y = _check_labels(y, len(X))
    return _mean_loss(softmax(_forward_all(net, X)[2]), y)


def backward(net: Network, X, y) -> tuple[list[LayerParams], float]:
    """Gradients of the mean batch cross-entropy w.r.t. every layer, plus that loss."""
    X, _ = _as_batch(net, X)
    y = _check_labels(y, len(X))
    if len(X) == 0:
        raise ValueError("empty batch")
    pre, inputs, logits = _forward_all(net, X)
    probs = softmax(logits)
    mean_loss = _mean_loss(probs, y)

    delta = probs
    delta[np.arange(len(y)), y] -= 1.0
    delta /= len(y)
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        grads[i] = LayerParams(delta.T @ inputs[i], delta.sum(axis=0))
        if i > 0:
            delta = (delta @ net.layers[i].weights) * (pre[i - 1] > 0)
    return grads, mean_loss


def _flat_grads(grads: list[LayerParams]) -> list[np.ndarray]:
    out = []
    for g in grads:
        out += [g.weights, g.biases]
    return out


@dataclass
class AdamState:
    m: list[np.ndarray]
    v: list[np.ndarray]
    t: int = 0
    scratch: list[np.ndarray] = field(default_factory=list, repr=False, compare=False)

    @classmethod
    def zeros_like(cls, params: list[np.ndarray]) -> "AdamState":
        return cls([np.zeros_like(p) for p in params], [np.zeros_like(p) for p in params], 0)


def adam_step(params: list[np.ndarray], grads: list[np.ndarray], state: AdamState,
              config: NetworkConfig) -> tuple[list[np.ndarray], AdamState]:
    """One bias-corrected Adam update. Updates ``params`` and ``state`` in place and returns them."""
    b1, b2, eps = config.adam_beta1, config.adam_beta2, config.adam_epsilon
    wd = config.l2_weight_decay
    state.t += 1
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    if len(state.scratch) != len(params):
        state.scratch = [np.empty_like(p) for p in params]
    # in-place arithmetic: the first layer of a bag-of-words net has millions of weights
    for p, g, m, v, buf in zip(params, grads, state.m, state.v, state.scratch):
        if wd:
            g = g + wd * p
        m *= b1
        np.multiply(g, 1.0 - b1, out=buf)
        m += buf
        v *= b2
        np.multiply(g, g, out=buf)
        buf *= 1.0 - b2
        v += buf
        np.multiply(v, 1.0 / bc2, out=buf)
        np.sqrt(buf, out=buf)
        buf += eps
        np.divide(m, buf, out=buf)
        buf *= config.learning_rate / bc1
        p -= buf
    return params, state


def sgd_step(params: list[np.ndarray], grads: list[np.ndarray], config: NetworkConfig) -> list[np.ndarray]:
    wd = config.l2_weight_decay
    for p, g in zip(params, grads):
        if wd:
            g = g + wd * p
        p -= config.learning_rate * g
    return params


def predict_proba(net: Network, x) -> np.ndarray:
    return softmax(forward(net, x))


def predict(net: Network, x) -> tuple[Label, np.ndarray]:
    """Argmax label (ties go to the lowest label index) and class probabilities."""
    probs = predict_proba(net, x)
    if probs.ndim != 1:
        raise DimensionError("predict takes a single feature vector; use predict_labels for batches")
    return Label(int(np.argmax(probs))), probs


def predict_labels(net: Network, X) -> np.ndarray:
    return np.argmax(forward(net, X), axis=-1)


def accuracy(net: Network, X, y) -> float:
    y = np.asarray(y, dtype=np.int64)
    if len(y) == 0:
        raise ValueError("cannot score an empty set")
    return float(np.mean(predict_labels(net, X) == y))


def train(train_X, train_y, val_X, val_y, config: NetworkConfig,
          init: Optional[Network] = None) -> tuple[Network, TrainReport]:
    """Minibatch training; returns the snapshot from the best validation epoch.

    Ties in validation accuracy keep the earliest epoch. When the validation
    set is empty, training accuracy is used for model selection instead.
    """
    net = init.copy() if init is not None else init_network(config)
    X, _ = _as_batch(net, train_X)
    y = _check_labels(train_y, len(X))
    if len(X) == 0:
        raise ValueError("empty training set")
    if val_X is None or len(val_X) == 0:
        VX, vy = X, y
    else:
        VX, _ = _as_batch(net, val_X)
        vy = _check_labels(val_y, len(VX))

    rng = np.random.default_rng(np.random.SeedSequence(config.seed, spawn_key=(1,)))
    params = net.parameters()
    state = AdamState.zeros_like(params) if config.optimizer == "adam" else None
    report = TrainReport()
    best: Optional[Network] = None
    n = len(X)
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            grads, batch_loss = backward(net, X[idx], y[idx])
            if not math.isfinite(batch_loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}, batch starting at {start}; "
                    f"try a smaller learning_rate (currently {config.learning_rate})")
            total += batch_loss * len(idx)
            flat = _flat_grads(grads)
            if state is not None:
                adam_step(params, flat, state, config)
            else:
                sgd_step(params, flat, config)
        report.train_loss.append(total / n)
        acc = accuracy(net, VX, vy)
        report.val_accuracy.append(acc)
        log.debug("epoch %d loss %.6f val_acc %.4f", epoch, total / n, acc)
        if best is None or acc > report.val_accuracy[report.best_epoch]:
            report.best_epoch = epoch
            best = net.copy()
    return best, report


# -- persistence ---------------------------------------------------------

def dump_network(net: Network, stream) -> None:
    stream.write(MODEL_HEADER + "\n")
    for f in dataclasses.fields(NetworkConfig):
        value = getattr(net.config, f.name)
        stream.write(f"{f.name}={value if isinstance(value, str) else repr(value)}\n")
    for i, layer in enumerate(net.layers, start=1):
        out_dim, in_dim = layer.weights.shape
        stream.write(f"layer {i} {out_dim} {in_dim}\n")
        values = layer.weights.ravel().tolist() + layer.biases.tolist()
        stream.write("".join(f"{v!r}\n" for v in values))


def dumps_network(net: Network) -> str:
    buf = io.StringIO()
    dump_network(net, buf)
    return buf.getvalue()


def _convert(name: str, text: str):
    kind = {f.name: f.type for f in dataclasses.fields(NetworkConfig)}[name]
    if kind == "int":
        return int(text)
    if kind == "float":
        return float(text)
    return text


def load_network(stream) -> Network:
    lines = [ln.rstrip("\r\n") for ln in stream]
    if not lines or lines[0] != MODEL_HEADER:
        raise ValueError("not a model v1 file")
    known = {f.name for f in dataclasses.fields(NetworkConfig)}
    values = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith("layer "):
        key, sep, text = lines[pos].partition("=")
        if not sep or key not in known:
            raise ValueError(f"model file line {pos + 1}: unexpected {lines[pos]!r}")
        values[key] = _convert(key, text)
        pos += 1
    missing = known - values.keys()
    if missing:
        raise ValueError(f"model file is missing config keys: {sorted(missing)}")
    config = NetworkConfig(**values)
    layers = []
    for i, (out_dim, in_dim) in enumerate(config.layer_shapes(), start=1):
        expect = f"layer {i} {out_dim} {in_dim}"
        if pos >= len(lines) or lines[pos] != expect:
            raise ValueError(f"model file line {pos + 1}: expected {expect!r}")
        pos += 1
        count = out_dim * in_dim + out_dim
        chunk = lines[pos:pos + count]
        if len(chunk) != count:
            raise ValueError(f"model file truncated in layer {i}")
        flat = np.array([float(v) for v in chunk], dtype=np.float64)
        layers.append(LayerParams(flat[:out_dim * in_dim].reshape(out_dim, in_dim).copy(),
                                  flat[out_dim * in_dim:].copy()))
        pos += count
    if any(ln for ln in lines[pos:]):
        raise ValueError("trailing data after last layer in model file")
    return Network(layers, config)
