"""Small feed-forward Q-network with hand-written backpropagation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

FORMAT_VERSION = 1
N_ACTIONS = 27
DEFAULT_DIMS = (2, 32, 32, N_ACTIONS)


class ModelLoadError(ValueError):
    pass


@dataclass
class QNetwork:
    """Affine layers with ReLU between them and a linear output.

    ``weights[k]`` has shape ``(dims[k+1], dims[k])``.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def init(cls, rng: np.random.Generator, dims: Sequence[int] = DEFAULT_DIMS) -> "QNetwork":
        weights, biases = [], []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights, biases)

    @classmethod
    def zeros(cls, dims: Sequence[int] = DEFAULT_DIMS) -> "QNetwork":
        return cls([np.zeros((o, i)) for i, o in zip(dims[:-1], dims[1:])],
                   [np.zeros(o) for o in dims[1:]])

    @property
    def layer_dims(self) -> list[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def copy(self) -> "QNetwork":
        return QNetwork([w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]


def _forward(net: QNetwork, x: np.ndarray):
    acts = [x]
    pre = []
    h = x
    last = len(net.weights) - 1
    for k, (W, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ W.T + b
        pre.append(z)
        h = z if k == last else np.maximum(z, 0.0)
        acts.append(h)
    return acts, pre


def forward(net: QNetwork, state) -> np.ndarray:
    """Q-values for one state (shape ``(n_actions,)``) or a batch (``(B, n_actions)``)."""
    x = np.asarray(state, dtype=float)
    if x.shape[-1] != net.weights[0].shape[1]:
        raise ValueError(f"state has {x.shape[-1]} features, network expects "
                         f"{net.weights[0].shape[1]}")
    acts, _ = _forward(net, np.atleast_2d(x))
    return acts[-1][0] if x.ndim == 1 else acts[-1]


def loss_and_grads(net: QNetwork, states, actions, targets):
    """Half mean squared TD error on the chosen actions, and its gradients.

    Returns ``(loss, grads)`` with ``grads`` aligned to ``net.params()``.
    """
    x = np.atleast_2d(np.asarray(states, dtype=float))
    a = np.asarray(actions, dtype=int)
    y = np.asarray(targets, dtype=float)
    B = x.shape[0]
    acts, pre = _forward(net, x)
    q = acts[-1][np.arange(B), a]
    err = q - y
    loss = 0.5 * float(np.mean(err ** 2))
    delta = np.zeros_like(acts[-1])
    delta[np.arange(B), a] = err / B
    grads = []
    for k in range(len(net.weights) - 1, -1, -1):
        gW = delta.T @ acts[k]
        gb = delta.sum(axis=0)
        grads = [gW, gb] + grads
        if k:
            delta = (delta @ net.weights[k]) * (pre[k - 1] > 0)
    return loss, grads


def train_step(net: QNetwork, batch, lr: float) -> float:
    """One SGD step toward the targets of ``batch = [(state, action, target), ...]``.

    Updates ``net`` in place and returns the loss before the step.
    """
    if not batch:
        raise ValueError("empty batch")
    states, actions, targets = zip(*batch)
    targets = np.asarray(targets, dtype=float)
    if not np.all(np.isfinite(targets)):
        raise ValueError("non-finite target in batch")
    loss, grads = loss_and_grads(net, states, actions, targets)
    for p, g in zip(net.params(), grads):
        p -= lr * g
    return loss


def save_model(net: QNetwork, path: str | Path) -> None:
    doc = {
        "format_version": FORMAT_VERSION,
        "layer_dims": net.layer_dims,
        "activation": "relu",
        "layers": [
            {"weights": W.ravel().tolist(), "bias": b.tolist()}
            for W, b in zip(net.weights, net.biases)
        ],
    }
    Path(path).write_text(json.dumps(doc))


def load_model(path: str | Path) -> QNetwork:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelLoadError(f"cannot read model {path}: {exc}") from exc
    try:
        if doc["format_version"] != FORMAT_VERSION:
            raise ModelLoadError(f"unsupported model format {doc['format_version']}")
        if doc.get("activation", "relu") != "relu":
            raise ModelLoadError(f"unknown activation {doc['activation']!r}")
        dims = [int(d) for d in doc["layer_dims"]]
        layers = doc["layers"]
        if len(layers) != len(dims) - 1:
            raise ModelLoadError("layer count does not match layer_dims")
        weights, biases = [], []
        for (fan_in, fan_out), layer in zip(zip(dims[:-1], dims[1:]), layers):
            W = np.asarray(layer["weights"], dtype=float)
            b = np.asarray(layer["bias"], dtype=float)
            if W.size != fan_in * fan_out or b.size != fan_out:
                raise ModelLoadError("layer size does not match layer_dims")
            weights.append(W.reshape(fan_out, fan_in))
            biases.append(b)
    except (KeyError, TypeError) as exc:
        raise ModelLoadError(f"malformed model file {path}: {exc}") from exc
    return QNetwork(weights, biases)
