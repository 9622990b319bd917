"""ReLU networks for the learned flow map, with explicit size/depth accounting.

The surrogate takes (q0, p0, z0) raw and emits (sin q_t, cos q_t, p_t, z_t),
so the learned map is continuous across the torus wrap; positions are decoded
with atan2. Training is plain minibatch Adam on mean squared error over the
embedded targets, all in NumPy with hand-written backprop.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .flow import IntegratorConfig, PhaseState, flow_map
from .hamiltonians import TWO_PI, HamiltonianSpec, wrap_torus


class TrainingError(RuntimeError):
    """Non-finite loss during training; carries the epoch index."""

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"non-finite training loss at epoch {epoch}")


@dataclass
class MlpParams:
    """Feedforward ReLU network weights.

    weights[l] has shape (layer_dims[l+1], layer_dims[l]); hidden activations
    are ReLU, the output layer is affine. periodic_encoding marks networks
    whose first 2d outputs are (sin q, cos q) pairs to be decoded by atan2;
    without it the first d outputs are read as raw torus coordinates.
    """

    layer_dims: tuple
    weights: list
    biases: list
    periodic_encoding: bool = True
    train_seed: Optional[int] = None

    def __post_init__(self):
        self.layer_dims = tuple(int(v) for v in self.layer_dims)
        if len(self.layer_dims) < 2:
            raise ValueError("need at least input and output dimensions")
        if len(self.weights) != len(self.layer_dims) - 1 or len(self.biases) != len(self.weights):
            raise ValueError("weights/biases do not match layer_dims")
        self.weights = [np.asarray(w, dtype=float) for w in self.weights]
        self.biases = [np.asarray(b, dtype=float) for b in self.biases]
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            expect = (self.layer_dims[l + 1], self.layer_dims[l])
            if w.shape != expect or b.shape != (expect[0],):
                raise ValueError(f"layer {l}: weight {w.shape} or bias {b.shape} != {expect}")


def mlp_forward(params: MlpParams, x):
    """Forward pass; accepts a single (d0,) vector or an (n, d0) batch."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    batch = arr[None] if single else arr
    if batch.shape[1] != params.layer_dims[0]:
        raise ValueError(f"input dimension {batch.shape[1]} != {params.layer_dims[0]}")
    h = batch
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        h = np.maximum(h @ w.T + b, 0.0)
    out = h @ params.weights[-1].T + params.biases[-1]
    return out[0] if single else out


def network_size(params: MlpParams) -> int:
    """Number of strictly nonzero weights and biases."""
    return int(sum(np.count_nonzero(w) for w in params.weights)
               + sum(np.count_nonzero(b) for b in params.biases))


def network_depth(params: MlpParams) -> int:
    """Number of hidden layers."""
    return len(params.weights) - 1


def init_mlp(layer_dims, seed: int, periodic_encoding: bool = True) -> MlpParams:
    """He-style uniform initialization, reproducible from the seed.

    Biases draw from the same uniform range as the weights so the first-layer
    ReLU kinks spread across the (non-centred) torus coordinates instead of
    clustering on hyperplanes through the origin.
    """
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = np.sqrt(6.0 / fan_in)
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-limit, limit, size=fan_out))
    return MlpParams(layer_dims=tuple(layer_dims), weights=weights, biases=biases,
                     periodic_encoding=periodic_encoding, train_seed=seed)


def identity_params(d: int) -> MlpParams:
    """Exact identity network on (q, p, z) via the ReLU(x) - ReLU(-x) gadget.

    Uses raw (non-embedded) outputs, so it reproduces any input exactly; handy
    as the constructed t=0 surrogate.
    """
    dim = 2 * d + 1
    a0 = np.vstack([np.eye(dim), -np.eye(dim)])
    a1 = np.hstack([np.eye(dim), -np.eye(dim)])
    return MlpParams(layer_dims=(dim, 2 * dim, dim),
                     weights=[a0, a1], biases=[np.zeros(2 * dim), np.zeros(dim)],
                     periodic_encoding=False)


@dataclass
class FlowDataset:
    """Sampled (input, target) pairs of the flow at a fixed time t.

    Inputs are uniform on the torus times the box [-M, M]^(d+1); each target
    row is the RK4 flow of its input row under the recorded integrator.
    """

    t: float
    d: int
    inputs: np.ndarray   # (n, 2d+1) columns q | p | z
    targets: np.ndarray  # (n, 2d+1)
    sampling_box: float
    seed: int
    integrator: IntegratorConfig

    def __len__(self):
        return len(self.inputs)

    def samples(self):
        """View the rows as (input PhaseState, target PhaseState) pairs."""
        d = self.d
        for row_in, row_out in zip(self.inputs, self.targets):
            yield (PhaseState(q=row_in[:d], p=row_in[d:2 * d], z=row_in[2 * d]),
                   PhaseState(q=row_out[:d], p=row_out[d:2 * d], z=row_out[2 * d]))


def generate_dataset(spec: HamiltonianSpec, t: float, n_samples: int, sampling_box: float,
                     seed: int, cfg: IntegratorConfig) -> FlowDataset:
    """Draw i.i.d. initial triples and push them through the exact flow."""
    if sampling_box < 1:
        raise ValueError("sampling_box must be >= 1")
    if n_samples < 0:
        raise ValueError("n_samples must be >= 0")
    d = spec.d
    rng = np.random.default_rng(seed)
    q0 = rng.uniform(0.0, TWO_PI, size=(n_samples, d))
    p0 = rng.uniform(-sampling_box, sampling_box, size=(n_samples, d))
    z0 = rng.uniform(-sampling_box, sampling_box, size=n_samples)
    q1, p1, z1 = flow_map(spec, q0, p0, z0, t, cfg.dt)
    inputs = np.hstack([q0, p0, z0[:, None]])
    targets = np.hstack([q1, p1, z1[:, None]])
    return FlowDataset(t=float(t), d=d, inputs=inputs, targets=targets,
                       sampling_box=float(sampling_box), seed=int(seed), integrator=cfg)


@dataclass
class TrainConfig:
    """Adam hyperparameters; the seed fixes the split, init and batch order.

    lr_decay is a per-epoch multiplicative factor on the step size (1.0 keeps
    it constant); decaying it tames late-epoch minibatch noise.
    """

    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 64
    epochs: int = 200
    seed: int = 0
    val_fraction: float = 0.1
    lr_decay: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.val_fraction < 1.0:
            raise ValueError("val_fraction must lie in (0, 1)")
        if self.batch_size < 1 or self.epochs < 1:
            raise ValueError("batch_size and epochs must be >= 1")
        if not 0.0 < self.lr_decay <= 1.0:
            raise ValueError("lr_decay must lie in (0, 1]")


def embed_targets(targets, d: int):
    """(q, p, z) rows -> (sin q, cos q, p, z) rows for the wrap-aware loss."""
    targets = np.asarray(targets, dtype=float)
    q = targets[:, :d]
    return np.hstack([np.sin(q), np.cos(q), targets[:, d:]])


def _forward_cached(params: MlpParams, x):
    acts = [x]
    pres = []
    h = x
    for w, b in zip(params.weights[:-1], params.biases[:-1]):
        pre = h @ w.T + b
        pres.append(pre)
        h = np.maximum(pre, 0.0)
        acts.append(h)
    out = h @ params.weights[-1].T + params.biases[-1]
    return acts, pres, out


def loss_and_grads(params: MlpParams, x, y):
    """Mean squared error over all outputs and its gradients by backprop."""
    acts, pres, out = _forward_cached(params, x)
    diff = out - y
    loss = float(np.mean(diff * diff))
    d_out = (2.0 / diff.size) * diff
    grads_w = [None] * len(params.weights)
    grads_b = [None] * len(params.biases)
    delta = d_out
    for l in range(len(params.weights) - 1, -1, -1):
        grads_w[l] = delta.T @ acts[l]
        grads_b[l] = delta.sum(axis=0)
        if l > 0:
            delta = (delta @ params.weights[l]) * (pres[l - 1] > 0.0)
    return loss, grads_w, grads_b


class _Adam:
    def __init__(self, params: MlpParams, cfg: TrainConfig):
        self.cfg = cfg
        self.m_w = [np.zeros_like(w) for w in params.weights]
        self.v_w = [np.zeros_like(w) for w in params.weights]
        self.m_b = [np.zeros_like(b) for b in params.biases]
        self.v_b = [np.zeros_like(b) for b in params.biases]
        self.t = 0

    def step(self, params: MlpParams, grads_w, grads_b, lr_scale: float = 1.0):
        c = self.cfg
        self.t += 1
        corr1 = 1.0 - c.beta1 ** self.t
        corr2 = 1.0 - c.beta2 ** self.t
        lr = c.learning_rate * lr_scale
        for l in range(len(params.weights)):
            for theta, g, m, v in ((params.weights[l], grads_w[l], self.m_w[l], self.v_w[l]),
                                   (params.biases[l], grads_b[l], self.m_b[l], self.v_b[l])):
                m *= c.beta1
                m += (1.0 - c.beta1) * g
                v *= c.beta2
                v += (1.0 - c.beta2) * g * g
                theta -= lr * (m / corr1) / (np.sqrt(v / corr2) + c.epsilon)


def train_flow_net(dataset: FlowDataset, arch, tcfg: TrainConfig):
    """Fit the flow surrogate; returns (params, [(epoch, train_loss, val_loss)])."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    d = dataset.d
    arch = tuple(int(v) for v in arch)
    if arch[0] != 2 * d + 1 or arch[-1] != 3 * d + 1:
        raise ValueError(f"arch must map {2 * d + 1} -> {3 * d + 1} "
                         f"(sin/cos embedded positions), got {arch}")
    x = dataset.inputs
    y = embed_targets(dataset.targets, d)
    rng = np.random.default_rng(tcfg.seed)
    perm = rng.permutation(len(x))
    n_val = max(1, int(round(tcfg.val_fraction * len(x))))
    if n_val >= len(x):
        raise ValueError("validation split leaves no training data")
    val_idx, train_idx = perm[:n_val], perm[n_val:]
    x_train, y_train = x[train_idx], y[train_idx]
    x_val, y_val = x[val_idx], y[val_idx]

    params = init_mlp(arch, seed=tcfg.seed)
    params.train_seed = tcfg.seed
    opt = _Adam(params, tcfg)
    history = []
    for epoch in range(tcfg.epochs):
        lr_scale = tcfg.lr_decay ** epoch
        order = rng.permutation(len(x_train))
        for start in range(0, len(x_train), tcfg.batch_size):
            batch = order[start:start + tcfg.batch_size]
            loss, gw, gb = loss_and_grads(params, x_train[batch], y_train[batch])
            if not np.isfinite(loss):
                raise TrainingError(epoch)
            opt.step(params, gw, gb, lr_scale)
        train_loss, _, _ = loss_and_grads(params, x_train, y_train)
        val_loss, _, _ = loss_and_grads(params, x_val, y_val)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)):
            raise TrainingError(epoch)
        history.append((epoch, train_loss, val_loss))
    return params, history


def surrogate_apply(params: MlpParams, q, p, z):
    """Array-level surrogate flow: (n, d), (n, d), (n,) -> (q, p, z) arrays."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    n, d = q.shape
    x = np.hstack([q, np.atleast_2d(np.asarray(p, dtype=float)), np.asarray(z, dtype=float)[:, None]])
    out = mlp_forward(params, x)
    if params.periodic_encoding:
        if out.shape[1] != 3 * d + 1:
            raise ValueError(f"expected {3 * d + 1} outputs, got {out.shape[1]}")
        q_t = wrap_torus(np.arctan2(out[:, :d], out[:, d:2 * d]))
        p_t = out[:, 2 * d:3 * d]
        z_t = out[:, 3 * d]
    else:
        if out.shape[1] != 2 * d + 1:
            raise ValueError(f"expected {2 * d + 1} outputs, got {out.shape[1]}")
        q_t = wrap_torus(out[:, :d])
        p_t = out[:, d:2 * d]
        z_t = out[:, 2 * d]
    return q_t, p_t, z_t


def surrogate_flow(params: MlpParams, states):
    """Apply the learned flow to a list of states, decoding positions by atan2."""
    states = list(states)
    if not states:
        return []
    d = (params.layer_dims[0] - 1) // 2
    q = np.stack([s.q for s in states])
    if q.shape[1] != d:
        raise ValueError(f"states have dimension {q.shape[1]}, network expects {d}")
    p = np.stack([s.p for s in states])
    z = np.array([s.z for s in states])
    q_t, p_t, z_t = surrogate_apply(params, q, p, z)
    return [PhaseState(q=q_t[i], p=p_t[i], z=float(z_t[i])) for i in range(len(states))]


def save_mlp(params: MlpParams, path):
    """Persist as JSON with row-major weight arrays; exact float round-trip."""
    payload = {
        "layer_dims": list(params.layer_dims),
        "weights": [w.tolist() for w in params.weights],
        "biases": [b.tolist() for b in params.biases],
        "periodic_encoding": bool(params.periodic_encoding),
        "train_seed": params.train_seed,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_mlp(path) -> MlpParams:
    with open(path) as fh:
        payload = json.load(fh)
    return MlpParams(layer_dims=tuple(payload["layer_dims"]),
                     weights=[np.array(w, dtype=float) for w in payload["weights"]],
                     biases=[np.array(b, dtype=float) for b in payload["biases"]],
                     periodic_encoding=bool(payload["periodic_encoding"]),
                     train_seed=payload["train_seed"])
