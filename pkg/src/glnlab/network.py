"""Dense feed-forward models.

Four activation regimes share one forward routine: sine, tanh, the
trainable sine/tanh mix (one gate pre-activation ``z`` and one subtracted
``act_bias`` per layer, shared by every neuron of the layer), and identity
for output layers. The same code path evaluates plain float64 arrays, tape
nodes, and derivative jets, so training and residual pipelines reuse it
unchanged.

Models are immutable; every update produces a new instance.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .autodiff import ops
from .autodiff.ops import matmul, take_col, vconcat

ACTIVATION_KINDS = ("sin", "tanh", "gln", "identity")


@dataclass(frozen=True)
class ActivationSpec:
    """Per-layer activation; z and act_bias are live only for kind 'gln'."""

    kind: str
    z: float = 0.0
    act_bias: float = 0.0

    def __post_init__(self):
        if self.kind not in ACTIVATION_KINDS:
            raise ValueError(f"unknown activation kind: {self.kind!r}")

    @property
    def alpha(self) -> float:
        return float(ops.sigmoid(self.z))


@dataclass(frozen=True)
class DenseLayer:
    weights: np.ndarray  # (out, in)
    biases: np.ndarray   # (out, 1)
    activation: ActivationSpec

    def __post_init__(self):
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0], 1):
            raise ValueError("layer shapes inconsistent")


def gln_activate(x, z, act_bias):
    """sigmoid(z)*sin(x) + (1-sigmoid(z))*tanh(x) - act_bias."""
    a = ops.sigmoid(z)
    s = ops.sin(x)
    t = ops.tanh(x)
    return t + a * (s - t) - act_bias


def _activate(h, kind, z, act_bias):
    if kind == "identity":
        return h
    if kind == "sin":
        return ops.sin(h)
    if kind == "tanh":
        return ops.tanh(h)
    return gln_activate(h, z, act_bias)


def _affine(w, b, inputs):
    """Affine map for either a stacked (in, n) batch or per-component inputs."""
    if isinstance(inputs, (list, tuple)):
        acc = b
        for i, comp in enumerate(inputs):
            acc = acc + take_col(w, i) * comp
        return acc
    return matmul(w, inputs) + b


def _run_stack(layers, pieces, inputs):
    """Apply a layer stack; `pieces` iterates parameter values in order."""
    h = inputs
    first = True
    for layer in layers:
        w = next(pieces)
        b = next(pieces)
        kind = layer.activation.kind
        if kind == "gln":
            z = next(pieces)
            ab = next(pieces)
        else:
            z = ab = None
        h = _affine(w, b, h) if first else matmul(w, h) + b
        h = _activate(h, kind, z, ab)
        first = False
    return h


def _layer_pieces(layer):
    out = [layer.weights, layer.biases]
    if layer.activation.kind == "gln":
        out += [layer.activation.z, layer.activation.act_bias]
    return out


def _rebuild_layer(layer, pieces):
    w = next(pieces)
    b = next(pieces)
    act = layer.activation
    if act.kind == "gln":
        act = replace(act, z=float(next(pieces)), act_bias=float(next(pieces)))
    return DenseLayer(np.asarray(w, dtype=np.float64),
                      np.asarray(b, dtype=np.float64), act)


def _check_inputs(inputs, in_dim):
    if isinstance(inputs, (list, tuple)):
        n = len(inputs)
    elif isinstance(inputs, np.ndarray):
        n = inputs.shape[0]
    else:
        n = None  # nodes/jets: caller guarantees the stacked shape
    if n is not None and n != in_dim:
        raise ValueError(f"input has {n} components, model expects {in_dim}")


@dataclass(frozen=True)
class Network:
    """Plain multilayer perceptron; the last layer is identity with one output."""

    layers: tuple[DenseLayer, ...]
    seed: int | None = None

    @property
    def in_dim(self) -> int:
        return self.layers[0].weights.shape[1]

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.in_dim,) + tuple(l.weights.shape[0] for l in self.layers)

    def param_pieces(self) -> list:
        out = []
        for l in self.layers:
            out += _layer_pieces(l)
        return out

    def with_pieces(self, pieces) -> "Network":
        it = iter(pieces)
        return Network(tuple(_rebuild_layer(l, it) for l in self.layers), self.seed)

    def forward(self, inputs, pieces=None):
        _check_inputs(inputs, self.in_dim)
        it = iter(self.param_pieces() if pieces is None else pieces)
        return _run_stack(self.layers, it, inputs)

    def flatten(self) -> np.ndarray:
        return flatten_pieces(self.param_pieces())

    def unflatten(self, vec: np.ndarray) -> "Network":
        return self.with_pieces(unflatten_pieces(vec, self.param_pieces()))

    def alphas(self) -> list[tuple[int, float]]:
        return [(i, l.activation.alpha)
                for i, l in enumerate(self.layers) if l.activation.kind == "gln"]

    def to_json(self) -> str:
        kinds = [l.activation.kind for l in self.layers]
        return json.dumps({
            "model": "mlp",
            "shape": list(self.shape),
            "activations": kinds,
            "seed": self.seed,
            "params": self.flatten().tolist(),
        })


@dataclass(frozen=True)
class TbnNetwork:
    """Two half-width branches (all-sin, all-tanh) joined by one linear neuron.

    The combiner reads the concatenated final hidden activations of both
    branches, so zeroing one half of its weights reduces the model to the
    other branch plus the combiner bias.
    """

    sin_layers: tuple[DenseLayer, ...]
    tanh_layers: tuple[DenseLayer, ...]
    combiner: DenseLayer
    seed: int | None = None

    @property
    def in_dim(self) -> int:
        return self.sin_layers[0].weights.shape[1]

    def param_pieces(self) -> list:
        out = []
        for l in (*self.sin_layers, *self.tanh_layers, self.combiner):
            out += _layer_pieces(l)
        return out

    def with_pieces(self, pieces) -> "TbnNetwork":
        it = iter(pieces)
        sin_ls = tuple(_rebuild_layer(l, it) for l in self.sin_layers)
        tanh_ls = tuple(_rebuild_layer(l, it) for l in self.tanh_layers)
        comb = _rebuild_layer(self.combiner, it)
        return TbnNetwork(sin_ls, tanh_ls, comb, self.seed)

    def forward(self, inputs, pieces=None):
        _check_inputs(inputs, self.in_dim)
        it = iter(self.param_pieces() if pieces is None else pieces)
        hs = _run_stack(self.sin_layers, it, inputs)
        ht = _run_stack(self.tanh_layers, it, inputs)
        h = vconcat(hs, ht)
        w = next(it)
        b = next(it)
        return matmul(w, h) + b

    def flatten(self) -> np.ndarray:
        return flatten_pieces(self.param_pieces())

    def unflatten(self, vec: np.ndarray) -> "TbnNetwork":
        return self.with_pieces(unflatten_pieces(vec, self.param_pieces()))

    def alphas(self) -> list[tuple[int, float]]:
        return []

    def to_json(self) -> str:
        # stored as the matched full-width shape that init_tbn accepts
        shape = ((self.in_dim,)
                 + tuple(2 * l.weights.shape[0] for l in self.sin_layers)
                 + (self.combiner.weights.shape[0],))
        return json.dumps({
            "model": "tbn",
            "shape": list(shape),
            "seed": self.seed,
            "params": self.flatten().tolist(),
        })


Model = Network | TbnNetwork


def flatten_pieces(pieces) -> np.ndarray:
    """Flat float64 view of parameter pieces; exact bijection with unflatten."""
    parts = []
    for p in pieces:
        if isinstance(p, float):
            parts.append(np.array([p]))
        else:
            parts.append(np.ravel(p))
    return np.concatenate(parts).astype(np.float64, copy=False)


def unflatten_pieces(vec: np.ndarray, template) -> list:
    vec = np.asarray(vec, dtype=np.float64)
    out = []
    i = 0
    for p in template:
        if isinstance(p, float):
            out.append(float(vec[i]))
            i += 1
        else:
            k = p.size
            out.append(vec[i:i + k].reshape(p.shape).copy())
            i += k
    if i != vec.size:
        raise ValueError(f"parameter vector length {vec.size}, expected {i}")
    return out


def _lecun_uniform(rng, fan_out: int, fan_in: int) -> np.ndarray:
    # fan-in-only scaling: unit weight variance per input, which for a
    # one-dimensional input keeps the first layer wide enough to cover
    # unit-frequency features within the fixed training budgets
    limit = np.sqrt(3.0 / fan_in)
    return rng.uniform(-limit, limit, size=(fan_out, fan_in))


def init_mlp(shape, kind: str, seed: int) -> Network:
    """LeCun-uniform weights, zero biases, gate z=0 (alpha=0.5), act_bias=0."""
    shape = tuple(int(s) for s in shape)
    if len(shape) < 2:
        raise ValueError("shape needs at least input and output sizes")
    if kind not in ("sin", "tanh", "gln"):
        raise ValueError(f"unsupported hidden activation: {kind!r}")
    rng = np.random.default_rng(seed)
    layers = []
    for i in range(len(shape) - 1):
        fan_in, fan_out = shape[i], shape[i + 1]
        act = ActivationSpec("identity" if i == len(shape) - 2 else kind)
        layers.append(DenseLayer(_lecun_uniform(rng, fan_out, fan_in),
                                 np.zeros((fan_out, 1)), act))
    return Network(tuple(layers), seed)


def init_tbn(shape, seed: int) -> TbnNetwork:
    """Two-branch model matched to an MLP `shape`; branch widths are halved."""
    shape = tuple(int(s) for s in shape)
    if len(shape) < 3:
        raise ValueError("two-branch model needs at least one hidden layer")
    hidden = shape[1:-1]
    if any(h % 2 for h in hidden):
        raise ValueError("hidden widths must be even to split into branches")
    half = [h // 2 for h in hidden]
    rng = np.random.default_rng(seed)

    def branch(kind):
        layers = []
        fan_in = shape[0]
        for width in half:
            layers.append(DenseLayer(_lecun_uniform(rng, width, fan_in),
                                     np.zeros((width, 1)), ActivationSpec(kind)))
            fan_in = width
        return tuple(layers)

    sin_ls = branch("sin")
    tanh_ls = branch("tanh")
    comb_in = 2 * half[-1]
    comb = DenseLayer(_lecun_uniform(rng, shape[-1], comb_in), np.zeros((shape[-1], 1)),
                      ActivationSpec("identity"))
    return TbnNetwork(sin_ls, tanh_ls, comb, seed)


def init_model(model_kind: str, shape, seed: int) -> Model:
    """Build any of the four benchmark models: gln, sin, tanh, tbn."""
    if model_kind == "tbn":
        return init_tbn(shape, seed)
    return init_mlp(shape, model_kind, seed)


def model_from_json(text: str) -> Model:
    doc = json.loads(text)
    params = np.asarray(doc["params"], dtype=np.float64)
    if doc["model"] == "mlp":
        shape = doc["shape"]
        kinds = doc["activations"]
        layers = []
        for i in range(len(shape) - 1):
            layers.append(DenseLayer(np.zeros((shape[i + 1], shape[i])),
                                     np.zeros((shape[i + 1], 1)),
                                     ActivationSpec(kinds[i])))
        net = Network(tuple(layers), doc.get("seed"))
        return net.unflatten(params)
    if doc["model"] == "tbn":
        skeleton = init_tbn(doc["shape"], 0)
        skeleton = TbnNetwork(skeleton.sin_layers, skeleton.tanh_layers,
                              skeleton.combiner, doc.get("seed"))
        return skeleton.unflatten(params)
    raise ValueError(f"unknown model document kind: {doc['model']!r}")
