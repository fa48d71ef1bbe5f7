"""ReLU feed-forward networks with explicit weights.

A network is a chain of affine maps with componentwise ``max(0, .)`` between
them and no activation after the last map.  Networks here are values: the
weight arrays are frozen on construction and every operation returns a new
network, so instances are safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CompositionError, ParseError, ShapeError

__all__ = [
    "ReluNetwork",
    "WidthVec",
    "evaluate",
    "evaluate_batch",
    "compose",
    "affine_post",
    "serialize",
    "deserialize",
    "parameter_count",
]


def _frozen_array(a, dtype=float):
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ReluNetwork:
    """Layered weights ``(W_i, b_i)`` of a scalar-output ReLU network.

    ``layers[i]`` holds the weight matrix with shape (out, in) and the bias
    vector with shape (out,).  Adjacent layers must chain dimensionally, the
    first must accept ``input_dim`` inputs, and the last must emit a single
    output.
    """

    input_dim: int
    layers: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.input_dim < 1:
            raise ShapeError("input_dim must be a positive integer")
        if not self.layers:
            raise ShapeError("a network needs at least one affine layer")
        frozen = []
        prev = self.input_dim
        for i, (w, b) in enumerate(self.layers):
            w = _frozen_array(w)
            b = _frozen_array(b)
            if w.ndim != 2 or b.ndim != 1 or w.shape[0] != b.shape[0]:
                raise ShapeError(f"layer {i}: weight must be (out, in), bias (out,)")
            if w.shape[1] != prev:
                raise ShapeError(
                    f"layer {i}: expected {prev} input columns, got {w.shape[1]}"
                )
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise ShapeError(f"layer {i}: weights and biases must be finite")
            frozen.append((w, b))
            prev = w.shape[0]
        if prev != 1:
            raise ShapeError("final layer must have output dimension 1")
        object.__setattr__(self, "layers", tuple(frozen))

    @property
    def hidden_widths(self):
        """Widths of the hidden layers (the paper-style widthvec)."""
        return [w.shape[0] for w, _ in self.layers[:-1]]

    @property
    def depth(self):
        """Number of hidden layers."""
        return len(self.layers) - 1

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class WidthVec:
    """Hidden-layer widths identifying an architecture class."""

    widths: tuple

    def __post_init__(self):
        widths = tuple(int(w) for w in self.widths)
        if not widths or any(w < 1 for w in widths):
            raise ShapeError("widthvec must be a nonempty list of positive widths")
        object.__setattr__(self, "widths", widths)

    def admits(self, net: ReluNetwork) -> bool:
        """Whether the network fits this class (narrower layers embed by zero rows)."""
        hw = net.hidden_widths
        return len(hw) == len(self.widths) and all(a <= b for a, b in zip(hw, self.widths))


def parameter_count(net: ReluNetwork) -> int:
    """Total number of weight and bias entries."""
    return sum(w.size + b.size for w, b in net.layers)


def evaluate_batch(net: ReluNetwork, xs) -> np.ndarray:
    """Evaluate at many points; ``xs`` has shape (k, input_dim) or (k,) for 1-D."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        if net.input_dim != 1:
            raise ShapeError("flat input array only valid for input_dim=1")
        xs = xs[:, None]
    if xs.ndim != 2 or xs.shape[1] != net.input_dim:
        raise ShapeError(f"expected points of dimension {net.input_dim}")
    h = xs
    for w, b in net.layers[:-1]:
        h = np.maximum(h @ w.T + b, 0.0)
    w, b = net.layers[-1]
    return (h @ w.T + b)[:, 0]


def evaluate(net: ReluNetwork, x) -> float:
    """Evaluate the network at a single point.

    ``x`` may be a scalar when ``input_dim == 1``, otherwise a length-
    ``input_dim`` vector.  All affine maps alternate with componentwise
    ``max(0, .)``; the final affine map is not followed by an activation.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (net.input_dim,):
        raise ShapeError(f"expected input of length {net.input_dim}, got {x.shape}")
    if not np.isfinite(x).all():
        raise ShapeError("input entries must be finite")
    return float(evaluate_batch(net, x[None, :])[0])


def compose(outer: ReluNetwork, inner: ReluNetwork) -> ReluNetwork:
    """Chain two networks so the result computes ``outer(inner(x))``.

    The inner output map and the outer first map are fused into a single
    affine layer, so no width-1 bottleneck or extra activation is inserted
    and the hidden widths of the result are ``inner.hidden_widths ++
    outer.hidden_widths``.
    """
    if outer.input_dim != 1:
        raise CompositionError("outer network must take one input")
    w_in, b_in = inner.layers[-1]
    w_out, b_out = outer.layers[0]
    fused = (w_out @ w_in, w_out @ b_in + b_out)
    layers = list(inner.layers[:-1]) + [fused] + list(outer.layers[1:])
    return ReluNetwork(inner.input_dim, tuple(layers))


def affine_post(net: ReluNetwork, scale: float, shift: float) -> ReluNetwork:
    """Rescale and shift the output: the result computes ``scale*net(x) + shift``.

    Only the final layer's parameters change, so the floating-point value is
    exactly ``scale * evaluate(net, x) + shift`` with that operation order.
    """
    scale = float(scale)
    shift = float(shift)
    if not (np.isfinite(scale) and np.isfinite(shift)):
        raise ValueError("scale and shift must be finite")
    w, b = net.layers[-1]
    layers = list(net.layers[:-1]) + [(scale * w, scale * b + shift)]
    return ReluNetwork(net.input_dim, tuple(layers))


def serialize(net: ReluNetwork) -> bytes:
    """Encode as the JSON interchange document (UTF-8 bytes).

    Floats are written with Python's shortest round-trip representation, so
    ``deserialize(serialize(net))`` reproduces every parameter bit-exactly.
    """
    doc = {
        "input_dim": net.input_dim,
        "layers": [
            {"weight": w.tolist(), "bias": b.tolist()} for w, b in net.layers
        ],
    }
    return json.dumps(doc).encode("utf-8")


def deserialize(data) -> ReluNetwork:
    """Parse the JSON interchange document back into a network.

    Raises :class:`ParseError` (with the failing offset) on malformed input
    and :class:`ShapeError` when the dimension chain is violated.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed network document: {e.msg}", offset=e.pos) from e
    if not isinstance(doc, dict) or "input_dim" not in doc or "layers" not in doc:
        raise ParseError("network document must carry input_dim and layers")
    try:
        layers = tuple((lay["weight"], lay["bias"]) for lay in doc["layers"])
        input_dim = int(doc["input_dim"])
    except (TypeError, KeyError) as e:
        raise ParseError(f"network document has malformed layer entries: {e}") from e
    return ReluNetwork(input_dim, layers)
