"""Reverse-mode automatic differentiation on an append-only tape.

Node values are 64-bit floats or float64 numpy arrays. A tape records every
elementary operation in creation order, which is automatically a topological
order, so a single reverse sweep propagates adjoints from a scalar root to
every parameter leaf. Construction and backward are single-threaded; the
resulting gradient arrays are plain immutable values.

Adjoint closures are specialized at record time: when an operand's shape
already matches the result no broadcast bookkeeping is emitted, which keeps
the training loop lean.
"""

from __future__ import annotations

import numpy as np

_SCALARS = (int, float, np.floating)


class EvalError(ValueError):
    """An operation left its numeric domain (sqrt of negative, x/0, ...)."""


def _as_value(x):
    if isinstance(x, _SCALARS):
        return float(x)
    return np.asarray(x, dtype=np.float64)


def _shape(v):
    return () if isinstance(v, float) else v.shape


def _unbroadcast(g, ref):
    """Sum gradient `g` down to the shape of `ref` (undo numpy broadcasting)."""
    if isinstance(ref, float):
        return float(np.sum(g))
    g = np.asarray(g)
    while g.ndim > ref.ndim:
        g = g.sum(axis=0)
    for ax, n in enumerate(ref.shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


class Node:
    """One recorded value. `adjoint` is filled by the backward sweep."""

    __slots__ = ("tape", "value", "adjoint", "_vjp")
    __array_ufunc__ = None  # force numpy to defer to our reflected operators

    def __init__(self, tape, value, vjp=None):
        self.tape = tape
        self.value = value
        self.adjoint = None
        self._vjp = vjp

    def _accum(self, g):
        self.adjoint = g if self.adjoint is None else self.adjoint + g

    def _accum_reduced(self, g):
        self._accum(_unbroadcast(g, self.value))

    # -- arithmetic ---------------------------------------------------------
    # Jets take precedence: returning NotImplemented for unknown operand
    # types lets Jet.__radd__ and friends run.

    def __add__(self, other):
        if isinstance(other, Node):
            v = self.value + other.value
            sink_a = self._pick_sink(v)
            sink_b = other._pick_sink(v)

            def vjp(g):
                sink_a(g)
                sink_b(g)

            return self.tape.record(v, vjp)
        if isinstance(other, _SCALARS + (np.ndarray,)):
            v = self.value + _as_value(other)
            return self.tape.record(v, self._pick_sink(v))
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Node):
            v = self.value - other.value
            sink_a = self._pick_sink(v)
            sink_b = other._pick_sink(v)

            def vjp(g):
                sink_a(g)
                sink_b(-g)

            return self.tape.record(v, vjp)
        if isinstance(other, _SCALARS + (np.ndarray,)):
            v = self.value - _as_value(other)
            return self.tape.record(v, self._pick_sink(v))
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _SCALARS + (np.ndarray,)):
            v = _as_value(other) - self.value
            sink = self._pick_sink(v)
            return self.tape.record(v, lambda g: sink(-g))
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, Node):
            a, b = self.value, other.value
            v = a * b
            sink_a = self._pick_sink(v)
            sink_b = other._pick_sink(v)

            def vjp(g):
                sink_a(g * b)
                sink_b(g * a)

            return self.tape.record(v, vjp)
        if isinstance(other, _SCALARS + (np.ndarray,)):
            c = _as_value(other)
            v = self.value * c
            sink = self._pick_sink(v)
            return self.tape.record(v, lambda g: sink(g * c))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Node):
            b = other.value
            _check_nonzero(b, "div")
            v = self.value / b
            sink_a = self._pick_sink(v)
            sink_b = other._pick_sink(v)

            def vjp(g):
                sink_a(g / b)
                sink_b(-g * v / b)

            return self.tape.record(v, vjp)
        if isinstance(other, _SCALARS + (np.ndarray,)):
            c = _as_value(other)
            _check_nonzero(c, "div")
            inv = 1.0 / c
            v = self.value * inv
            sink = self._pick_sink(v)
            return self.tape.record(v, lambda g: sink(g * inv))
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _SCALARS + (np.ndarray,)):
            b = self.value
            _check_nonzero(b, "div")
            v = _as_value(other) / b
            sink = self._pick_sink(v)

            def vjp(g):
                sink(-g * v / b)

            return self.tape.record(v, vjp)
        return NotImplemented

    def __neg__(self):
        sink = self._accum
        return self.tape.record(-self.value, lambda g: sink(-g))

    def _pick_sink(self, out_value):
        """Adjoint accumulator, with broadcast reduction only when needed."""
        if _shape(self.value) == _shape(out_value):
            return self._accum
        return self._accum_reduced

    def __repr__(self):
        return f"Node({self.value!r})"


def _check_nonzero(v, op):
    if isinstance(v, float):
        bad = v == 0.0
    else:
        bad = bool(np.any(v == 0.0))
    if bad:
        raise EvalError(f"{op}: zero divisor encountered (value {v!r})")


class Tape:
    """Append-only operation record with adjoint accumulators."""

    def __init__(self):
        self.nodes: list[Node] = []

    def leaf(self, value) -> Node:
        """Enter a parameter or constant as a differentiable leaf."""
        n = Node(self, _as_value(value))
        self.nodes.append(n)
        return n

    def record(self, value, vjp) -> Node:
        n = Node(self, value, vjp)
        self.nodes.append(n)
        return n

    def backward(self, root: Node) -> None:
        """Propagate adjoints from a finite scalar root; root adjoint is 1."""
        if root.tape is not self:
            raise ValueError("root does not belong to this tape")
        if not isinstance(root.value, float):
            raise ValueError("backward root must be a scalar")
        if not np.isfinite(root.value):
            raise EvalError(f"backward root is not finite: {root.value}")
        for n in self.nodes:
            n.adjoint = None
        root.adjoint = 1.0
        for n in reversed(self.nodes):
            if n.adjoint is not None and n._vjp is not None:
                n._vjp(n.adjoint)


def grad(root: Node, params: list[Node]) -> np.ndarray:
    """Exact reverse-mode gradient of `root` for `params`, flattened.

    The result is aligned index-for-index with the concatenation of the
    raveled parameter values, matching the network flatten order when
    `params` are the bound parameter nodes in that order.
    """
    root.tape.backward(root)
    pieces = []
    for p in params:
        a = p.adjoint
        if a is None:
            a = np.zeros_like(p.value) if not isinstance(p.value, float) else 0.0
        pieces.append(np.ravel(np.asarray(a, dtype=np.float64)))
    if not pieces:
        return np.zeros(0)
    return np.concatenate(pieces)
