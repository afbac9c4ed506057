"""Elementary math on plain values, tape nodes, and jets.

Every function here accepts floats, float64 arrays, :class:`Node`, or
:class:`Jet` (including jets of nodes and nested jets) and routes to the
right rule: numpy for plain values, a recorded operation with its adjoint
rule for nodes, and Faa di Bruno composition on derivative coefficients for
jets. Jet composition recurses through these same functions, so the
coefficient algebra can itself be nodes or inner jets.
"""

from __future__ import annotations

import numpy as np

from .jets import Jet, leading_value
from .tape import EvalError, Node

__all__ = [
    "sin", "cos", "tanh", "exp", "sqrt", "sigmoid", "recip", "neg",
    "matmul", "take_col", "vconcat", "mean_square", "apply_unary",
    "apply_arith",
]


def _node_unary(x: Node, value, local):
    def vjp(g):
        x._accum(g * local)

    return x.tape.record(value, vjp)


# -- unary functions ---------------------------------------------------------

def sin(x):
    if isinstance(x, Jet):
        return _compose(x, _sin_derivs)
    if isinstance(x, Node):
        return _node_unary(x, np.sin(x.value), np.cos(x.value))
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        return _compose(x, _cos_derivs)
    if isinstance(x, Node):
        return _node_unary(x, np.cos(x.value), -np.sin(x.value))
    return np.cos(x)


def tanh(x):
    if isinstance(x, Jet):
        return _compose(x, _tanh_derivs)
    if isinstance(x, Node):
        t = np.tanh(x.value)
        return _node_unary(x, t, 1.0 - t * t)
    return np.tanh(x)


def exp(x):
    if isinstance(x, Jet):
        return _compose(x, _exp_derivs)
    if isinstance(x, Node):
        e = np.exp(x.value)
        return _node_unary(x, e, e)
    return np.exp(x)


def sqrt(x):
    if isinstance(x, Jet):
        _check_domain(leading_value(x) , "sqrt", lambda v: v <= 0.0)
        return _compose(x, _sqrt_derivs)
    if isinstance(x, Node):
        _check_domain(x.value, "sqrt", lambda v: v < 0.0)
        r = np.sqrt(x.value)
        return _node_unary(x, r, 0.5 / r)
    _check_domain(x, "sqrt", lambda v: v < 0.0)
    return np.sqrt(x)


def _sigmoid_plain(v):
    out = np.empty_like(v) if isinstance(v, np.ndarray) else None
    if out is None:
        return 1.0 / (1.0 + np.exp(-v)) if v >= 0 else np.exp(v) / (1.0 + np.exp(v))
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ev = np.exp(v[~pos])
    out[~pos] = ev / (1.0 + ev)
    return out


def sigmoid(x):
    if isinstance(x, Jet):
        return _compose(x, _sigmoid_derivs)
    if isinstance(x, Node):
        s = _sigmoid_plain(x.value)
        return _node_unary(x, s, s * (1.0 - s))
    return _sigmoid_plain(x)


def recip(x):
    if isinstance(x, Jet):
        return 1.0 / x
    if isinstance(x, Node):
        return 1.0 / x
    _check_domain(x, "recip", lambda v: v == 0.0)
    return 1.0 / x


def neg(x):
    return -x


def _check_domain(v, op, bad):
    if isinstance(v, float):
        hit = bad(v)
    else:
        hit = bool(np.any(bad(np.asarray(v))))
    if hit:
        raise EvalError(f"{op}: argument outside domain (value {v!r})")


# -- derivative tables f(u0), f'(u0), ..., f^(k)(u0) -------------------------

def _sin_derivs(u0, k):
    s = sin(u0)
    out = [s]
    if k >= 1:
        c = cos(u0)
        out.append(c)
    if k >= 2:
        out.append(-s)
    if k >= 3:
        out.append(-c)
    if k >= 4:
        out.append(s)
    return out


def _cos_derivs(u0, k):
    c = cos(u0)
    out = [c]
    if k >= 1:
        s = sin(u0)
        out.append(-s)
    if k >= 2:
        out.append(-c)
    if k >= 3:
        out.append(s)
    if k >= 4:
        out.append(c)
    return out


def _tanh_derivs(u0, k):
    t = tanh(u0)
    out = [t]
    if k >= 1:
        s = 1.0 - t * t
        out.append(s)
    if k >= 2:
        out.append(-2.0 * (t * s))
    if k >= 3:
        out.append(s * (4.0 * (t * t) - 2.0 * s))
    if k >= 4:
        out.append(8.0 * (t * s) * (2.0 * s - t * t))
    return out


def _exp_derivs(u0, k):
    e = exp(u0)
    return [e] * (k + 1)


def _sqrt_derivs(u0, k):
    f0 = sqrt(u0)
    out = [f0]
    if k >= 1:
        out.append(0.5 * recip(f0))
    if k >= 2:
        r = recip(u0)
        out.append(-0.5 * (out[1] * r))
    if k >= 3:
        out.append(-1.5 * (out[2] * r))
    if k >= 4:
        out.append(-2.5 * (out[3] * r))
    return out


def _sigmoid_derivs(u0, k):
    s = sigmoid(u0)
    out = [s]
    if k >= 1:
        d1 = s * (1.0 - s)
        out.append(d1)
    if k >= 2:
        w = 1.0 - 2.0 * s
        out.append(d1 * w)
    if k >= 3:
        out.append(d1 * (1.0 - 6.0 * s + 6.0 * (s * s)))
    if k >= 4:
        out.append((d1 * w) * (1.0 - 12.0 * s + 12.0 * (s * s)))
    return out


def _compose(x: Jet, derivs_fn):
    """Faa di Bruno composition f(x) for jet orders up to 4."""
    k = x.order
    f = derivs_fn(x.coeff[0], k)
    u = x.coeff
    out = [f[0]]
    if k >= 1:
        out.append(f[1] * u[1])
    if k >= 2:
        u1sq = u[1] * u[1]
        out.append(f[1] * u[2] + f[2] * u1sq)
    if k >= 3:
        out.append(f[1] * u[3] + 3.0 * (f[2] * (u[1] * u[2])) + f[3] * (u1sq * u[1]))
    if k >= 4:
        out.append(
            f[1] * u[4]
            + f[2] * (4.0 * (u[1] * u[3]) + 3.0 * (u[2] * u[2]))
            + 6.0 * (f[3] * (u1sq * u[2]))
            + f[4] * (u1sq * u1sq)
        )
    return Jet(out)


# -- structural operations ---------------------------------------------------

def _lift_zero(c, like):
    """Replace a literal 0.0 coefficient by zeros shaped like `like`."""
    if isinstance(c, float) and c == 0.0:
        return np.zeros_like(like) if isinstance(like, np.ndarray) else 0.0
    return c


def matmul(w, x):
    """Matrix product w @ x; w is a parameter matrix (array or node)."""
    if isinstance(x, Jet):
        out = []
        for c in x.coeff:
            if isinstance(c, float):
                if c != 0.0:
                    raise ValueError("matmul through a jet needs array coefficients")
                out.append(0.0)
            else:
                out.append(matmul(w, c))
        return Jet(out)
    if isinstance(w, Node) or isinstance(x, Node):
        wv = w.value if isinstance(w, Node) else w
        xv = x.value if isinstance(x, Node) else x
        v = wv @ xv

        def vjp(g):
            if isinstance(w, Node):
                w._accum(g @ xv.T)
            if isinstance(x, Node):
                x._accum(wv.T @ g)

        tape = w.tape if isinstance(w, Node) else x.tape
        return tape.record(v, vjp)
    return w @ x


def take_col(w, i: int):
    """Column i of a parameter matrix as an (out, 1) block."""
    if isinstance(w, Node):
        v = w.value[:, i:i + 1]

        def vjp(g):
            gw = np.zeros_like(w.value)
            gw[:, i:i + 1] = g
            w._accum(gw)

        return w.tape.record(v, vjp)
    return w[:, i:i + 1]


def vconcat(a, b):
    """Stack two (rows, n) blocks vertically; used by the two-branch model."""
    if isinstance(a, Jet) or isinstance(b, Jet):
        if not (isinstance(a, Jet) and isinstance(b, Jet)) or a.order != b.order:
            raise ValueError("vconcat needs jets of equal order on both sides")
        pairs = []
        for ca, cb in zip(a.coeff, b.coeff):
            ca = _lift_zero(ca, leading_value(a))
            cb = _lift_zero(cb, leading_value(b))
            pairs.append(vconcat(ca, cb))
        return Jet(pairs)
    if isinstance(a, Node) or isinstance(b, Node):
        av = a.value if isinstance(a, Node) else a
        bv = b.value if isinstance(b, Node) else b
        rows = av.shape[0]
        v = np.concatenate([av, bv], axis=0)

        def vjp(g):
            if isinstance(a, Node):
                a._accum(g[:rows])
            if isinstance(b, Node):
                b._accum(g[rows:])

        tape = a.tape if isinstance(a, Node) else b.tape
        return tape.record(v, vjp)
    return np.concatenate([a, b], axis=0)


def mean_square(x):
    """Mean of squared entries, as a scalar; the workhorse loss reduction."""
    if isinstance(x, Node):
        v = x.value
        n = v.size if isinstance(v, np.ndarray) else 1
        out = float(np.mean(np.square(v)))

        def vjp(g):
            x._accum((2.0 * g / n) * v)

        return x.tape.record(out, vjp)
    return float(np.mean(np.square(x)))


# -- tag-based entry points --------------------------------------------------

_UNARY = {
    "sin": sin, "cos": cos, "tanh": tanh, "exp": exp,
    "sqrt": sqrt, "sigmoid": sigmoid, "neg": neg, "recip": recip,
}


def apply_unary(name: str, x):
    """Apply an elementary function by tag (sin|tanh|exp|sqrt|sigmoid|neg|recip)."""
    try:
        f = _UNARY[name]
    except KeyError:
        raise ValueError(f"unknown unary function tag: {name!r}") from None
    return f(x)


def apply_arith(op: str, a, b):
    """Apply a binary arithmetic op by tag (add|sub|mul|div)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown arithmetic tag: {op!r}")
