"""Truncated derivative jets.

A jet carries a value together with its derivatives up to a fixed order
(at most 4) with respect to one designated scalar input: ``coeff[k]`` is the
k-th derivative. Coefficients may be floats, numpy arrays (element-wise
semantics), tape nodes, or nested jets for a second differentiation axis.
Arithmetic follows the Leibniz and quotient rules on derivative
coefficients; compositions with elementary functions live in
:mod:`glnlab.autodiff.ops`.
"""

from __future__ import annotations

import numpy as np

from .tape import EvalError

MAX_ORDER = 4

# binomial table for orders <= MAX_ORDER
_BINOM = [[1], [1, 1], [1, 2, 1], [1, 3, 3, 1], [1, 4, 6, 4, 1]]


def leading_value(x):
    """Descend to the plain numeric payload of a scalar-like."""
    while isinstance(x, Jet):
        x = x.coeff[0]
    if hasattr(x, "value"):  # tape node
        x = x.value
    return x


class Jet:
    __slots__ = ("coeff",)
    __array_ufunc__ = None

    def __init__(self, coeff):
        coeff = tuple(coeff)
        if not 1 <= len(coeff) <= MAX_ORDER + 1:
            raise ValueError(f"jet order must be 0..{MAX_ORDER}, got {len(coeff) - 1}")
        self.coeff = coeff

    @property
    def order(self) -> int:
        return len(self.coeff) - 1

    @classmethod
    def seed(cls, value, order: int) -> "Jet":
        """The input variable itself: coeff = [value, 1, 0, ...]."""
        if order < 1:
            raise ValueError("seed jet needs order >= 1")
        return cls((value, 1.0) + (0.0,) * (order - 1))

    @classmethod
    def const(cls, value, order: int) -> "Jet":
        return cls((value,) + (0.0,) * order)

    def _require_same_order(self, other: "Jet"):
        if other.order != self.order:
            raise ValueError(f"jet order mismatch: {self.order} vs {other.order}")

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            self._require_same_order(other)
            return Jet(a + b for a, b in zip(self.coeff, other.coeff))
        return Jet((self.coeff[0] + other,) + self.coeff[1:])

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Jet):
            self._require_same_order(other)
            return Jet(a - b for a, b in zip(self.coeff, other.coeff))
        return Jet((self.coeff[0] - other,) + self.coeff[1:])

    def __rsub__(self, other):
        return Jet((other - self.coeff[0],) + tuple(-c for c in self.coeff[1:]))

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._require_same_order(other)
            a, b = self.coeff, other.coeff
            out = []
            for k in range(self.order + 1):
                bk = _BINOM[k]
                acc = a[0] * b[k]
                for j in range(1, k + 1):
                    term = a[j] * b[k - j]
                    acc = acc + (bk[j] * term if bk[j] != 1 else term)
                out.append(acc)
            return Jet(out)
        return Jet(c * other for c in self.coeff)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            self._require_same_order(other)
            return _jet_div(self.coeff, other)
        lead = leading_value(other)
        if isinstance(lead, float) and lead == 0.0 or (
            not isinstance(lead, float) and bool(np.any(np.asarray(lead) == 0.0))
        ):
            raise EvalError(f"div: zero divisor encountered (value {lead!r})")
        return Jet(c / other for c in self.coeff)

    def __rtruediv__(self, other):
        # constant numerator: same recursion with zero higher coefficients
        return _jet_div((other,) + (0.0,) * self.order, self)

    def __neg__(self):
        return Jet(-c for c in self.coeff)

    def __repr__(self):
        return f"Jet({list(self.coeff)!r})"


def _jet_div(a_coeff, b: Jet):
    lead = leading_value(b)
    zero = lead == 0.0 if isinstance(lead, float) else bool(np.any(np.asarray(lead) == 0.0))
    if zero:
        raise EvalError(f"div: zero leading coefficient in divisor (value {lead!r})")
    bc = b.coeff
    out = [a_coeff[0] / bc[0]]
    for k in range(1, b.order + 1):
        bk = _BINOM[k]
        acc = a_coeff[k]
        for j in range(k):
            term = out[j] * bc[k - j]
            acc = acc - (bk[j] * term if bk[j] != 1 else term)
        out.append(acc / bc[0])
    return Jet(out)
