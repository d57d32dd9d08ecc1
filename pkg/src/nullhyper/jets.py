"""Truncated Taylor jets (value plus exact partial derivatives up to order 3).

A :class:`Jet` carries an array-valued quantity together with its partial
derivatives with respect to ``n`` chart coordinates.  Derivative axes are
stored *leading*: for a value of shape ``S`` the k-th derivative tensor has
shape ``(n,) * k + S``.  This keeps numpy broadcasting of the trailing value
axes intact, so elementwise products and ``matmul`` work on every derivative
layer at once.

Order 2 jets (``Jet2``) are the workhorse of the curvature pipeline.  Order 3
is used internally wherever a derived metric needs second derivatives of a
first derivative (induced metrics, tangent maps of constrained charts).

The module-level functions (``sin``, ``sqrt``, ``inv`` ...) dispatch on their
argument, so geometry code written against them runs unchanged on plain
floats/arrays and on jets.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Jet",
    "Jet2",
    "lift",
    "jet_lift",
    "constant_like",
    "value_of",
    "stack",
    "einsum",
    "inv",
    "solve",
    "compose",
    "sin",
    "cos",
    "exp",
    "log",
    "sqrt",
    "arccos",
    "arcsin",
    "arctan",
    "arctan2",
    "sinh",
    "cosh",
    "tanh",
    "arccosh",
]

MAX_ORDER = 3


def _pad(d: np.ndarray, k: int, rank: int) -> np.ndarray:
    """Insert singleton value axes right after the k derivative axes."""
    missing = rank - (d.ndim - k)
    if missing <= 0:
        return d
    return d.reshape(d.shape[:k] + (1,) * missing + d.shape[k:])


class Jet:
    __slots__ = ("value", "derivs", "n")
    # make numpy defer to the reflected jet operators
    __array_ufunc__ = None

    def __init__(self, value, derivs: Sequence[np.ndarray], n: int | None = None):
        self.value = np.asarray(value, dtype=float)
        self.derivs = tuple(np.asarray(d, dtype=float) for d in derivs)
        if len(self.derivs) > MAX_ORDER:
            raise ValueError(f"jets are truncated at order {MAX_ORDER}")
        if n is None:
            if not self.derivs:
                raise ValueError("order-0 jet needs an explicit arity")
            n = self.derivs[0].shape[0]
        self.n = int(n)

    # -- basic properties -------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.derivs)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    @property
    def ndim(self) -> int:
        return self.value.ndim

    @property
    def grad(self) -> np.ndarray:
        """First derivatives with the derivative axis moved last."""
        return np.moveaxis(self.derivs[0], 0, -1)

    @property
    def hess(self) -> np.ndarray:
        return np.moveaxis(self.derivs[1], (0, 1), (-2, -1))

    @property
    def third(self) -> np.ndarray:
        return np.moveaxis(self.derivs[2], (0, 1, 2), (-3, -2, -1))

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, n={self.n}, value={self.value!r})"

    def truncate(self, order: int) -> "Jet":
        if order > self.order:
            raise ValueError(f"cannot raise jet order {self.order} -> {order}")
        return Jet(self.value, self.derivs[:order], self.n)

    def d(self, k: int) -> "Jet":
        """Partial derivative along coordinate k, one order lower."""
        if self.order == 0:
            raise ValueError("order-0 jet has no derivatives")
        return Jet(self.derivs[0][k], [dd[k] for dd in self.derivs[1:]], self.n)

    def _like(self, value, derivs) -> "Jet":
        return Jet(value, derivs, self.n)

    # -- structural ops -----------------------------------------------------
    def __getitem__(self, idx) -> "Jet":
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self._like(
            self.value[idx],
            [d[(slice(None),) * (k + 1) + idx] for k, d in enumerate(self.derivs)],
        )

    def reshape(self, *shape) -> "Jet":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        value = self.value.reshape(shape)
        return self._like(
            value,
            [d.reshape(d.shape[: k + 1] + value.shape) for k, d in enumerate(self.derivs)],
        )

    def transpose(self, axes=None) -> "Jet":
        r = self.ndim
        if axes is None:
            axes = tuple(reversed(range(r)))
        axes = tuple(a % r for a in axes)
        return self._like(
            self.value.transpose(axes),
            [d.transpose(tuple(range(k + 1)) + tuple(a + k + 1 for a in axes))
             for k, d in enumerate(self.derivs)],
        )

    @property
    def T(self) -> "Jet":
        if self.ndim < 2:
            return self
        return self._like(
            np.swapaxes(self.value, -1, -2), [np.swapaxes(d, -1, -2) for d in self.derivs]
        )

    def sum(self, axis=None) -> "Jet":
        r = self.ndim
        if axis is None:
            axes = tuple(range(r))
        elif isinstance(axis, int):
            axes = (axis % r,)
        else:
            axes = tuple(a % r for a in axis)
        return self._like(
            self.value.sum(axis=axes),
            [d.sum(axis=tuple(a + k + 1 for a in axes)) for k, d in enumerate(self.derivs)],
        )

    def trace(self) -> "Jet":
        return self._like(
            np.trace(self.value, axis1=-2, axis2=-1),
            [np.trace(d, axis1=-2, axis2=-1) for d in self.derivs],
        )

    # -- arithmetic ---------------------------------------------------------
    def __neg__(self) -> "Jet":
        return self._like(-self.value, [-d for d in self.derivs])

    def __pos__(self) -> "Jet":
        return self

    def __add__(self, other) -> "Jet":
        if isinstance(other, Jet):
            _check_arity(self, other)
            order = min(self.order, other.order)
            rank = max(self.ndim, other.ndim)
            return self._like(
                self.value + other.value,
                [_pad(self.derivs[k], k + 1, rank) + _pad(other.derivs[k], k + 1, rank)
                 for k in range(order)],
            )
        other = np.asarray(other, dtype=float)
        value = self.value + other
        return self._like(
            value,
            [np.broadcast_to(_pad(d, k + 1, value.ndim), d.shape[: k + 1] + value.shape)
             for k, d in enumerate(self.derivs)],
        )

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        return _bilinear(self, other, np.multiply)

    def __rmul__(self, other) -> "Jet":
        return _bilinear(other, self, np.multiply)

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * _reciprocal(other)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other) -> "Jet":
        return _reciprocal(self) * other

    def __pow__(self, p) -> "Jet":
        if isinstance(p, Jet):
            raise TypeError("jet exponents are not supported")
        p = float(p)
        if p == 2.0:
            return self * self
        x = self.value
        return _chain(
            self,
            x**p,
            p * x ** (p - 1),
            p * (p - 1) * x ** (p - 2),
            p * (p - 1) * (p - 2) * x ** (p - 3),
        )

    def __matmul__(self, other) -> "Jet":
        return _bilinear(self, other, np.matmul)

    def __rmatmul__(self, other) -> "Jet":
        return _bilinear(other, self, np.matmul)


Jet2 = Jet


def _check_arity(a: Jet, b: Jet) -> None:
    if a.n != b.n:
        raise ValueError(f"jet arity mismatch: {a.n} vs {b.n}")


def _bilinear(a, b, op: Callable, pad: bool = True) -> Jet:
    """Leibniz rule for a bilinear ``op`` acting on the trailing value axes."""
    a_jet, b_jet = isinstance(a, Jet), isinstance(b, Jet)
    if a_jet and b_jet:
        _check_arity(a, b)
    if not a_jet:
        a = np.asarray(a, dtype=float)
        if pad:
            rank = max(a.ndim, b.ndim)
            b = Jet(b.value, [_pad(d, k + 1, rank) for k, d in enumerate(b.derivs)], b.n)
        return Jet(op(a, b.value), [op(a, d) for d in b.derivs], b.n)
    if not b_jet:
        b = np.asarray(b, dtype=float)
        if pad:
            rank = max(a.ndim, b.ndim)
            a = Jet(a.value, [_pad(d, k + 1, rank) for k, d in enumerate(a.derivs)], a.n)
        return Jet(op(a.value, b), [op(d, b) for d in a.derivs], a.n)

    order = min(a.order, b.order)
    if pad:
        rank = max(a.ndim, b.ndim)
        av, bv = _pad(a.value, 0, rank), _pad(b.value, 0, rank)
        ad = [_pad(d, k + 1, rank) for k, d in enumerate(a.derivs)]
        bd = [_pad(d, k + 1, rank) for k, d in enumerate(b.derivs)]
    else:
        av, bv, ad, bd = a.value, b.value, list(a.derivs), list(b.derivs)

    derivs = []
    if order >= 1:
        a1, b1 = ad[0], bd[0]
        derivs.append(op(a1, bv) + op(av, b1))
    if order >= 2:
        a2, b2 = ad[1], bd[1]
        derivs.append(
            op(a2, bv) + op(av, b2) + op(a1[:, None], b1[None]) + op(a1[None], b1[:, None])
        )
    if order >= 3:
        a3, b3 = ad[2], bd[2]
        derivs.append(
            op(a3, bv)
            + op(av, b3)
            + op(a1[:, None, None], b2[None])
            + op(a1[None, :, None], b2[:, None, :])
            + op(a1[None, None, :], b2[:, :, None])
            + op(a2[:, :, None], b1[None, None])
            + op(a2[:, None, :], b1[None, :, None])
            + op(a2[None, :, :], b1[:, None, None])
        )
    return Jet(op(av, bv), derivs, a.n)


def _chain(a: Jet, f0, f1, f2=None, f3=None) -> Jet:
    """Apply a scalar function given its derivatives at ``a.value``."""
    derivs = []
    if a.order >= 1:
        a1 = a.derivs[0]
        derivs.append(f1 * a1)
    if a.order >= 2:
        a2 = a.derivs[1]
        derivs.append(f1 * a2 + f2 * a1[:, None] * a1[None])
    if a.order >= 3:
        a3 = a.derivs[2]
        sym = (
            a1[:, None, None] * a2[None]
            + a1[None, :, None] * a2[:, None, :]
            + a1[None, None, :] * a2[:, :, None]
        )
        derivs.append(
            f1 * a3 + f2 * sym + f3 * a1[:, None, None] * a1[None, :, None] * a1[None, None, :]
        )
    return Jet(f0, derivs, a.n)


def _reciprocal(a: Jet) -> Jet:
    x = a.value
    r = 1.0 / x
    return _chain(a, r, -r * r, 2 * r**3, -6 * r**4)


# -- constructors ---------------------------------------------------------


def lift(x, order: int = 2) -> Jet:
    """Lift a chart point to the identity jet of the coordinates."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("lift expects a 1-D coordinate vector")
    n = x.shape[0]
    derivs = [np.eye(n)]
    for k in range(2, order + 1):
        derivs.append(np.zeros((n,) * (k + 1)))
    return Jet(x, derivs[:order], n)


def jet_lift(x, active: int, order: int = 2) -> Jet:
    """The coordinate function ``x[active]`` as a scalar jet."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if not 0 <= active < n:
        raise IndexError(f"active index {active} out of range for arity {n}")
    return lift(x, order)[active]


def constant_like(value, ref: Jet) -> Jet:
    value = np.asarray(value, dtype=float)
    return Jet(
        value,
        [np.zeros((ref.n,) * (k + 1) + value.shape) for k in range(ref.order)],
        ref.n,
    )


def value_of(x):
    return x.value if isinstance(x, Jet) else np.asarray(x, dtype=float)


def stack(items: Sequence, axis: int = 0):
    ref = next((it for it in items if isinstance(it, Jet)), None)
    if ref is None:
        return np.stack([np.asarray(it, dtype=float) for it in items], axis=axis)
    jets = [it if isinstance(it, Jet) else constant_like(it, ref) for it in items]
    for j in jets:
        _check_arity(ref, j)
    order = min(j.order for j in jets)
    r = jets[0].ndim + 1
    ax = axis % r
    return Jet(
        np.stack([j.value for j in jets], axis=ax),
        [np.stack([j.derivs[k] for j in jets], axis=ax + k + 1) for k in range(order)],
        ref.n,
    )


def einsum(subscripts: str, a, b):
    """Two-operand ``np.einsum`` lifted to jets (explicit output required)."""
    ins, out = subscripts.replace(" ", "").split("->")
    sa, sb = ins.split(",")
    spec = f"...{sa},...{sb}->...{out}"
    if not isinstance(a, Jet) and not isinstance(b, Jet):
        return np.einsum(subscripts, a, b)
    return _bilinear(a, b, lambda x, y: np.einsum(spec, x, y), pad=False)


def inv(m):
    """Matrix inverse; jets via Newton-Schulz refinement of the exact value."""
    if not isinstance(m, Jet):
        return np.linalg.inv(m)
    x = constant_like(np.linalg.inv(m.value), m)
    eye = np.eye(m.shape[-1])
    steps = max(1, math.ceil(math.log2(m.order + 1))) if m.order else 0
    for _ in range(steps):
        x = x @ (2.0 * eye - m @ x)
    return x


def solve(m, b):
    if not isinstance(m, Jet) and not isinstance(b, Jet):
        return np.linalg.solve(m, b)
    return inv(m) @ b


def compose(taylor: Sequence[np.ndarray], inner: Jet) -> Jet:
    """Chain rule: outer map known by its Taylor tensors at ``inner.value``.

    ``taylor = [v, D1, D2, D3]`` with derivative axes leading, ``D1`` of shape
    ``(m,) + S`` etc., where ``m`` is the length of the inner vector.
    """
    v = np.asarray(taylor[0], dtype=float)
    order = min(inner.order, len(taylor) - 1)
    derivs = []
    x1 = inner.derivs[0] if order >= 1 else None
    if order >= 1:
        g = taylor[1]
        derivs.append(np.tensordot(x1, g, axes=([1], [0])))
    if order >= 2:
        h = taylor[2]
        x2 = inner.derivs[1]
        t2 = np.tensordot(x2, g, axes=([2], [0]))
        hx = np.tensordot(x1, h, axes=([1], [0]))  # (a, j, ...)
        t2 = t2 + np.einsum("bj,aj...->ab...", x1, hx)
        derivs.append(t2)
    if order >= 3:
        t3_tensor = taylor[3]
        x3 = inner.derivs[2]
        t3 = np.tensordot(x3, g, axes=([3], [0]))
        # H_ij x_a^i x_bc^j and permutations
        cross = np.einsum("bcj,aj...->abc...", x2, hx)
        t3 = t3 + cross + np.moveaxis(cross, 0, 1) + np.moveaxis(cross, 0, 2)
        tx = np.tensordot(x1, t3_tensor, axes=([1], [0]))  # (a, j, k, ...)
        tx = np.einsum("bj,ajk...->abk...", x1, tx)
        tx = np.einsum("ck,abk...->abc...", x1, tx)
        derivs.append(t3 + tx)
    return Jet(v, derivs, inner.n)


# -- elementary functions -------------------------------------------------


def sin(x):
    if not isinstance(x, Jet):
        return np.sin(x)
    s, c = np.sin(x.value), np.cos(x.value)
    return _chain(x, s, c, -s, -c)


def cos(x):
    if not isinstance(x, Jet):
        return np.cos(x)
    s, c = np.sin(x.value), np.cos(x.value)
    return _chain(x, c, -s, -c, s)


def exp(x):
    if not isinstance(x, Jet):
        return np.exp(x)
    e = np.exp(x.value)
    return _chain(x, e, e, e, e)


def log(x):
    if not isinstance(x, Jet):
        return np.log(x)
    v = x.value
    return _chain(x, np.log(v), 1 / v, -1 / v**2, 2 / v**3)


def sqrt(x):
    if not isinstance(x, Jet):
        return np.sqrt(x)
    r = np.sqrt(x.value)
    return _chain(x, r, 0.5 / r, -0.25 / r**3, 0.375 / r**5)


def sinh(x):
    if not isinstance(x, Jet):
        return np.sinh(x)
    s, c = np.sinh(x.value), np.cosh(x.value)
    return _chain(x, s, c, s, c)


def cosh(x):
    if not isinstance(x, Jet):
        return np.cosh(x)
    s, c = np.sinh(x.value), np.cosh(x.value)
    return _chain(x, c, s, c, s)


def tanh(x):
    if not isinstance(x, Jet):
        return np.tanh(x)
    t = np.tanh(x.value)
    s = 1 - t * t
    return _chain(x, t, s, -2 * t * s, s * (6 * t * t - 2))


def arctan(x):
    if not isinstance(x, Jet):
        return np.arctan(x)
    v = x.value
    q = 1 / (1 + v * v)
    return _chain(x, np.arctan(v), q, -2 * v * q**2, (6 * v * v - 2) * q**3)


def arcsin(x):
    if not isinstance(x, Jet):
        return np.arcsin(x)
    v = x.value
    w = 1 - v * v
    return _chain(x, np.arcsin(v), w**-0.5, v * w**-1.5, (1 + 2 * v * v) * w**-2.5)


def arccos(x):
    if not isinstance(x, Jet):
        return np.arccos(x)
    v = x.value
    w = 1 - v * v
    return _chain(x, np.arccos(v), -(w**-0.5), -v * w**-1.5, -(1 + 2 * v * v) * w**-2.5)


def arccosh(x):
    if not isinstance(x, Jet):
        return np.arccosh(x)
    v = x.value
    w = v * v - 1
    return _chain(x, np.arccosh(v), w**-0.5, -v * w**-1.5, (1 + 2 * v * v) * w**-2.5)


def arctan2(y, x):
    """Branch value from ``np.arctan2``; derivatives from the smooth local form."""
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return np.arctan2(y, x)
    yv, xv = value_of(y), value_of(x)
    if np.ndim(yv) or np.ndim(xv):
        raise ValueError("arctan2 on jets is scalar-only")
    if abs(xv) >= abs(yv):
        local = arctan(y / x)
    else:
        local = -arctan(x / y)
    return local + (float(np.arctan2(yv, xv)) - float(local.value))
