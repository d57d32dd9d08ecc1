"""Finite-difference oracle with Richardson extrapolation.

Used two ways: as an independent check on the jet pipeline, and as the
derivative engine of the ``fd`` derivative mode (see :func:`fd_field`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .jets import Jet

# step sizes per derivative order; tuned for O(1) chart scales
DEFAULT_STEPS = {1: 1e-3, 2: 4e-3, 3: 2e-2}


@dataclass(frozen=True)
class FDResult:
    value: np.ndarray
    error: np.ndarray


def _check_stencil(x, h, domain):
    if domain is None:
        return
    lo, hi = domain
    if np.any(x - h <= np.asarray(lo)) or np.any(x + h >= np.asarray(hi)):
        raise ValueError("finite-difference stencil leaves chart domain")


def _grad_raw(f, x, h):
    n = x.shape[0]
    out = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        out.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.stack(out)


def _hess_raw(f, x, h):
    n = x.shape[0]
    f0 = np.asarray(f(x), dtype=float)
    rows = [[None] * n for _ in range(n)]
    for i in range(n):
        ei = np.zeros(n)
        ei[i] = h
        rows[i][i] = (np.asarray(f(x + ei)) - 2 * f0 + np.asarray(f(x - ei))) / h**2
        for j in range(i + 1, n):
            ej = np.zeros(n)
            ej[j] = h
            v = (
                np.asarray(f(x + ei + ej))
                - np.asarray(f(x + ei - ej))
                - np.asarray(f(x - ei + ej))
                + np.asarray(f(x - ei - ej))
            ) / (4 * h * h)
            rows[i][j] = rows[j][i] = v
    return np.stack([np.stack(r) for r in rows])


def fd_derivative(
    f: Callable, x, order: int = 1, h: float | None = None, domain=None
) -> FDResult:
    """Central differences at steps h and h/2, Richardson-extrapolated.

    Returns derivative tensors with the derivative axes leading, i.e. shape
    ``(n,) + S`` for order 1 and ``(n, n) + S`` for order 2, where ``S`` is
    the shape of ``f(x)``.  ``error`` is an elementwise estimate: the gap
    between the extrapolated and the finer raw estimate plus a round-off term.
    """
    if order not in (1, 2):
        raise ValueError("fd_derivative supports order 1 or 2")
    x = np.asarray(x, dtype=float)
    if h is None:
        h = DEFAULT_STEPS[order]
    _check_stencil(x, h, domain)
    raw = _grad_raw if order == 1 else _hess_raw
    coarse = raw(f, x, h)
    fine = raw(f, x, h / 2)
    best = (4 * fine - coarse) / 3
    scale = np.max(np.abs(np.asarray(f(x), dtype=float)), initial=1.0)
    roundoff = 1e-15 * scale / (h / 2) ** order
    return FDResult(best, np.abs(best - fine) + roundoff)


def fd_third(f: Callable, x, h: float | None = None, hh: float | None = None) -> np.ndarray:
    """Third derivative tensor by Richardson central differences of the Hessian."""
    x = np.asarray(x, dtype=float)
    h = DEFAULT_STEPS[3] if h is None else h
    hh = DEFAULT_STEPS[2] / 2 if hh is None else hh
    n = x.shape[0]

    def hess(p):
        return fd_derivative(f, p, 2, h=hh).value

    out = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0

        def dk(step):
            return (hess(x + step * e) - hess(x - step * e)) / (2 * step)

        coarse, fine = dk(h), dk(h / 2)
        out.append((4 * fine - coarse) / 3)
    t = np.stack(out)  # (k, i, j, ...)
    # symmetrize over the three derivative axes
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    rest = tuple(range(3, t.ndim))
    return sum(t.transpose(p + rest) for p in perms) / 6.0


def fd_taylor(f: Callable, x, order: int, scale: float = 1.0) -> list[np.ndarray]:
    """Taylor tensors ``[f, D1, D2, D3][:order+1]`` of a float-valued map.

    ``scale`` multiplies every default step (used to estimate the FD error
    of a whole pipeline by rerunning it at doubled steps).
    """
    x = np.asarray(x, dtype=float)
    out = [np.asarray(f(x), dtype=float)]
    if order >= 1:
        out.append(fd_derivative(f, x, 1, h=scale * DEFAULT_STEPS[1]).value)
    if order >= 2:
        out.append(fd_derivative(f, x, 2, h=scale * DEFAULT_STEPS[2]).value)
    if order >= 3:
        out.append(fd_third(f, x, scale * DEFAULT_STEPS[3], scale * DEFAULT_STEPS[2] / 2))
    return out


def fd_field(func: Callable, scale: float = 1.0) -> Callable:
    """Wrap a jet-aware map so that jet inputs are differentiated by FD.

    Float inputs are passed straight through; for a jet input the map is
    evaluated on floats around ``x.value`` and the resulting Taylor tensors
    are chained with the input jet.
    """

    def wrapped(x):
        if not isinstance(x, Jet):
            return func(x)
        taylor = fd_taylor(func, x.value, x.order, scale)
        return jets.compose(taylor, x)

    wrapped.__wrapped__ = func
    return wrapped
