"""Chart-local pseudo-Riemannian curvature.

Conventions: ``R(u, v)w = ∇_u ∇_v w - ∇_v ∇_u w - ∇_[u,v] w``, stored as
``R^a_{bcd}`` with ``R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a``; covariant
``R_{abcd} = g_{ae} R^e_{bcd}``; ``Ric_{bd} = R^a_{bad}``.  Round spheres come
out with positive scalar curvature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets
from .fd import fd_field
from .jets import Jet

DEGENERACY_TOL = 1e-10


class DegenerateMetricError(ValueError):
    pass


@dataclass(frozen=True)
class Chart:
    dim: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    label: str = ""

    def contains(self, x, margin: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x - margin > self.lower) and np.all(x + margin < self.upper))

    def center(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))


@dataclass(frozen=True)
class MetricField:
    """A metric given by a jet-aware evaluator on a chart.

    ``func`` maps a coordinate vector (floats or a jet) to the symmetric
    component matrix.  Derived metrics that cannot be written as a plain
    function of the coordinates (induced metrics need one derivative order
    more from their immersion) supply ``jet_fn(x, order)`` instead.
    """

    chart: Chart
    func: Callable | None = None
    jet_fn: Callable | None = None
    label: str = ""

    def at(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.func is not None:
            g = np.asarray(self.func(x), dtype=float)
        else:
            g = self.jet_fn(x, 0).value
        return 0.5 * (g + g.T)

    def jet(self, x, order: int = 2) -> Jet:
        x = np.asarray(x, dtype=float)
        if self.jet_fn is not None:
            g = self.jet_fn(x, order)
        else:
            lifted = jets.lift(x, order)
            g = self.func(lifted)
            if not isinstance(g, Jet):
                g = jets.constant_like(g, lifted)
        return 0.5 * (g + g.T)

    def with_fd(self, scale: float = 1.0) -> "MetricField":
        """Same metric, derivatives taken by finite differences."""
        if self.func is None:
            raise ValueError("fd mode needs a plain evaluator")
        return MetricField(self.chart, fd_field(self.func, scale), None, self.label + " [fd]")


@dataclass
class GeometryReport:
    point: np.ndarray
    metric: np.ndarray
    christoffel: np.ndarray  # [k, i, j] = Γ^k_ij
    riemann_up: np.ndarray  # [a, b, c, d] = R^a_bcd
    riemann: np.ndarray  # [a, b, c, d] = R_abcd
    ricci: np.ndarray
    scalar: float
    weyl: np.ndarray | None
    signature: tuple[int, int]  # (negative, positive)
    extras: dict = field(default_factory=dict)


def signature(g: np.ndarray, allow_degenerate: bool = False) -> tuple[int, int]:
    w = np.linalg.eigvalsh(0.5 * (g + g.T))
    if np.any(np.abs(w) <= DEGENERACY_TOL) and not allow_degenerate:
        raise DegenerateMetricError(f"degenerate metric, eigenvalues {w}")
    return int(np.sum(w < -DEGENERACY_TOL)), int(np.sum(w > DEGENERACY_TOL))


def christoffel_jet(gj: Jet) -> Jet:
    """Γ^k_ij as a jet one order below the metric jet.

    The first derivatives of the metric are themselves turned into jets, so
    the same code that produces Γ also produces ∂Γ.
    """
    if gj.order < 1:
        raise ValueError("christoffel needs at least a first-order metric jet")
    dim = gj.shape[-1]
    dg = jets.stack([gj.d(k) for k in range(dim)])  # [k, i, j] = ∂_k g_ij
    g = gj.truncate(gj.order - 1)
    a = dg.transpose((2, 0, 1))  # [l, i, j] = ∂_i g_jl
    b = dg.transpose((2, 1, 0))  # [l, i, j] = ∂_j g_il
    low = 0.5 * (a + b - dg)
    ginv = jets.inv(g)
    return (ginv @ low.reshape(dim, dim * dim)).reshape(dim, dim, dim)


def christoffel(g: MetricField, x) -> np.ndarray:
    gj = g.jet(x, 1)
    if abs(np.linalg.det(gj.value)) <= DEGENERACY_TOL:
        raise DegenerateMetricError("singular metric")
    return christoffel_jet(gj).value


def weyl_tensor(riem: np.ndarray, ric: np.ndarray, scalar: float, g: np.ndarray) -> np.ndarray:
    n = g.shape[0]
    kn_ric = (
        np.einsum("ac,bd->abcd", ric, g)
        - np.einsum("ad,bc->abcd", ric, g)
        + np.einsum("bd,ac->abcd", ric, g)
        - np.einsum("bc,ad->abcd", ric, g)
    )
    kn_gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    return riem - kn_ric / (n - 2) + scalar * kn_gg / ((n - 1) * (n - 2))


def curvature_from_jet(gj: Jet, point=None, allow_degenerate: bool = False) -> GeometryReport:
    g = gj.value
    sig = signature(g, allow_degenerate)
    gam_jet = christoffel_jet(gj.truncate(2))
    gam = gam_jet.value
    dgam = gam_jet.derivs[0]  # [m, k, i, j] = ∂_m Γ^k_ij
    r_up = (
        np.einsum("cadb->abcd", dgam)
        - np.einsum("dacb->abcd", dgam)
        + np.einsum("ace,edb->abcd", gam, gam)
        - np.einsum("ade,ecb->abcd", gam, gam)
    )
    r_low = np.einsum("ae,ebcd->abcd", g, r_up)
    ric = np.einsum("abad->bd", r_up)
    ric = 0.5 * (ric + ric.T)
    ginv = np.linalg.inv(g)
    scalar = float(np.einsum("bd,bd->", ginv, ric))
    weyl = weyl_tensor(r_low, ric, scalar, g) if g.shape[0] == 4 else None
    return GeometryReport(
        point=None if point is None else np.asarray(point, dtype=float),
        metric=g,
        christoffel=gam,
        riemann_up=r_up,
        riemann=r_low,
        ricci=ric,
        scalar=scalar,
        weyl=weyl,
        signature=sig,
    )


def curvature(g: MetricField, x, allow_degenerate: bool = False) -> GeometryReport:
    return curvature_from_jet(g.jet(x, 2), x, allow_degenerate)


@dataclass(frozen=True)
class EinsteinResult:
    einstein: bool
    rbar: float
    max_residual: float
    scalar_spread: float


def is_einstein(g: MetricField, samples: Sequence, tol: float = 1e-6) -> EinsteinResult:
    samples = [np.asarray(s, dtype=float) for s in samples]
    if len(samples) < 8:
        raise ValueError("is_einstein needs at least 8 sample points")
    worst, scalars = 0.0, []
    for x in samples:
        rep = curvature(g, x)
        n = rep.metric.shape[0]
        worst = max(worst, float(np.max(np.abs(rep.ricci - rep.scalar / n * rep.metric))))
        scalars.append(rep.scalar)
    spread = float(np.max(scalars) - np.min(scalars))
    ok = worst <= tol and spread <= tol
    return EinsteinResult(ok, float(np.mean(scalars)), worst, spread)


def covariant_derivative_11(g: MetricField, t: Callable, x) -> np.ndarray:
    """(∇_k T)^i_j for a jet-aware (1,1)-tensor field ``t``; indexed [k, i, j]."""
    x = np.asarray(x, dtype=float)
    tj = t(jets.lift(x, 1))
    if not isinstance(tj, Jet):
        tj = jets.constant_like(tj, jets.lift(x, 1))
    tv = tj.value
    dt = tj.derivs[0]  # [k, i, j]
    gam = christoffel(g, x)  # [i, k, l]
    return dt + np.einsum("ikl,lj->kij", gam, tv) - np.einsum("lkj,il->kij", gam, tv)
