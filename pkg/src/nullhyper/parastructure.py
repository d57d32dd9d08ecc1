"""Almost paracomplex structures and the associated neutral metric."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import jets
from .fd import fd_field
from .manifold import Chart, MetricField, covariant_derivative_11, curvature, signature


@dataclass(frozen=True)
class ProductStructureField:
    """Mixed components P^i_j as a jet-aware matrix field."""

    chart: Chart
    func: Callable
    label: str = ""

    def at(self, x) -> np.ndarray:
        return np.asarray(jets.value_of(self.func(np.asarray(x, dtype=float))), dtype=float)

    def __call__(self, x):
        return self.func(x)

    def with_fd(self, scale: float = 1.0) -> "ProductStructureField":
        return ProductStructureField(self.chart, fd_field(self.func, scale), self.label + " [fd]")


@dataclass
class CheckReport:
    """Residuals keyed by name; passes iff every residual is within its tolerance."""

    residuals: dict[str, float]
    tolerances: dict[str, float]
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)

    def failures(self) -> list[str]:
        return [k for k in self.residuals if self.residuals[k] > self.tolerances[k]]


def paracomplex_residuals(p: ProductStructureField, g: MetricField, x) -> dict[str, float]:
    x = np.asarray(x, dtype=float)
    pm = p.at(x)
    gm = g.at(x)
    n = pm.shape[0]
    eig = np.sort(np.linalg.eigvals(pm).real)
    half = n // 2
    target = np.array([-1.0] * half + [1.0] * (n - half))
    return {
        "square": float(np.max(np.abs(pm @ pm - np.eye(n)))),
        "isometry": float(np.max(np.abs(pm.T @ gm @ pm - gm))),
        "parallel": float(np.max(np.abs(covariant_derivative_11(g, p.func, x)))),
        "trace": float(abs(np.trace(pm))),
        "multiplicity": float(np.max(np.abs(eig - target))),
    }


def verify_paracomplex(
    p: ProductStructureField, g: MetricField, samples: Sequence, tol: float = 1e-8
) -> CheckReport:
    worst: dict[str, float] = {}
    for x in samples:
        for k, v in paracomplex_residuals(p, g, x).items():
            worst[k] = max(worst.get(k, 0.0), v)
    return CheckReport(worst, {k: tol for k in worst})


@dataclass(frozen=True)
class NeutralMetric:
    base: MetricField
    p: ProductStructureField
    metric: MetricField


def neutral_metric(
    g: MetricField, p: ProductStructureField, samples: Sequence | None = None
) -> NeutralMetric:
    """g₋ = g(P·,·), i.e. (g₋)_ij = g_ik P^k_j; signature (2,2) is enforced."""

    def func(x):
        return g.func(x) @ p.func(x)

    m = MetricField(g.chart, func, None, f"neutral({g.label})")
    pts = [g.chart.center()] if samples is None else samples
    for x in pts:
        gm = g.at(x) @ p.at(x)
        if np.max(np.abs(gm - gm.T)) > 1e-10:
            raise ValueError("g(P.,.) is not symmetric; P is not an isometric involution")
        sig = signature(gm)
        if sig != (2, 2):
            raise ValueError(f"neutral metric has signature {sig}, expected (2, 2)")
    return NeutralMetric(g, p, m)


def neutral_residuals(nm: NeutralMetric, x) -> dict[str, float]:
    plus = curvature(nm.base, x)
    minus = curvature(nm.metric, x)
    return {
        "scalar": abs(minus.scalar),
        "weyl": float(np.max(np.abs(minus.weyl))),
        "christoffel": float(np.max(np.abs(minus.christoffel - plus.christoffel))),
        "ricci": float(np.max(np.abs(minus.ricci - plus.ricci))),
        "signature": 0.0 if minus.signature == (2, 2) else 1.0,
    }


DEFAULT_NEUTRAL_TOLS = {
    "scalar": 1e-6,
    "weyl": 1e-6,
    "christoffel": 1e-8,
    "ricci": 1e-6,
    "signature": 0.0,
}


def verify_neutral_properties(
    nm: NeutralMetric, samples: Sequence, tols: dict | None = None
) -> CheckReport:
    tols = dict(DEFAULT_NEUTRAL_TOLS, **(tols or {}))
    worst: dict[str, float] = {}
    for x in samples:
        for k, v in neutral_residuals(nm, x).items():
            worst[k] = max(worst.get(k, 0.0), v)
    return CheckReport(worst, tols)
