"""Concrete Einstein 4-manifolds with a parallel isometric paracomplex structure.

* ``S²×S²`` and ``H²×H²`` with product charts and ``P(u, v) = (u, -v)``;
* flat ``R²×R²`` (the totally geodesic witness geometry);
* the space of oriented geodesics of the round 3-sphere, realised as the
  doubly constrained quadric of unit decomposable bivectors in ``Λ²R⁴`` with
  the restricted Hodge star as ``P``.  Charts are tangent coordinates at a
  base bivector followed by a Newton retraction onto the quadric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from . import jets
from .linalg import orthonormal_complement
from .manifold import Chart, MetricField
from .parastructure import ProductStructureField

TWO_PI = 2 * np.pi
# ψ never enters the product metrics, so the chart box is wide in ψ
PSI_RANGE = (-4 * np.pi, 4 * np.pi)

# measured Einstein scalar of the geodesic space of S³ under the bivector
# metric; frozen as a regression value (equals that of S²(1/√2) × S²(1/√2))
GEODESIC_SPACE_RBAR = 8.0


@dataclass
class ModelSpace:
    metric: MetricField
    pstruct: ProductStructureField
    rbar: float
    label: str
    sample_lower: tuple[float, ...]
    sample_upper: tuple[float, ...]
    pluecker: "PlueckerChart | None" = None
    extras: dict = field(default_factory=dict)

    @property
    def chart(self) -> Chart:
        return self.metric.chart

    def grid(self, counts) -> list[np.ndarray]:
        axes = [
            np.linspace(lo, hi, int(c))
            for lo, hi, c in zip(self.sample_lower, self.sample_upper, counts)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return [np.array(p) for p in zip(*(m.ravel() for m in mesh))]

    def with_fd(self, scale: float = 1.0) -> "ModelSpace":
        return ModelSpace(
            self.metric.with_fd(scale),
            self.pstruct.with_fd(scale),
            self.rbar,
            self.label,
            self.sample_lower,
            self.sample_upper,
            self.pluecker,
            dict(self.extras),
        )


def _diag(entries):
    n = len(entries)
    rows = [jets.stack([entries[i] if i == j else 0.0 for j in range(n)]) for i in range(n)]
    return jets.stack(rows)


PRODUCT_P = np.diag([1.0, 1.0, -1.0, -1.0])


def _product_p(chart):
    return ProductStructureField(chart, lambda x: PRODUCT_P, "P(u,v)=(u,-v)")


def build_s2xs2() -> ModelSpace:
    """Coordinates (φ₁, ψ₁, φ₂, ψ₂), colatitude/longitude on each factor."""
    chart = Chart(
        4, (0.0, PSI_RANGE[0], 0.0, PSI_RANGE[0]), (np.pi, PSI_RANGE[1], np.pi, PSI_RANGE[1]),
        "S2xS2",
    )

    def g(x):
        return _diag([1.0, jets.sin(x[0]) ** 2, 1.0, jets.sin(x[2]) ** 2])

    return ModelSpace(
        MetricField(chart, g, None, "S2xS2"), _product_p(chart), 4.0, "s2xs2",
        (0.4, -2.5, 0.4, -2.5), (2.7, 2.5, 2.7, 2.5),
    )


def build_h2xh2() -> ModelSpace:
    """Hyperboloid polar coordinates (r₁, ψ₁, r₂, ψ₂) on each factor."""
    chart = Chart(
        4, (0.0, PSI_RANGE[0], 0.0, PSI_RANGE[0]), (20.0, PSI_RANGE[1], 20.0, PSI_RANGE[1]),
        "H2xH2",
    )

    def g(x):
        return _diag([1.0, jets.sinh(x[0]) ** 2, 1.0, jets.sinh(x[2]) ** 2])

    return ModelSpace(
        MetricField(chart, g, None, "H2xH2"), _product_p(chart), -4.0, "h2xh2",
        (0.3, -2.5, 0.3, -2.5), (2.0, 2.5, 2.0, 2.5),
    )


def build_flat_product() -> ModelSpace:
    chart = Chart(4, (-50.0,) * 4, (50.0,) * 4, "R2xR2")
    eye = np.eye(4)
    return ModelSpace(
        MetricField(chart, lambda x: eye, None, "R2xR2"), _product_p(chart), 0.0, "flat",
        (-1.0,) * 4, (1.0,) * 4,
    )


def build_s2_x_r2() -> ModelSpace:
    """Non-Einstein control: round S² times a flat plane."""
    chart = Chart(4, (0.0, PSI_RANGE[0], -50.0, -50.0), (np.pi, PSI_RANGE[1], 50.0, 50.0),
                  "S2xR2")

    def g(x):
        return _diag([1.0, jets.sin(x[0]) ** 2, 1.0, 1.0])

    return ModelSpace(
        MetricField(chart, g, None, "S2xR2"), _product_p(chart), float("nan"), "s2xr2",
        (0.4, -2.5, -1.0, -1.0), (2.7, 2.5, 1.0, 1.0),
    )


def hyperboloid_point(r, psi):
    return jets.stack([jets.sinh(r) * jets.cos(psi), jets.sinh(r) * jets.sin(psi), jets.cosh(r)])


def sphere_point(phi, psi):
    return jets.stack([jets.sin(phi) * jets.cos(psi), jets.sin(phi) * jets.sin(psi), jets.cos(phi)])


# -- bivectors ----------------------------------------------------------------

PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def ambient_signs(p: int = 0) -> np.ndarray:
    return np.array([-1.0] * p + [1.0] * (4 - p))


def bivector_gram(p: int = 0) -> np.ndarray:
    """Gram matrix of ⟨⟨·,·⟩⟩_p on the basis e_i∧e_j (i<j)."""
    eta = ambient_signs(p)
    return np.diag([eta[i] * eta[j] for i, j in PAIRS])


def hodge_star_matrix(p: int = 0) -> np.ndarray:
    """Matrix of * on Λ²R⁴_p in the basis e_i∧e_j, fixed by α∧*β = ⟨⟨α,β⟩⟩ vol."""
    eta = ambient_signs(p)
    star = np.zeros((6, 6))
    for col, (i, j) in enumerate(PAIRS):
        k, l = sorted(set(range(4)) - {i, j})
        row = PAIRS.index((k, l))
        star[row, col] = eta[i] * eta[j] * _perm_sign((i, j, k, l))
    return star


# ξ∧ξ = ξᵀ W ξ · e₁₂₃₄ (decomposability quadric)
PLUECKER_FORM = np.zeros((6, 6))
for _a, _b, _s in ((0, 5, 1.0), (1, 4, -1.0), (2, 3, 1.0)):
    PLUECKER_FORM[_a, _b] = PLUECKER_FORM[_b, _a] = _s


def wedge(a, b):
    return jets.stack([a[i] * b[j] - a[j] * b[i] for i, j in PAIRS])


class RetractionError(RuntimeError):
    pass


class PlueckerChart:
    """Tangent coordinates at a base bivector plus Newton retraction.

    ``ξ(z) = ξ₀ + F z + N w(z)`` where F spans the tangent space of the
    quadric at ξ₀, N the two constraint gradients, and w solves the
    constraints.  The inverse chart is the projection ``z = Fᵀ(ξ - ξ₀)``.
    """

    def __init__(self, base, p: int = 0, radius: float = 0.5):
        self.p = p
        self.gram = bivector_gram(p)
        self.star = hodge_star_matrix(p)
        xi0 = np.asarray(base, dtype=float)
        if abs(xi0 @ self.gram @ xi0 - 1) > 1e-12 or abs(xi0 @ PLUECKER_FORM @ xi0) > 1e-12:
            raise ValueError("base bivector is not a unit decomposable bivector")
        self.base = xi0
        self.normals = np.stack([self.gram @ xi0, PLUECKER_FORM @ xi0], axis=1)
        self.frame = orthonormal_complement(self.normals)
        self.radius = radius
        self.last_history: list[float] = []

    def constraints(self, xi):
        return jets.stack([
            jets.einsum("i,i->", xi, jets.einsum("ij,j->i", self.gram, xi)) - 1.0,
            jets.einsum("i,i->", xi, jets.einsum("ij,j->i", PLUECKER_FORM, xi)),
        ])

    def _constraint_jacobian(self, xi):
        return 2.0 * jets.stack([
            jets.einsum("ij,j->i", self.gram, xi),
            jets.einsum("ij,j->i", PLUECKER_FORM, xi),
        ])

    def retract(self, eta, tol: float = 1e-15, max_iter: int = 50):
        """Newton projection of ``eta`` (floats) onto the quadric along N."""
        eta = np.asarray(eta, dtype=float)
        w = np.zeros(2)
        history = []
        for _ in range(max_iter):
            xi = eta + self.normals @ w
            c = self.constraints(xi)
            history.append(float(np.max(np.abs(c))))
            if history[-1] <= tol:
                break
            k = self._constraint_jacobian(xi) @ self.normals
            try:
                w = w - np.linalg.solve(k, c)
            except np.linalg.LinAlgError:
                raise RetractionError("singular constraint Jacobian during retraction") from None
        else:
            if history[-1] > 1e-12:
                raise RetractionError(f"Newton retraction stalled, residuals {history[-5:]}")
        self.last_history = history
        return w

    def to_bivector(self, z):
        eta = self.base + jets.einsum("ij,j->i", self.frame, z)
        w = self.retract(jets.value_of(eta))
        if not isinstance(z, jets.Jet):
            return eta + self.normals @ w
        wj = jets.constant_like(w, z)
        # value is converged; each jet Newton step doubles the exact Taylor order
        for _ in range(3):
            xi = eta + jets.einsum("ij,j->i", self.normals, wj)
            k = self._constraint_jacobian(xi) @ self.normals
            wj = wj - jets.einsum("ij,j->i", jets.inv(k), self.constraints(xi))
        return eta + jets.einsum("ij,j->i", self.normals, wj)

    def from_bivector(self, xi):
        return jets.einsum("ji,j->i", self.frame, xi - self.base)

    def tangent_map(self, xi):
        """∂ξ/∂z as a function of the point ξ (implicit function theorem)."""
        dc = self._constraint_jacobian(xi)
        k = dc @ self.normals
        return self.frame - self.normals @ (jets.inv(k) @ (dc @ self.frame))

    def metric(self, z):
        t = self.tangent_map(self.to_bivector(z))
        return t.T @ (self.gram @ t)

    def pstruct(self, z):
        t = self.tangent_map(self.to_bivector(z))
        g = t.T @ (self.gram @ t)
        return jets.inv(g) @ (t.T @ (self.gram @ (self.star @ t)))

    def chart(self) -> Chart:
        r = self.radius
        return Chart(4, (-r,) * 4, (r,) * 4, "L+(S3)")


E12 = np.array([1.0, 0, 0, 0, 0, 0])


def build_geodesic_space(base=None, p: int = 0) -> ModelSpace:
    if p != 0:
        raise NotImplementedError("only the round 3-sphere (p = 0) is instantiated")
    pc = PlueckerChart(E12 if base is None else base, p)
    chart = pc.chart()
    return ModelSpace(
        MetricField(chart, pc.metric, None, "G0"),
        ProductStructureField(chart, pc.pstruct, "restricted Hodge star"),
        GEODESIC_SPACE_RBAR,
        "geodesic-space",
        (-0.3,) * 4,
        (0.3,) * 4,
        pluecker=pc,
    )


BUILDERS = {
    "s2xs2": build_s2xs2,
    "h2xh2": build_h2xh2,
    "flat": build_flat_product,
    "geodesic-space": build_geodesic_space,
}
