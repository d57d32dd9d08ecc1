"""Hypersurface families in the model spaces, with closed-form predictions.

A :class:`Family` bundles a parameter box with ``local(u) -> (model, immersion)``.
Product-space families use one global chart, so ``local`` ignores ``u``.
Tangential congruences live in the geodesic space, whose charts only cover a
neighbourhood of their base bivector; there ``local`` builds a chart centred
on the image point of ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .fd import fd_derivative
from .hypersurface import Immersion
from .linalg import eig_sym, orthonormal_complement
from .manifold import Chart
from .models import (
    PRODUCT_P,
    build_flat_product,
    build_geodesic_space,
    build_h2xh2,
    build_s2xs2,
    hyperboloid_point,
    sphere_point,
    wedge,
)

SQRT_HALF = np.sqrt(0.5)


@dataclass
class Family:
    label: str
    kind: str
    params: dict
    sample_lower: tuple[float, ...]
    sample_upper: tuple[float, ...]
    local: Callable
    predict: Callable
    expect_null: bool
    rbar: float
    fd_mode: bool = False
    fd_scale: float = 1.0
    extras: dict = field(default_factory=dict)

    @property
    def source(self) -> Chart:
        return Chart(3, tuple(self.sample_lower), tuple(self.sample_upper), self.label)

    def grid(self, counts) -> list[np.ndarray]:
        axes = [np.linspace(lo, hi, int(c))
                for lo, hi, c in zip(self.sample_lower, self.sample_upper, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return [np.array(p) for p in zip(*(m.ravel() for m in mesh))]

    def at(self, u):
        """(model, immersion) for evaluating at parameter point ``u``."""
        model, imm = self.local(np.asarray(u, dtype=float))
        if self.fd_mode:
            return model.with_fd(self.fd_scale), imm.with_fd(self.fd_scale)
        return model, imm

    def with_fd(self, scale: float = 1.0) -> "Family":
        out = Family(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        out.fd_mode, out.fd_scale = True, scale
        return out


def _const_local(model, imm):
    return lambda u: (model, imm)


def _coords(v):
    return [v[i] for i in range(3)]


# -- tubes Σ_t -----------------------------------------------------------------


def sigma_t_predictions(space: str, t: float) -> dict:
    a = np.sqrt((1 + t) / (1 - t))
    if space == "s2xs2":
        l1, l2 = SQRT_HALF * a, -SQRT_HALF / a
        r = 1.0
    else:
        l1, l2 = SQRT_HALF * a, SQRT_HALF / a
        r = -1.0
    return {
        "lambdas": sorted([l1, l2, 0.0]),
        "nontrivial": (l1, l2),
        "H": (l1 + l2) / 3.0,
        "R": r,
        "cos_theta": 0.0,
    }


def _sigma_t_s2(t):
    s = np.sqrt(1 - t * t)

    def f(u):
        phi, psi, alpha = _coords(u)
        x = sphere_point(phi, psi)
        e_phi = jets.stack([jets.cos(phi) * jets.cos(psi), jets.cos(phi) * jets.sin(psi),
                            -jets.sin(phi)])
        e_psi = jets.stack([-jets.sin(psi), jets.cos(psi), 0.0 * psi])
        y = t * x + s * (jets.cos(alpha) * e_phi + jets.sin(alpha) * e_psi)
        return jets.stack([phi, psi, jets.arccos(y[2]), jets.arctan2(y[1], y[0])])

    # α near π/2 keeps y off the poles of the second factor
    box = ((1.0, -1.0, np.pi / 2 - 0.8), (2.1, 1.0, np.pi / 2 + 0.8))
    return f, box


def _sigma_t_h2(t):
    if t != 0:
        # the Lorentz product of two hyperboloid points is ≤ -1; the tube at
        # parameter t is taken to be {⟨x, y⟩_L = -1/|t|}
        tau = 1.0 / abs(t)
        s = np.sqrt(tau * tau - 1)

        def f(u):
            r, psi, alpha = _coords(u)
            x = hyperboloid_point(r, psi)
            e_r = jets.stack([jets.cosh(r) * jets.cos(psi), jets.cosh(r) * jets.sin(psi),
                              jets.sinh(r)])
            e_psi = jets.stack([-jets.sin(psi), jets.cos(psi), 0.0 * psi])
            y = tau * x + s * (jets.cos(alpha) * e_r + jets.sin(alpha) * e_psi)
            return jets.stack([r, psi, jets.arccosh(y[2]), jets.arctan2(y[1], y[0])])

        box = ((0.5, -1.0, -0.8), (1.2, 1.0, 0.8))
        return f, box

    # t = 0: the limiting horosphere pairing log(x₃ - x₁) + log(y₃ - y₁) = 0
    def f0(u):
        r, psi, sv = _coords(u)
        x = hyperboloid_point(r, psi)
        c = 1.0 / (x[2] - x[0])
        q = (1.0 + sv * sv) / c
        y = jets.stack([0.5 * (q - c), sv, 0.5 * (q + c)])
        return jets.stack([r, psi, jets.arccosh(y[2]), jets.arctan2(y[1], y[0])])

    box = ((0.5, np.pi - 0.8, -0.8), (1.2, np.pi + 0.8, 0.8))
    return f0, box


def immersion_sigma_t(space: str, t: float) -> Family:
    if not abs(t) < 1:
        raise ValueError(f"Σ_t needs |t| < 1, got {t}")
    if space == "s2xs2":
        model = build_s2xs2()
        f, box = _sigma_t_s2(t)
    elif space == "h2xh2":
        model = build_h2xh2()
        f, box = _sigma_t_h2(t)
    else:
        raise ValueError(f"Σ_t lives in s2xs2 or h2xh2, not {space!r}")
    imm = Immersion(Chart(3, *box), model.chart, f, f"sigma-t({space}, t={t:g})")
    pred = sigma_t_predictions(space, t)
    return Family(imm.label, "sigma-t", {"space": space, "t": t}, box[0], box[1],
                  _const_local(model, imm), lambda u: pred, True, model.rbar)


# -- M_{a,b} -------------------------------------------------------------------


def mab_lambda(c: float) -> float:
    return c / np.sqrt(2 * (1 - c * c))


def immersion_mab(a=(1.0, 0.0, 0.0), b=(0.0, 0.0, 1.0)) -> Family:
    """{⟨x,a⟩ + ⟨y,b⟩ = 0} ⊂ S²×S², parametrized by x and a circle angle for y."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if abs(np.linalg.norm(a) - 1) > 1e-12 or abs(np.linalg.norm(b) - 1) > 1e-12:
        raise ValueError("a and b must be unit vectors")
    v1, v2 = orthonormal_complement(b[:, None]).T
    if np.linalg.det(np.stack([v1, v2, b])) < 0:
        v2 = -v2
    model = build_s2xs2()

    def f(u):
        phi, psi, alpha = _coords(u)
        x = sphere_point(phi, psi)
        c = x[0] * a[0] + x[1] * a[1] + x[2] * a[2]
        r = jets.sqrt(1.0 - c * c)
        ca, sa = jets.cos(alpha), jets.sin(alpha)
        y = jets.stack([-c * b[i] + r * (ca * v1[i] + sa * v2[i]) for i in range(3)])
        return jets.stack([phi, psi, jets.arccos(y[2]), jets.arctan2(y[1], y[0])])

    box = ((1.2, 0.5, -1.0), (1.95, 1.9, 1.0))
    imm = Immersion(Chart(3, *box), model.chart, f, "M_ab")

    def predict(u):
        x = np.asarray(sphere_point(u[0], u[1]))
        c = float(x @ a)
        lam = mab_lambda(c)
        return {"lambdas": sorted([lam, -lam, 0.0]), "nontrivial": (lam, -lam), "H": 0.0,
                "x_dot_a": c, "minus_8_l1l2": 8 * lam * lam}

    def point_with(c):
        """A parameter point with ⟨x, a⟩ = c (α = 0)."""
        w = orthonormal_complement(a[:, None])[:, 0]
        x = c * a + np.sqrt(1 - c * c) * w
        return np.array([np.arccos(x[2]), np.arctan2(x[1], x[0]), 0.0])

    fam = Family(imm.label, "mab", {"a": a.tolist(), "b": b.tolist()}, box[0], box[1],
                 _const_local(model, imm), predict, True, model.rbar)
    fam.extras["point_with"] = point_with
    return fam


# -- flat witnesses ------------------------------------------------------------


def null_hyperplane_flat(normal=(SQRT_HALF, 0.0, SQRT_HALF, 0.0)) -> Family:
    n = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(n) - 1) > 1e-12:
        raise ValueError("normal must be a unit vector")
    if abs(n @ PRODUCT_P @ n) > 1e-12:
        raise ValueError(f"normal is not null: ⟨Pn, n⟩ = {n @ PRODUCT_P @ n:g}")
    model = build_flat_product()
    basis = orthonormal_complement(n[:, None])
    if np.linalg.det(np.column_stack([basis, n])) < 0:
        basis[:, 0] = -basis[:, 0]

    def f(u):
        return jets.einsum("ij,j->i", basis, u)

    box = ((-0.5,) * 3, (0.5,) * 3)
    imm = Immersion(Chart(3, *box), model.chart, f, "null-plane")
    pred = {"lambdas": [0.0, 0.0, 0.0], "nontrivial": (0.0, 0.0), "H": 0.0, "R": 0.0}
    return Family(imm.label, "null-plane", {"normal": n.tolist()}, box[0], box[1],
                  _const_local(model, imm), lambda u: pred, True, 0.0)


def graph_flat() -> Family:
    """Non-null witness {x⁴ = (x¹)²/4} in flat ℝ²×ℝ²."""
    model = build_flat_product()

    def f(u):
        return jets.stack([u[0], u[1], u[2], 0.25 * u[0] * u[0]])

    box = ((-0.5,) * 3, (0.5,) * 3)
    imm = Immersion(Chart(3, *box), model.chart, f, "graph")
    return Family(imm.label, "graph", {}, box[0], box[1], _const_local(model, imm),
                  lambda u: {}, False, 0.0)


# -- surfaces in S³ and their tangential congruences ---------------------------


@dataclass
class SurfaceInSpaceForm:
    """A surface in S³ ⊂ ℝ⁴ with an adapted frame (e₁, e₂, ν)."""

    label: str
    lower: tuple[float, float]
    upper: tuple[float, float]
    point: Callable
    e1: Callable
    e2: Callable
    normal: Callable
    kappa: tuple[float, float]

    @property
    def chart(self) -> Chart:
        return Chart(2, self.lower, self.upper, self.label)

    def shape_operator(self, v) -> np.ndarray:
        """σ(eᵢ, eⱼ) = ⟨∂_{eᵢ} eⱼ, ν⟩ from FD of the frame (S³ shape operator)."""
        v = np.asarray(v, dtype=float)
        jac = fd_derivative(lambda w: np.asarray(self.point(w)), v, 1).value  # [k, comp]
        es = [np.asarray(self.e1(v)), np.asarray(self.e2(v))]
        nu = np.asarray(self.normal(v))
        dnu = fd_derivative(lambda w: np.asarray(self.normal(w)), v, 1).value
        # coordinates of eᵢ on the parameter basis
        coef = [np.linalg.lstsq(jac.T, e, rcond=None)[0] for e in es]
        return np.array([[-(coef[i] @ dnu) @ es[j] for j in range(2)] for i in range(2)])

    def principal_curvatures(self, v) -> np.ndarray:
        a = self.shape_operator(v)
        return eig_sym(0.5 * (a + a.T)).eigenvalues[::-1]


def umbilic_sphere(radius: float = np.pi / 4) -> SurfaceInSpaceForm:
    """Geodesic sphere of radius r about E₄; κ₁ = κ₂ = cot r."""
    sr, cr = np.sin(radius), np.cos(radius)

    def point(v):
        s = sphere_point(v[0], v[1])
        return jets.stack([sr * s[0], sr * s[1], sr * s[2], cr + 0.0 * v[0]])

    def e1(v):
        a, b = v[0], v[1]
        return jets.stack([jets.cos(a) * jets.cos(b), jets.cos(a) * jets.sin(b), -jets.sin(a),
                           0.0 * a])

    def e2(v):
        b = v[1]
        return jets.stack([-jets.sin(b), jets.cos(b), 0.0 * b, 0.0 * b])

    def normal(v):
        s = sphere_point(v[0], v[1])
        return jets.stack([-cr * s[0], -cr * s[1], -cr * s[2], sr + 0.0 * v[0]])

    k = float(1.0 / np.tan(radius))
    return SurfaceInSpaceForm(f"umbilic-sphere(r={radius:g})", (0.8, -1.0), (2.3, 1.0),
                              point, e1, e2, normal, (k, k))


def clifford_torus() -> SurfaceInSpaceForm:
    """Minimal Clifford torus; with this normal κ₁ = 1 along e₁ and κ₂ = -1."""

    def point(v):
        a, b = v[0], v[1]
        return SQRT_HALF * jets.stack([jets.cos(a), jets.sin(a), jets.cos(b), jets.sin(b)])

    def e1(v):
        a = v[0]
        return jets.stack([-jets.sin(a), jets.cos(a), 0.0 * a, 0.0 * a])

    def e2(v):
        b = v[1]
        return jets.stack([0.0 * b, 0.0 * b, -jets.sin(b), jets.cos(b)])

    def normal(v):
        a, b = v[0], v[1]
        return SQRT_HALF * jets.stack([-jets.cos(a), -jets.sin(a), jets.cos(b), jets.sin(b)])

    return SurfaceInSpaceForm("clifford-torus", (0.2, 0.2), (1.4, 1.4), point, e1, e2,
                              normal, (1.0, -1.0))


SURFACES = {"umbilic-sphere": umbilic_sphere, "clifford-torus": clifford_torus}


def tangential_predictions(kappa, theta: float) -> dict:
    k1, k2 = kappa
    c2, s2 = np.cos(theta) ** 2, np.sin(theta) ** 2
    lp = k1 * c2 + k2 * s2
    lm = -k1 * s2 - k2 * c2
    return {"lambdas": sorted([lp, lm, 0.0]), "nontrivial": (lp, lm),
            "H": (k1 - k2) * np.cos(2 * theta) / 3.0}


def immersion_tangential(surface: SurfaceInSpaceForm, tol: float = 1e-8) -> Family:
    """Φ(x, θ) = φ(x) ∧ (cos θ e₁ + sin θ e₂) in the geodesic space of S³."""
    if max(abs(k) for k in surface.kappa) <= tol:
        raise ValueError("tangential congruence of a totally geodesic surface is not immersed")

    def phi(u):
        x = surface.point(u)
        e1, e2 = surface.e1(u), surface.e2(u)
        d = jets.cos(u[2]) * e1 + jets.sin(u[2]) * e2
        return wedge(x, d)

    def local(u):
        model = build_geodesic_space(base=np.asarray(phi(u), dtype=float))
        pc = model.pluecker

        def f(w):
            return pc.from_bivector(phi(w))

        lower = tuple(surface.lower) + (0.0,)
        upper = tuple(surface.upper) + (2 * np.pi,)
        return model, Immersion(Chart(3, lower, upper), model.chart, f,
                                f"tangential({surface.label})")

    # θ = π/8 + kπ/4 stays clear of asymptotic directions of saddle-type
    # surfaces, where Φ loses rank
    box = (tuple(surface.lower) + (np.pi / 8,), tuple(surface.upper) + (np.pi / 8 + 1.75 * np.pi,))
    model0 = build_geodesic_space()
    fam = Family(f"tangential({surface.label})", "tangential",
                 {"surface": surface.label, "kappa": list(surface.kappa)}, box[0], box[1],
                 local, lambda u: tangential_predictions(surface.kappa, u[2]), True,
                 model0.rbar)
    fam.extras["surface"] = surface
    fam.extras["bivector"] = phi
    return fam
