"""Extrinsic and intrinsic geometry of hypersurfaces Σ³ ⊂ M⁴.

Everything is computed at a parameter point ``u`` of an :class:`Immersion`
from one third-order jet of the immersion map.  That single jet yields

* the tangent frame and induced metric ``h`` with exact second derivatives
  (so the intrinsic scalar curvature goes through the ordinary curvature
  pipeline),
* the unit normal ``N₊`` and ``C₊ = g(PN₊, N₊)`` with exact Hessians,
* the second fundamental form ``σ`` with exact first derivatives.

Orientation: ``N₊`` makes ``(∂_u1 f, ∂_u2 f, ∂_u3 f, N₊)`` positively oriented
in the target chart; ``orientation=-1`` flips it.  Shape operator sign:
``σ(X, Y) = g(∇̄_X Y, N₊) = g(A X, Y)`` with ``A = -(∇̄N₊)ᵀ``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets
from .fd import fd_derivative, fd_field
from .jets import Jet
from .linalg import eig_sym
from .manifold import Chart, MetricField, christoffel_jet, curvature, curvature_from_jet

NULL_TOL = 1e-7
GAUGE_TOL = 1e-9
RANK_TOL = 1e-8


@dataclass(frozen=True)
class Immersion:
    source: Chart
    target: Chart
    map: Callable
    label: str = ""

    def __call__(self, u):
        return self.map(u)

    def with_fd(self, scale: float = 1.0) -> "Immersion":
        return Immersion(self.source, self.target, fd_field(self.map, scale),
                         self.label + " [fd]")


@dataclass
class ShapeData:
    point: np.ndarray
    tangent_basis: np.ndarray  # orthonormal frame, columns in target chart
    n_plus: np.ndarray
    n_minus: np.ndarray | None
    eps_minus: int
    c_plus: float
    c_minus: float | None
    x_plus: np.ndarray
    a_plus: np.ndarray  # shape operator in the orthonormal frame
    sigma_norm2: float
    mean_h: float
    lambdas: np.ndarray
    principal_dirs: np.ndarray
    theta: float | None = None
    extras: dict = field(default_factory=dict)


@dataclass
class NullFrameData:
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    omega: np.ndarray  # [i, j, k] = ω_ij^k
    k_coef: float
    mu_coef: float
    nu_coef: float
    theta: float


def _mv(a, v):
    return jets.einsum("ij,j->i", a, v)


def _dot(a, b):
    return jets.einsum("i,i->", a, b)


def _as_jet(x, ref: Jet) -> Jet:
    return x if isinstance(x, Jet) else jets.constant_like(x, ref)


class LocalGeometry:
    """All jets and derived floats of a hypersurface at one parameter point."""

    def __init__(self, imm: Immersion, model, u, orientation: int = 1, frame_rotation=None):
        self.imm, self.model = imm, model
        self.u = np.asarray(u, dtype=float)
        uj = jets.lift(self.u, 3)
        f = imm.map(uj)
        self.x = f.value
        t = jets.stack([f.d(i) for i in range(3)], axis=1)  # (4, 3), order 2
        x2 = f.truncate(2)
        g = _as_jet(model.metric.func(x2), x2)
        g = 0.5 * (g + g.T)
        p = _as_jet(model.pstruct.func(x2), x2)
        self.t, self.g, self.p = t, g, p

        tv = t.value
        if np.linalg.svd(tv, compute_uv=False)[-1] <= RANK_TOL:
            raise ValueError("immersion Jacobian is rank deficient")
        h = t.T @ (g @ t)
        h = 0.5 * (h + h.T)
        self.h = h
        hinv = jets.inv(h)
        self.hinv = hinv

        # unit normal at the base point, then continued as a jet by projection
        gv = g.value
        _, _, vt = np.linalg.svd(tv.T @ gv)
        n0 = vt[-1]
        n0 = n0 / np.sqrt(n0 @ gv @ n0)
        if np.linalg.det(np.column_stack([tv, n0])) < 0:
            n0 = -n0
        n0 = orientation * n0
        tgn = _mv(t.T, _mv(g, n0))
        nraw = n0 - _mv(t, _mv(hinv, tgn))
        n = nraw / jets.sqrt(_dot(nraw, _mv(g, nraw)))
        self.n = n
        pn = _mv(p, n)
        self.pn = pn
        self.c = _dot(pn, _mv(g, n))
        xamb = pn - self.c * n
        self.x_amb = xamb
        self.x_u = _mv(hinv, _mv(t.T, _mv(g, xamb)))

        # second fundamental form (first-order jet)
        # ambient Γ is a function of x; pull its first-order jet back along f
        gam_x = christoffel_jet(model.metric.jet(self.x, 2))
        gam = jets.compose([gam_x.value, gam_x.derivs[0]], f.truncate(1))
        t1 = t.truncate(1)
        hf = jets.stack(
            [jets.stack([f.d(i).d(j) for j in range(3)], axis=1) for i in range(3)], axis=1
        )  # [a, i, j]
        q = jets.einsum("abc,cj->abj", gam, t1)
        v = hf.truncate(1) + jets.einsum("abj,bi->aij", q, t1)
        w = _mv(g.truncate(1), n.truncate(1))
        sigma = jets.einsum("aij,a->ij", v, w)
        self.sigma = 0.5 * (sigma + sigma.T)
        self.a_u = hinv.truncate(1) @ self.sigma  # A^i_j in parameter coordinates
        self.mean_h = self.a_u.trace() * (1.0 / 3.0)
        self.gamma_ind = christoffel_jet(h)
        self.gamma_amb = gam.value

        # orthonormal frame: E = T M with Mᵀ h M = I
        hv = h.value
        lchol = np.linalg.cholesky(hv)
        m = np.linalg.inv(lchol).T
        if frame_rotation is not None:
            m = m @ np.asarray(frame_rotation, dtype=float)
        self.frame_m = m
        self.frame = tv @ m
        a = m.T @ self.sigma.value @ m
        self.a_frame = 0.5 * (a + a.T)

    # -- float views -----------------------------------------------------------
    @property
    def c_plus(self) -> float:
        return float(self.c.value)

    def ambient_scalar(self) -> float:
        return curvature(self.model.metric, self.x).scalar

    def induced_curvature(self):
        return curvature_from_jet(self.h, self.u)


def analyze(imm, model, u, orientation: int = 1, frame_rotation=None) -> LocalGeometry:
    return LocalGeometry(imm, model, u, orientation, frame_rotation)


def induced_metric(imm: Immersion, model) -> MetricField:
    """The g₊-induced metric of Σ as a metric field over the source chart."""

    def jet_fn(u, order):
        f = imm.map(jets.lift(u, order + 1))
        if order == 0:
            tv = np.stack([f.d(i).value for i in range(3)], axis=1)
            gv = model.metric.at(f.value)
            return jets.Jet(tv.T @ gv @ tv, [], 3)
        t = jets.stack([f.d(i) for i in range(3)], axis=1)
        x = f.truncate(order)
        g = _as_jet(model.metric.func(x), x)
        return t.T @ (g @ t)

    return MetricField(imm.source, None, jet_fn, f"induced({imm.label})")


# -- frame and shape ---------------------------------------------------------


def frame_and_normals(imm, model, u, null_tol: float = NULL_TOL, orientation: int = 1,
                      frame_rotation=None) -> ShapeData:
    return _shape_data(analyze(imm, model, u, orientation, frame_rotation), null_tol,
                       with_shape=False)


def shape_operator(imm, model, u, null_tol: float = NULL_TOL, orientation: int = 1,
                   frame_rotation=None) -> ShapeData:
    return _shape_data(analyze(imm, model, u, orientation, frame_rotation), null_tol)


def _shape_data(geo: LocalGeometry, null_tol: float, with_shape: bool = True) -> ShapeData:
    c = geo.c_plus
    pn = geo.pn.value
    if abs(c) < null_tol:
        n_minus, eps_minus, c_minus = pn, 0, None
    else:
        n_minus = pn / np.sqrt(abs(c))
        eps_minus = int(np.sign(c))
        c_minus = 1.0 / abs(c)
    sd = ShapeData(
        point=geo.u,
        tangent_basis=geo.frame,
        n_plus=geo.n.value,
        n_minus=n_minus,
        eps_minus=eps_minus,
        c_plus=c,
        c_minus=c_minus,
        x_plus=geo.x_amb.value,
        a_plus=geo.a_frame,
        sigma_norm2=float(np.sum(geo.a_frame**2)),
        mean_h=float(np.trace(geo.a_frame) / 3.0),
        lambdas=np.full(3, np.nan),
        principal_dirs=np.full((4, 3), np.nan),
    )
    if with_shape:
        eig = eig_sym(geo.a_frame)
        sd.lambdas = eig.eigenvalues
        sd.principal_dirs = geo.frame @ eig.eigenvectors
    if abs(c) < null_tol and with_shape:
        nf = principal_angle_data(geo)
        sd.theta = nf["theta"]
        sd.extras.update(nf)
    return sd


def principal_angle_data(geo: LocalGeometry) -> dict:
    """Principal frame (e₁, e₂, e₃ = PN₊) and principal angle at a null point."""
    if abs(geo.c_plus) >= NULL_TOL * 10:
        raise ValueError("principal angle is defined only at null points")
    gv, pv, e = geo.g.value, geo.p.value, geo.frame
    pn = geo.pn.value
    c3 = e.T @ gv @ pn  # components of PN in the orthonormal frame
    c3 = c3 / np.linalg.norm(c3)
    plane = np.linalg.svd(np.eye(3) - np.outer(c3, c3))[0][:, :2]
    a2 = plane.T @ geo.a_frame @ plane
    eig = eig_sym(0.5 * (a2 + a2.T))
    lam2, lam1 = eig.eigenvalues  # ascending
    gauge = abs(lam1 - lam2) <= GAUGE_TOL * max(1.0, abs(lam1))
    if gauge:
        b = np.stack([e @ plane[:, 0], e @ plane[:, 1]], axis=1)
        pp = b.T @ pv.T @ gv @ b
        pe = eig_sym(0.5 * (pp + pp.T))
        vecs = pe.eigenvectors[:, ::-1]  # +1 eigendirection first
    else:
        vecs = eig.eigenvectors[:, ::-1]  # larger eigenvalue first
    e1 = e @ (plane @ vecs[:, 0])
    e2 = e @ (plane @ vecs[:, 1])
    e3 = e @ c3
    pe1, pe2 = pv @ e1, pv @ e2
    cos_t = float(pe1 @ gv @ e1)
    sin_t = float(pe1 @ gv @ e2)
    theta = float(np.mod(np.arctan2(sin_t, cos_t), 2 * np.pi))
    r1 = pe1 - (cos_t * e1 + sin_t * e2)
    r2 = pe2 - (sin_t * e1 - cos_t * e2)
    relation = float(max(np.sqrt(abs(r1 @ gv @ r1)), np.sqrt(abs(r2 @ gv @ r2))))
    ape3 = geo.a_frame @ (e.T @ gv @ pn)
    return {
        "theta": theta,
        "cos_theta": cos_t,
        "sin_theta": sin_t,
        "lambda1": float(lam1),
        "lambda2": float(lam2),
        "e1": e1,
        "e2": e2,
        "e3": e3,
        "gauge": bool(gauge),
        "angle_relation_residual": relation,
        "trivial_direction_residual": float(np.linalg.norm(ape3)),
    }


def principal_angle(sd: ShapeData) -> float:
    if sd.theta is None:
        raise ValueError("principal angle is defined only at null points")
    return sd.theta


# -- identity checks ---------------------------------------------------------


def _hnorm(geo, v):
    hv = geo.h.value
    return float(np.sqrt(abs(v @ hv @ v)))


def gradient_c_check(geo: LocalGeometry) -> float:
    """‖∇C₊ + 2A₊X₊‖ with ∇C₊ raised by the induced metric."""
    dc = geo.c.derivs[0]
    grad = geo.hinv.value @ dc
    rhs = -2.0 * geo.a_u.value @ geo.x_u.value
    return _hnorm(geo, grad - rhs)


def _hessian_c(geo):
    dc = geo.c.derivs[0]
    return geo.c.derivs[1] - np.einsum("kij,k->ij", geo.gamma_ind.value, dc)


def _nabla_sigma(geo):
    s = geo.sigma.value
    ds = geo.sigma.derivs[0]  # [k, i, j]
    gam = geo.gamma_ind.value  # [l, k, i]
    return ds - np.einsum("lki,lj->kij", gam, s) - np.einsum("lkj,il->kij", gam, s)


def hessian_c_terms(geo: LocalGeometry):
    """Both sides of the Hessian identity as bilinear forms on parameter vectors."""
    lhs = _hessian_c(geo)
    a = geo.a_u.value
    x = geo.x_u.value
    c = geo.c_plus
    tv, gv, pv, hv = geo.t.value, geo.g.value, geo.p.value, geo.h.value
    ns = _nabla_sigma(geo)
    term1 = -2.0 * np.einsum("kij,i->kj", ns, x)
    term2 = -2.0 * c * (a.T @ hv @ a)  # ε₊ = 1
    term3 = 2.0 * a.T @ tv.T @ pv.T @ gv @ tv @ a
    return lhs, term1 + term2 + term3


def hessian_c_check(geo: LocalGeometry, u=None, v=None) -> float:
    lhs, rhs = hessian_c_terms(geo)
    if u is not None and v is not None:
        return float(abs(np.asarray(u) @ (lhs - rhs) @ np.asarray(v)))
    m = geo.frame_m
    return float(np.max(np.abs(m.T @ (lhs - rhs) @ m)))


def trace_pt_a2(geo: LocalGeometry) -> float:
    a = geo.a_u.value
    tv, gv, pv = geo.t.value, geo.g.value, geo.p.value
    beta = (a @ a).T @ tv.T @ pv.T @ gv @ tv
    return float(np.trace(geo.hinv.value @ beta))


def laplacian_c_terms(geo: LocalGeometry) -> tuple[float, float]:
    lap = float(np.trace(geo.hinv.value @ _hessian_c(geo)))
    dh = geo.mean_h.derivs[0]
    sig2 = float(np.sum(geo.a_frame**2))
    rhs = -6.0 * float(geo.x_u.value @ dh) - 2.0 * geo.c_plus * sig2 + 2.0 * trace_pt_a2(geo)
    return lap, rhs


def laplacian_c_check(geo: LocalGeometry) -> float:
    lap, rhs = laplacian_c_terms(geo)
    return abs(lap - rhs)


def x_derivative_check(geo: LocalGeometry, xi=None) -> float:
    """Tangential ∇_ξ X₊ against -P⊥A₊ξ + ε₊C₊A₊ξ."""
    xu = geo.x_u
    dx = xu.derivs[0].T  # [i, k] = ∂_k X^i
    gam = geo.gamma_ind.value
    lhs = dx + np.einsum("ikl,l->ik", gam, xu.value)
    a = geo.a_u.value
    tv, gv, pv = geo.t.value, geo.g.value, geo.p.value
    rhs = -geo.hinv.value @ tv.T @ gv @ pv @ tv @ a + geo.c_plus * a
    diff = lhs - rhs
    if xi is not None:
        return _hnorm(geo, diff @ np.asarray(xi, dtype=float))
    cols = diff @ geo.frame_m
    return max(_hnorm(geo, cols[:, k]) for k in range(3))


def induced_scalar_curvature(geo: LocalGeometry) -> float:
    return geo.induced_curvature().scalar


def gauss_scalar_check(geo: LocalGeometry, rbar: float | None = None) -> float:
    rbar = geo.ambient_scalar() if rbar is None else rbar
    r = induced_scalar_curvature(geo)
    h = float(np.trace(geo.a_frame)) / 3.0
    return abs(r - (0.5 * rbar + 9 * h * h - float(np.sum(geo.a_frame**2))))


def null_scalar_formula(lam1, lam2, cos_t) -> float:
    cos2t = 2 * cos_t * cos_t - 1
    return 2 * lam1 * lam2 * cos2t - 2 * (lam1**2 + lam2**2) * cos_t**2


def null_scalar_formula_check(geo: LocalGeometry) -> float:
    nf = principal_angle_data(geo)
    r = induced_scalar_curvature(geo)
    return abs(r - null_scalar_formula(nf["lambda1"], nf["lambda2"], nf["cos_theta"]))


def angle_identity(lam1, lam2, cos_t, rbar) -> float:
    cos2t = 2 * cos_t * cos_t - 1
    return 0.5 * rbar + (lam1 + lam2) ** 2 + (lam1 - lam2) ** 2 * cos2t


def angle_identity_check(sd: ShapeData, rbar: float) -> float:
    if sd.theta is None:
        raise ValueError("the angle identity applies at null points only")
    return abs(angle_identity(sd.extras["lambda1"], sd.extras["lambda2"],
                                 sd.extras["cos_theta"], rbar))


@dataclass
class CmcReport:
    preconditions_met: bool
    reason: str
    h_spread: float
    mean_h: float
    lambda_spread: float
    relation_residual: float
    minus_8_l1l2: float


def cmc_relation_check(family: list[ShapeData], rbar: float, tol: float = 1e-6) -> CmcReport:
    """Constancy of λ₁, λ₂ and R̄ = -8λ₁λ₂ over a family of null shape data."""
    hs = np.array([sd.mean_h for sd in family])
    l1 = np.array([sd.extras["lambda1"] for sd in family])
    l2 = np.array([sd.extras["lambda2"] for sd in family])
    # orientation-invariant: H flips sign together with both λ's
    sgn = np.sign(hs[np.argmax(np.abs(hs))]) or 1.0
    hs, l1, l2 = sgn * hs, sgn * l1, sgn * l2
    h_spread = float(hs.max() - hs.min())
    prods = -8.0 * l1 * l2
    reasons = []
    if any(abs(sd.c_plus) >= NULL_TOL for sd in family):
        reasons.append("not null")
    if h_spread > tol:
        reasons.append("not CMC")
    if abs(hs.mean()) <= tol:
        reasons.append("minimal")
    lam_spread = float(max(np.ptp(np.minimum(l1, l2)), np.ptp(np.maximum(l1, l2))))
    return CmcReport(
        preconditions_met=not reasons,
        reason=", ".join(reasons),
        h_spread=h_spread,
        mean_h=float(hs.mean()),
        lambda_spread=lam_spread,
        relation_residual=float(np.max(np.abs(prods - rbar))),
        minus_8_l1l2=float(np.mean(prods)),
    )


# -- connection coefficients of the principal null frame ---------------------


def _aligned_frame(imm, model, u, ref: dict | None):
    geo = analyze(imm, model, u)
    nf = principal_angle_data(geo)
    es = [nf["e1"], nf["e2"], nf["e3"]]
    if ref is not None:
        es = [e if e @ r >= 0 else -e for e, r in zip(es, (ref["e1"], ref["e2"], ref["e3"]))]
    gv, pv = geo.g.value, geo.p.value
    pe1 = pv @ es[0]
    theta = float(np.arctan2(pe1 @ gv @ es[1], pe1 @ gv @ es[0]))
    if ref is not None:
        theta = ref["theta_raw"] + (theta - ref["theta_raw"] + np.pi) % (2 * np.pi) - np.pi
    return geo, nf, es, theta


def connection_coefficients(imm, model, u, step: float = 1e-3) -> tuple[NullFrameData, dict]:
    """ω_ij^k = g(∇_{e_i} e_j, e_k) of the principal null frame, by FD transport.

    Returns the frame data and the residuals of the relations forced by the
    parallelism of P.
    """
    u = np.asarray(u, dtype=float)
    geo, nf, es, theta0 = _aligned_frame(imm, model, u, None)
    ref = {"e1": es[0], "e2": es[1], "e3": es[2], "theta_raw": theta0}

    def packed(v):
        _, _, e, th = _aligned_frame(imm, model, v, ref)
        return np.concatenate([e[0], e[1], e[2], [th]])

    d = fd_derivative(packed, u, 1, h=step).value  # [a, comp]
    de = [d[:, 4 * j: 4 * j + 4] for j in range(3)]  # ∂_a e_j, [a, comp]
    dtheta = d[:, 12]
    gv = geo.g.value
    gam = geo.gamma_amb
    hinv, tv = geo.hinv.value, geo.t.value
    coords = [hinv @ tv.T @ gv @ e for e in es]  # parameter components of e_i
    omega = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            cov = coords[i] @ de[j] + np.einsum("abc,b,c->a", gam, es[i], es[j])
            for k in range(3):
                omega[i, j, k] = cov @ gv @ es[k]
    e_half_theta = [0.5 * float(coords[i] @ dtheta) for i in range(3)]
    lam1, lam2 = nf["lambda1"], nf["lambda2"]
    s, c = np.sin(theta0), np.cos(theta0)
    nfd = NullFrameData(es[0], es[1], es[2], omega, omega[0, 0, 1], omega[1, 0, 1],
                        omega[2, 0, 1], float(np.mod(theta0, 2 * np.pi)))
    # ω indices are zero-based: omega[i-1, j-1, k-1] = ω_ij^k
    residuals = {
        "w12^3": abs(omega[0, 1, 2] - lam1 * s),
        "w11^3": abs(omega[0, 0, 2] - lam1 * c),
        "w21^3": abs(omega[1, 0, 2] - lam2 * s),
        "w22^3": abs(omega[1, 1, 2] + lam2 * c),
        "w31^3": abs(omega[2, 0, 2]),
        "w32^3": abs(omega[2, 1, 2]),
        "k": abs(nfd.k_coef + e_half_theta[0]),
        "mu": abs(nfd.mu_coef + e_half_theta[1]),
        "nu": abs(nfd.nu_coef + e_half_theta[2]),
        "antisymmetry": float(np.max(np.abs(omega + omega.transpose(0, 2, 1)))),
    }
    return nfd, residuals


def connection_relations_check(imm, model, u) -> float:
    return max(connection_coefficients(imm, model, u)[1].values())
