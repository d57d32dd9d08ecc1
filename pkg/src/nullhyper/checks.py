"""Data-driven registry of verification checks.

A check is either per-sample (called once per grid point with a
:class:`SampleContext`, residuals reduced by max) or per-scenario (called once
with the whole :class:`ScenarioContext`).  A per-sample function returns
``None`` when the check does not apply at that point; a check with no
applicable samples is reported as ``n/a`` rather than passing or failing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from . import hypersurface as hs
from .manifold import is_einstein
from .parastructure import neutral_metric, verify_neutral_properties, verify_paracomplex


@dataclass
class SampleContext:
    index: int
    u: np.ndarray
    family: object
    null_tol: float
    sign: float = 1.0
    rng: np.random.Generator | None = None

    @cached_property
    def local(self):
        return self.family.at(self.u)

    @property
    def model(self):
        return self.local[0]

    @property
    def imm(self):
        return self.local[1]

    @cached_property
    def geo(self) -> hs.LocalGeometry:
        return hs.analyze(self.imm, self.model, self.u)

    @cached_property
    def shape(self) -> hs.ShapeData:
        return hs._shape_data(self.geo, self.null_tol)

    @cached_property
    def prediction(self) -> dict:
        return self.family.predict(self.u)

    @property
    def is_null(self) -> bool:
        return abs(self.shape.c_plus) < self.null_tol

    @cached_property
    def induced_scalar(self) -> float:
        return hs.induced_scalar_curvature(self.geo)

    @cached_property
    def ambient_scalar(self) -> float:
        return self.geo.ambient_scalar()


@dataclass
class ScenarioContext:
    family: object
    samples: list[SampleContext]
    rbar: float
    null_tol: float


@dataclass(frozen=True)
class CheckOutcome:
    residual: float | None
    passed: bool | None = None  # None: decided by residual <= tolerance
    details: dict = field(default_factory=dict)


@dataclass(frozen=True)
class CheckSpec:
    name: str
    description: str
    default_tol: float
    scope: str  # "sample" or "scenario"
    fn: Callable


REGISTRY: dict[str, CheckSpec] = {}


def register(name: str, tol: float, scope: str = "sample", description: str = ""):
    def deco(fn):
        REGISTRY[name] = CheckSpec(name, description or (fn.__doc__ or "").strip(), tol,
                                   scope, fn)
        return fn

    return deco


def _null_only(fn):
    def wrapped(ctx: SampleContext):
        return fn(ctx) if ctx.is_null else None

    wrapped.__doc__ = fn.__doc__
    return wrapped


# -- ambient --------------------------------------------------------------------


def _ambient(sc: ScenarioContext):
    model = sc.samples[0].model
    return model, model.grid([3] * 4)


@register("einstein", 1e-6, "scenario")
def _einstein(sc: ScenarioContext):
    """Ricci = (R̄/4)g on a 3⁴ chart grid, scalar equal to the model constant."""
    model, pts = _ambient(sc)
    res = is_einstein(model.metric, pts)
    resid = max(res.max_residual, abs(res.rbar - model.rbar))
    return CheckOutcome(resid, None, {"rbar_measured": res.rbar, "rbar_model": model.rbar})


@register("paracomplex", 1e-8, "scenario")
def _paracomplex(sc: ScenarioContext):
    """P² = Id, isometry, ∇P = 0, trace 0, eigenvalue multiplicities (2, 2)."""
    model, pts = _ambient(sc)
    rep = verify_paracomplex(model.pstruct, model.metric, pts)
    return CheckOutcome(max(rep.residuals.values()), None, dict(rep.residuals))


@register("neutral", 1e-6, "scenario")
def _neutral(sc: ScenarioContext):
    """g₋ = g(P·,·): scalar flat, Weyl flat, same Γ and Ricci as g₊, signature (2, 2)."""
    model, pts = _ambient(sc)
    nm = neutral_metric(model.metric, model.pstruct, pts)
    rep = verify_neutral_properties(nm, pts)
    return CheckOutcome(max(rep.residuals.values()), None, dict(rep.residuals))


# -- nullity and shape ----------------------------------------------------------


@register("nullity", 1e-8)
def _nullity(ctx):
    """|C₊| = |g₋(N₊, N₊)|."""
    return abs(ctx.shape.c_plus)


@register("c-range", 1e-9)
def _c_range(ctx):
    """Excess of |C₊| over 1."""
    return max(0.0, abs(ctx.shape.c_plus) - 1.0)


@register("null-classification", 1e-7)
def _null_classification(ctx):
    """g₋(PN₊, PN₊) against C₊ (nullity of N₋ ∝ PN₊ is equivalent to C₊ = 0)."""
    g, p, pn = ctx.geo.g.value, ctx.geo.p.value, ctx.geo.pn.value
    return abs(float(pn @ g @ p @ pn) - ctx.shape.c_plus)


@register("eigenvalues", 1e-6)
def _eigenvalues(ctx):
    """Principal curvatures against the closed forms (global sign resolved per scenario)."""
    pred = ctx.prediction.get("lambdas")
    if pred is None:
        return None
    meas = np.sort(ctx.sign * ctx.shape.lambdas)
    return float(np.max(np.abs(meas - np.asarray(pred))))


@register("mean-curvature", 1e-6)
def _mean_curvature(ctx):
    """Mean curvature H = tr(A)/3 against the closed form."""
    pred = ctx.prediction.get("H")
    if pred is None:
        return None
    return abs(ctx.sign * ctx.shape.mean_h - pred)


@register("minimality", 1e-5)
def _minimality(ctx):
    """|H|."""
    return abs(ctx.shape.mean_h)


@register("trivial-direction", 1e-7)
def _trivial_direction(ctx):
    """‖A₊(PN₊)‖ / (1 + ‖A₊‖) at null points."""
    if not ctx.is_null:
        return None
    return ctx.shape.extras["trivial_direction_residual"] / (1 + np.linalg.norm(ctx.shape.a_plus))


@register("principal-angle", 1e-7)
@_null_only
def _principal_angle(ctx):
    """Pe₁ = cosθ e₁ + sinθ e₂ and Pe₂ = sinθ e₁ − cosθ e₂."""
    return ctx.shape.extras["angle_relation_residual"]


# -- scalar curvature -----------------------------------------------------------


@register("gauss-scalar", 1e-5)
def _gauss(ctx):
    """R = ½R̄ + 9H² − |σ|² with R from the induced metric."""
    return hs.gauss_scalar_check(ctx.geo, ctx.ambient_scalar)


@register("induced-scalar", 1e-5)
def _induced_scalar(ctx):
    """Induced scalar curvature against the closed form."""
    pred = ctx.prediction.get("R")
    if pred is None:
        return None
    return abs(ctx.induced_scalar - pred)


@register("null-scalar", 1e-5)
@_null_only
def _null_scalar(ctx):
    """R = 2λ₁λ₂cos2θ − 2(λ₁² + λ₂²)cos²θ at null points."""
    ex = ctx.shape.extras
    return abs(ctx.induced_scalar - hs.null_scalar_formula(ex["lambda1"], ex["lambda2"],
                                                           ex["cos_theta"]))


@register("geodesic-flatness", 1e-9)
def _geodesic_flatness(ctx):
    """Totally geodesic null points: R = 0 and R̄ = 0."""
    a = float(np.max(np.abs(ctx.shape.a_plus)))
    if not ctx.is_null or a > 1e-9:
        return None
    return max(a, abs(ctx.induced_scalar), abs(ctx.ambient_scalar))


@register("angle-identity", 1e-5)
@_null_only
def _angle_identity(ctx):
    """½R̄ + (λ₁+λ₂)² + (λ₁−λ₂)²cos2θ = 0 at null points."""
    return hs.angle_identity_check(ctx.shape, ctx.ambient_scalar)


@register("cmc-relation", 1e-5, "scenario")
def _cmc(sc: ScenarioContext):
    """Null CMC non-minimal: λ₁, λ₂ constant and R̄ = −8λ₁λ₂."""
    if not all(s.is_null for s in sc.samples):
        return CheckOutcome(None, None, {"reason": "not null"})
    rep = hs.cmc_relation_check([s.shape for s in sc.samples], sc.rbar)
    details = {"minus_8_l1l2": rep.minus_8_l1l2, "rbar": sc.rbar, "h_spread": rep.h_spread,
               "lambda_spread": rep.lambda_spread}
    if not rep.preconditions_met:
        details["reason"] = rep.reason
        return CheckOutcome(None, None, details)
    return CheckOutcome(max(rep.relation_residual, rep.lambda_spread), None, details)


@register("mab-counterexample", 1e-6, "scenario")
def _mab(sc: ScenarioContext):
    """M_ab: H ≡ 0 and −8λ₁λ₂ misses R̄ by at least 1 where ⟨x,a⟩ = 0.3."""
    fam = sc.family
    if "point_with" not in fam.extras:
        return CheckOutcome(None, None, {"reason": "not an M_ab scenario"})
    h_max = max(abs(s.shape.mean_h) for s in sc.samples)
    probe = SampleContext(-1, fam.extras["point_with"](0.3), fam, sc.null_tol)
    ex = probe.shape.extras
    value = -8.0 * ex["lambda1"] * ex["lambda2"]
    deviation = abs(value - sc.rbar)
    return CheckOutcome(h_max, None if deviation >= 1.0 else False,
                        {"minus_8_l1l2_at_0.3": value, "rbar": sc.rbar,
                         "deviation": deviation})


# -- identities of the second fundamental form ----------------------------------


@register("gradient-c", 1e-5)
def _gradient_c(ctx):
    """∇C₊ = −2A₊X₊."""
    return hs.gradient_c_check(ctx.geo)


@register("hessian-c", 1e-4)
def _hessian_c(ctx):
    """∇²C₊(u,v) = −2(∇_uσ)(X₊,v) − 2C₊g(Au,Av) + 2g(PAu,Av) on an orthonormal frame."""
    return hs.hessian_c_check(ctx.geo)


@register("laplacian-c", 1e-4)
def _laplacian_c(ctx):
    """ΔC₊ = −6g(X₊,∇H) − 2C₊|σ|² + 2Tr(PᵀA²)."""
    return hs.laplacian_c_check(ctx.geo)


@register("trace-pta2", 1e-6)
@_null_only
def _trace_pta2(ctx):
    """Tr(PᵀA²) (vanishes on null CMC hypersurfaces)."""
    return abs(hs.trace_pt_a2(ctx.geo))


@register("x-derivative", 1e-5)
def _x_derivative(ctx):
    """∇_ξX₊ = −P⊥A₊ξ + C₊A₊ξ for ξ in an orthonormal frame."""
    return hs.x_derivative_check(ctx.geo)


@register("connection-relations", 1e-4)
@_null_only
def _connection(ctx):
    """ω-relations forced by ∇P = 0, and k, μ, ν = −e₁,₂,₃(θ/2)."""
    return hs.connection_relations_check(ctx.imm, ctx.model, ctx.u)


# -- invariance -----------------------------------------------------------------


def random_rotation(rng: np.random.Generator, n: int = 3) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


def gauge_quantities(sd: hs.ShapeData, orientation: int) -> dict:
    lam = np.sort(orientation * sd.lambdas)
    out = {
        "lambdas": lam,
        "H": orientation * sd.mean_h,
        "sigma2": sd.sigma_norm2,
        "C": sd.c_plus,
    }
    if sd.theta is not None and not sd.extras["gauge"]:
        ex = sd.extras
        c2 = 2 * ex["cos_theta"] ** 2 - 1
        out["cos2theta"] = c2
        out["sin_gap"] = abs(ex["sin_theta"]) * abs(ex["lambda1"] - ex["lambda2"])
    return out


@register("gauge-invariance", 1e-8)
def _gauge(ctx):
    """Random tangent re-framing and normal flip leave λ, H, |σ|², C₊, R, cos2θ unchanged."""
    rng = ctx.rng if ctx.rng is not None else np.random.default_rng(0)
    q = random_rotation(rng)
    o = int(rng.choice([-1, 1]))
    geo2 = hs.analyze(ctx.imm, ctx.model, ctx.u, orientation=o, frame_rotation=q)
    sd2 = hs._shape_data(geo2, ctx.null_tol)
    a = gauge_quantities(ctx.shape, 1)
    b = gauge_quantities(sd2, o)
    worst = abs(hs.induced_scalar_curvature(geo2) - ctx.induced_scalar)
    for k in a:
        if k in b:
            worst = max(worst, float(np.max(np.abs(np.asarray(a[k]) - np.asarray(b[k])))))
    return worst


def check_names() -> list[str]:
    return sorted(REGISTRY)
