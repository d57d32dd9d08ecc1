"""Scenario runner: TOML config in, JSON and markdown reports out.

Example config::

    name = "sigma-t in S2xS2"
    model = "s2xs2"
    derivative_mode = "jet"        # or "fd"
    seed = 7
    checks = ["nullity", "eigenvalues", "cmc-relation"]

    [hypersurface]
    kind = "sigma-t"
    t = 0.5

    [grid]
    counts = [6, 6, 6]

    [tolerances]
    eigenvalues = 1e-6

Random draws (gauge-invariance frames) come from numpy's PCG64 generator
seeded with ``seed``, one child stream per sample index, so reports do not
depend on evaluation order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import tomli

from . import __version__
from . import families as fam_mod
from .checks import REGISTRY, CheckOutcome, SampleContext, ScenarioContext
from .hypersurface import NULL_TOL
from .models import RetractionError

SCHEMA_VERSION = 1
MODELS = ("s2xs2", "h2xh2", "flat", "geodesic-space")
HYPERSURFACES = ("sigma-t", "mab", "tangential", "null-plane", "graph")
# which model each hypersurface family lives in
FAMILY_MODELS = {
    "mab": ("s2xs2",),
    "tangential": ("geodesic-space",),
    "null-plane": ("flat",),
    "graph": ("flat",),
    "sigma-t": ("s2xs2", "h2xh2"),
}


class ConfigError(ValueError):
    """Invalid scenario configuration."""


class ConstructionError(RuntimeError):
    """Model or hypersurface could not be built."""


@dataclass
class ScenarioConfig:
    model: str
    hypersurface: str
    params: dict = field(default_factory=dict)
    checks: list[str] = field(default_factory=list)
    grid: list[int] = field(default_factory=lambda: [3, 3, 3])
    tolerances: dict[str, float] = field(default_factory=dict)
    derivative_mode: str = "jet"
    seed: int = 0
    null_tol: float = NULL_TOL
    name: str = ""

    def validate(self) -> "ScenarioConfig":
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; expected one of {MODELS}")
        if self.hypersurface not in HYPERSURFACES:
            raise ConfigError(f"unknown hypersurface {self.hypersurface!r}")
        if self.model not in FAMILY_MODELS[self.hypersurface]:
            raise ConfigError(f"{self.hypersurface} does not live in {self.model}")
        unknown = [c for c in self.checks if c not in REGISTRY]
        unknown += [c for c in self.tolerances if c not in REGISTRY]
        if unknown:
            raise ConfigError(f"unknown check names: {', '.join(sorted(set(unknown)))}")
        if not self.checks:
            raise ConfigError("no checks selected")
        for k, v in self.tolerances.items():
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                raise ConfigError(f"tolerance for {k} must be a positive number, got {v!r}")
        if len(self.grid) != 3 or any(int(c) < 2 for c in self.grid):
            raise ConfigError("grid needs three per-axis counts, each at least 2")
        if self.derivative_mode not in ("jet", "fd"):
            raise ConfigError("derivative_mode must be 'jet' or 'fd'")
        if not self.null_tol > 0:
            raise ConfigError("null_tol must be positive")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        data = dict(data)
        try:
            hyper = dict(data.pop("hypersurface"))
            kind = hyper.pop("kind")
            model = data.pop("model")
        except KeyError as exc:
            raise ConfigError(f"missing required key {exc}") from None
        grid = data.pop("grid", {"counts": [3, 3, 3]})
        counts = grid.get("counts") if isinstance(grid, dict) else grid
        known = {"checks", "tolerances", "derivative_mode", "seed", "null_tol", "name"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        try:
            cfg = cls(model=model, hypersurface=kind, params=hyper, grid=[int(c) for c in counts],
                      **data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        return cfg.validate()

    @classmethod
    def from_toml(cls, path) -> "ScenarioConfig":
        try:
            with open(path, "rb") as fh:
                data = tomli.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"malformed config: {exc}") from None
        cfg = cls.from_dict(data)
        if not cfg.name:
            cfg.name = Path(path).stem
        return cfg


@dataclass
class CheckResult:
    name: str
    samples: int
    max_residual: float | None
    tolerance: float
    status: str  # "pass", "fail" or "n/a"
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status != "fail"


@dataclass
class ScenarioReport:
    name: str
    model: str
    hypersurface: str
    params: dict
    checks: list[CheckResult]
    environment: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.name,
            "model": self.model,
            "hypersurface": {"kind": self.hypersurface, **self.params},
            "environment": self.environment,
            "checks": [
                {
                    "name": c.name,
                    "samples": c.samples,
                    "max_residual": c.max_residual,
                    "tolerance": c.tolerance,
                    "pass": c.passed,
                    "status": c.status,
                    "details": c.details,
                }
                for c in self.checks
            ],
            "overall": "pass" if self.passed else "fail",
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=False) + "\n"

    def to_markdown(self) -> str:
        env = self.environment
        lines = [
            f"# Scenario `{self.name}`",
            "",
            f"- model: `{self.model}`",
            f"- hypersurface: `{self.hypersurface}` {_fmt_params(self.params)}",
            f"- derivative mode: `{env['derivative_mode']}`, seed {env['seed']}, "
            f"version {env['artifact_version']}",
            f"- overall: **{'PASS' if self.passed else 'FAIL'}**",
            "",
            "| check | samples | max residual | tolerance | status |",
            "|---|---|---|---|---|",
        ]
        for c in self.checks:
            res = "n/a" if c.max_residual is None else f"{c.max_residual:.3e}"
            lines.append(f"| {c.name} | {c.samples} | {res} | {c.tolerance:.1e} | {c.status} |")
        notes = [(c.name, c.details["reason"]) for c in self.checks if "reason" in c.details]
        if notes:
            lines += ["", "Notes:", ""]
            lines += [f"- {n}: {r}" for n, r in notes]
        return "\n".join(lines) + "\n"


def _fmt_params(params: dict) -> str:
    return ", ".join(f"{k}={v}" for k, v in params.items())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


# -- construction -----------------------------------------------------------------


def build_family(model: str, kind: str, params: dict):
    """Hypersurface family for a (model, kind, params) triple."""
    p = dict(params)
    try:
        if kind == "sigma-t":
            return fam_mod.immersion_sigma_t(model, float(p.get("t", 0.5)))
        if kind == "mab":
            return fam_mod.immersion_mab(p.get("a", (1.0, 0.0, 0.0)), p.get("b", (0.0, 0.0, 1.0)))
        if kind == "null-plane":
            n = p.get("normal", (fam_mod.SQRT_HALF, 0.0, fam_mod.SQRT_HALF, 0.0))
            n = np.asarray(n, dtype=float)
            return fam_mod.null_hyperplane_flat(n / np.linalg.norm(n))
        if kind == "graph":
            return fam_mod.graph_flat()
        if kind == "tangential":
            surface = p.get("surface", "umbilic-sphere")
            if surface not in fam_mod.SURFACES:
                raise ConfigError(f"unknown surface {surface!r}")
            builder = fam_mod.SURFACES[surface]
            s = builder(float(p["radius"])) if "radius" in p else builder()
            return fam_mod.immersion_tangential(s)
    except ConfigError:
        raise
    except (ValueError, RetractionError, np.linalg.LinAlgError) as exc:
        raise ConstructionError(f"{kind}: {exc}") from exc
    raise ConfigError(f"unknown hypersurface kind {kind!r}")


def resolve_sign(samples: list[SampleContext]) -> float:
    """Global orientation sign that best matches the predicted principal curvatures."""
    cost = {1.0: 0.0, -1.0: 0.0}
    for s in samples:
        pred = s.prediction.get("lambdas")
        if pred is None:
            return 1.0
        for sgn in cost:
            cost[sgn] += float(np.max(np.abs(np.sort(sgn * s.shape.lambdas) - pred)))
    return 1.0 if cost[1.0] <= cost[-1.0] else -1.0


def run(config: ScenarioConfig, default_tol: float | None = None,
        force_fd: bool = False, fd_scale: float = 1.0) -> ScenarioReport:
    """Execute every selected check over the sample grid.

    ``default_tol`` replaces the registry default for checks without an
    explicit tolerance in the config; ``force_fd`` overrides the configured
    derivative mode.
    """
    config.validate()
    family = build_family(config.model, config.hypersurface, config.params)
    mode = "fd" if force_fd else config.derivative_mode
    if mode == "fd":
        family = family.with_fd(fd_scale)
    root = np.random.SeedSequence(config.seed)
    pts = family.grid(config.grid)
    streams = root.spawn(len(pts))
    samples = [
        SampleContext(i, u, family, config.null_tol,
                      rng=np.random.Generator(np.random.PCG64(streams[i])))
        for i, u in enumerate(pts)
    ]
    try:
        for s in samples:
            _ = s.shape
    except (ValueError, RetractionError, np.linalg.LinAlgError) as exc:
        raise ConstructionError(f"sample evaluation failed: {exc}") from exc
    sign = resolve_sign(samples)
    for s in samples:
        s.sign = sign
    scen = ScenarioContext(family, samples, family.rbar, config.null_tol)

    results = []
    for name in config.checks:
        spec = REGISTRY[name]
        tol = config.tolerances.get(name, default_tol if default_tol is not None
                                    else spec.default_tol)
        results.append(_run_check(spec, scen, float(tol)))
    env = {
        "derivative_mode": mode,
        "seed": config.seed,
        "artifact_version": __version__,
        "rng": "PCG64",
        "orientation_sign": sign,
    }
    return ScenarioReport(config.name or f"{config.model}/{config.hypersurface}", config.model,
                          config.hypersurface, dict(config.params), results, env)


def _run_check(spec, scen: ScenarioContext, tol: float) -> CheckResult:
    if spec.scope == "scenario":
        out: CheckOutcome = spec.fn(scen)
        n = len(scen.samples)
        if out.residual is None:
            return CheckResult(spec.name, n, None, tol, "n/a", _jsonable(out.details))
        ok = out.residual <= tol if out.passed is None else out.passed
        return CheckResult(spec.name, n, float(out.residual), tol, "pass" if ok else "fail",
                           _jsonable(out.details))
    worst, worst_at, count = None, None, 0
    for s in scen.samples:
        r = spec.fn(s)
        if r is None:
            continue
        count += 1
        r = float(r)
        if worst is None or r > worst or not math.isfinite(r):
            worst, worst_at = r, s.index
    if worst is None:
        return CheckResult(spec.name, 0, None, tol, "n/a",
                           {"reason": "no applicable samples"})
    ok = math.isfinite(worst) and worst <= tol
    return CheckResult(spec.name, count, worst, tol, "pass" if ok else "fail",
                       {"worst_sample": worst_at})


# -- Σ_t sweep --------------------------------------------------------------------


SWEEP_COLUMNS = [
    "t", "lambda1", "lambda2", "lambda3", "H", "R", "cos2theta", "sin_gap", "minus_8_l1l2",
    "rbar", "pred_lambda1", "pred_lambda2", "pred_H", "delta_lambda", "delta_H", "delta_rbar",
]


def sweep_sigma_t(space: str, ts, counts=(3, 3, 3)) -> list[dict]:
    """Measured vs predicted invariants of Σ_t, one row per t (grid averages)."""
    if space not in ("s2xs2", "h2xh2"):
        raise ConfigError("sweep space must be s2xs2 or h2xh2")
    rows = []
    for t in ts:
        t = float(t)
        if not abs(t) < 1:
            raise ConfigError(f"t must lie in (-1, 1), got {t}")
        family = fam_mod.immersion_sigma_t(space, t)
        samples = [SampleContext(i, u, family, NULL_TOL) for i, u in enumerate(family.grid(counts))]
        sign = resolve_sign(samples)
        pred = samples[0].prediction
        lam = np.mean([np.sort(sign * s.shape.lambdas) for s in samples], axis=0)
        l12 = np.array([[s.shape.extras["lambda1"], s.shape.extras["lambda2"]] for s in samples])
        h = float(np.mean([sign * s.shape.mean_h for s in samples]))
        r = float(np.mean([s.induced_scalar for s in samples]))
        c2 = float(np.mean([2 * s.shape.extras["cos_theta"] ** 2 - 1 for s in samples]))
        sg = float(np.mean([abs(s.shape.extras["sin_theta"]) * abs(a - b) for s, (a, b)
                            in zip(samples, l12)]))
        m8 = float(np.mean(-8 * l12[:, 0] * l12[:, 1]))
        nontriv = sorted(pred["nontrivial"], reverse=True)
        # the trivial eigenvalue is the one closest to zero
        trivial = int(np.argmin(np.abs(lam)))
        meas_nt = sorted(np.delete(lam, trivial), reverse=True)
        rows.append({
            "t": t,
            "lambda1": float(meas_nt[0]),
            "lambda2": float(meas_nt[1]),
            "lambda3": float(lam[trivial]),
            "H": h,
            "R": r,
            "cos2theta": c2,
            "sin_gap": sg,
            "minus_8_l1l2": m8,
            "rbar": family.rbar,
            "pred_lambda1": float(nontriv[0]),
            "pred_lambda2": float(nontriv[1]),
            "pred_H": float(pred["H"]),
            "delta_lambda": float(max(abs(meas_nt[0] - nontriv[0]), abs(meas_nt[1] - nontriv[1]))),
            "delta_H": abs(h - pred["H"]),
            "delta_rbar": abs(m8 - family.rbar),
        })
    return rows


def sweep_to_json(space: str, rows: list[dict]) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "sweep": "sigma-t", "space": space,
           "artifact_version": __version__, "columns": SWEEP_COLUMNS, "rows": rows}
    return json.dumps(_jsonable(doc), indent=2) + "\n"


def sweep_to_markdown(space: str, rows: list[dict]) -> str:
    lines = [f"# Σ_t sweep in `{space}`", "",
             "| " + " | ".join(SWEEP_COLUMNS) + " |",
             "|" + "---|" * len(SWEEP_COLUMNS)]
    for row in rows:
        lines.append("| " + " | ".join(f"{row[c]:.6g}" for c in SWEEP_COLUMNS) + " |")
    return "\n".join(lines) + "\n"


__all__ = [
    "ConfigError",
    "ConstructionError",
    "ScenarioConfig",
    "ScenarioReport",
    "CheckResult",
    "run",
    "build_family",
    "sweep_sigma_t",
    "sweep_to_json",
    "sweep_to_markdown",
    "SCHEMA_VERSION",
]
