"""Command-line entry point.

Environment (read once when :func:`main` starts):

``NULLHYP_DEFAULT_TOL``
    replaces the registry default tolerance of every check that has no
    explicit tolerance in the scenario config.
``NULLHYP_DERIVATIVE_MODE``
    ``fd`` forces finite-difference derivatives for every scenario; ``jet``
    (or unset) keeps the configured mode.

Exit codes: 0 all checks pass, 1 some check failed, 2 configuration error,
3 construction error (bad family parameters, retraction divergence).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .checks import REGISTRY, check_names
from .runner import (
    ConfigError,
    ConstructionError,
    ScenarioConfig,
    run,
    sweep_sigma_t,
    sweep_to_json,
    sweep_to_markdown,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_CONSTRUCTION = 3

ENV_TOL = "NULLHYP_DEFAULT_TOL"
ENV_MODE = "NULLHYP_DERIVATIVE_MODE"


@dataclass(frozen=True)
class Settings:
    default_tol: float | None = None
    force_fd: bool = False

    @classmethod
    def from_env(cls, env=None) -> "Settings":
        env = os.environ if env is None else env
        tol = env.get(ENV_TOL)
        mode = env.get(ENV_MODE, "").strip().lower()
        if mode not in ("", "jet", "fd"):
            raise ConfigError(f"{ENV_MODE} must be 'jet' or 'fd', got {mode!r}")
        if tol is not None:
            try:
                tol_value = float(tol)
            except ValueError:
                raise ConfigError(f"{ENV_TOL} is not a number: {tol!r}") from None
            if not tol_value > 0:
                raise ConfigError(f"{ENV_TOL} must be positive")
        else:
            tol_value = None
        return cls(tol_value, mode == "fd")


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nullhyp", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a scenario config")
    p_verify.add_argument("config", type=Path)
    p_verify.add_argument("--json", type=Path, help="write the JSON report here")
    p_verify.add_argument("--md", type=Path, help="write the markdown report here")
    p_verify.add_argument("--quiet", action="store_true", help="suppress the markdown summary")

    p_sweep = sub.add_parser("sweep", help="parameter sweeps")
    sweep_sub = p_sweep.add_subparsers(dest="family", required=True)
    p_st = sweep_sub.add_parser("sigma-t", help="measured vs predicted invariants of Σ_t")
    p_st.add_argument("--space", choices=("s2xs2", "h2xh2"), required=True)
    p_st.add_argument("--t", type=_parse_floats, required=True, help="comma list of t values")
    p_st.add_argument("--json", type=Path)
    p_st.add_argument("--md", type=Path)

    sub.add_parser("list-checks", help="list registered checks")
    sub.add_parser("version", help="print the version")
    return parser


def _write(path: Path | None, text: str) -> None:
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings.from_env()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "version":
        print(__version__)
        return EXIT_OK
    if args.command == "list-checks":
        for name in check_names():
            spec = REGISTRY[name]
            print(f"{name:22s} {spec.scope:8s} tol={spec.default_tol:.0e}  {spec.description}")
        return EXIT_OK

    try:
        if args.command == "verify":
            cfg = ScenarioConfig.from_toml(args.config)
            report = run(cfg, default_tol=settings.default_tol, force_fd=settings.force_fd)
            _write(args.json, report.to_json())
            _write(args.md, report.to_markdown())
            if not args.quiet:
                print(report.to_markdown(), end="")
            return EXIT_OK if report.passed else EXIT_CHECK_FAILED
        if args.command == "sweep":
            rows = sweep_sigma_t(args.space, args.t)
            md = sweep_to_markdown(args.space, rows)
            _write(args.json, sweep_to_json(args.space, rows))
            _write(args.md, md)
            print(md, end="")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConstructionError as exc:
        print(f"construction error: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    parser.error("unknown command")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
