"""Run every scenario config in configs/ and write JSON + markdown reports.

    python scripts/run_all_scenarios.py [--out reports/]
"""

import argparse
from pathlib import Path

from nullhyper.runner import ScenarioConfig, run

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--configs", type=Path, default=ROOT / "configs")
    ap.add_argument("--out", type=Path, default=ROOT / "reports")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for path in sorted(args.configs.glob("*.toml")):
        report = run(ScenarioConfig.from_toml(path))
        (args.out / f"{path.stem}.json").write_text(report.to_json())
        (args.out / f"{path.stem}.md").write_text(report.to_markdown())
        worst = max((c.max_residual or 0.0) for c in report.checks)
        print(f"{path.stem:28s} {'PASS' if report.passed else 'FAIL'}  worst residual {worst:.2e}")


if __name__ == "__main__":
    main()
