"""Σ_t sweep over t in both product spaces, measured against the closed forms."""

import argparse
from pathlib import Path

from nullhyper.runner import sweep_sigma_t, sweep_to_json, sweep_to_markdown

T_VALUES = [-0.9, -0.5, 0.0, 0.3, 0.5, 0.9]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--grid", type=int, default=3)
    args = ap.parse_args()
    for space in ("s2xs2", "h2xh2"):
        rows = sweep_sigma_t(space, T_VALUES, counts=(args.grid,) * 3)
        print(sweep_to_markdown(space, rows))
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / f"sweep_{space}.json").write_text(sweep_to_json(space, rows))
        worst = max(r["delta_rbar"] for r in rows if abs(r["pred_H"]) > 1e-12)
        print(f"{space}: max |-8 l1 l2 - Rbar| over non-minimal rows = {worst:.2e}\n")


if __name__ == "__main__":
    main()
