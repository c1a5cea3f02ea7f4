"""Write the numeric grids behind the sensitivity figures as CSV.

Outputs (in --out, default ./results):
  rpcb_margin_counts.csv    success counts over the margin grid, alpha 0.1/0.05/0.01
  rpcb_prior_sd_counts.csv  success counts over the prior-sd grid, gamma 3/6/10
  rpcb_curves.csv           per-pair p_TOST and BF01 curves
  rpp_eprp_curves.csv       the same on the Fisher z scale (margin grid up to 1)
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

from replitool.criteria import AnalysisConfig
from replitool.dataio import load_fixture
from replitool.sensitivity import Axis, margin_sweep, pair_evidence_curve, prior_sd_sweep


def write_rows(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def curves(pairs, config, margin_grid=None) -> list[dict]:
    rows = []
    for pair in pairs:
        rows += pair_evidence_curve(pair, config, Axis.MARGIN, margin_grid).rows()
        rows += pair_evidence_curve(pair, config, Axis.PRIOR_SD).rows()
    return rows


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rpcb = load_fixture("rpcb")
    cfg = AnalysisConfig()
    m = margin_sweep(rpcb, cfg)
    s = prior_sd_sweep(rpcb, cfg)
    write_rows(m.rows(), args.out / "rpcb_margin_counts.csv")
    write_rows(s.rows(), args.out / "rpcb_prior_sd_counts.csv")
    write_rows(curves(rpcb, cfg), args.out / "rpcb_curves.csv")

    rpp = load_fixture("rpp_eprp")
    write_rows(curves(rpp, cfg.replace(margin=0.2), np.geomspace(0.01, 1.0, 200)),
               args.out / "rpp_eprp_curves.csv")

    print(f"RPCB: count at margin 0.74 (alpha 0.05): {m.count_at(0.74, 0.05)}/15")
    print(f"RPCB: smallest margin with >= 11 successes: {m.first_reaching(11, 0.05):.3f}")
    print(f"RPCB: count at s = 2 (gamma 3): {prior_sd_sweep(rpcb, cfg, [2.0]).count_at(2.0, 3)}/15")
    print(f"RPCB: smallest s with >= 11 successes (gamma 3): {s.first_reaching(11, 3.0):.2f}")


if __name__ == "__main__":
    main()
