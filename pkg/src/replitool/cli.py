"""Command-line front end: ``replitool <subcommand> [options]``.

Exit codes: 0 success, 1 validation or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from replitool import __version__
from replitool.calibration import SimScenario, simulate_error_rates
from replitool.criteria import ALL_CRITERIA, AnalysisConfig, Criterion, evaluate_pair, success_rates
from replitool.dataio import (convert_logor_to_smd, convert_smd_to_logor, convert_study, fisher_z,
                              inverse_fisher_z, load_studies, resolve_dataset, sha256_file,
                              study_rows, COLUMNS)
from replitool.display import format_bf, format_number, format_p
from replitool.evidence import confidence_interval
from replitool.models import DomainError, Scale, StudyPair
from replitool.sensitivity import Axis, margin_sweep, pair_evidence_curve, prior_sd_sweep

SCHEMA_VERSION = 1
DEFAULT_MARGINS = {Scale.SMD: 0.74, Scale.FISHER_Z: 0.2}

SHORT = {
    Criterion.NON_SIGNIFICANCE: "NS",
    Criterion.META_NON_SIGNIFICANCE: "MA",
    Criterion.ORIG_IN_REPL_CI: "CIo",
    Criterion.REPL_IN_ORIG_CI: "CIr",
    Criterion.REPL_IN_PREDICTION_INTERVAL: "PI",
    Criterion.TWO_TRIALS: "2T",
    Criterion.EQUIVALENCE_TOST: "TOST",
    Criterion.BAYES_FACTOR_THRESHOLD: "BF",
}


# -- argument parsing ------------------------------------------------------------

def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:n`` (log-spaced), ``lo:hi:n:lin`` (linear) or a comma list."""
    if ":" not in text:
        return np.array([float(v) for v in text.split(",") if v.strip()])
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:n[:lin|log], got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    spacing = parts[3] if len(parts) == 4 else "log"
    if n < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"invalid grid {text!r}")
    if spacing == "lin":
        return np.linspace(lo, hi, n)
    if spacing == "log":
        if lo <= 0:
            raise argparse.ArgumentTypeError("log-spaced grid needs lo > 0; use lo:hi:n:lin")
        return np.geomspace(lo, hi, n)
    raise argparse.ArgumentTypeError(f"unknown grid spacing {spacing!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _grid_arg(text: str) -> np.ndarray:
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common(p: argparse.ArgumentParser, data_required: bool = True) -> None:
    p.add_argument("--data", required=data_required, help="CSV file or fixture name (rpcb, rpp_eprp)")
    p.add_argument("--no-verify", action="store_true", help="skip fixture checksum verification")
    _config_flags(p)
    _output_flags(p)


def _config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--margin", type=float, help="equivalence margin (default 0.74 SMD, 0.2 Fisher z)")
    p.add_argument("--null", type=float, default=0.0, help="null value (default 0)")
    p.add_argument("--prior-mean", type=float, default=0.0)
    p.add_argument("--prior-sd", type=float, default=2.0, help="prior sd (default 2, unit information)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--ci-level", type=float, default=0.9, help="level of displayed intervals (default 0.9)")
    p.add_argument("--criteria-ci-level", type=float, default=0.95,
                   help="level of the CI-inclusion criteria (default 0.95)")
    p.add_argument("--pi-level", type=float, default=0.95)
    p.add_argument("--recompute-p", action="store_true",
                   help="ignore reported p-values and null classifications")


def _output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--out", type=Path, help="write output to this file instead of stdout")
    p.add_argument("--full-precision", action="store_true", help="no rounding in table output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="replitool", description="Replication success for original null results.")
    parser.add_argument("--version", action="version", version=f"replitool {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="per-pair evidence and criterion verdicts")
    _common(p)

    p = sub.add_parser("rates", help="success rate of every criterion")
    _common(p)

    p = sub.add_parser("sweep", help="success counts over a grid of margins or prior sds")
    _common(p)
    p.add_argument("--axis", choices=("margin", "prior-sd"), default="margin")
    p.add_argument("--grid", type=_grid_arg, help="lo:hi:n (log-spaced), lo:hi:n:lin, or a comma list")
    p.add_argument("--alphas", type=_floats, default=[0.1, 0.05, 0.01])
    p.add_argument("--gammas", type=_floats, default=[3.0, 6.0, 10.0])
    p.add_argument("--curves", action="store_true", help="emit per-pair evidence curves instead of counts")
    p.add_argument("--pair", action="append", help="restrict curves to this pair id (repeatable)")

    p = sub.add_parser("calibrate", help="Monte Carlo success probabilities of every criterion")
    _config_flags(p)
    _output_flags(p)
    p.add_argument("--effect", type=float, default=0.0, help="true effect size")
    p.add_argument("--se-original", type=float, default=1.0)
    p.add_argument("--se-replication", type=float, default=1.0)
    p.add_argument("--sims", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("convert", help="effect-size conversions")
    p.add_argument("--kind", choices=("logor-to-smd", "smd-to-logor", "fisher-z", "inverse-fisher-z"))
    p.add_argument("values", nargs="*", type=float)
    p.add_argument("--data", help="convert a whole dataset (with --to)")
    p.add_argument("--to", help="target scale for --data (SMD or LogOR)")
    p.add_argument("--no-verify", action="store_true")
    _output_flags(p)

    p = sub.add_parser("validate", help="check a dataset and report what would be flagged")
    p.add_argument("--data", required=True)
    p.add_argument("--no-verify", action="store_true")
    p.add_argument("--alpha", type=float, default=0.05)
    _output_flags(p)
    return parser


# -- helpers ---------------------------------------------------------------------

def _load(args) -> tuple[list[StudyPair], dict]:
    path = resolve_dataset(args.data)
    pairs = load_studies(path, verify=False if args.no_verify else None)
    return pairs, {"name": str(args.data), "file": path.name, "sha256": sha256_file(path)}


def _config(args, pairs: Sequence[StudyPair] | None = None) -> AnalysisConfig:
    margin = args.margin
    if margin is None:
        scales = {p.scale for p in pairs} if pairs else {Scale.SMD}
        if len(scales) != 1 or next(iter(scales)) not in DEFAULT_MARGINS:
            raise DomainError("no default margin for this data; pass --margin")
        margin = DEFAULT_MARGINS[scales.pop()]
    return AnalysisConfig(null_value=args.null, margin=margin, prior_mean=args.prior_mean,
                          prior_sd=args.prior_sd, alpha=args.alpha, gamma=args.gamma,
                          ci_level=args.criteria_ci_level, pi_level=args.pi_level,
                          use_reported_p=not args.recompute_p)


def _envelope(command: str, config: dict, data: dict | None, payload) -> dict:
    return {"tool": "replitool", "version": __version__, "schema_version": SCHEMA_VERSION,
            "command": command, "config": config, "data": data, "payload": payload}


def _csv_text(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.writer(buf, lineterminator="\n")
    keys = list(rows[0])
    writer.writerow(keys)
    for row in rows:
        out = []
        for k in keys:
            v = row[k]
            if isinstance(v, bool):
                v = "true" if v else "false"
            elif isinstance(v, float):
                v = repr(v)
            elif isinstance(v, (list, tuple)):
                v = "; ".join(map(str, v))
            elif v is None:
                v = ""
            out.append(v)
        writer.writerow(out)
    return buf.getvalue()


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return "\n".join([line(headers), line(["-" * w for w in widths]), *map(line, rows)]) + "\n"


def _emit(args, envelope: dict, rows: list[dict], table: str) -> None:
    if args.format == "json":
        text = json.dumps(envelope, indent=2) + "\n"
    elif args.format == "csv":
        text = _csv_text(rows)
    else:
        text = table
    if args.out:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# -- subcommands -----------------------------------------------------------------

def _analyze_rows(pairs, config, display_level) -> list[dict]:
    rows = []
    for pair in pairs:
        rep = evaluate_pair(pair, config)
        o, r = rep.original, rep.replication
        ci_o, ci_r = confidence_interval(o, display_level), confidence_interval(r, display_level)
        ns = rep.outcomes[Criterion.NON_SIGNIFICANCE].detail
        tost = rep.outcomes[Criterion.EQUIVALENCE_TOST].detail
        bf = rep.outcomes[Criterion.BAYES_FACTOR_THRESHOLD].detail
        row = {
            "pair_id": pair.id, "k_replications": len(pair.replications),
            "n_original": o.n, "n_replication": r.n,
            "estimate_original": o.estimate, "se_original": o.se,
            "ci_original_lower": ci_o.lower, "ci_original_upper": ci_o.upper,
            "estimate_replication": r.estimate, "se_replication": r.se,
            "ci_replication_lower": ci_r.lower, "ci_replication_upper": ci_r.upper,
            "p_original": ns["p_original"], "p_replication": ns["p_replication"],
            "p_tost_original": tost["p_tost_original"], "p_tost_replication": tost["p_tost_replication"],
            "bf01_original": bf["bf01_original"], "bf01_replication": bf["bf01_replication"],
            "p_MA": rep.outcomes[Criterion.META_NON_SIGNIFICANCE].detail["p_MA"],
        }
        for c in ALL_CRITERIA:
            row[f"success_{c.value}"] = rep.outcomes[c].success
        row["flags"] = list(rep.flags)
        rows.append(row)
    return rows


def cmd_analyze(args) -> None:
    pairs, data = _load(args)
    config = _config(args, pairs)
    rows = _analyze_rows(pairs, config, args.ci_level)
    full = args.full_precision
    num = (lambda x: repr(x)) if full else (lambda x: format_number(x))
    pv = (lambda x: repr(x)) if full else format_p
    bfv = (lambda x: repr(x)) if full else format_bf
    level = f"{args.ci_level * 100:g}%"
    headers = ["pair", "n_o", "n_r", f"est_o [{level} CI]", f"est_r [{level} CI]", "p_o", "p_r",
               "pTOST_o", "pTOST_r", "BF01_o", "BF01_r", "p_MA", "success"]
    table_rows, notes = [], []
    for row in rows:
        won = [SHORT[c] for c in ALL_CRITERIA if row[f"success_{c.value}"]]
        table_rows.append([
            row["pair_id"], str(row["n_original"] or ""), str(row["n_replication"] or ""),
            f"{num(row['estimate_original'])} [{num(row['ci_original_lower'])}, {num(row['ci_original_upper'])}]",
            f"{num(row['estimate_replication'])} [{num(row['ci_replication_lower'])}, "
            f"{num(row['ci_replication_upper'])}]",
            pv(row["p_original"]), pv(row["p_replication"]),
            pv(row["p_tost_original"]), pv(row["p_tost_replication"]),
            bfv(row["bf01_original"]), bfv(row["bf01_replication"]), pv(row["p_MA"]),
            ",".join(won) or "-"])
        notes += [f"  {row['pair_id']}: {f}" for f in row["flags"]]
    legend = "success: " + ", ".join(f"{v}={k.value}" for k, v in SHORT.items())
    table = (f"margin {config.margin:g}, prior N({config.prior_mean:g}, {config.prior_sd:g}^2), "
             f"alpha {config.alpha:g}, gamma {config.gamma:g}\n"
             + _table(headers, table_rows) + legend + "\n")
    if notes:
        table += "flags:\n" + "\n".join(notes) + "\n"
    _emit(args, _envelope("analyze", config.to_dict(), data, rows), rows, table)


def cmd_rates(args) -> None:
    pairs, data = _load(args)
    config = _config(args, pairs)
    rates = success_rates(pairs, config)
    rows = [{"criterion": c.value, "successes": r.successes, "total": r.total,
             "proportion": r.proportion} for c, r in rates.items()]
    table = _table(["criterion", "successes", "rate"],
                   [[row["criterion"], f"{row['successes']}/{row['total']}",
                     repr(row["proportion"]) if args.full_precision else f"{row['proportion']:.0%}"]
                    for row in rows])
    _emit(args, _envelope("rates", config.to_dict(), data, rows), rows, table)


def cmd_sweep(args) -> None:
    pairs, data = _load(args)
    config = _config(args, pairs)
    axis = Axis.parse(args.axis)
    echo = {**config.to_dict(), "axis": axis.value,
            "grid": None if args.grid is None else [float(g) for g in args.grid],
            "alphas": args.alphas, "gammas": args.gammas}
    if args.curves:
        chosen = [p for p in pairs if not args.pair or p.id in args.pair]
        if args.pair and not chosen:
            raise DomainError(f"no pair matches {args.pair}")
        rows = [row for p in chosen for row in pair_evidence_curve(p, config, axis, args.grid).rows()]
        fmt = repr if args.full_precision else (format_p if axis is Axis.MARGIN else format_bf)
        table = _table(["pair", "study", axis.value, "evidence"],
                       [[r["pair_id"], r["study"], f"{r['value']:.4g}", fmt(r["evidence"])] for r in rows])
    else:
        if axis is Axis.MARGIN:
            grid = margin_sweep(pairs, config, args.grid, args.alphas)
        else:
            grid = prior_sd_sweep(pairs, config, args.grid, args.gammas)
        rows = grid.rows()
        label = "alpha" if axis is Axis.MARGIN else "gamma"
        headers = [axis.value] + [f"{label}={t:g}" for t in grid.thresholds]
        table = _table(headers, [[repr(float(g)) if args.full_precision else f"{g:.4g}"]
                                 + [str(int(c)) for c in grid.counts[i]]
                                 for i, g in enumerate(grid.grid)])
        table += f"counts out of {grid.n_pairs} pairs\n"
    _emit(args, _envelope("sweep", echo, data, rows), rows, table)


def cmd_calibrate(args) -> None:
    config = _config(args)
    scenario = SimScenario(args.effect, args.se_original, args.se_replication, args.sims, args.seed, config)
    report = simulate_error_rates(scenario)
    rows = report.rows()
    echo = {**config.to_dict(), "true_effect": args.effect, "se_original": args.se_original,
            "se_replication": args.se_replication, "n_sims": args.sims, "seed": args.seed}
    fmt = repr if args.full_precision else (lambda x: f"{x:.5f}")
    table = _table(["criterion", "probability", "mc_se", "analytic"],
                   [[r["criterion"], fmt(r["probability"]), fmt(r["mcse"]), fmt(r["analytic"])] for r in rows])
    _emit(args, _envelope("calibrate", echo, None, rows), rows, table)


CONVERSIONS = {
    "logor-to-smd": convert_logor_to_smd,
    "smd-to-logor": convert_smd_to_logor,
    "fisher-z": fisher_z,
    "inverse-fisher-z": inverse_fisher_z,
}


def cmd_convert(args) -> None:
    if args.data:
        if not args.to:
            raise DomainError("--data needs --to")
        pairs, data = _load(args)
        converted = [StudyPair(p.id, convert_study(p.original, args.to),
                               tuple(convert_study(r, args.to) for r in p.replications)) for p in pairs]
        rows = study_rows(converted)
        echo = {"to": Scale.parse(args.to).value}
        table = _csv_text([{c: r[c] for c in COLUMNS} for r in rows])
        _emit(args, _envelope("convert", echo, data, rows), rows, table)
        return
    if not args.kind or not args.values:
        raise DomainError("convert needs --kind and at least one value (or --data with --to)")
    fn = CONVERSIONS[args.kind]
    rows = [{"kind": args.kind, "input": v, "output": fn(v)} for v in args.values]
    fmt = repr if args.full_precision else (lambda x: f"{x:.4f}")
    table = _table(["kind", "input", "output"], [[r["kind"], f"{r['input']:g}", fmt(r["output"])] for r in rows])
    _emit(args, _envelope("convert", {"kind": args.kind}, None, rows), rows, table)


def cmd_validate(args) -> None:
    pairs, data = _load(args)
    config = AnalysisConfig(alpha=args.alpha)
    rows = []
    for pair in pairs:
        rep = evaluate_pair(pair, config, [Criterion.NON_SIGNIFICANCE])
        rows.append({"pair_id": pair.id, "scale": pair.scale.value,
                     "k_replications": len(pair.replications), "flags": list(rep.flags)})
    n_rows = sum(1 + r["k_replications"] for r in rows)
    text = (f"{data['file']}: OK, {len(pairs)} pairs, {n_rows} rows "
            f"({n_rows - len(pairs)} replication rows), sha256 {data['sha256']}\n")
    for r in rows:
        text += "".join(f"  {r['pair_id']}: {f}\n" for f in r["flags"])
    _emit(args, _envelope("validate", config.to_dict(), data, rows), rows, text)


COMMANDS = {"analyze": cmd_analyze, "rates": cmd_rates, "sweep": cmd_sweep,
            "calibrate": cmd_calibrate, "convert": cmd_convert, "validate": cmd_validate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except (DomainError, OSError) as exc:
        print(f"replitool {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
