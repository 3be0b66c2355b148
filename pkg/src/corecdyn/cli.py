"""Command-line entry point: ``corecdyn <command> --config <path>``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import dynamics, variational
from .config import ExperimentConfig, load_config
from .dynamics import (AllPointsFixed, ScanSettings, classify_orbit, empirical_measure,
                       find_fixed_points, gradient_flow_compare, iterate, lyapunov_monitor,
                       parameter_scan)
from .errors import CoreDynError
from .io import fmt, heatmap_svg, line_plot_svg, write_csv, write_json
from .thickness import check_admissibility

COMMANDS = ("simulate", "fixed-points", "scan", "functionals", "flow-compare")


def _finite(value):
    return value if value is not None and math.isfinite(value) else None


def cmd_simulate(cfg: ExperimentConfig, out: Path) -> list[Path]:
    shape = cfg.shape()
    orbit = iterate(shape, cfg["simulate.theta0"], cfg.variant, cfg["simulate.max_iters"],
                    cfg["simulate.tol"], cfg["simulate.period_max"], cfg["simulate.cycle_tol"])
    if orbit.termination.kind == "StepFailed":
        classification = {"kind": "Undefined", "period": None, "points": [], "lyapunov": None}
    else:
        cls = classify_orbit(orbit, cfg["simulate.period_max"], cfg["classify.cycle_tol"])
        classification = cls.to_dict()
        classification["label"] = cls.label
        classification["lyapunov"] = _finite(cls.lyapunov)
    monitor = lyapunov_monitor(orbit)
    rows = []
    for k, step in enumerate(orbit.steps):
        rows.append((k, step.theta_in, step.d, step.t, orbit.V[k], orbit.V[k + 1] - orbit.V[k],
                     step.cosine))
    paths = [out / "orbit.csv", out / "orbit.json", out / "orbit.svg"]
    write_csv(paths[0], ["k", "theta", "d", "t", "V", "dV", "cosine"], rows)
    payload = {
        "orbit": orbit.to_dict(),
        "classification": classification,
        "admissibility": check_admissibility(shape, cfg["admissibility.grid"]).as_dict(),
        "lyapunov_monitor": {"strictly_decreasing": monitor.strictly_decreasing,
                             "residual_ratio": monitor.residual_ratio},
    }
    bins = cfg["simulate.bins"]
    if len(orbit.thetas) >= bins:
        edges, mass = empirical_measure(orbit, bins)
        payload["measure"] = {"edges": edges.tolist(), "mass": mass.tolist()}
    write_json(paths[1], payload)

    ks = list(range(len(orbit.thetas)))
    fixed = find_fixed_points(shape, cfg["fixed_points.grid"])
    lo, hi = min(orbit.thetas), max(orbit.thetas)
    span = max(hi - lo, 0.2)
    hlines = []
    if not isinstance(fixed, AllPointsFixed):
        palette = {"Attracting": "#d7191c", "Repelling": "#7b3294", "Marginal": "#555555"}
        for fp in fixed:
            if lo - 0.25 * span <= fp.theta <= hi + 0.25 * span:
                hlines.append((fp.theta, palette.get(fp.stability, "#555555"),
                               f"{fp.theta:.4f} ({fp.stability})"))
    svg = line_plot_svg(ks, [(list(orbit.thetas), "#2b83ba", "theta_k")], hlines,
                        title=f"Orbit from theta0={orbit.thetas[0]:.4g} ({cfg.variant} map)",
                        xlabel="iteration k", ylabel="theta_k")
    paths[2].write_text(svg)
    return paths


def cmd_fixed_points(cfg: ExperimentConfig, out: Path) -> list[Path]:
    fixed = find_fixed_points(cfg.shape(), cfg["fixed_points.grid"])
    path = out / "fixed_points.csv"
    header = ["theta", "d", "lambda", "mu", "class"]
    if isinstance(fixed, AllPointsFixed):
        write_csv(path, header, [("all", "*", 0, 1, "Marginal")])
    else:
        write_csv(path, header, [(fp.theta, fp.d, fp.hessian, fp.mu, fp.stability) for fp in fixed])
    return [path]


def cmd_scan(cfg: ExperimentConfig, out: Path) -> list[Path]:
    res = cfg["scan.resolution"]
    resolution = (cfg.get("scan.d0_resolution", res), cfg.get("scan.eps_resolution", res))
    settings = ScanSettings(
        variant=cfg.variant, max_iters=cfg["scan.max_iters"], tol=cfg["simulate.tol"],
        period_max=cfg["simulate.period_max"], cycle_tol=cfg["classify.cycle_tol"],
        n_transient=cfg["scan.n_transient"], n_sample=cfg["scan.n_sample"])
    theta0 = cfg.get("scan.theta0", cfg["simulate.theta0"])
    result = parameter_scan(cfg.core(), cfg.scan_m(), (cfg["scan.d0_min"], cfg["scan.d0_max"]),
                            (cfg["scan.eps_min"], cfg["scan.eps_max"]), resolution, theta0,
                            settings, jitter=cfg["scan.theta0_jitter"], seed=cfg["seed"])
    paths = [out / "scan.csv", out / "scan.svg"]
    rows = [(c.d0, c.eps, c.label, c.lyapunov if math.isfinite(c.lyapunov) else "")
            for c in result.cells]
    write_csv(paths[0], ["d0", "eps", "class", "lyapunov"], rows)
    paths[1].write_text(heatmap_svg(result.d0_values, result.eps_values, result.labels(),
                                    title=f"Return-map regimes, m={result.m} ({cfg.variant} map)"))
    return paths


def cmd_functionals(cfg: ExperimentConfig, out: Path) -> list[Path]:
    shape = cfg.shape()
    report = variational.functional_report(shape)
    path = out / "functionals.json"
    write_json(path, {"shape": shape.describe(), **report.as_dict()})
    return [path]


def _flow_rows(report):
    return zip(report.tau.tolist(), report.theta_discrete.tolist(), report.theta_flow.tolist(),
               report.deviation.tolist())


def cmd_flow_compare(cfg: ExperimentConfig, out: Path) -> list[Path]:
    shape = cfg.shape()
    theta0 = cfg.get("flow.theta0", cfg["simulate.theta0"])
    header = ["tau", "theta_discrete", "theta_flow", "deviation"]
    report = gradient_flow_compare(shape, theta0, cfg["flow.horizon"], cfg.variant)
    paths = [out / "flow.csv"]
    write_csv(paths[0], header, _flow_rows(report))
    summary = {"base": {"max_deviation": report.max_deviation, "diverged": report.diverged,
                        "error": report.error}}
    if cfg["flow.scales"]:
        summary["scales"] = []
        for s in cfg["flow.scales"]:
            scaled = gradient_flow_compare(shape.scaled(s), theta0, cfg["flow.horizon"], cfg.variant)
            path = out / f"flow_s{fmt(s)}.csv"
            write_csv(path, header, _flow_rows(scaled))
            paths.append(path)
            summary["scales"].append({"scale": s, "file": path.name,
                                      "max_deviation": scaled.max_deviation,
                                      "diverged": scaled.diverged, "error": scaled.error})
    paths.append(out / "flow_summary.json")
    write_json(paths[-1], summary)
    return paths


HANDLERS = {
    "simulate": cmd_simulate,
    "fixed-points": cmd_fixed_points,
    "scan": cmd_scan,
    "functionals": cmd_functionals,
    "flow-compare": cmd_flow_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corecdyn", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True,
                        help="config file, or a bundled preset name (fig1.cfg, table1.cfg, chaos.cfg)")
    parser.add_argument("--out-dir", default=".", help="directory for output files")
    parser.add_argument("--variant", choices=dynamics.VARIANTS, help="override map.variant")
    parser.add_argument("--seed", type=int, help="override the config seed")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out_dir)
    try:
        cfg = load_config(args.config)
        overrides = {}
        if args.variant:
            overrides["map.variant"] = args.variant
        if args.seed is not None:
            overrides["seed"] = args.seed
        if overrides:
            cfg = cfg.with_overrides(**overrides)
        out.mkdir(parents=True, exist_ok=True)
        HANDLERS[args.command](cfg, out)
    except (CoreDynError, ValueError, OSError) as exc:
        error = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(error, sort_keys=True), file=sys.stderr)
        try:
            write_json(out / "error.json", error)
        except OSError:
            pass
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
