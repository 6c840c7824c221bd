"""Command-line workflows: simulate, optimize, sensitivity and modes.

Every command reads a YAML run config; ``--seed``, ``--out-dir`` and
``--threads`` override the config. Outputs are plain CSV and sorted-key JSON
so that equal inputs give byte-identical files.

Exit codes: 0 success, 1 invalid input, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
import zlib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .ingest import RunConfig, load_config, resolve_mode
from .lifecycle import QUARTER_COLUMNS, DesignObjective, SimulationContext, SystemDesign, simulate
from .qpso import INTEGER, Dimension, SearchSpace, optimize

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILURE = 2

DEMO_CONFIG = Path(__file__).resolve().parent / "data" / "demo_config.yaml"

SUMMARY_COLUMNS = ("plan_id", "retailer", "battery_product_id", "operating_mode", "battery_kwh", "pv_kwp",
                   "tilt_beta", "azimuth_gamma", "panel_count_Z", "battery_count_X", "npv", "mirr",
                   "payback_years", "best")
SENSITIVITY_COLUMNS = ("battery_product_id", "price_factor", "npv", "battery_count_X", "battery_kwh",
                       "panel_count_Z", "pv_kwp", "tilt_beta", "azimuth_gamma")
MODES_COLUMNS = ("operating_mode", "plan_id", "battery_product_id", "price_factor", "npv", "mirr",
                 "payback_years", "battery_count_X", "battery_kwh", "panel_count_Z", "pv_kwp", "tilt_beta",
                 "azimuth_gamma")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------- formatting


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, columns, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    path.write_text(buf.getvalue())


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n")


def write_report(report, out_dir: Path, stem: str = "report") -> None:
    """``<stem>.json`` with headline metrics and ``<stem>_quarters.csv`` with per-quarter detail."""
    _write_json(out_dir / f"{stem}.json", report.to_dict())
    pq = report.per_quarter
    rows = [{c: pq[c][i] for c in QUARTER_COLUMNS} for i in range(len(pq["q"]))]
    _write_csv(out_dir / f"{stem}_quarters.csv", QUARTER_COLUMNS, rows)


# --------------------------------------------------------------------------- search plumbing


def run_seed(seed: int, plan_id: str, product_id: str | None) -> int:
    """Swarm seed for one combination.

    Deliberately excludes mode and price factor, so those studies compare
    runs that differ only in the objective.
    """
    key = [seed, zlib.crc32(plan_id.encode()), zlib.crc32((product_id or "").encode())]
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def search_space(cfg: RunConfig, product_id: str | None) -> SearchSpace:
    x_max = cfg.x_max if product_id is not None else 0
    return SearchSpace((
        Dimension("tilt_beta", cfg.tilt.lower, cfg.tilt.upper, INTEGER, cfg.tilt.step),
        Dimension("azimuth_gamma", cfg.azimuth.lower, cfg.azimuth.upper, INTEGER, cfg.azimuth.step),
        Dimension("panel_count_Z", 0, cfg.z_max, INTEGER, 1),
        Dimension("battery_count_X", 0, x_max, INTEGER, 1),
    ))


def optimize_design(ctx: SimulationContext, cfg: RunConfig, plan_id: str, product_id: str | None, mode,
                    *, initial_positions=(), threads: int = 1):
    """Best ``SimulationReport`` for one (plan, product, mode) under ``ctx``'s battery price."""
    obj = DesignObjective(ctx, plan_id, mode, product_id)
    swarm = dataclasses.replace(cfg.qpso, rng_seed=run_seed(cfg.seed, plan_id, product_id))
    result = optimize(obj, search_space(cfg, product_id), swarm, threads=threads,
                      initial_positions=initial_positions)
    return simulate(obj.design(result.best_position), ctx)


def _row(report, ctx: SimulationContext) -> dict:
    d = report.design
    return {
        "plan_id": d.plan_id,
        "retailer": ctx.plans[d.plan_id].retailer,
        "battery_product_id": d.battery_product_id or "",
        "operating_mode": int(d.operating_mode),
        "battery_kwh": report.battery_kwh,
        "pv_kwp": report.rated_pv_watts / 1000.0,
        "tilt_beta": d.tilt_beta,
        "azimuth_gamma": d.azimuth_gamma,
        "panel_count_Z": d.panel_count_Z,
        "battery_count_X": d.battery_count_X,
        "npv": report.npv,
        "mirr": report.mirr,
        "payback_years": report.payback_years,
    }


def _position(report):
    d = report.design
    return (d.tilt_beta, d.azimuth_gamma, d.panel_count_Z, d.battery_count_X)


def _map(fn, items, threads):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def _products(cfg: RunConfig):
    return list(cfg.battery_product_ids) or [None]


# --------------------------------------------------------------------------- commands


def cmd_simulate(cfg: RunConfig, design: SystemDesign, out_dir: Path) -> dict:
    ctx = SimulationContext.from_config(cfg)
    report = simulate(design, ctx)
    write_report(report, out_dir)
    return report.to_dict()


def cmd_optimize(cfg: RunConfig, out_dir: Path, threads: int = 1) -> list:
    """Optimise every (plan, product, mode) combination; one summary row per plan."""
    ctx = SimulationContext.from_config(cfg)
    combos = [(plan, product, mode) for plan in cfg.candidate_plan_ids for product in _products(cfg)
              for mode in cfg.operating_modes]
    reports = _map(lambda c: optimize_design(ctx, cfg, *c), combos, threads)

    detail = [_row(r, ctx) for r in reports]
    overall = max(range(len(reports)), key=lambda i: (reports[i].npv, -i))
    for i, row in enumerate(detail):
        row["best"] = i == overall
    summary = []
    for plan in cfg.candidate_plan_ids:
        idx = [i for i, c in enumerate(combos) if c[0] == plan]
        summary.append(detail[max(idx, key=lambda i: (reports[i].npv, -i))])

    _write_csv(out_dir / "optimize_detail.csv", SUMMARY_COLUMNS, detail)
    _write_csv(out_dir / "optimize_summary.csv", SUMMARY_COLUMNS, summary)
    write_report(reports[overall], out_dir, "best")
    return summary


def cmd_sensitivity(cfg: RunConfig, out_dir: Path, threads: int = 1, factors=None) -> list:
    """Re-optimise at each battery price factor, per battery product.

    Factors are visited from dearest to cheapest and each search is seeded
    with the previous optimum, which is still feasible at the lower price.
    """
    factors = tuple(cfg.sensitivity_factors if factors is None else factors)
    for f in factors:
        if not 0 < f <= 1:
            raise ValidationError(f"price factor {f} outside (0, 1]", field="price_factors")
    ordered = sorted(set(factors), reverse=True)
    plan = cfg.sensitivity_plan_id or cfg.candidate_plan_ids[0]
    mode = resolve_mode(cfg.sensitivity_mode)
    base = SimulationContext.from_config(cfg)

    def sweep(product):
        rows, warm = [], ()
        for f in ordered:
            report = optimize_design(base.with_price_factor(f), cfg, plan, product, mode, initial_positions=warm)
            warm = (_position(report),)
            rows.append({
                "battery_product_id": product or "",
                "price_factor": f,
                "npv": report.npv,
                "battery_count_X": report.design.battery_count_X,
                "battery_kwh": report.battery_kwh,
                "panel_count_Z": report.design.panel_count_Z,
                "pv_kwp": report.rated_pv_watts / 1000.0,
                "tilt_beta": report.design.tilt_beta,
                "azimuth_gamma": report.design.azimuth_gamma,
            })
        return rows

    rows = [r for block in _map(sweep, _products(cfg), threads) for r in block]
    _write_csv(out_dir / "sensitivity.csv", SENSITIVITY_COLUMNS, rows)
    return rows


def cmd_modes(cfg: RunConfig, out_dir: Path, threads: int = 1) -> list:
    """Optimise under each operating mode at a fixed battery price factor.

    After the independent searches every mode also scores the other modes'
    optima, so a mode is never reported below a design another mode found.
    """
    plan = cfg.modes_plan_id or cfg.candidate_plan_ids[0]
    product = cfg.modes_product_id or _products(cfg)[0]
    factor = cfg.modes_price_factor
    ctx = SimulationContext.from_config(cfg).with_price_factor(factor)
    modes = [resolve_mode(m) for m in (1, 2, 3, 4)]
    reports = _map(lambda m: optimize_design(ctx, cfg, plan, product, m), modes, threads)

    rows = []
    for mode, report in zip(modes, reports):
        obj = DesignObjective(ctx, plan, mode, product)
        for other in reports:
            candidate = simulate(obj.design(_position(other)), ctx)
            if candidate.npv > report.npv:
                report = candidate
        row = _row(report, ctx)
        rows.append({**{k: row[k] for k in MODES_COLUMNS if k in row}, "price_factor": factor})
    _write_csv(out_dir / "modes.csv", MODES_COLUMNS, rows)
    return rows


# --------------------------------------------------------------------------- entry point


def _config_path(value: str) -> Path:
    return DEMO_CONFIG if value == "demo" else Path(value)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", required=True, help="run-config YAML, or 'demo' for the bundled one")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out-dir", type=Path, help="override the config output directory")
    common.add_argument("--threads", type=int, help="worker threads (results do not depend on this)")

    parser = _Parser(prog="pvbatt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common], help="simulate one design")
    sim.add_argument("--tilt", type=float, required=True, help="panel tilt in degrees")
    sim.add_argument("--azimuth", type=float, required=True, help="panel azimuth, 0 = north, east positive")
    sim.add_argument("--panels", type=int, required=True, help="number of PV panels")
    sim.add_argument("--batteries", type=int, default=0, help="number of battery units")
    sim.add_argument("--product", help="battery product id (default: first configured)")
    sim.add_argument("--mode", type=int, default=2, choices=(1, 2, 3, 4), help="battery operating mode")
    sim.add_argument("--plan", help="tariff plan id (default: first candidate)")

    sub.add_parser("optimize", parents=[common], help="optimise each plan, product and mode")

    sens = sub.add_parser("sensitivity", parents=[common], help="battery price sensitivity sweep")
    sens.add_argument("--factors", type=float, nargs="+", help="battery price factors in (0, 1]")

    sub.add_parser("modes", parents=[common], help="compare the four operating modes")
    return parser


def _resolve(args) -> tuple:
    cfg = load_config(_config_path(args.config))
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out_dir is not None:
        overrides["out_dir"] = args.out_dir
    if args.threads is not None:
        if args.threads < 1:
            raise ValidationError("must be >= 1", field="threads")
        overrides["threads"] = args.threads
    cfg = dataclasses.replace(cfg, **overrides)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return cfg, out_dir


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, out_dir = _resolve(args)
        if args.command == "simulate":
            product = args.product or (cfg.battery_product_ids[0] if cfg.battery_product_ids else None)
            design = SystemDesign(args.tilt, args.azimuth, args.panels, args.batteries, product,
                                  resolve_mode(args.mode), args.plan or cfg.candidate_plan_ids[0])
            doc = cmd_simulate(cfg, design, out_dir)
            print(f"npv {doc['npv']:.2f}  ->  {out_dir}")
        elif args.command == "optimize":
            for row in cmd_optimize(cfg, out_dir, cfg.threads):
                print(f"{row['plan_id']:<20} npv {row['npv']:>12.2f}{'  *' if row['best'] else ''}")
        elif args.command == "sensitivity":
            for row in cmd_sensitivity(cfg, out_dir, cfg.threads, args.factors):
                print(f"{row['battery_product_id']:<14} {row['price_factor']:.2f} npv {row['npv']:>12.2f} "
                      f"X={row['battery_count_X']}")
        else:
            for row in cmd_modes(cfg, out_dir, cfg.threads):
                print(f"mode {row['operating_mode']} npv {row['npv']:>12.2f}")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - anything else is a runtime failure
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
