"""Command-line interface.

    epfreg run            backtest one (market, model, penalty, selection)
    epfreg compare        RMSE / rRMSE table + figure across finished runs
    epfreg penalty-curves sample (beta, g(beta)) per family to CSV
    epfreg synth          write a synthetic panel CSV fixture

`run` reads a flat key=value config file when --config is given; explicit
flags always win over the file, the file over built-in defaults.  Exit
codes: 0 ok, 2 configuration error, 3 data error, 4 numeric error.
"""

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .backtest import BacktestConfig, BacktestResult, ForecastRecord, run_backtest
from .errors import ConfigError, DataError, EpfregError, NumericError
from .figures import comparison_figure, forecast_figure
from .ingest import load_panel, save_panel, write_repair_log
from .metrics import ScoreReport, rrmse, score, write_report
from .penalties import FAMILIES, LAMBDA_CAPS, SHAPE_GRIDS, penalty_curve
from .selection import SelectionPlan
from .synthetic import make_panel

RUN_DEFAULTS = {
    "market": "epex",
    "model": "farx",
    "penalty": "lasso",
    "select": "cv",
    "shape": None,
    "window": 728,
    "date_from": None,
    "date_to": None,
    "jobs": 1,
    "seed": 0,
    "folds": 7,
    "lambda_count": 50,
    "lambda_min_ratio": 1e-4,
    "lambda_max": None,
    "reselect_every": 1,
    "per_hour_ecdf": False,
    "figures": True,
    "dump_candidates": False,
}


@dataclass
class RunConfig:
    data: str
    out: str
    market: str
    model: str
    penalty: str
    select: str
    shape: object
    window: int
    date_from: object
    date_to: object
    jobs: int
    seed: int
    folds: int
    lambda_count: int
    lambda_min_ratio: float
    lambda_max: object
    reselect_every: int
    per_hour_ecdf: bool
    figures: bool
    dump_candidates: bool

    @property
    def shape_mode(self):
        if SHAPE_GRIDS.get(self.penalty) is None:
            return "None"
        return "JointCV" if self.shape == "cv" else "Fixed"


def _read_config_file(path):
    out = {}
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _coerce(key, value):
    if value is None or not isinstance(value, str):
        return value
    if key in ("window", "jobs", "seed", "folds", "lambda_count", "reselect_every"):
        return int(value)
    if key in ("lambda_min_ratio", "lambda_max"):
        return float(value)
    if key in ("per_hour_ecdf", "figures", "dump_candidates"):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"bad boolean for {key}: {value!r}")
    return value


def _resolve_run_config(args):
    merged = dict(RUN_DEFAULTS)
    if args.config:
        filed = _read_config_file(args.config)
        unknown = set(filed) - set(RUN_DEFAULTS) - {"data", "out"}
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        merged.update(filed)
    for key in list(RUN_DEFAULTS) + ["data", "out"]:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
    merged = {k: _coerce(k, v) for k, v in merged.items()}
    if merged.get("data") is None:
        raise ConfigError("--data is required (flag or config file)")
    if merged.get("out") is None:
        raise ConfigError("--out is required (flag or config file)")
    cfg = RunConfig(**merged)

    if cfg.market not in ("epex", "omie"):
        raise ConfigError(f"unknown market {cfg.market!r}")
    if cfg.model not in ("arx", "farx"):
        raise ConfigError(f"unknown model {cfg.model!r}")
    if cfg.penalty not in FAMILIES:
        raise ConfigError(f"unknown penalty {cfg.penalty!r}")
    if cfg.select not in ("cv", "bic"):
        raise ConfigError(f"unknown selection method {cfg.select!r}")
    cap = LAMBDA_CAPS.get(cfg.penalty)
    if cfg.lambda_max is not None and cap is not None and cfg.lambda_max > cap:
        raise ConfigError(
            f"--lambda-max {cfg.lambda_max:g} exceeds the {cfg.penalty} cap {cap:g}")

    has_shape = SHAPE_GRIDS.get(cfg.penalty) is not None
    if not has_shape and cfg.shape is not None:
        raise ConfigError(f"{cfg.penalty} takes no --shape")
    if has_shape:
        if cfg.shape is None:
            if cfg.select == "cv":
                cfg.shape = "cv"
            else:
                raise ConfigError(
                    f"{cfg.penalty} with BIC needs a fixed --shape "
                    f"(joint selection is CV-only); grid: {SHAPE_GRIDS[cfg.penalty]}")
        if cfg.shape != "cv":
            try:
                cfg.shape = float(cfg.shape)
            except (TypeError, ValueError):
                raise ConfigError(f"--shape must be a number or 'cv', got {cfg.shape!r}") from None
        if cfg.shape == "cv" and cfg.select == "bic":
            raise ConfigError("joint shape selection is unavailable for BIC")
    return cfg


def _selection_plan(cfg):
    return SelectionPlan(
        method=cfg.select,
        folds=cfg.folds,
        shape_mode="cv" if cfg.shape == "cv" else "fixed",
        shape=None if cfg.shape in (None, "cv") else float(cfg.shape),
        n_lambda=cfg.lambda_count,
        min_ratio=cfg.lambda_min_ratio,
        lambda_top=cfg.lambda_max,
    )


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_forecasts_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "hour", "actual", "forecast", "lambda", "shape", "nnz"])
        for r in records:
            writer.writerow([r.day, r.hour, repr(r.actual_price), repr(r.forecast_price),
                             "" if np.isnan(r.chosen_lambda) else repr(r.chosen_lambda),
                             "" if np.isnan(r.chosen_shape) else repr(r.chosen_shape),
                             r.nnz])


def read_forecasts_csv(path):
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(ForecastRecord(
                day=row["date"], hour=int(row["hour"]),
                actual_price=float(row["actual"]), forecast_price=float(row["forecast"]),
                chosen_lambda=float(row["lambda"]) if row["lambda"] else np.nan,
                chosen_shape=float(row["shape"]) if row["shape"] else np.nan,
                nnz=int(row["nnz"])))
    return records


def _cmd_run(args):
    cfg = _resolve_run_config(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)

    panel = load_panel(cfg.data, cfg.market)
    bt = BacktestConfig(
        model=cfg.model, family=cfg.penalty, window_days=cfg.window,
        first_day=cfg.date_from, last_day=cfg.date_to,
        selection=_selection_plan(cfg), reselect_every=cfg.reselect_every,
        per_hour_ecdf=cfg.per_hour_ecdf, jobs=cfg.jobs,
        keep_traces=cfg.dump_candidates)
    result = run_backtest(panel, bt)
    report = result.score()

    write_forecasts_csv(result.records, out / "forecasts.csv")
    write_report(report, out / "score.json")
    write_repair_log(panel, out / "repair_log.jsonl")
    with open(out / "selection_log.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["day", "hour", "lambda", "shape", "nnz", "candidates", "reselected"])
        for e in result.selection_log:
            writer.writerow([e["day"], e["hour"], e["lambda"], e["shape"],
                             e["nnz"], e["candidates"], e["reselected"]])
    if cfg.dump_candidates:
        with open(out / "candidates.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["day", "hour", "shape", "lambda", "score"])
            for e in result.selection_log:
                for shape, lam, cv in e.get("trace", []):
                    writer.writerow([e["day"], e["hour"],
                                     "" if shape is None else shape, lam, cv])

    manifest = {
        "config": {**asdict(cfg), "shape_mode": cfg.shape_mode},
        "package_version": __version__,
        "data_sha256": _sha256(cfg.data),
        "n_records": len(result.records),
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")

    if cfg.figures:
        title = (f"{cfg.market.upper()} {cfg.model} {cfg.penalty} "
                 f"({cfg.select}, shape={cfg.shape})")
        forecast_figure(result.records, title, out / "forecasts.png")

    print(f"{len(result.records)} forecasts, RMSE {report.rmse:.4f} EUR/MWh -> {out}")
    return 0


def _load_run(run_dir):
    run_dir = Path(run_dir)
    try:
        manifest = json.loads((run_dir / "manifest.json").read_text())
        report = json.loads((run_dir / "score.json").read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"{run_dir} is not a completed run: {exc}") from None
    return manifest, report


def _cmd_compare(args):
    if len(args.runs) < 2:
        raise ConfigError("compare needs at least two run directories")
    loaded = [_load_run(d) for d in args.runs]
    ranges = {(rep["first_day"], rep["last_day"], rep["n_days"]) for _, rep in loaded}
    if len(ranges) != 1:
        raise ConfigError(f"runs cover different forecast ranges: {sorted(ranges)}")

    baselines = {}
    for manifest, rep in loaded:
        c = manifest["config"]
        if c["penalty"] == "ols":
            baselines[(c["market"], c["model"])] = rep["rmse"]

    rows = []
    for manifest, rep in loaded:
        c = manifest["config"]
        key = (c["market"], c["model"])
        row = {"market": c["market"], "model": c["model"], "family": c["penalty"],
               "selection": c["select"], "shape_mode": c["shape_mode"],
               "rmse": rep["rmse"], "rrmse_vs_ols": None}
        if c["penalty"] != "ols":
            if key not in baselines:
                raise ConfigError(
                    f"no OLS baseline run for market={key[0]} model={key[1]}")
            base = ScoreReport(rmse=baselines[key], n_days=rep["n_days"],
                               first_day=rep["first_day"], last_day=rep["last_day"])
            this = ScoreReport(rmse=rep["rmse"], n_days=rep["n_days"],
                               first_day=rep["first_day"], last_day=rep["last_day"])
            row["rrmse_vs_ols"] = rrmse(this, base)
        rows.append(row)
    rows.sort(key=lambda r: (r["rrmse_vs_ols"] is not None,
                             r["rrmse_vs_ols"] if r["rrmse_vs_ols"] is not None else 0.0))

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "comparison.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["market", "model", "family", "selection", "shape_mode",
                         "rmse", "rrmse_vs_ols"])
        for r in rows:
            writer.writerow([r["market"], r["model"], r["family"], r["selection"],
                             r["shape_mode"], repr(r["rmse"]),
                             "" if r["rrmse_vs_ols"] is None else repr(r["rrmse_vs_ols"])])
    with open(out / "comparison.json", "w") as fh:
        json.dump(rows, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if not args.no_figures:
        comparison_figure(rows, out / "comparison.png")

    for r in rows:
        tail = "baseline" if r["rrmse_vs_ols"] is None else f"{r['rrmse_vs_ols']:+.2f}%"
        print(f"{r['market']:>4} {r['model']:>4} {r['family']:>7} "
              f"{r['selection']:>3}  RMSE {r['rmse']:8.4f}  {tail}")
    return 0


def _cmd_penalty_curves(args):
    out = Path(args.out)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    lam = args.lam
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["family", "shape", "lambda", "beta", "value"])
        for family in FAMILIES:
            if family == "ols":
                continue
            cap = LAMBDA_CAPS.get(family)
            fam_lam = min(lam, cap) if cap is not None else lam
            shapes = SHAPE_GRIDS.get(family, (None,))
            for shape in shapes:
                betas, values = penalty_curve(family, fam_lam, shape,
                                              beta_max=args.beta_max,
                                              points=args.points)
                for b, v in zip(betas, values):
                    writer.writerow([family, "" if shape is None else shape,
                                     fam_lam, repr(float(b)), repr(float(v))])
    print(f"penalty curves -> {out}")
    return 0


def _cmd_synth(args):
    panel = make_panel(market=args.market, n_days=args.days, start=args.start,
                       seed=args.seed)
    save_panel(panel, args.out)
    print(f"{args.days}-day {args.market.upper()} panel -> {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="epfreg", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="rolling-window backtest")
    run.add_argument("--config", help="flat key=value config file")
    run.add_argument("--data", help="input panel CSV")
    run.add_argument("--out", help="output directory")
    run.add_argument("--market", choices=["epex", "omie"])
    run.add_argument("--model", choices=["arx", "farx"])
    run.add_argument("--penalty", choices=list(FAMILIES))
    run.add_argument("--select", choices=["cv", "bic"])
    run.add_argument("--shape", help="shape parameter value, or 'cv' for joint CV")
    run.add_argument("--window", type=int, help="calibration window in days")
    run.add_argument("--from", dest="date_from", help="first forecast day (ISO)")
    run.add_argument("--to", dest="date_to", help="last forecast day (ISO)")
    run.add_argument("--jobs", type=int, help="parallel hourly fits")
    run.add_argument("--seed", type=int, help="recorded in the manifest")
    run.add_argument("--folds", type=int, help="CV folds (default 7)")
    run.add_argument("--lambda-count", type=int, dest="lambda_count",
                     help="points in the lambda grid (default 50)")
    run.add_argument("--lambda-min-ratio", type=float, dest="lambda_min_ratio",
                     help="grid floor as a fraction of lambda_max (default 1e-4)")
    run.add_argument("--lambda-max", type=float, dest="lambda_max",
                     help="override the top of the lambda grid")
    run.add_argument("--reselect-every", type=int, dest="reselect_every",
                     help="re-run tuning selection every k days (default 1)")
    run.add_argument("--per-hour-ecdf", action="store_const", const=True,
                     dest="per_hour_ecdf", help="fit one ECDF per (variable, hour)")
    run.add_argument("--no-figures", action="store_const", const=False,
                     dest="figures", help="skip PNG rendering")
    run.add_argument("--dump-candidates", action="store_const", const=True,
                     dest="dump_candidates", help="write per-candidate CV/BIC scores")
    run.set_defaults(func=_cmd_run)

    cmp_ = sub.add_parser("compare", help="table + figure across finished runs")
    cmp_.add_argument("runs", nargs="+", help="run output directories")
    cmp_.add_argument("--out", required=True, help="output directory")
    cmp_.add_argument("--no-figures", action="store_true")
    cmp_.set_defaults(func=_cmd_compare)

    pc = sub.add_parser("penalty-curves",
                        help="dump (beta, value) samples per family to CSV")
    pc.add_argument("--out", default="penalty_curves.csv")
    pc.add_argument("--lambda", dest="lam", type=float, default=1.0)
    pc.add_argument("--beta-max", dest="beta_max", type=float, default=3.0)
    pc.add_argument("--points", type=int, default=601)
    pc.set_defaults(func=_cmd_penalty_curves)

    sy = sub.add_parser("synth", help="write a synthetic panel CSV")
    sy.add_argument("--out", required=True)
    sy.add_argument("--market", choices=["epex", "omie"], default="epex")
    sy.add_argument("--days", type=int, default=260)
    sy.add_argument("--start", default="2015-01-01")
    sy.add_argument("--seed", type=int, default=0)
    sy.set_defaults(func=_cmd_synth)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error (numeric): {exc}", file=sys.stderr)
        return 4
    except EpfregError as exc:
        print(f"error (data): {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
