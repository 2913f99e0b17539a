"""``taxcast`` command-line interface.

Exit codes: 0 success, 1 domain error (or a failing reproduction check),
2 usage error. Errors print one line ``error:<code>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import reproduce
from .accuracy import compare_models
from .arima import acf, fit_arima, forecast, pacf, rank_orders
from .causality import granger_test
from .errors import ConfigurationError, TaxcastError
from .io import Dataset, build_spec, dumps, file_digest, load_csv, load_scenario, write_plot_csv
from .scenario import fit_scenario, project, screen_drivers, summarize_growth
from .series import difference
from .stationarity import DETERMINISTIC, AdfSpec, adf_test


@dataclass
class RunReport:
    command: list[str]
    seed: int
    input_digests: dict[str, str] = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_triple(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return parts


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--data", help="SERIES CSV file")
    common.add_argument("--json", action="store_true", help="print the full JSON report")
    common.add_argument("--seed", type=int, default=42, help="master seed for Monte-Carlo work")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for grid searches")
    common.add_argument("--emit-plot", metavar="PATH", help="write tidy plot CSV")

    p = _Parser(prog="taxcast", description="Annual tax-revenue forecasting toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("adf", parents=[common], help="augmented Dickey-Fuller test")
    s.add_argument("--series", required=True)
    s.add_argument("--det", choices=DETERMINISTIC, default="constant")
    s.add_argument("--max-lag", type=int)
    s.add_argument("--lag-selection", choices=("aic", "fixed"), default="aic")
    s.add_argument("--diff", type=int, default=0, help="difference this many times first")

    s = sub.add_parser("acf", parents=[common], help="sample ACF and PACF")
    s.add_argument("--series", required=True)
    s.add_argument("--max-lag", type=int, default=10)
    s.add_argument("--diff", type=int, default=0)

    s = sub.add_parser("fit-arima", parents=[common], help="fit or select an ARIMA model")
    s.add_argument("--series", required=True)
    s.add_argument("--order", type=_int_triple, help="p,d,q")
    s.add_argument("--select", type=_int_triple, metavar="PMAX,D,QMAX", help="AIC grid search")

    s = sub.add_parser("forecast", parents=[common], help="ARIMA point forecasts")
    s.add_argument("--series", required=True)
    s.add_argument("--order", type=_int_triple, default=(1, 1, 1), help="p,d,q")
    s.add_argument("--horizon", type=int, default=3)
    s.add_argument("--until", type=int, help="last historical year to use")

    s = sub.add_parser("granger", parents=[common], help="Granger-causality F-test")
    s.add_argument("--cause", required=True)
    s.add_argument("--effect", required=True)
    s.add_argument("--max-lag", type=int, default=1)
    s.add_argument("--diff", type=int, default=1)

    s = sub.add_parser("evaluate", parents=[common], help="compare forecast accuracy")
    s.add_argument("--actual", required=True)
    s.add_argument("--pred", required=True, nargs="+")
    s.add_argument("--horizon", type=int, default=1)
    s.add_argument("--loss", choices=("squared", "absolute"), default="squared")
    s.add_argument("--small-sample", action="store_true", help="Harvey correction for DM")

    s = sub.add_parser("scenario", parents=[common], help="screen, fit and project a scenario")
    s.add_argument("--scenario", required=True, help="scenario key=value file")
    s.add_argument("--max-lag", type=int, default=1)
    s.add_argument("--no-screen", action="store_true")
    s.add_argument("--drop-noncausal", action="store_true", help="drop drivers failing the screen")
    s.add_argument("--growth-base", choices=("fitted", "actual"), default="fitted")

    s = sub.add_parser("reproduce-paper", parents=[common], help="check the published results")
    s.add_argument("--properties", action="store_true", help="also run the Monte-Carlo checks")
    s.add_argument("--full-data", metavar="CSV", help="official 1995-2019 PIT and VAT series")
    return p


def _dataset(args, report: RunReport) -> Dataset:
    if not args.data:
        raise ConfigurationError("--data is required for this command")
    data = load_csv(args.data)
    report.input_digests[args.data] = file_digest(args.data)
    return data


def _cmd_adf(args, report):
    s = difference(_dataset(args, report)[args.series], args.diff)
    res = adf_test(s, AdfSpec(args.det, args.max_lag, args.lag_selection))
    report.results = {
        "series": args.series, "diff": args.diff, "tau_stat": res.tau_stat,
        "chosen_lag": res.chosen_lag, "n_effective": res.n_effective,
        "critical_values": res.critical_values, "reject_at": res.reject_at,
    }
    return [
        f"ADF {args.series} (d={args.diff}, {args.det}): tau={res.tau_stat:.4f} lag={res.chosen_lag} n={res.n_effective}",
        *(f"  {k:>4}: cv={v:.4f} reject={res.reject_at[k]}" for k, v in res.critical_values.items()),
    ]


def _cmd_acf(args, report):
    s = difference(_dataset(args, report)[args.series], args.diff)
    a, pa = acf(s, args.max_lag), pacf(s, args.max_lag)
    report.results = {"series": args.series, "acf": a, "pacf": pa}
    lines = [f"{'lag':>4} {'acf':>9} {'pacf':>9} {'band':>7}"]
    lines += [f"{x.lag:>4} {x.value:>9.4f} {y.value:>9.4f} {x.conf_band:>7.4f}" for x, y in zip(a, pa)]
    return lines


def _model_payload(m):
    return {
        "order": list(m.order), "ar": m.ar_coeffs, "ma": m.ma_coeffs, "intercept": m.intercept,
        "sigma2": m.sigma2, "log_css": m.log_css, "aic": m.aic, "n_obs": m.n_obs,
    }


def _cmd_fit_arima(args, report):
    s = _dataset(args, report)[args.series]
    lines = []
    if args.select:
        if len(args.select) != 3:
            raise UsageError("--select takes PMAX,D,QMAX")
        p_max, d, q_max = args.select
        ranked = rank_orders(s, p_max, d, q_max, jobs=args.jobs)
        report.results["ranking"] = ranked
        lines += [f"  ({c.p},{d},{c.q}) aic={c.aic:.4f}" for c in ranked[:5]]
        order = (ranked[0].p, d, ranked[0].q)
    elif args.order:
        order = args.order
    else:
        raise UsageError("give --order or --select")
    if len(order) != 3:
        raise UsageError("--order takes p,d,q")
    m = fit_arima(s, *order)
    report.results["model"] = _model_payload(m)
    lines.insert(0, f"ARIMA{order}: ar={np.round(m.ar_coeffs, 6)} ma={np.round(m.ma_coeffs, 6)} "
                    f"intercept={m.intercept:.6g} sigma2={m.sigma2:.6g} aic={m.aic:.4f}")
    if args.emit_plot:
        write_plot_csv(args.emit_plot, [(args.series, "actual", s)])
    return lines


def _cmd_forecast(args, report):
    s = _dataset(args, report)[args.series]
    if args.until is not None:
        s = s.window(s.start_year, args.until)
    if len(args.order) != 3:
        raise UsageError("--order takes p,d,q")
    m = fit_arima(s, *args.order)
    fc = forecast(m, s, args.horizon)
    report.results = {"model": _model_payload(m), "forecast": fc.to_dict()}
    if args.emit_plot:
        write_plot_csv(args.emit_plot, [(args.series, "actual", s), (args.series, "forecast", fc)])
    return [f"ARIMA{tuple(args.order)} forecast for {args.series}:"] + [
        f"  {y}: {v:.6g}" for y, v in fc.to_dict().items()
    ]


def _cmd_granger(args, report):
    data = _dataset(args, report)
    x = difference(data[args.cause], args.diff)
    y = difference(data[args.effect], args.diff)
    res = granger_test(x, y, args.max_lag, names=(args.cause, args.effect))
    report.results = {"granger": res, "causal_at_5pct": res.causal_at_5pct}
    t = res.f_test
    return [f"{args.cause} -> {args.effect} (lags={args.max_lag}, d={args.diff}): "
            f"F={t.f_stat:.4f} df=({t.df_num},{t.df_den}) p={t.p_value:.4g} causal={res.causal_at_5pct}"]


def _cmd_evaluate(args, report):
    data = _dataset(args, report)
    actual = data[args.actual]
    preds = {name: data[name] for name in args.pred}
    cmp = compare_models(actual, preds, args.horizon, args.loss, args.small_sample)
    report.results = {"reports": cmp.reports, "ranking": cmp.ranking, "dm": cmp.dm}
    lines = [f"{'model':<16}" + "".join(f"{k:>12}" for k in ("me", "rmse", "mae", "mape", "smape", "theil_u1"))]
    for name in cmp.ranking:
        r = cmp.reports[name]
        lines.append(f"{name:<16}" + "".join(f"{getattr(r, k):>12.5g}" for k in ("me", "rmse", "mae", "mape", "smape", "theil_u1")))
    for (a, b), r in cmp.dm.items():
        lines.append(f"DM {a} vs {b}: stat={r.dm_stat:.4f} p={r.p_value:.4g}")
    return lines


def _cmd_scenario(args, report):
    sf = load_scenario(args.scenario)
    report.input_digests[args.scenario] = file_digest(args.scenario)
    if args.data:
        sf.data = args.data
    if not sf.data:
        raise ConfigurationError("no data: pass --data or set data= in the scenario file")
    data = load_csv(sf.data)
    report.input_digests[sf.data] = file_digest(sf.data)
    spec = build_spec(sf, data)

    screen = {}
    if not args.no_screen:
        try:
            screen = screen_drivers(spec, args.max_lag)
        except TaxcastError as exc:
            report.warnings.append(f"driver screening skipped: {exc.code}: {exc}")
    dropped = [n for n, r in screen.items() if not r.causal_at_5pct]
    if args.drop_noncausal and dropped:
        keep = [(n, s) for n, s in spec.drivers if n not in dropped]
        if not keep:
            raise ConfigurationError("every driver failed the Granger screen")
        from dataclasses import replace

        spec = replace(spec, drivers=keep)
        report.warnings.append(f"dropped non-causal drivers: {', '.join(dropped)}")
    fit = fit_scenario(spec)
    fc = project(spec, fit, screen)
    summary = summarize_growth(fc, args.growth_base)
    report.results = {
        "target": spec.target_name,
        "coefficients": dict(zip(fit.column_names, fit.beta)),
        "r_squared": fit.r_squared,
        "in_sample_predicted": fc.in_sample_predicted.to_dict(),
        "residuals": fc.residuals.to_dict(),
        "projected": fc.projected_levels.to_dict(),
        "driver_levels": {k: v.to_dict() for k, v in fc.driver_levels.items()},
        "granger_screen": {
            k: {"p_value": r.f_test.p_value, "causal_at_5pct": r.causal_at_5pct} for k, r in screen.items()
        },
        "growth": summary,
    }
    if args.emit_plot:
        write_plot_csv(args.emit_plot, [
            (spec.target_name, "actual", fc.actual),
            (spec.target_name, "fitted", fc.in_sample_predicted),
            (spec.target_name, "forecast", fc.projected_levels),
        ])
    lines = [f"{spec.target_name} ~ " + " + ".join(f"{b:.6g}*{n}" for n, b in zip(fit.column_names, fit.beta))
             + f"  (R2={fit.r_squared:.4f})"]
    for n, r in screen.items():
        lines.append(f"  screen {n}: p={r.f_test.p_value:.4g} causal={r.causal_at_5pct}")
    for y, v in fc.projected_levels.to_dict().items():
        lines.append(f"  {y}: {v:.6g} ({summary.yearly[y]:+.2%})")
    lines.append(f"  cumulative vs {summary.base_year} ({args.growth_base}): {summary.cumulative:+.2%}")
    return lines


def _cmd_reproduce(args, report):
    if args.full_data:
        report.input_digests[args.full_data] = file_digest(args.full_data)
    checks = reproduce.run_all(args.seed, args.properties, args.full_data)
    report.results = {"checks": checks, "all_passed": all(c.passed is not False for c in checks)}
    return [reproduce.format_table(checks)]


COMMANDS = {
    "adf": _cmd_adf,
    "acf": _cmd_acf,
    "fit-arima": _cmd_fit_arima,
    "forecast": _cmd_forecast,
    "granger": _cmd_granger,
    "evaluate": _cmd_evaluate,
    "scenario": _cmd_scenario,
    "reproduce-paper": _cmd_reproduce,
}


def run_command(argv: list[str]) -> tuple[RunReport | None, int, list[str]]:
    """Run one command; returns (report, exit code, human-readable lines)."""
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return None, 2, [f"error:usage: {exc}"]
    report = RunReport(command=list(argv), seed=args.seed)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            lines = COMMANDS[args.command](args, report)
        report.warnings += [str(w.message) for w in caught]
    except UsageError as exc:
        return None, 2, [f"error:usage: {exc}"]
    except TaxcastError as exc:
        return report, 1, [f"error:{exc.code}: {exc}"]
    except (ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        return report, 1, [f"error:invalid-value: {msg}"]
    except OSError as exc:
        return report, 1, [f"error:io: {exc}"]
    code = 0
    if args.command == "reproduce-paper" and not report.results["all_passed"]:
        code = 1
    return report, code, lines


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    report, code, lines = run_command(argv)
    if report is None or lines and lines[0].startswith("error:"):
        print("\n".join(lines), file=sys.stderr)
        return code
    if "--json" in argv:
        print(dumps(report))
    else:
        print("\n".join(lines))
        for w in report.warnings:
            print(f"warning: {w}")
    return code


if __name__ == "__main__":
    sys.exit(main())
