"""Command-line front end: ``cascadelab <experiment> [flags]`` or ``cascadelab run CONFIG``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import __version__
from .config import BREAKTIME_PRESET, EXPERIMENTS, ConfigError, RunConfig, file_keys, parse_value
from .core import ModeError, ModelError, ScenarioInvalid
from .resultio import ResultTable, render_csv, render_json, write_table

# convenience flags and the config keys they set
FLAG_KEYS = {
    "seed": "seed",
    "reps": "sim.n_reps",
    "horizon": "sim.horizon",
    "mode": "sim.mode",
    "theta": "sim.theta",
    "history_file": "sim.history_file",
    "LU": "value.L_U",
    "LE": "value.L_E",
    "delta": "breaktime.delta",
    "pstar": "breaktime.p_star",
    "q": "benchmarks.q",
    "qhat": "benchmarks.qhat",
    "target": "sweep.target",
    "out": "output.path",
    "format": "output.format",
}


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML run configuration")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key, e.g. --set model.q0=0.65")
    p.add_argument("--seed", type=int)
    p.add_argument("--reps", type=int, help="number of paths (sim.n_reps)")
    p.add_argument("--horizon", type=int)
    p.add_argument("--mode", choices=["perfect", "imperfect"])
    p.add_argument("--theta", type=int, choices=[0, 1])
    p.add_argument("--history-file", dest="history_file")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cascadelab", description=__doc__)
    ap.add_argument("--version", action="version", version=f"cascadelab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the experiment named in a config file or recorded in a result file")
    run.add_argument("config_path")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    for name in EXPERIMENTS:
        p = sub.add_parser(name)
        _add_common(p)
        if name in ("value", "subsidy"):
            p.add_argument("--LU", type=float)
            p.add_argument("--LE", type=float)
        if name == "breaktime":
            p.add_argument("--delta", type=float)
            p.add_argument("--pstar", type=float)
            p.add_argument("--strict", action="store_true", default=None,
                           help="exit 2 on any violation of the maintained hypotheses")
        if name == "benchmarks":
            p.add_argument("--q", type=float)
            p.add_argument("--qhat", type=float)
        if name == "sweep":
            p.add_argument("--target")
            p.add_argument("--grid", help="comma-separated grid values")
    return ap


def _parse_sets(items) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(item, "expected KEY=VALUE")
        k, v = item.split("=", 1)
        out[k.strip()] = parse_value(v.strip())
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    if args.command == "run":
        if args.config_path.endswith((".csv", ".json")):
            rc = config_from_result(args.config_path)
        else:
            rc = RunConfig.from_file(args.config_path)
        return rc.with_overrides(_parse_sets(args.set)) if args.set else rc
    rc = RunConfig.from_file(args.config) if args.config else RunConfig.from_mapping({})
    over: dict = {"experiment": args.command}
    for flag, key in FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            over[key] = v
    if getattr(args, "strict", None):
        over["breaktime.strict"] = True
    if getattr(args, "grid", None):
        over["sweep.grid"] = [parse_value(g) for g in args.grid.split(",")]
    over.update(_parse_sets(args.set))
    rc = rc.with_overrides(over)
    if args.command == "breaktime" and rc.get("sim.history") is None and rc.get("sim.history_file") is None:
        # no forced prefix: fill in the built-in scenario, explicit settings win
        explicit = set(over) | (file_keys(args.config) if args.config else set())
        preset = {k: v for k, v in BREAKTIME_PRESET.items() if k not in explicit}
        rc = rc.with_overrides(preset)
    return rc


def metadata(rc: RunConfig) -> dict:
    cfg = rc.resolved()
    # where the file was written is not part of the experiment
    cfg.get("output", {}).pop("path", None)
    return {"experiment": rc.experiment, "seed": rc.seed, "version": __version__, "config": cfg}


def config_from_result(path) -> RunConfig:
    """Rebuild the run configuration recorded in a result file."""
    from .resultio import read_table

    try:
        meta = read_table(path).metadata
    except (OSError, ValueError, KeyError, StopIteration) as exc:
        raise ConfigError("config", f"cannot read result metadata from {path}: {exc}") from None
    if "config" not in meta:
        raise ConfigError("config", f"{path} has no recorded configuration")
    return RunConfig.from_mapping(meta["config"], str(path))


# ---------------------------------------------------------------- experiments


def exp_simulate(rc: RunConfig):
    from .dynamics import simulate_path
    from .rng import PathStream

    cfg = rc.sim_config()
    cols = ["rep", "theta", "t", "a", "e", "y", "cost", "delta_v", "L_U", "L_E", "w"]
    rows = []
    offset = len(cfg.initial_history)
    for rep in range(cfg.n_reps):
        res = simulate_path(cfg, PathStream(cfg.seed, rep))
        for i in range(len(res.actions)):
            st = res.beliefs.states[i]
            rows.append([rep, res.theta, offset + i + 1, res.actions[i], res.educations[i], res.tags[i],
                         res.costs[i], res.delta_v[i], st.L_U, st.L_E, res.welfare[i]])
    return ResultTable(cols, rows, metadata(rc)), []


def exp_value(rc: RunConfig):
    from .decision import value_of_education

    p, cm = rc.model_params(), rc.cost_model()
    L_U, L_E = float(rc.get("value.L_U")), float(rc.get("value.L_E"))
    vb = value_of_education(L_U, L_E, p)
    cols = ["L_U", "L_E", "acc_educated", "acc_uneducated", "delta_v", "case", "dominance_U", "dominance_E", "p_edu"]
    row = [L_U, L_E, vb.acc_educated, vb.acc_uneducated, vb.delta_v, vb.case_label.value,
           str(vb.dominance_U), str(vb.dominance_E), cm.education_probability(vb.delta_v)]
    lines = [f"delta_v = {vb.delta_v:.12g}", f"case = {vb.case_label.value}"]
    return ResultTable(cols, [row], metadata(rc)), lines


def exp_benchmarks(rc: RunConfig):
    from .benchmarks import benchmark_stopping_batch, fosd_report

    p = rc.model_params()
    b = rc.section("benchmarks")
    theta, mu0 = int(b["theta"]), float(b.get("mu0", p.mu0))
    n = int(rc.get("sim.n_reps"))
    try:
        out = benchmark_stopping_batch(theta, float(b["q"]), float(b["qhat"]), mu0, int(b["horizon"]), n,
                                       rc.seed, full_horizon=True)
    except ModelError as exc:
        raise ConfigError("benchmarks", str(exc)) from None
    cols = ["rep", "theta", "tau_R", "tau_N", "L_R_final", "L_N_final"]
    rows = [[i, theta, int(out["tau_R"][i]), int(out["tau_N"][i]), float(out["L_R"][i]), float(out["L_N"][i])]
            for i in range(n)]
    lines = []
    try:
        rep = fosd_report(out["tau_N"], out["tau_R"])
        lines.append(f"fosd max_violation = {rep.max_violation:.6g} over {rep.n_used} paired paths")
    except ModelError as exc:
        lines.append(f"fosd unavailable: {exc}")
    return ResultTable(cols, rows, metadata(rc)), lines


def _kv_table(rc: RunConfig, d: dict) -> ResultTable:
    return ResultTable(["key", "value"], [[k, v] for k, v in d.items()], metadata(rc))


def exp_breaktime(rc: RunConfig):
    from .dynamics import break_time_experiment

    cfg = rc.sim_config()
    bt = rc.section("breaktime")
    try:
        rep = break_time_experiment(cfg, float(bt["delta"]), float(bt["p_star"]), strict=bool(bt["strict"]))
    except ModelError as exc:
        raise ConfigError("breaktime", str(exc)) from None
    d = rep.as_dict()
    lines = [
        f"bound = {rep.bound:.5g}",
        f"mean_break_time = {rep.mean_break_time:.6g} (se {rep.mean_break_time_se:.3g})",
        f"rate = {rep.rate:.6g} (se {rep.rate_se:.3g}), floor = {rep.floor:.6g}",
        f"paths = {rep.n}, broken = {rep.n_broken}, violated = {rep.n_violated}",
    ]
    return _kv_table(rc, d), lines


def exp_welfare(rc: RunConfig):
    from .welfare import welfare_comparison

    cfg = rc.sim_config()
    cmp_ = welfare_comparison(cfg, cfg.subsidy_rule)
    d = {}
    for tag, est in (("base", cmp_.base), ("policy", cmp_.policy)):
        for k, v in est.as_dict().items():
            d[f"{tag}_{k}"] = v
    d["gain"] = cmp_.gain
    d["gain_se"] = cmp_.gain_se
    lines = [f"W(none) = {cmp_.base.W:.6g}", f"W(policy) = {cmp_.policy.W:.6g}",
             f"gain = {cmp_.gain:.6g} (se {cmp_.gain_se:.3g})"]
    return _kv_table(rc, d), lines


def exp_subsidy(rc: RunConfig):
    from .decision import flip_probability, is_incorrect_cascade, value_of_education
    from .welfare import myopic_subsidy, static_welfare_gain, target_break_subsidy

    p, cm = rc.model_params(), rc.cost_model()
    L_U, L_E = float(rc.get("value.L_U")), float(rc.get("value.L_E"))
    vb = value_of_education(L_U, L_E, p)
    sec = rc.section("subsidy")
    eta = float(sec.get("eta", p.eta))
    d = {"L_U": L_U, "L_E": L_E, "delta_v": vb.delta_v, "case": vb.case_label.value}
    try:
        s_star = myopic_subsidy(vb.delta_v, vb.delta_v, eta, cm.fbar_effective)
    except ModelError as exc:
        raise ConfigError("subsidy.eta", str(exc)) from None
    d["myopic_s"] = s_star
    d["gain_none"] = static_welfare_gain(vb.delta_v, vb.delta_v, eta, cm)
    d["gain_myopic"] = static_welfare_gain(vb.delta_v, vb.delta_v, eta, cm, s_star)
    if is_incorrect_cascade(L_U, L_E, p):
        p_star = float(sec.get("p_star", flip_probability(L_U, L_E, p)))
        pi_bar = float(sec.get("pi_bar", 0.5 * p_star))
        try:
            d["target_break_s"] = target_break_subsidy(pi_bar, p_star, vb.delta_v, cm)
        except ModelError as exc:
            raise ConfigError("subsidy.pi_bar", str(exc)) from None
    lines = [f"delta_v = {vb.delta_v:.12g}", f"myopic subsidy = {s_star:.12g}"]
    return _kv_table(rc, d), lines


def _grid(rc: RunConfig) -> list:
    import numpy as np

    sw = rc.section("sweep")
    if "grid" in sw:
        return [float(g) for g in sw["grid"]]
    if all(k in sw for k in ("start", "stop", "num")):
        return [float(g) for g in np.linspace(float(sw["start"]), float(sw["stop"]), int(sw["num"]))]
    raise ConfigError("sweep.grid", "give sweep.grid or sweep.start/stop/num")


def exp_sweep(rc: RunConfig):
    from .statics import SweepSpec, kappa_sweep, sweep

    p, cm = rc.model_params(), rc.cost_model()
    try:
        spec = SweepSpec(str(rc.get("sweep.target")), tuple(_grid(rc)), p, rc.history())
        if spec.target == "kappa0":
            pts = kappa_sweep(spec, cm, bool(rc.get("sweep.hold_educated_llr")))
        else:
            pts = sweep(spec, cm)
    except ModelError as exc:
        raise ConfigError("sweep", str(exc)) from None
    cols = ["grid_value", "delta_v", "case", "dominance_U", "jump_flag", "jump"]
    rows = [[pt.grid_value, pt.delta_v, pt.case_label.value, pt.dominance_U, int(pt.jump_flag), pt.jump]
            for pt in pts]
    return ResultTable(cols, rows, metadata(rc)), []


def exp_earlytable(rc: RunConfig):
    from .statics import early_values_table

    try:
        table = early_values_table(rc.model_params(), rc.cost_model())
    except ModelError as exc:
        raise ConfigError("model.mu0", str(exc)) from None
    cols = ["t", "prefix", "closed_form", "pipeline", "gap", "p_edu"]
    rows = [[r.t, r.prefix, r.closed_form, r.pipeline, r.gap, r.p_edu] for r in table]
    return ResultTable(cols, rows, metadata(rc)), [f"prefixes = {len(rows)}, max gap = {max(r[4] for r in rows):.3g}"]


RUNNERS = {
    "simulate": exp_simulate,
    "value": exp_value,
    "benchmarks": exp_benchmarks,
    "breaktime": exp_breaktime,
    "welfare": exp_welfare,
    "subsidy": exp_subsidy,
    "sweep": exp_sweep,
    "earlytable": exp_earlytable,
}

# experiments whose main product is a summary rather than a table
SUMMARY_FIRST = {"value", "breaktime", "welfare", "subsidy"}


def execute(rc: RunConfig, stdout=None) -> ResultTable:
    stdout = stdout or sys.stdout
    table, lines = RUNNERS[rc.experiment](rc)
    path, fmt = rc.get("output.path"), rc.get("output.format")
    if path:
        write_table(table, path, fmt)
    if rc.experiment in SUMMARY_FIRST or path:
        for line in lines:
            print(line, file=stdout)
    if not path:
        if rc.experiment in SUMMARY_FIRST and fmt == "csv":
            return table
        stdout.write(render_json(table) if fmt == "json" else render_csv(table))
        for line in lines:
            print("# " + line, file=sys.stderr)
    return table


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = resolve_config(args)
        execute(rc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ScenarioInvalid as exc:
        print(f"scenario invalid: {exc}", file=sys.stderr)
        return 2
    except (ModelError, ModeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
