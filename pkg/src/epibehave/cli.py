"""
Command-line front end.

    epibehave simulate --model constant --out run/
    epibehave sweep --param beta --from 0.15 --to 7.3 --points 100 --outcome peak
    epibehave endogenous --sandwich --svg

Parameters come from the baseline, then an optional flat JSON config, then
flags. Exit status: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io as eio
from . import svg
from .constant_cost import DEFAULT_HORIZON, DEFAULT_STEP, detect_peak, integrate, reproduction_numbers
from .contact_rate import contact_rate_table, default_alpha
from .endogenous import eta_bounds, sandwich_check, solve_equilibrium
from .errors import AssumptionViolated, DomainError, EpibehaveError
from .onset import behavioral_r0, c_threshold, onset_beta_interval, severity_frontier
from .params import PARAM_KEYS, ModelParams, params_from_mapping, validate
from .phase import PhasePoint, final_size, path_infected, peak_from_phase, phase_residual
from .standard_sir import integrate_standard, standard_final_size, standard_peak
from .sweeps import OUTCOMES, SWEEP_PARAMS, log_grid, sweep

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
MODELS = ("constant", "standard", "endogenous")
PARAM_FLAGS = PARAM_KEYS + ("rho_tilde", "lambda")

# settings that may also come from the config file, with their defaults
SETTINGS = {
    "model": "constant", "horizon": None, "step": DEFAULT_STEP, "early_stop": True,
    "out": ".", "svg": False, "param": "beta", "start": None, "stop": None,
    "points": None, "outcome": "both", "log": False, "tol": 1e-8, "max_iter": 200,
    "relaxation": 1.0, "sandwich": False, "alpha": None,
}
CONFIG_ALIASES = {"from": "start", "to": "stop"}


class InputError(Exception):
    """Bad configuration; maps to exit status 2."""


@dataclass
class ScenarioConfig:
    command: str
    params: ModelParams
    settings: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.settings[name]
        except KeyError:
            raise AttributeError(name) from None


def worker_count(jobs: int) -> int:
    """Worker pool size: EPIBEHAVE_THREADS if set, else the CPU count, at most ``jobs``."""
    env = os.environ.get("EPIBEHAVE_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise InputError(f"EPIBEHAVE_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise InputError("EPIBEHAVE_THREADS must be at least 1")
    else:
        n = os.cpu_count() or 1
    return max(1, min(n, jobs))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON file with parameters and settings")
    common.add_argument("--out", help="output directory (default: current)")
    common.add_argument("--svg", action="store_true", default=None, help="also write a chart")
    for key in PARAM_FLAGS:
        common.add_argument("--" + key.replace("_", "-"), dest=key, type=float, metavar="X")

    integ = argparse.ArgumentParser(add_help=False)
    integ.add_argument("--horizon", type=float, help="days to simulate")
    integ.add_argument("--step", type=float, help="RK4 step in days")
    integ.add_argument("--no-early-stop", dest="early_stop", action="store_false", default=None)

    p = argparse.ArgumentParser(prog="epibehave", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("simulate", parents=[common, integ], help="integrate one scenario")
    s.add_argument("--model", choices=MODELS)
    sub.add_parser("onset", parents=[common], help="takeoff interval and thresholds")
    s = sub.add_parser("frontier", parents=[common], help="severity-transmissibility frontier")
    _grid_flags(s)
    sub.add_parser("peak", parents=[common, integ], help="peak prevalence")
    sub.add_parser("final-size", parents=[common], help="limiting susceptible shares")
    s = sub.add_parser("sweep", parents=[common], help="comparative statics over one parameter")
    s.add_argument("--param", choices=SWEEP_PARAMS)
    s.add_argument("--outcome", choices=OUTCOMES + ("both",))
    _grid_flags(s)
    s = sub.add_parser("endogenous", parents=[common, integ], help="endogenous-cost equilibrium")
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iter", type=int)
    s.add_argument("--relaxation", type=float)
    s.add_argument("--sandwich", action="store_true", default=None,
                   help="compare with the constant-cost paths at the co-state bounds")
    sub.add_parser("phase-check", parents=[common, integ], help="RK4 path vs implicit solution")
    s = sub.add_parser("contact-rate", parents=[common], help="force-of-infection tables")
    s.add_argument("--alpha", type=float, help="saturation level of the Capasso form")
    s.add_argument("--points", type=int)
    return p


def _grid_flags(s: argparse.ArgumentParser) -> None:
    s.add_argument("--from", dest="start", type=float)
    s.add_argument("--to", dest="stop", type=float)
    s.add_argument("--points", type=int)
    s.add_argument("--log", action="store_true", default=None, help="geometric grid")


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise InputError("config must be a flat JSON object")
    data = {CONFIG_ALIASES.get(k, k): v for k, v in data.items()}
    unknown = sorted(set(data) - set(PARAM_FLAGS) - set(SETTINGS))
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    pdata = {k: v for k, v in data.items() if k in PARAM_FLAGS}
    for key in PARAM_FLAGS:
        val = getattr(args, key, None)
        if val is not None:
            pdata[key] = val
    if "rho" in pdata and ("rho_tilde" in pdata or "lambda" in pdata):
        # a flag overrides whichever form the file used
        if getattr(args, "rho", None) is not None:
            pdata.pop("rho_tilde", None)
            pdata.pop("lambda", None)
        else:
            pdata.pop("rho")
    try:
        params = params_from_mapping(pdata)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(str(exc)) from None
    settings = {}
    for key, default in SETTINGS.items():
        val = getattr(args, key, None)
        settings[key] = val if val is not None else data.get(key, default)
    return ScenarioConfig(args.command, params, settings)


def _grid(cfg: ScenarioConfig, lo_default: float, hi_default: float) -> np.ndarray:
    lo = lo_default if cfg.start is None else float(cfg.start)
    hi = hi_default if cfg.stop is None else float(cfg.stop)
    n = 100 if cfg.points is None else int(cfg.points)
    if n < 2:
        raise InputError("a grid needs at least two points")
    if not hi > lo:
        raise InputError("grid must be strictly increasing (--to must exceed --from)")
    if cfg.log:
        if lo <= 0:
            raise InputError("a geometric grid needs positive bounds")
        return log_grid(lo, hi, n)
    return np.linspace(lo, hi, n)


def _horizon(cfg: ScenarioConfig, default: float) -> float:
    return default if cfg.horizon is None else float(cfg.horizon)


class Runner:
    def __init__(self, cfg: ScenarioConfig) -> None:
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.written: list[str] = []

    def write(self, name: str, text: str) -> None:
        eio.write_text(self.out / name, text)
        self.written.append(str(self.out / name))

    # -- subcommands -------------------------------------------------------

    def simulate(self) -> dict:
        cfg, p = self.cfg, self.cfg.params
        if cfg.model == "endogenous":
            return self.endogenous()
        run = integrate_standard if cfg.model == "standard" else integrate
        traj = run(p, _horizon(cfg, DEFAULT_HORIZON), float(cfg.step),
                   early_stop=bool(cfg.early_stop))
        peak = detect_peak(traj)
        self.write("trajectory.csv", eio.trajectory_csv(traj))
        if cfg.svg:
            self.write("trajectory.svg", svg.trajectory_svg(traj, f"{cfg.model} model"))
        rn = reproduction_numbers(traj)
        return {"model": cfg.model, "days": len(traj) - 1,
                "terminated_early": traj.terminated_early,
                "peak": {"t": peak.t_peak, "S": peak.s_peak, "I": peak.i_peak,
                         "took_off": peak.took_off},
                "final": {"S": traj.s[-1], "I": traj.i[-1], "R": traj.r[-1]},
                "r0": rn.r0, "r0_b": rn.r0_b}

    def onset(self) -> dict:
        p = self.cfg.params
        out: dict = {"r0": p.beta * p.s0 / p.gamma, "r0_b": behavioral_r0(p)}
        if p.eta < 0:
            out["interval"] = onset_beta_interval(p).as_dict()
        try:
            out["c_threshold"] = c_threshold(p)
        except EpibehaveError as exc:
            out["c_threshold"] = None
            out["c_threshold_note"] = str(exc)
        return out

    def frontier(self) -> dict:
        p = self.cfg.params
        betas = _grid(self.cfg, p.gamma / p.s0, 1.0)
        fr = severity_frontier(p, betas)
        self.write("frontier.csv", eio.frontier_csv(fr))
        if self.cfg.svg:
            self.write("frontier.svg", svg.render(
                [svg.Series.of(fr.beta, fr.neg_eta, "takeoff frontier")],
                title="Severity-transmissibility frontier", xlabel="beta",
                ylabel="-eta", hline=fr.ceiling, hline_label="ceiling"))
        return {"ceiling": fr.ceiling, "points": len(fr.beta)}

    def peak(self) -> dict:
        p = self.cfg.params
        out: dict = {}
        if p.beta * p.s0 > p.gamma:
            out["standard_peak"] = standard_peak(p)
        if p.eta < 0:
            interval = onset_beta_interval(p)
            out["took_off"] = interval.contains(p.beta)
            if out["took_off"]:
                s, i = peak_from_phase(p)
                out["phase"] = {"S": s, "I": i}
        traj = integrate(p, _horizon(self.cfg, DEFAULT_HORIZON), float(self.cfg.step))
        pk = detect_peak(traj)
        out["integrated"] = {"t": pk.t_peak, "S": pk.s_peak, "I": pk.i_peak,
                             "took_off": pk.took_off}
        return out

    def final_size(self) -> dict:
        p = self.cfg.params
        out = {"herd_threshold": p.gamma / p.beta,
               "lower_bound": p.s0 * math.exp(-p.beta / p.gamma),
               "standard": standard_final_size(p)}
        out["behavioral"] = final_size(p) if p.eta < 0 else out["standard"]
        return out

    def sweep(self) -> dict:
        cfg, p = self.cfg, self.cfg.params
        name = cfg.param
        if name not in SWEEP_PARAMS:
            raise InputError(f"cannot sweep {name!r}; choose from {SWEEP_PARAMS}")
        outcomes = OUTCOMES if cfg.outcome == "both" else (cfg.outcome,)
        if cfg.outcome not in OUTCOMES + ("both",):
            raise InputError(f"unknown outcome {cfg.outcome!r}")
        lo, hi = _default_range(p, name)
        grid = _grid(cfg, lo, hi)
        table = sweep(p, name, grid, outcomes, worker_count(len(grid)))
        self.write("sweep.csv", eio.sweep_csv(table))
        if cfg.svg:
            if "peak" in outcomes:
                self.write("sweep_peak.svg", svg.sweep_svg(table, "i_peak", "Peak prevalence"))
            if "final_size" in outcomes:
                self.write("sweep_final_size.svg", svg.sweep_svg(
                    table, "s_inf", "Final susceptible share", reference="herd_threshold"))
        errors = [{"value": r.value, "error": r.error} for r in table.rows if r.error]
        return {"param": name, "points": len(table.rows), "outcomes": list(outcomes),
                "row_errors": errors}

    def endogenous(self) -> dict:
        cfg, p = self.cfg, self.cfg.params
        traj, co = solve_equilibrium(p, _horizon(cfg, DEFAULT_HORIZON), float(cfg.tol),
                                     int(cfg.max_iter), float(cfg.relaxation), float(cfg.step))
        bounds = eta_bounds(p)
        self.write("equilibrium.csv", eio.equilibrium_csv(traj, co))
        self.write("convergence.json", eio.json_text(co.convergence_log()))
        pk = detect_peak(traj)
        out = {"converged": co.converged, "iterations": co.iterations, "final_gap": co.final_gap,
               "eta_bounds": {"lo": bounds.lo, "hi": bounds.hi, "hi_general": bounds.hi_general},
               "eta_range": [float(co.eta.min()), float(co.eta.max())],
               "eta_terminal": float(co.eta[-1]), "days": len(traj) - 1,
               "peak": {"t": pk.t_peak, "S": pk.s_peak, "I": pk.i_peak},
               "final_S": traj.s[-1], "final_p": co.p[-1]}
        if cfg.sandwich:
            rep = sandwich_check(p, solution=(traj, co))
            out["sandwich"] = {"paths_ordered": rep.paths_ordered,
                               "peaks_ordered": rep.peaks_ordered,
                               "max_violation": rep.max_violation,
                               "peaks": [rep.peak_lo, rep.peak_endog, rep.peak_hi]}
            if cfg.svg:
                self.write("sandwich.svg", svg.phase_svg(
                    [(rep.s, rep.i_lo, "constant, eta_lo"), (rep.s, rep.i_endog, "endogenous"),
                     (rep.s, rep.i_hi, "constant, eta_hi")], "Solution paths"))
        if cfg.svg:
            self.write("equilibrium.svg", svg.trajectory_svg(traj, "Endogenous-cost equilibrium"))
        return out

    def phase_check(self) -> dict:
        cfg, p = self.cfg, self.cfg.params
        if not p.eta < 0:
            raise InputError("phase-check needs eta < 0")
        traj = integrate(p, _horizon(cfg, DEFAULT_HORIZON), float(cfg.step))
        res = np.array([phase_residual(PhasePoint(s, i), p) for s, i in zip(traj.s, traj.i)])
        k = int(np.argmax(np.abs(res)))
        if cfg.svg:
            s_grid = np.linspace(traj.s.min(), p.s0, 300)
            self.write("phase.svg", svg.phase_svg(
                [(s_grid, [path_infected(float(v), p) for v in s_grid], "with behavior"),
                 (s_grid, [path_infected(float(v), p.with_(eta=0.0)) for v in s_grid],
                  "without behavior")], "Solution paths"))
        return {"points": len(res), "max_abs_residual": float(abs(res[k])), "at_day": float(traj.t[k])}

    def contact_rate(self) -> dict:
        cfg, p = self.cfg, self.cfg.params
        alpha = default_alpha(p) if cfg.alpha is None else float(cfg.alpha)
        n = 1001 if cfg.points is None else int(cfg.points)
        cols = contact_rate_table(p, alpha, n)
        self.write("contact_rate.csv", eio.contact_csv(cols))
        if cfg.svg:
            self.write("contact_rate.svg", svg.render(
                [svg.Series.of(cols["I"], cols["g_quadratic"], "quadratic cost"),
                 svg.Series.of(cols["I"], cols["g_capasso"], "Capasso-Serio")],
                title="Force of infection", xlabel="I", ylabel="g(I)"))
        return {"alpha": alpha, "points": n}


def _default_range(p: ModelParams, name: str) -> tuple[float, float]:
    if name == "beta":
        if p.eta < 0:
            iv = onset_beta_interval(p)
            if not iv.empty:
                return iv.beta_lo * 1.02, iv.beta_hi * 0.98
        return p.gamma / p.s0 * 1.02, 1.0
    if name == "c":
        try:
            return c_threshold(p) * 1.05, 20.0
        except EpibehaveError:
            return 0.1, 20.0
    if name == "eta":
        return -5000.0, -1.0
    return 1e-6, 1e-3


COMMANDS = {"simulate": Runner.simulate, "onset": Runner.onset, "frontier": Runner.frontier,
            "peak": Runner.peak, "final-size": Runner.final_size, "sweep": Runner.sweep,
            "endogenous": Runner.endogenous, "phase-check": Runner.phase_check,
            "contact-rate": Runner.contact_rate}


def _emit(report: dict, stream) -> None:
    stream.write(eio.json_text(report))


def run(cfg: ScenarioConfig, stdout=None, stderr=None) -> int:
    """Execute ``cfg`` and return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    runner = Runner(cfg)
    endogenous = cfg.command == "endogenous" or (cfg.command == "simulate" and cfg.model == "endogenous")
    if cfg.command == "simulate" and cfg.model not in MODELS:
        _emit({"status": "invalid", "errors": [f"unknown model {cfg.model!r}"]}, stderr)
        return EXIT_INVALID
    report = validate(cfg.params, endogenous=endogenous)
    if not report.ok:
        _emit({"status": "invalid", "errors": list(report)}, stderr)
        return EXIT_INVALID
    try:
        result = COMMANDS[cfg.command](runner)
    except (InputError, AssumptionViolated) as exc:
        _emit({"status": "invalid", "errors": [str(exc)]}, stderr)
        return EXIT_INVALID
    except (EpibehaveError, ArithmeticError, ValueError) as exc:
        diag = {"status": "numerical_failure", "error": type(exc).__name__, "message": str(exc),
                "params": cfg.params.as_dict()}
        for attr in ("diagnostics", "gap_history", "s"):
            if hasattr(exc, attr):
                diag[attr] = getattr(exc, attr)
        if isinstance(exc, DomainError):
            diag["status"] = "domain_error"
        eio.write_text(runner.out / "diagnostics.json", eio.json_text(diag))
        _emit(diag, stderr)
        return EXIT_NUMERIC
    result = {"status": "ok", "command": cfg.command, "params": cfg.params.as_dict(),
              **result, "files": runner.written}
    runner.write(f"{cfg.command}.json", eio.json_text(result))
    _emit(result, stdout)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args)
    except InputError as exc:
        _emit({"status": "invalid", "errors": [str(exc)]}, sys.stderr)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
