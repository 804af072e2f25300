"""Command line front end: run experiments, solve AREs, check feasibility.

Subcommands: ``run`` simulates a configured experiment and writes the trace
as semicolon-separated CSV; ``riccati`` reports each model's stationary
solution; ``check`` verifies gamma-feasibility over the whole horizon.

Exit codes: 0 success, 1 solver failed to converge, 2 bad configuration
(message names the field), 3 gamma-infeasibility (message reports
lambda_max(H P H^T) and gamma^2).  Failures always write diagnostics to
standard error.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import riccati as _riccati
from . import simulator as _simulator
from .config import ExperimentConfig, load_config, with_seed
from .exceptions import ConfigError, GammaInfeasible, NoConvergence
from .linalg import max_eig_sym

EXIT_OK = 0
EXIT_NO_CONVERGENCE = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


def _fmt(x) -> str:
    """Shortest decimal that round-trips to the same float."""
    return repr(float(x))


def _columns(base: str, width: int) -> list:
    if width == 1:
        return [base]
    return [f"{base}{j}" for j in range(width)]


def trace_lines(trace, full: bool = False) -> list:
    """Render a trace as CSV lines (header first, no line terminators)."""
    m = trace.z.shape[1]
    K = trace.c.shape[1]
    header = (["t"] + _columns("z", m) + _columns("zh_mini", m)
              + _columns("zh_ba", m))
    if full:
        header += ["Jstar"]
        header += [f"c{i}" for i in range(K)]
        header += [f"mu{i}" for i in range(K)]
        header += [f"lam{i}" for i in range(K)]
    lines = [";".join(header)]
    for t in range(trace.horizon):
        row = [str(t)]
        row += [_fmt(v) for v in trace.z[t]]
        row += [_fmt(v) for v in trace.yhat_minimax[t]]
        row += [_fmt(v) for v in trace.yhat_bayes[t]]
        if full:
            row.append(_fmt(trace.J_star[t]))
            row += [_fmt(v) for v in trace.c[t]]
            row += [_fmt(v) for v in trace.mu[t]]
            row += [_fmt(v) for v in trace.lam[t]]
        lines.append(";".join(row))
    return lines


def write_trace(trace, path, full: bool = False) -> None:
    text = "\n".join(trace_lines(trace, full=full)) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _seed_path(path: str, seed: int) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_seed{seed}{ext}"


def _parse_seed_range(text: str) -> list:
    try:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
    except ValueError:
        raise ConfigError(f"field --seeds: {text!r} is not of the form a..b") from None
    if hi < lo:
        raise ConfigError(f"field --seeds: empty range {text!r}")
    return list(range(lo, hi + 1))


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if args.stationary:
        updates["stationary"] = True
    if args.bayes_mode is not None:
        updates["bayes_mode"] = args.bayes_mode
    if args.out is not None:
        updates["output"] = args.out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _simulate(cfg: ExperimentConfig):
    u, x, y, z = _simulator.generate_truth(
        cfg.models, cfg.true_model, cfg.horizon,
        cfg.process_noise, cfg.measurement_noise, cfg.input_spec)
    return _simulator.run_estimators(
        cfg.models, y, u=u, stationary=cfg.stationary,
        true_model=cfg.true_model, x=x, z=z,
        run_minimax=cfg.run_minimax, run_bayes=cfg.run_bayes,
        bayes_mode=cfg.bayes_mode)


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    if args.seeds is not None:
        seeds = _parse_seed_range(args.seeds)
        if cfg.output is None:
            raise ConfigError("field output: required with --seeds (one file per seed)")
        for s in seeds:
            trace = _simulate(with_seed(cfg, s))
            write_trace(trace, _seed_path(cfg.output, s), full=args.full)
        return EXIT_OK
    trace = _simulate(cfg)
    write_trace(trace, cfg.output, full=args.full)
    return EXIT_OK


def cmd_riccati(args) -> int:
    cfg = load_config(args.config)
    models = cfg.models
    gains = _riccati.stationary_gains(models)
    gsq = models.gamma ** 2
    out = []
    for i in range(models.K):
        P = gains.cov(0, i)
        sol = gains.solutions[i]
        lam = max_eig_sym(models.H[i] @ P @ models.H[i].T)
        out.append(f"model {i}:")
        out.append("  P = " + np.array2string(P, prefix="  P = "))
        out.append("  K = " + np.array2string(gains.gain(0, i), prefix="  K = "))
        out.append(f"  lambda_max(H P H^T) = {_fmt(lam)}")
        out.append(f"  gamma^2 = {_fmt(gsq)}")
        out.append(f"  feasible: {'yes' if lam < gsq else 'no'}")
        out.append(f"  residual = {_fmt(sol.residual)}")
        out.append(f"  iterations = {sol.iterations}")
    print("\n".join(out))
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    models = cfg.models
    gains = _riccati.run_recursion(models, cfg.horizon)
    gsq = models.gamma ** 2
    for t in range(cfg.horizon + 1):
        for i in range(models.K):
            if not gains.feasible[i, t]:
                lam = max_eig_sym(models.H[i] @ gains.cov(t, i) @ models.H[i].T)
                raise GammaInfeasible(
                    f"t={t} model {i}: lambda_max(H P H^T) = {_fmt(lam)}"
                    f" >= gamma^2 = {_fmt(gsq)}",
                    lambda_max=lam, gamma_sq=gsq, model=i, t=t)
    print(f"all (t, i) gamma-feasible for t = 0..{cfg.horizon}, "
          f"{models.K} models, gamma^2 = {_fmt(gsq)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mmxest",
        description="Minimax and Bayesian multiple-model output prediction.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate an experiment and write a CSV trace")
    run.add_argument("--config", required=True, help="experiment config file")
    run.add_argument("--out", default=None, help="output CSV path (default: config's, else stdout)")
    run.add_argument("--full", action="store_true",
                     help="add per-model cost, posterior, game value, and weight columns")
    run.add_argument("--seeds", default=None, metavar="A..B",
                     help="run once per seed in the inclusive range, one file per seed")
    run.add_argument("--stationary", action="store_true",
                     help="use stationary (ARE) gains instead of the time-varying recursion")
    run.add_argument("--bayes-mode", choices=["average", "map"], default=None,
                     help="Bayesian output: posterior average or most probable model")
    run.set_defaults(func=cmd_run)

    ric = sub.add_parser("riccati", help="solve each model's ARE and report feasibility")
    ric.add_argument("--config", required=True, help="experiment config file")
    ric.set_defaults(func=cmd_riccati)

    chk = sub.add_parser("check", help="verify gamma-feasibility over the horizon")
    chk.add_argument("--config", required=True, help="experiment config file")
    chk.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GammaInfeasible as exc:
        print(f"error: gamma-infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoConvergence as exc:
        print(f"error: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
