"""Command-line front end: keyrate, sweep, optimize, simulate, config show-defaults."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, RunConfig, config_from_mapping, dump_config, load_config
from .optimize import OptimalPoint, OptimizeSpec, distance_grid, optimal_curve, optimize_point
from .rates import RatePoint, key_rate
from .records import to_csv, to_json
from .sim import SimConfig, analytic_point, compare_to_analytic, simulate_session

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_STAT = 3

# CLI flag -> config key
_FLAG_KEYS = {
    "regime": "regime",
    "distance_km": "distance_km",
    "alpha0": "alpha0",
    "beta": "beta",
    "compensate_dispersion": "compensate_dispersion",
    "compensate_group_delay": "compensate_group_delay",
    "out": "out",
    "format": "format",
    "pulses": "pulses",
    "seed": "seed",
    "d_start": "d_start",
    "d_end": "d_end",
    "d_step": "d_step",
    "policy": "double_click_policy",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="flat key = value config file")
    p.add_argument("--regime", choices=["original", "deep", "deep-carrier"])
    p.add_argument("--distance-km", type=float)
    p.add_argument("--alpha0", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--compensate-dispersion", action="store_const", const=True, default=None)
    p.add_argument("--compensate-group-delay", action=argparse.BooleanOptionalAction,
                   default=None)
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--format", choices=["csv", "json"])


def _sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d-start", type=float)
    p.add_argument("--d-end", type=float)
    p.add_argument("--d-step", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scwqkd", description=__doc__)
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("keyrate", help="evaluate the key rate at one operating point")
    _common(p)

    p = sub.add_parser("sweep", help="key rate versus distance")
    _common(p)
    _sweep_flags(p)
    p.add_argument("--optimize", action="store_true",
                   help="optimize alpha0 (and beta) at every distance")

    p = sub.add_parser("optimize", help="optimal control parameters")
    _common(p)
    _sweep_flags(p)

    p = sub.add_parser("simulate", help="Monte-Carlo session checked against the analytic model")
    _common(p)
    p.add_argument("--pulses", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--policy", choices=["discard", "random_bit"])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--mismatch-alpha0", type=float, nargs="?", const=2.0, default=None,
                   metavar="FACTOR",
                   help="self-test: compare against the analytic point at alpha0 * FACTOR "
                        "(default 2); should exit 3")

    p = sub.add_parser("config", help="configuration helpers")
    csub = p.add_subparsers(dest="config_cmd", required=True)
    csub.add_parser("show-defaults", help="print the default configuration")
    return parser


def _resolve(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {}
    for flag, key in _FLAG_KEYS.items():
        v = getattr(args, flag, None)
        if v is not None:
            overrides[key] = v
    cfg = config_from_mapping(overrides, cfg)
    cfg.validate()
    return cfg


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(cfg: RunConfig, rows: list[dict], columns: list[str], single=False) -> str:
    if cfg.format == "json":
        return to_json(rows[0] if single else rows, columns)
    return to_csv(rows, columns)


def cmd_keyrate(cfg: RunConfig) -> int:
    params = cfg.system_params()
    losses = cfg.device().at(cfg.distance_km, params.fiber_atten_db_per_km)
    point = key_rate(params, losses, cfg.regime_enum(), cfg.alpha0, cfg.beta_for_regime(),
                     cfg.dispersion())
    _emit(cfg, _render(cfg, [point.to_dict()], RatePoint.columns(), single=True))
    return EXIT_OK


def _spec_kwargs(cfg: RunConfig) -> dict:
    return dict(alpha0_range=(cfg.alpha0_min, cfg.alpha0_max),
                beta_range=(cfg.beta_min, cfg.beta_max), coarse_grid=cfg.coarse_grid,
                refine_iters=cfg.refine_iters, compensate_dispersion=cfg.compensate_dispersion,
                compensate_group_delay=cfg.compensate_group_delay)


def _curve(cfg: RunConfig) -> list[OptimalPoint]:
    try:
        distance_grid(cfg.d_start, cfg.d_end, cfg.d_step)
    except ValueError as exc:
        raise ConfigError("d_start/d_end/d_step", str(exc)) from None
    try:
        return optimal_curve(cfg.regime_enum(), cfg.d_start, cfg.d_end, cfg.d_step,
                             cfg.system_params(), cfg.device(), **_spec_kwargs(cfg))
    except ValueError as exc:
        raise ConfigError("optimizer", str(exc)) from None


def cmd_sweep(cfg: RunConfig, optimize: bool = False) -> int:
    if optimize:
        rows = [o.to_dict() for o in _curve(cfg)]
        columns = OptimalPoint.columns()
    else:
        try:
            grid = distance_grid(cfg.d_start, cfg.d_end, cfg.d_step)
        except ValueError as exc:
            raise ConfigError("d_start/d_end/d_step", str(exc)) from None
        params = cfg.system_params()
        device = cfg.device()
        beta = cfg.beta_for_regime()
        rows = [key_rate(params, device.at(float(d), params.fiber_atten_db_per_km),
                         cfg.regime_enum(), cfg.alpha0, beta, cfg.dispersion(float(d))).to_dict()
                for d in grid]
        columns = RatePoint.columns()
    _emit(cfg, _render(cfg, rows, columns))
    return EXIT_OK


def cmd_optimize(cfg: RunConfig, single_distance: bool) -> int:
    if single_distance:
        try:
            spec = OptimizeSpec(cfg.regime_enum(), cfg.distance_km, **_spec_kwargs(cfg))
        except ValueError as exc:
            raise ConfigError("optimizer", str(exc)) from None
        opts = [optimize_point(spec, cfg.system_params(), cfg.device())]
    else:
        opts = _curve(cfg)
    for o in opts:
        if o.status != "ok":
            print(f"d={o.point.distance_km:g} km: {o.status}", file=sys.stderr)
    _emit(cfg, _render(cfg, [o.to_dict() for o in opts], OptimalPoint.columns()))
    return EXIT_OK


def cmd_simulate(cfg: RunConfig, workers: int = 1, mismatch: float | None = None) -> int:
    if cfg.seed is None:
        raise ConfigError("seed", "a seed is required for a reproducible simulation")
    params = cfg.system_params()
    losses = cfg.device().at(cfg.distance_km, params.fiber_atten_db_per_km)
    try:
        sim_cfg = SimConfig(n_pulses=cfg.pulses, seed=cfg.seed, regime=cfg.regime_enum(),
                            params=params, losses=losses, alpha0=cfg.alpha0,
                            beta=cfg.beta_for_regime(), disp=cfg.dispersion(),
                            double_click_policy=cfg.double_click_policy,
                            dead_time=cfg.dead_time, workers=workers)
    except ValueError as exc:
        raise ConfigError("simulate", str(exc)) from None
    summary = simulate_session(sim_cfg)
    reference = sim_cfg
    if mismatch is not None:
        reference = SimConfig(**{**sim_cfg.__dict__, "alpha0": cfg.alpha0 * mismatch})
    report = compare_to_analytic(summary, analytic_point(reference))
    doc = summary.to_dict()
    doc["comparison"] = report
    _emit(cfg, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK if report["passed"] else EXIT_STAT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "config":
            sys.stdout.write(dump_config(RunConfig()))
            return EXIT_OK
        cfg = _resolve(args)
        if args.cmd == "keyrate":
            return cmd_keyrate(cfg)
        if args.cmd == "sweep":
            return cmd_sweep(cfg, optimize=args.optimize)
        if args.cmd == "optimize":
            return cmd_optimize(cfg, single_distance=args.distance_km is not None)
        return cmd_simulate(cfg, workers=args.workers, mismatch=args.mismatch_alpha0)
    except ConfigError as exc:
        print(f"scwqkd: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
