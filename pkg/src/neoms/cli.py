"""Command line front end.

Exit codes: 0 success, 2 configuration problems (including argparse usage
errors), 3 when an operation required a bistability window the operating
point does not have, 4 numerical failures.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import output
from .bifurcation import (FAMILY_KEYS, auto_power_grid, bistability_window,
                          family_sweep, hysteresis_from_curve, power_sweep)
from .config import RunConfig, load_config, parse_scalar_for_key
from .dynamics import ORIGIN, hysteresis_loop, relax_to_steady
from .errors import (ConfigError, NeomsError, NoBistabilityError,
                     NumericalError, ParameterError)
from .model import LinewidthConvention, eps_for_power
from .presets import PRESETS, get_preset
from .stability import Method
from .steady_state import drive_offset, susceptibilities, threshold_detuning

_MIRROR_PANELS = {"fig7", "fig8a", "fig8b", "fig8c", "fig8d"}


def _err(message: str) -> None:
    print(message, file=sys.stderr)


def _add_source(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", help="path to a run configuration file")
    group.add_argument("--preset", choices=sorted(PRESETS),
                       help="named built-in operating point")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--pmin", type=float,
                   help="lowest drive power in W (default: half the "
                        "downward fold)")
    p.add_argument("--pmax", type=float,
                   help="highest drive power in W (default: twice the "
                        "upward fold)")
    p.add_argument("--points", type=int, default=201,
                   help="number of power grid points (default 201)")


def _add_method(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=("eigen", "slope"), default="eigen",
                   help="stability classifier (default eigen)")


def _add_convention(p: argparse.ArgumentParser) -> None:
    p.add_argument("--convention",
                   choices=[c.value for c in LinewidthConvention],
                   help="cavity linewidth convention (default: from config)")


def _load_cfg(args) -> RunConfig:
    if args.preset is not None:
        cfg = get_preset(args.preset).config()
    else:
        cfg = load_config(args.config)
    conv = getattr(args, "convention", None)
    if conv is not None:
        cfg = dataclasses.replace(cfg, convention=LinewidthConvention(conv))
    return cfg


def _assumptions(args) -> tuple[str, ...]:
    if getattr(args, "preset", None) is not None:
        return get_preset(args.preset).assumptions
    return ()


def _method(args) -> Method:
    return Method.EIGEN if args.method == "eigen" else Method.SLOPE_RULE


def _emit(text: str, args) -> None:
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")


def _grid_or_none(cfg: RunConfig, args):
    """Power grid for sweep commands; None means no window and no bounds."""
    derived = cfg.derive()
    window = bistability_window(derived, cfg.drives, cfg.convention)
    if (args.pmin is None or args.pmax is None) and not window.exists:
        return derived, window, None
    grid = auto_power_grid(window, args.points, args.pmin, args.pmax)
    return derived, window, grid


def _cmd_curve(args, kind: str = "curve") -> int:
    cfg = _load_cfg(args)
    derived, window, grid = _grid_or_none(cfg, args)
    if grid is None:
        _err(f"no bistability window ({window.reason}); "
             f"give --pmin and --pmax to sweep anyway")
        return 3
    curve = power_sweep(derived, cfg.drives, grid, _method(args),
                        cfg.convention)
    snap = cfg.snapshot()
    notes = _assumptions(args)
    if args.format == "csv":
        _emit(output.curve_to_csv(curve, snap, notes), args)
    else:
        _emit(output.dumps_json(
            output.curve_to_dict(curve, snap, notes, kind=kind)), args)
    return 0


def _cmd_mirror(args) -> int:
    return _cmd_curve(args, kind="mirror")


def _cmd_window(args) -> int:
    cfg = _load_cfg(args)
    derived = cfg.derive()
    window = bistability_window(derived, cfg.drives, cfg.convention)
    snap = cfg.snapshot()
    notes = _assumptions(args)
    if args.format == "csv":
        _emit(output.window_to_csv(window, snap, notes), args)
    else:
        _emit(output.dumps_json(output.window_json(window, snap, notes)),
              args)
    if not window.exists:
        _err(f"no bistability window: {window.reason}")
        return 3
    return 0


def _cmd_threshold(args) -> int:
    cfg = _load_cfg(args)
    derived = cfg.derive()
    susc = susceptibilities(derived, cfg.drives)
    gamma = drive_offset(susc, cfg.drives)
    thr = threshold_detuning(derived, susc, gamma, cfg.convention)
    snap = cfg.snapshot()
    if args.format == "csv":
        _emit(output.threshold_to_csv(thr, derived.kappa, snap), args)
    else:
        _emit(output.dumps_json(output.threshold_to_dict(thr, derived.kappa)),
              args)
    return 0


def _cmd_hysteresis(args) -> int:
    cfg = _load_cfg(args)
    derived, window, grid = _grid_or_none(cfg, args)
    if grid is None:
        _err(f"no bistability window ({window.reason}); "
             f"give --pmin and --pmax to ramp anyway")
        return 3
    if args.mode == "algebraic":
        curve = power_sweep(derived, cfg.drives, grid, _method(args),
                            cfg.convention)
        trace = hysteresis_from_curve(curve)
    else:
        factor = args.dwell_factor
        if factor is None:
            factor = cfg.dwell_factor if cfg.dwell_factor is not None else 10.0
        slow = min(derived.kappa, derived.gamma1, derived.gamma2)
        trace = hysteresis_loop(derived, cfg.drives, grid,
                                dwell=factor / slow,
                                convention=cfg.convention)
    snap = cfg.snapshot()
    notes = _assumptions(args)
    if args.format == "csv":
        _emit(output.trace_to_csv(trace, snap, notes), args)
    else:
        _emit(output.dumps_json(output.trace_to_dict(trace, snap, notes)),
              args)
    return 0


def _resolve_family(cfg: RunConfig, args) -> tuple[str, tuple[float, ...]]:
    vary = args.vary if args.vary is not None else cfg.vary
    if vary is None:
        raise ConfigError("family needs a vary key, from --vary or the "
                          "config")
    if args.values is not None:
        entries = [e.strip() for e in args.values.split(",")]
        if not all(entries):
            raise ConfigError("empty entry in --values")
        values = tuple(parse_scalar_for_key(vary, e) for e in entries)
    elif cfg.values is not None and cfg.vary == vary:
        values = cfg.values
    else:
        raise ConfigError("family needs values, from --values or the config")
    return vary, values


def _cmd_family(args) -> int:
    cfg = _load_cfg(args)
    vary, values = _resolve_family(cfg, args)
    fam = family_sweep(cfg.params, cfg.drives, vary, values,
                       n_points=args.points, method=_method(args),
                       convention=cfg.convention,
                       pmin=args.pmin, pmax=args.pmax)
    snap = dataclasses.replace(cfg, vary=vary, values=values).snapshot()
    notes = _assumptions(args)
    if args.format == "csv":
        _emit(output.family_to_csv(fam, snap, notes), args)
    else:
        _emit(output.dumps_json(output.family_to_dict(fam, snap, notes)),
              args)
    return 0


def _cmd_dynamics(args) -> int:
    cfg = _load_cfg(args)
    derived = cfg.derive()
    power = args.power if args.power is not None else cfg.params.drive_power
    eps = eps_for_power(derived, power)
    fields = relax_to_steady(ORIGIN, derived, cfg.drives, eps,
                             convention=cfg.convention)
    snap = cfg.snapshot()
    if args.format == "csv":
        _emit(output.fields_to_csv(fields, power, snap), args)
    else:
        _emit(output.dumps_json(output.fields_to_dict(fields, power)), args)
    return 0


def _cmd_fig(args) -> int:
    args.preset = args.panel
    args.config = None
    cfg = _load_cfg(args)
    if cfg.vary is not None:
        args.vary = None
        args.values = None
        return _cmd_family(args)
    kind = "mirror" if args.panel in _MIRROR_PANELS else "curve"
    return _cmd_curve(args, kind=kind)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neoms",
        description="Steady-state bistability and mean-field dynamics of a "
                    "driven cavity with two charged mirrors")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("curve", help="photon-number response over a power "
                                     "grid, all branches classified")
    _add_source(p); _add_grid(p); _add_method(p); _add_convention(p)
    _add_output(p)
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("mirror", help="same sweep, displacement-centric "
                                      "output")
    _add_source(p); _add_grid(p); _add_method(p); _add_convention(p)
    _add_output(p)
    p.set_defaults(func=_cmd_mirror)

    p = sub.add_parser("window", help="closed-form fold powers")
    _add_source(p); _add_convention(p); _add_output(p)
    p.set_defaults(func=_cmd_window)

    p = sub.add_parser("threshold", help="detuning threshold for fold "
                                         "existence")
    _add_source(p); _add_convention(p); _add_output(p)
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("hysteresis", help="up/down sweep with jump powers")
    _add_source(p); _add_grid(p); _add_method(p); _add_convention(p)
    _add_output(p)
    p.add_argument("--mode", choices=("algebraic", "dynamic"),
                   default="algebraic",
                   help="read jumps off the classified curve, or ramp the "
                        "mean-field equations quasi-statically")
    p.add_argument("--dwell-factor", type=float, dest="dwell_factor",
                   help="dynamic mode: hold time per step in units of the "
                        "slowest decay time (default 10)")
    p.set_defaults(func=_cmd_hysteresis)

    p = sub.add_parser("family", help="curve family over one parameter")
    _add_source(p); _add_grid(p); _add_method(p); _add_convention(p)
    _add_output(p)
    p.add_argument("--vary", choices=FAMILY_KEYS,
                   help="parameter to vary (overrides config)")
    p.add_argument("--values",
                   help="comma-separated values in config-grammar form, "
                        "for example '2pi*5 kHz, 2pi*7 kHz'")
    p.set_defaults(func=_cmd_family)

    p = sub.add_parser("dynamics", help="relax the mean-field equations to "
                                        "steady state at one power")
    _add_source(p); _add_convention(p); _add_output(p)
    p.add_argument("--power", type=float,
                   help="drive power in W (default: config drive_power)")
    p.set_defaults(func=_cmd_dynamics)

    p = sub.add_parser("fig", help="run a named preset end to end")
    p.add_argument("panel", choices=sorted(PRESETS))
    _add_grid(p); _add_method(p); _add_convention(p); _add_output(p)
    p.set_defaults(func=_cmd_fig, config=None, preset=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParameterError) as exc:
        _err(f"configuration error: {exc}")
        return 2
    except NoBistabilityError as exc:
        _err(f"no bistability: {exc}")
        return 3
    except NumericalError as exc:
        _err(f"numerical failure: {exc}")
        return 4
    except NeomsError as exc:
        _err(f"error: {exc}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
