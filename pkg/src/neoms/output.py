"""Deterministic CSV and JSON serialization of analysis results.

CSV files carry a `#`-commented preamble holding the canonical parameter
snapshot (and any preset assumptions), then a fixed header.  Floats are
written with repr, which round-trips exactly; booleans are true/false.
Neither format embeds timestamps, so equal inputs give equal bytes.
"""

from __future__ import annotations

import json
import math

from .bifurcation import (BistabilityCurve, BistabilityWindow, FamilyResult,
                          HysteresisTrace)
from .steady_state import SteadyStateFields, ThresholdDetuning

CURVE_HEADER = "power_W,branch_index,photon_number,stable,q1_m,q2_m"
FAMILY_HEADER = "value," + CURVE_HEADER
HYSTERESIS_HEADER = "direction,power_W,photon_number"
KEYVALUE_HEADER = "key,value"


def _f(x: float) -> str:
    return repr(float(x))


def _b(x: bool) -> str:
    return "true" if x else "false"


def _preamble(snapshot: str, comments: tuple[str, ...] = ()) -> list[str]:
    lines = [f"# {c}" for c in comments]
    lines += [f"# {line}" for line in snapshot.rstrip("\n").splitlines()]
    return lines


def _none_if_nan(x: float | None) -> float | None:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


# ---------------------------------------------------------------- curves

def _curve_rows(curve: BistabilityCurve, prefix: str = "") -> list[str]:
    rows = []
    for pt in curve.points:
        for i, b in enumerate(pt.branches):
            rows.append(prefix + ",".join([
                _f(pt.power), str(i), _f(b.photon_number), _b(b.stable),
                _f(b.fields.q_1s), _f(b.fields.q_2s)]))
    return rows


def curve_to_csv(curve: BistabilityCurve, snapshot: str,
                 comments: tuple[str, ...] = ()) -> str:
    lines = _preamble(snapshot, comments)
    errors = [pt for pt in curve.points if pt.error is not None]
    for pt in errors:
        lines.append(f"# unsolved point at power_W = {_f(pt.power)}: "
                     f"{pt.error}")
    lines.append(CURVE_HEADER)
    lines += _curve_rows(curve)
    return "\n".join(lines) + "\n"


def _branch_dict(b) -> dict:
    return {
        "photon_number": b.photon_number,
        "stable": b.stable,
        "stability_margin": _none_if_nan(b.stability.margin),
        "q1_m": b.fields.q_1s,
        "q2_m": b.fields.q_2s,
        "effective_detuning_rad_s": b.fields.effective_detuning,
    }


def curve_to_dict(curve: BistabilityCurve, snapshot: str,
                  comments: tuple[str, ...] = (), kind: str = "curve") -> dict:
    return {
        "kind": kind,
        "method": str(curve.method.value),
        "convention": str(curve.convention.value),
        "snapshot": snapshot.rstrip("\n").splitlines(),
        "assumptions": list(comments),
        "points": [
            {
                "power_W": pt.power,
                "eps_sq": pt.eps_sq,
                "error": pt.error,
                "branches": [_branch_dict(b) for b in pt.branches],
            }
            for pt in curve.points
        ],
    }


# ---------------------------------------------------------------- families

def family_to_csv(family: FamilyResult, snapshot: str,
                  comments: tuple[str, ...] = ()) -> str:
    lines = _preamble(snapshot, comments)
    lines.append(f"# vary = {family.vary}")
    lines.append(FAMILY_HEADER)
    for m in family.members:
        lines += _curve_rows(m.curve, prefix=_f(m.value) + ",")
    return "\n".join(lines) + "\n"


def window_to_dict(window: BistabilityWindow) -> dict:
    crit = window.critical
    return {
        "exists": window.exists,
        "reason": window.reason,
        "power_up_W": window.power_up,
        "power_down_W": window.power_down,
        "width_W": window.width if window.exists else None,
        "fold_ratio": _none_if_nan(window.fold_ratio),
        "x_c_minus": _none_if_nan(crit.x_c_minus),
        "x_c_plus": _none_if_nan(crit.x_c_plus),
        "x_inflection": _none_if_nan(crit.x_inf),
        "delta_tilde_rad_s": window.delta_tilde,
        "threshold_delta_tilde_rad_s": window.threshold.delta_tilde,
        "threshold_in_kappa_units": window.threshold.in_kappa_units,
    }


def family_to_dict(family: FamilyResult, snapshot: str,
                   comments: tuple[str, ...] = ()) -> dict:
    return {
        "kind": "family",
        "vary": family.vary,
        "values": list(family.values),
        "snapshot": snapshot.rstrip("\n").splitlines(),
        "assumptions": list(comments),
        "powers_W": list(family.powers),
        "members": [
            {
                "value": m.value,
                "window": window_to_dict(m.window),
                "curve": curve_to_dict(m.curve, snapshot)["points"],
            }
            for m in family.members
        ],
    }


# ---------------------------------------------------------------- windows

def window_to_csv(window: BistabilityWindow, snapshot: str,
                  comments: tuple[str, ...] = ()) -> str:
    lines = _preamble(snapshot, comments)
    lines.append(KEYVALUE_HEADER)
    for key, value in sorted(window_to_dict(window).items()):
        if isinstance(value, bool):
            lines.append(f"{key},{_b(value)}")
        elif isinstance(value, float):
            lines.append(f"{key},{_f(value)}")
        else:
            lines.append(f"{key},{value if value is not None else ''}")
    return "\n".join(lines) + "\n"


def window_json(window: BistabilityWindow, snapshot: str,
                comments: tuple[str, ...] = ()) -> dict:
    out = window_to_dict(window)
    out["kind"] = "window"
    out["snapshot"] = snapshot.rstrip("\n").splitlines()
    out["assumptions"] = list(comments)
    return out


# ---------------------------------------------------------------- threshold

def threshold_to_dict(thr: ThresholdDetuning, kappa: float) -> dict:
    return {
        "kind": "threshold",
        "convention": str(thr.convention.value),
        "delta_tilde_rad_s": thr.delta_tilde,
        "in_kappa_units": thr.in_kappa_units,
        "delta_c_rad_s": thr.delta_c,
        "kappa_rad_s": kappa,
    }


def threshold_to_csv(thr: ThresholdDetuning, kappa: float, snapshot: str,
                     comments: tuple[str, ...] = ()) -> str:
    lines = _preamble(snapshot, comments)
    lines.append(KEYVALUE_HEADER)
    for key, value in sorted(threshold_to_dict(thr, kappa).items()):
        lines.append(f"{key},{_f(value) if isinstance(value, float) else value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- hysteresis

def trace_to_csv(trace: HysteresisTrace, snapshot: str,
                 comments: tuple[str, ...] = ()) -> str:
    lines = _preamble(snapshot, comments)
    ups = ", ".join(_f(p) for p in trace.up_jump_powers)
    downs = ", ".join(_f(p) for p in trace.down_jump_powers)
    lines.append(f"# up_jump_powers_W = [{ups}]")
    lines.append(f"# down_jump_powers_W = [{downs}]")
    lines.append(HYSTERESIS_HEADER)
    for name, seq in (("up", trace.up), ("down", trace.down)):
        for power, x in seq or ():
            lines.append(f"{name},{_f(power)},{_f(x)}")
    return "\n".join(lines) + "\n"


def trace_to_dict(trace: HysteresisTrace, snapshot: str,
                  comments: tuple[str, ...] = ()) -> dict:
    def seq(s):
        return None if s is None else [[p, x] for p, x in s]

    return {
        "kind": "hysteresis",
        "snapshot": snapshot.rstrip("\n").splitlines(),
        "assumptions": list(comments),
        "up": seq(trace.up),
        "down": seq(trace.down),
        "up_jump_powers_W": list(trace.up_jump_powers),
        "down_jump_powers_W": list(trace.down_jump_powers),
    }


# ---------------------------------------------------------------- fields

def fields_to_dict(fields: SteadyStateFields, power: float) -> dict:
    return {
        "kind": "steady_fields",
        "power_W": power,
        "photon_number": fields.photon_number,
        "cavity_re": fields.c_s.real,
        "cavity_im": fields.c_s.imag,
        "q1_m": fields.q_1s,
        "q2_m": fields.q_2s,
        "effective_detuning_rad_s": fields.effective_detuning,
    }


def fields_to_csv(fields: SteadyStateFields, power: float, snapshot: str,
                  comments: tuple[str, ...] = ()) -> str:
    lines = _preamble(snapshot, comments)
    lines.append(KEYVALUE_HEADER)
    for key, value in sorted(fields_to_dict(fields, power).items()):
        lines.append(f"{key},{_f(value) if isinstance(value, float) else value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing

def parse_curve_csv(text: str) -> tuple[list[str], list[dict]]:
    """Read back a curve CSV: (comment lines without '#', data rows)."""
    comments: list[str] = []
    rows: list[dict] = []
    header_seen = False
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if not header_seen:
            if line != CURVE_HEADER:
                raise ValueError(f"unexpected header {line!r}")
            header_seen = True
            continue
        power, idx, x, stable, q1, q2 = line.split(",")
        rows.append({
            "power_W": float(power),
            "branch_index": int(idx),
            "photon_number": float(x),
            "stable": stable == "true",
            "q1_m": float(q1),
            "q2_m": float(q2),
        })
    if not header_seen:
        raise ValueError("no header line found")
    return comments, rows
