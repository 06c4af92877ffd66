"""Bistability curves, fold windows, hysteresis, and parameter families.

Everything here is algebraic: roots of the steady-state cubic classified by
the linearized spectrum, folds from the closed-form critical points.  The
time-domain counterpart lives in the dynamics module and is deliberately
kept as an independent route to the same numbers.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoBistabilityError, ResidualError
from .model import (DerivedParams, DriveSpec, LinewidthConvention,
                    SystemParams, derive, eps_for_power, power_for_eps_sq)
from .stability import Classification, Method, StabilityReport, classify
from .steady_state import (CriticalPoints, SteadyStateFields,
                           ThresholdDetuning, critical_points,
                           cubic_coefficients, drive_offset,
                           fold_powers_eps_sq, solve_photon_roots,
                           steady_fields, susceptibilities,
                           threshold_detuning)


@dataclass(frozen=True)
class BranchSolution:
    """One steady-state root with its operating point and classification."""

    photon_number: float
    fields: SteadyStateFields
    stability: StabilityReport

    @property
    def stable(self) -> bool:
        return self.stability.classification is Classification.STABLE


@dataclass(frozen=True)
class CurvePoint:
    """All coexisting steady states at one drive power."""

    power: float                              # W
    eps_sq: float                             # (rad/s)^2
    branches: tuple[BranchSolution, ...]      # ascending photon number
    error: str | None = None

    @property
    def multiplicity(self) -> int:
        return len(self.branches)


@dataclass(frozen=True)
class BistabilityCurve:
    """Steady-state response over a power grid."""

    points: tuple[CurvePoint, ...]
    method: Method
    convention: LinewidthConvention

    def powers(self) -> tuple[float, ...]:
        return tuple(p.power for p in self.points)

    def multiplicities(self) -> tuple[int, ...]:
        return tuple(p.multiplicity for p in self.points)

    def bistable_powers(self) -> tuple[float, ...]:
        return tuple(p.power for p in self.points if p.multiplicity == 3)


@dataclass(frozen=True)
class BistabilityWindow:
    """Fold powers bracketing the multivalued region, if it exists."""

    exists: bool
    reason: str | None
    power_up: float | None        # W at the lower-branch fold (upward jump)
    power_down: float | None      # W at the upper-branch fold (downward jump)
    eps_sq_up: float | None
    eps_sq_down: float | None
    critical: CriticalPoints
    delta_tilde: float            # rad/s
    threshold: ThresholdDetuning

    @property
    def width(self) -> float:
        if not self.exists:
            return 0.0
        return self.power_up - self.power_down

    @property
    def fold_ratio(self) -> float:
        if not self.exists:
            return math.nan
        return self.power_up / self.power_down


@dataclass(frozen=True)
class HysteresisTrace:
    """Photon number along up and/or down power sweeps with jump markers.

    Jump powers are the first grid point after the response moved by more
    than half of its previous value, so they sit one grid spacing past the
    underlying fold at worst.
    """

    up: tuple[tuple[float, float], ...] | None      # (power, photon number)
    down: tuple[tuple[float, float], ...] | None
    up_jump_powers: tuple[float, ...]
    down_jump_powers: tuple[float, ...]

    @property
    def up_jump(self) -> float | None:
        return self.up_jump_powers[0] if self.up_jump_powers else None

    @property
    def down_jump(self) -> float | None:
        return self.down_jump_powers[0] if self.down_jump_powers else None

    @property
    def loop_area_exists(self) -> bool:
        return bool(self.up_jump_powers) and bool(self.down_jump_powers)


def bistability_window(derived: DerivedParams, drives: DriveSpec,
                       convention: LinewidthConvention = LinewidthConvention.HALF_KAPPA,
                       ) -> BistabilityWindow:
    """Closed-form fold powers for the given operating point."""
    susc = susceptibilities(derived, drives)
    gamma = drive_offset(susc, drives)
    # the folds do not depend on the drive strength, only on the curve shape
    coeffs = cubic_coefficients(derived, susc, gamma, eps_l=0.0,
                                convention=convention)
    crit = critical_points(coeffs)
    thr = threshold_detuning(derived, susc, gamma, convention)
    if not crit.exists:
        return BistabilityWindow(exists=False, reason=crit.reason,
                                 power_up=None, power_down=None,
                                 eps_sq_up=None, eps_sq_down=None,
                                 critical=crit,
                                 delta_tilde=coeffs.delta_tilde,
                                 threshold=thr)
    eps_sq_up, eps_sq_down = fold_powers_eps_sq(coeffs, crit)
    return BistabilityWindow(
        exists=True, reason=None,
        power_up=power_for_eps_sq(derived, eps_sq_up),
        power_down=power_for_eps_sq(derived, eps_sq_down),
        eps_sq_up=eps_sq_up, eps_sq_down=eps_sq_down,
        critical=crit, delta_tilde=coeffs.delta_tilde, threshold=thr)


def auto_power_grid(window: BistabilityWindow, n: int = 201,
                    pmin: float | None = None, pmax: float | None = None,
                    ) -> tuple[float, ...]:
    """Linear power grid spanning the window with a factor-2 margin."""
    if pmin is None or pmax is None:
        if not window.exists:
            raise NoBistabilityError(
                f"no bistability window ({window.reason}); give explicit "
                f"power bounds")
        if pmin is None:
            pmin = 0.5 * window.power_down
        if pmax is None:
            pmax = 2.0 * window.power_up
    if n < 2 or pmax <= pmin:
        raise ValueError("need n >= 2 and pmax > pmin")
    return tuple(float(p) for p in np.linspace(pmin, pmax, n))


def _point(derived, drives, susc, gamma, power, method, convention,
           ) -> CurvePoint:
    eps = eps_for_power(derived, power)
    coeffs = cubic_coefficients(derived, susc, gamma, eps, convention)
    try:
        roots = solve_photon_roots(coeffs)
    except ResidualError as exc:
        return CurvePoint(power=power, eps_sq=eps * eps, branches=(),
                          error=str(exc))
    branches = []
    for x in roots.roots:
        fields = steady_fields(x, derived, susc, drives, eps_l=eps,
                               convention=convention)
        report = classify(fields, derived, method=method,
                          all_roots=roots.roots, convention=convention)
        branches.append(BranchSolution(photon_number=x, fields=fields,
                                       stability=report))
    return CurvePoint(power=power, eps_sq=eps * eps,
                      branches=tuple(branches))


def solve_point(derived: DerivedParams, drives: DriveSpec, power: float,
                method: Method = Method.EIGEN,
                convention: LinewidthConvention = LinewidthConvention.HALF_KAPPA,
                ) -> CurvePoint:
    """All steady branches at one power, classified."""
    susc = susceptibilities(derived, drives)
    gamma = drive_offset(susc, drives)
    return _point(derived, drives, susc, gamma, float(power), method,
                  convention)


def power_sweep(derived: DerivedParams, drives: DriveSpec,
                powers, method: Method = Method.EIGEN,
                convention: LinewidthConvention = LinewidthConvention.HALF_KAPPA,
                ) -> BistabilityCurve:
    """Solve and classify every root over a power grid, in grid order.

    Root-solve failures are recorded on the offending point rather than
    aborting the sweep.
    """
    susc = susceptibilities(derived, drives)
    gamma = drive_offset(susc, drives)
    points = tuple(_point(derived, drives, susc, gamma, float(p), method,
                          convention) for p in powers)
    return BistabilityCurve(points=points, method=method,
                            convention=convention)


_JUMP_LOG_MARGIN = math.log(1.5)


def is_branch_jump(p_prev: float, x_prev: float, p: float, x: float) -> bool:
    """Discontinuity test for consecutive sweep samples.

    The response moved by more than 50% beyond what the power step itself
    explains: |log(x/x_prev)| > |log(p/p_prev)| + log(1.5).  On a fine grid
    the power term vanishes and this is a plain 50% change detector; on a
    coarse grid it keeps the near-proportional growth of a single branch
    from masquerading as a fold jump.
    """
    if x_prev <= 0.0 or x <= 0.0 or p_prev <= 0.0 or p <= 0.0:
        return False
    log_x = abs(math.log(x / x_prev))
    log_p = abs(math.log(p / p_prev))
    return log_x > log_p + _JUMP_LOG_MARGIN


def _follow(points: list[CurvePoint],
            ) -> tuple[tuple[tuple[float, float], ...], tuple[float, ...]]:
    """Trace the occupied branch through an ordered point list."""
    seq: list[tuple[float, float]] = []
    jumps: list[float] = []
    prev: tuple[float, float] | None = None
    for pt in points:
        if pt.error is not None or not pt.branches:
            continue
        stable = [b for b in pt.branches if b.stable]
        pool = stable if stable else list(pt.branches)
        if prev is None:
            pick = min(pool, key=lambda b: b.photon_number)
        else:
            px = prev[1]
            pick = min(pool, key=lambda b: (abs(b.photon_number - px),
                                            b.photon_number))
        x = pick.photon_number
        if prev is not None and is_branch_jump(prev[0], prev[1], pt.power, x):
            jumps.append(pt.power)
        seq.append((pt.power, x))
        prev = (pt.power, x)
    return tuple(seq), tuple(jumps)


def hysteresis_from_curve(curve: BistabilityCurve) -> HysteresisTrace:
    """Quasi-static loop read directly off the classified curve.

    Upward pass starts on the lowest branch and keeps the stable branch
    nearest the previous state (ties to the lower one); downward pass is the
    same in reverse.  Points that failed to solve are skipped.
    """
    ordered = sorted(curve.points, key=lambda p: p.power)
    up, up_jumps = _follow(ordered)
    down, down_jumps = _follow(ordered[::-1])
    return HysteresisTrace(up=up, down=down, up_jump_powers=up_jumps,
                           down_jump_powers=down_jumps)


_PARAM_KEYS = ("g0", "gc", "delta_c")
_DRIVE_KEYS = ("eps1", "eps2", "phi1", "phi2")
FAMILY_KEYS = _PARAM_KEYS + _DRIVE_KEYS


@dataclass(frozen=True)
class FamilyMember:
    value: float
    derived: DerivedParams
    drives: DriveSpec
    window: BistabilityWindow
    curve: BistabilityCurve


@dataclass(frozen=True)
class FamilyResult:
    vary: str
    values: tuple[float, ...]
    members: tuple[FamilyMember, ...]
    powers: tuple[float, ...]       # shared grid across members

    def windows(self) -> tuple[BistabilityWindow, ...]:
        return tuple(m.window for m in self.members)


def _apply_family_value(params: SystemParams, drives: DriveSpec, vary: str,
                        value: float) -> tuple[SystemParams, DriveSpec]:
    if vary == "g0":
        return dataclasses.replace(params, g0=value), drives
    if vary == "gc":
        coulomb = dataclasses.replace(params.coulomb, gc=value, cap1=None,
                                      cap2=None, volt1=None, volt2=None,
                                      spacing=None)
        return dataclasses.replace(params, coulomb=coulomb), drives
    if vary == "delta_c":
        return dataclasses.replace(params, delta_c=value), drives
    return params, dataclasses.replace(drives, **{vary: value})


def family_sweep(params: SystemParams, drives: DriveSpec, vary: str,
                 values, n_points: int = 201,
                 method: Method = Method.EIGEN,
                 convention: LinewidthConvention = LinewidthConvention.HALF_KAPPA,
                 pmin: float | None = None, pmax: float | None = None,
                 ) -> FamilyResult:
    """Sweep one parameter and solve every member on a shared power grid.

    The grid, unless given, spans half the smallest downward fold power to
    twice the largest upward fold power over the bistable members; with no
    bistable member explicit bounds are required.
    """
    if vary not in FAMILY_KEYS:
        raise ValueError(f"vary must be one of {FAMILY_KEYS}, got {vary!r}")
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ValueError("values must be non-empty")
    prepared = []
    for v in vals:
        p_v, d_v = _apply_family_value(params, drives, vary, v)
        derived_v = derive(p_v, d_v)
        prepared.append((v, derived_v, d_v,
                         bistability_window(derived_v, d_v, convention)))
    if pmin is None or pmax is None:
        bistable = [w for (_, _, _, w) in prepared if w.exists]
        if not bistable:
            raise NoBistabilityError(
                "no family member is bistable; give explicit power bounds")
        if pmin is None:
            pmin = 0.5 * min(w.power_down for w in bistable)
        if pmax is None:
            pmax = 2.0 * max(w.power_up for w in bistable)
    powers = tuple(float(p) for p in np.linspace(pmin, pmax, n_points))
    members = []
    for v, derived_v, d_v, win in prepared:
        curve = power_sweep(derived_v, d_v, powers, method, convention)
        members.append(FamilyMember(value=v, derived=derived_v, drives=d_v,
                                    window=win, curve=curve))
    return FamilyResult(vary=vary, values=vals, members=tuple(members),
                        powers=powers)


def mirror_displacements(curve: BistabilityCurve,
                         ) -> tuple[tuple[float, int, float, float, bool], ...]:
    """Rows (power, branch index, q1, q2, stable) for every branch.

    The mirror positions inherit the photon-number multiplicity point by
    point, which is the displacement-bistability statement.
    """
    rows = []
    for pt in curve.points:
        for i, b in enumerate(pt.branches):
            rows.append((pt.power, i, b.fields.q_1s, b.fields.q_2s, b.stable))
    return tuple(rows)


def lower_branch_spread(family: FamilyResult) -> tuple[tuple[float, float], ...]:
    """Spread of the lowest-branch photon number across family members.

    Useful for drive-phase families, whose only visible effect is a shift of
    the branches at fixed power.
    """
    out = []
    for i, p in enumerate(family.powers):
        lows = []
        for m in family.members:
            pt = m.curve.points[i]
            if pt.branches:
                lows.append(pt.branches[0].photon_number)
        if len(lows) == len(family.members):
            out.append((p, max(lows) - min(lows)))
    return tuple(out)
