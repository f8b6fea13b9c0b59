"""Resilience planning for the defender and attack timing for the attacker.

The defender picks the recovery delay ``tau_R`` that maximizes
``F_D = U_D - R_D(tau_R)``; the attacker picks the attack time ``tau``.
Both are grid searches over the closed-form equilibrium: the objective has
floor-induced jumps, so the grid step is an explicit, reported parameter.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from netgame.closedform import SIZING_EXACT, SpeOutcome, solve
from netgame.errors import InvalidParameterError
from netgame.model import GameParams, Number, to_fraction

DEFAULT_STEP = Fraction(1, 200)
MAX_STEP = Fraction(1, 100)
MONOTONE_SAMPLES = 101

# --- resilience cost ----------------------------------------------------------


@dataclass(frozen=True)
class ResilienceCost:
    """Normalized cost ``R_D(tau_R)`` of achieving a recovery delay ``tau_R``.

    Must map ``[0, 1]`` into ``[0, 1]`` and be nonincreasing; both properties
    are checked at construction on an evenly spaced sample.
    """

    fn: Callable[[Fraction], Number]
    name: str = "custom"

    def __post_init__(self) -> None:
        prev = None
        for i in range(MONOTONE_SAMPLES):
            value = self(Fraction(i, MONOTONE_SAMPLES - 1))
            if not 0 <= value <= 1:
                raise InvalidParameterError(f"resilience cost {self.name} leaves [0, 1]: {float(value)}")
            if prev is not None and value > prev:
                raise InvalidParameterError(f"resilience cost {self.name} is not nonincreasing")
            prev = value

    def __call__(self, tau_R: Number) -> Fraction:
        return to_fraction(self.fn(to_fraction(tau_R)))

    @classmethod
    def quartic(cls) -> "ResilienceCost":
        """``(1 - tau_R) ** 4``."""
        return cls(lambda t: (1 - t) ** 4, "quartic")

    @classmethod
    def zero(cls) -> "ResilienceCost":
        return cls(lambda t: Fraction(0), "zero")


def f_D(p: GameParams, r: ResilienceCost, outcome: SpeOutcome | None = None) -> Fraction:
    """Defender's planning objective; nothing is charged when nothing is built."""
    o = outcome if outcome is not None else solve(p)
    if o.situation == "S5":
        return Fraction(0)
    return o.u_D - r(p.tau_R)


# --- grids ----------------------------------------------------------------------


def check_step(step: Number) -> Fraction:
    s = to_fraction(step)
    if not 0 < s <= MAX_STEP:
        raise InvalidParameterError(f"step must lie in (0, {MAX_STEP}], got {step}")
    return s


def grid(lo: Number, hi: Number, step: Number) -> list[Fraction]:
    """``lo, lo + step, ...`` up to and including ``hi`` when it falls on the grid."""
    lo, hi, s = to_fraction(lo), to_fraction(hi), to_fraction(step)
    if s <= 0:
        raise InvalidParameterError("grid step must be positive")
    if hi < lo:
        return []
    return [lo + i * s for i in range(math.floor((hi - lo) / s) + 1)]


def _intervals(points: Sequence[Fraction], flags: Sequence[bool]) -> list[tuple[Fraction, Fraction]]:
    """Maximal runs of flagged grid points as ``(first, last)`` pairs."""
    runs: list[tuple[Fraction, Fraction]] = []
    start = None
    for i, flag in enumerate(flags):
        if flag and start is None:
            start = points[i]
        if start is not None and (not flag or i == len(flags) - 1):
            runs.append((start, points[i] if flag else points[i - 1]))
            start = None
    return runs


def worker_count() -> int:
    raw = os.environ.get("NETGAME_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidParameterError(f"NETGAME_THREADS must be an integer, got {raw!r}") from None


# --- defender: resilience planning ----------------------------------------------


@dataclass(frozen=True)
class PlanPoint:
    tau_R: Fraction
    outcome: SpeOutcome
    f_D: Fraction

    @property
    def u_D(self) -> Fraction:
        return self.outcome.u_D

    @property
    def u_A(self) -> Fraction:
        return self.outcome.u_A


@dataclass(frozen=True)
class PlanResult:
    """Best recovery delay on the grid and the sampled objective.

    ``best_tau_R`` is ``None`` when ``F_D`` is negative everywhere.
    ``infeasible_intervals`` lists runs of grid points with ``F_D < 0``.
    """

    base: GameParams
    step: Fraction
    best_tau_R: Fraction | None
    f_D: Fraction | None
    outcome: SpeOutcome | None
    infeasible_intervals: list[tuple[Fraction, Fraction]]
    curve: list[PlanPoint] = field(repr=False)


def plan_resilience(
    base: GameParams,
    r: ResilienceCost,
    step: Number = DEFAULT_STEP,
    sizing: str = SIZING_EXACT,
) -> PlanResult:
    """Grid search of ``tau_R`` over ``[0, 1 - tau]``; ``base.tau_R`` is ignored.

    The optimum is the largest ``F_D`` among points with ``F_D >= 0``; ties
    go to the smaller ``tau_R`` (faster recovery).
    """
    s = check_step(step)
    curve = []
    for tau_R in grid(0, 1 - base.tau, s):
        p = base.with_(tau_R=tau_R)
        o = solve(p, sizing)
        curve.append(PlanPoint(tau_R, o, f_D(p, r, o)))
    best = None
    for pt in curve:
        if pt.f_D >= 0 and (best is None or pt.f_D > best.f_D):
            best = pt
    return PlanResult(
        base=base,
        step=s,
        best_tau_R=best.tau_R if best else None,
        f_D=best.f_D if best else None,
        outcome=best.outcome if best else None,
        infeasible_intervals=_intervals([pt.tau_R for pt in curve], [pt.f_D < 0 for pt in curve]),
        curve=curve,
    )


# --- attacker: timing -----------------------------------------------------------


@dataclass(frozen=True)
class TimingPoint:
    tau: Fraction
    tau_R: Fraction
    outcome: SpeOutcome

    @property
    def u_D(self) -> Fraction:
        return self.outcome.u_D

    @property
    def u_A(self) -> Fraction:
        return self.outcome.u_A


@dataclass(frozen=True)
class TimingResult:
    """Best attack time on the grid.

    ``best_tau`` is ``None`` when the attacker's payoff does not depend on
    ``tau`` over the whole grid.  ``lemma`` holds the thresholds of the
    printed timing rule for comparison (see :func:`timing_thresholds`).
    """

    base: GameParams
    step: Fraction
    best_tau: Fraction | None
    u_A: Fraction
    situation: str
    curve: list[TimingPoint] = field(repr=False)
    lemma: dict[str, Fraction] = field(default_factory=dict)


def timing_thresholds(base: GameParams) -> dict[str, Fraction]:
    """Values appearing in the printed attack-timing rule, for diagnostics.

    ``s3_printed`` is the printed lower bound ``(1 - tau_R) / ((n-1) c_D)``
    on ``tau``; ``s3_regime`` is ``1 - tau_R - (n-1) c_D``, the bound implied
    by the second-regime condition.  The ``s4_*`` entries are the three
    values whose largest admissible member is named the best ``tau`` when
    the attacked network is built late.
    """
    n, c_D, c_A, tau_R = base.n, base.c_D, base.c_A, base.tau_R
    k_A_R = max(0, math.floor(tau_R / c_A))
    return {
        "s3_printed": (1 - tau_R) / ((n - 1) * c_D),
        "s3_regime": 1 - tau_R - (n - 1) * c_D,
        "s4_cost": c_D,
        "s4_regime": 1 - tau_R - (n - 1) * c_D,
        "s4_secure": c_D * math.ceil(Fraction(n * (k_A_R - 1), 2) + 1) - tau_R,
    }


def attack_timing(
    base: GameParams, step: Number = DEFAULT_STEP, sizing: str = SIZING_EXACT
) -> TimingResult:
    """Grid search of ``tau`` over ``[0, 1 - tau_R]``; ``base.tau`` is ignored.

    Returns the grid point with the highest attacker payoff (earliest on
    ties).  In an attacked-and-abandoned stretch the payoff falls with
    ``tau``, in a built-late stretch it rises, elsewhere it is flat.
    """
    s = check_step(step)
    curve = []
    for tau in grid(0, 1 - base.tau_R, s):
        p = base.with_(tau=tau)
        curve.append(TimingPoint(tau, base.tau_R, solve(p, sizing)))
    best = max(curve, key=lambda pt: (pt.u_A, -pt.tau))
    flat = all(pt.u_A == best.u_A for pt in curve)
    return TimingResult(
        base=base,
        step=s,
        best_tau=None if flat else best.tau,
        u_A=best.u_A,
        situation=best.outcome.situation,
        curve=curve,
        lemma=timing_thresholds(base),
    )


# --- joint sweeps -----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of a sweep: inputs, the equilibrium and the planning results."""

    tau: Fraction
    tau_R: Fraction | None
    c_D: Fraction
    c_A: Fraction
    regime: str
    situation: str
    counts: tuple[int, int, int]
    u_D: Fraction | None
    u_A: Fraction | None
    f_D: Fraction | None = None

    COLUMNS = (
        "tau", "tau_R", "c_A", "c_D", "ratio", "regime", "situation",
        "e1", "eA", "e2", "u_D", "u_A", "f_D",
    )

    def row(self) -> dict[str, object]:
        e1, eA, e2 = self.counts
        return {
            "tau": self.tau, "tau_R": self.tau_R, "c_A": self.c_A, "c_D": self.c_D,
            "ratio": self.c_A / self.c_D, "regime": self.regime, "situation": self.situation,
            "e1": e1, "eA": eA, "e2": e2, "u_D": self.u_D, "u_A": self.u_A, "f_D": self.f_D,
        }


def _record(p: GameParams, plan: PlanResult) -> SweepRecord:
    if plan.outcome is None:
        return SweepRecord(p.tau, None, p.c_D, p.c_A, "", "none", (0, 0, 0), None, None, None)
    o = plan.outcome
    return SweepRecord(
        p.tau, plan.best_tau_R, p.c_D, p.c_A, o.regime, o.situation, o.counts, o.u_D, o.u_A, plan.f_D
    )


_BUILTIN_COSTS = {"quartic": ResilienceCost.quartic, "zero": ResilienceCost.zero}


def _plan_task(args: tuple[GameParams, ResilienceCost | str, Fraction, str]) -> SweepRecord:
    base, r, step, sizing = args
    if isinstance(r, str):
        # builtin costs travel to worker processes by name
        r = _BUILTIN_COSTS[r]()
    return _record(base, plan_resilience(base, r, step, sizing))


def joint_sweep(
    base: GameParams,
    r: ResilienceCost,
    taus: Iterable[Number],
    step: Number = DEFAULT_STEP,
    sizing: str = SIZING_EXACT,
) -> list[SweepRecord]:
    """Plan ``tau_R`` afresh at every attack time; ``base.tau``/``base.tau_R`` are ignored.

    With ``NETGAME_THREADS`` above 1 the attack times are planned in
    parallel worker processes; results keep the input order.
    """
    s = check_step(step)
    tasks = [(base.with_(tau=to_fraction(t), tau_R=0), r, s, sizing) for t in taus]
    workers = min(worker_count(), len(tasks))
    if workers > 1 and r.name in _BUILTIN_COSTS:
        shipped = [(b, r.name, st, sz) for b, _, st, sz in tasks]
        with ProcessPoolExecutor(workers) as pool:
            chunk = max(1, len(tasks) // (4 * workers))
            return list(pool.map(_plan_task, shipped, chunksize=chunk))
    return [_plan_task(t) for t in tasks]


def best_attack(records: Sequence[SweepRecord]) -> SweepRecord | None:
    """Attacker's preferred record of a joint sweep (earliest ``tau`` on ties)."""
    feasible = [rec for rec in records if rec.u_A is not None]
    if not feasible:
        return None
    return max(feasible, key=lambda rec: (rec.u_A, -rec.tau))


def cost_ratio_sweep(
    c_D: Number,
    ratios: Iterable[Number],
    n: int,
    r: ResilienceCost,
    taus: Sequence[Number],
    step: Number = DEFAULT_STEP,
    sizing: str = SIZING_EXACT,
) -> list[SweepRecord]:
    """Joint optimum (``tau_R`` per ``tau``, then the attacker's ``tau``) for each ``c_A / c_D``."""
    c_D = to_fraction(c_D)
    out = []
    for ratio in ratios:
        base = GameParams(n, c_D, c_D * to_fraction(ratio), 0, 0)
        best = best_attack(joint_sweep(base, r, taus, step, sizing))
        if best is None:
            best = SweepRecord(Fraction(0), None, c_D, base.c_A, "", "none", (0, 0, 0), None, None)
        out.append(best)
    return out
