"""Grid comparison of the closed form against the exhaustive oracle.

Each grid point is solved both ways.  Points lying on a switching condition
of the closed form (within ``eps``) are flagged as boundary points; there the
two routes may settle a payoff tie differently, so only the payoffs must
agree.  Everywhere else situation, link counts and payoffs must match
exactly.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from netgame.closedform import (
    SIZING_EXACT,
    SpeOutcome,
    no_threat_check,
    regime2_candidates,
    regime_gap,
    solve,
)
from netgame.errors import InvalidParameterError, ResourceLimitError
from netgame.model import GameParams, Number, thresholds, to_fraction
from netgame.oracle import DEFAULT_LIMIT_N, solve_exhaustive
from netgame.planning import worker_count
from netgame.records import format_number

EXACT = "exact"
BOUNDARY = "boundary-consistent"
MISMATCH = "MISMATCH"

DEFAULT_EPS = Fraction(1, 10**9)

#: Named grids: (denominator of the sampled rationals, number of points).
GRIDS = {"default": (997, 500), "lattice": (20, 500)}

REPORT_COLUMNS = (
    "n", "c_D", "c_A", "tau", "tau_R", "boundary", "reasons",
    "cf_situation", "cf_e1", "cf_eA", "cf_e2", "cf_u_D", "cf_u_A",
    "or_situation", "or_e1", "or_eA", "or_e2", "or_u_D", "or_u_A", "match",
)

Solver = Callable[[GameParams], SpeOutcome]


# --- boundary classification -------------------------------------------------


def _near(a: Fraction, b: Fraction, eps: Fraction) -> bool:
    return abs(a - b) <= eps


def _near_integer(x: Fraction, eps: Fraction) -> bool:
    return abs(x - round(x)) <= eps


def boundary_reasons(p: GameParams, eps: Number = DEFAULT_EPS) -> tuple[str, ...]:
    """Switching conditions of the closed form that ``p`` lies on, within ``eps``.

    Covers the domain edges, the no-threat thresholds, the regime border,
    the integer floor arguments behind every threshold, the first-regime
    comparisons and payoff ties among the second-regime candidates.
    """
    eps = to_fraction(eps)
    x = p.healing_window
    out: list[str] = []

    def near(name: str, a: Fraction, b: Fraction) -> None:
        if _near(a, b, eps):
            out.append(name)

    near("tau=0", p.tau, Fraction(0))
    near("tau_R=0", p.tau_R, Fraction(0))
    near("tau+tau_R=1", p.tau + p.tau_R, Fraction(1))
    near("c_D=1/(n-1)", p.c_D, Fraction(1, p.n - 1))
    near("c_A=1-tau", p.c_A, 1 - p.tau)
    near("regime gap=0", regime_gap(p), Fraction(0))
    for name, ratio in (
        ("tau_R/c_A", p.tau_R / p.c_A),
        ("(1-tau)/c_A", (1 - p.tau) / p.c_A),
        ("(1-tau)/c_D", (1 - p.tau) / p.c_D),
        ("x/c_D", x / p.c_D),
        ("x/c_A", x / p.c_A),
    ):
        if ratio >= 0 and _near_integer(ratio, eps):
            out.append(f"{name} integer")

    kr = thresholds(p).k_A_R
    near("tau_R=c_A", p.tau_R, p.c_A)
    near("tau=c_D", p.tau, p.c_D)
    near("secure vs healed", p.tau_R, p.c_D * math.ceil(Fraction(p.n * (kr - 1), 2)))
    near("secure vs late", p.tau + p.tau_R, p.c_D * math.ceil(Fraction(p.n * (kr - 1), 2) + 1))

    if no_threat_check(p) is None and regime_gap(p) <= 0:
        candidates, _ = regime2_candidates(p, SIZING_EXACT)
        payoffs = sorted((o.u_D for o in candidates), reverse=True)
        if len(payoffs) > 1 and _near(payoffs[0], payoffs[1], eps):
            out.append("candidate payoff tie")
    return tuple(out)


# --- comparison --------------------------------------------------------------


@dataclass(frozen=True)
class OracleSummary:
    situation: str
    counts: tuple[int, int, int]
    u_D: Fraction
    u_A: Fraction
    patterns: frozenset[tuple[int, int, int]]


@dataclass(frozen=True)
class VerifyPoint:
    params: GameParams
    closed: SpeOutcome
    oracle: OracleSummary
    reasons: tuple[str, ...]
    match: str

    @property
    def boundary(self) -> bool:
        return bool(self.reasons)

    def row(self) -> dict[str, str]:
        p, c, o = self.params, self.closed, self.oracle
        values = {
            "n": p.n, "c_D": p.c_D, "c_A": p.c_A, "tau": p.tau, "tau_R": p.tau_R,
            "cf_e1": c.counts[0], "cf_eA": c.counts[1], "cf_e2": c.counts[2],
            "cf_u_D": c.u_D, "cf_u_A": c.u_A,
            "or_e1": o.counts[0], "or_eA": o.counts[1], "or_e2": o.counts[2],
            "or_u_D": o.u_D, "or_u_A": o.u_A,
        }
        row = {k: format_number(v) for k, v in values.items()}
        row.update(
            boundary="yes" if self.boundary else "no",
            reasons=";".join(self.reasons),
            cf_situation=c.situation,
            or_situation=o.situation,
            match=self.match,
        )
        return {k: row[k] for k in REPORT_COLUMNS}


def classify(closed: SpeOutcome, oracle: OracleSummary, boundary: bool) -> str:
    payoffs = (closed.u_D, closed.u_A) == (oracle.u_D, oracle.u_A)
    if payoffs and closed.situation == oracle.situation and closed.counts == oracle.counts:
        return EXACT
    if payoffs and boundary:
        return BOUNDARY
    return MISMATCH


def _oracle_summary(p: GameParams, limit_n: int) -> OracleSummary:
    r = solve_exhaustive(p, limit_n=limit_n, max_triples=1)
    return OracleSummary(r.situation, r.counts, r.u_D, r.u_A, frozenset(r.patterns))


def verify_point(
    p: GameParams,
    eps: Number = DEFAULT_EPS,
    limit_n: int = DEFAULT_LIMIT_N,
    solver: Solver = solve,
) -> VerifyPoint:
    reasons = boundary_reasons(p, eps)
    closed = solver(p)
    oracle = _oracle_summary(p, limit_n)
    return VerifyPoint(p, closed, oracle, reasons, classify(closed, oracle, bool(reasons)))


def _point_task(args: tuple[GameParams, Fraction, int]) -> VerifyPoint:
    return verify_point(*args)


@dataclass(frozen=True)
class VerifyReport:
    points: list[VerifyPoint]

    def count(self, match: str) -> int:
        return sum(pt.match == match for pt in self.points)

    @property
    def mismatches(self) -> list[VerifyPoint]:
        return [pt for pt in self.points if pt.match == MISMATCH]

    @property
    def interior(self) -> list[VerifyPoint]:
        return [pt for pt in self.points if not pt.boundary]

    def summary(self) -> str:
        return (
            f"total={len(self.points)} exact={self.count(EXACT)} "
            f"boundary={self.count(BOUNDARY)} mismatch={self.count(MISMATCH)}"
        )

    def rows(self) -> list[dict[str, str]]:
        return [pt.row() for pt in self.points]


def verify_grid(
    points: Iterable[GameParams],
    eps: Number = DEFAULT_EPS,
    limit_n: int = DEFAULT_LIMIT_N,
    solver: Solver = solve,
) -> VerifyReport:
    """Compare closed form and oracle on every grid point.

    ``solver`` replaces the closed form, which lets the harness be checked
    against a deliberately broken solver.  With ``NETGAME_THREADS`` above 1
    and the default solver the oracle runs in worker processes; the report
    keeps grid order either way.
    """
    points = list(points)
    too_big = [p.n for p in points if p.n > limit_n]
    if too_big:
        raise ResourceLimitError(f"grid has n={max(too_big)} above limit {limit_n}")
    eps = to_fraction(eps)
    workers = min(worker_count(), len(points))
    if workers > 1 and solver is solve:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tasks = [(p, eps, limit_n) for p in points]
            return VerifyReport(list(pool.map(_point_task, tasks, chunksize=16)))
    return VerifyReport([verify_point(p, eps, limit_n, solver) for p in points])


# --- grids -------------------------------------------------------------------


def random_grid(
    ns: Sequence[int], size: int, denominator: int, seed: int = 0
) -> list[GameParams]:
    """Reproducible random rational points with the given denominator.

    ``tau + tau_R`` stays within ``[0, 1]``; ``c_D`` reaches half again past
    the no-threat price ``1/(n-1)`` so that case is exercised too.
    """
    if size < 0 or denominator < 2 or not ns:
        raise InvalidParameterError("grid needs n values, size >= 0 and denominator >= 2")
    rng = random.Random(seed)
    d = denominator
    out = []
    for _ in range(size):
        n = rng.choice(list(ns))
        tau = rng.randint(0, d)
        tau_R = rng.randint(0, d - tau)
        c_D = rng.randint(1, max(1, (3 * d) // (2 * (n - 1))))
        c_A = rng.randint(1, d)
        out.append(GameParams(n, *(Fraction(v, d) for v in (c_D, c_A, tau, tau_R))))
    return out


def named_grid(name: str, ns: Sequence[int], seed: int = 0) -> list[GameParams]:
    if name not in GRIDS:
        raise InvalidParameterError(f"unknown grid {name!r}; choose from {', '.join(GRIDS)}")
    denominator, size = GRIDS[name]
    return random_grid(ns, size, denominator, seed)
