"""Closed-form subgame-perfect equilibria.

Two parameter regimes are distinguished by whether the healing window
``1 - tau - tau_R`` can pay for a full spanning tree.  In the first the
defender always heals and the outcome follows a short case analysis on
``k_A_R``; in the second the candidate outcomes (tree attacked and healed,
tree attacked and abandoned, a secure network of ``delta`` links, or nothing)
are assembled and the leader picks among them.  Exact ties between
candidates go through :func:`boundary_rule`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations

from netgame.errors import (
    InvalidParameterError,
    UndefinedCaseError,
    WrongRegimeError,
)
from netgame.graph import (
    Graph,
    case4_link_count,
    case4_witness,
    cheapest_divisible_graph,
    cheapest_resilient_graph,
    edge_connectivity,
    edge_connectivity_known,
    harary,
    heal_edges,
    min_cut_edges,
    min_removals_for_components,
    ring,
    tree,
)
from netgame.model import (
    GameParams,
    StrategyTriple,
    heal_budget,
    thresholds,
    utility_A,
    utility_D,
)

log = logging.getLogger(__name__)

#: Secure-network sizing modes of the second regime.
SIZING_EXACT = "exact"
SIZING_SIX_CASE = "six-case"
SIZING_MODES = (SIZING_EXACT, SIZING_SIX_CASE)

REGIME_1 = "Regime1"
REGIME_2 = "Regime2"
NO_THREAT = "NoThreat"

#: Largest ``n`` for which the reinforced-ring witness is cut-checked on construction.
WITNESS_CHECK_MAX_N = 10


@dataclass(frozen=True)
class SpeOutcome:
    """Equilibrium summary: situation label, link counts and payoffs.

    ``topology`` names the first-stage network (``empty``, ``tree``, ``ring``,
    ``harary``, ``case4`` or ``custom``) and ``degree`` its Harary degree when
    relevant.  In the second regime ``delta`` is the secure network's link
    count and ``delta_case`` the branch of the six-case count, when defined.
    ``network`` carries the first-stage graph when it is not a named
    construction.  ``notes`` records closed-form cases that were skipped.
    """

    regime: str
    situation: str
    counts: tuple[int, int, int]
    u_D: Fraction
    u_A: Fraction
    topology: str = "empty"
    degree: int | None = None
    delta: int | None = None
    delta_case: int | None = None
    notes: tuple[str, ...] = field(default=())
    network: Graph | None = field(default=None, compare=False, repr=False)

    @property
    def links(self) -> int:
        return self.counts[0] + self.counts[2]


def boundary_rule(candidates: list[SpeOutcome]) -> SpeOutcome:
    """Leader takes the best payoff; the attacker breaks ties, then fewer links."""
    if not candidates:
        raise RuntimeError("boundary_rule needs at least one candidate")
    return max(candidates, key=lambda o: (o.u_D, o.u_A, -o.links))


# --- candidate outcomes shared by both regimes -------------------------------


def _tree_secure(p: GameParams, regime: str) -> SpeOutcome:
    return SpeOutcome(regime, "S1", (p.n - 1, 0, 0), 1 - (p.n - 1) * p.c_D, Fraction(0), "tree", 1)


def _harary_secure(p: GameParams, regime: str, degree: int) -> SpeOutcome:
    links = math.ceil(p.n * degree / 2)
    return SpeOutcome(regime, "S1", (links, 0, 0), 1 - links * p.c_D, Fraction(0), "harary", degree)


def _attacked_and_healed(p: GameParams, regime: str) -> SpeOutcome:
    return SpeOutcome(
        regime, "S2", (p.n - 1, 1, 1), 1 - p.tau_R - p.n * p.c_D, p.tau_R - p.c_A, "tree", 1
    )


def _attacked_and_abandoned(p: GameParams, k: int) -> SpeOutcome:
    return SpeOutcome(
        REGIME_2,
        "S3",
        (p.n - 1, k + 1, 0),
        p.tau - (p.n - 1) * p.c_D,
        1 - p.tau - (k + 1) * p.c_A,
        "tree",
        1,
    )


def _built_late(p: GameParams) -> SpeOutcome:
    return SpeOutcome(
        REGIME_1,
        "S4",
        (0, 0, p.n - 1),
        p.healing_window - (p.n - 1) * p.c_D,
        p.tau + p.tau_R,
    )


def _nothing(regime: str) -> SpeOutcome:
    return SpeOutcome(regime, "S5", (0, 0, 0), Fraction(0), Fraction(1))


# --- solvers -----------------------------------------------------------------


def no_threat_check(p: GameParams) -> SpeOutcome | None:
    """Outcome when one player is priced out of the game, else ``None``.

    A defender paying more than ``1/(n-1)`` per link never builds; an
    attacker paying more than ``1 - tau`` per removal never attacks, so a
    spanning tree suffices.
    """
    if p.c_D > Fraction(1, p.n - 1):
        return _nothing(NO_THREAT)
    if p.c_A > 1 - p.tau:
        # at c_D == 1/(n-1) the tree only breaks even
        return boundary_rule([_tree_secure(p, NO_THREAT), _nothing(NO_THREAT)])
    return None


def regime_gap(p: GameParams) -> Fraction:
    """Healing window minus the price of a spanning tree; positive in the first regime."""
    return p.healing_window - (p.n - 1) * p.c_D


def _regime1(p: GameParams) -> SpeOutcome:
    kr = thresholds(p).k_A_R
    if p.tau_R < p.c_A:
        return _tree_secure(p, REGIME_1)

    heal_once = _attacked_and_healed(p, REGIME_1)
    late = _built_late(p)
    if kr + 1 > p.n - 1:
        # no simple graph survives kr removals; only the attacked tree or a late build remain
        notes = (f"secure network impossible: k_A_R={kr} >= n-1",)
        if p.tau > p.c_D:
            chosen = heal_once
        elif p.tau < p.c_D:
            chosen = late
        else:
            chosen = boundary_rule([heal_once, late])
        return replace(chosen, notes=notes)

    secure = _harary_secure(p, REGIME_1, kr + 1)
    vs_healed = p.c_D * math.ceil(Fraction(p.n * (kr - 1), 2))
    vs_late = p.c_D * math.ceil(Fraction(p.n * (kr - 1), 2) + 1)
    if (p.tau > p.c_D and p.tau_R > vs_healed) or (
        p.tau < p.c_D and p.tau + p.tau_R > vs_late
    ):
        return secure
    if p.tau > p.c_D and p.tau_R < vs_healed:
        return heal_once
    if p.tau < p.c_D and p.tau + p.tau_R < vs_late:
        return late
    return boundary_rule([secure, heal_once, late])


def solve_regime1(p: GameParams) -> SpeOutcome:
    """Equilibrium when the defender always heals (``1 - tau - tau_R > (n-1) c_D``)."""
    if regime_gap(p) <= 0:
        raise WrongRegimeError("first regime needs 1 - tau - tau_R > (n-1) c_D")
    return _regime1(p)


def delta_with_case(p: GameParams) -> tuple[int, int]:
    """Secure-network link count for the second regime and the branch used (1-6)."""
    if regime_gap(p) > 0:
        raise WrongRegimeError("delta is defined for 1 - tau - tau_R <= (n-1) c_D")
    t = thresholds(p)
    n, k = p.n, t.k
    if t.k_A_R > n - 1:
        raise InvalidParameterError(f"delta needs k_A_R <= n-1, got {t.k_A_R}")
    if t.k_A_R > 1:
        if k >= 1:
            return math.ceil(Fraction(n * (t.k_A_R + 1), 2)), 1
        return math.ceil(Fraction(n * (t.k_A_H + 1), 2)), 2
    if t.k_A_R == 1:
        if t.k_A_H == k + 1:
            return n, 3
        if k == 0:
            raise UndefinedCaseError("delta: reinforced ring needs k >= 1 (division by k)")
        return case4_link_count(n, k), 4
    if t.k_A_H == k:
        return n - 1, 5
    return n, 6


def delta(p: GameParams) -> int:
    return delta_with_case(p)[0]


def secure_requirements(p: GameParams) -> tuple[int, int, int]:
    """Cut requirements ``(connectivity, parts, parts_cut)`` of an unattacked network.

    With a healing budget of ``k`` links (:func:`netgame.model.heal_budget`)
    the defender reconnects up to ``k + 1`` pieces, so any disconnecting
    attack only earns the recovery window and must cost more than ``k_A_R``
    removals.  Splitting into ``k + 2`` or more pieces is never healed and
    must cost more than ``k_A_H`` removals.
    """
    t = thresholds(p)
    k = heal_budget(p)
    parts = min(k + 2, p.n)
    connectivity = t.k_A_R + 1 if k >= 1 else 1
    return connectivity, parts, t.k_A_H + 1


def _secure_exact(p: GameParams, notes: list[str]) -> SpeOutcome | None:
    connectivity, parts, parts_cut = secure_requirements(p)
    if heal_budget(p) + 2 > p.n:
        # no attack leaves more pieces than the defender will heal
        parts, parts_cut = 2, connectivity
    g, exact = cheapest_resilient_graph(p.n, connectivity, parts, parts_cut)
    if g is None:
        notes.append("no simple graph meets the secure-network cut requirements")
        return None
    if not exact:
        notes.append(f"secure network of {g.m} links is the best named construction, not proven minimal")
    topology, degree = _name_topology(g)
    try:
        formula_d, case = delta_with_case(p)
    except (UndefinedCaseError, InvalidParameterError):
        formula_d, case = None, None
    if formula_d is not None and formula_d != g.m:
        notes.append(f"six-case count {formula_d} differs from the minimal {g.m}")
    return SpeOutcome(
        REGIME_2,
        "S1",
        (g.m, 0, 0),
        1 - g.m * p.c_D,
        Fraction(0),
        topology,
        degree,
        delta=g.m,
        delta_case=case,
        network=g if topology == "custom" else None,
    )


def _secure_six_case(p: GameParams, notes: list[str]) -> SpeOutcome | None:
    t = thresholds(p)
    if p.tau_R / p.c_A > p.n - 1 or t.k_A_H > t.k_D_H:
        return None
    try:
        d, case = delta_with_case(p)
    except UndefinedCaseError as exc:
        notes.append(str(exc))
        return None
    if d > p.n * (p.n - 1) // 2:
        notes.append(f"delta={d} exceeds the complete graph on {p.n} nodes")
        return None
    if not (1 >= d * p.c_D and 1 - p.tau >= (d - p.n + 1) * p.c_D):
        return None
    topology, degree = _delta_topology(case, t.k_A_R, t.k_A_H)
    return SpeOutcome(
        REGIME_2, "S1", (d, 0, 0), 1 - d * p.c_D, Fraction(0), topology, degree,
        delta=d, delta_case=case,
    )


def _healed_exact(p: GameParams, notes: list[str]) -> SpeOutcome | None:
    """Cheapest network the attacker cuts once and the defender reconnects.

    The attacker cuts along a minimum cut of ``lam`` links when that pays
    (``lam <= k_A_R``) and beats shattering the network beyond the healing
    budget, which must therefore cost at least ``lam + floor(x / c_A) + 1``.
    """
    k = heal_budget(p)
    if k < 1:
        return None
    g, exact = cheapest_divisible_graph(
        p.n, k + 2, math.floor(p.healing_window / p.c_A) + 1, thresholds(p).k_A_R
    )
    if g is None:
        if not exact:
            notes.append("only the path was tried for a healed-attack network")
        return None
    if g == tree(p.n):
        return _attacked_and_healed(p, REGIME_2)
    lam = edge_connectivity(g)
    topology, degree = _name_topology(g)
    return SpeOutcome(
        REGIME_2,
        "S2",
        (g.m, lam, 1),
        1 - p.tau_R - (g.m + 1) * p.c_D,
        p.tau_R - lam * p.c_A,
        topology,
        degree,
        network=g,
    )


def regime2_candidates(
    p: GameParams, sizing: str = SIZING_EXACT
) -> tuple[list[SpeOutcome], list[str]]:
    """Every defender plan the second regime compares, plus sizing notes."""
    t = thresholds(p)
    k = heal_budget(p)
    x = p.healing_window
    candidates = [_nothing(REGIME_2)]
    notes: list[str] = []
    if t.k_A_H >= k + 1:
        candidates.append(_attacked_and_abandoned(p, k))
    if sizing == SIZING_EXACT:
        healed = _healed_exact(p, notes)
        secure = _secure_exact(p, notes)
    else:
        healed = None
        if p.c_A <= p.tau_R and k > math.floor(x / p.c_A):
            healed = _attacked_and_healed(p, REGIME_2)
        secure = _secure_six_case(p, notes)
    candidates += [o for o in (healed, secure) if o is not None]
    return candidates, notes


def _regime2(p: GameParams, sizing: str = SIZING_EXACT) -> SpeOutcome:
    candidates, notes = regime2_candidates(p, sizing)
    chosen = boundary_rule(candidates)
    return replace(chosen, notes=tuple(notes)) if notes else chosen


def _name_topology(g: Graph) -> tuple[str, int | None]:
    lam = edge_connectivity_known(g)
    if lam == 1:
        return "tree", 1
    if lam == 2 and g == ring(g.n):
        return "ring", 2
    if lam is not None:
        return "harary", lam
    return "custom", None


def _delta_topology(case: int, k_A_R: int, k_A_H: int) -> tuple[str, int | None]:
    if case == 1:
        return "harary", k_A_R + 1
    if case == 2:
        return "harary", k_A_H + 1
    if case == 4:
        return "case4", None
    if case == 5:
        return "tree", 1
    return "ring", 2


def _check_sizing(sizing: str) -> None:
    if sizing not in SIZING_MODES:
        raise InvalidParameterError(f"sizing must be one of {SIZING_MODES}, got {sizing!r}")


def solve_regime2(p: GameParams, sizing: str = SIZING_EXACT) -> SpeOutcome:
    """Equilibrium when healing a fully destroyed network does not pay.

    ``sizing`` picks how the secure network is sized: ``"exact"`` finds the
    fewest links meeting the cut requirements of :func:`secure_requirements`;
    ``"six-case"`` uses :func:`delta_with_case` and its exclusion rules.
    """
    _check_sizing(sizing)
    if regime_gap(p) > 0:
        raise WrongRegimeError("second regime needs 1 - tau - tau_R <= (n-1) c_D")
    return _regime2(p, sizing)


def solve(p: GameParams, sizing: str = SIZING_EXACT) -> SpeOutcome:
    """Closed-form equilibrium for any valid parameters."""
    _check_sizing(sizing)
    outcome = no_threat_check(p)
    if outcome is not None:
        return outcome
    # at a zero gap, healing a fully cut network only breaks even and is skipped
    if regime_gap(p) > 0:
        return _regime1(p)
    return _regime2(p, sizing)


# --- witnesses ---------------------------------------------------------------


def _padded(g: Graph, links: int) -> Graph:
    """Add lexicographically first absent edges until ``g`` has ``links`` edges."""
    present = g.edge_set
    extra = []
    for e in combinations(range(g.n), 2):
        if len(present) + len(extra) >= links:
            break
        if e not in present:
            extra.append(e)
    return g.with_edges(extra)


def secure_network(p: GameParams, outcome: SpeOutcome) -> Graph:
    """First-stage network of a situation-1 outcome."""
    n = p.n
    if outcome.network is not None:
        return outcome.network
    if outcome.topology == "tree":
        return tree(n)
    if outcome.topology == "ring":
        return ring(n)
    if outcome.topology == "harary":
        return harary(n, outcome.degree)
    if outcome.topology == "case4":
        k = thresholds(p).k
        base = case4_witness(n, k)
        if n <= WITNESS_CHECK_MAX_N and base.m <= 20:
            cut = min_removals_for_components(base, k + 2)
            if cut <= k + 1:
                log.warning("reinforced ring for n=%d, k=%d has a %d-edge cut into %d parts",
                            n, k, cut, k + 2)
        elif n > WITNESS_CHECK_MAX_N:
            log.warning("reinforced ring for n=%d not cut-checked (n > %d)", n, WITNESS_CHECK_MAX_N)
        return _padded(base, outcome.counts[0])
    raise InvalidParameterError(f"no secure network for topology {outcome.topology!r}")


def witness(outcome: SpeOutcome, p: GameParams) -> StrategyTriple:
    """Concrete ``(E1, E_A, E2)`` realizing ``outcome`` for ``p``."""
    n = p.n
    path = tree(n).edges
    s = outcome.situation
    if s == "S1":
        triple = StrategyTriple(secure_network(p, outcome).edge_set)
    elif s == "S2" and outcome.network is not None:
        g = outcome.network
        cut = min_cut_edges(g)
        triple = StrategyTriple(g.edge_set, cut, heal_edges(g.without_edges(cut)))
    elif s == "S2":
        triple = StrategyTriple(frozenset(path), frozenset(path[:1]), frozenset(path[:1]))
    elif s == "S3":
        cut = outcome.counts[1]
        triple = StrategyTriple(frozenset(path), frozenset(path[:cut]))
    elif s == "S4":
        triple = StrategyTriple(e2=frozenset(path))
    elif s == "S5":
        triple = StrategyTriple()
    else:
        raise InvalidParameterError(f"unknown situation {s!r}")
    if triple.counts != outcome.counts or (utility_D(p, triple), utility_A(p, triple)) != (
        outcome.u_D,
        outcome.u_A,
    ):
        raise InvalidParameterError("outcome is inconsistent with the given parameters")
    return triple
