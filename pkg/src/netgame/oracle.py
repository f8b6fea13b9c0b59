"""Exhaustive backward induction over every strategy triple for small ``n``.

Edges of the complete graph are indexed in lexicographic pair order and
edge sets are integer bitmasks.  For every initial network ``E1`` the
attacker's options are summarized by the fewest removals that leave exactly
``c`` components, for each ``c``; those minima are computed for all ``E1``
at once with a subset-maximum transform over the surviving-edge masks, which
visits every ``(E1, E_A)`` pair implicitly.  Initial networks with identical
summaries behave identically in the game, so they are grouped into classes
and the per-parameter work is one pass over the classes.

The healing stage uses the binary heal/no-heal rule of
:func:`netgame.model.heals`; :func:`stage3_exhaustive` checks that rule
against a full enumeration of healing sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from netgame.errors import ResourceLimitError
from netgame.graph import Edge, Graph, heal_edges, num_components
from netgame.model import (
    GameParams,
    StrategyTriple,
    heals,
    situation_of,
    utility_A,
    utility_D,
)

DEFAULT_LIMIT_N = 6


def edge_index(n: int) -> tuple[Edge, ...]:
    return tuple(combinations(range(n), 2))


def mask_to_edges(mask: int, edges: tuple[Edge, ...]) -> frozenset[Edge]:
    return frozenset(e for b, e in enumerate(edges) if mask >> b & 1)


def mask_bits(mask: int) -> tuple[int, ...]:
    out = []
    b = 0
    while mask:
        if mask & 1:
            out.append(b)
        mask >>= 1
        b += 1
    return tuple(out)


def _components_of_mask(n: int, mask: int, edges: tuple[Edge, ...]) -> int:
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    count = n
    for b in mask_bits(mask):
        i, j = edges[b]
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            count -= 1
    return count


@dataclass(frozen=True)
class _Tables:
    n: int
    edges: tuple[Edge, ...]
    comp: np.ndarray  # components of every edge mask
    pop: np.ndarray  # popcount of every edge mask
    # class key -> E1 masks; key = (|E1|, min removals for exactly c components, c = 1..n)
    classes: dict[tuple[int, tuple[int, ...]], tuple[int, ...]]


@lru_cache(maxsize=None)
def _tables(n: int) -> _Tables:
    edges = edge_index(n)
    m = len(edges)
    size = 1 << m
    comp = np.fromiter(
        (_components_of_mask(n, mask, edges) for mask in range(size)), dtype=np.int16, count=size
    )
    pop = np.array([bin(mask).count("1") for mask in range(size)], dtype=np.int16)

    # keep[c, E1] = max |R| over R subset of E1 with exactly c components (-1 if none)
    keep = np.full((n + 1, size), -1, dtype=np.int16)
    keep[comp, np.arange(size)] = pop
    for b in range(m):
        view = keep.reshape(n + 1, -1, 2, 1 << b)
        np.maximum(view[:, :, 1, :], view[:, :, 0, :], out=view[:, :, 1, :])

    removals = np.where(keep[1:] >= 0, pop[None, :] - keep[1:], -1).T
    classes: dict[tuple[int, tuple[int, ...]], list[int]] = {}
    for mask in range(size):
        key = (int(pop[mask]), tuple(int(r) for r in removals[mask]))
        classes.setdefault(key, []).append(mask)
    return _Tables(
        n=n,
        edges=edges,
        comp=comp,
        pop=pop,
        classes={k: tuple(v) for k, v in classes.items()},
    )


@dataclass(frozen=True)
class _Reply:
    """Attacker's reply to one class of initial networks and its consequences."""

    removals: int
    components: int
    healed: bool
    u_D: Fraction
    u_A: Fraction
    links: int  # |E1| + |E2|
    pattern: tuple[int, int, int]


def _attack_options(p: GameParams, size: int, removals: tuple[int, ...]):
    x = p.healing_window
    before = int(removals[0] == 0)
    for c, r in enumerate(removals, start=1):
        if r < 0:
            continue
        during = int(c == 1)
        healed = heals(p, c)
        after = int(during or healed)
        u_A = p.tau * (1 - before) + p.tau_R * (1 - during) + x * (1 - after) - p.c_A * r
        e2 = c - 1 if healed else 0
        u_D = p.tau * before + p.tau_R * during + x * after - p.c_D * (size + e2)
        yield _Reply(r, c, healed, u_D, u_A, size + e2, (before, during, after))


def _best_replies(p: GameParams, size: int, removals: tuple[int, ...]) -> list[_Reply]:
    """Attacker-optimal replies: max payoff, then most removals."""
    options = list(_attack_options(p, size, removals))
    top = max((o.u_A, o.removals) for o in options)
    return [o for o in options if (o.u_A, o.removals) == top]


@dataclass
class OracleResult:
    """Equilibrium found by exhaustive search.

    ``best_triples`` lists one triple per surviving initial network, with
    the attacker's lexicographically smallest optimal attack and the
    canonical healing set.  ``evaluations`` counts the ``(E1, E_A)`` pairs
    covered, i.e. ``3 ** C(n, 2)``.
    """

    params: GameParams
    best_triples: list[StrategyTriple]
    u_D: Fraction
    u_A: Fraction
    situation: str
    counts: tuple[int, int, int]
    evaluations: int
    patterns: set[tuple[int, int, int]] = field(default_factory=set)

    @property
    def witness(self) -> StrategyTriple:
        return self.best_triples[0]


def _lexmin_attack(
    tables: _Tables, e1: int, removals: int, components: int
) -> int:
    bits = mask_bits(e1)
    best = None
    for chosen in combinations(bits, removals):
        attack = 0
        for b in chosen:
            attack |= 1 << b
        if int(tables.comp[e1 & ~attack]) == components:
            # combinations() yields index tuples in lexicographic order
            best = attack
            break
    if best is None:
        raise AssertionError("class summary promised an attack that does not exist")
    return best


def _resolve_class(
    p: GameParams, tables: _Tables, size: int, removals: tuple[int, ...], members: tuple[int, ...]
) -> list[tuple[int, _Reply]]:
    replies = _best_replies(p, size, removals)
    outcomes = {(r.u_D, r.links) for r in replies}
    if len(outcomes) == 1:
        return [(mask, replies[0]) for mask in members]
    # Attacker ties with different consequences for the defender: settle each
    # network by the lexicographically smallest attack set.
    out = []
    for mask in members:
        chosen = min(
            replies,
            key=lambda r: mask_bits(_lexmin_attack(tables, mask, r.removals, r.components)),
        )
        out.append((mask, chosen))
    return out


def solve_exhaustive(
    p: GameParams, limit_n: int = DEFAULT_LIMIT_N, max_triples: int | None = None
) -> OracleResult:
    """Backward induction over every ``(E1, E_A)`` pair.

    The defender's ties are broken by higher attacker payoff, then fewer
    links ``|E1| + |E2|``, then the lexicographically smallest ``E1``.
    All networks surviving the first three criteria are reported.
    """
    if p.n > limit_n:
        raise ResourceLimitError(f"exhaustive search limited to n <= {limit_n}, got n={p.n}")
    tables = _tables(p.n)
    best_key = None
    survivors: list[tuple[int, _Reply]] = []
    for (size, removals), members in tables.classes.items():
        for mask, reply in _resolve_class(p, tables, size, removals, members):
            key = (reply.u_D, reply.u_A, -reply.links)
            if best_key is None or key > best_key:
                best_key = key
                survivors = [(mask, reply)]
            elif key == best_key:
                survivors.append((mask, reply))
    survivors.sort(key=lambda item: mask_bits(item[0]))

    triples = []
    chosen = survivors if max_triples is None else survivors[:max_triples]
    for mask, reply in chosen:
        e1 = mask_to_edges(mask, tables.edges)
        attack = _lexmin_attack(tables, mask, reply.removals, reply.components)
        eA = mask_to_edges(attack, tables.edges)
        survivor = Graph(p.n, tuple(e1 - eA))
        e2 = heal_edges(survivor) if reply.healed else frozenset()
        triples.append(StrategyTriple(e1, eA, e2))

    head_mask, head = survivors[0]
    size = int(tables.pop[head_mask])
    return OracleResult(
        params=p,
        best_triples=triples,
        u_D=head.u_D,
        u_A=head.u_A,
        situation=situation_of(head.pattern) or "invalid",
        counts=(size, head.removals, head.links - size),
        evaluations=3 ** len(tables.edges),
        patterns={r.pattern for _, r in survivors},
    )


def solve_naive(p: GameParams, limit_n: int = 5) -> tuple[StrategyTriple, Fraction, Fraction]:
    """Direct nested enumeration with the same tie-breaks; for cross-checks only."""
    if p.n > limit_n:
        raise ResourceLimitError(f"naive search limited to n <= {limit_n}, got n={p.n}")
    tables = _tables(p.n)
    edges = tables.edges
    best = None
    for e1 in range(1 << len(edges)):
        bits = mask_bits(e1)
        before = int(tables.comp[e1] == 1)
        reply = None
        for r in range(len(bits) + 1):
            # combinations() is lexicographic, so the first of equal keys is kept
            for chosen in combinations(bits, r):
                attack = sum(1 << b for b in chosen)
                c = int(tables.comp[e1 & ~attack])
                during = int(c == 1)
                after = int(during or heals(p, c))
                u_A = (
                    p.tau * (1 - before)
                    + p.tau_R * (1 - during)
                    + p.healing_window * (1 - after)
                    - p.c_A * r
                )
                if reply is None or (u_A, r) > reply[0]:
                    reply = ((u_A, r), attack, c)
        _, attack, c = reply
        e1_set = mask_to_edges(e1, edges)
        eA_set = mask_to_edges(attack, edges)
        survivor = Graph(p.n, tuple(e1_set - eA_set))
        e2_set = heal_edges(survivor) if heals(p, c) else frozenset()
        triple = StrategyTriple(e1_set, eA_set, e2_set)
        u_D, u_A = utility_D(p, triple), utility_A(p, triple)
        key = (u_D, u_A, -(len(e1_set) + len(e2_set)))
        if best is None or key > best[0] or (key == best[0] and bits < best[1]):
            best = (key, bits, triple, u_D, u_A)
    return best[2], best[3], best[4]


def stage3_exhaustive(
    p: GameParams, e1: frozenset[Edge], eA: frozenset[Edge]
) -> tuple[Fraction, frozenset[Edge]]:
    """Best defender payoff over every legal healing set, and one maximizer."""
    edges = edge_index(p.n)
    survivor = e1 - eA
    candidates = [e for e in edges if e not in survivor]
    best_value, best_set = None, frozenset()
    for r in range(len(candidates) + 1):
        for chosen in combinations(candidates, r):
            e2 = frozenset(chosen)
            value = utility_D(p, StrategyTriple(e1, eA, e2))
            if best_value is None or value > best_value:
                best_value, best_set = value, e2
    return best_value, best_set


def connectivity_pattern(p: GameParams, triple: StrategyTriple) -> tuple[int, int, int]:
    return triple.indicators(p.n)


def components_after_attack(p: GameParams, triple: StrategyTriple) -> int:
    return num_components(Graph(p.n, tuple(triple.e1 - triple.eA)))
