"""Undirected simple graphs on labeled nodes ``0..n-1``.

Graphs are immutable values: edges are normalized to ``(i, j)`` with
``i < j`` and kept in sorted order, so equality, hashing and serialization
are deterministic.  The module also holds the topology constructors used
by the equilibrium witnesses and a brute-force cut search for small graphs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable

import numpy as np

from netgame.errors import InvalidGraphError, InvalidParameterError, ResourceLimitError

Edge = tuple[int, int]

#: Hard cap on the number of edges accepted by :func:`min_removals_for_components`.
CUT_SEARCH_EDGE_BUDGET = 20

#: Largest ``n`` for which :func:`cut_profile` enumerates node partitions.
PARTITION_MAX_N = 10


def normalize_edge(i: int, j: int) -> Edge:
    i, j = int(i), int(j)
    if i == j:
        raise InvalidGraphError(f"self-loop at node {i}")
    return (i, j) if i < j else (j, i)


def edge_set(pairs: Iterable[Iterable[int]]) -> frozenset[Edge]:
    """Normalize an iterable of node pairs into a frozen set of edges."""
    out = set()
    for pair in pairs:
        i, j = pair
        out.add(normalize_edge(i, j))
    return frozenset(out)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with ``n`` nodes and a sorted tuple of edges."""

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidGraphError(f"graph needs at least one node, got n={self.n}")
        normalized = edge_set(self.edges)
        for i, j in normalized:
            if i < 0 or j >= self.n:
                raise InvalidGraphError(f"edge ({i}, {j}) out of range for n={self.n}")
        object.__setattr__(self, "edges", tuple(sorted(normalized)))

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Iterable[int]]) -> "Graph":
        return cls(n, tuple(edge_set(pairs)))

    @property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: object) -> bool:
        if not isinstance(edge, tuple) or len(edge) != 2:
            return False
        return normalize_edge(*edge) in self.edge_set

    def with_edges(self, extra: Iterable[Iterable[int]]) -> "Graph":
        return Graph(self.n, self.edges + tuple(edge_set(extra)))

    def without_edges(self, removed: Iterable[Iterable[int]]) -> "Graph":
        drop = edge_set(removed)
        return Graph(self.n, tuple(e for e in self.edges if e not in drop))

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


class _DisjointSet:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # smaller root wins so class representatives are the lowest member
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def components(g: Graph) -> list[list[int]]:
    """Connected components, each sorted, ordered by their lowest member."""
    ds = _DisjointSet(g.n)
    for i, j in g.edges:
        ds.union(i, j)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(ds.find(v), []).append(v)
    return sorted(groups.values(), key=lambda c: c[0])


def num_components(g: Graph) -> int:
    ds = _DisjointSet(g.n)
    count = g.n
    for i, j in g.edges:
        if ds.union(i, j):
            count -= 1
    return count


def is_connected(g: Graph) -> bool:
    return num_components(g) == 1


def min_degree(g: Graph) -> int:
    return min(g.degrees())


# --- constructors -----------------------------------------------------------


@lru_cache(maxsize=256)
def tree(n: int) -> Graph:
    """Path graph ``0-1-...-(n-1)``; the canonical spanning tree."""
    if n < 1:
        raise InvalidParameterError(f"tree needs n >= 1, got {n}")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)))


@lru_cache(maxsize=256)
def ring(n: int) -> Graph:
    if n < 3:
        raise InvalidParameterError(f"ring needs n >= 3, got {n}")
    return Graph(n, tuple(normalize_edge(i, (i + 1) % n) for i in range(n)))


@lru_cache(maxsize=256)
def harary(n: int, d: int) -> Graph:
    """Harary graph on ``n`` nodes surviving the removal of any ``d - 1`` edges.

    Uses exactly ``ceil(d * n / 2)`` edges for ``d >= 2``.  Circulant offsets
    ``1..d//2`` are added first; odd ``d`` is completed with diameter chords
    (``n`` even) or the classical near-diameter chords (``n`` odd).
    ``d == 1`` gives the path :func:`tree`.
    """
    if n < 2:
        raise InvalidParameterError(f"harary needs n >= 2, got {n}")
    if not 1 <= d <= n - 1:
        raise InvalidParameterError(f"harary degree must lie in [1, {n - 1}], got {d}")
    if d == 1:
        return tree(n)
    pairs = set()
    for offset in range(1, d // 2 + 1):
        for i in range(n):
            pairs.add(normalize_edge(i, (i + offset) % n))
    if d % 2 == 1:
        if n % 2 == 0:
            for i in range(n // 2):
                pairs.add(normalize_edge(i, i + n // 2))
        else:
            half = (n - 1) // 2
            for i in range((n + 1) // 2):
                pairs.add(normalize_edge(i, (i + half) % n))
    return Graph(n, tuple(pairs))


@lru_cache(maxsize=256)
def case4_witness(n: int, k: int) -> Graph:
    """Ring reinforced by a chain of chords through the multiples of ``k``.

    Chords join ``k*j`` to ``k*(j+1)`` (mod ``n``) for ``j = 1..n//k - 1``.
    When ``n // k`` is even the chain is closed back to node 0; otherwise
    node 0 is tied to node ``n // 2``.  Chords that coincide with ring edges
    collapse, so the edge count can fall below the closed-form link count.
    """
    if n < 4:
        raise InvalidParameterError(f"case4_witness needs n >= 4, got {n}")
    if not 1 <= k < n - 1:
        raise InvalidParameterError(f"case4_witness needs 1 <= k < n-1, got k={k}")
    pairs = set(ring(n).edges)
    q = n // k
    for j in range(1, q):
        a, b = (k * j) % n, (k * (j + 1)) % n
        if a != b:
            pairs.add(normalize_edge(a, b))
    if q % 2 == 0:
        last = (k * q) % n
        if last != 0:
            pairs.add(normalize_edge(last, 0))
    else:
        pairs.add(normalize_edge(0, n // 2))
    return Graph(n, tuple(pairs))


def case4_link_count(n: int, k: int) -> int:
    """Link count the closed form charges for the reinforced-ring network."""
    if k < 1:
        raise InvalidParameterError("link count undefined for k < 1")
    q = n // k
    return n + q + (q + 1) // 2


@lru_cache(maxsize=256)
def complete(n: int) -> Graph:
    return Graph(n, tuple(combinations(range(n), 2)))


def empty(n: int) -> Graph:
    return Graph(n)


# --- analytics --------------------------------------------------------------


def min_removals_for_components(g: Graph, m: int) -> int:
    """Fewest edge removals leaving at least ``m`` connected components.

    Exhaustive search over removal sets in increasing size with early exit.
    Graphs with more than :data:`CUT_SEARCH_EDGE_BUDGET` edges are refused.
    """
    if not 2 <= m <= g.n:
        raise InvalidParameterError(f"component target must lie in [2, {g.n}], got {m}")
    if g.m > CUT_SEARCH_EDGE_BUDGET:
        raise ResourceLimitError(
            f"cut search limited to {CUT_SEARCH_EDGE_BUDGET} edges, graph has {g.m}"
        )
    base = num_components(g)
    if base >= m:
        return 0
    edges = g.edges
    for r in range(1, g.m + 1):
        # each removal splits at most one component
        if base + r < m:
            continue
        for removed in combinations(range(g.m), r):
            drop = set(removed)
            kept = tuple(e for idx, e in enumerate(edges) if idx not in drop)
            if num_components(Graph(g.n, kept)) >= m:
                return r
    # removing every edge leaves n >= m components
    raise AssertionError("unreachable: full removal always reaches n components")


@lru_cache(maxsize=None)
def _partitions(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Every set partition of ``range(n)`` as block labels, and its block count."""
    rows = [[0]]
    for _ in range(1, n):
        rows = [row + [b] for row in rows for b in range(max(row) + 2)]
    labels = np.array(rows, dtype=np.int8).reshape(len(rows), n)
    return labels, labels.max(axis=1) + 1


@lru_cache(maxsize=4096)
def cut_profile(g: Graph) -> tuple[int, ...]:
    """Fewest removals leaving at least ``c`` components, for ``c = 1..n``.

    Computed over node partitions rather than edge subsets: removing the
    edges that cross a partition into ``c`` blocks leaves at least ``c``
    components, and every such removal arises this way.  Limited to
    ``n <= PARTITION_MAX_N`` (Bell(10) = 115975 partitions).
    """
    if g.n > PARTITION_MAX_N:
        raise ResourceLimitError(f"partition search limited to n <= {PARTITION_MAX_N}, got {g.n}")
    labels, blocks = _partitions(g.n)
    if g.m:
        ends = np.array(g.edges)
        crossing = (labels[:, ends[:, 0]] != labels[:, ends[:, 1]]).sum(axis=1)
    else:
        crossing = np.zeros(len(labels), dtype=np.int64)
    best = np.full(g.n + 1, g.m, dtype=np.int64)
    np.minimum.at(best, blocks, crossing)
    # more pieces never come cheaper than fewer
    out = np.minimum.accumulate(best[1:][::-1])[::-1]
    return tuple(int(v) for v in out)


def edge_connectivity(g: Graph) -> int:
    """Smallest number of edge removals that disconnects ``g`` (0 if already disconnected)."""
    if g.n == 1:
        return 0
    if g.n <= PARTITION_MAX_N:
        return cut_profile(g)[1]
    return min_removals_for_components(g, 2)


def min_cut_edges(g: Graph) -> frozenset[Edge]:
    """Lexicographically first smallest edge set whose removal disconnects ``g``."""
    lam = edge_connectivity(g)
    for removed in combinations(g.edges, lam):
        if not is_connected(g.without_edges(removed)):
            return frozenset(removed)
    raise InvalidGraphError("graph is already disconnected")


def has_cut(g: Graph, max_removals: int, parts: int) -> bool:
    """Whether removing at most ``max_removals`` edges can leave ``parts`` or more components."""
    if g.n <= PARTITION_MAX_N:
        return cut_profile(g)[parts - 1] <= max_removals
    base = num_components(g)
    if base >= parts:
        return True
    edges = g.edges
    for r in range(parts - base, max_removals + 1):
        for removed in combinations(range(len(edges)), r):
            drop = set(removed)
            kept = tuple(e for idx, e in enumerate(edges) if idx not in drop)
            if num_components(Graph(g.n, kept)) >= parts:
                return True
    return False


#: Largest ``n`` for which :func:`cheapest_resilient_graph` searches exhaustively.
EXHAUSTIVE_DESIGN_MAX_N = 6


def _complete_parts_cut(n: int, parts: int) -> int:
    # cheapest split of K_n into `parts` pieces isolates parts-1 single nodes
    big = n - parts + 1
    return n * (n - 1) // 2 - big * (big - 1) // 2


def resilience_lower_bound(n: int, connectivity: int, parts: int, parts_cut: int) -> int:
    """Edge-count lower bound for :func:`cheapest_resilient_graph`.

    Degrees must reach the connectivity target, and a graph with ``m`` edges
    can always be split into ``parts`` pieces by removing ``m - n + parts``
    edges (keep a spanning forest with ``parts`` trees).
    """
    need_degree = max(connectivity, parts_cut if parts == 2 else 1)
    bound = max(n - 1, n - parts + parts_cut)
    if need_degree >= 2:
        bound = max(bound, math.ceil(n * need_degree / 2))
    return bound


def _resilient(g: Graph, connectivity: int, parts: int, parts_cut: int) -> bool:
    if g.n <= PARTITION_MAX_N:
        profile = cut_profile(g)
        return profile[1] >= connectivity and profile[parts - 1] >= parts_cut
    if connectivity > 1 and has_cut(g, connectivity - 1, 2):
        return False
    return not has_cut(g, parts_cut - 1, parts)


@lru_cache(maxsize=None)
def _profile_table(n: int) -> np.ndarray:
    """Cut profile of every edge subset of ``K_n``, rows indexed by edge bitmask.

    Edge bit ``b`` is the ``b``-th pair of ``combinations(range(n), 2)``.
    Column ``c - 1`` holds the fewest removals leaving ``c`` or more pieces.
    """
    universe = list(combinations(range(n), 2))
    labels, blocks = _partitions(n)
    cross = np.zeros(len(labels), dtype=np.int64)
    for b, (i, j) in enumerate(universe):
        cross |= (labels[:, i] != labels[:, j]).astype(np.int64) << b
    masks = np.arange(1 << len(universe), dtype=np.int64)
    table = np.empty((len(masks), n), dtype=np.int64)
    for c in range(1, n + 1):
        sel = cross[blocks == c]
        table[:, c - 1] = np.bitwise_count(masks[:, None] & sel[None, :]).min(axis=1)
    return np.minimum.accumulate(table[:, ::-1], axis=1)[:, ::-1]


def _first_design(n: int, ok: np.ndarray) -> Graph | None:
    """Fewest-edge graph among the flagged masks; ties go to the lexicographically first."""
    masks = np.flatnonzero(ok)
    if not len(masks):
        return None
    sizes = np.bitwise_count(masks)
    smallest = masks[sizes == sizes.min()]
    universe = list(combinations(range(n), 2))
    chosen = min(
        tuple(b for b in range(len(universe)) if int(mask) >> b & 1) for mask in smallest
    )
    return Graph(n, tuple(universe[b] for b in chosen))


def _constructive_design(
    n: int, connectivity: int, parts: int, parts_cut: int
) -> Graph | None:
    candidates = [tree(n)]
    if n >= 3:
        candidates.append(ring(n))
    candidates += [harary(n, d) for d in range(2, n)]
    if n >= 4 and 1 <= parts - 2 < n - 1:
        candidates.append(case4_witness(n, parts - 2))
    for g in sorted(candidates, key=lambda h: (h.m, h.edges)):
        lam = edge_connectivity_known(g)
        if lam is not None:
            if lam < connectivity:
                continue
            # every piece keeps at least lam boundary edges
            if math.ceil(parts * lam / 2) >= parts_cut:
                return g
        if g.n > PARTITION_MAX_N and g.m > CUT_SEARCH_EDGE_BUDGET:
            continue
        if _resilient(g, connectivity, parts, parts_cut):
            return g
    return None


def edge_connectivity_known(g: Graph) -> int | None:
    """Edge connectivity of the named constructions, recognized structurally."""
    if g == tree(g.n):
        return 1
    for d in range(2, g.n):
        if g.m == math.ceil(d * g.n / 2) and g == harary(g.n, d):
            return d
    return None


def cheapest_resilient_graph(
    n: int, connectivity: int, parts: int, parts_cut: int
) -> tuple[Graph | None, bool]:
    """Fewest-edge connected graph meeting two cut requirements.

    Requirements: no removal of fewer than ``connectivity`` edges disconnects
    the graph, and no removal of fewer than ``parts_cut`` edges leaves
    ``parts`` or more components.  Returns ``(graph, exact)``; ``graph`` is
    ``None`` when even the complete graph fails.  For ``n`` up to
    :data:`EXHAUSTIVE_DESIGN_MAX_N` the search is exhaustive (lexicographically
    first optimum); above that, the cheapest valid member of the named
    families is returned and ``exact`` tells whether it meets the lower bound.
    """
    if n < 2 or not 2 <= parts <= n:
        raise InvalidParameterError(f"need n >= 2 and 2 <= parts <= n, got n={n}, parts={parts}")
    connectivity = max(connectivity, 1)
    parts_cut = max(parts_cut, parts - 1)
    if connectivity > n - 1 or _complete_parts_cut(n, parts) < parts_cut:
        return None, True
    return _cheapest_resilient_cached(n, connectivity, parts, parts_cut)


@lru_cache(maxsize=None)
def _cheapest_resilient_cached(
    n: int, connectivity: int, parts: int, parts_cut: int
) -> tuple[Graph | None, bool]:
    bound = resilience_lower_bound(n, connectivity, parts, parts_cut)
    found = _constructive_design(n, connectivity, parts, parts_cut)
    if found is not None and found.m == bound:
        return found, True
    if n <= EXHAUSTIVE_DESIGN_MAX_N:
        table = _profile_table(n)
        ok = (table[:, 1] >= connectivity) & (table[:, parts - 1] >= parts_cut)
        return _first_design(n, ok), True
    if found is None:
        found = complete(n)
    return found, found.m == bound


def cheapest_divisible_graph(
    n: int, parts: int, margin: int, max_connectivity: int
) -> tuple[Graph | None, bool]:
    """Fewest-edge connected graph that is cheap to split once but dear to shatter.

    Requirements: edge connectivity ``lam <= max_connectivity``, and leaving
    ``parts`` or more components takes at least ``lam + margin`` removals.
    Returns ``(graph, exact)`` like :func:`cheapest_resilient_graph`; above
    :data:`EXHAUSTIVE_DESIGN_MAX_N` only the path is tried.
    """
    if n < 2 or not 2 <= parts <= n:
        raise InvalidParameterError(f"need n >= 2 and 2 <= parts <= n, got n={n}, parts={parts}")
    if max_connectivity < 1:
        return None, True
    return _cheapest_divisible_cached(n, parts, max(margin, 0), max_connectivity)


def _divisible(g: Graph, parts: int, margin: int, max_connectivity: int) -> bool:
    if g.n <= PARTITION_MAX_N:
        profile = cut_profile(g)
        lam, split = profile[1], profile[parts - 1]
        return lam <= max_connectivity and split >= lam + margin
    lam = edge_connectivity(g)
    return lam <= max_connectivity and not has_cut(g, lam + margin - 1, parts)


@lru_cache(maxsize=None)
def _cheapest_divisible_cached(
    n: int, parts: int, margin: int, max_connectivity: int
) -> tuple[Graph | None, bool]:
    path = tree(n)
    if _divisible(path, parts, margin, max_connectivity):
        return path, True
    if n > EXHAUSTIVE_DESIGN_MAX_N:
        return None, False
    table = _profile_table(n)
    lam = table[:, 1]
    ok = (lam >= 1) & (lam <= max_connectivity) & (table[:, parts - 1] >= lam + margin)
    return _first_design(n, ok), True


def heal_edges(g: Graph) -> frozenset[Edge]:
    """Deterministic minimal reconnection set.

    The lowest node of every component after the first is linked to node
    ``components[0][0]``; the result has ``num_components(g) - 1`` edges.
    """
    comps = components(g)
    anchor = comps[0][0]
    return frozenset(normalize_edge(anchor, c[0]) for c in comps[1:])


def contract(g: Graph, secure: Iterable[Iterable[int]]) -> tuple[Graph, list[int]]:
    """Merge the endpoints of every secure edge into supernodes.

    Returns the quotient graph and ``mapping`` where ``mapping[v]`` is the
    supernode holding original node ``v``.  Supernodes are numbered by their
    smallest original member; parallel edges collapse and loops vanish.
    """
    secure_edges = edge_set(secure)
    present = g.edge_set
    missing = sorted(secure_edges - present)
    if missing:
        raise InvalidParameterError(f"secure edges not in graph: {missing}")
    ds = _DisjointSet(g.n)
    for i, j in secure_edges:
        ds.union(i, j)
    roots = sorted({ds.find(v) for v in range(g.n)})
    label = {r: idx for idx, r in enumerate(roots)}
    mapping = [label[ds.find(v)] for v in range(g.n)]
    pairs = set()
    for i, j in g.edges:
        a, b = mapping[i], mapping[j]
        if a != b:
            pairs.add(normalize_edge(a, b))
    return Graph(len(roots), tuple(pairs)), mapping


# --- serialization ----------------------------------------------------------


def to_dot(g: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    lines.extend(f"  {v};" for v in range(g.n))
    lines.extend(f"  {i} -- {j};" for i, j in g.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_edge_list(g: Graph) -> str:
    lines = [f"n={g.n}"]
    lines.extend(f"{i} {j}" for i, j in g.edges)
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise InvalidGraphError("edge list must start with 'n=<int>'")
    try:
        n = int(lines[0][2:])
    except ValueError as exc:
        raise InvalidGraphError(f"bad node count line {lines[0]!r}") from exc
    pairs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InvalidGraphError(f"bad edge line {ln!r}")
        i, j = int(parts[0]), int(parts[1])
        if i >= j:
            raise InvalidGraphError(f"edge line must have i < j: {ln!r}")
        pairs.append((i, j))
    return Graph(n, tuple(pairs))
