"""Game parameters, payoffs and the healing-stage best response.

All quantities are carried as :class:`fractions.Fraction` so floors such as
``floor(0.3 / 0.1)`` are evaluated exactly.  Decimal inputs (``"0.3"`` or a
Python float) are read through their shortest decimal representation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace
from fractions import Fraction
from typing import Iterable, Mapping, Union

from netgame.errors import InvalidParameterError, InvalidStrategyError
from netgame.graph import Edge, Graph, edge_set, heal_edges, num_components

Number = Union[int, float, str, Fraction]

#: Tolerance for comparing payoffs that went through floating point.
FLOAT_TOL = 1e-9

PARAM_KEYS = ("n", "c_D", "c_A", "tau", "tau_R")


def to_fraction(value: Number) -> Fraction:
    """Exact conversion of ints, ``p/q`` or decimal strings, and floats.

    Floats are read through ``repr`` so ``0.3`` becomes ``3/10`` rather than
    its binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidParameterError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidParameterError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidParameterError(f"cannot parse number {value!r}") from exc
    raise InvalidParameterError(f"unsupported number type {type(value).__name__}")


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def floor_clamped(x: Fraction) -> int:
    return max(0, math.floor(x))


@dataclass(frozen=True)
class GameParams:
    """Node count, unit link costs and the two time fractions of the game."""

    n: int
    c_D: Fraction
    c_A: Fraction
    tau: Fraction
    tau_R: Fraction

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidParameterError(f"n must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        for name in ("c_D", "c_A", "tau", "tau_R"):
            object.__setattr__(self, name, to_fraction(getattr(self, name)))
        if self.n < 2:
            raise InvalidParameterError(f"n must be >= 2, got {self.n}")
        if self.c_D <= 0 or self.c_A <= 0:
            raise InvalidParameterError("link costs must be strictly positive")
        if not (0 <= self.tau <= 1 and 0 <= self.tau_R <= 1):
            raise InvalidParameterError("tau and tau_R must lie in [0, 1]")
        if self.tau + self.tau_R > 1:
            raise InvalidParameterError(
                f"tau + tau_R must not exceed 1 (got {float(self.tau + self.tau_R):g})"
            )

    @property
    def healing_window(self) -> Fraction:
        """Fraction of the horizon after recovery, ``1 - tau - tau_R``."""
        return 1 - self.tau - self.tau_R

    def with_(self, **changes: Number) -> "GameParams":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, str]:
        return {
            "n": str(self.n),
            "c_D": format_fraction(self.c_D),
            "c_A": format_fraction(self.c_A),
            "tau": format_fraction(self.tau),
            "tau_R": format_fraction(self.tau_R),
        }

    def to_kv(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.to_dict().items())

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Number]) -> "GameParams":
        missing = [k for k in PARAM_KEYS if k not in data]
        if missing:
            raise InvalidParameterError(f"missing parameters: {', '.join(missing)}")
        n = to_fraction(data["n"])
        if n.denominator != 1:
            raise InvalidParameterError(f"n must be an integer, got {data['n']!r}")
        return cls(int(n), *(to_fraction(data[k]) for k in PARAM_KEYS[1:]))

    @classmethod
    def from_kv(cls, text: str) -> "GameParams":
        return cls.from_mapping(parse_kv(text))

    @classmethod
    def from_json(cls, text: str) -> "GameParams":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise InvalidParameterError("structured params must be an object")
        return cls.from_mapping({k: str(v) for k, v in data.items()})


def parse_kv(text: str) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = value
    return out


@dataclass(frozen=True)
class Thresholds:
    """Integer link budgets derived from the timing and cost parameters.

    ``k_A_R``: removals the attacker can afford against the recovery window.
    ``k_A_H``: removals it can afford against the rest of the horizon.
    ``k_D_H``: links the defender could afford over the rest of the horizon.
    ``k``: links the defender is willing to add when healing.
    """

    k_A_R: int
    k_A_H: int
    k_D_H: int
    k: int


def thresholds(p: GameParams) -> Thresholds:
    return Thresholds(
        k_A_R=floor_clamped(p.tau_R / p.c_A),
        k_A_H=floor_clamped((1 - p.tau) / p.c_A),
        k_D_H=floor_clamped((1 - p.tau) / p.c_D),
        k=floor_clamped(p.healing_window / p.c_D),
    )


@dataclass(frozen=True)
class StrategyTriple:
    """Initial links ``e1``, attacked links ``eA`` and healing links ``e2``."""

    e1: frozenset[Edge] = field(default_factory=frozenset)
    eA: frozenset[Edge] = field(default_factory=frozenset)
    e2: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for f in fields(self):
            object.__setattr__(self, f.name, edge_set(getattr(self, f.name)))
        if not self.eA <= self.e1:
            raise InvalidStrategyError("attacked links must be a subset of the initial links")
        if self.e2 & (self.e1 - self.eA):
            raise InvalidStrategyError("healing links must not duplicate surviving links")

    @classmethod
    def of(
        cls,
        e1: Iterable[Iterable[int]] = (),
        eA: Iterable[Iterable[int]] = (),
        e2: Iterable[Iterable[int]] = (),
    ) -> "StrategyTriple":
        return cls(edge_set(e1), edge_set(eA), edge_set(e2))

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.e1), len(self.eA), len(self.e2)

    def phase_graphs(self, n: int) -> tuple[Graph, Graph, Graph]:
        """Network before the attack, after it, and after healing."""
        survivor = self.e1 - self.eA
        return (
            Graph(n, tuple(self.e1)),
            Graph(n, tuple(survivor)),
            Graph(n, tuple(survivor | self.e2)),
        )

    def indicators(self, n: int) -> tuple[int, int, int]:
        return tuple(int(num_components(g) == 1) for g in self.phase_graphs(n))  # type: ignore[return-value]


#: Connectivity patterns allowed at an equilibrium, keyed by situation label.
SITUATION_PATTERNS: dict[str, tuple[int, int, int]] = {
    "S1": (1, 1, 1),
    "S2": (1, 0, 1),
    "S3": (1, 0, 0),
    "S4": (0, 0, 1),
    "S5": (0, 0, 0),
}
PATTERN_SITUATIONS = {v: k for k, v in SITUATION_PATTERNS.items()}


def situation_of(pattern: tuple[int, int, int]) -> str | None:
    return PATTERN_SITUATIONS.get(tuple(pattern))  # type: ignore[arg-type]


def _check_triple(p: GameParams, s: StrategyTriple) -> None:
    for name in ("e1", "eA", "e2"):
        for i, j in getattr(s, name):
            if i < 0 or j >= p.n:
                raise InvalidStrategyError(f"edge ({i}, {j}) in {name} out of range for n={p.n}")


def utility_D(p: GameParams, s: StrategyTriple) -> Fraction:
    _check_triple(p, s)
    before, during, after = s.indicators(p.n)
    connected_time = p.healing_window * after + p.tau * before + p.tau_R * during
    return connected_time - p.c_D * (len(s.e1) + len(s.e2))


def utility_A(p: GameParams, s: StrategyTriple) -> Fraction:
    _check_triple(p, s)
    before, during, after = s.indicators(p.n)
    cut_time = p.healing_window * (1 - after) + p.tau * (1 - before) + p.tau_R * (1 - during)
    return cut_time - p.c_A * len(s.eA)


def heal_budget(p: GameParams) -> int:
    """Most links the defender adds when healing, under strict profitability.

    Equals ``thresholds(p).k`` except when ``(1 - tau - tau_R) / c_D`` is an
    integer: healing that many pieces only breaks even, so it is skipped.
    """
    ratio = p.healing_window / p.c_D
    if ratio <= 0:
        return 0
    return math.ceil(ratio) - 1


def heals(p: GameParams, n_components: int) -> bool:
    """Whether reconnecting ``n_components`` pieces is strictly profitable.

    Ties resolve to not building, matching the defender's tie-break.
    """
    if n_components <= 1:
        return False
    return p.healing_window - p.c_D * (n_components - 1) > 0


def best_response_stage3(
    p: GameParams, e1: Iterable[Iterable[int]], eA: Iterable[Iterable[int]]
) -> frozenset[Edge]:
    first, attacked = edge_set(e1), edge_set(eA)
    if not attacked <= first:
        raise InvalidStrategyError("attacked links must be a subset of the initial links")
    survivor = Graph(p.n, tuple(first - attacked))
    if heals(p, num_components(survivor)):
        return heal_edges(survivor)
    return frozenset()
