"""Hypothesis strategies shared by the test modules."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from hypothesis import strategies as st

from netgame.graph import Graph
from netgame.model import GameParams


@st.composite
def graphs(draw, min_n: int = 2, max_n: int = 6) -> Graph:
    n = draw(st.integers(min_n, max_n))
    universe = list(combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(universe), unique=True, max_size=len(universe)))
    return Graph(n, tuple(chosen))


@st.composite
def params(draw, ns=(4, 5), denominator: int = 97) -> GameParams:
    """Rational parameters with ``tau + tau_R <= 1`` and ``c_D`` up to past ``1/(n-1)``."""
    d = denominator
    n = draw(st.sampled_from(ns))
    tau = draw(st.integers(0, d))
    tau_R = draw(st.integers(0, d - tau))
    c_D = draw(st.integers(1, (3 * d) // (2 * (n - 1))))
    c_A = draw(st.integers(1, d))
    return GameParams(n, *(Fraction(v, d) for v in (c_D, c_A, tau, tau_R)))
