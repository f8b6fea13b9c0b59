from fractions import Fraction as F

import pytest
from hypothesis import given

from netgame.closedform import (
    NO_THREAT,
    REGIME_1,
    REGIME_2,
    SIZING_SIX_CASE,
    SpeOutcome,
    boundary_rule,
    delta,
    delta_with_case,
    no_threat_check,
    regime2_candidates,
    secure_network,
    solve,
    solve_regime1,
    solve_regime2,
    witness,
)
from netgame.errors import InvalidParameterError, WrongRegimeError
from netgame.graph import cut_profile, harary, is_connected, ring, tree
from netgame.model import GameParams, thresholds, utility_A, utility_D
from strategies import params

CASE = dict(n=10, c_D=F(1, 20), c_A=F(1, 8), tau=F(3, 10))


def case(tau_R, **kw):
    return GameParams(**{**CASE, "tau_R": F(tau_R), **kw})


# --- no-threat shortcuts -----------------------------------------------------


def test_no_threat_examples():
    o = no_threat_check(GameParams(5, F(3, 10), F(1, 10), F(3, 10), F(1, 10)))
    assert (o.situation, o.u_D, o.u_A) == ("S5", 0, 1)
    o = no_threat_check(GameParams(5, F(1, 20), F(3, 5), F(1, 2), F(1, 10)))
    assert (o.situation, o.counts, o.u_D, o.u_A) == ("S1", (4, 0, 0), F(4, 5), 0)
    assert no_threat_check(GameParams(5, F(1, 20), F(1, 10), F(3, 10), F(1, 10))) is None
    o = solve(GameParams(5, F(1, 20), F(2), F(3, 10), F(1, 10)))
    assert (o.regime, o.situation) == (NO_THREAT, "S1")


def test_tree_at_break_even_price_is_not_built():
    o = solve(GameParams(5, F(1, 4), F(3, 5), F(1, 2), F(1, 10)))
    assert o.situation == "S5"


# --- first regime ------------------------------------------------------------


def test_regime1_examples():
    o = solve_regime1(case("0.1"))
    assert (o.situation, o.counts, o.u_D, o.u_A) == ("S1", (9, 0, 0), F(11, 20), 0)
    o = solve_regime1(case("0.2"))
    assert (o.situation, o.counts, o.u_D, o.topology, o.degree) == ("S1", (10, 0, 0), F(1, 2), "harary", 2)
    with pytest.raises(WrongRegimeError):
        solve_regime1(GameParams(5, F(22, 100), F(1, 20), F(3, 10), F(1, 10)))


def test_regime1_harary_witness():
    p = GameParams(5, F(1, 20), F(1, 10), F(1, 10), F(35, 100))
    o = solve(p)
    assert (o.regime, o.situation, o.counts) == (REGIME_1, "S1", (10, 0, 0))
    assert witness(o, p).e1 == harary(5, 4).edge_set


def test_regime1_healed_and_late():
    # values confirmed by exhaustive search
    o = solve(GameParams(5, F(1, 10), F(1, 10), F(3, 10), F(1, 4)))
    assert (o.regime, o.situation, o.counts, o.u_D, o.u_A) == (REGIME_1, "S2", (4, 1, 1), F(1, 4), F(3, 20))
    o = solve(GameParams(4, F(1, 10), F(3, 20), F(1, 20), F(9, 20)))
    assert (o.regime, o.situation, o.counts, o.u_D, o.u_A) == (REGIME_1, "S4", (0, 0, 3), F(1, 5), F(1, 2))


# --- second regime -----------------------------------------------------------


def test_regime2_examples():
    o = solve_regime2(case("0.45"))
    assert (o.situation, o.u_D, o.u_A) == ("S2", F(1, 20), F(13, 40))
    o = solve_regime2(case("0.55"))
    assert (o.situation, o.u_D, o.u_A) == ("S5", 0, 1)
    o = solve(GameParams(10, F(1, 30), F(1, 20), F(55, 100), F(45, 100)))
    assert (o.situation, o.counts, o.u_D, o.u_A) == ("S3", (9, 1, 0), F(1, 4), F(2, 5))
    with pytest.raises(WrongRegimeError):
        solve_regime2(case("0.1"))


def test_regime2_secure_network_is_harary():
    o = solve(case("0.3"))
    assert (o.regime, o.situation, o.counts, o.topology, o.degree) == (REGIME_2, "S1", (15, 0, 0), "harary", 3)
    assert o.delta == 15 and o.u_D == F(1, 4)


def test_zero_gap_goes_to_second_regime():
    # window 0.45 equals the tree price: healing a shattered tree only breaks even
    o = solve(case("0.25"))
    assert (o.regime, o.situation, o.u_D, o.u_A) == (REGIME_2, "S2", F(1, 4), F(1, 8))


def test_healed_network_beyond_tree():
    p = GameParams(5, F(1, 20), F(1, 20), F(3, 5), F(1, 5))
    o = solve(p)
    assert (o.situation, o.counts, o.u_D, o.u_A) == ("S2", (6, 1, 1), F(9, 20), F(3, 20))
    triple = witness(o, p)
    assert triple.counts == (6, 1, 1)
    assert (utility_D(p, triple), utility_A(p, triple)) == (o.u_D, o.u_A)


def test_exact_sizing_beats_six_case_count():
    p = GameParams(5, F(1, 20), F(9, 20), F(2, 5), F(1, 2))
    exact, six_case = solve(p), solve(p, SIZING_SIX_CASE)
    assert (exact.counts, exact.u_D) == ((5, 0, 0), F(3, 4))
    assert (six_case.counts, six_case.delta_case) == ((8, 0, 0), 4)


def test_candidates_include_every_plan():
    candidates, _ = regime2_candidates(case("0.3"))
    assert {o.situation for o in candidates} == {"S1", "S2", "S5"}
    assert boundary_rule(candidates) == solve(case("0.3"))


# --- six-case count ----------------------------------------------------------


def test_delta_examples():
    p = GameParams(5, F(1, 4), F(3, 10), F(3, 10), F(3, 10))
    t = thresholds(p)
    assert (t.k_A_R, t.k_A_H, t.k) == (1, 2, 1)
    assert delta_with_case(p) == (5, 3)
    p = GameParams(10, F(15, 100), F(1, 10), F(45, 100), F(15, 100))
    t = thresholds(p)
    assert (t.k_A_R, t.k_A_H, t.k) == (1, 5, 2)
    assert delta_with_case(p) == (18, 4)
    # k_A_R = 0 and k_A_H = k
    p = GameParams(5, F(1, 5), F(3, 10), F(1, 10), F(1, 5))
    assert delta(p) == 4
    with pytest.raises(WrongRegimeError):
        delta(case("0.1"))


# --- tie rule ----------------------------------------------------------------


def _outcome(situation, u_D, u_A, links=0):
    return SpeOutcome("R", situation, (links, 0, 0), F(u_D), F(u_A))


def test_boundary_rule():
    a = _outcome("S1", "0.5", 0)
    assert boundary_rule([a]) is a
    assert boundary_rule([a, _outcome("S2", "0.3", "0.1")]) is a
    b = _outcome("S2", "0.5", "0.1")
    assert boundary_rule([a, b]) is b
    assert boundary_rule([_outcome("S1", 0, 0, 3), _outcome("S5", 0, 0)]).situation == "S5"
    with pytest.raises(RuntimeError):
        boundary_rule([])


# --- witnesses ---------------------------------------------------------------


def test_witness_shapes():
    p = GameParams(5, F(1, 10), F(3, 20), F(1, 20), F(9, 20))
    o = solve(p)
    assert o.situation == "S4"
    assert witness(o, p).e2 == tree(5).edge_set
    p = GameParams(5, F(1, 10), F(1, 10), F(3, 10), F(1, 4))
    o = solve(p)
    assert o.situation == "S2"
    t = witness(o, p)
    assert t.eA == t.e2 == {(0, 1)}
    p = GameParams(5, F(3, 20), F(1, 20), F(9, 10), 0)
    o = solve(p)
    assert (o.situation, o.counts) == ("S3", (4, 1, 0))
    assert witness(o, p).e2 == frozenset()


def test_witness_rejects_foreign_params():
    o = solve(case("0.45"))
    with pytest.raises(InvalidParameterError):
        witness(o, case("0.4"))


@given(params(ns=(4, 5, 6, 7, 8)))
def test_witness_realizes_outcome(p):
    o = solve(p)
    t = witness(o, p)
    assert t.counts == o.counts
    assert (utility_D(p, t), utility_A(p, t)) == (o.u_D, o.u_A)
    assert o.u_D >= 0


@given(params(ns=(4, 5, 6)))
def test_secure_networks_resist_the_threat(p):
    o = solve(p)
    if o.situation != "S1" or o.regime != REGIME_2:
        return
    g = secure_network(p, o)
    assert is_connected(g)
    t = thresholds(p)
    # cutting it costs the attacker more than the recovery window is worth
    assert cut_profile(g)[1] > t.k_A_R


def test_ring_is_the_small_secure_network():
    p = GameParams(5, F(1, 20), F(9, 20), F(2, 5), F(1, 2))
    assert secure_network(p, solve(p)) == ring(5)
