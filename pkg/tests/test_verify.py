from dataclasses import replace
from fractions import Fraction as F

import pytest

from netgame.closedform import solve
from netgame.errors import InvalidParameterError, ResourceLimitError
from netgame.model import GameParams
from netgame.verify import (
    BOUNDARY,
    EXACT,
    MISMATCH,
    REPORT_COLUMNS,
    boundary_reasons,
    named_grid,
    random_grid,
    verify_grid,
    verify_point,
)


def test_interior_point_matches_exactly():
    p = GameParams(4, F(37, 997), F(211, 997), F(300, 997), F(101, 997))
    assert boundary_reasons(p) == ()
    assert verify_point(p).match == EXACT


def test_equal_recovery_and_attack_cost_is_a_boundary():
    p = GameParams(4, F(1, 20), F(1, 5), F(3, 10), F(1, 5))
    assert "tau_R=c_A" in boundary_reasons(p)
    assert verify_point(p).match in (EXACT, BOUNDARY)


def test_eps_widens_the_boundary():
    p = GameParams(4, F(1, 20), F(1, 5), F(3, 10), F(1, 5) + F(1, 10**6))
    assert "tau_R=c_A" not in boundary_reasons(p)
    assert "tau_R=c_A" in boundary_reasons(p, eps=1e-5)


def test_tied_boundary_point_is_consistent():
    # S1 and a late build tie; the oracle keeps the empty first stage
    pt = verify_point(GameParams(4, F(1, 20), F(1), F(0), F(0)))
    assert pt.boundary
    assert (pt.closed.situation, pt.oracle.situation, pt.match) == ("S1", "S4", BOUNDARY)


def _corrupted(p: GameParams):
    o = solve(p)
    if o.situation != "S1":
        return o
    e1, eA, e2 = o.counts
    return replace(o, counts=(e1 + 1, eA, e2), u_D=o.u_D - p.c_D)


def test_corrupted_closed_form_is_caught():
    report = verify_grid(random_grid([4], 40, 997, seed=2), solver=_corrupted)
    assert report.count(MISMATCH) > 0
    assert all(pt.closed.situation == "S1" for pt in report.mismatches)


def test_report_summary_and_rows():
    report = verify_grid(named_grid("lattice", [4], seed=1)[:30])
    assert report.summary().startswith("total=30 exact=")
    assert report.summary().endswith("mismatch=0")
    row = report.rows()[0]
    assert tuple(row) == REPORT_COLUMNS


def test_grids_are_reproducible():
    assert random_grid([4, 5], 20, 97, seed=3) == random_grid([4, 5], 20, 97, seed=3)
    assert random_grid([4, 5], 20, 97, seed=3) != random_grid([4, 5], 20, 97, seed=4)
    with pytest.raises(InvalidParameterError):
        named_grid("nope", [4])


def test_oversize_grid_is_refused():
    with pytest.raises(ResourceLimitError):
        verify_grid(random_grid([7], 1, 97), limit_n=6)


def test_worker_processes_keep_grid_order(monkeypatch):
    points = random_grid([4], 24, 97, seed=5)
    serial = verify_grid(points)
    monkeypatch.setenv("NETGAME_THREADS", "2")
    parallel = verify_grid(points)
    assert [pt.row() for pt in parallel.points] == [pt.row() for pt in serial.points]
