import numpy as np
import pytest

from gonodyn import Form, Stability, preset, simulate_until
from gonodyn.scan import (
    Axis,
    GridError,
    RebalanceError,
    basin,
    parse_grid,
    rebalance,
    sweep,
    worker_count,
)


def test_parse_grid():
    axes = parse_grid("x=0:5:100, u=0:5:50")
    assert [(a.name, a.low, a.high, a.count) for a in axes] == [("x", 0, 5, 100), ("u", 0, 5, 50)]
    assert axes[0].values[-1] == 5.0


@pytest.mark.parametrize("spec", ["", "x=0:5", "x=5:0:10", "x=0:5:0", "x=0:1:10,x=0:1:10",
                                  "x=0:1:10000,u=0:1:1001", "x=a:b:c"])
def test_parse_grid_errors(spec):
    with pytest.raises(GridError):
        parse_grid(spec)


def test_parse_grid_allowed():
    with pytest.raises(GridError, match="unknown grid variable"):
        parse_grid("q=0:1:3", allowed=("x", "y"))


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("GONODYN_THREADS", "1")
    assert worker_count() == 1
    monkeypatch.setenv("GONODYN_THREADS", "many")
    with pytest.raises(GridError):
        worker_count()


def test_rebalance_proportional(classical):
    p = rebalance(classical, b1=0.4)
    assert p.b1 == 0.4
    assert p.b2 == p.b3 == p.b4 == pytest.approx(0.2)
    p = rebalance(classical, c1=0.9)
    assert p.c2 == pytest.approx(0.1)


def test_rebalance_errors(classical):
    with pytest.raises(RebalanceError):
        rebalance(classical, a1=1.2)
    with pytest.raises(RebalanceError):
        rebalance(classical, b1=0.6, b2=0.6)
    w0 = preset("w0")
    # d1 = 0 in w0: setting d2 leaves d3 to absorb the rest
    assert rebalance(w0, d2=0.2).d3 == pytest.approx(0.8)


def test_basin_small_grid(classical):
    axes = parse_grid("x=0:5:11,u=0:5:11")
    records = basin(classical, axes, workers=1)
    assert len(records) == 121
    assert [r.index for r in records[:3]] == [(0, 0), (0, 1), (0, 2)]
    for rec in records:
        x, u = rec.state[0], rec.state[2]
        if x * u < 4 - 1e-9:
            assert rec.outcome == "Origin"
        elif x * u > 4 + 1e-9:
            assert rec.outcome == "Blowup"
        else:
            assert rec.outcome == "Point"
        assert rec.agrees is not False


def test_basin_inside_q3_all_origin(classical):
    records = basin(classical, parse_grid("x=0:1.5:20,u=0:1.5:20"), pinned=(0, 0, 0, 0), workers=1)
    assert {r.outcome for r in records} == {"Origin"}


def test_basin_inside_n_matches_image(classical):
    from gonodyn import apply

    records = basin(classical, parse_grid("x=-3:-0.1:8,y=-3:-0.1:8"), pinned=(0, 0, -1, -1), workers=1)
    for rec in records:
        assert rec.outcome == simulate_until(classical, apply(classical, rec.state)).outcome.value


def test_basin_deterministic_across_workers(classical):
    axes = parse_grid("x=0:5:50,u=0:5:50")
    serial = basin(classical, axes, workers=1)
    parallel = basin(classical, axes, workers=4)
    assert [(r.index, r.outcome, r.steps) for r in serial] == [(r.index, r.outcome, r.steps) for r in parallel]
    for rec in serial[::97]:
        again = simulate_until(classical, rec.state)
        assert (again.outcome.value, again.steps) == (rec.outcome, rec.steps)


def test_basin_rejects_coefficient_axes(classical):
    with pytest.raises(GridError):
        basin(classical, [Axis("a1", 0, 1, 3)])


def test_sweep_c1(classical):
    rows = sweep(classical, [Axis("c1", 0.0, 199 / 200, 200)], workers=1)
    tags = [row.stability(Form.II) for row in rows]
    assert tags[100] is Stability.Nonhyperbolic
    assert all(t is Stability.Saddle for k, t in enumerate(tags) if k != 100)
    assert all(row.exists(Form.II) and not row.exists(Form.IV) for row in rows)


def test_sweep_a1_existence(classical):
    rows = sweep(classical, [Axis("a1", 0.0, 1.0, 11)], workers=1)
    assert [row.exists(Form.II) for row in rows] == [False] + [True] * 9 + [False]
    assert all(row.valid for row in rows)
    for row in rows:
        assert row.params.a2 == pytest.approx(1 - row.params.a1)


def test_sweep_invalid_rows(classical):
    rows = sweep(classical, [Axis("b1", 0.5, 1.5, 3)], workers=1)
    assert [row.valid for row in rows] == [True, True, False]
    assert rows[-1].forms == {}


def test_sweep_two_axes_and_limits(classical):
    rows = sweep(classical, [Axis("c1", 0.1, 0.9, 3), Axis("a1", 0.2, 0.8, 4)], workers=1)
    assert len(rows) == 12
    assert list(rows[1].values) == ["c1", "a1"]
    with pytest.raises(GridError):
        sweep(classical, [Axis("x", 0, 1, 3)])
    with pytest.raises(GridError):
        sweep(classical, [Axis("a1", 0, 1, 2), Axis("b1", 0, 1, 2), Axis("c1", 0, 1, 2)])


def test_sweep_parallel_matches_serial(classical):
    axes = [Axis("c1", 0.0, 1.0, 40), Axis("b2", 0.0, 0.9, 60)]
    serial = sweep(classical, axes, workers=1)
    parallel = sweep(classical, axes, workers=3)
    assert [(r.values, r.valid, r.stability(Form.II)) for r in serial] == \
        [(r.values, r.valid, r.stability(Form.II)) for r in parallel]
