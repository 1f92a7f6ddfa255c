import io

import numpy as np
import pytest


from varconv.graph import (
    PreconditionError,
    Window,
    check_anchor,
    closedness_probe,
    default_resolution,
    localization,
    sample_truncated_graph,
)


def test_default_resolution_table():
    assert [default_resolution(n) for n in (1, 2, 3, 4)] == [201, 41, 17, 9]


def test_abs_window_vertical_fan(fabs):
    g = sample_truncated_graph(fabs, Window([0.0], [0.0], 0.25, 0.5, 0.25))
    fan = g.X[:, 0] == 0.0
    assert fan.sum() > 10
    assert np.all(np.abs(g.XS[fan, 0]) < 0.5)
    # branch samples need |x*| = 1 inside the dual window, which fails for r_V = 0.5
    assert np.all(fan)
    g = sample_truncated_graph(fabs, Window([0.0], [0.0], 0.25, 1.5, 0.25))
    assert set(np.unique(g.XS[g.X[:, 0] != 0.0, 0])) == {-1.0, 1.0}


def test_flagship_truncation_drops_right_branch(fsharp):
    g = localization(fsharp, [0.0], [0.0], 0.5)
    assert np.all(g.X[:, 0] <= 0.0)
    assert np.all(g.F <= 0.5)
    fan = g.X[:, 0] == 0.0
    assert g.XS[fan, 0].min() >= 0.0


def test_flagship_plain_keeps_jump_branch(fsharp):
    g = localization(fsharp, [0.0], [0.0], 0.5, mode="plain", v_radius=2.0)
    right = g.X[:, 0] > 0
    assert right.any()
    assert np.all(g.XS[right, 0] == -1.0)
    assert np.all((g.X[right, 0] > 0) & (g.X[right, 0] < 0.5))


def test_zero_function_grid(f2):
    g = localization(f2, [0.0], [0.0], 0.25)
    assert np.all(g.XS == 0) and np.all(g.F == 0)
    assert g.X[:, 0].min() > -0.25 and g.X[:, 0].max() < 0.25


def test_canonical_order_and_export(f1):
    g = localization(f1, [0.0], [0.0], 0.25, resolution=21)
    keys = list(zip(g.X[:, 0], g.XS[:, 0]))
    assert keys == sorted(keys)
    buf = io.StringIO()
    g.export_text(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0].split() == ["#", "x_1", "xstar_1", "f"]
    assert len(lines) == len(g) + 1
    back = np.loadtxt(io.StringIO(buf.getvalue()), skiprows=1)
    assert np.array_equal(back, np.column_stack([g.stacked, g.F]))


def test_anchor_preconditions(f1, ind, fsharp):
    with pytest.raises(PreconditionError):
        check_anchor(f1, [0.0], [1.0])
    with pytest.raises(PreconditionError):
        check_anchor(ind, [-1.0], [0.0])
    with pytest.raises(PreconditionError):
        check_anchor(fsharp, [0.0], [-1.0])
    check_anchor(fsharp, [0.0], [3.0])


def test_window_validation():
    with pytest.raises(ValueError):
        Window([0.0], [0.0], -1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        Window([0.0], [0.0, 1.0], 1.0, 1.0, 1.0)
    w = Window([0.0], [0.0], 0.4, 0.4, 0.4)
    s = w.shrink(0.5, 0.0)
    assert s.u_radius == 0.2 and s.v_radius == 0.2 and s.rho == pytest.approx(0.2)


def test_orthant_graph_contains_faces(orthant):
    g = localization(orthant, [0.0, 0.0], [0.0, 0.0], 0.25)
    assert g.n == 2
    corner = np.all(g.X == 0.0, axis=1)
    assert corner.sum() > 10
    assert np.all(g.XS[corner] <= 0.0)


def test_closedness_attentive_vs_plain(fsharp):
    ga = localization(fsharp, [0.0], [0.0], 0.5)
    gp = localization(fsharp, [0.0], [0.0], 0.5, mode="plain", v_radius=2.0)
    ra = closedness_probe(ga)
    rp = closedness_probe(gp)
    assert ra["passed"] and ra["sequences_checked"] > 0
    assert not rp["passed"]
    assert rp["max_fval_deviation"] == pytest.approx(1.0, abs=1e-3)
    assert any(fl["limit_xstar"] == [-1.0] and fl["f_at_limit"] == 0.0 for fl in rp["flagged"])
