import json
import math
from fractions import Fraction

import numpy as np
import pytest

from varconv.catalog import (
    ANCHORS,
    Branch,
    CatalogError,
    DomainError,
    Piecewise1D,
    QuadPolyhedron,
    SmoothPoly,
    builtin,
    dump_spec,
    evaluate,
    load_spec,
    regular_subgradient_probe,
    subdifferential,
)

INF = math.inf


def test_evaluate_examples(f1, ind, fsharp):
    assert evaluate(f1, 1.0) == -1.0
    assert evaluate(ind, -1.0) == INF
    assert evaluate(fsharp, 0.5) == 0.5
    assert evaluate(fsharp, 0.0) == 0.0


def test_evaluate_many_matches_scalar(fsharp, fabs, f1):
    X = np.linspace(-1, 1, 41)
    for f in (fsharp, fabs, f1):
        scalar = np.array([evaluate(f, x) for x in X])
        assert np.allclose(f.evaluate_many(X), scalar, rtol=0, atol=1e-15)


def test_subdifferential_examples(fabs, fsharp, orthant):
    assert subdifferential(fabs, 0.0).intervals() == [(-1.0, 1.0)]
    # right branch value limit 1 differs from f(0) = 0, so it contributes nothing
    assert subdifferential(fsharp, 0.0).intervals() == [(0.0, INF)]
    S = subdifferential(orthant, [0.0, 0.0])
    assert S.contains([-1.0, -2.0]) and S.contains([0.0, -5.0]) and S.contains([0.0, 0.0])
    assert not S.contains([0.1, -1.0])


def test_subdifferential_more_breakpoints(ind):
    assert subdifferential(ind, 0.0).intervals() == [(-INF, 0.0)]
    neg_abs = Piecewise1D([Branch("-inf", 0, False, True, (0, 1)), Branch(0, "inf", False, False, (0, -1))])
    # limiting subdifferential of -|x| at 0 is {-1, 1}, the regular one is empty
    assert subdifferential(neg_abs, 0.0).intervals() == [(-1.0, -1.0), (1.0, 1.0)]


def test_subdifferential_outside_domain(ind):
    with pytest.raises(DomainError):
        subdifferential(ind, -0.5)


def test_smooth_points_match_finite_differences(f1, fsharp):
    for f, xs in ((f1, [-0.7, 0.3, 1.1]), (fsharp, [-0.4, 0.25, 0.8])):
        for x in xs:
            h = 1e-6
            fd = (evaluate(f, x + h) - evaluate(f, x - h)) / (2 * h)
            (lo, hi), = subdifferential(f, x).intervals()
            assert lo == hi
            assert abs(lo - fd) <= 1e-8 * max(1.0, abs(fd))


def test_regular_subgradient_probe():
    f2, f1 = builtin("f2_zero"), builtin("f1_neg_quartic")
    r = regular_subgradient_probe(f2, [0.0], [0.0])
    assert r.passed and r.margin == 0.0
    assert regular_subgradient_probe(f1, [0.0], [0.0]).passed
    neg_abs = Piecewise1D([Branch("-inf", 0, False, True, (0, 1)), Branch(0, "inf", False, False, (0, -1))])
    r = regular_subgradient_probe(neg_abs, [0.0], [0.0])
    assert not r.passed and r.margin == pytest.approx(-1.0, abs=1e-12)


def test_builtin_names():
    assert builtin("f1_neg_quartic") == SmoothPoly((0, 0, 0, 0, -1))
    assert builtin("abs").evaluate(-2.0) == 2.0
    assert builtin("quad(2)").coeffs == (0, 0, 1)
    assert builtin("quad(a=2)" if False else "quad(0.5)").coeffs == (0, 0, Fraction(1, 4))
    A = builtin("orthant_quad([[2, 0], [0, 3]])")
    assert A == builtin("orthant_quad(2,3)")
    for name in ANCHORS:
        builtin(name)
    with pytest.raises(CatalogError):
        builtin("nope")


def test_lsc_and_ownership_validation():
    with pytest.raises(CatalogError, match="lower semicontinuous"):
        # f(0) = 1 above the left limit 0
        Piecewise1D([Branch("-inf", 0, False, False, (0,)), Branch(0, "inf", True, False, (1,))])
    with pytest.raises(CatalogError, match="ambiguous"):
        Piecewise1D([Branch("-inf", 0, False, True, (0,)), Branch(0, "inf", True, False, (0,))])
    with pytest.raises(CatalogError, match="no branch owns"):
        Piecewise1D([Branch("-inf", 0, False, False, (0,)), Branch(0, "inf", False, False, (0,))])
    with pytest.raises(CatalogError, match="gap"):
        Piecewise1D([Branch("-inf", 0, False, True, (0,)), Branch(1, "inf", False, False, (0,))])
    with pytest.raises(CatalogError, match="closed"):
        Piecewise1D([Branch(0, "inf", False, False, (0,))])
    with pytest.raises(CatalogError):
        Branch(1, 0, True, True, (0,))
    with pytest.raises(CatalogError, match="degree"):
        SmoothPoly((0,) * 7 + (1,))


def test_polyhedron_validation():
    with pytest.raises(CatalogError):
        QuadPolyhedron([[1, 2], [0, 1]])
    with pytest.raises(CatalogError):
        QuadPolyhedron(np.eye(5))


def test_spec_round_trip(tmp_path, fsharp, orthant):
    for f in (fsharp, orthant, builtin("f1_neg_quartic")):
        d = dump_spec(f)
        g = load_spec(json.loads(json.dumps(d)))
        assert g == f
    p = tmp_path / "f.json"
    p.write_text(json.dumps({"kind": "smooth-poly", "coeffs": ["0", "0.25", "1/3"]}))
    f = load_spec(p)
    assert f.coeffs == (0, Fraction(1, 4), Fraction(1, 3))
    assert load_spec({"builtin": "abs"}) == builtin("abs")
    with pytest.raises(CatalogError):
        load_spec({"kind": "mystery"})
    with pytest.raises(CatalogError, match="missing"):
        load_spec({"kind": "smooth-poly"})


def test_shifted_kind_loads():
    f = load_spec({"kind": "shifted", "base": {"builtin": "abs"}, "perturbation": {"t": 1}})
    assert f.evaluate(1.0) == 1.5
    assert subdifferential(f, 0.0).intervals() == [(-1.0, 1.0)]


def test_subgradient_set_sampling(fabs):
    pts, ext = subdifferential(fabs, 0.0).sample([0.0], 2.0)
    assert pts.shape == (35, 1)
    assert pts[0, 0] == -1.0 and pts[-1, 0] == 1.0
    assert ext[0] and ext[-1] and not ext[1:-1].any()
    # the open dual ball drops the endpoints at distance exactly r
    pts, _ = subdifferential(fabs, 0.0).sample([0.0], 0.5)
    assert np.all(np.abs(pts) < 0.5)


def test_cone_sampling_stays_in_ball(orthant):
    S = subdifferential(orthant, [0.0, 0.0])
    pts, ext = S.sample([0.0, 0.0], 0.3)
    assert pts.shape[0] > 100
    assert np.all(np.linalg.norm(pts, axis=1) < 0.3)
    assert np.all(pts <= 0.0)
    assert ext.any()
