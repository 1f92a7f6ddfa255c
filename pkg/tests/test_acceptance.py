"""End-to-end acceptance checks, one test per criterion.

Each test records a one-line PASS/FAIL summary that ``conftest.py`` prints at
the end of the session.
"""
import math
import time

import numpy as np

from varconv import (
    NotTiltStable,
    QuadraticPerturbation,
    add_quadratic,
    attentive_coderivative_1d,
    build_affine_minorant,
    builtin,
    check_monotone,
    check_pw_axioms,
    check_quadratic_growth,
    dz_distance,
    hausdorff_dz,
    localization,
    sc_derivative,
    sc_derivative_numeric,
    test_pointbased as pointbased,
    tilt_bound,
    tilt_probe,
    tilt_rayleigh_1d,
    transform_pw,
    varco_bound,
    varco_empirical,
)
from varconv.catalog import ANCHORS
from varconv.graph import Window
from varconv.subspace import adjoint

from .conftest import pairs_1d

ALL_ANCHORS = [(name, x, v) for name, anchors in ANCHORS.items() for x, v in anchors]
RESULTS = {}


def record(key, ok, note):
    RESULTS[key] = (ok, note)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {note}")


def window(f, x, v, eps=0.25):
    return Window(x, v, eps, eps, f.evaluate(x) + eps)


def test_criterion_01_quartic_and_zero():
    notes = []
    ok = True
    for name, growth_should_pass in (("f1_neg_quartic", False), ("f2_zero", True)):
        t0 = time.perf_counter()
        f = builtin(name)
        vb = varco_bound(sc_derivative(f, [0.0], [0.0]))
        gr = check_quadratic_growth(f, [0.0], [0.0], 0.0, window(f, [0.0], [0.0]))
        mo = check_monotone(f, [0.0], [0.0], 0.0, 0.25)
        dt = time.perf_counter() - t0
        good = vb == 0 and gr.passed == growth_should_pass and mo.passed == growth_should_pass and dt < 5
        ok &= good
        notes.append(f"{name}: varco={vb} growth={gr.passed} monotone={mo.passed} {dt:.2f}s")
    record(1, ok, "; ".join(notes))
    assert ok


def _all_pwsets():
    for name, x, v in ALL_ANCHORS:
        f = builtin(name)
        yield name, x, v, sc_derivative(f, x, v)
        if f.dim == 1:
            yield name, x, v, sc_derivative(f, x, v, mode="plain")
        n = len(x)
        for t in (-1.0, 0.5):
            yield name, x, v, transform_pw(sc_derivative(f, x, v), t * np.eye(n))


def test_criterion_02_pw_axioms_and_self_adjointness():
    worst_res = 0.0
    worst_adj = 0.0
    count = 0
    for name, x, v, S in _all_pwsets():
        for p in S:
            d = check_pw_axioms(p.P, p.W)
            worst_res = max(worst_res, max(d["residuals"].values()))
            count += 1
        for L in S.subspaces():
            worst_adj = max(worst_adj, dz_distance(L, adjoint(L)))
    for name, x, v in ALL_ANCHORS:
        f = builtin(name)
        N = sc_derivative_numeric(localization(f, x, v, 0.25), x, v)
        for p in N:
            worst_res = max(worst_res, max(check_pw_axioms(p.P, p.W)["residuals"].values()))
            count += 1
    ok = worst_res <= 1e-10 and worst_adj <= 1e-10
    record(2, ok, f"{count} pairs, max axiom residual {worst_res:.1e}, max d_Z(L, L*) {worst_adj:.1e}")
    assert ok


def test_criterion_03_growth_monotone_pointbased_agree():
    disagreements = []
    checked = 0
    for name, x, v in ALL_ANCHORS:
        f = builtin(name)
        S = sc_derivative(f, x, v)
        vb = varco_bound(S)
        if not math.isfinite(vb):
            continue
        for ds in (-0.5, -0.1, 0.1, 0.5):
            s = vb + ds
            pb = pointbased(S, s).passed
            gr = check_quadratic_growth(f, x, v, s, window(f, x, v)).passed
            mo = check_monotone(f, x, v, s, 0.25).passed
            checked += 1
            if not pb == gr == mo:
                disagreements.append((name, x, v, s, pb, gr, mo))
    ok = not disagreements and checked > 0
    record(3, ok, f"{checked} (anchor, s) cases, {len(disagreements)} disagreements")
    assert ok, disagreements


def test_criterion_04_attentive_plain_separation():
    t0 = time.perf_counter()
    f = builtin("flagship_jump")
    att = check_monotone(f, [0.0], [0.0], 0.0, 0.5)
    plain = check_monotone(f, [0.0], [0.0], 0.0, 0.5, mode="plain", v_radius=2.0)
    w = plain.witness
    # the violating pair straddles the jump: the right branch contributes x* = -1 near 0
    pair_ok = (w["ystar"][0] - w["xstar"][0]) * (w["y"][0] - w["x"][0]) < 0 and -1.0 in (w["xstar"][0], w["ystar"][0])
    S = sc_derivative(f, [0.0], [0.0])
    Sp = sc_derivative(f, [0.0], [0.0], mode="plain")
    N = sc_derivative_numeric(localization(f, [0.0], [0.0], 0.5), [0.0], [0.0])
    sets_ok = pairs_1d(S) == [(0.0, 1.0), (1.0, 0.0)] and hausdorff_dz(S, N) <= 1e-6
    verdicts_ok = varco_bound(S) == 0 and pointbased(S, 0.0).passed and not pointbased(S, 0.1).passed
    dt = time.perf_counter() - t0
    ok = att.passed and not plain.passed and pair_ok and sets_ok and verdicts_ok and dt < 5
    record(4, ok, f"attentive={att.passed} plain={plain.passed} witness={plain.witness} "
                  f"plain SC={pairs_1d(Sp)} {dt:.2f}s")
    assert ok


def test_criterion_05_varco_tilt_reciprocity():
    t0 = time.perf_counter()
    notes = []
    ok = True
    cases = [("quad(0.5)", [0.0]), ("quad(1)", [0.0]), ("quad(2)", [0.0]), ("orthant_quad(2,3)", [0.0, 0.0])]
    for name, x in cases:
        f = builtin(name)
        S = sc_derivative(f, x, [0.0] * len(x))
        vb, tb = varco_bound(S), tilt_bound(S)
        probe = tilt_probe(f, x, 1.0, 0.2, resolution=401)
        rel = abs(probe.lipschitz - tb) / tb
        good = abs(tb - 1.0 / vb) <= 1e-10 and probe.tilt_stable and rel <= 0.05
        if name.startswith("orthant"):
            good &= vb == 2.0 and tb == 0.5
        ok &= good
        notes.append(f"{name}: varco={vb:g} tilt={tb:g} lip={probe.lipschitz:.6f}")
    dt = time.perf_counter() - t0
    ok &= dt < 60
    record(5, ok, "; ".join(notes) + f" {dt:.1f}s")
    assert ok


def test_criterion_06_not_tilt_stable_detection():
    notes = []
    ok = True
    for name in ("f1_neg_quartic", "indicator_halfline"):
        f = builtin(name)
        tb = tilt_bound(sc_derivative(f, [0.0], [0.0]))
        probe = tilt_probe(f, [0.0], 0.5, 0.2)
        good = isinstance(tb, NotTiltStable) and not probe.tilt_stable and (probe.multivalued or probe.jump)
        ok &= good
        notes.append(f"{name}: bound={tb!r} probe multivalued={probe.multivalued} jump={probe.jump}")
    record(6, ok, "; ".join(notes))
    assert ok


def test_criterion_07_sum_rule_and_shift():
    worst = 0.0
    shift_err = 0.0
    bracket_err = 0.0
    for name, x, v in ALL_ANCHORS:
        f = builtin(name)
        S = sc_derivative(f, x, v)
        vb = varco_bound(S)
        base = varco_empirical(f, x, v, 0.25) if math.isfinite(vb) else None
        for t in (-1.0, -0.3, 0.5, 2.0):
            q = QuadraticPerturbation.shift(len(x), t, anchor=x)
            h = add_quadratic(f, q)
            T = transform_pw(S, q)
            worst = max(worst, hausdorff_dz(T, sc_derivative(h, x, v)))
            if math.isfinite(vb):
                shift_err = max(shift_err, abs(varco_bound(T) - (vb + t)))
                shifted = varco_empirical(h, x, v, 0.25)
                bracket_err = max(bracket_err, abs(shifted.s_pass - (base.s_pass + t)),
                                  abs(shifted.s_fail - (base.s_fail + t)))
            else:
                shift_err = max(shift_err, 0.0 if math.isinf(varco_bound(T)) else math.inf)
    ok = worst <= 1e-10 and shift_err == 0.0 and bracket_err <= 1e-3
    record(7, ok, f"max d_Z-Hausdorff {worst:.1e}, varco shift error {shift_err:g}, "
                  f"bracket error {bracket_err:.1e}")
    assert ok


def test_criterion_08_numeric_matches_closed_form():
    worst = 0.0
    eps_gap = 0.0
    for name, x, v in ALL_ANCHORS:
        f = builtin(name)
        S = sc_derivative(f, x, v)
        N1 = sc_derivative_numeric(localization(f, x, v, 0.25), x, v)
        N2 = sc_derivative_numeric(localization(f, x, v, 0.125), x, v)
        worst = max(worst, hausdorff_dz(S, N1), hausdorff_dz(S, N2))
        eps_gap = max(eps_gap, hausdorff_dz(N1, N2))
    ok = worst <= 1e-6 and eps_gap <= 1e-6
    record(8, ok, f"{len(ALL_ANCHORS)} anchors, max d_Z-Hausdorff {worst:.1e}, eps vs eps/2 gap {eps_gap:.1e}")
    assert ok


def test_criterion_09_coderivative_consistency():
    notes = []
    ok = True
    for name in ("abs", "flagship_jump", "quad(0.5)", "quad(1)", "quad(2)"):
        f = builtin(name)
        for x, v in ANCHORS[name]:
            cone = attentive_coderivative_1d(f, x[0], v[0])
            S = sc_derivative(f, x, v)
            inside = all(cone.contains_subspace(adjoint(L)) for L in S.subspaces())
            tb = tilt_bound(S)
            rayleigh, _ = tilt_rayleigh_1d(cone)
            agree = isinstance(tb, NotTiltStable) or abs(rayleigh - tb) <= 1e-10
            ok &= inside and agree
            notes.append(f"{name}@{x[0]:g},{v[0]:g}:{'ok' if inside and agree else 'BAD'}")
    record(9, ok, " ".join(notes))
    assert ok


def test_criterion_10_affine_minorant():
    notes = []
    ok = True
    cases = [("f2_zero", True), ("abs", True), ("orthant_quad(2,3)", True), ("f1_neg_quartic", False)]
    for name, expect in cases:
        f = builtin(name)
        for x, v in ANCHORS[name]:
            m = build_affine_minorant(localization(f, x, v, 0.25))
            good = m.holds == expect
            if expect:
                good &= m.max_excess <= 1e-12 and m.graph_gap <= 1e-12
            else:
                good &= m.max_excess > 1e-12 and m.excess_at is not None
            ok &= good
            notes.append(f"{name}@{x}: holds={m.holds} excess={m.max_excess:.1e}")
    record(10, ok, "; ".join(notes))
    assert ok
