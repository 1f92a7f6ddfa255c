"""Point-based and neighborhood second-order tests and exact-bound formulas."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import PreconditionError, default_resolution, sample_truncated_graph
from .scderiv import sc_derivative
from .subspace import AxiomError, check_pw_axioms

PSD_TOL = 1e-9
RANK_TOL = 1e-10


@dataclass(frozen=True)
class NotTiltStable:
    """Outcome of ``tilt_bound`` when some W is singular or P W^-1 is not PSD."""

    pair: object
    reason: str

    def __repr__(self):
        return f"NotTiltStable({self.reason}; pair={self.pair!r})"


@dataclass
class Verdict:
    passed: bool
    margin: float
    witness: object = None
    boundary: bool = False
    details: dict = field(default_factory=dict)


@dataclass
class BoundReport:
    varco: float
    varco_pair: object
    tilt: object  # float or NotTiltStable
    tilt_pair: object
    per_pair: list
    flags: list


def _validate(pwset):
    for p in pwset:
        diag = check_pw_axioms(p.P, p.W)
        if not diag["passed"]:
            raise AxiomError(f"pair {p!r} violates the (P, W) axioms", diag)


def _range_basis(P):
    w, V = np.linalg.eigh(P)
    return V[:, w > 0.5]


def pair_varco(p):
    """``inf <p, PWPp> / |Pp|^2``: smallest eigenvalue of PWP on rge P (+inf if P = 0)."""
    B = _range_basis(p.P)
    if B.shape[1] == 0:
        return math.inf
    return float(np.linalg.eigvalsh(B.T @ p.W @ B).min())


def varco_bound(pwset):
    """Minimum over pairs of ``pair_varco``; P = 0 pairs follow the 0/0 := inf convention."""
    if len(pwset) == 0:
        raise ValueError("empty PWSet")
    _validate(pwset)
    return min(pair_varco(p) for p in pwset)


def pair_tilt(p):
    """``|P W^-1|`` or NotTiltStable when W is singular or P W^-1 is not PSD."""
    W = p.W
    s = np.linalg.svd(W, compute_uv=False)
    if s.min() <= RANK_TOL * max(1.0, s.max()):
        return NotTiltStable(p, "W is singular")
    M = p.P @ np.linalg.inv(W)
    M = (M + M.T) / 2
    ev = np.linalg.eigvalsh(M)
    if ev.min() < -PSD_TOL * (1.0 + np.abs(ev).max()):
        return NotTiltStable(p, "P W^-1 is not positive semidefinite")
    return float(np.abs(ev).max())


def tilt_bound(pwset):
    """``sup |P W^-1|`` over the set, or the first NotTiltStable outcome."""
    if len(pwset) == 0:
        raise ValueError("empty PWSet")
    _validate(pwset)
    best = -math.inf
    for p in pwset:
        t = pair_tilt(p)
        if isinstance(t, NotTiltStable):
            return t
        best = max(best, t)
    return best


def bound_report(pwset):
    """Varco and tilt with the pairs attaining them, per-pair values and convention flags."""
    _validate(pwset)
    per, flags = [], []
    for p in pwset:
        v, t = pair_varco(p), pair_tilt(p)
        per.append({"pair": p, "varco": v, "tilt": t})
        if math.isinf(v):
            flags.append("varco: P = 0 pair, 0/0 := inf")
    vi = min(range(len(per)), key=lambda k: per[k]["varco"])
    tilt = tilt_bound(pwset)
    if isinstance(tilt, NotTiltStable):
        tpair = tilt.pair
    else:
        tpair = max(per, key=lambda e: e["tilt"])["pair"]
    return BoundReport(per[vi]["varco"], per[vi]["pair"], tilt, tpair, per, flags)


def _psd_margin(M, scale):
    ev = float(np.linalg.eigvalsh((M + M.T) / 2).min())
    return ev, ev >= -PSD_TOL * (1.0 + scale)


def test_pointbased(pwset, s):
    """Pass iff ``W - sP`` is PSD for every pair; ``boundary`` flags ``s = varco``."""
    _validate(pwset)
    margin, witness, ok = math.inf, None, True
    for p in pwset:
        m, good = _psd_margin(p.W - s * p.P, float(np.linalg.norm(p.W, 2)))
        if m < margin:
            margin, witness = m, p
        ok &= good
    vb = varco_bound(pwset)
    boundary = math.isfinite(vb) and abs(s - vb) <= 1e-9 * (1.0 + abs(vb))
    return Verdict(ok, margin, None if ok else witness, boundary, {"varco_bound": vb})


test_pointbased.__test__ = False


def test_neighborhood(f, xbar, xstar, s, window, resolution=None):
    """PSD test of ``PWP - sP`` at every sampled point of the truncated window."""
    resolution = resolution or default_resolution(f.dim)
    g = sample_truncated_graph(f, window, resolution, "attentive")
    margin, tested = math.inf, 0
    for x, v in zip(g.X, g.XS):
        try:
            S = sc_derivative(f, x, v)
        except PreconditionError:
            continue
        for p in S:
            tested += 1
            M = p.P @ p.W @ p.P - s * p.P
            m, good = _psd_margin(M, float(np.linalg.norm(p.W, 2)))
            margin = min(margin, m)
            if not good:
                return Verdict(False, m, {"x": x.tolist(), "xstar": v.tolist(), "pair": p},
                               details={"points_tested": tested, "window": window})
    return Verdict(True, margin, details={"points_tested": tested, "window": window})


test_neighborhood.__test__ = False


# ---------------------------------------------------------------------------
# 1D Rayleigh tests on the coderivative cone


def _arc_candidates(arcs, extra):
    for a, b in arcs:
        yield a
        yield b
        for t in extra:
            for k in range(4):
                u = t + k * math.pi / 2
                u = math.fmod(u, 2 * math.pi)
                if u < 0:
                    u += 2 * math.pi
                if a <= u <= b:
                    yield u


def coderivative_rayleigh_1d(cone, s):
    """Pass iff ``z* z >= s z^2`` on gph D*_f.

    On unit vectors (cos t, sin t) the margin ``cos t sin t - s cos^2 t`` is
    minimized at arc endpoints or at stationary points ``tan 2t = -1/s``.
    """
    crit = [0.5 * math.atan2(1.0, -s), 0.5 * math.atan2(-1.0, s)]
    best, arg = math.inf, None
    for t in _arc_candidates(cone.graph_arcs, crit):
        val = math.cos(t) * math.sin(t) - s * math.cos(t) ** 2
        if val < best:
            best, arg = val, t
    ok = best >= -1e-12
    witness = None if ok else (math.cos(arg), math.sin(arg))
    return Verdict(ok, best, witness)


coderivative_rayleigh_1d.__test__ = False


def tilt_rayleigh_1d(cone):
    """``sup z^2 / <z*, z>`` over gph D*_f with 0/0 := 0.

    Returns ``(value, flags)``; the value is +inf when some pair with z != 0
    has ``<z*, z> <= 0``.
    """
    flags = []
    half = math.pi / 2
    best = 0.0
    for a, b in cone.graph_arcs:
        pts = [a, b] if b > a else [a]
        for t in pts:
            if abs(math.cos(t)) <= 1e-12:
                flags.append("z = 0 piece, 0/0 := 0")
        # any part of the arc in a closed quadrant II/IV with z != 0 gives inf
        for q0 in (half, 3 * half):
            lo, hi = max(a, q0), min(b, q0 + half)
            if lo <= hi and not (lo == hi and abs(math.cos(lo)) <= 1e-12):
                if hi - lo > 1e-12 or abs(math.cos(lo)) > 1e-12:
                    return math.inf, flags
        for q0 in (0.0, 2 * half):
            if a <= q0 <= b and abs(math.sin(q0)) <= 1e-12:
                return math.inf, flags
        if b >= 4 * half - 1e-12:
            return math.inf, flags
        # arc inside quadrant I or III: cot is largest at the smallest angle
        start = a
        if abs(math.cos(start)) > 1e-12:
            best = max(best, math.cos(start) / math.sin(start))
    return best, sorted(set(flags))
