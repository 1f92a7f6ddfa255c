"""Brute-force verifiers of the definitional properties.

Growth and monotonicity verdicts are decided on a sequence of shrinking
windows (level k scales the radii and ``rho - f(xbar)`` by ``2^-k``): the
property holds locally when it holds on some window of the sequence.  Margins
are reported raw and normalized by ``|x' - x|^2`` (``|y - x|^2`` for pairs),
the normalized value being the one compared against ``-1e-9``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .catalog import box_grid
from .graph import Window, check_anchor, default_resolution, localization, sample_truncated_graph

LEVELS = 9
NORM_TOL = 1e-9
PAIR_CAP = 500_000


@dataclass
class OracleResult:
    passed: bool
    margin: float
    normalized_margin: float
    witness: dict = None
    level: int = 0
    details: dict = field(default_factory=dict)


def _subsample(g, cap=PAIR_CAP):
    """Indices of a deterministic stratified subsample with at most ``cap`` pairs.

    Extremal samples (fan endpoints, cone edges) are always kept; the rest is
    thinned by a constant stride in canonical order.
    """
    N = len(g)
    if N * (N - 1) // 2 <= cap:
        return np.arange(N)
    budget = int((1 + math.isqrt(1 + 8 * cap)) // 2)
    ext = np.flatnonzero(g.extremal)
    rest = np.flatnonzero(~g.extremal)
    room = max(budget - ext.size, 1)
    stride = max(1, math.ceil(rest.size / room))
    keep = np.union1d(ext, rest[::stride])
    return keep


def _pair_witness(g, idx, i, j):
    a, b = idx[i], idx[j]
    return {
        "x": g.X[a].tolist(), "xstar": g.XS[a].tolist(),
        "y": g.X[b].tolist(), "ystar": g.XS[b].tolist(),
    }


def _monotone_on(g, s):
    if len(g) < 2:
        return math.inf, math.inf, None, None
    idx = _subsample(g)
    nm, ni, nj, rm, ri, rj = kernels.monotone_pairs(g.X[idx], g.XS[idx], float(s))
    wit = _pair_witness(g, idx, ni, nj) if ni >= 0 else None
    return nm, rm, wit, idx.size


def check_monotone(f, xbar, xstar, s, eps, mode="attentive", resolution=None,
                   v_radius=None, levels=LEVELS, graphs=None):
    """All-pairs test of ``<y* - x*, y - x> >= s |y - x|^2`` on the ε-localization.

    ``v_radius`` fixes the dual radius on every level (default: follows eps).
    """
    resolution = resolution or default_resolution(f.dim)
    check_anchor(f, xbar, xstar)
    last = None
    for k in range(levels):
        if graphs is not None and k < len(graphs):
            g = graphs[k]
        else:
            g = localization(f, xbar, xstar, eps * 2.0**-k, mode, resolution, v_radius)
            if graphs is not None:
                graphs.append(g)
        nm, rm, wit, used = _monotone_on(g, s)
        last = OracleResult(nm >= -NORM_TOL, rm, nm, wit, k,
                            {"points": len(g), "points_used": used, "eps": eps * 2.0**-k, "mode": mode})
        if last.passed:
            return last
    return last


def _growth_on(f, g, s, resolution):
    win = g.window
    XP = box_grid(np.array(win.xbar), win.u_radius, resolution)
    XP = XP[np.linalg.norm(XP - np.array(win.xbar), axis=1) < win.u_radius]
    FP = f.evaluate_many(XP)
    if len(g) == 0:
        return math.inf, math.inf, None
    nm, p, q, rm, rp, rq = kernels.growth_pairs(XP, FP, g.X, g.XS, g.F, float(s))
    wit = None
    if p >= 0:
        wit = {"x": g.X[q].tolist(), "xstar": g.XS[q].tolist(), "fx": float(g.F[q]),
               "xprime": XP[p].tolist(), "fxprime": float(FP[p])}
    return nm, rm, wit


def check_quadratic_growth(f, xbar, xstar, s, window, resolution=None, levels=LEVELS):
    """``f(x') >= f(x) + <x*, x' - x> + (s/2)|x' - x|^2`` for grid x' in U, (x, x*) sampled."""
    resolution = resolution or default_resolution(f.dim)
    check_anchor(f, xbar, xstar)
    fbar = f.evaluate(xbar)
    last = None
    for k in range(levels):
        win = window.shrink(2.0**-k, fbar)
        g = sample_truncated_graph(f, win, resolution, "attentive")
        nm, rm, wit = _growth_on(f, g, s, resolution)
        last = OracleResult(nm >= -NORM_TOL, rm, nm, wit, k,
                            {"points": len(g), "u_radius": win.u_radius})
        if last.passed:
            return last
    return last


@dataclass
class ProxEstimate:
    value: float
    witness: dict
    window: Window


def estimate_prox_regularity(f, xbar, xstar, window, resolution=None):
    """Largest ``2 (f(x) + <x*, x'-x> - f(x')) / |x'-x|^2`` on the window, clamped at 0."""
    resolution = resolution or default_resolution(f.dim)
    check_anchor(f, xbar, xstar)
    g = sample_truncated_graph(f, window, resolution, "attentive")
    nm, _, wit = _growth_on(f, g, 0.0, resolution)
    val = max(0.0, -2.0 * nm) if math.isfinite(nm) else 0.0
    return ProxEstimate(val, wit, window)


# ---------------------------------------------------------------------------
# tilt probe


@dataclass
class TiltProbeResult:
    tilt_stable: bool
    multivalued: bool
    jump: bool
    lipschitz: float
    tilts: np.ndarray
    argmins: np.ndarray
    reason: str
    details: dict = field(default_factory=dict)


def _tilt_grid(n, v_radius, per_axis):
    axis = np.linspace(-v_radius, v_radius, per_axis)
    if n == 1:
        return axis[:, None]
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _refine(f, xbar, gamma, center, h, tilt, rounds=10):
    """Local grid refinement of the tilted objective around ``center``."""
    best = center
    fb = f.evaluate(best) - tilt @ best
    for _ in range(rounds):
        local = box_grid(best, 2.0 * h, 11)
        local = local[np.linalg.norm(local - xbar, axis=1) <= gamma]
        vals = f.evaluate_many(local) - local @ tilt
        k = int(np.argmin(vals))
        if vals[k] < fb:
            best, fb = local[k], vals[k]
        h /= 5.0
    return best, fb


def _lipschitz(tilts, argmins):
    dT = np.linalg.norm(tilts[:, None, :] - tilts[None, :, :], axis=2)
    dM = np.linalg.norm(argmins[:, None, :] - argmins[None, :, :], axis=2)
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = np.where(dT > 0, dM / dT, 0.0)
    return float(Q.max()) if Q.size else 0.0


def _argmin_sweep(f, xbar, gamma, tilts, resolution):
    n = xbar.size
    X = box_grid(xbar, gamma, resolution)
    X = X[np.linalg.norm(X - xbar, axis=1) <= gamma * (1 + 1e-12)]
    F = f.evaluate_many(X)
    ok = np.isfinite(F)
    X, F = X[ok], F[ok]
    M = max(1, (resolution - 1) // 2)
    cell = gamma / M
    argmins = np.empty((tilts.shape[0], n))
    multi = None
    for k, t in enumerate(tilts):
        vals = F - X @ t
        j = int(np.argmin(vals))
        vmin = vals[j]
        ties = X[vals <= vmin + 1e-10 * (1.0 + abs(vmin))]
        spread = float(np.linalg.norm(ties - ties[0], axis=1).max()) if ties.shape[0] > 1 else 0.0
        if spread > 10 * cell and multi is None:
            multi = {"tilt": t.tolist(), "minimizers": [ties[0].tolist(), ties[-1].tolist()], "value": float(vmin)}
        best, _ = _refine(f, xbar, gamma, X[j], cell, t)
        argmins[k] = best
    return argmins, multi, cell


def tilt_probe(f, xbar, gamma, v_radius, resolution=401, tilt_points=None, xstar=None):
    """Grid study of ``M(x*) = argmin {f(x) - <xstar + x*, x> : |x - xbar| <= gamma}``.

    Tilts x* form an odd grid on ``[-v_radius, v_radius]^n`` containing 0.
    Reports multivaluedness (near-equal minimizers more than 10 cells apart),
    a jump (the Lipschitz quotient grows by more than 1.5x when the tilt grid
    is refined) and the Lipschitz estimate of the selection.  A verdict of
    tilt stability is only supported at the tested resolution.
    """
    xbar = np.atleast_1d(np.asarray(xbar, dtype=float))
    n = xbar.size
    base = np.zeros(n) if xstar is None else np.atleast_1d(np.asarray(xstar, dtype=float))
    per_axis = tilt_points or (41 if n == 1 else 11)
    coarse = _tilt_grid(n, v_radius, per_axis) + base
    fine = _tilt_grid(n, v_radius, 2 * per_axis - 1) + base
    am_c, multi_c, cell = _argmin_sweep(f, xbar, gamma, coarse, resolution)
    am_f, multi_f, _ = _argmin_sweep(f, xbar, gamma, fine, resolution)
    lip_c = _lipschitz(coarse - base, am_c)
    lip_f = _lipschitz(fine - base, am_f)
    multi = multi_c or multi_f
    jump = lip_f > 1.5 * lip_c and lip_f > 1e-9
    zero = int(np.argmin(np.linalg.norm(fine - base, axis=1)))
    off_center = float(np.linalg.norm(am_f[zero] - xbar))
    reasons = []
    if multi:
        reasons.append("multivalued argmin")
    if jump:
        reasons.append("argmin jumps")
    if off_center > 10 * cell:
        reasons.append("zero-tilt minimizer away from xbar")
    stable = not reasons
    return TiltProbeResult(
        stable, bool(multi), bool(jump), lip_f, fine - base, am_f,
        "; ".join(reasons) if reasons else "single-valued and Lipschitz (supported at resolution)",
        {"lipschitz_coarse": lip_c, "grid_cell": cell, "multivalued_witness": multi,
         "zero_tilt_offset": off_center, "resolution": resolution},
    )


# ---------------------------------------------------------------------------
# affine minorant


class AffineMinorant:
    """``h(x') = max over the graph sample of f(x) + <x*, x' - x>``."""

    def __init__(self, g):
        if len(g) == 0:
            raise ValueError("empty graph")
        self.graph = g
        self.X, self.XS, self.F = g.X, g.XS, g.F

    def __call__(self, XP):
        XP = np.atleast_2d(np.asarray(XP, dtype=float))
        if XP.shape[1] != self.X.shape[1]:
            XP = XP.reshape(-1, self.X.shape[1])
        return kernels.affine_max(XP, self.X, self.XS, self.F)


@dataclass
class MinorantCheck:
    minorant: AffineMinorant
    max_excess: float  # max over the U grid of h - f
    excess_at: list
    graph_gap: float  # max over graph points of |h - f|
    holds: bool


def build_affine_minorant(g, resolution=None, tol=1e-12):
    """Max-of-affine function from the graph sample plus its verification on U."""
    h = AffineMinorant(g)
    f = g.f
    win = g.window
    resolution = resolution or g.resolution
    xbar = np.array(win.xbar)
    U = box_grid(xbar, win.u_radius, resolution)
    U = U[np.linalg.norm(U - xbar, axis=1) < win.u_radius]
    FU = f.evaluate_many(U)
    ok = np.isfinite(FU)
    U, FU = U[ok], FU[ok]
    excess = h(U) - FU
    k = int(np.argmax(excess))
    gap = float(np.abs(h(g.X) - g.F).max())
    max_excess = float(excess[k])
    return MinorantCheck(h, max_excess, U[k].tolist(), gap, max_excess <= tol and gap <= tol)


# ---------------------------------------------------------------------------
# empirical varco


@dataclass
class VarcoBracket:
    s_pass: float
    s_fail: float
    one_sided: str = ""
    evaluations: int = 0

    @property
    def width(self):
        return self.s_fail - self.s_pass


def varco_empirical(f, xbar, xstar, eps, resolution=None, s_lo=-4.0, s_hi=8.0, width=1e-3):
    """Bisection bracket ``[s_pass, s_fail]`` for varco via attentive monotonicity.

    If both ends pass (fail) the bracket is one-sided: ``s_fail = inf``
    (``s_pass = -inf``).
    """
    graphs = []
    count = 0

    def passes(s):
        nonlocal count
        count += 1
        return check_monotone(f, xbar, xstar, s, eps, "attentive", resolution, graphs=graphs).passed

    lo_ok, hi_ok = passes(s_lo), passes(s_hi)
    if lo_ok and hi_ok:
        return VarcoBracket(s_hi, math.inf, "upper", count)
    if not lo_ok and not hi_ok:
        return VarcoBracket(-math.inf, s_lo, "lower", count)
    lo, hi = s_lo, s_hi
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            lo = mid
        else:
            hi = mid
    return VarcoBracket(lo, hi, "", count)
